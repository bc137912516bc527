// Copyright 2026 The weakbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "weakbell/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <ostream>

namespace weakbell {

namespace {

constexpr int kExcessDigits = 10;

/// Significant digits of exp(l) that a double log of magnitude |l| resolves.
int reliable_digits(double log10_value, int cap) {
    const double magnitude = std::abs(log10_value) + 1.0;
    const int lost = static_cast<int>(std::ceil(std::log10(magnitude)));
    return std::clamp(15 - lost, 3, cap);
}

nlohmann::json direction_json(const Direction &d) {
    const Vec3 &v = d.vector();
    return nlohmann::json::array({v(0), v(1), v(2)});
}

nlohmann::json setting_key_json(const std::array<std::array<double, 2>, 2> &v) {
    nlohmann::json j = nlohmann::json::object();
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            j[std::to_string(x) + std::to_string(y)] = v[x][y];
        }
    }
    return j;
}

/// Mantissa digits (kExcessDigits of them) and decimal exponent of exp(l).
std::pair<std::string, long long> decimal_digits(double log_abs) {
    const double l10 = log_abs / std::numbers::ln10;
    const int digits = reliable_digits(l10, kExcessDigits);
    auto exponent = static_cast<long long>(std::floor(l10));
    double mantissa = std::pow(10.0, l10 - static_cast<double>(exponent));
    auto scaled = static_cast<long long>(
        std::llround(mantissa * std::pow(10.0, digits - 1)));
    if (scaled >= static_cast<long long>(std::pow(10.0, digits))) {
        scaled /= 10;
        ++exponent;
    }
    return {std::to_string(scaled), exponent};
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_from_log(double value, double log_value) {
    if (value >= std::numeric_limits<double>::min() || std::isnan(log_value)) {
        return format_number(value);
    }
    if (std::isinf(log_value) && log_value < 0) {
        return "0";
    }
    const double l10 = log_value / std::numbers::ln10;
    const double exponent = std::floor(l10);
    const double mantissa = std::pow(10.0, l10 - exponent);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*ge%.0f", reliable_digits(l10, 15),
                  mantissa, exponent);
    return buf;
}

std::string format_two_plus(int sign, double log_abs_excess) {
    if (sign == 0 || (std::isinf(log_abs_excess) && log_abs_excess < 0)) {
        return "2";
    }
    if (log_abs_excess > std::log(1e-12)) {
        return format_number(2.0 + sign * std::exp(log_abs_excess));
    }
    const auto [digits, exponent] = decimal_digits(log_abs_excess);
    // Fraction digits of the excess: (-exponent - 1) zeros, then the digits.
    std::string frac(static_cast<std::size_t>(-exponent - 1), '0');
    frac += digits;
    if (sign > 0) {
        while (frac.back() == '0') {
            frac.pop_back();
        }
        return "2." + frac;
    }
    // 1 + (1 - excess): 10^L - frac by long subtraction.
    std::string out = frac;
    int borrow = 0;
    for (std::size_t i = out.size(); i-- > 0;) {
        int d = -(frac[i] - '0') - borrow;
        borrow = d < 0 ? 1 : 0;
        out[i] = static_cast<char>('0' + d + 10 * borrow);
    }
    while (out.size() > 1 && out.back() == '0') {
        out.pop_back();
    }
    return "1." + out;
}

void write_tradeoff_csv(std::ostream &os, std::span<const TradeoffRow> rows) {
    os << "family,parameter,F,G\n";
    for (const auto &r : rows) {
        os << family_name(r.family) << ',' << format_number(r.parameter) << ','
           << format_number(r.quality_factor) << ','
           << format_number(r.precision) << '\n';
    }
}

void write_pointer_csv(std::ostream &os, const PointerState &p) {
    os << "q,phi\n";
    const auto phi = p.samples();
    for (std::size_t i = 0; i < phi.size(); ++i) {
        os << format_number(p.position(i)) << ',' << format_number(phi[i])
           << '\n';
    }
}

void write_double_violation_csv(std::ostream &os,
                                std::span<const DoubleViolationRow> rows) {
    os << "G,I1,I2\n";
    for (const auto &r : rows) {
        os << format_number(r.precision) << ',' << format_number(r.chsh_first)
           << ',' << format_number(r.chsh_second) << '\n';
    }
}

void write_positivity_csv(std::ostream &os, const PositivityReport &report) {
    os << "theta,min_prob,tangent_value\n";
    for (const auto &r : report.rows) {
        os << format_number(r.theta) << ',' << format_number(r.min_probability)
           << ',' << format_number(r.tangent_value) << '\n';
    }
}

void write_protocol_csv(std::ostream &os, const ProtocolSchedule &schedule) {
    os << "n,theta_n,F_n,G_n,P_n,chi_n,bound,limit_I,V_n,log10_V_n\n";
    for (const auto &r : schedule.rows) {
        const ChshBound bound = chsh_lower_bound(schedule, r.n);
        os << r.n << ',' << format_from_log(r.theta, r.log_theta) << ','
           << format_from_log(r.quality_factor, r.log_quality_factor) << ','
           << format_number(r.precision) << ','
           << format_from_log(r.spoil_probability, r.log_spoil_probability)
           << ',' << format_from_log(r.chi, r.log_chi) << ','
           << format_two_plus(bound.excess_sign, bound.log_abs_excess) << ','
           << format_two_plus(1, r.log_violation) << ','
           << format_from_log(r.violation, r.log_violation) << ','
           << format_number(r.log_violation / std::numbers::ln10) << '\n';
    }
}

nlohmann::json to_json(const DensityOperator &rho) {
    nlohmann::json entries = nlohmann::json::array();
    const MatX &m = rho.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            entries.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return {{"dim", rho.dim()}, {"weight", rho.weight()}, {"entries", entries}};
}

DensityOperator density_from_json(const nlohmann::json &j) {
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        const auto &entries = j.at("entries");
        if (dim == 0 || entries.size() != dim * dim) {
            throw InvalidParameter("entries must hold dim*dim pairs");
        }
        MatX m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const auto &e = entries[k];
            if (!e.is_array() || e.size() != 2) {
                throw InvalidParameter("each entry must be a [re, im] pair");
            }
            m(static_cast<Eigen::Index>(k / dim),
              static_cast<Eigen::Index>(k % dim)) =
                Complex(e[0].get<double>(), e[1].get<double>());
        }
        return DensityOperator::unnormalized(m);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidParameter(std::string("malformed density operator: ") +
                               e.what());
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

nlohmann::json to_json(const BellChainConfig &cfg) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto &s : cfg.stages) {
        nlohmann::json st = {
            {"directions",
             {direction_json(s.directions[0]), direction_json(s.directions[1])}},
            {"F", s.strength.quality_factor},
            {"G", s.strength.precision},
            {"bias", s.bias}};
        if (s.pointer) {
            const auto phi = s.pointer->samples();
            const std::string_view raw(
                reinterpret_cast<const char *>(phi.data()),
                phi.size() * sizeof(double));
            char hash[20];
            std::snprintf(hash, sizeof hash, "%016llx",
                          static_cast<unsigned long long>(fnv1a64(raw)));
            st["pointer"] = {{"label", s.pointer->label()},
                             {"grid_spacing", s.pointer->grid_spacing()},
                             {"samples", phi.size()},
                             {"hash", hash}};
        }
        stages.push_back(std::move(st));
    }
    return {{"alice",
             {direction_json(cfg.alice[0]), direction_json(cfg.alice[1])}},
            {"stages", stages},
            {"initial_state", to_json(cfg.initial_state)}};
}

std::string config_digest(const BellChainConfig &cfg) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json(cfg).dump())));
    return hash;
}

nlohmann::json to_json(const ChiSquareReport &r) {
    return {{"statistic", r.statistic},
            {"degrees_of_freedom", r.degrees_of_freedom},
            {"p_value", r.p_value},
            {"significance", r.significance},
            {"merged_cells", r.merged_cells},
            {"passed", r.passed}};
}

nlohmann::json to_json(const EmpiricalReport &report,
                       const ChiSquareReport &chi_square) {
    nlohmann::json bobs = nlohmann::json::array();
    for (const auto &b : report.per_bob) {
        nlohmann::json trials = nlohmann::json::object();
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                trials[std::to_string(x) + std::to_string(y)] = b.trials[x][y];
            }
        }
        bobs.push_back({{"E", setting_key_json(b.correlations.E)},
                        {"E_stderr", setting_key_json(b.correlation_stderr)},
                        {"trials", trials},
                        {"complete", b.complete},
                        {"chsh", b.chsh ? nlohmann::json(*b.chsh) : nlohmann::json()},
                        {"stderr", b.chsh_stderr},
                        {"analytic_chsh", b.analytic_chsh},
                        {"z", b.z_score ? nlohmann::json(*b.z_score)
                                        : nlohmann::json()}});
    }
    return {{"config_digest", report.config_digest},
            {"seed", report.seed},
            {"trials", report.trials},
            {"per_bob", bobs},
            {"chi_square", to_json(chi_square)}};
}

nlohmann::json to_json(const TripleScanReport &report) {
    const auto &b = report.best;
    return {{"cells", report.cells},
            {"triple_violations", report.triple_violations},
            {"best",
             {{"F1", b.f1},
              {"F2", b.f2},
              {"I1", b.chsh1},
              {"I2", b.chsh2},
              {"I3", b.chsh3},
              {"min", b.worst()}}}};
}

} // namespace weakbell
