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

#include "weakbell/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace weakbell {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this log-bias the first-order form P = sum r_k is exact in doubles.
constexpr double kSmallLogBias = -40.0;

double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(1 - exp(d)) for d <= 0.
double log1m_exp(double d) {
    return d > -std::numbers::ln2 ? std::log(-std::expm1(d))
                                  : std::log1p(-std::exp(d));
}

} // namespace

BiasSchedule BiasSchedule::from_values(std::span<const double> r) {
    BiasSchedule out;
    out.log_r_.reserve(r.size());
    for (double v : r) {
        if (!(v >= 0.0 && v < 1.0)) {
            std::ostringstream msg;
            msg << "input bias must lie in [0, 1), got " << v;
            throw InvalidParameter(msg.str());
        }
        out.log_r_.push_back(v == 0.0 ? kNegInf : std::log(v));
    }
    return out;
}

BiasSchedule BiasSchedule::uniform(std::size_t count, double r) {
    const std::vector<double> values(count, r);
    return from_values(values);
}

BiasSchedule BiasSchedule::uniform_log(std::size_t count, double log_r) {
    if (!(log_r < 0.0) || std::isnan(log_r)) {
        throw InvalidParameter("log bias must be negative");
    }
    BiasSchedule out;
    out.log_r_.assign(count, log_r);
    return out;
}

BiasSchedule BiasSchedule::zero(std::size_t count) {
    BiasSchedule out;
    out.log_r_.assign(count, kNegInf);
    return out;
}

double BiasSchedule::value(std::size_t k) const {
    return std::exp(log_r_.at(k));
}

const ProtocolRow &ProtocolSchedule::row(std::size_t n) const {
    if (n < 1 || n > rows.size()) {
        std::ostringstream msg;
        msg << "protocol row " << n << " outside [1, " << rows.size() << "]";
        throw InvalidParameter(msg.str());
    }
    return rows[n - 1];
}

double log_chi_from_log(double log_F) {
    const double F = std::exp(log_F);
    const double sp = std::sqrt(1.0 + F);
    const double sm = std::sqrt(1.0 - F);
    // chi = F / ((sqrt(1+F) + sqrt(1-F)) (1-F) sqrt(1+F)), free of the
    // cancellation in the defining difference.
    return log_F - std::log((sp + sm) * (1.0 - F) * sp);
}

double chi(double F) {
    if (!(F > 0.0 && F < 1.0)) {
        std::ostringstream msg;
        msg << "chi requires F in (0, 1), got " << F;
        throw InvalidParameter(msg.str());
    }
    return std::exp(log_chi_from_log(std::log(F)));
}

ProtocolSchedule build_schedule(std::size_t N, const BiasSchedule &biases) {
    if (N < 1) {
        throw InvalidParameter("protocol needs at least one Bob");
    }
    if (biases.size() + 1 < N) {
        std::ostringstream msg;
        msg << "protocol with " << N << " Bobs needs " << N - 1
            << " input biases, got " << biases.size();
        throw InvalidParameter(msg.str());
    }
    for (std::size_t k = 0; k < biases.size(); ++k) {
        if (!(biases.log_value(k) < 0.0)) {
            throw InvalidParameter("input bias must lie in [0, 1)");
        }
    }

    ProtocolSchedule schedule{{}, biases};
    schedule.rows.reserve(N);
    double log_tan = 0.0;    // sum of log F_i over earlier Bobs
    double log1m_sum = 0.0;  // sum of log(1 - r_k) over earlier Bobs
    double log_r_sum = kNegInf;  // log of sum r_k, for the tiny-bias regime
    double max_log_r = kNegInf;
    for (std::size_t n = 1; n <= N; ++n) {
        ProtocolRow row;
        row.n = n;
        row.log_tan_theta = log_tan;
        row.tan_theta = std::exp(log_tan);
        const double t = row.tan_theta;
        row.theta = n == 1 ? std::numbers::pi / 4.0 : std::atan(t);
        row.log_theta = t > 1e-8 ? std::log(row.theta) : log_tan;

        // F = t^2 / (1 + sqrt(1 + t^2))^2, the cancellation-free form.
        row.log_quality_factor =
            2.0 * log_tan - 2.0 * std::log1p(std::sqrt(1.0 + t * t));
        row.quality_factor = std::exp(row.log_quality_factor);
        const double F = row.quality_factor;
        row.precision = std::sqrt((1.0 - F) * (1.0 + F));

        if (n == 1) {
            row.spoil_probability = 0.0;
            row.log_spoil_probability = kNegInf;
        } else if (max_log_r < kSmallLogBias) {
            row.log_spoil_probability = log_r_sum;
            row.spoil_probability = std::exp(log_r_sum);
        } else {
            row.spoil_probability = -std::expm1(log1m_sum);
            row.log_spoil_probability = std::log(row.spoil_probability);
        }

        row.log_chi = log_chi_from_log(row.log_quality_factor);
        row.chi = std::exp(row.log_chi);

        const double sp = std::sqrt(1.0 + F);
        const double sm = std::sqrt(1.0 - F);
        row.limit_chsh = 2.0 * sp / sm;
        // I - 2 = 4F / ((sqrt(1+F) + sqrt(1-F)) sqrt(1-F)).
        row.log_violation = std::log(4.0) + row.log_quality_factor -
                            std::log(sp + sm) - 0.5 * std::log1p(-F);
        row.violation = std::exp(row.log_violation);

        schedule.rows.push_back(row);

        log_tan += row.log_quality_factor;
        if (n <= biases.size()) {
            const double log_r = biases.log_value(n - 1);
            max_log_r = std::max(max_log_r, log_r);
            log_r_sum = log_sum_exp(log_r_sum, log_r);
            log1m_sum += std::log1p(-std::exp(log_r));
        }
    }
    return schedule;
}

ProtocolSchedule build_schedule(std::size_t N, std::span<const double> biases) {
    return build_schedule(N, BiasSchedule::from_values(biases));
}

ProtocolSchedule build_limit_schedule(std::size_t N) {
    return build_schedule(N, BiasSchedule::zero(N));
}

double ChshBound::excess() const {
    return excess_sign == 0 ? 0.0 : excess_sign * std::exp(log_abs_excess);
}

ChshBound chsh_lower_bound(const ProtocolSchedule &schedule, std::size_t n) {
    const ProtocolRow &row = schedule.row(n);
    const double F = row.quality_factor;
    const double G = row.precision;
    ChshBound bound;
    bound.value = G * (2.0 / (1.0 - F) - 4.0 * row.spoil_probability);

    const double log_p = row.log_spoil_probability;
    const double log_chi = row.log_chi;
    const double log_scale = std::log(4.0 * G);
    if (log_p < log_chi) {
        bound.excess_sign = 1;
        bound.log_abs_excess = log_scale + log_chi + log1m_exp(log_p - log_chi);
    } else if (log_p > log_chi) {
        bound.excess_sign = -1;
        bound.log_abs_excess = log_scale + log_p + log1m_exp(log_chi - log_p);
    } else {
        bound.excess_sign = 0;
        bound.log_abs_excess = kNegInf;
    }
    return bound;
}

double limit_chsh(const ProtocolSchedule &schedule, std::size_t n) {
    return schedule.row(n).limit_chsh;
}

UniformBias feasible_uniform_bias(std::size_t N) {
    if (N < 2) {
        throw InvalidParameter("feasible bias needs at least two Bobs");
    }
    const double log_target =
        build_limit_schedule(N).row(N).log_chi - std::numbers::ln2;
    const double earlier = static_cast<double>(N - 1);
    UniformBias bias{};
    if (log_target < kSmallLogBias) {
        // (1 - r)^(N-1) = 1 - P to relative accuracy ~P.
        bias.log_r = log_target - std::log(earlier);
        bias.r = std::exp(bias.log_r);
    } else {
        bias.r = -std::expm1(std::log1p(-std::exp(log_target)) / earlier);
        bias.log_r = std::log(bias.r);
    }
    return bias;
}

std::vector<double> decay_ratio_sequence(const ProtocolSchedule &schedule,
                                         std::size_t n_max) {
    if (n_max < 3 || n_max > schedule.size()) {
        std::ostringstream msg;
        msg << "decay ratios need 3 <= n_max <= " << schedule.size()
            << ", got " << n_max;
        throw InvalidParameter(msg.str());
    }
    std::vector<double> ratios;
    ratios.reserve(n_max - 1);
    for (std::size_t n = 1; n < n_max; ++n) {
        const double log_ratio = schedule.row(n + 1).log_violation -
                                 3.0 * schedule.row(n).log_violation +
                                 std::log(4.0);
        ratios.push_back(std::exp(log_ratio));
    }
    return ratios;
}

BellChainConfig protocol_chain(const ProtocolSchedule &schedule,
                               std::size_t bobs) {
    if (bobs < 1 || bobs > schedule.size()) {
        throw InvalidParameter("protocol chain length outside the schedule");
    }
    const Settings first = protocol_settings(schedule.row(1).theta);
    std::vector<BobStage> stages;
    stages.reserve(bobs);
    for (std::size_t n = 1; n <= bobs; ++n) {
        const ProtocolRow &row = schedule.row(n);
        const double r =
            n <= schedule.biases.size() ? schedule.biases.value(n - 1) : 0.0;
        stages.push_back(BobStage::with_strength(
            protocol_settings(row.theta).bob,
            {row.quality_factor, row.precision}, r));
    }
    return make_chain(first.alice, std::move(stages));
}

} // namespace weakbell
