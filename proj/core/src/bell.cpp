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

#include "weakbell/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "weakbell/parallel.hpp"

namespace weakbell {

namespace {

void require_sign(int v, const char *what) {
    if (v != 1 && v != -1) {
        throw InvalidParameter(std::string(what) + " must be +1 or -1");
    }
}

void require_bit(int v, const char *what) {
    if (v != 0 && v != 1) {
        throw InvalidParameter(std::string(what) + " must be 0 or 1");
    }
}

void require_triple_labels(int a, int b1, int b2, int x, int y1, int y2) {
    require_sign(a, "a");
    require_sign(b1, "b1");
    require_sign(b2, "b2");
    require_bit(x, "x");
    require_bit(y1, "y1");
    require_bit(y2, "y2");
}

Mat4 average_stage(const Mat4 &rho, const BobStage &stage) {
    const double F = stage.strength.quality_factor;
    const double r = stage.bias;
    Mat4 out = Mat4::Zero();
    if (r < 1.0) {
        out += (1.0 - r) *
               lift_second(maps::weak_unconditional(stage.directions[0], F), rho);
    }
    if (r > 0.0) {
        out += r * lift_second(maps::weak_unconditional(stage.directions[1], F),
                               rho);
    }
    return out;
}

} // namespace

Settings tsirelson_settings() {
    const double s = std::numbers::sqrt2 / 2.0;
    return {{Direction::z(), Direction::x()},
            {Direction{-s, 0.0, -s}, Direction{s, 0.0, -s}}};
}

Settings protocol_settings(double theta) {
    return {{-Direction::z(), Direction::x()},
            {Direction::z(),
             Direction{std::sin(theta), 0.0, std::cos(theta)}}};
}

Settings settings_by_name(std::string_view name, double theta) {
    if (name == "tsirelson") {
        return tsirelson_settings();
    }
    if (name == "protocol") {
        return protocol_settings(theta);
    }
    throw InvalidParameter("unknown settings '" + std::string(name) + "'");
}

BobStage BobStage::with_strength(const std::array<Direction, 2> &dirs,
                                 MeasurementStrength s, double bias) {
    BobStage stage{dirs, s, bias, nullptr};
    stage.validate();
    return stage;
}

BobStage BobStage::with_pointer(const std::array<Direction, 2> &dirs,
                                std::shared_ptr<const PointerState> pointer,
                                double bias) {
    if (!pointer) {
        throw InvalidParameter("stage pointer is null");
    }
    BobStage stage{dirs, strength_of(*pointer), bias, std::move(pointer)};
    stage.validate();
    return stage;
}

void BobStage::validate() const {
    if (!(bias >= 0.0 && bias <= 1.0)) {
        throw InvalidParameter("input bias must lie in [0, 1]");
    }
    strength.require_physical();
}

void BellChainConfig::validate() const {
    if (stages.empty()) {
        throw InvalidParameter("a chain needs at least one Bob");
    }
    if (initial_state.dim() != 4 || initial_state.weight() != 1.0) {
        throw InvalidState("initial state must be a normalized 4x4 operator");
    }
    for (const auto &stage : stages) {
        stage.validate();
    }
}

BellChainConfig make_chain(const std::array<Direction, 2> &alice,
                           std::vector<BobStage> stages) {
    BellChainConfig cfg{alice, std::move(stages), singlet()};
    cfg.validate();
    return cfg;
}

DensityOperator singlet() {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    // Basis |alice bob>, index 2 * alice + bob, up = 0.
    psi(1) = 1.0 / std::numbers::sqrt2;
    psi(2) = -1.0 / std::numbers::sqrt2;
    return DensityOperator::pure(psi);
}

DensityOperator steered_state(const Direction &u, int a) {
    require_sign(a, "a");
    return DensityOperator::from_matrix(
        0.5 * (Mat2::Identity() - static_cast<double>(a) * spin_observable(u)));
}

TripleGeometry tangent_geometry(double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return {{Direction::z(), Direction::x()},
            {-Direction::x(), -Direction::z()},
            {Direction{-c, 0.0, s}, Direction{s, 0.0, -c}}};
}

double triple_probability_unchecked(int a, int b1, int b2, int x, int y1,
                                    int y2, const TripleGeometry &g,
                                    const MeasurementStrength &s) {
    require_triple_labels(a, b1, b2, x, y1, y2);
    const double F = s.quality_factor;
    const double G = s.precision;
    const double uw = g.alice[x].dot(g.first[y1]);
    const double wv = g.first[y1].dot(g.second[y2]);
    const double uv = g.alice[x].dot(g.second[y2]);
    return b1 * G / 4.0 * ((a * uw + b2 * wv) / 2.0) +
           F / 4.0 * ((1.0 + a * b2 * uv) / 2.0) +
           (1.0 - F) / 4.0 * ((1.0 + a * b2 * uw * wv) / 2.0);
}

double triple_probability(int a, int b1, int b2, int x, int y1, int y2,
                          const TripleGeometry &g,
                          const MeasurementStrength &s) {
    s.require_physical();
    return triple_probability_unchecked(a, b1, b2, x, y1, y2, g, s);
}

double triple_probability_oracle(int a, int b1, int b2, int x, int y1, int y2,
                                 const TripleGeometry &g,
                                 const MeasurementStrength &s) {
    s.require_physical();
    require_triple_labels(a, b1, b2, x, y1, y2);
    // Alice reports a when her spin along u is -a; either result has
    // probability 1/2 on a singlet.
    const DensityOperator bob = steered_state(g.alice[x], -a);
    const DensityOperator after = weak_conditional(bob, g.first[y1], s, b1);
    const Projectors last = projectors(g.second[y2]);
    return 0.5 * (last[b2] * after.matrix()).trace().real();
}

PositivityReport positivity_bound_scan(const MeasurementStrength &s,
                                       std::span<const double> thetas) {
    PositivityReport report;
    report.min_probability = std::numeric_limits<double>::infinity();
    report.max_tangent_value = -std::numeric_limits<double>::infinity();
    for (double theta : thetas) {
        const TripleGeometry g = tangent_geometry(theta);
        double lowest = std::numeric_limits<double>::infinity();
        for (int a : {1, -1}) {
            for (int b1 : {1, -1}) {
                for (int b2 : {1, -1}) {
                    lowest = std::min(lowest, triple_probability_unchecked(
                                                  a, b1, b2, 0, 0, 0, g, s));
                }
            }
        }
        const double tangent =
            s.quality_factor * std::sin(theta) + s.precision * std::cos(theta);
        report.rows.push_back({theta, lowest, tangent});
        if (lowest < report.min_probability) {
            report.min_probability = lowest;
            report.theta_at_min = theta;
        }
        if (tangent > report.max_tangent_value) {
            report.max_tangent_value = tangent;
            report.theta_at_max_tangent = theta;
        }
    }
    report.consistent = report.min_probability >= -1e-10;
    return report;
}

DensityOperator sequential_average_state(const BellChainConfig &cfg,
                                         std::size_t n) {
    cfg.validate();
    if (n < 1 || n > cfg.stages.size() + 1) {
        std::ostringstream msg;
        msg << "Bob index " << n << " outside [1, " << cfg.stages.size() + 1
            << "]";
        throw InvalidParameter(msg.str());
    }
    Mat4 rho = cfg.initial_state.as_two_qubit();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        rho = average_stage(rho, cfg.stages[k]);
    }
    return DensityOperator::from_matrix(rho);
}

CorrelationTable correlation_table(const DensityOperator &state,
                                   const std::array<Direction, 2> &alice,
                                   const std::array<Direction, 2> &bob,
                                   double G) {
    if (!(G >= 0.0 && G <= 1.0)) {
        throw InvalidParameter("precision must lie in [0, 1]");
    }
    const Mat4 rho = state.as_two_qubit() / state.weight();
    CorrelationTable table;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            table.E[x][y] = G * correlation(rho, alice[x], bob[y]);
        }
    }
    return table;
}

double chsh(const DensityOperator &state,
            const std::array<Direction, 2> &alice,
            const std::array<Direction, 2> &bob, double G) {
    // G applied once to the sum, so chsh(G) == G * chsh(1) exactly.
    const double unit = correlation_table(state, alice, bob, 1.0).chsh();
    if (!(G >= 0.0 && G <= 1.0)) {
        throw InvalidParameter("precision must lie in [0, 1]");
    }
    return G * unit;
}

double chain_chsh(const BellChainConfig &cfg, std::size_t n) {
    if (n < 1 || n > cfg.stages.size()) {
        throw InvalidParameter("Bob index outside the chain");
    }
    const BobStage &stage = cfg.stages[n - 1];
    return chsh(sequential_average_state(cfg, n), cfg.alice, stage.directions,
                stage.strength.precision);
}

std::vector<DoubleViolationRow>
double_violation_curve(std::optional<PointerFamily> family,
                       std::span<const double> precisions,
                       const PointerOptions &options) {
    const Settings settings = tsirelson_settings();
    std::vector<DoubleViolationRow> rows(precisions.size());
    parallel_for(precisions.size(), [&](std::size_t i) {
        const double target = precisions[i];
        if (!(target > 0.0 && target < 1.0)) {
            throw InvalidParameter("double-violation precisions must lie in (0, 1)");
        }
        const MeasurementStrength s =
            family ? strength_of(pointer_for_precision(*family, target, options))
                   : MeasurementStrength::optimal_from_precision(target);
        const BellChainConfig cfg = make_chain(
            settings.alice,
            {BobStage::with_strength(settings.bob, s, 0.5),
             BobStage::with_strength(settings.bob, MeasurementStrength::strong(),
                                     0.5)});
        rows[i] = {s.precision, s.quality_factor, chain_chsh(cfg, 1),
                   chain_chsh(cfg, 2)};
    });
    return rows;
}

bool has_double_violation(std::span<const DoubleViolationRow> rows) {
    return std::any_of(rows.begin(), rows.end(), [](const auto &r) {
        return r.chsh_first > 2.0 && r.chsh_second > 2.0;
    });
}

double TripleScanCell::worst() const {
    return std::min({chsh1, chsh2, chsh3});
}

TripleScanReport unbiased_triple_scan(std::span<const double> f1_grid,
                                      std::span<const double> f2_grid,
                                      const Settings &settings,
                                      unsigned threads) {
    if (f1_grid.empty() || f2_grid.empty()) {
        throw InvalidParameter("triple scan grids must be non-empty");
    }
    std::vector<TripleScanCell> best_per_row(f1_grid.size());
    std::vector<std::size_t> count_per_row(f1_grid.size(), 0);
    parallel_for(
        f1_grid.size(),
        [&](std::size_t i) {
            const auto s1 = MeasurementStrength::optimal_from_quality(f1_grid[i]);
            TripleScanCell best;
            best.chsh1 = best.chsh2 = best.chsh3 =
                -std::numeric_limits<double>::infinity();
            for (double f2 : f2_grid) {
                const auto s2 = MeasurementStrength::optimal_from_quality(f2);
                const BellChainConfig cfg = make_chain(
                    settings.alice,
                    {BobStage::with_strength(settings.bob, s1),
                     BobStage::with_strength(settings.bob, s2),
                     BobStage::with_strength(settings.bob,
                                             MeasurementStrength::strong())});
                TripleScanCell cell{f1_grid[i], f2, chain_chsh(cfg, 1),
                                    chain_chsh(cfg, 2), chain_chsh(cfg, 3)};
                if (cell.worst() > 2.0) {
                    ++count_per_row[i];
                }
                if (cell.worst() > best.worst()) {
                    best = cell;
                }
            }
            best_per_row[i] = best;
        },
        threads);

    TripleScanReport report;
    report.best = best_per_row.front();
    for (std::size_t i = 0; i < f1_grid.size(); ++i) {
        if (best_per_row[i].worst() > report.best.worst()) {
            report.best = best_per_row[i];
        }
        report.triple_violations += count_per_row[i];
    }
    report.cells = f1_grid.size() * f2_grid.size();
    return report;
}

} // namespace weakbell
