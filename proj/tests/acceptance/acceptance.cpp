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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Each criterion is also held to its wall-clock budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "weakbell/bell.hpp"
#include "weakbell/channel.hpp"
#include "weakbell/montecarlo.hpp"
#include "weakbell/pointer.hpp"
#include "weakbell/protocol.hpp"

namespace {

using namespace weakbell;

/// Collects failed checks of one criterion with a short reason each.
class Check {
  public:
    void expect(bool ok, const std::string &what) {
        if (!ok && failures_.size() < 5) {
            failures_.push_back(what);
        }
        failed_ = failed_ || !ok;
    }
    void near(double actual, double expected, double tol, const std::string &what) {
        std::ostringstream os;
        os.precision(12);
        os << what << ": " << actual << " vs " << expected << " (tol " << tol << ")";
        expect(std::abs(actual - expected) < tol, os.str());
    }
    void note(const std::string &s) { detail_ = s; }

    [[nodiscard]] bool failed() const { return failed_; }
    [[nodiscard]] const std::vector<std::string> &failures() const {
        return failures_;
    }
    [[nodiscard]] const std::string &detail() const { return detail_; }

  private:
    bool failed_ = false;
    std::vector<std::string> failures_;
    std::string detail_;
};

struct Criterion {
    int id;
    const char *name;
    double budget_seconds;
    std::function<void(Check &)> body;
};

std::vector<double> grid(double start, double stop, double step) {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 0.5));
    for (long k = 0; k <= n; ++k) {
        out.push_back(start + static_cast<double>(k) * step);
    }
    return out;
}

std::string fmt(double v, int digits = 10) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

void optimal_tradeoff(Check &c) {
    for (const CentralProfile &profile :
         {CentralProfile{FlatProfile{}}, CentralProfile{SmoothBumpProfile{1.0}}}) {
        for (double g : grid(0.05, 0.95, 0.05)) {
            const PointerState p = make_optimal(g, profile);
            c.near(quality_factor(p), std::sqrt(1.0 - g * g), 1e-6,
                   "F at G=" + fmt(g, 3));
        }
    }
}

void optimal_anchor(Check &c) {
    const PointerState p = make_optimal(0.8);
    c.near(quality_factor(p), 0.6, 1e-6, "F");
    c.near(precision(p), 0.8, 1e-6, "G");
    c.note("F=" + fmt(quality_factor(p)) + " G=" + fmt(precision(p)));
}

void square_identities(Check &c) {
    for (double d : {0.25, 0.5, 0.75, 1.0}) {
        const PointerState p = make_square(d);
        c.near(quality_factor(p), 0.0, 1e-8, "F at delta=" + fmt(d));
        c.near(precision(p), 1.0, 1e-8, "G at delta=" + fmt(d));
    }
    for (double d : grid(1.125, 6.0, 0.125)) {
        const PointerState p = make_square(d);
        c.near(precision(p), 1.0 - quality_factor(p), 1e-8, "G=1-F at delta=" + fmt(d));
        c.near(precision(p), oracle::square_G(d), 1e-8, "G oracle at delta=" + fmt(d));
    }
    const PointerState p = make_square(1.5);
    c.near(quality_factor(p), 1.0 / 3.0, 1e-8, "F at 1.5");
    c.near(precision(p), 2.0 / 3.0, 1e-8, "G at 1.5");
}

void double_violation(Check &c) {
    const auto gs = grid(0.01, 0.99, 0.01);
    const auto rows = double_violation_curve(std::nullopt, gs);
    double at08_first = 0.0;
    double at08_second = 0.0;
    for (const auto &r : rows) {
        const double f = std::sqrt(1.0 - r.precision * r.precision);
        c.near(r.chsh_first, 2.0 * std::numbers::sqrt2 * r.precision, 1e-8,
               "I1 at G=" + fmt(r.precision, 3));
        c.near(r.chsh_second, std::numbers::sqrt2 * (1.0 + f), 1e-8,
               "I2 at G=" + fmt(r.precision, 3));
        if (std::abs(r.precision - 0.8) < 1e-9) {
            at08_first = r.chsh_first;
            at08_second = r.chsh_second;
        }
    }
    c.near(at08_first, 2.2627, 1e-4, "I1 at G=0.8");
    c.near(at08_second, 2.2627, 1e-4, "I2 at G=0.8");
    c.expect(at08_first > 2.0 && at08_second > 2.0, "double violation at G=0.8");
    c.expect(has_double_violation(rows), "optimal window exists");
    const auto square = double_violation_curve(PointerFamily::Square,
                                               grid(0.005, 0.995, 0.005));
    c.expect(!has_double_violation(square), "square pointer has no double violation");
    c.note("I1=I2=" + fmt(at08_first, 8) + " at G=0.8; square rows=" +
           std::to_string(square.size()));
}

TripleGeometry random_geometry(std::mt19937_64 &rng) {
    return {{oracle::random_direction(rng), oracle::random_direction(rng)},
            {oracle::random_direction(rng), oracle::random_direction(rng)},
            {oracle::random_direction(rng), oracle::random_direction(rng)}};
}

void closed_form_crosscheck(Check &c) {
    std::mt19937_64 rng(20261014);
    double worst = 0.0;
    double worst_signal = 0.0;
    for (int i = 0; i < 200; ++i) {
        const TripleGeometry g = random_geometry(rng);
        const MeasurementStrength s = oracle::random_strength(rng);
        double p[2][2][2][2][2][2];
        for (int x = 0; x < 2; ++x) {
            for (int y1 = 0; y1 < 2; ++y1) {
                for (int y2 = 0; y2 < 2; ++y2) {
                    double total = 0.0;
                    for (int ia = 0; ia < 2; ++ia) {
                        for (int ib1 = 0; ib1 < 2; ++ib1) {
                            for (int ib2 = 0; ib2 < 2; ++ib2) {
                                const int a = ia ? -1 : 1;
                                const int b1 = ib1 ? -1 : 1;
                                const int b2 = ib2 ? -1 : 1;
                                const double v =
                                    triple_probability(a, b1, b2, x, y1, y2, g, s);
                                const double o = triple_probability_oracle(
                                    a, b1, b2, x, y1, y2, g, s);
                                worst = std::max(worst, std::abs(v - o));
                                p[x][y1][y2][ia][ib1][ib2] = v;
                                total += v;
                            }
                        }
                    }
                    c.near(total, 1.0, 1e-12, "outcome sum");
                }
            }
        }
        auto track = [&](double a, double b) {
            worst_signal = std::max(worst_signal, std::abs(a - b));
        };
        for (int ia = 0; ia < 2; ++ia) {
            // Alice's marginal does not depend on the Bobs' inputs.
            for (int x = 0; x < 2; ++x) {
                std::vector<double> m;
                for (int y1 = 0; y1 < 2; ++y1) {
                    for (int y2 = 0; y2 < 2; ++y2) {
                        double s_ = 0.0;
                        for (int i1 = 0; i1 < 2; ++i1) {
                            for (int i2 = 0; i2 < 2; ++i2) {
                                s_ += p[x][y1][y2][ia][i1][i2];
                            }
                        }
                        m.push_back(s_);
                    }
                }
                for (double v : m) {
                    track(v, m[0]);
                }
            }
        }
        for (int y1 = 0; y1 < 2; ++y1) {
            for (int y2 = 0; y2 < 2; ++y2) {
                for (int i1 = 0; i1 < 2; ++i1) {
                    for (int i2 = 0; i2 < 2; ++i2) {
                        // Bobs' joint marginal does not depend on x.
                        track(p[0][y1][y2][0][i1][i2] + p[0][y1][y2][1][i1][i2],
                              p[1][y1][y2][0][i1][i2] + p[1][y1][y2][1][i1][i2]);
                    }
                }
                for (int x = 0; x < 2; ++x) {
                    for (int i1 = 0; i1 < 2; ++i1) {
                        // Bob_1's marginal does not depend on y2.
                        double m0 = 0.0;
                        double m1 = 0.0;
                        for (int ia = 0; ia < 2; ++ia) {
                            for (int i2 = 0; i2 < 2; ++i2) {
                                m0 += p[x][y1][0][ia][i1][i2];
                                m1 += p[x][y1][1][ia][i1][i2];
                            }
                        }
                        track(m0, m1);
                    }
                }
            }
        }
    }
    c.expect(worst < 1e-10, "closed form vs composition: " + fmt(worst));
    c.expect(worst_signal < 1e-12, "no-signalling: " + fmt(worst_signal));
    c.note("max |closed-oracle|=" + fmt(worst, 3) +
           " max signalling=" + fmt(worst_signal, 3));
}

void unit_circle(Check &c) {
    for (double theta : grid(0.1, 1.5, 0.1)) {
        const auto s = MeasurementStrength::make(std::sin(theta), std::cos(theta));
        const TripleGeometry g = tangent_geometry(theta);
        double lowest = 1.0;
        for (int a : {1, -1}) {
            for (int b1 : {1, -1}) {
                for (int b2 : {1, -1}) {
                    lowest = std::min(lowest,
                                      triple_probability(a, b1, b2, 0, 0, 0, g, s));
                }
            }
        }
        c.near(lowest, 0.0, 1e-10, "min outcome at theta=" + fmt(theta, 3));
        c.near(triple_probability(1, 1, -1, 0, 0, 0, g, s), 0.0, 1e-10,
               "P(+,+,-) at theta=" + fmt(theta, 3));
    }
}

BellChainConfig random_chain(std::mt19937_64 &rng, std::size_t stages) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<BobStage> list;
    for (std::size_t k = 0; k < stages; ++k) {
        list.push_back(BobStage::with_strength(
            {oracle::random_direction(rng), oracle::random_direction(rng)},
            oracle::random_strength(rng), u(rng)));
    }
    return make_chain({oracle::random_direction(rng), oracle::random_direction(rng)},
                      std::move(list));
}

void sequential_oracle(Check &c) {
    std::mt19937_64 rng(77);
    double worst = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
        const BellChainConfig cfg = random_chain(rng, 6);
        for (std::size_t n = 1; n <= 6; ++n) {
            const double d = (sequential_average_state(cfg, n).matrix() -
                              oracle::branch_average_state(cfg, n))
                                 .cwiseAbs()
                                 .maxCoeff();
            const double e =
                std::abs(chain_chsh(cfg, n) - oracle::branch_chsh(cfg, n));
            worst = std::max({worst, d, e});
        }
    }
    c.expect(worst < 1e-10, "propagation vs enumeration: " + fmt(worst));
    c.note("40 chains x n<=6, max deviation " + fmt(worst, 3));
}

void protocol_soundness(Check &c) {
    for (std::size_t N = 2; N <= 8; ++N) {
        const UniformBias b = feasible_uniform_bias(N);
        const ProtocolSchedule s =
            build_schedule(N, BiasSchedule::uniform_log(N - 1, b.log_r));
        for (std::size_t n = 1; n <= N; ++n) {
            c.expect(chsh_lower_bound(s, n).exceeds_classical(),
                     "bound > 2 for N=" + std::to_string(N) +
                         " n=" + std::to_string(n));
        }
    }
    const ProtocolSchedule limit = build_limit_schedule(4);
    for (std::size_t n = 1; n <= 4; ++n) {
        const BellChainConfig cfg = protocol_chain(limit, n);
        c.near(limit_chsh(limit, n), chain_chsh(cfg, n), 1e-8,
               "limit vs exact chain n=" + std::to_string(n));
    }
}

void cubic_decay(Check &c) {
    const ProtocolSchedule s = build_limit_schedule(12);
    const auto r = decay_ratio_sequence(s, 12);
    // r[i] = V_{i+2} / (V_{i+1}^3 / 4).
    c.expect(std::abs(r[1] - 1.0) < 0.01, "ratio n=2->3: " + fmt(r[1]));
    for (std::size_t i = 8; i < r.size(); ++i) {
        c.expect(std::abs(r[i] - 1.0) < 1e-4,
                 "ratio at n=" + std::to_string(i + 2) + ": " + fmt(r[i], 14));
    }
    c.note("ratio(2->3)=" + fmt(r[1], 8) + " ratio(9->10)=" + fmt(r[8], 12));
}

void distinguishability_saturation(Check &c) {
    for (double g : grid(0.05, 0.95, 0.05)) {
        const MeasurementStrength s = strength_of(make_optimal(g));
        const Distinguishability d = distinguishability(s);
        c.near(d.sign_strategy, d.bound, 1e-9, "optimal saturation at G=" + fmt(g, 3));
        c.near(d.sign_strategy, (1.0 + std::sqrt(1.0 - s.quality_factor *
                                                           s.quality_factor)) /
                                    2.0,
               1e-9, "closed form at G=" + fmt(g, 3));
    }
    const std::vector<std::pair<PointerFamily, std::vector<double>>> families{
        {PointerFamily::Square, grid(0.5, 5.0, 0.25)},
        {PointerFamily::Gaussian, grid(0.25, 3.0, 0.25)},
        {PointerFamily::Exponential, grid(0.25, 3.0, 0.25)},
        {PointerFamily::Optimal, grid(0.1, 0.9, 0.1)},
        {PointerFamily::OptimalBump, grid(0.1, 0.9, 0.1)},
        {PointerFamily::Worst, grid(0.1, 0.9, 0.1)}};
    // Optimal members meet the bound with equality, so the inequality gets the
    // same quadrature tolerance as the saturation check above.
    std::size_t members = 0;
    double max_excess = -1.0;
    for (const auto &[family, params] : families) {
        for (double v : params) {
            const Distinguishability d =
                distinguishability(strength_of(make_pointer(family, v)));
            max_excess = std::max(max_excess, d.sign_strategy - d.bound);
            c.expect(d.sign_strategy <= d.bound + 1e-9,
                     std::string(family_name(family)) + " at " + fmt(v, 3));
            ++members;
        }
    }
    c.note(std::to_string(members) + " family members, max(sign - bound)=" +
           fmt(max_excess, 3));
}

void montecarlo_concordance(Check &c) {
    const Settings t = tsirelson_settings();
    std::vector<BobStage> stages;
    stages.push_back(BobStage::with_pointer(
        t.bob, std::make_shared<const PointerState>(
                   pointer_for_precision(PointerFamily::Optimal, 0.8))));
    stages.push_back(BobStage::with_pointer(
        t.bob, std::make_shared<const PointerState>(make_square(1.0))));
    const BellChainConfig cfg = make_chain(t.alice, std::move(stages));
    const EmpiricalReport rep = run_chain(cfg, 1000000, 20240915);
    const ChiSquareReport chi = chi_square_report(rep, analytic_distribution(cfg), 1e-3);
    std::string note;
    for (std::size_t k = 0; k < rep.per_bob.size(); ++k) {
        const BobStatistics &b = rep.per_bob[k];
        c.expect(b.chsh.has_value(), "CHSH estimate for Bob " + std::to_string(k + 1));
        if (!b.chsh) {
            continue;
        }
        const double z = (*b.chsh - b.analytic_chsh) / b.chsh_stderr;
        c.expect(std::abs(z) < 4.0, "Bob " + std::to_string(k + 1) + " z=" + fmt(z, 4));
        c.near(b.analytic_chsh, 1.6 * std::numbers::sqrt2, 1e-3,
               "analytic CHSH Bob " + std::to_string(k + 1));
        note += "I" + std::to_string(k + 1) + "=" + fmt(*b.chsh, 6) + " (z=" +
                fmt(z, 3) + ") ";
    }
    c.expect(chi.passed && chi.p_value > 1e-3, "chi-square p=" + fmt(chi.p_value, 4));
    c.note(note + "chi2 p=" + fmt(chi.p_value, 4));
}

void triple_scan(Check &c) {
    const auto f = grid(0.01, 0.99, 0.01);
    const TripleScanReport rep = unbiased_triple_scan(f, f, tsirelson_settings());
    const auto &b = rep.best;
    c.expect(rep.cells == f.size() * f.size(), "scanned cells");
    c.expect(b.worst() <= 2.0, "max min(I1,I2,I3) = " + fmt(b.worst(), 12) +
                                   " at F1=" + fmt(b.f1, 3) + " F2=" + fmt(b.f2, 3));
    c.expect(rep.triple_violations == 0,
             "cells with triple violation: " + std::to_string(rep.triple_violations));
    c.note("max min=" + fmt(b.worst(), 8) + " at F1=" + fmt(b.f1, 3) +
           " F2=" + fmt(b.f2, 3) + " (I=" + fmt(b.chsh1, 6) + ", " +
           fmt(b.chsh2, 6) + ", " + fmt(b.chsh3, 6) + ")");
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "optimal trade-off F = sqrt(1-G^2)", 5.0, optimal_tradeoff},
        {2, "optimal pointer at G=0.8 has F=0.6", 1.0, optimal_anchor},
        {3, "square pointer identities", 1.0, square_identities},
        {4, "double violation sweep", 10.0, double_violation},
        {5, "closed-form outcome probabilities", 5.0, closed_form_crosscheck},
        {6, "unit-circle bound at tangent geometry", 2.0, unit_circle},
        {7, "sequential propagation vs branch enumeration", 30.0, sequential_oracle},
        {8, "protocol soundness", 10.0, protocol_soundness},
        {9, "cubic decay of the violation", 1.0, cubic_decay},
        {10, "distinguishability saturation", 1.0, distinguishability_saturation},
        {11, "Monte Carlo concordance", 60.0, montecarlo_concordance},
        {12, "unbiased triple scan", 120.0, triple_scan},
    };
    int failed = 0;
    for (const auto &cr : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.body(check);
        } catch (const std::exception &e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        check.expect(seconds < cr.budget_seconds,
                     "runtime " + fmt(seconds, 3) + " s over budget " +
                         fmt(cr.budget_seconds, 3) + " s");
        const bool ok = !check.failed();
        failed += ok ? 0 : 1;
        std::printf("%s  criterion %2d: %s [%.3f s / %.0f s]%s%s\n",
                    ok ? "PASS" : "FAIL", cr.id, cr.name, seconds, cr.budget_seconds,
                    check.detail().empty() ? "" : " ",
                    check.detail().c_str());
        for (const auto &f : check.failures()) {
            std::printf("      - %s\n", f.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n",
                static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
