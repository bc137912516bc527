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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "weakbell/pointer.hpp"

namespace weakbell {
namespace {

double overlap_by_interpolation(const PointerState &p) {
    // Independent of the index-shift path: evaluates phi(q+-1) through the
    // interpolating amplitude at every grid point.
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = p.position(i);
        sum += p.amplitude(q + 1.0) * p.amplitude(q - 1.0);
    }
    return sum * p.grid_spacing();
}

void expect_valid(const PointerState &p) {
    const auto phi = p.samples();
    double norm = 0.0;
    for (double v : phi) {
        norm += v * v;
    }
    EXPECT_NEAR(norm * p.grid_spacing(), 1.0, 1e-9);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        EXPECT_NEAR(std::abs(phi[i]), std::abs(phi[phi.size() - 1 - i]), 1e-9);
    }
}

TEST(PointerState, RejectsBadGrids) {
    const std::vector<double> flat(512, 1.0);
    EXPECT_THROW(PointerState::from_samples(flat, 0.3, "x"), InvalidParameter);
    EXPECT_THROW(PointerState::from_samples(flat, 2.0, "x"), InvalidParameter);
    EXPECT_THROW(PointerState::from_samples({}, 1.0 / 256, "x"),
                 InvalidParameter);
    EXPECT_THROW(PointerState::from_samples(std::vector<double>(511, 1.0),
                                            1.0 / 256, "x"),
                 InvalidParameter);
    // Unnormalized input is an invalid state.
    EXPECT_THROW(PointerState::from_samples(flat, 1.0 / 256, "x"),
                 InvalidState);
    EXPECT_NO_THROW(PointerState::from_samples(flat, 1.0 / 512, "x"));
}

TEST(PointerState, RejectsAsymmetricModulus) {
    std::vector<double> v(512, 0.0);
    for (std::size_t i = 0; i < 256; ++i) {
        v[i] = 1.0;
    }
    EXPECT_THROW(PointerState::normalize(v, 1.0 / 256, "x"), InvalidState);
}

TEST(PointerState, GridIsCellCentredAndIndexShiftable) {
    const PointerState p = make_square(1.5);
    EXPECT_DOUBLE_EQ(p.position(0) + p.position(p.size() - 1), 0.0);
    EXPECT_EQ(p.cells_per_unit(), 512);
    const std::size_t mid = p.size() / 2;
    EXPECT_DOUBLE_EQ(p.position(mid), 0.5 / 512);
    EXPECT_DOUBLE_EQ(p.position(mid + 512) - p.position(mid), 1.0);
}

TEST(Square, IdentitiesAcrossWidths) {
    for (double delta : {0.25, 0.5, 0.75, 1.0}) {
        const PointerState p = make_square(delta);
        expect_valid(p);
        EXPECT_NEAR(quality_factor(p), 0.0, 1e-12) << delta;
        EXPECT_NEAR(precision(p), 1.0, 1e-12) << delta;
    }
    for (double delta = 1.25; delta <= 5.0; delta += 0.25) {
        const PointerState p = make_square(delta);
        expect_valid(p);
        EXPECT_NEAR(quality_factor(p), oracle::square_F(delta), 1e-8) << delta;
        EXPECT_NEAR(precision(p), oracle::square_G(delta), 1e-8) << delta;
        EXPECT_NEAR(precision(p), 1.0 - quality_factor(p), 1e-8) << delta;
    }
    const PointerState p = make_square(1.5);
    EXPECT_NEAR(quality_factor(p), 1.0 / 3.0, 1e-8);
    EXPECT_NEAR(precision(p), 2.0 / 3.0, 1e-8);
}

TEST(Square, WideLimitIsWeak) {
    EXPECT_LT(precision(make_square(100.0, 1.0 / 64)), 0.011);
}

TEST(Square, RejectsBadWidth) {
    EXPECT_THROW(make_square(0.0), InvalidParameter);
    EXPECT_THROW(make_square(-1.0), InvalidParameter);
    EXPECT_THROW(make_square(0.01), InvalidParameter);
}

TEST(Gaussian, MatchesClosedForms) {
    for (double sd : {0.3, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const PointerState p = make_gaussian(sd);
        expect_valid(p);
        EXPECT_NEAR(quality_factor(p), oracle::gaussian_F(sd), 1e-7) << sd;
        EXPECT_NEAR(precision(p), oracle::gaussian_G(sd), 1e-5) << sd;
    }
    EXPECT_NEAR(quality_factor(make_gaussian(1.5)), 0.8007374029168, 1e-7);
}

TEST(Gaussian, InsideUnitDiscAndLimits) {
    for (double sd = 0.2; sd <= 4.0; sd += 0.2) {
        const auto s = strength_of(make_gaussian(sd));
        EXPECT_LT(s.quality_factor * s.quality_factor +
                      s.precision * s.precision,
                  1.0)
            << sd;
    }
    const auto narrow = strength_of(make_gaussian(0.05));
    EXPECT_LT(narrow.quality_factor, 1e-10);
    EXPECT_GT(narrow.precision, 1.0 - 1e-10);
    const auto wide = strength_of(make_gaussian(50.0, 1.0 / 16));
    EXPECT_GT(wide.quality_factor, 0.999);
    EXPECT_LT(wide.precision, 0.02);
}

TEST(Gaussian, RejectsBadParameters) {
    EXPECT_THROW(make_gaussian(0.0), InvalidParameter);
    EXPECT_THROW(make_gaussian(1.0, 1.0 / 512, 2.0), InvalidParameter);
}

TEST(Exponential, MatchesClosedForms) {
    for (double s : {0.25, 0.5, 1.0, 2.0}) {
        const PointerState p = make_exponential(s);
        expect_valid(p);
        EXPECT_NEAR(quality_factor(p), oracle::exponential_F(s), 1e-5) << s;
        EXPECT_NEAR(precision(p), oracle::exponential_G(s), 1e-5) << s;
        const auto st = strength_of(p);
        EXPECT_LT(st.quality_factor * st.quality_factor +
                      st.precision * st.precision,
                  1.0);
    }
    const auto strong = strength_of(make_exponential(0.02));
    EXPECT_LT(strong.quality_factor, 1e-6);
    EXPECT_GT(strong.precision, 1.0 - 1e-6);
}

TEST(Optimal, FrontierForBothProfiles) {
    for (int k = 1; k <= 19; ++k) {
        const double g = 0.05 * k;
        for (const CentralProfile &profile :
             {CentralProfile{FlatProfile{}},
              CentralProfile{SmoothBumpProfile{1.0}}}) {
            const PointerState p = make_optimal(g, profile);
            expect_valid(p);
            EXPECT_NEAR(quality_factor(p), std::sqrt(1.0 - g * g), 1e-6) << g;
            EXPECT_NEAR(precision(p), g, 1e-6) << g;
        }
    }
}

TEST(Optimal, FigureTwoPointer) {
    const PointerState p = make_optimal(0.8);
    EXPECT_NEAR(quality_factor(p), 0.6, 1e-6);
    EXPECT_NEAR(overlap_by_interpolation(p), 0.6, 1e-6);
    // Adjacent intervals differ by sqrt(0.2/1.8) = 1/3 in amplitude.
    EXPECT_NEAR(p.amplitude(2.5) / p.amplitude(0.5), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(p.amplitude(4.5) / p.amplitude(2.5), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(p.amplitude(-2.5) / p.amplitude(-0.5), 1.0 / 3.0, 1e-12);
}

TEST(Optimal, BumpProfileOtherAlpha) {
    const PointerState p = make_optimal(0.6, SmoothBumpProfile{3.0});
    EXPECT_NEAR(quality_factor(p), 0.8, 1e-6);
}

TEST(Optimal, EulerLagrangeResidual) {
    for (double g : {0.3, 0.6, 0.8, 0.95}) {
        for (const CentralProfile &profile :
             {CentralProfile{FlatProfile{}},
              CentralProfile{SmoothBumpProfile{1.0}}}) {
            const PointerState p = make_optimal(g, profile);
            const double a = -0.5 * std::log((1.0 - g) / (1.0 + g));
            const double factor = std::exp(a) + std::exp(-a);
            const auto phi = p.samples();
            const auto s = static_cast<std::size_t>(2 * p.cells_per_unit());
            double peak = 0.0;
            for (double v : phi) {
                peak = std::max(peak, std::abs(v));
            }
            std::size_t checked = 0;
            for (std::size_t i = s; i + s < phi.size(); ++i) {
                if (std::abs(p.position(i)) < 1.0) {
                    continue;
                }
                // Skip the outermost retained interval (its neighbour was
                // truncated) and points where the profile itself is tiny.
                if (std::abs(phi[i + s]) == 0.0 || std::abs(phi[i - s]) == 0.0 ||
                    std::abs(phi[i]) < 1e-6 * peak) {
                    continue;
                }
                const double lhs = phi[i - s] + phi[i + s];
                EXPECT_NEAR(lhs / (factor * phi[i]), 1.0, 1e-6);
                ++checked;
            }
            EXPECT_GT(checked, 1000U);
        }
    }
}

TEST(Optimal, BumpVanishesAtOddIntegers) {
    const PointerState p = make_optimal(0.7, SmoothBumpProfile{1.0});
    for (int n = -5; n <= 5; ++n) {
        EXPECT_LT(std::abs(p.amplitude(2.0 * n - 1.0)), 1e-6) << n;
    }
}

TEST(Optimal, LocalOptimalityUnderPerturbation) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PointerState base = make_optimal(0.7, FlatProfile{}, 1.0 / 64);
    const auto phi0 = base.samples();
    const double h = base.grid_spacing();
    for (int trial = 0; trial < 100; ++trial) {
        // Symmetric smooth perturbation: a few random even bumps.
        std::vector<double> phi(phi0.begin(), phi0.end());
        const double eps = 0.05 * unit(rng);
        for (int b = 0; b < 4; ++b) {
            const double centre = 6.0 * unit(rng);
            const double width = 0.1 + 0.5 * unit(rng);
            const double amp = eps * gauss(rng);
            for (std::size_t i = 0; i < phi.size(); ++i) {
                const double q = base.position(i);
                phi[i] += amp * (std::exp(-std::pow((q - centre) / width, 2)) +
                                 std::exp(-std::pow((q + centre) / width, 2)));
            }
        }
        const PointerState p = PointerState::normalize(phi, h, "perturbed");
        const double f = quality_factor(p);
        const double g = precision(p);
        EXPECT_LE(g, std::sqrt(1.0 - f * f) + 1e-4) << trial;
    }
}

TEST(Optimal, RejectsOutOfRangeTargets) {
    EXPECT_THROW(make_optimal(0.0), InvalidParameter);
    EXPECT_THROW(make_optimal(1.0), InvalidParameter);
    EXPECT_THROW(make_optimal(-0.2), InvalidParameter);
    EXPECT_THROW(make_optimal(0.5, SmoothBumpProfile{0.0}), InvalidParameter);
}

TEST(Worst, ZeroQualityRecomputedPrecision) {
    const PointerState p = make_worst(0.5);
    expect_valid(p);
    EXPECT_NEAR(quality_factor(p), 0.0, 1e-9);
    const double kappa4 = std::pow((1.0 - 0.5) / (1.0 + 0.5), 2);
    EXPECT_NEAR(precision(p), (1.0 - kappa4) / (1.0 + kappa4), 1e-9);
    EXPECT_GT(std::abs(precision(p) - 0.5), 0.1);
    // Near G = 1 the state sits on (-1, 1).
    EXPECT_GT(precision(make_worst(0.999)), 0.999);
    EXPECT_THROW(make_worst(1.0), InvalidParameter);
}

TEST(QualityFactor, RejectsNegativeOverlap) {
    // phi = +c on (-1.5, -0.5), -c on (0.5, 1.5): overlap is -1/2... modulus
    // symmetric, phase antisymmetric.
    const double h = 1.0 / 64;
    std::vector<double> v(256, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double q = (static_cast<double>(i) - 128 + 0.5) * h;
        if (q > -1.5 && q < -0.5) {
            v[i] = 1.0;
        } else if (q > 0.5 && q < 1.5) {
            v[i] = -1.0;
        }
    }
    const PointerState p = PointerState::normalize(v, h, "odd");
    EXPECT_THROW(quality_factor(p), InvalidState);
}

TEST(Tradeoff, OptimalRowsOnCircle) {
    std::vector<double> g;
    for (int k = 1; k <= 9; ++k) {
        g.push_back(0.1 * k);
    }
    const auto rows = tradeoff_curve(PointerFamily::Optimal, g);
    ASSERT_EQ(rows.size(), 9U);
    for (const auto &r : rows) {
        EXPECT_NEAR(r.quality_factor * r.quality_factor +
                        r.precision * r.precision,
                    1.0, 1e-6);
    }
}

TEST(Tradeoff, SquareRowsAreLinearAndMonotone) {
    std::vector<double> d;
    for (double x = 1.0; x <= 3.0 + 1e-9; x += 0.25) {
        d.push_back(x);
    }
    const auto rows = tradeoff_curve(PointerFamily::Square, d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_NEAR(rows[i].precision, 1.0 - rows[i].quality_factor, 1e-8);
        if (i > 0) {
            EXPECT_GT(rows[i].quality_factor, rows[i - 1].quality_factor);
        }
    }
}

TEST(Tradeoff, GaussianBetweenSquareAndOptimal) {
    for (double sd = 0.5; sd <= 3.0 + 1e-9; sd += 0.1) {
        const auto s = strength_of(make_gaussian(sd));
        const double f = s.quality_factor;
        if (f < 1e-6 || f > 1.0 - 1e-6) {
            continue;
        }
        EXPECT_LT(s.precision, std::sqrt(1.0 - f * f)) << sd;
        EXPECT_GT(s.precision, 1.0 - f) << sd;
    }
}

TEST(Tradeoff, ErrorsAndFamilyNames) {
    EXPECT_THROW(tradeoff_curve(PointerFamily::Square, {}), InvalidParameter);
    EXPECT_THROW(parse_family("triangle"), InvalidParameter);
    for (auto f : {PointerFamily::Square, PointerFamily::Gaussian,
                   PointerFamily::Exponential, PointerFamily::Optimal,
                   PointerFamily::OptimalBump, PointerFamily::Worst}) {
        EXPECT_EQ(parse_family(family_name(f)), f);
    }
}

TEST(PointerForPrecision, HitsTargetG) {
    for (double g : {0.3, 0.6, 0.9}) {
        for (auto f : {PointerFamily::Square, PointerFamily::Gaussian,
                       PointerFamily::Exponential, PointerFamily::Optimal,
                       PointerFamily::OptimalBump}) {
            // A square edge off the grid is resolved only to one cell.
            const double tol = f == PointerFamily::Square ? 1.0 / 512 : 1e-5;
            EXPECT_NEAR(precision(pointer_for_precision(f, g)), g, tol)
                << family_name(f) << " " << g;
        }
    }
}

TEST(MeasurementStrength, Physicality) {
    EXPECT_TRUE(MeasurementStrength::make(0.6, 0.8).is_physical());
    EXPECT_FALSE((MeasurementStrength{0.9, 0.9}.is_physical()));
    EXPECT_THROW(MeasurementStrength({0.9, 0.9}).require_physical(),
                 PhysicalityError);
    EXPECT_THROW(MeasurementStrength::make(1.2, 0.0), InvalidParameter);
    EXPECT_NEAR(MeasurementStrength::optimal_from_precision(0.8).quality_factor,
                0.6, 1e-15);
    EXPECT_NEAR(MeasurementStrength::optimal_from_quality(0.6).precision, 0.8,
                1e-15);
}

} // namespace
} // namespace weakbell
