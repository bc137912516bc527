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

/**
 * @file
 * Bell scenarios with one Alice and a sequence of Bobs acting on the second
 * half of an entangled pair.
 *
 * Alice measures strongly; Bob_k measures with strength (F_k, G_k) along one
 * of two directions chosen by an independent input that is 1 with
 * probability r_k. Averaging over earlier Bobs' inputs is done on the state
 * itself: each stage is replaced by its input-averaged channel, which gives
 * the same state as enumerating all 2^(n-1) decoherence branches.
 */

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "weakbell/channel.hpp"
#include "weakbell/linalg.hpp"
#include "weakbell/pointer.hpp"

namespace weakbell {

/// Measurement directions for inputs 0 and 1 of Alice and of every Bob.
struct Settings {
    std::array<Direction, 2> alice;
    std::array<Direction, 2> bob;
};

/// Alice Z / X, Bobs -(Z+X)/sqrt2 / (X-Z)/sqrt2: CHSH = 2 sqrt2 on a singlet.
Settings tsirelson_settings();
/// Alice -Z / X, Bob Z / (cos t Z + sin t X): the biased-input protocol.
Settings protocol_settings(double theta);
/// "tsirelson" or "protocol" (the latter with the given angle).
Settings settings_by_name(std::string_view name, double theta = 0.0);

struct BobStage {
    std::array<Direction, 2> directions;
    MeasurementStrength strength;
    /// Probability that this Bob's input is 1.
    double bias = 0.5;
    /// Optional pointer realizing `strength`; needed for sampling.
    std::shared_ptr<const PointerState> pointer;

    static BobStage with_strength(const std::array<Direction, 2> &dirs,
                                  MeasurementStrength s, double bias = 0.5);
    /// Strength computed from the pointer by quadrature.
    static BobStage with_pointer(const std::array<Direction, 2> &dirs,
                                 std::shared_ptr<const PointerState> pointer,
                                 double bias = 0.5);

    [[nodiscard]] const Direction &direction(int input) const {
        return directions[input == 0 ? 0 : 1];
    }
    /// Throws InvalidParameter / PhysicalityError.
    void validate() const;
};

struct BellChainConfig {
    std::array<Direction, 2> alice;
    std::vector<BobStage> stages;
    DensityOperator initial_state;

    /// Throws InvalidParameter / InvalidState.
    void validate() const;
};

/// Chain starting from a singlet.
BellChainConfig make_chain(const std::array<Direction, 2> &alice,
                           std::vector<BobStage> stages);

struct CorrelationTable {
    /// E[x][y].
    std::array<std::array<double, 2>, 2> E{};

    [[nodiscard]] double chsh() const {
        return E[0][0] + E[0][1] + E[1][0] - E[1][1];
    }
};

/// (|up down> - |down up>) / sqrt2 as a density operator.
DensityOperator singlet();

/// Bob's state after Alice finds a = +-1 along u on a singlet:
/// (I - a u.sigma) / 2.
DensityOperator steered_state(const Direction &u, int a);

/// Directions for the triple distribution: Alice u_x, Bob's first (weak)
/// measurement w_y1, Bob's second (strong) measurement v_y2.
struct TripleGeometry {
    std::array<Direction, 2> alice;
    std::array<Direction, 2> first;
    std::array<Direction, 2> second;
};

/// u0 = Z, w0 = -X, v0 = sin t Z - cos t X (input 1 mirrors input 0 with X
/// and Z exchanged).
TripleGeometry tangent_geometry(double theta);

/**
 * P(a b1 b2 | x y1 y2) in closed form, for Alice strong, Bob weak then strong.
 *
 * Labels follow the reporting convention in which Alice outputs the negated
 * spin eigenvalue, so the singlet looks positively correlated: with that
 * convention Bob's particle is left in (I + a u.sigma)/2. Throws
 * PhysicalityError for unphysical strengths.
 */
double triple_probability(int a, int b1, int b2, int x, int y1, int y2,
                          const TripleGeometry &g,
                          const MeasurementStrength &s);
/// Same formula without the physicality check.
double triple_probability_unchecked(int a, int b1, int b2, int x, int y1,
                                    int y2, const TripleGeometry &g,
                                    const MeasurementStrength &s);
/// The same probability by explicit composition: steering of the singlet,
/// the outcome-conditioned weak channel, then a projective measurement.
double triple_probability_oracle(int a, int b1, int b2, int x, int y1, int y2,
                                 const TripleGeometry &g,
                                 const MeasurementStrength &s);

struct PositivityRow {
    double theta;
    double min_probability;
    double tangent_value; ///< F sin t + G cos t
};

struct PositivityReport {
    std::vector<PositivityRow> rows;
    double min_probability = 0.0;
    double theta_at_min = 0.0;
    double max_tangent_value = 0.0;
    double theta_at_max_tangent = 0.0;
    /// True when no outcome probability falls below -1e-10.
    bool consistent = true;
};

/// Evaluates all eight outcome probabilities at the tangent geometry for each
/// angle. Unphysical strengths are accepted and show up as negatives.
PositivityReport positivity_bound_scan(const MeasurementStrength &s,
                                       std::span<const double> thetas);

/// State shared by Alice and Bob_n before they measure; n = 1 is the initial
/// state. Requires 1 <= n <= stages + 1.
DensityOperator sequential_average_state(const BellChainConfig &cfg,
                                         std::size_t n);

/// E[x][y] = G tr(rho sigma_ux (x) sigma_wy).
CorrelationTable correlation_table(const DensityOperator &state,
                                   const std::array<Direction, 2> &alice,
                                   const std::array<Direction, 2> &bob,
                                   double precision);
double chsh(const DensityOperator &state,
            const std::array<Direction, 2> &alice,
            const std::array<Direction, 2> &bob, double precision);

/// CHSH value of Alice with Bob_n, 1 <= n <= stages.
double chain_chsh(const BellChainConfig &cfg, std::size_t n);

struct DoubleViolationRow {
    double precision;     ///< G of Bob_1
    double quality_factor; ///< F of Bob_1
    double chsh_first;    ///< Alice-Bob_1
    double chsh_second;   ///< Alice-Bob_2 (Bob_2 measures strongly)
};

/// Two unbiased Bobs at the Tsirelson settings. Without a family, Bob_1 uses
/// the exact optimal strength (sqrt(1-G^2), G); with one, the family member
/// of that precision (achieved G reported).
std::vector<DoubleViolationRow>
double_violation_curve(std::optional<PointerFamily> family,
                       std::span<const double> precisions,
                       const PointerOptions &options = {});

/// True if some row has both CHSH values strictly above 2.
bool has_double_violation(std::span<const DoubleViolationRow> rows);

struct TripleScanCell {
    double f1 = 0.0;
    double f2 = 0.0;
    double chsh1 = 0.0;
    double chsh2 = 0.0;
    double chsh3 = 0.0;

    [[nodiscard]] double worst() const;
};

struct TripleScanReport {
    TripleScanCell best;
    std::size_t cells = 0;
    /// Cells with all three CHSH values above 2.
    std::size_t triple_violations = 0;
};

/// Three unbiased Bobs sharing `settings.bob`; Bob_1 and Bob_2 use optimal
/// pointers with the scanned quality factors, Bob_3 measures strongly.
/// Reports the cell maximising min(I1, I2, I3).
TripleScanReport unbiased_triple_scan(std::span<const double> f1_grid,
                                      std::span<const double> f2_grid,
                                      const Settings &settings,
                                      unsigned threads = 0);

} // namespace weakbell
