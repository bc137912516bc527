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
 * Pointer wavefunctions for a von Neumann spin measurement with unit coupling
 * (eigenvalues +/-1 displace the pointer by +/-1), and the two functionals
 * that fix the measurement's strength:
 *
 *   quality factor  F = int phi(q+1) phi(q-1) dq
 *   precision       G = int_{-1}^{+1} phi(q)^2 dq
 *
 * Pointers are real and sampled on a cell-centred uniform grid whose spacing
 * is 1/2^k, so a unit displacement is an exact index shift and the points
 * q = 0 and q = odd integer fall on cell boundaries, never on samples.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace weakbell {

inline constexpr double kDefaultGridSpacing = 1.0 / 512.0;
/// Envelope weight below which optimal-family intervals are dropped.
inline constexpr double kDefaultEnvelopeCutoff = 1e-13;

/// Quality factor F and precision G of a measurement.
struct MeasurementStrength {
    double quality_factor = 1.0;
    double precision = 0.0;

    /// Range-checks both components; throws InvalidParameter.
    static MeasurementStrength make(double quality_factor, double precision);
    /// The point on the optimal frontier F^2 + G^2 = 1 with the given F.
    static MeasurementStrength optimal_from_quality(double quality_factor);
    /// The point on the optimal frontier with the given G.
    static MeasurementStrength optimal_from_precision(double precision);
    static MeasurementStrength strong() { return {0.0, 1.0}; }
    static MeasurementStrength none() { return {1.0, 0.0}; }

    [[nodiscard]] bool in_range() const;
    [[nodiscard]] bool is_physical(double tol = 1e-9) const;
    /// Throws PhysicalityError if out of range or outside the unit disc.
    void require_physical() const;
};

/**
 * Real pointer wavefunction on a symmetric cell-centred grid.
 *
 * Sample i sits at q_i = (i - N/2 + 1/2) h. Construction enforces
 * normalization (sum phi^2 h = 1) and |phi(q)| = |phi(-q)|, both within 1e-9.
 */
class PointerState {
  public:
    static constexpr double kNormTolerance = 1e-9;

    /// Validates the grid and invariants; throws InvalidParameter/InvalidState.
    static PointerState from_samples(std::vector<double> samples,
                                     double grid_spacing, std::string label);
    /// Rescales to unit norm first, then validates.
    static PointerState normalize(std::vector<double> samples,
                                  double grid_spacing, std::string label);

    [[nodiscard]] std::span<const double> samples() const { return samples_; }
    [[nodiscard]] std::size_t size() const { return samples_.size(); }
    [[nodiscard]] double grid_spacing() const { return spacing_; }
    /// Position of sample 0.
    [[nodiscard]] double grid_origin() const { return origin_; }
    [[nodiscard]] const std::string &label() const { return label_; }
    [[nodiscard]] double position(std::size_t i) const {
        return origin_ + static_cast<double>(i) * spacing_;
    }
    /// Number of samples per unit length, 1/h.
    [[nodiscard]] std::ptrdiff_t cells_per_unit() const { return per_unit_; }
    /// Half-width of the sampled domain, N h / 2.
    [[nodiscard]] double half_extent() const {
        return 0.5 * static_cast<double>(samples_.size()) * spacing_;
    }

    /// phi(q) by linear interpolation between samples; 0 outside the domain.
    [[nodiscard]] double amplitude(double q) const;

  private:
    PointerState(std::vector<double> samples, double spacing,
                 std::string label);

    std::vector<double> samples_;
    double spacing_;
    double origin_;
    std::ptrdiff_t per_unit_;
    std::string label_;
};

/// Checks that h is 1/2^k for some k >= 0; throws InvalidParameter.
void require_dyadic_spacing(double grid_spacing);

struct FlatProfile {};
/// f(q) = A exp(-alpha / (1 - q^2)): smooth, all derivatives vanish at +/-1.
struct SmoothBumpProfile {
    double alpha = 1.0;
};
/// Shape of an optimal pointer on the central interval (-1, 1].
using CentralProfile = std::variant<FlatProfile, SmoothBumpProfile>;

/// phi = 1/sqrt(2 delta) on (-delta, delta). Requires h <= delta/50.
PointerState make_square(double half_width,
                         double grid_spacing = kDefaultGridSpacing);

/// phi^2 is the normal density with standard deviation `width`, truncated
/// at `truncation_radius` (default 10 width, at least 8 width) and
/// renormalized.
PointerState make_gaussian(double width,
                           double grid_spacing = kDefaultGridSpacing,
                           std::optional<double> truncation_radius = {});

/// phi^2 proportional to exp(-|q| / scale); default truncation 40 scale.
PointerState make_exponential(double scale,
                              double grid_spacing = kDefaultGridSpacing,
                              std::optional<double> truncation_radius = {});

/**
 * Member of the optimal family with precision `target_precision`.
 *
 * The central profile, scaled so its mass on (-1, 1] equals G, is copied to
 * every interval (2n-1, 2n+1] with amplitude factor ((1-G)/(1+G))^(|n|/2).
 * Intervals whose weight falls below `envelope_cutoff` are dropped and the
 * result renormalized. Any such pointer satisfies F^2 + G^2 = 1.
 */
PointerState make_optimal(double target_precision,
                          const CentralProfile &profile = FlatProfile{},
                          double grid_spacing = kDefaultGridSpacing,
                          double envelope_cutoff = kDefaultEnvelopeCutoff);

/// The optimal-family pointer with every odd interval zeroed: F = 0.
PointerState make_worst(double target_precision,
                        double grid_spacing = kDefaultGridSpacing,
                        const CentralProfile &profile = FlatProfile{});

/// Envelope exponent a with exp(-a) = sqrt((1-G)/(1+G)).
double envelope_exponent(double precision);

/// F by the composite rule on the grid. Clamped to [0, 1] when within 1e-9
/// of the range; throws InvalidState for a negative overlap beyond that.
double quality_factor(const PointerState &p);
/// G = pointer mass on (-1, 1).
double precision(const PointerState &p);
MeasurementStrength strength_of(const PointerState &p);

enum class PointerFamily {
    Square,
    Gaussian,
    Exponential,
    Optimal,
    OptimalBump,
    Worst,
};

/// "square", "gaussian", "exponential", "optimal", "optimal-bump", "worst".
PointerFamily parse_family(std::string_view name);
std::string_view family_name(PointerFamily family);

struct PointerOptions {
    double grid_spacing = kDefaultGridSpacing;
    double bump_alpha = 1.0;
    double envelope_cutoff = kDefaultEnvelopeCutoff;
};

/// Builds a family member. The parameter is the half-width (square), the
/// standard deviation (gaussian), the scale (exponential) or the target G.
PointerState make_pointer(PointerFamily family, double parameter,
                          const PointerOptions &options = {});

/**
 * The family member whose precision is (approximately) G.
 *
 * The family parameter comes from the closed-form G of the continuous pointer
 * (square: 1/G; gaussian: 1/(sqrt 2 erf^-1 G); exponential: -1/ln(1-G);
 * optimal families: G itself). Callers should read the achieved G back with
 * precision() since the grid discretizes the support.
 */
PointerState pointer_for_precision(PointerFamily family, double precision,
                                   const PointerOptions &options = {});

struct TradeoffRow {
    PointerFamily family;
    double parameter;
    double quality_factor;
    double precision;
};

/// One (F, G) row per parameter, in input order.
std::vector<TradeoffRow> tradeoff_curve(PointerFamily family,
                                        std::span<const double> parameters,
                                        const PointerOptions &options = {});

} // namespace weakbell
