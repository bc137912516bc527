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
 * Biased-input protocol giving an arbitrarily long sequence of CHSH
 * violations.
 *
 * Bob_n measures Z or (cos t_n Z + sin t_n X) against Alice's -Z / X with
 *
 *   t_1 = pi/4,  tan t_n = prod_{i<n} F_i,
 *   F_n = 1 - 2 / (1 + sqrt(1 + tan^2 t_n)),  G_n = sqrt(1 - F_n^2).
 *
 * F_n falls roughly as F_{n-1}^3, so beyond n ~ 6 the quantities leave the
 * double range. Every row therefore carries natural-log companions, and all
 * comparisons (bound > 2, decay ratios) are made in log space.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "weakbell/bell.hpp"

namespace weakbell {

/// Input biases r_1, r_2, ... (probability of input 1), held as logarithms.
class BiasSchedule {
  public:
    /// Each r_k must lie in [0, 1); throws InvalidParameter.
    static BiasSchedule from_values(std::span<const double> r);
    static BiasSchedule uniform(std::size_t count, double r);
    /// Uniform bias given by its logarithm; log_r may be far below the
    /// double range of r itself.
    static BiasSchedule uniform_log(std::size_t count, double log_r);
    /// The r -> 0 limit: every Bob receives input 0.
    static BiasSchedule zero(std::size_t count);

    [[nodiscard]] std::size_t size() const { return log_r_.size(); }
    [[nodiscard]] double log_value(std::size_t k) const { return log_r_.at(k); }
    [[nodiscard]] double value(std::size_t k) const;

  private:
    std::vector<double> log_r_;
};

struct ProtocolRow {
    std::size_t n = 0;
    double theta = 0.0;
    double log_theta = 0.0;
    /// tan t_n = prod_{i<n} F_i and its logarithm.
    double tan_theta = 0.0;
    double log_tan_theta = 0.0;
    double quality_factor = 0.0;
    double log_quality_factor = 0.0;
    double precision = 0.0;
    /// Probability that some Bob before Bob_n received input 1.
    double spoil_probability = 0.0;
    double log_spoil_probability = 0.0;
    /// Threshold on the spoil probability sufficient for a violation.
    double chi = 0.0;
    double log_chi = 0.0;
    /// Exact CHSH value in the zero-bias limit and its excess over 2.
    double limit_chsh = 0.0;
    double violation = 0.0;
    double log_violation = 0.0;
};

struct ProtocolSchedule {
    std::vector<ProtocolRow> rows;
    BiasSchedule biases;

    [[nodiscard]] std::size_t size() const { return rows.size(); }
    /// Row for Bob_n, 1-based; throws InvalidParameter.
    [[nodiscard]] const ProtocolRow &row(std::size_t n) const;
};

/// Rows for Bob_1..Bob_N. Needs at least N-1 biases (extra ones ignored).
ProtocolSchedule build_schedule(std::size_t N, const BiasSchedule &biases);
ProtocolSchedule build_schedule(std::size_t N, std::span<const double> biases);
/// Zero-bias schedule.
ProtocolSchedule build_limit_schedule(std::size_t N);

/// chi(F) = (1/(1-F) - 1/sqrt(1-F^2)) / 2 for F in (0, 1).
double chi(double quality_factor);
/// log chi as a function of log F; valid far below the double range of F.
double log_chi_from_log(double log_quality_factor);

/// Lower bound G_n (2/(1-F_n) - 4 P_n) on Bob_n's CHSH value.
struct ChshBound {
    double value = 0.0;
    /// value - 2 = 4 G_n (chi_n - P_n), as sign and log-magnitude.
    int excess_sign = 0;
    double log_abs_excess = 0.0;

    [[nodiscard]] bool exceeds_classical() const { return excess_sign > 0; }
    /// value - 2 in double precision (underflows to 0 for long chains).
    [[nodiscard]] double excess() const;
};

ChshBound chsh_lower_bound(const ProtocolSchedule &schedule, std::size_t n);

/// G_n (1 + sec t_n) = 2 sqrt((1+F_n)/(1-F_n)).
double limit_chsh(const ProtocolSchedule &schedule, std::size_t n);

struct UniformBias {
    double r;
    double log_r;
};

/// Uniform r with P_N = chi_N / 2, so every Bob_n, n <= N, has bound > 2.
UniformBias feasible_uniform_bias(std::size_t N);

/// V_{n+1} / (V_n^3 / 4) for n = 1 .. n_max-1, formed from logarithms.
/// Requires 3 <= n_max <= schedule size.
std::vector<double> decay_ratio_sequence(const ProtocolSchedule &schedule,
                                         std::size_t n_max);

/// Chain of the first `bobs` schedule rows with the protocol geometry, the
/// optimal strengths (F_n, G_n) and the schedule's biases (values below the
/// double range become 0).
BellChainConfig protocol_chain(const ProtocolSchedule &schedule,
                               std::size_t bobs);

} // namespace weakbell
