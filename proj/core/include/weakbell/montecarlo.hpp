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
 * Stochastic simulation of sequential weak measurements.
 *
 * Each trial draws its inputs, lets Alice measure strongly, then for every
 * Bob draws a pointer reading q from tr(pi+ rho) phi^2(q-1) +
 * tr(pi- rho) phi^2(q+1), collapses the spin with K_q and digitizes the
 * outcome as sign(q) (q >= 0 gives +1).
 *
 * Randomness: trial t of a run with seed s uses its own std::mt19937_64,
 * seeded with a SplitMix64-style hash of (s, t). Results are therefore
 * identical for any thread count or scheduling order.
 */

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "weakbell/bell.hpp"

namespace weakbell {

using Rng = std::mt19937_64;

/// Seed for trial `index` of a run seeded with `seed`.
std::uint64_t derive_trial_seed(std::uint64_t seed, std::uint64_t index);
/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng &rng);

/// The stage's pointer, or a default one: a square of half-width 1 for a
/// strong stage, the optimal pointer for a strength on the optimal curve.
/// Throws InvalidParameter otherwise.
std::shared_ptr<const PointerState> stage_pointer(const BobStage &stage);

/// Inverse-CDF sampler over the cells of a pointer's grid.
class ReadingSampler {
  public:
    /// Throws InvalidState for a null or zero-mass pointer.
    explicit ReadingSampler(std::shared_ptr<const PointerState> pointer);

    [[nodiscard]] const PointerState &pointer() const { return *pointer_; }
    /// Cell index with probability phi_i^2 h, for u uniform in [0, 1).
    [[nodiscard]] std::size_t draw_cell(double u) const;

  private:
    std::shared_ptr<const PointerState> pointer_;
    std::vector<double> cumulative_;
};

struct Reading {
    double q = 0.0;
    int outcome = 1;
    /// K_q rho K_q^dagger; its trace is the reading density at q.
    Mat2 collapsed;
};

/// One reading of d.sigma on a single-qubit state.
Reading sample_reading(const Mat2 &rho, const ReadingSampler &sampler,
                       const Direction &d, Rng &rng);
Reading sample_reading(const DensityOperator &rho,
                       std::shared_ptr<const PointerState> pointer,
                       const Direction &d, Rng &rng);

struct TrialRecord {
    std::uint64_t seed = 0;
    int x = 0;
    std::vector<int> y;
    int a = 1;
    std::vector<double> q;
    std::vector<int> b;

    friend bool operator==(const TrialRecord &, const TrialRecord &) = default;
};

/// Index helpers for the joint (inputs, outcomes) table of an n-Bob chain.
/// Bit 0 is Alice's (x or a), bit k is Bob_k's; an outcome bit is set for -1.
struct OutcomeSpace {
    std::size_t bobs = 0;

    [[nodiscard]] std::size_t settings() const { return std::size_t{2} << bobs; }
    [[nodiscard]] std::size_t outcomes() const { return std::size_t{2} << bobs; }
    [[nodiscard]] std::size_t cells() const { return settings() * outcomes(); }
    [[nodiscard]] std::size_t setting_index(int x, std::span<const int> y) const;
    [[nodiscard]] std::size_t outcome_index(int a, std::span<const int> b) const;
    [[nodiscard]] std::size_t cell(std::size_t setting,
                                   std::size_t outcome) const {
        return setting * outcomes() + outcome;
    }
};

/// P(a, b_1..b_n | x, y_1..y_n) by exact composition of the channels, laid out
/// as OutcomeSpace cells. Every stage needs a pointer (its F, G are used).
std::vector<double> analytic_distribution(const BellChainConfig &cfg);
/// Marginal input distribution: x uniform, y_k ~ Bernoulli(r_k).
std::vector<double> input_distribution(const BellChainConfig &cfg);

/// Simulates trial `index`. Samplers must match cfg.stages one to one.
TrialRecord simulate_trial(const BellChainConfig &cfg,
                           std::span<const ReadingSampler> samplers,
                           std::uint64_t seed, std::uint64_t index);

struct BobStatistics {
    /// Trials and sum of a*b per (x, y_n).
    std::array<std::array<std::uint64_t, 2>, 2> trials{};
    std::array<std::array<std::int64_t, 2>, 2> sum_ab{};
    CorrelationTable correlations;
    std::array<std::array<double, 2>, 2> correlation_stderr{};
    /// False when some (x, y_n) pair was never drawn; the CHSH fields are
    /// then left empty instead of dividing by zero.
    bool complete = false;
    std::optional<double> chsh;
    double chsh_stderr = 0.0;
    double analytic_chsh = 0.0;
    std::optional<double> z_score;
};

struct CellEstimate {
    std::uint64_t count = 0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double analytic = 0.0;
    double z_score = 0.0;
};

struct EmpiricalReport {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    OutcomeSpace space;
    /// Joint counts over OutcomeSpace cells; they sum to `trials`.
    std::vector<std::uint64_t> counts;
    /// Per-cell conditional estimates P(outcomes | inputs).
    std::vector<CellEstimate> cells;
    std::vector<BobStatistics> per_bob;
    /// First trials of the run, if requested.
    std::vector<TrialRecord> records;

    /// Trials with the given inputs.
    [[nodiscard]] std::uint64_t setting_total(std::size_t setting) const;
};

struct RunOptions {
    unsigned threads = 0;
    std::size_t keep_records = 0;
};

/// Runs `trials` independent trials. Every stage must carry a pointer.
EmpiricalReport run_chain(const BellChainConfig &cfg, std::uint64_t trials,
                          std::uint64_t seed, const RunOptions &options = {});

struct ChiSquareReport {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
    double significance = 1e-3;
    bool passed = true;
    /// Cells with expected count below the floor, pooled per group.
    std::size_t merged_cells = 0;
};

/**
 * Pearson chi-square of counts against probabilities, in groups of
 * `group_size` cells whose probabilities sum to one (one group per input
 * setting). Cells expected to hold fewer than `min_expected` counts are
 * pooled within their group. Passes when p > significance.
 */
ChiSquareReport chi_square_report(std::span<const std::uint64_t> counts,
                                  std::span<const double> probabilities,
                                  std::size_t group_size,
                                  double significance = 1e-3,
                                  double min_expected = 5.0);
ChiSquareReport chi_square_report(const EmpiricalReport &empirical,
                                  std::span<const double> analytic,
                                  double significance = 1e-3);

} // namespace weakbell
