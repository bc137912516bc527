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

#include "weakbell/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "weakbell/channel.hpp"
#include "weakbell/io.hpp"
#include "weakbell/parallel.hpp"

namespace weakbell {

namespace {

constexpr std::size_t kMaxBobs = 8;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Prepared {
    std::vector<ReadingSampler> samplers;
    /// Bob's (unnormalized) state after Alice's outcome, per (x, a bit).
    std::array<std::array<Mat2, 2>, 2> conditional{};
    std::array<double, 2> p_plus{};
};

Mat2 alice_conditional(const Mat4 &rho, const Mat2 &proj) {
    // tr_A[(P x I) rho]: sum_ij P_ji rho_block(i, j).
    Mat2 out = Mat2::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out += proj(j, i) * rho.block<2, 2>(2 * i, 2 * j);
        }
    }
    return out;
}

Prepared prepare(const BellChainConfig &cfg) {
    cfg.validate();
    if (cfg.stages.size() > kMaxBobs) {
        throw InvalidParameter("simulation supports at most 8 Bobs");
    }
    Prepared prep;
    prep.samplers.reserve(cfg.stages.size());
    for (const auto &stage : cfg.stages) {
        prep.samplers.emplace_back(stage_pointer(stage));
    }
    const Mat4 rho = cfg.initial_state.matrix();
    for (int x = 0; x < 2; ++x) {
        const Projectors pi = projectors(cfg.alice[x]);
        prep.conditional[x][0] = alice_conditional(rho, pi.plus);
        prep.conditional[x][1] = alice_conditional(rho, pi.minus);
        prep.p_plus[x] = prep.conditional[x][0].trace().real();
    }
    return prep;
}

int bit_sign(std::size_t bits, std::size_t k) {
    return ((bits >> k) & 1U) != 0 ? -1 : 1;
}

TrialRecord simulate(const BellChainConfig &cfg, const Prepared &prep,
                     std::uint64_t seed, std::uint64_t index) {
    TrialRecord rec;
    rec.seed = derive_trial_seed(seed, index);
    Rng rng(rec.seed);
    const std::size_t n = cfg.stages.size();
    rec.x = (rng() >> 63) != 0 ? 1 : 0;
    rec.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        rec.y[k] = uniform01(rng) < cfg.stages[k].bias ? 1 : 0;
    }
    const bool plus = uniform01(rng) < prep.p_plus[rec.x];
    rec.a = plus ? 1 : -1;
    Mat2 rho = prep.conditional[rec.x][plus ? 0 : 1];
    rho /= rho.trace().real();
    rec.q.resize(n);
    rec.b.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Reading r = sample_reading(
            rho, prep.samplers[k], cfg.stages[k].direction(rec.y[k]), rng);
        rec.q[k] = r.q;
        rec.b[k] = r.outcome;
        rho = r.collapsed / r.collapsed.trace().real();
    }
    return rec;
}

double chain_stage_chsh(const BellChainConfig &cfg, std::size_t n) {
    return chain_chsh(cfg, n);
}

} // namespace

std::uint64_t derive_trial_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::shared_ptr<const PointerState> stage_pointer(const BobStage &stage) {
    if (stage.pointer) {
        return stage.pointer;
    }
    const double f = stage.strength.quality_factor;
    const double g = stage.strength.precision;
    if (g >= 1.0 - 1e-12 && f <= 1e-12) {
        return std::make_shared<const PointerState>(make_square(1.0));
    }
    if (g > 0.0 && std::abs(f - std::sqrt(1.0 - g * g)) < 1e-9) {
        return std::make_shared<const PointerState>(make_optimal(g));
    }
    throw InvalidParameter(
        "stage has no pointer and its strength is not realized by a default "
        "one");
}

ReadingSampler::ReadingSampler(std::shared_ptr<const PointerState> pointer)
    : pointer_(std::move(pointer)) {
    if (!pointer_) {
        throw InvalidState("sampler needs a pointer");
    }
    const auto phi = pointer_->samples();
    cumulative_.resize(phi.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        acc += phi[i] * phi[i];
        cumulative_[i] = acc;
    }
    if (!(acc > 0.0)) {
        throw InvalidState("pointer has zero mass");
    }
    for (auto &c : cumulative_) {
        c /= acc;
    }
    cumulative_.back() = 1.0;
}

std::size_t ReadingSampler::draw_cell(double u) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
        return cumulative_.size() - 1;
    }
    return static_cast<std::size_t>(it - cumulative_.begin());
}

Reading sample_reading(const Mat2 &rho, const ReadingSampler &sampler,
                       const Direction &d, Rng &rng) {
    const PointerState &p = sampler.pointer();
    const Projectors pi = projectors(d);
    const double p_plus = (pi.plus * rho).trace().real() / rho.trace().real();
    const bool plus = uniform01(rng) < p_plus;
    const std::size_t i = sampler.draw_cell(uniform01(rng));
    const auto shift = p.cells_per_unit();
    const auto phi = p.samples();
    const auto n = static_cast<std::ptrdiff_t>(phi.size());
    const auto at = [&](std::ptrdiff_t j) {
        return j >= 0 && j < n ? phi[static_cast<std::size_t>(j)] : 0.0;
    };
    const auto idx = static_cast<std::ptrdiff_t>(i);
    // phi(q - 1) multiplies pi+, phi(q + 1) multiplies pi-.
    double phi_minus_one = 0.0;
    double phi_plus_one = 0.0;
    Reading r;
    if (plus) {
        r.q = p.position(i) + 1.0;
        phi_minus_one = phi[i];
        phi_plus_one = at(idx + 2 * shift);
    } else {
        r.q = p.position(i) - 1.0;
        phi_plus_one = phi[i];
        phi_minus_one = at(idx - 2 * shift);
    }
    r.outcome = r.q >= 0.0 ? 1 : -1;
    const Mat2 k = phi_minus_one * pi.plus + phi_plus_one * pi.minus;
    r.collapsed = k * rho * k.adjoint();
    return r;
}

Reading sample_reading(const DensityOperator &rho,
                       std::shared_ptr<const PointerState> pointer,
                       const Direction &d, Rng &rng) {
    const ReadingSampler sampler(std::move(pointer));
    return sample_reading(rho.as_qubit(), sampler, d, rng);
}

std::size_t OutcomeSpace::setting_index(int x, std::span<const int> y) const {
    std::size_t idx = x != 0 ? 1U : 0U;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (y[k] != 0) {
            idx |= std::size_t{1} << (k + 1);
        }
    }
    return idx;
}

std::size_t OutcomeSpace::outcome_index(int a, std::span<const int> b) const {
    std::size_t idx = a < 0 ? 1U : 0U;
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (b[k] < 0) {
            idx |= std::size_t{1} << (k + 1);
        }
    }
    return idx;
}

std::vector<double> analytic_distribution(const BellChainConfig &cfg) {
    cfg.validate();
    const std::size_t n = cfg.stages.size();
    if (n > kMaxBobs) {
        throw InvalidParameter("distribution supports at most 8 Bobs");
    }
    const OutcomeSpace space{n};
    std::vector<double> out(space.cells(), 0.0);
    const Mat4 rho = cfg.initial_state.matrix();
    for (std::size_t s = 0; s < space.settings(); ++s) {
        const int x = static_cast<int>(s & 1U);
        const Projectors alice = projectors(cfg.alice[x]);
        for (std::size_t o = 0; o < space.outcomes(); ++o) {
            Mat2 state = alice_conditional(rho, alice[bit_sign(o, 0)]);
            for (std::size_t k = 0; k < n; ++k) {
                const auto &stage = cfg.stages[k];
                const int y = static_cast<int>((s >> (k + 1)) & 1U);
                state = apply_weak_conditional(
                    state, projectors(stage.direction(y)), stage.strength,
                    bit_sign(o, k + 1));
            }
            out[space.cell(s, o)] = std::max(0.0, state.trace().real());
        }
    }
    return out;
}

std::vector<double> input_distribution(const BellChainConfig &cfg) {
    const OutcomeSpace space{cfg.stages.size()};
    std::vector<double> out(space.settings(), 0.5);
    for (std::size_t s = 0; s < space.settings(); ++s) {
        for (std::size_t k = 0; k < cfg.stages.size(); ++k) {
            const double r = cfg.stages[k].bias;
            out[s] *= ((s >> (k + 1)) & 1U) != 0 ? r : 1.0 - r;
        }
    }
    return out;
}

TrialRecord simulate_trial(const BellChainConfig &cfg,
                           std::span<const ReadingSampler> samplers,
                           std::uint64_t seed, std::uint64_t index) {
    if (samplers.size() != cfg.stages.size()) {
        throw InvalidParameter("one sampler per stage is required");
    }
    cfg.validate();
    Prepared prep;
    prep.samplers.assign(samplers.begin(), samplers.end());
    const Mat4 rho = cfg.initial_state.matrix();
    for (int x = 0; x < 2; ++x) {
        const Projectors pi = projectors(cfg.alice[x]);
        prep.conditional[x][0] = alice_conditional(rho, pi.plus);
        prep.conditional[x][1] = alice_conditional(rho, pi.minus);
        prep.p_plus[x] = prep.conditional[x][0].trace().real();
    }
    return simulate(cfg, prep, seed, index);
}

std::uint64_t EmpiricalReport::setting_total(std::size_t setting) const {
    std::uint64_t total = 0;
    for (std::size_t o = 0; o < space.outcomes(); ++o) {
        total += counts[space.cell(setting, o)];
    }
    return total;
}

EmpiricalReport run_chain(const BellChainConfig &cfg, std::uint64_t trials,
                          std::uint64_t seed, const RunOptions &options) {
    if (trials == 0) {
        throw InvalidParameter("trial count must be positive");
    }
    const Prepared prep = prepare(cfg);
    const std::size_t n = cfg.stages.size();
    EmpiricalReport report;
    report.config_digest = config_digest(cfg);
    report.seed = seed;
    report.trials = trials;
    report.space = OutcomeSpace{n};
    const OutcomeSpace space = report.space;

    unsigned threads =
        options.threads == 0 ? default_thread_count() : options.threads;
    const auto chunks = static_cast<std::size_t>(
        std::min<std::uint64_t>(threads, trials));
    std::vector<std::vector<std::uint64_t>> partial(
        chunks, std::vector<std::uint64_t>(space.cells(), 0));
    parallel_for(
        chunks,
        [&](std::size_t c) {
            const std::uint64_t begin = trials * c / chunks;
            const std::uint64_t end = trials * (c + 1) / chunks;
            auto &local = partial[c];
            for (std::uint64_t t = begin; t < end; ++t) {
                const TrialRecord rec = simulate(cfg, prep, seed, t);
                local[space.cell(space.setting_index(rec.x, rec.y),
                                 space.outcome_index(rec.a, rec.b))] += 1;
            }
        },
        static_cast<unsigned>(chunks));
    report.counts.assign(space.cells(), 0);
    for (const auto &local : partial) {
        for (std::size_t i = 0; i < local.size(); ++i) {
            report.counts[i] += local[i];
        }
    }

    const std::vector<double> analytic = analytic_distribution(cfg);
    report.cells.resize(space.cells());
    for (std::size_t s = 0; s < space.settings(); ++s) {
        const std::uint64_t total = report.setting_total(s);
        for (std::size_t o = 0; o < space.outcomes(); ++o) {
            CellEstimate &cell = report.cells[space.cell(s, o)];
            cell.count = report.counts[space.cell(s, o)];
            cell.analytic = analytic[space.cell(s, o)];
            if (total == 0) {
                continue;
            }
            const auto t = static_cast<double>(total);
            cell.estimate = static_cast<double>(cell.count) / t;
            cell.stderr_ =
                std::sqrt(cell.estimate * (1.0 - cell.estimate) / t);
            const double spread =
                std::sqrt(cell.analytic * (1.0 - cell.analytic) / t);
            if (spread > 0.0) {
                cell.z_score = (cell.estimate - cell.analytic) / spread;
            } else if (cell.estimate != cell.analytic) {
                cell.z_score = std::numeric_limits<double>::infinity();
            }
        }
    }

    report.per_bob.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        BobStatistics &bob = report.per_bob[k];
        for (std::size_t s = 0; s < space.settings(); ++s) {
            const std::size_t x = s & 1U;
            const std::size_t y = (s >> (k + 1)) & 1U;
            for (std::size_t o = 0; o < space.outcomes(); ++o) {
                const std::uint64_t c = report.counts[space.cell(s, o)];
                bob.trials[x][y] += c;
                const int ab = bit_sign(o, 0) * bit_sign(o, k + 1);
                bob.sum_ab[x][y] += ab * static_cast<std::int64_t>(c);
            }
        }
        bob.complete = true;
        double variance = 0.0;
        for (std::size_t x = 0; x < 2; ++x) {
            for (std::size_t y = 0; y < 2; ++y) {
                if (bob.trials[x][y] == 0) {
                    bob.complete = false;
                    continue;
                }
                const auto t = static_cast<double>(bob.trials[x][y]);
                const double e = static_cast<double>(bob.sum_ab[x][y]) / t;
                bob.correlations.E[x][y] = e;
                bob.correlation_stderr[x][y] = std::sqrt((1.0 - e * e) / t);
                variance += (1.0 - e * e) / t;
            }
        }
        bob.analytic_chsh = chain_stage_chsh(cfg, k + 1);
        if (bob.complete) {
            bob.chsh = bob.correlations.chsh();
            bob.chsh_stderr = std::sqrt(variance);
            if (bob.chsh_stderr > 0.0) {
                bob.z_score =
                    (*bob.chsh - bob.analytic_chsh) / bob.chsh_stderr;
            }
        }
    }

    const auto keep = static_cast<std::uint64_t>(options.keep_records);
    for (std::uint64_t t = 0; t < std::min(keep, trials); ++t) {
        report.records.push_back(simulate(cfg, prep, seed, t));
    }
    return report;
}

ChiSquareReport chi_square_report(std::span<const std::uint64_t> counts,
                                  std::span<const double> probabilities,
                                  std::size_t group_size, double significance,
                                  double min_expected) {
    if (counts.size() != probabilities.size()) {
        throw InvalidParameter("counts and probabilities differ in length");
    }
    if (group_size == 0 || counts.size() % group_size != 0) {
        throw InvalidParameter("group size must divide the cell count");
    }
    if (!(significance > 0.0 && significance < 1.0)) {
        throw InvalidParameter("significance must lie in (0, 1)");
    }
    ChiSquareReport rep;
    rep.significance = significance;
    bool impossible = false;
    for (std::size_t g = 0; g < counts.size(); g += group_size) {
        std::uint64_t total = 0;
        for (std::size_t i = g; i < g + group_size; ++i) {
            total += counts[i];
        }
        if (total == 0) {
            continue;
        }
        const auto t = static_cast<double>(total);
        std::size_t kept = 0;
        double pooled_expected = 0.0;
        std::uint64_t pooled_observed = 0;
        std::size_t pooled = 0;
        for (std::size_t i = g; i < g + group_size; ++i) {
            const double expected = probabilities[i] * t;
            if (expected >= min_expected) {
                const double diff = static_cast<double>(counts[i]) - expected;
                rep.statistic += diff * diff / expected;
                ++kept;
            } else {
                pooled_expected += expected;
                pooled_observed += counts[i];
                ++pooled;
            }
        }
        if (pooled > 0) {
            rep.merged_cells += pooled;
            if (pooled_expected > 0.0) {
                const double diff =
                    static_cast<double>(pooled_observed) - pooled_expected;
                rep.statistic += diff * diff / pooled_expected;
                ++kept;
            } else if (pooled_observed > 0) {
                impossible = true;
            }
        }
        if (kept > 1) {
            rep.degrees_of_freedom += kept - 1;
        }
    }
    if (impossible) {
        rep.statistic = std::numeric_limits<double>::infinity();
        rep.p_value = 0.0;
    } else if (rep.degrees_of_freedom > 0) {
        const boost::math::chi_squared dist(
            static_cast<double>(rep.degrees_of_freedom));
        rep.p_value = boost::math::cdf(complement(dist, rep.statistic));
    }
    rep.passed = rep.p_value > significance;
    return rep;
}

ChiSquareReport chi_square_report(const EmpiricalReport &empirical,
                                  std::span<const double> analytic,
                                  double significance) {
    return chi_square_report(empirical.counts, analytic,
                             empirical.space.outcomes(), significance);
}

} // namespace weakbell
