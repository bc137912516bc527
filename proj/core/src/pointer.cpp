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

#include "weakbell/pointer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include <boost/math/special_functions/erf.hpp>

#include "weakbell/linalg.hpp"
#include "weakbell/parallel.hpp"

namespace weakbell {

namespace {

double sum_of_squares(std::span<const double> v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

void require_positive(double value, const char *what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << what << " must be positive and finite, got " << value;
        throw InvalidParameter(msg.str());
    }
}

void require_open_unit(double value, const char *what) {
    if (!(value > 0.0 && value < 1.0)) {
        std::ostringstream msg;
        msg << what << " must lie in (0, 1), got " << value;
        throw InvalidParameter(msg.str());
    }
}

// Number of cells on each side of the origin whose centres lie inside
// (-radius, radius).
std::size_t cells_per_side(double radius, double h) {
    const double n = std::ceil(radius / h - 0.5);
    return n < 1.0 ? 1U : static_cast<std::size_t>(n);
}

// Samples fn at the centres of a symmetric grid with `per_side` cells on
// each side.
template <typename Fn>
std::vector<double> sample_symmetric(std::size_t per_side, double h, Fn fn) {
    std::vector<double> out(2 * per_side);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double q = (static_cast<double>(i) -
                          static_cast<double>(per_side) + 0.5) *
                         h;
        out[i] = fn(q);
    }
    return out;
}

std::string with_parameter(std::string_view family, double value) {
    std::ostringstream s;
    s << family << "(" << value << ")";
    return s.str();
}

} // namespace

MeasurementStrength MeasurementStrength::make(double quality_factor,
                                              double precision) {
    MeasurementStrength s{quality_factor, precision};
    if (!s.in_range()) {
        std::ostringstream msg;
        msg << "measurement strength (F=" << quality_factor
            << ", G=" << precision << ") outside [0,1]^2";
        throw InvalidParameter(msg.str());
    }
    return s;
}

MeasurementStrength MeasurementStrength::optimal_from_quality(double F) {
    if (!(F >= 0.0 && F <= 1.0)) {
        throw InvalidParameter("quality factor must lie in [0, 1]");
    }
    return {F, std::sqrt((1.0 - F) * (1.0 + F))};
}

MeasurementStrength MeasurementStrength::optimal_from_precision(double G) {
    if (!(G >= 0.0 && G <= 1.0)) {
        throw InvalidParameter("precision must lie in [0, 1]");
    }
    return {std::sqrt((1.0 - G) * (1.0 + G)), G};
}

bool MeasurementStrength::in_range() const {
    return quality_factor >= 0.0 && quality_factor <= 1.0 &&
           precision >= 0.0 && precision <= 1.0;
}

bool MeasurementStrength::is_physical(double tol) const {
    return in_range() &&
           quality_factor * quality_factor + precision * precision <=
               1.0 + tol;
}

void MeasurementStrength::require_physical() const {
    if (!is_physical()) {
        std::ostringstream msg;
        msg << "unphysical measurement strength (F=" << quality_factor
            << ", G=" << precision << "): requires F^2 + G^2 <= 1";
        throw PhysicalityError(msg.str());
    }
}

void require_dyadic_spacing(double h) {
    int exponent = 0;
    const double mantissa = std::frexp(h, &exponent);
    if (!(h > 0.0) || mantissa != 0.5 || h > 1.0) {
        std::ostringstream msg;
        msg << "grid spacing must be 1/2^k, got " << h;
        throw InvalidParameter(msg.str());
    }
}

PointerState::PointerState(std::vector<double> samples, double spacing,
                           std::string label)
    : samples_(std::move(samples)), spacing_(spacing),
      origin_(-(0.5 * static_cast<double>(samples_.size()) - 0.5) * spacing),
      per_unit_(static_cast<std::ptrdiff_t>(std::lround(1.0 / spacing))),
      label_(std::move(label)) {}

PointerState PointerState::from_samples(std::vector<double> samples,
                                        double grid_spacing,
                                        std::string label) {
    require_dyadic_spacing(grid_spacing);
    if (samples.empty() || samples.size() % 2 != 0) {
        throw InvalidParameter("pointer needs a non-empty, even number of samples");
    }
    for (double s : samples) {
        if (!std::isfinite(s)) {
            throw InvalidState("pointer samples must be finite");
        }
    }
    const double norm = sum_of_squares(samples) * grid_spacing;
    if (std::abs(norm - 1.0) > kNormTolerance) {
        std::ostringstream msg;
        msg << "pointer is not normalized: sum phi^2 h = " << norm;
        throw InvalidState(msg.str());
    }
    const std::size_t n = samples.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        if (std::abs(std::abs(samples[i]) - std::abs(samples[n - 1 - i])) >
            kNormTolerance) {
            throw InvalidState("pointer modulus is not symmetric about q = 0");
        }
    }
    return PointerState{std::move(samples), grid_spacing, std::move(label)};
}

PointerState PointerState::normalize(std::vector<double> samples,
                                     double grid_spacing, std::string label) {
    require_dyadic_spacing(grid_spacing);
    const double norm = sum_of_squares(samples) * grid_spacing;
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidState("pointer has zero or non-finite norm");
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (double &s : samples) {
        s *= scale;
    }
    return from_samples(std::move(samples), grid_spacing, std::move(label));
}

double PointerState::amplitude(double q) const {
    const double t = (q - origin_) / spacing_;
    const double last = static_cast<double>(samples_.size() - 1);
    // One cell of linear fall-off to zero beyond the outermost samples.
    if (!(t > -1.0 && t < last + 1.0)) {
        return 0.0;
    }
    const double lo = std::floor(t);
    const double frac = t - lo;
    const auto i = static_cast<std::ptrdiff_t>(lo);
    const auto at = [this](std::ptrdiff_t k) {
        return (k < 0 || k >= static_cast<std::ptrdiff_t>(samples_.size()))
                   ? 0.0
                   : samples_[static_cast<std::size_t>(k)];
    };
    return (1.0 - frac) * at(i) + frac * at(i + 1);
}

PointerState make_square(double half_width, double grid_spacing) {
    require_positive(half_width, "square half-width");
    require_positive(grid_spacing, "grid spacing");
    require_dyadic_spacing(grid_spacing);
    if (grid_spacing > half_width / 50.0) {
        throw InvalidParameter("grid spacing must not exceed half-width / 50");
    }
    const std::size_t per_side = cells_per_side(half_width, grid_spacing);
    auto samples = sample_symmetric(per_side, grid_spacing, [&](double q) {
        return std::abs(q) < half_width ? 1.0 : 0.0;
    });
    return PointerState::normalize(std::move(samples), grid_spacing,
                                   with_parameter("square", half_width));
}

PointerState make_gaussian(double width, double grid_spacing,
                           std::optional<double> truncation_radius) {
    require_positive(width, "gaussian width");
    require_positive(grid_spacing, "grid spacing");
    require_dyadic_spacing(grid_spacing);
    const double radius = truncation_radius.value_or(10.0 * width);
    if (!(radius >= 8.0 * width)) {
        throw InvalidParameter("gaussian truncation radius must be >= 8 width");
    }
    const double inv = 1.0 / (4.0 * width * width);
    auto samples =
        sample_symmetric(cells_per_side(radius, grid_spacing), grid_spacing,
                         [&](double q) { return std::exp(-q * q * inv); });
    return PointerState::normalize(std::move(samples), grid_spacing,
                                   with_parameter("gaussian", width));
}

PointerState make_exponential(double scale, double grid_spacing,
                              std::optional<double> truncation_radius) {
    require_positive(scale, "exponential scale");
    require_positive(grid_spacing, "grid spacing");
    require_dyadic_spacing(grid_spacing);
    const double radius = truncation_radius.value_or(40.0 * scale);
    require_positive(radius, "truncation radius");
    auto samples = sample_symmetric(
        cells_per_side(radius, grid_spacing), grid_spacing,
        [&](double q) { return std::exp(-std::abs(q) / (2.0 * scale)); });
    return PointerState::normalize(std::move(samples), grid_spacing,
                                   with_parameter("exponential", scale));
}

double envelope_exponent(double precision) {
    require_open_unit(precision, "precision");
    return -0.5 * std::log((1.0 - precision) / (1.0 + precision));
}

namespace {

// Optimal-family samples before final renormalization, laid out interval by
// interval from n = -M to n = +M. Returns the samples and M.
std::pair<std::vector<double>, std::size_t>
optimal_samples(double G, const CentralProfile &profile, double h,
                double cutoff) {
    require_open_unit(G, "target precision");
    require_positive(h, "grid spacing");
    require_dyadic_spacing(h);
    if (!(cutoff > 0.0 && cutoff < 1.0)) {
        throw InvalidParameter("envelope cutoff must lie in (0, 1)");
    }
    if (const auto *bump = std::get_if<SmoothBumpProfile>(&profile)) {
        require_positive(bump->alpha, "smooth bump alpha");
    }

    const auto per_unit = static_cast<std::size_t>(std::lround(1.0 / h));
    const std::size_t interval = 2 * per_unit;
    std::vector<double> central(interval);
    for (std::size_t j = 0; j < interval; ++j) {
        const double x = -1.0 + (static_cast<double>(j) + 0.5) * h;
        central[j] = std::visit(
            [x](const auto &p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, FlatProfile>) {
                    return 1.0;
                } else {
                    return std::exp(-p.alpha / (1.0 - x * x));
                }
            },
            profile);
    }
    const double mass = sum_of_squares(central) * h;
    if (!(mass > 0.0)) {
        throw InvalidParameter("central profile vanishes on the grid");
    }
    const double scale = std::sqrt(G / mass);
    for (double &c : central) {
        c *= scale;
    }

    // Interval n carries weight kappa^(2|n|); keep those >= cutoff.
    const double kappa2 = (1.0 - G) / (1.0 + G);
    const auto max_n =
        static_cast<std::size_t>(std::floor(std::log(cutoff) / std::log(kappa2)));
    const double kappa = std::sqrt(kappa2);

    std::vector<double> samples((2 * max_n + 1) * interval);
    for (std::size_t k = 0; k <= 2 * max_n; ++k) {
        const auto n = static_cast<double>(k) - static_cast<double>(max_n);
        const double factor = std::pow(kappa, std::abs(n));
        for (std::size_t j = 0; j < interval; ++j) {
            samples[k * interval + j] = central[j] * factor;
        }
    }
    return {std::move(samples), max_n};
}

std::string profile_label(const CentralProfile &profile) {
    if (const auto *bump = std::get_if<SmoothBumpProfile>(&profile)) {
        return with_parameter("bump", bump->alpha);
    }
    return "flat";
}

} // namespace

PointerState make_optimal(double target_precision,
                          const CentralProfile &profile, double grid_spacing,
                          double envelope_cutoff) {
    auto [samples, max_n] = optimal_samples(target_precision, profile,
                                            grid_spacing, envelope_cutoff);
    (void)max_n;
    return PointerState::normalize(
        std::move(samples), grid_spacing,
        "optimal(" + std::to_string(target_precision) + "," +
            profile_label(profile) + ")");
}

PointerState make_worst(double target_precision, double grid_spacing,
                        const CentralProfile &profile) {
    auto [samples, max_n] = optimal_samples(target_precision, profile,
                                            grid_spacing, kDefaultEnvelopeCutoff);
    const std::size_t interval = 2 * static_cast<std::size_t>(
                                         std::lround(1.0 / grid_spacing));
    for (std::size_t k = 0; k <= 2 * max_n; ++k) {
        const auto n = static_cast<long>(k) - static_cast<long>(max_n);
        if (n % 2 != 0) {
            std::fill_n(samples.begin() + static_cast<long>(k * interval),
                        interval, 0.0);
        }
    }
    return PointerState::normalize(std::move(samples), grid_spacing,
                                   with_parameter("worst", target_precision));
}

double quality_factor(const PointerState &p) {
    const auto s = p.samples();
    const auto shift = static_cast<std::size_t>(2 * p.cells_per_unit());
    double overlap = 0.0;
    for (std::size_t j = 0; j + shift < s.size(); ++j) {
        overlap += s[j] * s[j + shift];
    }
    overlap *= p.grid_spacing();
    if (overlap < -PointerState::kNormTolerance) {
        throw InvalidState("negative pointer overlap: not a real pointer with "
                           "zero phase");
    }
    return std::clamp(overlap, 0.0, 1.0);
}

double precision(const PointerState &p) {
    const auto s = p.samples();
    const std::size_t half = s.size() / 2;
    const auto unit = static_cast<std::size_t>(p.cells_per_unit());
    const std::size_t lo = half > unit ? half - unit : 0;
    const std::size_t hi = std::min(s.size(), half + unit);
    double mass = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        mass += s[i] * s[i];
    }
    return std::clamp(mass * p.grid_spacing(), 0.0, 1.0);
}

MeasurementStrength strength_of(const PointerState &p) {
    return {quality_factor(p), precision(p)};
}

PointerFamily parse_family(std::string_view name) {
    if (name == "square") return PointerFamily::Square;
    if (name == "gaussian") return PointerFamily::Gaussian;
    if (name == "exponential") return PointerFamily::Exponential;
    if (name == "optimal") return PointerFamily::Optimal;
    if (name == "optimal-bump") return PointerFamily::OptimalBump;
    if (name == "worst") return PointerFamily::Worst;
    throw InvalidParameter("unknown pointer family '" + std::string(name) + "'");
}

std::string_view family_name(PointerFamily family) {
    switch (family) {
    case PointerFamily::Square: return "square";
    case PointerFamily::Gaussian: return "gaussian";
    case PointerFamily::Exponential: return "exponential";
    case PointerFamily::Optimal: return "optimal";
    case PointerFamily::OptimalBump: return "optimal-bump";
    case PointerFamily::Worst: return "worst";
    }
    return "unknown";
}

PointerState make_pointer(PointerFamily family, double parameter,
                          const PointerOptions &options) {
    const double h = options.grid_spacing;
    switch (family) {
    case PointerFamily::Square: return make_square(parameter, h);
    case PointerFamily::Gaussian: return make_gaussian(parameter, h);
    case PointerFamily::Exponential: return make_exponential(parameter, h);
    case PointerFamily::Optimal:
        return make_optimal(parameter, FlatProfile{}, h,
                            options.envelope_cutoff);
    case PointerFamily::OptimalBump:
        return make_optimal(parameter, SmoothBumpProfile{options.bump_alpha},
                            h, options.envelope_cutoff);
    case PointerFamily::Worst: return make_worst(parameter, h);
    }
    throw InvalidParameter("unknown pointer family");
}

PointerState pointer_for_precision(PointerFamily family, double G,
                                   const PointerOptions &options) {
    switch (family) {
    case PointerFamily::Square:
        if (!(G > 0.0 && G <= 1.0)) {
            throw InvalidParameter("square pointer precision must lie in (0, 1]");
        }
        return make_square(1.0 / G, options.grid_spacing);
    case PointerFamily::Gaussian:
        require_open_unit(G, "gaussian pointer precision");
        return make_gaussian(1.0 / (std::sqrt(2.0) * boost::math::erf_inv(G)),
                             options.grid_spacing);
    case PointerFamily::Exponential:
        require_open_unit(G, "exponential pointer precision");
        return make_exponential(-1.0 / std::log1p(-G), options.grid_spacing);
    case PointerFamily::Optimal:
    case PointerFamily::OptimalBump:
    case PointerFamily::Worst:
        return make_pointer(family, G, options);
    }
    throw InvalidParameter("unknown pointer family");
}

std::vector<TradeoffRow> tradeoff_curve(PointerFamily family,
                                        std::span<const double> parameters,
                                        const PointerOptions &options) {
    if (parameters.empty()) {
        throw InvalidParameter("tradeoff curve needs at least one parameter");
    }
    std::vector<TradeoffRow> rows(parameters.size());
    parallel_for(parameters.size(), [&](std::size_t i) {
        const auto p = make_pointer(family, parameters[i], options);
        rows[i] = {family, parameters[i], quality_factor(p), precision(p)};
    });
    return rows;
}

} // namespace weakbell
