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

#include "weakbell/channel.hpp"

#include <cmath>
#include <sstream>

namespace weakbell {

namespace {

void require_quality_factor(double F) {
    if (!(F >= 0.0 && F <= 1.0)) {
        std::ostringstream msg;
        msg << "quality factor must lie in [0, 1], got " << F;
        throw InvalidParameter(msg.str());
    }
}

void require_precision(double G) {
    if (!(G >= 0.0 && G <= 1.0)) {
        std::ostringstream msg;
        msg << "precision must lie in [0, 1], got " << G;
        throw InvalidParameter(msg.str());
    }
}

void require_outcome(int b) {
    if (b != 1 && b != -1) {
        throw InvalidParameter("outcome must be +1 or -1");
    }
}

DensityOperator wrap_like(const DensityOperator &input, const MatX &m) {
    // A normalized input stays normalized under a trace-preserving map.
    const bool keeps_trace =
        input.weight() == 1.0 &&
        std::abs(m.trace().real() - 1.0) <= DensityOperator::kTolerance;
    return keeps_trace ? DensityOperator::from_matrix(m)
                       : DensityOperator::unnormalized(m);
}

} // namespace

Projectors projectors(const Direction &d) {
    const Mat2 s = spin_observable(d);
    const Mat2 id = Mat2::Identity();
    return {0.5 * (id + s), 0.5 * (id - s)};
}

Mat2 apply_decohere(const Mat2 &rho, const Projectors &pi) {
    return pi.plus * rho * pi.plus + pi.minus * rho * pi.minus;
}

Mat2 apply_weak_unconditional(const Mat2 &rho, const Projectors &pi,
                              double F) {
    const Mat2 dec = pi.plus * rho * pi.plus + pi.minus * rho * pi.minus;
    return F * rho + (1.0 - F) * dec;
}

Mat2 apply_weak_conditional(const Mat2 &rho, const Projectors &pi,
                            const MeasurementStrength &s, int b) {
    const double F = s.quality_factor;
    const double bG = b * s.precision;
    return 0.5 * F * rho + 0.5 * (1.0 + bG - F) * (pi.plus * rho * pi.plus) +
           0.5 * (1.0 - bG - F) * (pi.minus * rho * pi.minus);
}

namespace maps {

QubitMap identity() {
    return [](const Mat2 &rho) { return rho; };
}

QubitMap weak_unconditional(const Direction &d, double F) {
    require_quality_factor(F);
    return [pi = projectors(d), F](const Mat2 &rho) {
        return apply_weak_unconditional(rho, pi, F);
    };
}

QubitMap weak_conditional(const Direction &d, const MeasurementStrength &s,
                          int b) {
    s.require_physical();
    require_outcome(b);
    return [pi = projectors(d), s, b](const Mat2 &rho) {
        return apply_weak_conditional(rho, pi, s, b);
    };
}

QubitMap decohere(const Direction &d) {
    return [pi = projectors(d)](const Mat2 &rho) {
        return apply_decohere(rho, pi);
    };
}

} // namespace maps

DensityOperator weak_unconditional(const DensityOperator &rho,
                                   const Direction &d, double F) {
    require_quality_factor(F);
    return wrap_like(rho, apply_weak_unconditional(rho.as_qubit(),
                                                   projectors(d), F));
}

DensityOperator weak_unconditional(const DensityOperator &rho,
                                   const Direction &d, const PointerState &p) {
    return weak_unconditional(rho, d, quality_factor(p));
}

OutcomeProbabilities outcome_probabilities(const DensityOperator &rho,
                                           const Direction &d, double G) {
    require_precision(G);
    const Projectors pi = projectors(d);
    const Mat2 m = rho.as_qubit() / rho.weight();
    const double strong_plus = (pi.plus * m).trace().real();
    const double plus = G * strong_plus + 0.5 * (1.0 - G);
    return {plus, 1.0 - plus};
}

OutcomeProbabilities outcome_probabilities(const DensityOperator &rho,
                                           const Direction &d,
                                           const PointerState &p) {
    return outcome_probabilities(rho, d, precision(p));
}

DensityOperator weak_conditional(const DensityOperator &rho,
                                 const Direction &d,
                                 const MeasurementStrength &s, int b) {
    s.require_physical();
    require_outcome(b);
    return DensityOperator::unnormalized(
        apply_weak_conditional(rho.as_qubit(), projectors(d), s, b));
}

DensityOperator weak_conditional(const DensityOperator &rho,
                                 const Direction &d, const PointerState &p,
                                 int b) {
    return weak_conditional(rho, d, strength_of(p), b);
}

Mat2 kraus_at_reading(const PointerState &p, const Direction &d, double q) {
    const Projectors pi = projectors(d);
    return p.amplitude(q - 1.0) * pi.plus + p.amplitude(q + 1.0) * pi.minus;
}

DensityOperator decohere(const DensityOperator &rho, const Direction &d) {
    return wrap_like(rho, apply_decohere(rho.as_qubit(), projectors(d)));
}

Mat4 lift_second(const QubitMap &op, const Mat4 &rho) {
    Mat4 out;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const Mat2 block = rho.block<2, 2>(2 * r, 2 * c);
            out.block<2, 2>(2 * r, 2 * c) = op(block);
        }
    }
    return hermitian_part(out);
}

DensityOperator on_second_qubit(const QubitMap &op,
                                const DensityOperator &rho) {
    if (rho.dim() != 4) {
        throw InvalidState("on_second_qubit expects a 4x4 operator");
    }
    return wrap_like(rho, lift_second(op, rho.as_two_qubit()));
}

Distinguishability distinguishability(const MeasurementStrength &s) {
    s.require_physical();
    const double F = s.quality_factor;
    return {0.5 * (1.0 + s.precision),
            0.5 * (1.0 + std::sqrt(std::max(0.0, (1.0 - F) * (1.0 + F))))};
}

} // namespace weakbell
