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
 * The weak von Neumann measurement as a channel on one spin-1/2 particle.
 *
 * With projectors pi+ / pi- onto the eigenstates of d.sigma:
 *
 *   unconditional   rho -> F rho + (1-F) (pi+ rho pi+ + pi- rho pi-)
 *   outcome b       rho -> F/2 rho + (1+bG-F)/2 pi+ rho pi+
 *                                  + (1-bG-F)/2 pi- rho pi-
 *   reading q       K_q = phi(q-1) pi+ + phi(q+1) pi-
 *
 * Every map here is linear, so the same kernels act on the 2x2 blocks of a
 * two-qubit operator (on_second_qubit).
 */

#pragma once

#include <functional>
#include <utility>

#include "weakbell/linalg.hpp"
#include "weakbell/pointer.hpp"

namespace weakbell {

struct Projectors {
    Mat2 plus;
    Mat2 minus;

    [[nodiscard]] const Mat2 &operator[](int outcome) const {
        return outcome > 0 ? plus : minus;
    }
};

/// pi+- = (I +- d.sigma) / 2.
Projectors projectors(const Direction &d);

/// A linear map on 2x2 operators.
using QubitMap = std::function<Mat2(const Mat2 &)>;

namespace maps {
QubitMap identity();
/// Throws InvalidParameter if F is outside [0, 1].
QubitMap weak_unconditional(const Direction &d, double quality_factor);
/// Throws PhysicalityError for unphysical s, InvalidParameter for b != +-1.
QubitMap weak_conditional(const Direction &d, const MeasurementStrength &s,
                          int outcome);
QubitMap decohere(const Direction &d);
} // namespace maps

/// Raw linear kernels: no validation and no Hermitian projection, so they are
/// valid on arbitrary (block) operators.
Mat2 apply_weak_unconditional(const Mat2 &rho, const Projectors &pi,
                              double quality_factor);
Mat2 apply_weak_conditional(const Mat2 &rho, const Projectors &pi,
                            const MeasurementStrength &s, int outcome);
Mat2 apply_decohere(const Mat2 &rho, const Projectors &pi);

DensityOperator weak_unconditional(const DensityOperator &rho,
                                   const Direction &d, double quality_factor);
/// F taken from the pointer by quadrature.
DensityOperator weak_unconditional(const DensityOperator &rho,
                                   const Direction &d, const PointerState &p);

struct OutcomeProbabilities {
    double plus;
    double minus;

    [[nodiscard]] double operator[](int outcome) const {
        return outcome > 0 ? plus : minus;
    }
};

/// P(+-) = G tr(pi+- rho) + (1-G)/2, for a normalized rho.
OutcomeProbabilities outcome_probabilities(const DensityOperator &rho,
                                           const Direction &d,
                                           double precision);
OutcomeProbabilities outcome_probabilities(const DensityOperator &rho,
                                           const Direction &d,
                                           const PointerState &p);

/// Unnormalized post-measurement state given outcome b; its weight is P(b).
DensityOperator weak_conditional(const DensityOperator &rho,
                                 const Direction &d,
                                 const MeasurementStrength &s, int outcome);
DensityOperator weak_conditional(const DensityOperator &rho,
                                 const Direction &d, const PointerState &p,
                                 int outcome);

/// K_q for a real pointer. Zero outside the sampled domain.
Mat2 kraus_at_reading(const PointerState &p, const Direction &d, double q);

/// pi+ rho pi+ + pi- rho pi-.
DensityOperator decohere(const DensityOperator &rho, const Direction &d);

/// Applies `op` to the second tensor factor of a 4x4 operator, identity on the
/// first. Throws InvalidState unless rho is 4x4. The result keeps rho's
/// normalization convention (weight = trace).
DensityOperator on_second_qubit(const QubitMap &op, const DensityOperator &rho);
/// Block-wise lift on a raw 4x4 matrix.
Mat4 lift_second(const QubitMap &op, const Mat4 &rho);

struct Distinguishability {
    /// (1+G)/2: success rate of reading the sign of the pointer position.
    double sign_strategy;
    /// (1+sqrt(1-F^2))/2: the bound for any reading of the pointer.
    double bound;
};

Distinguishability distinguishability(const MeasurementStrength &s);

} // namespace weakbell
