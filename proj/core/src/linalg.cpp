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

#include "weakbell/linalg.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace weakbell {

Direction::Direction(const Vec3 &v) : v_(v) {
    const double norm = v.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "direction must be a unit vector, got norm " << norm;
        throw InvalidParameter(msg.str());
    }
}

Direction Direction::normalized(const Vec3 &v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidParameter("cannot normalize a zero or non-finite vector");
    }
    return Direction{v / norm};
}

const Mat2 &pauli_x() {
    static const Mat2 m = (Mat2() << 0, 1, 1, 0).finished();
    return m;
}

const Mat2 &pauli_y() {
    static const Mat2 m =
        (Mat2() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
    return m;
}

const Mat2 &pauli_z() {
    static const Mat2 m = (Mat2() << 1, 0, 0, -1).finished();
    return m;
}

Mat2 spin_observable(const Direction &d) {
    const Vec3 &v = d.vector();
    return v.x() * pauli_x() + v.y() * pauli_y() + v.z() * pauli_z();
}

void DensityOperator::check_shape_and_hermiticity(const MatX &m) {
    if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4)) {
        throw InvalidState("density operator must be 2x2 or 4x4");
    }
    if (!m.allFinite()) {
        throw InvalidState("density operator has non-finite entries");
    }
    const double skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (skew > kTolerance) {
        throw InvalidState("density operator is not Hermitian");
    }
}

DensityOperator DensityOperator::unnormalized(const MatX &m) {
    check_shape_and_hermiticity(m);
    MatX h = hermitian_part(m);
    const double weight = h.trace().real();
    DensityOperator out{std::move(h), weight};
    if (out.min_eigenvalue() < -kTolerance) {
        throw InvalidState("density operator has a negative eigenvalue");
    }
    return out;
}

DensityOperator DensityOperator::from_matrix(const MatX &m) {
    DensityOperator out = unnormalized(m);
    if (std::abs(out.weight_ - 1.0) > kTolerance) {
        std::ostringstream msg;
        msg << "density operator trace is " << out.weight_ << ", expected 1";
        throw InvalidState(msg.str());
    }
    out.weight_ = 1.0;
    return out;
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
    if (dim != 2 && dim != 4) {
        throw InvalidParameter("dimension must be 2 or 4");
    }
    return DensityOperator{MatX::Identity(dim, dim) / dim, 1.0};
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd &psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) {
        throw InvalidState("pure state vector is zero");
    }
    const Eigen::VectorXcd unit = psi / norm;
    return from_matrix(unit * unit.adjoint());
}

DensityOperator DensityOperator::normalized() const {
    if (!(weight_ > 0.0)) {
        throw InvalidState("cannot normalize a zero-weight operator");
    }
    return DensityOperator{m_ / weight_, 1.0};
}

double DensityOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<MatX> solver(m_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Mat2 DensityOperator::as_qubit() const {
    if (dim() != 2) {
        throw InvalidState("expected a single-qubit (2x2) operator");
    }
    return m_;
}

Mat4 DensityOperator::as_two_qubit() const {
    if (dim() != 4) {
        throw InvalidState("expected a two-qubit (4x4) operator");
    }
    return m_;
}

Mat2 trace_out_first(const Mat4 &rho) {
    return rho.block<2, 2>(0, 0) + rho.block<2, 2>(2, 2);
}

Mat2 trace_out_second(const Mat4 &rho) {
    Mat2 out;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out(r, c) = rho.block<2, 2>(2 * r, 2 * c).trace();
        }
    }
    return out;
}

double correlation(const Mat4 &rho, const Direction &u, const Direction &v) {
    const Mat4 obs =
        Eigen::kroneckerProduct(spin_observable(u), spin_observable(v)).eval();
    return (rho * obs).trace().real();
}

} // namespace weakbell
