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
 * Spin-1/2 linear algebra shared by every module: error types, measurement
 * directions, Pauli matrices and the density-operator value type.
 */

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace weakbell {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

/// A numeric argument violates an operation's precondition.
class InvalidParameter : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A state object (pointer, density operator) fails its invariants.
class InvalidState : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A measurement strength lies outside the unit disc F^2 + G^2 <= 1.
class PhysicalityError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Unit 3-vector naming a spin measurement axis.
class Direction {
  public:
    /// Throws InvalidParameter unless |v| = 1 within 1e-12.
    explicit Direction(const Vec3 &v);
    Direction(double x, double y, double z) : Direction(Vec3{x, y, z}) {}

    /// Rescales a non-zero vector onto the unit sphere.
    static Direction normalized(const Vec3 &v);

    static Direction x() { return Direction{1.0, 0.0, 0.0}; }
    static Direction y() { return Direction{0.0, 1.0, 0.0}; }
    static Direction z() { return Direction{0.0, 0.0, 1.0}; }

    [[nodiscard]] const Vec3 &vector() const { return v_; }
    [[nodiscard]] double dot(const Direction &other) const {
        return v_.dot(other.v_);
    }
    [[nodiscard]] Direction operator-() const { return Direction{-v_}; }

  private:
    Vec3 v_;
};

/// Pauli matrices in the {|up>, |down>} basis of the z axis.
const Mat2 &pauli_x();
const Mat2 &pauli_y();
const Mat2 &pauli_z();

/// The spin observable v.sigma.
Mat2 spin_observable(const Direction &d);

/**
 * Hermitian, positive semi-definite 2x2 or 4x4 operator.
 *
 * Normalized operators have unit trace. Unnormalized ones (outcome-conditioned
 * post-measurement states) carry weight() equal to their trace.
 */
class DensityOperator {
  public:
    static constexpr double kTolerance = 1e-10;

    /// Validates unit trace, Hermiticity and positivity; throws InvalidState.
    static DensityOperator from_matrix(const MatX &m);
    /// Validates Hermiticity and positivity only; weight() = trace.
    static DensityOperator unnormalized(const MatX &m);

    static DensityOperator maximally_mixed(int dim);
    /// |psi><psi| for a (not necessarily unit) state vector.
    static DensityOperator pure(const Eigen::VectorXcd &psi);

    [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()); }
    [[nodiscard]] const MatX &matrix() const { return m_; }
    [[nodiscard]] double weight() const { return weight_; }
    [[nodiscard]] Complex operator()(int r, int c) const { return m_(r, c); }

    /// Same operator rescaled to unit trace; throws InvalidState on zero weight.
    [[nodiscard]] DensityOperator normalized() const;
    [[nodiscard]] double min_eigenvalue() const;
    [[nodiscard]] Mat2 as_qubit() const;
    [[nodiscard]] Mat4 as_two_qubit() const;

  private:
    DensityOperator(MatX m, double weight) : m_(std::move(m)), weight_(weight) {}
    static void check_shape_and_hermiticity(const MatX &m);

    MatX m_;
    double weight_ = 1.0;
};

/// (m + m^dagger) / 2.
template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived> &m) {
    return ((m + m.adjoint()) * 0.5).eval();
}

/// Partial trace of a 4x4 operator over the first (Alice's) qubit.
Mat2 trace_out_first(const Mat4 &rho);
/// Partial trace of a 4x4 operator over the second (Bob's) qubit.
Mat2 trace_out_second(const Mat4 &rho);

/// tr(rho sigma_u (x) sigma_v).
double correlation(const Mat4 &rho, const Direction &u, const Direction &v);

} // namespace weakbell
