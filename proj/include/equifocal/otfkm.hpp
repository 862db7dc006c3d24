#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "equifocal/shape_operator.hpp"

namespace equifocal {

/// Smallest dimension carrying k pairwise anticommuting skew-symmetric
/// complex structures (1, 2, 4, 4, 8, 8, 8, 8, then *16 per step of 8).
long clifford_module_dimension(int k);

/// A symmetric Clifford system A_0, ..., A_m on R^{2l} together with the
/// skew-symmetric generators E_2, ..., E_m on R^l it is assembled from, and
/// the quartic polynomial F(z) = |z|^4 - 2 * sum_p <A_p z, z>^2 it generates.
class CliffordSystem {
 public:
  /// Builds the standard system for admissible (m, l): l must be a multiple
  /// of clifford_module_dimension(m - 1). Deterministic; the construction is
  /// verified against the anticommutation relations on exit.
  static CliffordSystem build(int m, int l);

  int m() const { return m_; }
  int l() const { return l_; }
  int ambient_dim() const { return 2 * l_; }

  /// The m + 1 symmetric matrices on R^{2l}.
  const std::vector<Eigen::MatrixXd>& clifford_matrices() const { return a_; }
  /// The m - 1 skew generators on R^l (empty for m = 1).
  const std::vector<Eigen::MatrixXd>& skew_generators() const { return e_; }

  double eval_F(const Eigen::VectorXd& z) const;
  Eigen::VectorXd grad_F(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd hess_F(const Eigen::VectorXd& z) const;

 private:
  CliffordSystem() = default;
  int m_ = 0;
  int l_ = 0;
  std::vector<Eigen::MatrixXd> a_;
  std::vector<Eigen::MatrixXd> e_;
};

/// A point of a level hypersurface of F restricted to the unit sphere, with
/// its spherical normal, shape operator (in an orthonormal tangent frame,
/// which is adapted since the ambient is a round sphere) and clustered
/// principal curvatures.
struct HypersurfaceSample {
  Eigen::VectorXd z;
  double level = 0.0;
  Eigen::VectorXd normal;
  ShapeOperator shape;
  std::vector<std::pair<double, int>> curvatures;  // sorted descending, with multiplicities
};

/// Draws `count` unit vectors with F = c (|F - c| < 1e-10) by seeded random
/// starts followed by great-circle root finding along the spherical gradient.
/// Deterministic for a fixed seed. Throws for |c| >= 1 and on non-convergence.
std::vector<Eigen::VectorXd> sample_level(const CliffordSystem& system, double c, int count,
                                          std::uint64_t seed);

/// Shape operator of the level set of F through z (as a hypersurface of the
/// unit sphere), computed analytically from the Hessian of F; the normal
/// points toward increasing F. Throws near focal/critical points (spherical
/// gradient below 1e-8).
HypersurfaceSample shape_operator_at(const CliffordSystem& system, const Eigen::VectorXd& z);

enum class FocalMembership { MPlus, MMinus, Neither };

/// Classifies a unit vector against the focal submanifolds F^{-1}(+-1) via
/// their algebraic descriptions, cross-checked against the value of F.
FocalMembership focal_membership(const CliffordSystem& system, const Eigen::VectorXd& z);

}  // namespace equifocal
