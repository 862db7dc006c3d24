#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "equifocal/otfkm.hpp"
#include "equifocal/symspace.hpp"

namespace equifocal {

enum class StructureLabel { Standard, Twisted };

/// An orthogonal complex structure on R^{2l}: the standard one exchanging the
/// two R^l factors, or the twisted one acting blockwise by a skew square root
/// of -I on each factor. Both define circle actions z -> cos(t) z + sin(t) Jz.
struct ComplexStructure {
  Eigen::MatrixXd matrix;
  StructureLabel label = StructureLabel::Standard;
  std::optional<Eigen::MatrixXd> block_transform;  // the l x l factor map of the twisted case

  int ambient_dim() const { return static_cast<int>(matrix.rows()); }
};

/// (x, y) -> (y, -x) on R^{2l}.
ComplexStructure make_standard_j(int l);

/// (x, y) -> (Tx, Ty) on R^{4n+4} with T(x_1, ..., x_{2n+2}) =
/// (x_{n+2}, ..., x_{2n+2}, -x_1, ..., -x_{n+1}). Requires n >= 1.
ComplexStructure make_twisted_jprime(int n);

/// Point of the circle orbit through z: cos(theta) z + sin(theta) Jz.
Eigen::VectorXd s1_orbit(const ComplexStructure& structure, double theta,
                         const Eigen::VectorXd& z);

/// Max |F(orbit point) - F(z)| over the samples and a theta grid.
double s1_invariance_max_deviation(const CliffordSystem& system, const ComplexStructure& structure,
                                   const std::vector<Eigen::VectorXd>& samples, int n_theta = 64);

/// The scalar grad^T J H J grad built from the ambient gradient and Hessian
/// of F at a unit vector. For the twisted structure on an m = 1 system the
/// value is cross-checked against its closed form; disagreement beyond 1e-6
/// throws (it would indicate a transcription bug).
double omega_f(const CliffordSystem& system, const ComplexStructure& structure,
               const Eigen::VectorXd& z);

/// (g^3 F (3 - 2 F^2) + omega) / (g^3 (1 - F^2)^{3/2}); singular at the focal
/// levels, so |F| must stay below 1 - 1e-6.
double alpha_invariant(const CliffordSystem& system, const ComplexStructure& structure,
                       const Eigen::VectorXd& z, int g_degree = 4);

struct AlphaStats {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool constant_verdict = false;
};

/// Samples the level set and reports statistics of the alpha invariant;
/// "constant" iff the standard deviation is below 1e-6 * max(1, |mean|).
/// At level 0 on an m = 1 system with even l the two reference points of the
/// twisted computation are always injected next to the random samples.
AlphaStats homogeneity_probe(const CliffordSystem& system, const ComplexStructure& structure,
                             double level, int count, std::uint64_t seed, int g_degree = 4);

/// The two unit reference points on the zero level of the m = 1 polynomial on
/// R^{4n+4} whose twisted omega values are +128 and -128.
std::pair<Eigen::VectorXd, Eigen::VectorXd> twisted_anchor_points(int n);

/// (phi, w) -> (cos(phi) w, sin(phi) w) in R^{2l}; a two-to-one isometric
/// covering of the minus focal submanifold by the product S^1 x S^{l-1}.
Eigen::VectorXd phi_map(double phi, const Eigen::VectorXd& w);

struct PhiCoveringReport {
  double max_identity_deviation = 0.0;  // Phi(phi, w) vs Phi(phi + pi, -w)
  double min_distinct_distance = 0.0;   // closest pair of non-identified images
  bool pass = false;
};

/// Checks the deck identity Phi(phi, w) = Phi(phi + pi, -w) and that random
/// non-identified parameter pairs map to distinct points.
PhiCoveringReport phi_two_to_one_check(int l, int count, std::uint64_t seed);

struct PhiIsometryReport {
  double max_metric_deviation = 0.0;  // pulled-back metric vs the product metric
  bool pass = false;
};

/// Compares the analytically computed pull-back of the sphere metric along
/// phi_map with the product metric on S^1 x S^{l-1}.
PhiIsometryReport phi_isometry_check(int l, int count, std::uint64_t seed);

struct ActionIdentityReport {
  double max_deviation = 0.0;
  bool pass = false;  // deviation below 1e-12
};

/// Verifies the circle-action identity on the image of phi_map over a
/// (theta, phi, w) grid: the standard structure shifts the circle phase,
/// the twisted structure rotates the S^{l-1} fiber by its block transform.
ActionIdentityReport s1_action_on_mminus_check(const ComplexStructure& structure, int n_theta,
                                               int n_phi, const std::vector<Eigen::VectorXd>& ws);

struct ThorbergssonReport {
  long required_product = 0;  // the value g * (m1 + m2) must take for the space
  long actual_product = 0;
  bool pass = false;
  double focal_distance = 0.0;        // pi / g
  double distance_lower_bound = 0.0;  // pi / (required_product / 2)
};

/// Checks g * (m1 + m2) against the closed-form value for the rank-one space
/// and reports the implied focal distance with its universal lower bound.
ThorbergssonReport thorbergsson_check(const AmbientSpace& space, int g, int m1, int m2);

}  // namespace equifocal
