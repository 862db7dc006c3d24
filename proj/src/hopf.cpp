#include "equifocal/hopf.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace equifocal {

namespace {

void validate_structure(const ComplexStructure& s) {
  const Eigen::Index n = s.matrix.rows();
  if (n != s.matrix.cols() || n < 2)
    throw std::invalid_argument("ComplexStructure: matrix must be square");
  Eigen::MatrixXd sq = s.matrix * s.matrix;
  sq.diagonal().array() += 1.0;
  if (sq.cwiseAbs().maxCoeff() >= 1e-12)
    throw std::logic_error("ComplexStructure: matrix does not square to -I");
  if ((s.matrix + s.matrix.transpose()).cwiseAbs().maxCoeff() >= 1e-12)
    throw std::logic_error("ComplexStructure: matrix is not skew-symmetric");
  if (s.block_transform) {
    const Eigen::MatrixXd& t = *s.block_transform;
    Eigen::MatrixXd tsq = t * t;
    tsq.diagonal().array() += 1.0;
    if (tsq.cwiseAbs().maxCoeff() >= 1e-12)
      throw std::logic_error("ComplexStructure: block transform does not square to -I");
    if ((t + t.transpose()).cwiseAbs().maxCoeff() >= 1e-12)
      throw std::logic_error("ComplexStructure: block transform is not skew-symmetric");
  }
}

void check_unit(const Eigen::VectorXd& z, const char* who) {
  if (std::abs(z.norm() - 1.0) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": expected a unit vector");
}

Eigen::VectorXd random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  return v.normalized();
}

}  // namespace

ComplexStructure make_standard_j(int l) {
  if (l < 1) throw std::invalid_argument("make_standard_j: l must be >= 1");
  ComplexStructure s;
  s.label = StructureLabel::Standard;
  s.matrix = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  s.matrix.topRightCorner(l, l) = Eigen::MatrixXd::Identity(l, l);
  s.matrix.bottomLeftCorner(l, l) = -Eigen::MatrixXd::Identity(l, l);
  validate_structure(s);
  return s;
}

ComplexStructure make_twisted_jprime(int n) {
  if (n < 1) throw std::invalid_argument("make_twisted_jprime: n must be >= 1");
  const int half = n + 1;
  const int l = 2 * half;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(l, l);
  t.topRightCorner(half, half) = Eigen::MatrixXd::Identity(half, half);
  t.bottomLeftCorner(half, half) = -Eigen::MatrixXd::Identity(half, half);

  ComplexStructure s;
  s.label = StructureLabel::Twisted;
  s.matrix = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  s.matrix.topLeftCorner(l, l) = t;
  s.matrix.bottomRightCorner(l, l) = t;
  s.block_transform = std::move(t);
  validate_structure(s);
  return s;
}

Eigen::VectorXd s1_orbit(const ComplexStructure& structure, double theta,
                         const Eigen::VectorXd& z) {
  if (z.size() != structure.ambient_dim())
    throw std::invalid_argument("s1_orbit: dimension mismatch");
  return std::cos(theta) * z + std::sin(theta) * (structure.matrix * z);
}

double s1_invariance_max_deviation(const CliffordSystem& system, const ComplexStructure& structure,
                                   const std::vector<Eigen::VectorXd>& samples, int n_theta) {
  if (structure.ambient_dim() != system.ambient_dim())
    throw std::invalid_argument("s1_invariance_max_deviation: dimension mismatch");
  double worst = 0.0;
  for (const auto& z : samples) {
    check_unit(z, "s1_invariance_max_deviation");
    const double f0 = system.eval_F(z);
    for (int k = 0; k < n_theta; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / n_theta;
      worst = std::max(worst, std::abs(system.eval_F(s1_orbit(structure, theta, z)) - f0));
    }
  }
  return worst;
}

double omega_f(const CliffordSystem& system, const ComplexStructure& structure,
               const Eigen::VectorXd& z) {
  if (structure.ambient_dim() != system.ambient_dim() || z.size() != system.ambient_dim())
    throw std::invalid_argument("omega_f: dimension mismatch");
  check_unit(z, "omega_f");

  const Eigen::VectorXd grad = system.grad_F(z);
  const Eigen::MatrixXd hess = system.hess_F(z);
  const Eigen::MatrixXd& j = structure.matrix;
  // Applied literally as written: J enters twice without transposes, so this
  // is not the quadratic form of (J grad).
  const double omega = grad.dot(j * (hess * (j * grad)));

  if (structure.label == StructureLabel::Twisted && system.m() == 1) {
    const int l = system.l();
    const double f = system.eval_F(z);
    const double q0 = z.dot(system.clifford_matrices()[0] * z);
    const double q1 = z.dot(system.clifford_matrices()[1] * z);
    const Eigen::VectorXd x = z.head(l);
    const Eigen::VectorXd ty = (*structure.block_transform) * z.tail(l);
    const double xty = x.dot(ty);
    const double closed =
        64.0 * (2.0 * f * f - f - 2.0 + 64.0 * (q0 * q0 + q1 * q1) * xty * xty);
    if (std::abs(omega - closed) > 1e-6 * std::max(1.0, std::abs(closed)))
      throw std::logic_error("omega_f: matrix expression and closed form disagree (" +
                             std::to_string(omega) + " vs " + std::to_string(closed) + ")");
  }
  return omega;
}

double alpha_invariant(const CliffordSystem& system, const ComplexStructure& structure,
                       const Eigen::VectorXd& z, int g_degree) {
  if (g_degree < 1) throw std::invalid_argument("alpha_invariant: g_degree must be positive");
  const double f = system.eval_F(z);
  if (std::abs(f) >= 1.0 - 1e-6)
    throw std::domain_error("alpha_invariant: |F(z)| = " + std::to_string(std::abs(f)) +
                            " too close to the focal levels");
  const double omega = omega_f(system, structure, z);
  const double g3 = static_cast<double>(g_degree) * g_degree * g_degree;
  return (g3 * f * (3.0 - 2.0 * f * f) + omega) / (g3 * std::pow(1.0 - f * f, 1.5));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> twisted_anchor_points(int n) {
  if (n < 1) throw std::invalid_argument("twisted_anchor_points: n must be >= 1");
  const int l = 2 * n + 2;
  const double a = std::sqrt(0.5 + 0.5 / std::sqrt(2.0));
  const double b = std::sqrt(0.5 - 0.5 / std::sqrt(2.0));
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * l);
  z[0] = a;
  z[l + n + 1] = b;  // y_{n+2}
  Eigen::VectorXd zhat = Eigen::VectorXd::Zero(2 * l);
  zhat[0] = a;
  zhat[l + 1] = b;  // y_2
  return {z, zhat};
}

AlphaStats homogeneity_probe(const CliffordSystem& system, const ComplexStructure& structure,
                             double level, int count, std::uint64_t seed, int g_degree) {
  if (count < 1) throw std::invalid_argument("homogeneity_probe: count must be >= 1");
  std::vector<Eigen::VectorXd> points = sample_level(system, level, count, seed);
  if (system.m() == 1 && system.l() % 2 == 0 && system.l() >= 4 && std::abs(level) < 1e-12) {
    const auto [z, zhat] = twisted_anchor_points(system.l() / 2 - 1);
    points.push_back(z);
    points.push_back(zhat);
  }

  AlphaStats stats;
  stats.count = static_cast<int>(points.size());
  std::vector<double> values;
  values.reserve(points.size());
  for (const auto& z : points) values.push_back(alpha_invariant(system, structure, z, g_degree));
  stats.min = *std::min_element(values.begin(), values.end());
  stats.max = *std::max_element(values.begin(), values.end());
  for (double v : values) stats.mean += v / values.size();
  double var = 0.0;
  for (double v : values) var += (v - stats.mean) * (v - stats.mean) / values.size();
  stats.stddev = std::sqrt(var);
  stats.constant_verdict = stats.stddev < 1e-6 * std::max(1.0, std::abs(stats.mean));
  return stats;
}

Eigen::VectorXd phi_map(double phi, const Eigen::VectorXd& w) {
  check_unit(w, "phi_map");
  const Eigen::Index l = w.size();
  Eigen::VectorXd out(2 * l);
  out.head(l) = std::cos(phi) * w;
  out.tail(l) = std::sin(phi) * w;
  return out;
}

PhiCoveringReport phi_two_to_one_check(int l, int count, std::uint64_t seed) {
  if (l < 2 || count < 2) throw std::invalid_argument("phi_two_to_one_check: bad parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  PhiCoveringReport rep;
  rep.min_distinct_distance = std::numeric_limits<double>::infinity();

  std::vector<std::pair<double, Eigen::VectorXd>> params;
  for (int i = 0; i < count; ++i) params.emplace_back(angle(rng), random_unit(l, rng));

  for (const auto& [phi, w] : params) {
    const Eigen::VectorXd p = phi_map(phi, w);
    const Eigen::VectorXd deck = phi_map(phi + std::numbers::pi, -w);
    rep.max_identity_deviation =
        std::max(rep.max_identity_deviation, (p - deck).cwiseAbs().maxCoeff());
  }
  for (size_t i = 0; i < params.size(); ++i) {
    for (size_t k = i + 1; k < params.size(); ++k) {
      const double dist =
          (phi_map(params[i].first, params[i].second) - phi_map(params[k].first, params[k].second))
              .norm();
      rep.min_distinct_distance = std::min(rep.min_distinct_distance, dist);
    }
  }
  rep.pass = rep.max_identity_deviation < 1e-13 && rep.min_distinct_distance > 1e-6;
  return rep;
}

PhiIsometryReport phi_isometry_check(int l, int count, std::uint64_t seed) {
  if (l < 2 || count < 1) throw std::invalid_argument("phi_isometry_check: bad parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  PhiIsometryReport rep;
  for (int i = 0; i < count; ++i) {
    const double phi = angle(rng);
    const Eigen::VectorXd w = random_unit(l, rng);

    // Orthonormal tangent frame upstairs: the circle direction and an
    // orthonormal basis of w^perp; its image under the differential of Phi.
    Eigen::MatrixXd wcol(l, 1);
    wcol.col(0) = w;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(wcol);
    const Eigen::MatrixXd perp = Eigen::MatrixXd(qr.householderQ()).rightCols(l - 1);

    Eigen::MatrixXd dphi(2 * l, l);
    dphi.col(0).head(l) = -std::sin(phi) * w;
    dphi.col(0).tail(l) = std::cos(phi) * w;
    for (int k = 0; k < l - 1; ++k) {
      dphi.col(1 + k).head(l) = std::cos(phi) * perp.col(k);
      dphi.col(1 + k).tail(l) = std::sin(phi) * perp.col(k);
    }
    Eigen::MatrixXd gram = dphi.transpose() * dphi;
    gram.diagonal().array() -= 1.0;
    rep.max_metric_deviation = std::max(rep.max_metric_deviation, gram.cwiseAbs().maxCoeff());
  }
  rep.pass = rep.max_metric_deviation < 1e-10;
  return rep;
}

ActionIdentityReport s1_action_on_mminus_check(const ComplexStructure& structure, int n_theta,
                                               int n_phi, const std::vector<Eigen::VectorXd>& ws) {
  if (n_theta < 1 || n_phi < 1 || ws.empty())
    throw std::invalid_argument("s1_action_on_mminus_check: empty grid");
  const int l = structure.ambient_dim() / 2;
  ActionIdentityReport rep;
  for (const auto& w : ws) {
    if (w.size() != l)
      throw std::invalid_argument("s1_action_on_mminus_check: fiber vector dimension mismatch");
    check_unit(w, "s1_action_on_mminus_check");
    for (int a = 0; a < n_theta; ++a) {
      const double theta = 2.0 * std::numbers::pi * a / n_theta;
      for (int b = 0; b < n_phi; ++b) {
        const double phi = 2.0 * std::numbers::pi * b / n_phi;
        const Eigen::VectorXd lhs = s1_orbit(structure, theta, phi_map(phi, w));
        Eigen::VectorXd rhs;
        if (structure.label == StructureLabel::Standard) {
          rhs = phi_map(phi - theta, w);
        } else {
          const Eigen::VectorXd fiber =
              std::cos(theta) * w + std::sin(theta) * ((*structure.block_transform) * w);
          rhs = phi_map(phi, fiber);
        }
        rep.max_deviation = std::max(rep.max_deviation, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
  }
  rep.pass = rep.max_deviation < 1e-12;
  return rep;
}

ThorbergssonReport thorbergsson_check(const AmbientSpace& space, int g, int m1, int m2) {
  if (space.rank() != 1)
    throw std::invalid_argument("thorbergsson_check: only rank-one spaces are supported");
  if (g < 1 || m1 < 1 || m2 < 1)
    throw std::invalid_argument("thorbergsson_check: g, m1, m2 must be positive");

  ThorbergssonReport rep;
  switch (space.kind()) {
    case SpaceKind::Sphere:
      rep.required_product = 2L * (space.dim() - 1);
      break;
    case SpaceKind::ComplexProjective:
      rep.required_product = space.dim();  // 2n with n the complex dimension
      break;
    case SpaceKind::QuaternionProjective:
      rep.required_product = space.dim() + 2;  // 4n + 2 with n the quaternionic dimension
      break;
    case SpaceKind::CayleyPlane:
      rep.required_product = 22;
      break;
    default:
      throw std::invalid_argument("thorbergsson_check: unsupported space kind");
  }
  rep.actual_product = static_cast<long>(g) * (m1 + m2);
  rep.pass = rep.actual_product == rep.required_product;
  rep.focal_distance = std::numbers::pi / g;
  rep.distance_lower_bound = std::numbers::pi / (rep.required_product / 2.0);
  return rep;
}

}  // namespace equifocal
