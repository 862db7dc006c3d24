#include "equifocal/otfkm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"

namespace equifocal {

namespace {

// --- Cayley-Dickson algebras -------------------------------------------------
// Elements of the 2^p-dimensional algebra (R, C, H, O, ...) as coefficient
// vectors; used to generate the left-multiplication matrices of imaginary
// units, which realize the skew Clifford generators in dimensions up to 8.

Eigen::VectorXd cd_conj(const Eigen::VectorXd& a) {
  Eigen::VectorXd c = -a;
  c[0] = a[0];
  return c;
}

Eigen::VectorXd cd_mul(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size();
  if (n == 1) return a * b[0];
  const Eigen::Index h = n / 2;
  const Eigen::VectorXd a1 = a.head(h), a2 = a.tail(h);
  const Eigen::VectorXd b1 = b.head(h), b2 = b.tail(h);
  Eigen::VectorXd out(n);
  out.head(h) = cd_mul(a1, b1) - cd_mul(cd_conj(b2), a2);
  out.tail(h) = cd_mul(b2, a1) + cd_mul(a2, cd_conj(b1));
  return out;
}

// Matrix of x -> e_u * x on the 2^p-dimensional algebra.
Eigen::MatrixXd cd_left_mult(int dim, int u) {
  Eigen::MatrixXd m(dim, dim);
  Eigen::VectorXd eu = Eigen::VectorXd::Zero(dim);
  eu[u] = 1.0;
  for (int j = 0; j < dim; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(dim);
    ej[j] = 1.0;
    m.col(j) = cd_mul(eu, ej);
  }
  return m;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// k pairwise anticommuting skew complex structures on R^{delta(k)}.
std::vector<Eigen::MatrixXd> clifford_skew_generators(int k) {
  if (k < 0) throw std::invalid_argument("clifford_skew_generators: k must be >= 0");
  if (k == 0) return {};
  if (k <= 3) {
    const int dim = (k == 1) ? 2 : 4;
    std::vector<Eigen::MatrixXd> gens;
    for (int u = 1; u <= k; ++u) gens.push_back(cd_left_mult(dim, u));
    return gens;
  }
  if (k <= 7) {
    std::vector<Eigen::MatrixXd> gens;
    for (int u = 1; u <= k; ++u) gens.push_back(cd_left_mult(8, u));
    return gens;
  }
  // Periodicity step: generators on R^{16 N} from generators on R^N and the
  // eight-generator system on R^16.
  std::vector<Eigen::MatrixXd> p;  // Cl_8 generators on R^16
  for (int u = 1; u <= 7; ++u) {
    const Eigen::MatrixXd o = cd_left_mult(8, u);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(16, 16);
    m.topRightCorner(8, 8) = o;
    m.bottomLeftCorner(8, 8) = o;
    p.push_back(m);
  }
  {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(16, 16);
    m.topRightCorner(8, 8) = -Eigen::MatrixXd::Identity(8, 8);
    m.bottomLeftCorner(8, 8) = Eigen::MatrixXd::Identity(8, 8);
    p.push_back(m);
  }
  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(16, 16);
  for (const auto& pb : p) omega = omega * pb;  // symmetric, squares to +I

  const std::vector<Eigen::MatrixXd> lower = clifford_skew_generators(k - 8);
  const Eigen::Index n = lower.empty() ? 1 : lower.front().rows();
  const Eigen::MatrixXd id_n = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& f : lower) gens.push_back(kron(f, omega));
  for (const auto& pb : p) gens.push_back(kron(id_n, pb));
  return gens;
}

void verify_anticommutation(const std::vector<Eigen::MatrixXd>& mats, double target_square,
                            const char* label) {
  const Eigen::Index n = mats.empty() ? 0 : mats.front().rows();
  for (size_t i = 0; i < mats.size(); ++i) {
    for (size_t j = i; j < mats.size(); ++j) {
      Eigen::MatrixXd sum = mats[i] * mats[j] + mats[j] * mats[i];
      if (i == j) sum.diagonal().array() -= 2.0 * target_square;
      if (sum.cwiseAbs().maxCoeff() >= 1e-12)
        throw std::logic_error(std::string(label) + ": anticommutation relation violated at (" +
                               std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  (void)n;
}

RootSpectrum ambient_sphere_spectrum(int tangent_dim) {
  return RootSpectrum({{1.0, tangent_dim}}, 0);
}

}  // namespace

long clifford_module_dimension(int k) {
  if (k < 0) throw std::invalid_argument("clifford_module_dimension: k must be >= 0");
  static const long table[8] = {1, 2, 4, 4, 8, 8, 8, 8};
  long scale = 1;
  while (k >= 8) {
    scale *= 16;
    k -= 8;
  }
  return scale * table[k];
}

CliffordSystem CliffordSystem::build(int m, int l) {
  if (m < 1) throw std::invalid_argument("CliffordSystem::build: m must be >= 1");
  if (l < 1) throw std::invalid_argument("CliffordSystem::build: l must be >= 1");
  const long delta = clifford_module_dimension(m - 1);
  if (l % delta != 0) {
    std::ostringstream os;
    os << "CliffordSystem::build: inadmissible (m, l) = (" << m << ", " << l << "); l must be a"
       << " multiple of the Clifford module dimension delta(m - 1) = " << delta;
    throw std::invalid_argument(os.str());
  }

  CliffordSystem sys;
  sys.m_ = m;
  sys.l_ = l;
  const long copies = l / delta;
  const Eigen::MatrixXd id_q = Eigen::MatrixXd::Identity(copies, copies);
  for (const auto& gen : clifford_skew_generators(m - 1)) sys.e_.push_back(kron(id_q, gen));

  const Eigen::MatrixXd id_l = Eigen::MatrixXd::Identity(l, l);
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  a0.topLeftCorner(l, l) = id_l;
  a0.bottomRightCorner(l, l) = -id_l;
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  a1.topRightCorner(l, l) = id_l;
  a1.bottomLeftCorner(l, l) = id_l;
  sys.a_.push_back(std::move(a0));
  sys.a_.push_back(std::move(a1));
  for (const auto& e : sys.e_) {
    Eigen::MatrixXd aj = Eigen::MatrixXd::Zero(2 * l, 2 * l);
    aj.topRightCorner(l, l) = -e;
    aj.bottomLeftCorner(l, l) = e;
    sys.a_.push_back(std::move(aj));
  }

  verify_anticommutation(sys.a_, 1.0, "CliffordSystem");
  verify_anticommutation(sys.e_, -1.0, "CliffordSystem skew generators");
  return sys;
}

double CliffordSystem::eval_F(const Eigen::VectorXd& z) const {
  if (z.size() != ambient_dim())
    throw std::invalid_argument("CliffordSystem::eval_F: dimension mismatch");
  const double zz = z.squaredNorm();
  double sum = 0.0;
  for (const auto& a : a_) {
    const double q = z.dot(a * z);
    sum += q * q;
  }
  return zz * zz - 2.0 * sum;
}

Eigen::VectorXd CliffordSystem::grad_F(const Eigen::VectorXd& z) const {
  if (z.size() != ambient_dim())
    throw std::invalid_argument("CliffordSystem::grad_F: dimension mismatch");
  Eigen::VectorXd g = 4.0 * z.squaredNorm() * z;
  for (const auto& a : a_) {
    const Eigen::VectorXd az = a * z;
    g -= 8.0 * z.dot(az) * az;
  }
  return g;
}

Eigen::MatrixXd CliffordSystem::hess_F(const Eigen::VectorXd& z) const {
  if (z.size() != ambient_dim())
    throw std::invalid_argument("CliffordSystem::hess_F: dimension mismatch");
  const Eigen::Index n = z.size();
  Eigen::MatrixXd h = 8.0 * z * z.transpose();
  h.diagonal().array() += 4.0 * z.squaredNorm();
  for (const auto& a : a_) {
    const Eigen::VectorXd az = a * z;
    h.noalias() -= 16.0 * az * az.transpose();
    h.noalias() -= 8.0 * z.dot(az) * a;
  }
  (void)n;
  return h;
}

std::vector<Eigen::VectorXd> sample_level(const CliffordSystem& system, double c, int count,
                                          std::uint64_t seed) {
  if (!(std::abs(c) < 1.0))
    throw std::invalid_argument(
        "sample_level: level must lie in (-1, 1); the focal levels +-1 are measure-zero targets");
  if (count < 1) throw std::invalid_argument("sample_level: count must be >= 1");

  const int dim = system.ambient_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> starts(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd z(dim);
    for (int j = 0; j < dim; ++j) z[j] = gauss(rng);
    starts[i] = z.normalized();
  }

  constexpr double kConvergeTol = 1e-10;
  constexpr int kMaxOuter = 200;
  constexpr int kBracketGrid = 128;

  std::vector<Eigen::VectorXd> out(count);
  detail::parallel_for(count, [&](int i) {
    Eigen::VectorXd z = starts[i];
    for (int outer = 0; outer < kMaxOuter; ++outer) {
      const double f = system.eval_F(z);
      if (std::abs(f - c) < kConvergeTol) {
        out[i] = z;
        return;
      }
      Eigen::VectorXd grad = system.grad_F(z);
      grad -= grad.dot(z) * z;
      const double gn = grad.norm();
      if (gn < 1e-12)
        throw std::runtime_error("sample_level: stalled at a spherical critical point (sample " +
                                 std::to_string(i) + ", F = " + std::to_string(f) + ")");
      const Eigen::VectorXd u = (c > f ? 1.0 : -1.0) * grad / gn;

      // F along the great circle through z in direction u; the first bracket
      // of F = c is refined by bisection, otherwise move to the best point.
      auto value_at = [&](double s) {
        return system.eval_F(std::cos(s) * z + std::sin(s) * u) - c;
      };
      double prev_s = 0.0, prev_h = f - c;
      double best_s = 0.0, best_h = std::abs(prev_h);
      double bracket_lo = -1.0, bracket_hi = -1.0, bracket_flo = 0.0;
      for (int j = 1; j <= kBracketGrid; ++j) {
        const double s = std::numbers::pi * j / kBracketGrid;
        const double h = value_at(s);
        if (std::abs(h) < best_h) {
          best_h = std::abs(h);
          best_s = s;
        }
        if ((h > 0.0) != (prev_h > 0.0) || h == 0.0) {
          bracket_lo = prev_s;
          bracket_hi = s;
          bracket_flo = prev_h;
          break;
        }
        prev_s = s;
        prev_h = h;
      }
      double s_star;
      if (bracket_hi > 0.0) {
        double a = bracket_lo, b = bracket_hi, fa = bracket_flo;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = value_at(mid);
          if (std::abs(fm) < 1e-13 || b - a < 1e-16) break;
          if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        s_star = 0.5 * (a + b);
      } else if (best_s > 0.0 && best_h < std::abs(f - c)) {
        s_star = best_s;
      } else {
        throw std::runtime_error("sample_level: no progress along the gradient circle (sample " +
                                 std::to_string(i) + ", F = " + std::to_string(f) +
                                 ", target = " + std::to_string(c) + ")");
      }
      z = (std::cos(s_star) * z + std::sin(s_star) * u).normalized();
    }
    throw std::runtime_error("sample_level: sample " + std::to_string(i) +
                             " did not converge to |F - c| < 1e-10 after " +
                             std::to_string(kMaxOuter) + " iterations");
  });
  return out;
}

HypersurfaceSample shape_operator_at(const CliffordSystem& system, const Eigen::VectorXd& z) {
  if (z.size() != system.ambient_dim())
    throw std::invalid_argument("shape_operator_at: dimension mismatch");
  if (std::abs(z.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("shape_operator_at: z must be a unit vector");

  const double f = system.eval_F(z);
  const Eigen::VectorXd grad = system.grad_F(z);
  Eigen::VectorXd g_sphere = grad - grad.dot(z) * z;
  const double gn = g_sphere.norm();
  if (gn < 1e-8)
    throw std::runtime_error(
        "shape_operator_at: spherical gradient below 1e-8 (focal or critical point, F = " +
        std::to_string(f) + ")");
  const Eigen::VectorXd normal = g_sphere / gn;

  const int dim = system.ambient_dim();
  // Level-set Weingarten map inside the sphere, restricted to {z, normal}^perp;
  // the normal points toward increasing F.
  Eigen::MatrixXd s_full = -(system.hess_F(z) - grad.dot(z) * Eigen::MatrixXd::Identity(dim, dim)) / gn;

  Eigen::MatrixXd span(dim, 2);
  span.col(0) = z;
  span.col(1) = normal;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd basis = q.rightCols(dim - 2);

  Eigen::MatrixXd a_t = basis.transpose() * s_full * basis;
  a_t = 0.5 * (a_t + a_t.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_t);
  std::vector<double> eigs(eig.eigenvalues().data(), eig.eigenvalues().data() + dim - 2);
  std::sort(eigs.begin(), eigs.end(), std::greater<double>());

  std::vector<std::pair<double, int>> clusters;
  constexpr double kClusterGap = 1e-6;
  double prev = std::numeric_limits<double>::infinity();
  for (double v : eigs) {
    if (!clusters.empty() && prev - v <= kClusterGap) {
      clusters.back().first += v;
      clusters.back().second += 1;
    } else {
      clusters.emplace_back(v, 1);
    }
    prev = v;
  }
  for (auto& [sum, mult] : clusters) sum /= mult;

  return HypersurfaceSample{
      z, f, normal,
      ShapeOperator(std::move(a_t), ambient_sphere_spectrum(dim - 2).frame_tag()),
      std::move(clusters)};
}

FocalMembership focal_membership(const CliffordSystem& system, const Eigen::VectorXd& z) {
  if (z.size() != system.ambient_dim())
    throw std::invalid_argument("focal_membership: dimension mismatch");
  if (std::abs(z.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("focal_membership: z must be a unit vector");

  constexpr double kTol = 1e-9;
  const double f = system.eval_F(z);
  bool plus = false, minus = false;
  if (system.m() == 1) {
    const int l = system.l();
    const Eigen::VectorXd x = z.head(l), y = z.tail(l);
    const double xx = x.squaredNorm(), yy = y.squaredNorm(), xy = x.dot(y);
    plus = std::abs(xx - 0.5) <= kTol && std::abs(yy - 0.5) <= kTol && std::abs(xy) <= kTol;
    minus = !plus && std::abs(xx * yy - xy * xy) <= kTol;
  } else {
    double sum = 0.0, max_abs = 0.0;
    for (const auto& a : system.clifford_matrices()) {
      const double q = z.dot(a * z);
      sum += q * q;
      max_abs = std::max(max_abs, std::abs(q));
    }
    plus = max_abs <= kTol;
    minus = !plus && std::abs(sum - 1.0) <= kTol;
  }
  if (plus && std::abs(f - 1.0) > 1e-8)
    throw std::logic_error("focal_membership: algebraic M+ test contradicts F(z)");
  if (minus && std::abs(f + 1.0) > 1e-8)
    throw std::logic_error("focal_membership: algebraic M- test contradicts F(z)");
  if (plus) return FocalMembership::MPlus;
  if (minus) return FocalMembership::MMinus;
  return FocalMembership::Neither;
}

}  // namespace equifocal
