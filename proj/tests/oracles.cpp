#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace oracle {

namespace {

Eigen::VectorXd random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  return v.normalized();
}

// --- Cayley-Dickson arithmetic (independent copy for oracle use) -------------

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

}  // namespace

Rk4Trajectory rk4_jacobi(const Eigen::VectorXd& freqs, const Eigen::VectorXd& y0,
                         const Eigen::VectorXd& v0, double t_end, int steps) {
  const Eigen::VectorXd r = freqs.array().square();
  const double h = t_end / steps;
  Rk4Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.positions.reserve(steps + 1);
  traj.velocities.reserve(steps + 1);

  Eigen::VectorXd y = y0, v = v0;
  traj.times.push_back(0.0);
  traj.positions.push_back(y);
  traj.velocities.push_back(v);
  auto accel = [&](const Eigen::VectorXd& pos) { return (-r.array() * pos.array()).matrix(); };
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd k1y = v, k1v = accel(y);
    const Eigen::VectorXd k2y = v + 0.5 * h * k1v, k2v = accel(y + 0.5 * h * k1y);
    const Eigen::VectorXd k3y = v + 0.5 * h * k2v, k3v = accel(y + 0.5 * h * k2y);
    const Eigen::VectorXd k4y = v + h * k3v, k4v = accel(y + h * k3y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    traj.times.push_back((k + 1) * h);
    traj.positions.push_back(y);
    traj.velocities.push_back(v);
  }
  return traj;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& z, double h) {
  Eigen::VectorXd g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Eigen::VectorXd zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    g[i] = (f(zp) - f(zm)) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& z, double h) {
  const Eigen::VectorXd f0 = f(z);
  Eigen::MatrixXd j(f0.size(), z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Eigen::VectorXd zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    j.col(i) = (f(zp) - f(zm)) / (2.0 * h);
  }
  return j;
}

std::vector<std::pair<double, int>> sphere_jacobi_spectrum(int hypersurface_dim,
                                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int ambient = hypersurface_dim + 1;
  const Eigen::VectorXd a = random_unit(ambient, rng);

  // Orthonormal basis of a-perp from a QR completion.
  Eigen::MatrixXd acol(ambient, 1);
  acol.col(0) = a;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(acol);
  const Eigen::MatrixXd basis = Eigen::MatrixXd(qr.householderQ()).rightCols(ambient - 1);

  Eigen::MatrixXd r(hypersurface_dim, hypersurface_dim);
  for (int i = 0; i < hypersurface_dim; ++i) {
    const Eigen::VectorXd x = basis.col(i);
    const Eigen::VectorXd rx = x - x.dot(a) * a;  // R(x, a)a for curvature one
    for (int j = 0; j < hypersurface_dim; ++j) r(j, i) = basis.col(j).dot(rx);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (r + r.transpose()));

  std::vector<double> ds;
  for (int i = 0; i < hypersurface_dim; ++i) ds.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()[i])));
  std::sort(ds.begin(), ds.end(), std::greater<double>());
  std::vector<std::pair<double, int>> out;
  for (double d : ds) {
    if (!out.empty() && out.back().first - d < 1e-8)
      out.back().second += 1;
    else
      out.emplace_back(d, 1);
  }
  return out;
}

namespace {

// --- Projector-embedding conjugate-point oracle -------------------------------
//
// Points of the projective space over C or H are rank-one projectors
// P = z z^*; geodesics are projections of horizontal great circles of the
// unit sphere upstairs. Jacobi fields vanishing at t = 0 are realized as
// finite-difference derivatives of one-parameter families of such geodesics,
// and the conjugate points are the parameters where the family matrix loses
// rank.

struct AlgebraVectors {
  int alg_dim;   // 2 for C, 4 for H
  int slots;     // n + 1
  int real_dim;  // slots * alg_dim

  Eigen::VectorXd slot(const Eigen::VectorXd& z, int a) const {
    return z.segment(a * alg_dim, alg_dim);
  }

  // z^* w, an algebra element.
  Eigen::VectorXd hermitian_inner(const Eigen::VectorXd& z, const Eigen::VectorXd& w) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(alg_dim);
    for (int a = 0; a < slots; ++a) acc += cd_mul(cd_conj(slot(z, a)), slot(w, a));
    return acc;
  }

  // Flattened projector z z^*.
  Eigen::VectorXd projector(const Eigen::VectorXd& z) const {
    Eigen::VectorXd out(slots * slots * alg_dim);
    int at = 0;
    for (int a = 0; a < slots; ++a)
      for (int b = 0; b < slots; ++b) {
        out.segment(at, alg_dim) = cd_mul(slot(z, a), cd_conj(slot(z, b)));
        at += alg_dim;
      }
    return out;
  }

  // Orthonormal basis of the joint null space of linear constraints given as
  // rows of `constraints`.
  Eigen::MatrixXd null_basis(const Eigen::MatrixXd& constraints) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
    const double tol = 1e-10 * svd.singularValues().maxCoeff();
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > tol) ++rank;
    return svd.matrixV().rightCols(constraints.cols() - rank);
  }

  // Rows expressing the algebra-valued equation z^* v = 0 in v.
  Eigen::MatrixXd horizontality_rows(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd rows(alg_dim, real_dim);
    for (int j = 0; j < real_dim; ++j) {
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(real_dim);
      ej[j] = 1.0;
      rows.col(j) = hermitian_inner(z, ej);
    }
    return rows;
  }
};

}  // namespace

std::vector<std::pair<double, int>> projective_conjugate_spectrum(char algebra, int n,
                                                                  std::uint64_t seed) {
  AlgebraVectors alg;
  alg.alg_dim = (algebra == 'C') ? 2 : 4;
  if (algebra != 'C' && algebra != 'H')
    throw std::invalid_argument("projective_conjugate_spectrum: algebra must be 'C' or 'H'");
  alg.slots = n + 1;
  alg.real_dim = alg.slots * alg.alg_dim;

  std::mt19937_64 rng(seed);
  const Eigen::VectorXd z = random_unit(alg.real_dim, rng);

  // Horizontal unit direction w and the variation space U = horizontal, w-perp.
  const Eigen::MatrixXd horizontal = alg.null_basis(alg.horizontality_rows(z));
  Eigen::VectorXd w = horizontal * random_unit(static_cast<int>(horizontal.cols()), rng);
  w.normalize();

  Eigen::MatrixXd constraints(alg.alg_dim + 1, alg.real_dim);
  constraints.topRows(alg.alg_dim) = alg.horizontality_rows(z);
  constraints.bottomRows(1) = w.transpose();
  const Eigen::MatrixXd u_basis = alg.null_basis(constraints);
  const int n_fields = static_cast<int>(u_basis.cols());

  // Family matrix: column i is the finite-difference Jacobi field from
  // rotating the initial direction toward u_i.
  const double h = 1e-5;
  auto family_matrix = [&](double t) {
    Eigen::MatrixXd m(alg.slots * alg.slots * alg.alg_dim, n_fields);
    for (int i = 0; i < n_fields; ++i) {
      const Eigen::VectorXd u = u_basis.col(i);
      const Eigen::VectorXd wp = std::cos(h) * w + std::sin(h) * u;
      const Eigen::VectorXd wm = std::cos(h) * w - std::sin(h) * u;
      const Eigen::VectorXd cp = std::cos(t) * z + std::sin(t) * wp;
      const Eigen::VectorXd cm = std::cos(t) * z + std::sin(t) * wm;
      m.col(i) = (alg.projector(cp) - alg.projector(cm)) / (2.0 * h);
    }
    return m;
  };
  auto sigma_min = [&](double t) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(family_matrix(t));
    return svd.singularValues().minCoeff();
  };

  const int grid = 800;
  const double t_hi = std::numbers::pi * 1.02;
  std::vector<double> ts(grid + 1), smin(grid + 1);
  double scale = 0.0;
  for (int k = 0; k <= grid; ++k) {
    ts[k] = 0.05 + (t_hi - 0.05) * k / grid;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(family_matrix(ts[k]));
    smin[k] = svd.singularValues().minCoeff();
    scale = std::max(scale, svd.singularValues().maxCoeff());
  }

  std::vector<std::pair<double, int>> found;  // (frequency, multiplicity)
  for (int k = 1; k < grid; ++k) {
    if (smin[k] > smin[k - 1] || smin[k] > smin[k + 1]) continue;
    if (smin[k] > 5e-2 * scale) continue;  // refinement plus the nullity test decide
    double a = ts[k - 1], b = ts[k + 1];
    for (int it = 0; it < 200 && b - a > 1e-11; ++it) {
      const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (sigma_min(m1) < sigma_min(m2))
        b = m2;
      else
        a = m1;
    }
    const double t_star = 0.5 * (a + b);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(family_matrix(t_star));
    int nullity = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] < 1e-6 * scale) ++nullity;
    if (nullity == 0) continue;

    int expected = 0;
    for (const auto& [d, m] : found)
      if (std::abs(std::sin(d * t_star)) < 1e-3) expected += m;
    const int excess = nullity - expected;
    if (excess > 0) found.emplace_back(std::numbers::pi / t_star, excess);
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  return found;
}

namespace {

// --- Jordan-algebra oracle ----------------------------------------------------
//
// Hermitian 3x3 matrices over C, H or O form a Jordan algebra under
// A o B = (AB + BA) / 2; the rank-one projectors with trace one form the
// projective plane. Curvature comes from the second fundamental form of that
// variety inside the flat trace-form metric via the Gauss equation.

struct JordanAlgebra {
  int alg_dim;                    // 2, 4 or 8
  int vec_dim() const { return 3 + 3 * alg_dim; }

  using Mat = std::array<std::array<Eigen::VectorXd, 3>, 3>;

  Mat from_vec(const Eigen::VectorXd& v) const {
    Mat m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = Eigen::VectorXd::Zero(alg_dim);
    for (int i = 0; i < 3; ++i) m[i][i][0] = v[i];
    int at = 3;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& p : pairs) {
      const Eigen::VectorXd x = v.segment(at, alg_dim);
      m[p[0]][p[1]] = x;
      m[p[1]][p[0]] = cd_conj(x);
      at += alg_dim;
    }
    return m;
  }

  Eigen::VectorXd to_vec(const Mat& m) const {
    Eigen::VectorXd v(vec_dim());
    for (int i = 0; i < 3; ++i) v[i] = m[i][i][0];
    int at = 3;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& p : pairs) {
      v.segment(at, alg_dim) = m[p[0]][p[1]];
      at += alg_dim;
    }
    return v;
  }

  Mat matmul(const Mat& a, const Mat& b) const {
    Mat c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        c[i][j] = Eigen::VectorXd::Zero(alg_dim);
        for (int t = 0; t < 3; ++t) c[i][j] += cd_mul(a[i][t], b[t][j]);
      }
    return c;
  }

  // Jordan product on coordinate vectors.
  Eigen::VectorXd jordan(const Eigen::VectorXd& av, const Eigen::VectorXd& bv) const {
    const Mat a = from_vec(av), b = from_vec(bv);
    const Mat ab = matmul(a, b), ba = matmul(b, a);
    Mat c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i][j] = 0.5 * (ab[i][j] + ba[i][j]);
    return to_vec(c);
  }

  // Trace form <A, B> = Re tr(A o B); positive definite on Hermitian matrices.
  double inner(const Eigen::VectorXd& av, const Eigen::VectorXd& bv) const {
    const Mat a = from_vec(av), b = from_vec(bv);
    double tr = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int t = 0; t < 3; ++t) tr += 0.5 * (cd_mul(a[i][t], b[t][i])[0] + cd_mul(b[i][t], a[t][i])[0]);
    return tr;
  }
};

}  // namespace

JordanSpectrum jordan_projective_plane_spectrum(char algebra, std::uint64_t seed) {
  JordanAlgebra ja;
  switch (algebra) {
    case 'C': ja.alg_dim = 2; break;
    case 'H': ja.alg_dim = 4; break;
    case 'O': ja.alg_dim = 8; break;
    default:
      throw std::invalid_argument("jordan_projective_plane_spectrum: algebra must be C, H or O");
  }
  const int dim = ja.vec_dim();

  // Base projector P = E_11.
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
  p[0] = 1.0;

  // The variety is the zero set of Phi(X) = X o X - X; its derivative at P is
  // D(H) = 2 P o H - H and the tangent space is ker D.
  Eigen::MatrixXd d_op(dim, dim);
  for (int j = 0; j < dim; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(dim);
    ej[j] = 1.0;
    d_op.col(j) = 2.0 * ja.jordan(p, ej) - ej;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d_op, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double tol = 1e-10 * svd.singularValues().maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  const Eigen::MatrixXd tangent = svd.matrixV().rightCols(dim - rank);
  const int t_dim = static_cast<int>(tangent.cols());
  if (t_dim != 2 * ja.alg_dim)
    throw std::logic_error("jordan oracle: unexpected tangent dimension " + std::to_string(t_dim));

  // The trace form is the Euclidean form in these coordinates up to the
  // doubled off-diagonal weight; re-orthonormalize the tangent basis in it.
  Eigen::MatrixXd gram(t_dim, t_dim);
  for (int i = 0; i < t_dim; ++i)
    for (int j = 0; j < t_dim; ++j) gram(i, j) = ja.inner(tangent.col(i), tangent.col(j));
  const Eigen::MatrixXd whiten = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram)
                                     .operatorInverseSqrt();
  const Eigen::MatrixXd on_basis = tangent * whiten;

  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> d_solver(d_op);
  auto second_form = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd rhs = -2.0 * ja.jordan(x, y);
    const Eigen::VectorXd nu = d_solver.solve(rhs);
    if ((d_op * nu - rhs).norm() > 1e-9)
      throw std::logic_error("jordan oracle: second-form solve left a residual");
    return nu;
  };

  std::mt19937_64 rng(seed);
  Eigen::VectorXd a = on_basis * random_unit(t_dim, rng);
  a /= std::sqrt(ja.inner(a, a));

  // Trace-orthonormal completion of a inside the tangent space.
  std::vector<Eigen::VectorXd> frame{a};
  for (int i = 0; i < t_dim && static_cast<int>(frame.size()) < t_dim; ++i) {
    Eigen::VectorXd v = on_basis.col(i);
    for (const auto& f : frame) v -= ja.inner(f, v) * f;
    const double nn = std::sqrt(std::max(0.0, ja.inner(v, v)));
    if (nn > 1e-8) frame.push_back(v / nn);
  }
  if (static_cast<int>(frame.size()) != t_dim)
    throw std::logic_error("jordan oracle: frame completion failed");

  const Eigen::VectorXd ii_aa = second_form(a, a);
  std::vector<Eigen::VectorXd> ii_ia(t_dim);
  for (int i = 1; i < t_dim; ++i) ii_ia[i] = second_form(frame[i], a);

  Eigen::MatrixXd jac(t_dim - 1, t_dim - 1);
  for (int i = 1; i < t_dim; ++i) {
    for (int j = i; j < t_dim; ++j) {
      const double value =
          ja.inner(second_form(frame[i], frame[j]), ii_aa) - ja.inner(ii_ia[i], ii_ia[j]);
      jac(i - 1, j - 1) = value;
      jac(j - 1, i - 1) = value;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  std::vector<double> vals(eig.eigenvalues().data(), eig.eigenvalues().data() + t_dim - 1);
  std::sort(vals.begin(), vals.end(), std::greater<double>());

  JordanSpectrum out;
  out.raw_ratio = vals.front() / vals.back();
  const double scale = 2.0 / std::sqrt(vals.front());
  std::vector<std::pair<double, int>> clusters;
  for (double v : vals) {
    const double d = scale * std::sqrt(std::max(0.0, v));
    if (!clusters.empty() && clusters.back().first - d < 1e-6)
      clusters.back().second += 1;
    else
      clusters.emplace_back(d, 1);
  }
  out.freqs = std::move(clusters);
  return out;
}

}  // namespace oracle
