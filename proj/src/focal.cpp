#include "equifocal/focal.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace equifocal {

ShapeOperator::ShapeOperator(Eigen::MatrixXd matrix, std::string frame_tag)
    : matrix_(std::move(matrix)), frame_tag_(std::move(frame_tag)) {
  if (matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("ShapeOperator: matrix must be square");
  if (matrix_.rows() < 1) throw std::invalid_argument("ShapeOperator: empty matrix");
  const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
  if (asym >= 1e-10)
    throw std::invalid_argument("ShapeOperator: matrix deviates from symmetry by " +
                                std::to_string(asym));
}

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

struct RootCandidate {
  double t = 0.0;
  int cell_lo = 0;
  int cell_hi = 0;
  bool sign_change = false;
};

double bisect_root(const std::function<double(double)>& f, double a, double b, double fa,
                   double tol) {
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (sign_of(fm) == sign_of(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double minimize_abs(const std::function<double(double)>& f, double a, double b, double tol) {
  for (int it = 0; it < 300 && b - a > tol; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (std::abs(f(m1)) < std::abs(f(m2)))
      b = m2;
    else
      a = m1;
  }
  return 0.5 * (a + b);
}

int nullity_at(const RootSpectrum& spectrum, const ShapeOperator& shape, double t,
               double null_tol) {
  const Eigen::MatrixXd e = endpoint_differential(spectrum, shape, t);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thresh = null_tol * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] < thresh) ++count;
  return count;
}

void check_scan_preconditions(const RootSpectrum& spectrum, const ShapeOperator& shape,
                              double t_max, const char* who) {
  if (!shape.bound_to(spectrum))
    throw std::invalid_argument(std::string(who) +
                                ": shape operator frame tag does not match the spectrum (got '" +
                                shape.frame_tag() + "', expected '" + spectrum.frame_tag() + "')");
  if (shape.dimension() != spectrum.tangent_dim())
    throw std::invalid_argument(std::string(who) + ": shape operator dimension mismatch");
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw std::invalid_argument(std::string(who) + ": t_max must be positive");
}

}  // namespace

FocalProfile focal_scan(const RootSpectrum& spectrum, const ShapeOperator& shape, double t_max,
                        const FocalScanOptions& opts) {
  check_scan_preconditions(spectrum, shape, t_max, "focal_scan");
  if (t_max > opts.circle_length * (1.0 + 1e-12))
    throw std::invalid_argument("focal_scan: t_max exceeds the circle length");

  const std::function<double(double)> det_at = [&](double t) {
    return endpoint_differential(spectrum, shape, t).determinant();
  };

  const double t_lo = opts.t_tol;  // t = 0 excluded: E(0) is the identity
  const double half_period = 0.5 * opts.circle_length;
  const int n_cells = std::max(
      64, static_cast<int>(std::ceil(opts.points_per_half_period * (t_max - t_lo) / half_period)));

  std::vector<double> ts(n_cells + 1), dets(n_cells + 1);
  for (int k = 0; k <= n_cells; ++k) {
    ts[k] = t_lo + (t_max - t_lo) * static_cast<double>(k) / n_cells;
    dets[k] = det_at(ts[k]);
  }

  std::vector<RootCandidate> cands;
  for (int k = 0; k <= n_cells; ++k) {
    if (dets[k] == 0.0) cands.push_back({ts[k], k, k, true});
  }
  for (int k = 0; k < n_cells; ++k) {
    if (sign_of(dets[k]) * sign_of(dets[k + 1]) < 0) {
      const double root = bisect_root(det_at, ts[k], ts[k + 1], dets[k], opts.t_tol);
      cands.push_back({root, k, k + 1, true});
    }
  }
  // Secondary sweep: tangential (even-order) zeros show up as local minima of
  // |det| without a sign change.
  for (int k = 1; k < n_cells; ++k) {
    const double a0 = std::abs(dets[k - 1]);
    const double a1 = std::abs(dets[k]);
    const double a2 = std::abs(dets[k + 1]);
    if (a1 > a0 || a1 > a2) continue;
    if (sign_of(dets[k - 1]) * sign_of(dets[k]) < 0) continue;
    if (sign_of(dets[k]) * sign_of(dets[k + 1]) < 0) continue;
    if (dets[k] == 0.0) continue;  // handled above
    const double tmin = minimize_abs(det_at, ts[k - 1], ts[k + 1], opts.t_tol);
    if (std::abs(det_at(tmin)) < opts.det_tol) cands.push_back({tmin, k - 1, k + 1, false});
  }

  std::sort(cands.begin(), cands.end(),
            [](const RootCandidate& a, const RootCandidate& b) { return a.t < b.t; });

  // Candidates whose source cells touch describe the same feature; keep the
  // sign-change representative when available.
  std::vector<RootCandidate> merged;
  for (const auto& c : cands) {
    if (!merged.empty() && c.cell_lo <= merged.back().cell_hi + 1 &&
        std::abs(c.t - merged.back().t) <= 8.0 * opts.t_tol) {
      if (!merged.back().sign_change && c.sign_change) merged.back() = c;
      merged.back().cell_hi = std::max(merged.back().cell_hi, c.cell_hi);
      continue;
    }
    merged.push_back(c);
  }
  for (size_t i = 1; i < merged.size(); ++i) {
    if (merged[i].t - merged[i - 1].t < 2.0 * opts.t_tol)
      throw std::runtime_error(
          "focal_scan: resolution error, two focal parameters closer than 2 * t_tol near t = " +
          std::to_string(merged[i].t) + "; rerun with a denser grid");
  }

  FocalProfile profile;
  profile.circle_length = opts.circle_length;
  for (const auto& c : merged) {
    const int mult = nullity_at(spectrum, shape, c.t, opts.null_tol);
    if (c.sign_change && mult == 0)
      throw std::runtime_error("focal_scan: determinant sign change at t = " +
                               std::to_string(c.t) + " without a detected nullity");
    if (mult == 0) continue;  // shallow |det| minimum, not a root
    profile.roots.push_back({c.t, mult});
  }
  return profile;
}

FocalProfile focal_scan_adapted(const RootSpectrum& spectrum, const ShapeOperator& shape,
                                double t_max, const FocalScanOptions& opts) {
  check_scan_preconditions(spectrum, shape, t_max, "focal_scan_adapted");
  const CurvatureAdaptedness chk = is_curvature_adapted(spectrum, shape);
  if (!chk.adapted)
    throw std::invalid_argument(
        "focal_scan_adapted: shape operator is not curvature-adapted (commutator residual " +
        std::to_string(chk.residual) + "); use focal_scan instead");

  const Eigen::MatrixXd& a = shape.matrix();
  std::vector<double> times;
  std::vector<int> counts;
  auto add_root = [&](double t) {
    if (t > opts.t_tol && t <= t_max + opts.t_tol) {
      times.push_back(std::min(t, t_max));
      counts.push_back(1);
    }
  };

  for (int i = 0; i < spectrum.num_entries(); ++i) {
    const double d = spectrum.entries()[i].frequency;
    const int m = spectrum.entries()[i].multiplicity;
    const int start = spectrum.block_start(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.block(start, start, m, m));
    for (Eigen::Index j = 0; j < m; ++j) {
      const double lambda = eig.eigenvalues()[j];
      const double base = std::atan2(1.0, lambda / d);  // arccot on (0, pi)
      for (int k = 0;; ++k) {
        const double t = (base + k * std::numbers::pi) / d;
        if (t > t_max + opts.t_tol) break;
        add_root(t);
      }
    }
  }
  if (spectrum.kernel_mult() > 0) {
    const int start = spectrum.block_start(spectrum.num_entries());
    const int m = spectrum.kernel_mult();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.block(start, start, m, m));
    for (Eigen::Index j = 0; j < m; ++j) {
      const double lambda = eig.eigenvalues()[j];
      if (lambda > 0.0) add_root(1.0 / lambda);  // the 1/t branch has no root otherwise
    }
  }

  std::vector<size_t> order(times.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return times[x] < times[y]; });

  const double cluster_tol = std::max(1e-9, 4.0 * opts.t_tol);
  FocalProfile profile;
  profile.circle_length = opts.circle_length;
  for (size_t idx : order) {
    if (!profile.roots.empty() && times[idx] - profile.roots.back().t <= cluster_tol) {
      profile.roots.back().multiplicity += counts[idx];
    } else {
      profile.roots.push_back({times[idx], counts[idx]});
    }
  }
  return profile;
}

double focal_det_cot_form(const RootSpectrum& spectrum, const ShapeOperator& shape, double t) {
  if (shape.dimension() != spectrum.tangent_dim())
    throw std::invalid_argument("focal_det_cot_form: dimension mismatch");
  if (t == 0.0) throw std::invalid_argument("focal_det_cot_form: t must be nonzero");
  const Eigen::VectorXd& d = spectrum.coordinate_frequencies();
  double prefactor = 1.0;
  Eigen::MatrixXd inner = -shape.matrix();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      const double s = std::sin(t * d[i]);
      prefactor *= s / d[i];
      inner(i, i) += d[i] * std::cos(t * d[i]) / s;
    } else {
      prefactor *= t;
      inner(i, i) += 1.0 / t;
    }
  }
  return prefactor * inner.determinant();
}

CurvatureAdaptedness is_curvature_adapted(const RootSpectrum& spectrum,
                                          const ShapeOperator& shape) {
  if (shape.dimension() != spectrum.tangent_dim())
    throw std::invalid_argument("is_curvature_adapted: dimension mismatch");
  const Eigen::VectorXd r = spectrum.coordinate_frequencies().array().square();
  const Eigen::MatrixXd& a = shape.matrix();
  const Eigen::MatrixXd comm = a * r.asDiagonal() - r.asDiagonal() * a;
  CurvatureAdaptedness out;
  out.residual = comm.cwiseAbs().maxCoeff();
  out.adapted = out.residual < 1e-8;
  return out;
}

CountBoundReport count_and_bound(const FocalProfile& profile, const RootSpectrum& spectrum) {
  CountBoundReport rep;
  rep.count = static_cast<int>(profile.roots.size());
  for (const auto& r : profile.roots) rep.weighted_count += r.multiplicity;
  const int s = spectrum.num_entries();
  const int n = spectrum.tangent_dim();
  rep.bound = (s + 1) * n;
  rep.pass = rep.count <= rep.bound;
  rep.sphere_like = (s == 1 && spectrum.kernel_mult() == 0);
  rep.sphere_bound = n;
  rep.sphere_pass = !rep.sphere_like || rep.count <= n;
  return rep;
}

EquifocalReport verify_equifocal(std::vector<FocalProfile>& profiles) {
  if (profiles.size() < 2)
    throw std::invalid_argument("verify_equifocal: need at least two sample profiles");
  EquifocalReport rep;
  const double l = profiles.front().circle_length;
  for (const auto& p : profiles)
    if (std::abs(p.circle_length - l) > 1e-12 * std::max(1.0, l))
      throw std::invalid_argument("verify_equifocal: profiles have different circle lengths");

  const size_t n_roots = profiles.front().roots.size();
  for (const auto& p : profiles) {
    if (p.roots.size() != n_roots) {
      rep.message = "focal point count differs across samples (" + std::to_string(n_roots) +
                    " vs " + std::to_string(p.roots.size()) + ")";
      return rep;
    }
  }
  if (n_roots == 0) {
    rep.message = "profiles contain no focal points";
    return rep;
  }

  rep.multiplicities_match = true;
  std::vector<double> mean_t(n_roots, 0.0);
  for (size_t j = 0; j < n_roots; ++j) {
    double lo = profiles.front().roots[j].t;
    double hi = lo;
    for (const auto& p : profiles) {
      lo = std::min(lo, p.roots[j].t);
      hi = std::max(hi, p.roots[j].t);
      mean_t[j] += p.roots[j].t / profiles.size();
      if (p.roots[j].multiplicity != profiles.front().roots[j].multiplicity)
        rep.multiplicities_match = false;
    }
    rep.max_root_deviation = std::max(rep.max_root_deviation, hi - lo);
  }
  if (rep.max_root_deviation >= 1e-6) {
    rep.message = "cross-sample focal parameter deviation " +
                  std::to_string(rep.max_root_deviation) + " exceeds 1e-6";
    return rep;
  }
  if (!rep.multiplicities_match) {
    rep.message = "multiplicity sequences differ across samples";
    return rep;
  }
  if (n_roots < 2) {
    rep.message = "only one focal point per circle; spacing pattern undetermined";
    return rep;
  }

  double spacing = 0.0;
  for (size_t j = 0; j + 1 < n_roots; ++j) spacing += (mean_t[j + 1] - mean_t[j]) / (n_roots - 1);
  for (size_t j = 0; j + 1 < n_roots; ++j) {
    if (std::abs(mean_t[j + 1] - mean_t[j] - spacing) > 1e-8) {
      rep.message = "focal parameters are not equally spaced";
      return rep;
    }
  }
  const double hp_real = l / spacing;
  const int hp = static_cast<int>(std::llround(hp_real));
  if (std::abs(hp_real - hp) > 1e-6 * std::max(1.0, hp_real) || hp < 2 || hp % 2 != 0) {
    rep.message = "spacing " + std::to_string(spacing) +
                  " does not divide the circle into an even number of half-periods";
    return rep;
  }
  const int m1 = profiles.front().roots[0].multiplicity;
  const int m2 = profiles.front().roots[1].multiplicity;
  for (size_t j = 0; j < n_roots; ++j) {
    if (profiles.front().roots[j].multiplicity != (j % 2 == 0 ? m1 : m2)) {
      rep.message = "multiplicities do not alternate between two values";
      return rep;
    }
  }
  if (mean_t[0] > spacing + 1e-8) {
    rep.message = "first focal parameter exceeds the detected spacing; a root may be missing";
    return rep;
  }

  rep.passed = true;
  rep.half_periods = hp;
  rep.g = hp / 2;
  rep.theta = mean_t[0];
  rep.m1 = m1;
  rep.m2 = m2;
  rep.spacing = spacing;
  rep.focal_distance = l / hp;
  rep.message = "equifocal pattern detected";
  for (auto& p : profiles) {
    p.g_half_periods = hp;
    p.theta = rep.theta;
    p.m1 = m1;
    p.m2 = m2;
  }
  return rep;
}

ConstancyReport principal_curvature_constancy(const std::vector<ShapeOperator>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("principal_curvature_constancy: need at least two samples");
  const int n = samples.front().dimension();
  for (const auto& s : samples)
    if (s.dimension() != n)
      throw std::invalid_argument("principal_curvature_constancy: dimension mismatch");

  std::vector<std::vector<double>> eigs;
  eigs.reserve(samples.size());
  for (const auto& s : samples) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.matrix());
    std::vector<double> v(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
    std::sort(v.begin(), v.end(), std::greater<double>());
    eigs.push_back(std::move(v));
  }
  ConstancyReport rep;
  rep.mean_eigenvalues.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double lo = eigs.front()[j], hi = lo;
    for (const auto& v : eigs) {
      lo = std::min(lo, v[j]);
      hi = std::max(hi, v[j]);
      rep.mean_eigenvalues[j] += v[j] / eigs.size();
    }
    rep.max_deviation = std::max(rep.max_deviation, hi - lo);
  }
  rep.constant = rep.max_deviation < 1e-6;
  return rep;
}

CutFocalReport cut_focal_check(const FocalProfile& profile, const ShapeOperator& shape) {
  if (profile.roots.empty())
    throw std::invalid_argument("cut_focal_check: profile has no focal points");
  CutFocalReport rep;
  rep.cut_focal_radius = profile.roots.front().t;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape.matrix());
  rep.kappa = eig.eigenvalues().maxCoeff();
  rep.product = rep.kappa * rep.cut_focal_radius;
  rep.pass = rep.product <= 1.0 + 1e-9;
  return rep;
}

}  // namespace equifocal
