#pragma once

#include <Eigen/Core>

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "equifocal/jacobi.hpp"
#include "equifocal/shape_operator.hpp"
#include "equifocal/symspace.hpp"

namespace equifocal {

/// One focal parameter along a normal circle with its nullity.
struct FocalRoot {
  double t = 0.0;
  int multiplicity = 0;
};

/// Focal parameters with multiplicities along one normal circle, sorted by t.
/// The half-period data (2g, theta) is filled by verify_equifocal when the
/// equally-spaced alternating pattern is detected.
struct FocalProfile {
  std::vector<FocalRoot> roots;
  double circle_length = 0.0;
  std::optional<int> g_half_periods;  // 2g
  std::optional<double> theta;        // first focal parameter
  std::optional<int> m1;
  std::optional<int> m2;
};

struct FocalScanOptions {
  int points_per_half_period = 4096;  // grid density over circle_length / 2
  double t_tol = 1e-12;               // bisection / refinement width
  double null_tol = 1e-7;             // singular values below null_tol * max(1, |E|) count
  double det_tol = 1e-10;             // |det| threshold for even-order (tangent) roots
  double circle_length = 2.0 * std::numbers::pi;
};

/// Scans det E(t) over (t_tol, t_max] for zeros of the end-point differential:
/// sign changes refined by bisection, even-order tangencies caught by a
/// secondary minimum sweep; multiplicities from the singular-value nullity of
/// E at the refined root. Throws a "resolution" error when two refined roots
/// are closer than 2 * t_tol, and a frame error when the shape operator is not
/// bound to the spectrum's adapted frame.
FocalProfile focal_scan(const RootSpectrum& spectrum, const ShapeOperator& shape,
                        double t_max, const FocalScanOptions& opts = {});

/// Closed-form focal enumeration for curvature-adapted shape operators: each
/// simultaneous eigenpair (d, lambda) contributes t = (arccot(lambda/d) + k*pi)/d,
/// kernel eigenvalues lambda > 0 contribute t = 1/lambda. Results match
/// focal_scan within t_tol. Throws if the operator is not curvature-adapted.
FocalProfile focal_scan_adapted(const RootSpectrum& spectrum, const ShapeOperator& shape,
                                double t_max, const FocalScanOptions& opts = {});

/// Validation form of det E(t): the factored product over the eigenblocks,
/// prod_i (sin(t d_i)/d_i)^{m_i} * t^{kernel} * det(diag(d_i cot(t d_i), 1/t) - A).
/// Has poles where t d_i hits a multiple of pi, so it serves as a cross-check
/// away from those, not as a scanning path.
double focal_det_cot_form(const RootSpectrum& spectrum, const ShapeOperator& shape, double t);

struct CurvatureAdaptedness {
  bool adapted = false;
  double residual = 0.0;  // max-norm of the commutator [A, R_a]
};

/// Commutator test of the shape operator against R_a = diag(d_i^2, 0) in the
/// adapted frame; adapted iff the residual is below 1e-8.
CurvatureAdaptedness is_curvature_adapted(const RootSpectrum& spectrum,
                                          const ShapeOperator& shape);

struct CountBoundReport {
  int count = 0;           // distinct focal parameters
  int weighted_count = 0;  // nullity-weighted count (reported for reference)
  int bound = 0;           // (s + 1) * n
  bool pass = false;
  bool sphere_like = false;  // single unit-frequency block, no kernel
  int sphere_bound = 0;      // n, applicable when sphere_like
  bool sphere_pass = true;
};

/// Checks the focal count over one normal-circle segment against the
/// (s + 1) * n bound; the profile must cover t in (0, pi / max frequency).
CountBoundReport count_and_bound(const FocalProfile& profile, const RootSpectrum& spectrum);

struct EquifocalReport {
  bool passed = false;
  std::string message;
  double max_root_deviation = 0.0;  // worst cross-sample focal parameter spread
  bool multiplicities_match = false;
  int g = 0;
  int half_periods = 0;  // 2g
  double theta = 0.0;
  int m1 = 0;
  int m2 = 0;
  double spacing = 0.0;
  double focal_distance = 0.0;  // d(M+, M-) = l / (2g)
};

/// Cross-checks focal profiles sampled at different points of one
/// hypersurface: identical root sets (within 1e-6), identical multiplicity
/// sequences, equal spacing l / (2g) with alternating multiplicities.
/// On success fills the half-period data of the profiles passed in.
EquifocalReport verify_equifocal(std::vector<FocalProfile>& profiles);

struct ConstancyReport {
  bool constant = false;
  double max_deviation = 0.0;            // worst per-index eigenvalue spread
  std::vector<double> mean_eigenvalues;  // sorted descending
};

/// Compares sorted principal-curvature vectors across sample points; constant
/// iff the per-index deviation stays below 1e-6.
ConstancyReport principal_curvature_constancy(const std::vector<ShapeOperator>& samples);

struct CutFocalReport {
  double cut_focal_radius = 0.0;  // first focal parameter
  double kappa = 0.0;             // largest shape eigenvalue
  double product = 0.0;
  bool pass = false;
};

/// Checks kappa * e_c <= 1 with e_c the first focal parameter of the profile
/// and kappa the maximal eigenvalue of the shape operator.
CutFocalReport cut_focal_check(const FocalProfile& profile, const ShapeOperator& shape);

}  // namespace equifocal
