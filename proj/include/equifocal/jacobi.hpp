#pragma once

#include <Eigen/Core>

#include "equifocal/shape_operator.hpp"
#include "equifocal/symspace.hpp"

namespace equifocal {

/// A Jacobi field sampled at arclength t, expressed componentwise in the
/// frame adapted to the spectrum's eigenblocks.
struct JacobiState {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  double t = 0.0;
};

/// Cosine propagator: scales each eigenblock by cos(d * t) and leaves the
/// kernel block unchanged.
Eigen::VectorXd apply_cos_propagator(const RootSpectrum& spectrum, double t,
                                     const Eigen::VectorXd& v);

/// Sine propagator: scales each eigenblock by sin(d * t) / d and the kernel
/// block by t.
Eigen::VectorXd apply_sin_propagator(const RootSpectrum& spectrum, double t,
                                     const Eigen::VectorXd& v);

/// Closed-form solution of the normal Jacobi equation y'' + R y = 0 with
/// R = diag(d_i^2, 0): position cos/sin blocks, straight lines on the kernel.
/// The velocity is the exact analytic derivative, not a finite difference.
JacobiState propagate(const RootSpectrum& spectrum, const Eigen::VectorXd& y0,
                      const Eigen::VectorXd& y0_dot, double t);

/// Differential of the normal end-point map at parameter t, as an explicit
/// matrix: E(t) = C(t) - S(t) * A with C, S the diagonal cosine/sine
/// propagators. Entire in t; E(0) is the identity. Focal parameters are
/// exactly the t with det E(t) = 0.
Eigen::MatrixXd endpoint_differential(const RootSpectrum& spectrum,
                                      const ShapeOperator& shape, double t);

/// Diagonal factors of the two propagators at parameter t (cosine factors
/// and sine factors, length tangent_dim). Exposed for scan loops that reuse
/// them across many shape operators.
Eigen::VectorXd cos_propagator_factors(const RootSpectrum& spectrum, double t);
Eigen::VectorXd sin_propagator_factors(const RootSpectrum& spectrum, double t);

}  // namespace equifocal
