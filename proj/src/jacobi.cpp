#include "equifocal/jacobi.hpp"

#include <cmath>
#include <stdexcept>

namespace equifocal {

namespace {

void check_length(const RootSpectrum& spectrum, const Eigen::VectorXd& v, const char* who) {
  if (v.size() != spectrum.tangent_dim())
    throw std::invalid_argument(std::string(who) + ": vector length " + std::to_string(v.size()) +
                                " does not match tangent dimension " +
                                std::to_string(spectrum.tangent_dim()));
}

}  // namespace

Eigen::VectorXd cos_propagator_factors(const RootSpectrum& spectrum, double t) {
  const Eigen::VectorXd& d = spectrum.coordinate_frequencies();
  Eigen::VectorXd f(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) f[i] = d[i] > 0.0 ? std::cos(d[i] * t) : 1.0;
  return f;
}

Eigen::VectorXd sin_propagator_factors(const RootSpectrum& spectrum, double t) {
  const Eigen::VectorXd& d = spectrum.coordinate_frequencies();
  Eigen::VectorXd f(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) f[i] = d[i] > 0.0 ? std::sin(d[i] * t) / d[i] : t;
  return f;
}

Eigen::VectorXd apply_cos_propagator(const RootSpectrum& spectrum, double t,
                                     const Eigen::VectorXd& v) {
  check_length(spectrum, v, "apply_cos_propagator");
  return cos_propagator_factors(spectrum, t).cwiseProduct(v);
}

Eigen::VectorXd apply_sin_propagator(const RootSpectrum& spectrum, double t,
                                     const Eigen::VectorXd& v) {
  check_length(spectrum, v, "apply_sin_propagator");
  return sin_propagator_factors(spectrum, t).cwiseProduct(v);
}

JacobiState propagate(const RootSpectrum& spectrum, const Eigen::VectorXd& y0,
                      const Eigen::VectorXd& y0_dot, double t) {
  check_length(spectrum, y0, "propagate");
  check_length(spectrum, y0_dot, "propagate");
  const Eigen::VectorXd& d = spectrum.coordinate_frequencies();
  JacobiState out;
  out.t = t;
  out.position.resize(d.size());
  out.velocity.resize(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      const double c = std::cos(d[i] * t);
      const double s = std::sin(d[i] * t);
      out.position[i] = c * y0[i] + s / d[i] * y0_dot[i];
      out.velocity[i] = -d[i] * s * y0[i] + c * y0_dot[i];
    } else {
      out.position[i] = y0[i] + t * y0_dot[i];
      out.velocity[i] = y0_dot[i];
    }
  }
  return out;
}

Eigen::MatrixXd endpoint_differential(const RootSpectrum& spectrum,
                                      const ShapeOperator& shape, double t) {
  if (shape.dimension() != spectrum.tangent_dim())
    throw std::invalid_argument("endpoint_differential: shape operator dimension " +
                                std::to_string(shape.dimension()) +
                                " does not match tangent dimension " +
                                std::to_string(spectrum.tangent_dim()));
  const Eigen::VectorXd c = cos_propagator_factors(spectrum, t);
  const Eigen::VectorXd s = sin_propagator_factors(spectrum, t);
  Eigen::MatrixXd e = (-s).asDiagonal() * shape.matrix();
  e.diagonal() += c;
  return e;
}

}  // namespace equifocal
