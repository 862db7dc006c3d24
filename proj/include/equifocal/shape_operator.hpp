#pragma once

#include <Eigen/Core>

#include <string>

#include "equifocal/symspace.hpp"

namespace equifocal {

/// Shape operator of a hypersurface in the frame adapted to the eigenblocks
/// of the normal Jacobi operator. The frame tag binds the matrix to the
/// RootSpectrum whose adapted frame it is expressed in.
class ShapeOperator {
 public:
  /// Throws std::invalid_argument if the matrix is not square or deviates
  /// from symmetry by more than 1e-10 (max-norm).
  ShapeOperator(Eigen::MatrixXd matrix, std::string frame_tag);

  /// Convenience constructor binding directly to a spectrum's frame.
  ShapeOperator(Eigen::MatrixXd matrix, const RootSpectrum& spectrum)
      : ShapeOperator(std::move(matrix), spectrum.frame_tag()) {}

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const std::string& frame_tag() const { return frame_tag_; }
  int dimension() const { return static_cast<int>(matrix_.rows()); }

  bool bound_to(const RootSpectrum& spectrum) const {
    return frame_tag_ == spectrum.frame_tag();
  }

 private:
  Eigen::MatrixXd matrix_;
  std::string frame_tag_;
};

}  // namespace equifocal
