#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace equifocal {

/// One eigenblock of the normal Jacobi operator: the frequency d (square root
/// of the R_a eigenvalue) together with its eigenspace dimension.
struct SpectrumEntry {
  double frequency = 0.0;
  int multiplicity = 0;
};

/// Eigen-data of the normal Jacobi operator restricted to the tangent space of
/// a hypersurface: strictly positive frequencies with multiplicities, sorted
/// by decreasing frequency, plus a flat (zero-frequency) block of dimension
/// rank - 1. Immutable after construction; safe to share across threads.
class RootSpectrum {
 public:
  /// Entries must have positive frequency and multiplicity; they are sorted
  /// internally. Throws std::invalid_argument on duplicate frequencies
  /// (closer than 1e-10), nonpositive data, or an empty spectrum.
  RootSpectrum(std::vector<SpectrumEntry> entries, int kernel_mult);

  /// Builds a spectrum from raw frequency evaluations: near-equal frequencies
  /// (within 1e-10) are merged with summed multiplicities and near-zero
  /// frequencies are folded into the kernel block.
  static RootSpectrum from_values(const std::vector<double>& frequencies,
                                  const std::vector<int>& multiplicities,
                                  int kernel_mult);

  const std::vector<SpectrumEntry>& entries() const { return entries_; }
  int kernel_mult() const { return kernel_mult_; }
  int tangent_dim() const { return tangent_dim_; }
  /// Number of distinct positive frequencies.
  int num_entries() const { return static_cast<int>(entries_.size()); }
  double max_frequency() const;

  /// Coordinate index where eigenblock `i` starts in the adapted frame
  /// (blocks are laid out in entry order, kernel block last).
  int block_start(int i) const;

  /// Per-coordinate frequency vector in the adapted frame (0 on the kernel
  /// block). Length tangent_dim().
  const Eigen::VectorXd& coordinate_frequencies() const { return coord_freq_; }

  /// Canonical identifier of the adapted frame this spectrum defines; shape
  /// operators carry the same tag to assert they live in a matching frame.
  const std::string& frame_tag() const { return frame_tag_; }

 private:
  std::vector<SpectrumEntry> entries_;
  int kernel_mult_ = 0;
  int tangent_dim_ = 0;
  Eigen::VectorXd coord_freq_;
  std::string frame_tag_;
};

enum class SpaceKind {
  Sphere,
  ComplexProjective,
  QuaternionProjective,
  CayleyPlane,
  GenericRankR,
};

/// User-supplied restricted-root data for a rank-r model: each root is a
/// linear functional on an orthonormal abelian coordinate frame.
struct RootTable {
  struct Row {
    Eigen::VectorXd coeffs;
    int multiplicity = 0;
  };
  int rank = 0;
  std::vector<Row> rows;
};

/// A compact symmetric-space ambient model: dimension, rank, the length of
/// closed normal geodesics, the root-frequency supremum, and a spectrum
/// provider. Rank-one spaces carry built-in spectrum tables; generic spaces
/// evaluate a user-supplied root table. Immutable after construction.
class AmbientSpace {
 public:
  static AmbientSpace sphere(int dim);
  static AmbientSpace complex_projective(int n);
  static AmbientSpace quaternion_projective(int n);
  static AmbientSpace cayley_plane();
  static AmbientSpace generic(RootTable table, double circle_length);

  SpaceKind kind() const { return kind_; }
  /// Real dimension of the ambient space.
  int dim() const { return dim_; }
  int rank() const { return rank_; }
  /// Length of closed normal geodesics (2*pi under the adopted
  /// normalization for rank-one spaces).
  double circle_length() const { return circle_length_; }
  /// Supremum of root frequencies over unit abelian directions.
  double beta_sup() const { return beta_sup_; }
  const std::string& name() const { return name_; }

  /// Spectrum of the normal Jacobi operator in the direction `a`. Rank-one
  /// spaces ignore the direction; generic spaces require `a` expressed in
  /// the declared abelian coordinate frame (length = rank).
  RootSpectrum spectrum_at(const Eigen::VectorXd& direction) const;

  /// Direction-free spectrum for rank-one spaces.
  RootSpectrum spectrum() const;

 private:
  AmbientSpace() = default;
  static AmbientSpace rank_one(SpaceKind kind, int dim, double beta,
                               std::vector<SpectrumEntry> table, std::string name);

  SpaceKind kind_ = SpaceKind::Sphere;
  int dim_ = 0;
  int rank_ = 1;
  double circle_length_ = 0.0;
  double beta_sup_ = 0.0;
  std::string name_;
  std::vector<SpectrumEntry> table_;  // rank-one spectrum table
  RootTable roots_;                   // generic root data
};

/// Universal lower bound for the distance between the two focal submanifolds
/// of a curvature-adapted equifocal hypersurface in the given space:
/// pi / (beta * ((n + 2 - r) * n + 1)) with n = dim - 1.
double focal_lower_bound(const AmbientSpace& space);

/// Parses a space token of the form "sphere:5", "cpn:3", "hpn:2", "cap2" or
/// "generic:<json-file>". Throws std::invalid_argument on unknown tokens.
AmbientSpace parse_space(const std::string& token);

}  // namespace equifocal
