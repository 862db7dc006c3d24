#include "equifocal/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace equifocal {

namespace {

constexpr double kFrequencyMergeTol = 1e-10;

std::string make_frame_tag(const std::vector<SpectrumEntry>& entries, int kernel_mult) {
  std::ostringstream os;
  os.precision(12);
  os << "rs:";
  for (const auto& e : entries) os << e.frequency << "x" << e.multiplicity << "|";
  os << "k" << kernel_mult;
  return os.str();
}

}  // namespace

RootSpectrum::RootSpectrum(std::vector<SpectrumEntry> entries, int kernel_mult)
    : entries_(std::move(entries)), kernel_mult_(kernel_mult) {
  if (kernel_mult_ < 0) throw std::invalid_argument("RootSpectrum: kernel_mult must be >= 0");
  for (const auto& e : entries_) {
    if (!(e.frequency > 0.0) || !std::isfinite(e.frequency))
      throw std::invalid_argument("RootSpectrum: frequencies must be positive and finite");
    if (e.multiplicity < 1)
      throw std::invalid_argument("RootSpectrum: multiplicities must be >= 1");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.frequency > b.frequency; });
  for (size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i - 1].frequency - entries_[i].frequency <= kFrequencyMergeTol)
      throw std::invalid_argument(
          "RootSpectrum: frequencies must be pairwise distinct (merge coincident roots first)");
  }
  tangent_dim_ = kernel_mult_;
  for (const auto& e : entries_) tangent_dim_ += e.multiplicity;
  if (tangent_dim_ < 1)
    throw std::invalid_argument("RootSpectrum: empty spectrum (no entries and no kernel block)");

  coord_freq_.resize(tangent_dim_);
  int at = 0;
  for (const auto& e : entries_)
    for (int k = 0; k < e.multiplicity; ++k) coord_freq_[at++] = e.frequency;
  for (int k = 0; k < kernel_mult_; ++k) coord_freq_[at++] = 0.0;
  frame_tag_ = make_frame_tag(entries_, kernel_mult_);
}

RootSpectrum RootSpectrum::from_values(const std::vector<double>& frequencies,
                                       const std::vector<int>& multiplicities,
                                       int kernel_mult) {
  if (frequencies.size() != multiplicities.size())
    throw std::invalid_argument("RootSpectrum::from_values: size mismatch");
  std::vector<std::pair<double, int>> vals;
  for (size_t i = 0; i < frequencies.size(); ++i) {
    if (multiplicities[i] < 0)
      throw std::invalid_argument("RootSpectrum::from_values: negative multiplicity");
    if (multiplicities[i] == 0) continue;
    if (std::abs(frequencies[i]) <= kFrequencyMergeTol) {
      kernel_mult += multiplicities[i];  // zero-frequency roots join the flat block
    } else {
      vals.emplace_back(std::abs(frequencies[i]), multiplicities[i]);
    }
  }
  std::sort(vals.begin(), vals.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<SpectrumEntry> merged;
  for (const auto& [d, m] : vals) {
    if (!merged.empty() && merged.back().frequency - d <= kFrequencyMergeTol) {
      merged.back().multiplicity += m;
    } else {
      merged.push_back({d, m});
    }
  }
  return RootSpectrum(std::move(merged), kernel_mult);
}

double RootSpectrum::max_frequency() const {
  return entries_.empty() ? 0.0 : entries_.front().frequency;
}

int RootSpectrum::block_start(int i) const {
  if (i < 0 || i > num_entries())
    throw std::invalid_argument("RootSpectrum::block_start: index out of range");
  int at = 0;
  for (int k = 0; k < i; ++k) at += entries_[k].multiplicity;
  return at;
}

AmbientSpace AmbientSpace::rank_one(SpaceKind kind, int dim, double beta,
                                    std::vector<SpectrumEntry> table, std::string name) {
  AmbientSpace s;
  s.kind_ = kind;
  s.dim_ = dim;
  s.rank_ = 1;
  s.circle_length_ = 2.0 * std::numbers::pi;
  s.beta_sup_ = beta;
  s.table_ = std::move(table);
  s.name_ = std::move(name);
  return s;
}

AmbientSpace AmbientSpace::sphere(int dim) {
  if (dim < 2) throw std::invalid_argument("AmbientSpace::sphere: dim must be >= 2");
  return rank_one(SpaceKind::Sphere, dim, 1.0, {{1.0, dim - 1}},
                  "sphere:" + std::to_string(dim));
}

AmbientSpace AmbientSpace::complex_projective(int n) {
  if (n < 1) throw std::invalid_argument("AmbientSpace::complex_projective: n must be >= 1");
  std::vector<SpectrumEntry> table{{2.0, 1}};
  if (2 * n - 2 > 0) table.push_back({1.0, 2 * n - 2});
  return rank_one(SpaceKind::ComplexProjective, 2 * n, 2.0, std::move(table),
                  "cpn:" + std::to_string(n));
}

AmbientSpace AmbientSpace::quaternion_projective(int n) {
  if (n < 1) throw std::invalid_argument("AmbientSpace::quaternion_projective: n must be >= 1");
  std::vector<SpectrumEntry> table{{2.0, 3}};
  if (4 * n - 4 > 0) table.push_back({1.0, 4 * n - 4});
  return rank_one(SpaceKind::QuaternionProjective, 4 * n, 2.0, std::move(table),
                  "hpn:" + std::to_string(n));
}

AmbientSpace AmbientSpace::cayley_plane() {
  return rank_one(SpaceKind::CayleyPlane, 16, 2.0, {{2.0, 7}, {1.0, 8}}, "cap2");
}

AmbientSpace AmbientSpace::generic(RootTable table, double circle_length) {
  if (table.rank < 1) throw std::invalid_argument("AmbientSpace::generic: rank must be >= 1");
  if (table.rows.empty()) throw std::invalid_argument("AmbientSpace::generic: empty root table");
  if (!(circle_length > 0.0))
    throw std::invalid_argument("AmbientSpace::generic: circle_length must be positive");
  int dim = table.rank;
  double beta = 0.0;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.coeffs.size() != table.rank)
      throw std::invalid_argument("AmbientSpace::generic: root " + std::to_string(i) +
                                  " has wrong coefficient count (expected rank = " +
                                  std::to_string(table.rank) + ")");
    if (row.multiplicity < 1)
      throw std::invalid_argument("AmbientSpace::generic: root " + std::to_string(i) +
                                  " has multiplicity < 1");
    const double norm = row.coeffs.norm();
    if (!(norm > 0.0))
      throw std::invalid_argument("AmbientSpace::generic: root " + std::to_string(i) +
                                  " has zero coefficient vector");
    beta = std::max(beta, norm);  // sup over unit directions of |<coeffs, b>|
    dim += row.multiplicity;
  }
  AmbientSpace s;
  s.kind_ = SpaceKind::GenericRankR;
  s.dim_ = dim;
  s.rank_ = table.rank;
  s.circle_length_ = circle_length;
  s.beta_sup_ = beta;
  s.name_ = "generic:r" + std::to_string(table.rank);
  s.roots_ = std::move(table);
  return s;
}

RootSpectrum AmbientSpace::spectrum_at(const Eigen::VectorXd& direction) const {
  if (rank_ == 1) return RootSpectrum(table_, 0);
  if (direction.size() != rank_)
    throw std::invalid_argument("AmbientSpace::spectrum_at: direction must have length rank = " +
                                std::to_string(rank_) + " in the abelian coordinate frame");
  const double norm = direction.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::invalid_argument("AmbientSpace::spectrum_at: direction must be a nonzero vector");
  const Eigen::VectorXd b = direction / norm;
  std::vector<double> freqs;
  std::vector<int> mults;
  freqs.reserve(roots_.rows.size());
  for (const auto& row : roots_.rows) {
    freqs.push_back(std::abs(row.coeffs.dot(b)));
    mults.push_back(row.multiplicity);
  }
  return RootSpectrum::from_values(freqs, mults, rank_ - 1);
}

RootSpectrum AmbientSpace::spectrum() const {
  if (rank_ != 1)
    throw std::invalid_argument("AmbientSpace::spectrum: direction-free spectrum needs rank one");
  return RootSpectrum(table_, 0);
}

double focal_lower_bound(const AmbientSpace& space) {
  const double n = space.dim() - 1;
  const double r = space.rank();
  return std::numbers::pi / (space.beta_sup() * ((n + 2.0 - r) * n + 1.0));
}

}  // namespace equifocal
