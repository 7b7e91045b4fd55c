#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace regsets {

using Point = std::vector<double>;
using PointView = std::span<const double>;

inline double dist(PointView a, PointView b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double dot(PointView a, PointView b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm(PointView a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(PointView a) {
  double m = 0.0;
  for (double c : a) m = std::max(m, std::fabs(c));
  return m;
}

inline Point sub(PointView a, PointView b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Point add(PointView a, PointView b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Point scale(PointView a, double s) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

// out = a - b + c, the translation idiom used all over the ambient maps.
inline Point translate(PointView a, PointView b, PointView c) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i] + c[i];
  return out;
}

inline bool lex_less(PointView a, PointView b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Uniform-cell hash grid over a flat coordinate array. Acceleration only:
// query() returns candidate indices whose cells touch the search ball, the
// caller re-checks exact distances. Cell scan uses a small relative slack so
// boundary points are never pruned.
class GridIndex {
 public:
  GridIndex() = default;

  void build(const std::vector<double>& coords, int dim, double cell_size);

  bool built() const { return cell_size_ > 0.0; }
  double cell_size() const { return cell_size_; }

  // Appends candidate indices (unsorted, possibly outside the ball).
  void candidates(PointView center, double radius, std::vector<std::uint32_t>& out) const;

 private:
  std::int64_t key_of(const double* p) const;

  int dim_ = 0;
  double cell_size_ = 0.0;
  std::vector<double> origin_;
  // Open-addressed map from cell key to [begin,end) in entries_.
  std::vector<std::int64_t> keys_;
  std::vector<std::uint32_t> starts_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> entries_;
  std::size_t mask_ = 0;
  const std::vector<double>* coords_ = nullptr;
};

}  // namespace regsets
