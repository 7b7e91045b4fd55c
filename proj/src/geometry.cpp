#include "regsets/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace regsets {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

}  // namespace

void GridIndex::build(const std::vector<double>& coords, int dim, double cell_size) {
  coords_ = &coords;
  dim_ = dim;
  cell_size_ = cell_size;
  const std::size_t count = coords.size() / static_cast<std::size_t>(dim);
  origin_.assign(static_cast<std::size_t>(dim), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < count; ++i)
    for (int k = 0; k < dim; ++k)
      origin_[static_cast<std::size_t>(k)] =
          std::min(origin_[static_cast<std::size_t>(k)], coords[i * dim + static_cast<std::size_t>(k)]);

  const std::size_t cap = next_pow2(std::max<std::size_t>(16, count * 2));
  mask_ = cap - 1;
  keys_.assign(cap, std::numeric_limits<std::int64_t>::min());
  starts_.assign(cap, 0);
  counts_.assign(cap, 0);

  // Two passes: count per cell, then fill.
  std::vector<std::size_t> slot_of(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t key = key_of(coords.data() + i * dim);
    std::size_t slot = static_cast<std::size_t>(mix(static_cast<std::uint64_t>(key))) & mask_;
    while (keys_[slot] != std::numeric_limits<std::int64_t>::min() && keys_[slot] != key)
      slot = (slot + 1) & mask_;
    keys_[slot] = key;
    counts_[slot]++;
    slot_of[i] = slot;
  }
  std::uint32_t acc = 0;
  for (std::size_t s = 0; s < keys_.size(); ++s) {
    starts_[s] = acc;
    acc += counts_[s];
  }
  entries_.assign(count, 0);
  std::vector<std::uint32_t> fill(keys_.size(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t slot = slot_of[i];
    entries_[starts_[slot] + fill[slot]++] = static_cast<std::uint32_t>(i);
  }
}

std::int64_t GridIndex::key_of(const double* p) const {
  // Mixed radix over per-axis cell indices; 21 bits per axis for dim <= 3,
  // falls back to a hash combine beyond that.
  std::int64_t key = 0;
  for (int k = 0; k < dim_; ++k) {
    const double rel = (p[k] - origin_[static_cast<std::size_t>(k)]) / cell_size_;
    const std::int64_t c = static_cast<std::int64_t>(std::floor(rel));
    if (dim_ <= 3) {
      key = (key << 21) | ((c + (std::int64_t(1) << 20)) & ((std::int64_t(1) << 21) - 1));
    } else {
      key = static_cast<std::int64_t>(mix(static_cast<std::uint64_t>(key) ^ static_cast<std::uint64_t>(c + 0x9e3779b9)));
    }
  }
  return key;
}

void GridIndex::candidates(PointView center, double radius, std::vector<std::uint32_t>& out) const {
  // Conservative slack keeps boundary cells in range.
  const double r = radius * (1.0 + 1e-12) + 1e-300;
  std::vector<std::int64_t> lo(static_cast<std::size_t>(dim_)), hi(static_cast<std::size_t>(dim_));
  for (int k = 0; k < dim_; ++k) {
    lo[static_cast<std::size_t>(k)] =
        static_cast<std::int64_t>(std::floor((center[static_cast<std::size_t>(k)] - r - origin_[static_cast<std::size_t>(k)]) / cell_size_));
    hi[static_cast<std::size_t>(k)] =
        static_cast<std::int64_t>(std::floor((center[static_cast<std::size_t>(k)] + r - origin_[static_cast<std::size_t>(k)]) / cell_size_));
  }
  std::vector<std::int64_t> cur(lo);
  while (true) {
    // Build the key for cur directly.
    std::int64_t key = 0;
    for (int k = 0; k < dim_; ++k) {
      const std::int64_t c = cur[static_cast<std::size_t>(k)];
      if (dim_ <= 3) {
        key = (key << 21) | ((c + (std::int64_t(1) << 20)) & ((std::int64_t(1) << 21) - 1));
      } else {
        key = static_cast<std::int64_t>(mix(static_cast<std::uint64_t>(key) ^ static_cast<std::uint64_t>(c + 0x9e3779b9)));
      }
    }
    std::size_t slot = static_cast<std::size_t>(mix(static_cast<std::uint64_t>(key))) & mask_;
    while (keys_[slot] != std::numeric_limits<std::int64_t>::min()) {
      if (keys_[slot] == key) {
        const std::uint32_t begin = starts_[slot];
        const std::uint32_t end = begin + counts_[slot];
        for (std::uint32_t e = begin; e < end; ++e) out.push_back(entries_[e]);
        break;
      }
      slot = (slot + 1) & mask_;
    }
    int axis = dim_ - 1;
    while (axis >= 0) {
      if (++cur[static_cast<std::size_t>(axis)] <= hi[static_cast<std::size_t>(axis)]) break;
      cur[static_cast<std::size_t>(axis)] = lo[static_cast<std::size_t>(axis)];
      --axis;
    }
    if (axis < 0) break;
  }
}

}  // namespace regsets
