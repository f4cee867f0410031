#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>

#include "fibergen/mesh.hpp"

namespace fibergen::detail {

/// Orientation-free key of an edge, triangle or quad (sorted, padded).
using FaceKey = std::array<VertexId, 4>;

inline FaceKey make_key(std::span<const VertexId> ids) {
  FaceKey k;
  k.fill(std::numeric_limits<VertexId>::max());
  std::copy(ids.begin(), ids.end(), k.begin());
  std::sort(k.begin(), k.end());
  return k;
}

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (VertexId v : k) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

}  // namespace fibergen::detail
