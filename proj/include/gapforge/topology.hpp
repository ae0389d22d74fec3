#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gapforge {

enum class TopologyKind { NearestNeighbor, LongRange };

// Bond structure of the chain. Nearest-neighbour uses (k, k+1) with weight
// one; long-range uses every pair with weight 1/N.
struct Topology {
  TopologyKind kind = TopologyKind::NearestNeighbor;
  int N = 2;

  Topology() = default;
  Topology(TopologyKind kind, int N);

  std::vector<std::pair<int, int>> bonds() const;  // 0-based, first < second
  double bond_weight() const;
  std::string name() const;  // "nearest" or "long-range"
};

TopologyKind parse_topology(std::string_view name);

}  // namespace gapforge
