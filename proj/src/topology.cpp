#include "gapforge/topology.hpp"

#include "gapforge/errors.hpp"

namespace gapforge {

Topology::Topology(TopologyKind kind_, int N_) : kind(kind_), N(N_) {
  if (N < 2) throw ConfigError("topology needs N >= 2");
}

std::vector<std::pair<int, int>> Topology::bonds() const {
  std::vector<std::pair<int, int>> out;
  if (kind == TopologyKind::NearestNeighbor) {
    for (int k = 0; k + 1 < N; ++k) out.emplace_back(k, k + 1);
  } else {
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) out.emplace_back(i, j);
  }
  return out;
}

double Topology::bond_weight() const {
  return kind == TopologyKind::NearestNeighbor ? 1.0 : 1.0 / N;
}

std::string Topology::name() const {
  return kind == TopologyKind::NearestNeighbor ? "nearest" : "long-range";
}

TopologyKind parse_topology(std::string_view name) {
  if (name == "nearest" || name == "nn" || name == "nearest-neighbor")
    return TopologyKind::NearestNeighbor;
  if (name == "long-range" || name == "lr" || name == "longrange") return TopologyKind::LongRange;
  throw ConfigError("unknown topology '" + std::string(name) + "'");
}

}  // namespace gapforge
