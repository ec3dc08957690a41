#include "jump/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace jump {

void validate(const SessionGraph& g) {
  if (g.modalities.size() < 2) throw InvalidArgument("session graph needs at least 2 modalities");
  std::set<std::string> seen(g.modalities.begin(), g.modalities.end());
  if (seen.size() != g.modalities.size()) throw InvalidArgument("modality IDs must be unique");
}

long full_pair_count(int n) {
  if (n < 2) throw InvalidArgument("pair count needs at least 2 modalities");
  return long(n) * (n - 1) / 2;
}

std::vector<std::pair<int, int>> all_pairs(int n) {
  full_pair_count(n);  // validates n
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(std::size_t(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

ObservationSet build_observation_set(int n, const std::vector<std::pair<int, int>>& pairs) {
  if (n < 2) throw InvalidArgument("observation set needs at least 2 modalities");
  std::set<std::pair<int, int>> seen;
  ObservationSet obs;
  obs.n_modalities = n;
  obs.W = Eigen::MatrixXd::Zero(Eigen::Index(pairs.size()), n);
  obs.observations.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [r, t] = pairs[k];
    if (r == t) throw InvalidArgument("self pair (" + std::to_string(r) + "," + std::to_string(t) + ")");
    if (r < 0 || t < 0 || r >= n || t >= n)
      throw InvalidArgument("pair index out of range: (" + std::to_string(r) + "," + std::to_string(t) + ")");
    const auto key = std::minmax(r, t);
    if (!seen.insert(key).second)
      throw DuplicateEdge("duplicate pair (" + std::to_string(r) + "," + std::to_string(t) + ")");
    obs.observations[k].ref = r;
    obs.observations[k].tgt = t;
    obs.W(Eigen::Index(k), r) = -1.0;
    obs.W(Eigen::Index(k), t) = 1.0;
  }
  return obs;
}

void check_connectivity(const ObservationSet& obs) {
  const int n = obs.n_modalities;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (const auto& o : obs.observations) parent[find(o.ref)] = find(o.tgt);

  std::vector<std::vector<int>> components(n);
  for (int i = 0; i < n; ++i) components[std::size_t(find(i))].push_back(i);

  int n_components = 0;
  std::ostringstream msg;
  msg << "graph not connected; components:";
  for (const auto& comp : components) {
    if (comp.empty()) continue;
    ++n_components;
    msg << " {";
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (i) msg << ",";
      if (comp[i] < int(obs.modality_names.size()))
        msg << obs.modality_names[std::size_t(comp[i])];
      else
        msg << comp[i];
    }
    msg << "}";
  }
  if (n_components > 1) throw DisconnectedGraph(msg.str());
}

}  // namespace jump
