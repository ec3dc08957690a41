#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "jump/se3.hpp"

namespace jump {

// Modalities of one imaging session. The latent template is a conceptual
// extra vertex; it never appears as a design-matrix column.
struct SessionGraph {
  std::vector<std::string> modalities;
};

// Throws unless N >= 2 and IDs are unique.
void validate(const SessionGraph& g);

// One observed pairwise registration in log space, mapping reference-space
// points into target space.
struct PairObservation {
  int ref = -1;
  int tgt = -1;
  TangentVector logR;
};

// Observed edges plus the K x N signed incidence matrix: row k has -1 at the
// reference column and +1 at the target column.
struct ObservationSet {
  int n_modalities = 0;
  std::vector<PairObservation> observations;
  Eigen::MatrixXd W;
  // Optional names used in diagnostics; indices are used when empty.
  std::vector<std::string> modality_names;
};

// N(N-1)/2; throws invalid-argument for N < 2.
long full_pair_count(int n_modalities);

// All unordered pairs (i, j), i < j, in row-major order.
std::vector<std::pair<int, int>> all_pairs(int n_modalities);

// Builds the skeleton (W rows in input order, zero log entries). Throws on
// self pairs, out-of-range indices, or duplicate unordered pairs.
ObservationSet build_observation_set(int n_modalities, const std::vector<std::pair<int, int>>& pairs);

// Succeeds iff the undirected graph induced by the observations spans all
// modalities; otherwise throws disconnected-graph listing the components.
void check_connectivity(const ObservationSet& obs);

}  // namespace jump
