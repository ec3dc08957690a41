#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "jump/infer.hpp"
#include "jump/phantom.hpp"

namespace jump {

// Star estimator anchored at one modality: each latent is read off the single
// edge touching the anchor, then the set is centered. Requires an edge
// between the anchor and every other modality.
std::vector<TangentVector> anchor_star_latents(const ObservationSet& obs, int anchor);

struct BenchConfig {
  int n_modalities = 4;
  double noise_scale = 0.0;
  std::vector<OutlierEdge> outliers;
  int reps = 100;
  std::uint64_t seed = 1234;
  double rot_scale = 0.05;
  double trans_scale = 3.0;
  InferenceConfig infer;
};

struct BenchRow {
  std::uint64_t seed = 0;
  std::string estimator;                 // graph-L1 | graph-L2 | anchor-T1
  std::array<double, 6> err{};           // per-parameter RMS error over modalities
};

// Monte-Carlo comparison of the three estimators on the linear generative
// model: zero-sum ground truth, full pairwise observations, Laplace noise,
// optional gross outliers. Three rows per rep.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

}  // namespace jump
