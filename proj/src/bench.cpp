#include "jump/bench.hpp"

#include <cmath>

#include "jump/rng.hpp"

namespace jump {

std::vector<TangentVector> anchor_star_latents(const ObservationSet& obs, int anchor) {
  const int n = obs.n_modalities;
  if (anchor < 0 || anchor >= n) throw InvalidArgument("anchor index out of range");
  std::vector<TangentVector> t(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  seen[std::size_t(anchor)] = 1;
  for (const auto& o : obs.observations) {
    if (o.ref == anchor) {
      t[std::size_t(o.tgt)] = o.logR;
      seen[std::size_t(o.tgt)] = 1;
    } else if (o.tgt == anchor) {
      t[std::size_t(o.ref)] = -o.logR;
      seen[std::size_t(o.ref)] = 1;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!seen[std::size_t(i)])
      throw InvalidArgument("anchor estimator needs an edge between the anchor and modality " +
                            std::to_string(i));
  TangentVector mean;
  for (const auto& v : t) mean = mean + v;
  mean = mean * (1.0 / n);
  for (auto& v : t) v = v - mean;
  return t;
}

namespace {

std::array<double, 6> rms_error(const std::vector<TangentVector>& est,
                                const std::vector<TangentVector>& truth) {
  std::array<double, 6> e{};
  for (int j = 0; j < 6; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double d = est[i][j] - truth[i][j];
      s += d * d;
    }
    e[std::size_t(j)] = std::sqrt(s / double(est.size()));
  }
  return e;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  if (cfg.reps < 1) throw InvalidArgument("bench needs at least one repetition");
  if (cfg.n_modalities < 2) throw InvalidArgument("bench needs at least 2 modalities");

  const auto pairs = all_pairs(cfg.n_modalities);
  std::vector<BenchRow> rows;
  rows.reserve(std::size_t(cfg.reps) * 3);

  for (int rep = 0; rep < cfg.reps; ++rep) {
    const std::uint64_t rep_seed = cfg.seed + std::uint64_t(rep);
    SplitMix64 rng(rep_seed);

    std::vector<TangentVector> truth(static_cast<std::size_t>(cfg.n_modalities));
    TangentVector mean;
    for (auto& t : truth) {
      for (int j = 0; j < 3; ++j) t.omega[j] = rng.uniform(-cfg.rot_scale, cfg.rot_scale);
      for (int j = 0; j < 3; ++j) t.u[j] = rng.uniform(-cfg.trans_scale, cfg.trans_scale);
      mean = mean + t;
    }
    mean = mean * (1.0 / cfg.n_modalities);
    for (auto& t : truth) t = t - mean;

    ObservationSet obs = exact_observations(truth, pairs);
    obs = corrupt_observations(obs, cfg.outliers, cfg.noise_scale, rep_seed ^ 0x5DEECE66Dull);

    const LatentSolution l1 = infer_latents(obs, cfg.infer);
    const std::vector<TangentVector> l2 = solve_latents_l2(obs);
    const std::vector<TangentVector> star = anchor_star_latents(obs, 0);

    rows.push_back({rep_seed, "graph-L1", rms_error(l1.latents, truth)});
    rows.push_back({rep_seed, "graph-L2", rms_error(l2, truth)});
    rows.push_back({rep_seed, "anchor-T1", rms_error(star, truth)});
  }
  return rows;
}

}  // namespace jump
