#pragma once

#include <string>
#include <vector>

#include "jump/graph.hpp"
#include "jump/volume.hpp"

namespace jump {

// Gross corruption applied to one observed edge (per-parameter offsets).
struct OutlierEdge {
  int ref = -1;
  int tgt = -1;
  Vector6d delta = Vector6d::Zero();
};

struct PhantomSpec {
  int n_modalities = 4;
  std::array<int, 3> grid{48, 48, 48};
  double voxel_mm = 1.5;
  int n_labels = 6;
  double rot_scale = 0.04;    // per-axis uniform bound, radians
  double trans_scale = 3.0;   // per-axis uniform bound, mm
  double noise_scale = 0.0;   // Laplace b for observation-level noise
  std::vector<OutlierEdge> outlier_edges;
  std::uint64_t seed = 42;
  int frames = 1;             // >1 replicates the last modality's image as a 4D series
  // "resample": voxel data pulled through the latent transforms (realistic
  // discretization). "header": shared raster with per-modality affines
  // (exact poses; centroid registration recovers transforms to machine
  // precision).
  enum class Render { resample, header } render = Render::resample;
};

struct PhantomSession {
  std::vector<std::string> ids;          // ids[0] = "t1w", the anchor
  std::vector<Volume> images;
  std::vector<LabelVolume> label_maps;
  std::vector<TangentVector> latents;    // zero-sum ground truth
  LabelVolume base_labels;               // the template-frame phantom
};

// Deterministic synthetic session: ellipsoidal label blobs with non-coplanar
// centroids, zero-sum latent transforms, per-modality contrast. Same seed,
// same phantom. Throws invalid-spec when the grid cannot host n_labels.
PhantomSession make_session(const PhantomSpec& spec);

// Model-consistent observations R_k = T_tgt - T_ref (the linear generative
// process the inference assumes).
ObservationSet exact_observations(const std::vector<TangentVector>& latents,
                                  const std::vector<std::pair<int, int>>& pairs);

// Group-exact observations log(exp(T_tgt) * exp(T_ref)^-1): what an ideal
// pairwise registration of the rendered images measures.
ObservationSet group_observations(const std::vector<TangentVector>& latents,
                                  const std::vector<std::pair<int, int>>& pairs);

// Adds i.i.d. Laplace(0, b) noise per edge parameter plus the listed gross
// offsets. b = 0 leaves values untouched. Outlier edges must match stored
// (ref, tgt) orientation.
ObservationSet corrupt_observations(const ObservationSet& obs,
                                    const std::vector<OutlierEdge>& outliers, double noise_scale,
                                    std::uint64_t seed);

}  // namespace jump
