#pragma once

#include <map>

#include "jump/se3.hpp"
#include "jump/volume.hpp"

namespace jump {

// Per-label world-space centroid with a weight equal to the structure volume
// (voxel count x voxel volume, mm^3).
struct Centroid {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double weight = 0.0;
};

using CentroidSet = std::map<std::int32_t, Centroid>;

// Mean world coordinate of each non-background label. Throws
// empty-parcellation when no foreground voxel exists.
CentroidSet label_centroids(const LabelVolume& lv);

// Rigid transform minimizing sum_l w_l |T(src_l) - dst_l|^2 over the labels
// shared by both sets (w_l = geometric mean of the two label volumes).
// Rotation from the SVD of the weighted cross-covariance with the usual
// reflection fix. Throws insufficient-correspondence (< 3 shared labels) or
// degenerate-geometry (collinear centroids).
RigidTransform weighted_procrustes(const CentroidSet& src, const CentroidSet& dst);

// Observed pairwise registration in log space: log of the Procrustes fit of
// the two parcellations' centroids, mapping reference-space points into
// target space.
TangentVector register_pair(const LabelVolume& ref, const LabelVolume& tgt);

}  // namespace jump
