#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "jump/error.hpp"

namespace jump {

// 3D scalar grid (optionally 4D via frames) with a voxel-index -> world-mm
// affine. Data is stored x-fastest, frames outermost.
struct Volume {
  std::array<int, 3> dims{0, 0, 0};
  int frames = 1;
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
  std::vector<float> data;

  std::size_t voxels_per_frame() const {
    return std::size_t(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k, int f = 0) const {
    return std::size_t(i) + std::size_t(dims[0]) * (std::size_t(j) + std::size_t(dims[1]) * (std::size_t(k) + std::size_t(dims[2]) * f));
  }
  float at(int i, int j, int k, int f = 0) const { return data[index(i, j, k, f)]; }
  float& at(int i, int j, int k, int f = 0) { return data[index(i, j, k, f)]; }
};

// Integer parcellation on the same kind of grid. Label 0 is background.
struct LabelVolume {
  std::array<int, 3> dims{0, 0, 0};
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
  std::vector<std::int32_t> data;
  // Sorted distinct non-background labels present in data.
  std::vector<std::int32_t> labels;

  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(dims[0]) * (std::size_t(j) + std::size_t(dims[1]) * k);
  }
  std::int32_t at(int i, int j, int k) const { return data[index(i, j, k)]; }
  std::int32_t& at(int i, int j, int k) { return data[index(i, j, k)]; }

  void rebuild_label_set();
};

// Throws when dims/frames/data sizes disagree or the affine is singular
// (|det| of the 3x3 block <= 1e-12).
void validate(const Volume& v);
void validate(const LabelVolume& v);

// Affine applied to a (possibly fractional, possibly out-of-bounds) index.
Eigen::Vector3d voxel_to_world(const Eigen::Matrix4d& affine, const Eigen::Vector3d& index);
inline Eigen::Vector3d voxel_to_world(const Volume& v, const Eigen::Vector3d& index) {
  return voxel_to_world(v.affine, index);
}
inline Eigen::Vector3d voxel_to_world(const LabelVolume& v, const Eigen::Vector3d& index) {
  return voxel_to_world(v.affine, index);
}

// Frame floor(F/2), 0-based.
Volume midpoint_frame(const Volume& v);

// Voxelwise arithmetic mean across frames.
Volume average_frames(const Volume& v);

// Same dims and affines equal within tolerance.
bool same_grid(const std::array<int, 3>& da, const Eigen::Matrix4d& aa,
               const std::array<int, 3>& db, const Eigen::Matrix4d& ab,
               double tol = 1e-5);

}  // namespace jump
