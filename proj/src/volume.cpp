#include "jump/volume.hpp"


#include <Eigen/Dense>
#include <algorithm>
#include <set>

namespace jump {

void LabelVolume::rebuild_label_set() {
  std::set<std::int32_t> s;
  for (std::int32_t v : data)
    if (v != 0) s.insert(v);
  labels.assign(s.begin(), s.end());
}

static void check_affine(const Eigen::Matrix4d& a) {
  if (!a.allFinite()) throw InvalidArgument("volume affine has non-finite entries");
  if (std::abs(a.block<3, 3>(0, 0).determinant()) <= 1e-12)
    throw InvalidArgument("volume affine 3x3 block is singular");
}

void validate(const Volume& v) {
  if (v.dims[0] <= 0 || v.dims[1] <= 0 || v.dims[2] <= 0)
    throw InvalidArgument("volume dims must be positive");
  if (v.frames < 1) throw InvalidArgument("volume frame count must be >= 1");
  check_affine(v.affine);
  if (v.data.size() != v.voxels_per_frame() * std::size_t(v.frames))
    throw InvalidArgument("volume data length does not match dims x frames");
}

void validate(const LabelVolume& v) {
  if (v.dims[0] <= 0 || v.dims[1] <= 0 || v.dims[2] <= 0)
    throw InvalidArgument("label volume dims must be positive");
  check_affine(v.affine);
  const std::size_t n = std::size_t(v.dims[0]) * v.dims[1] * v.dims[2];
  if (v.data.size() != n) throw InvalidArgument("label volume data length does not match dims");
  for (std::int32_t x : v.data)
    if (x < 0) throw InvalidArgument("label volume has negative labels");
}

Eigen::Vector3d voxel_to_world(const Eigen::Matrix4d& affine, const Eigen::Vector3d& index) {
  return affine.block<3, 3>(0, 0) * index + affine.block<3, 1>(0, 3);
}

Volume midpoint_frame(const Volume& v) {
  validate(v);
  const int f = v.frames / 2;
  Volume out;
  out.dims = v.dims;
  out.frames = 1;
  out.affine = v.affine;
  const std::size_t n = v.voxels_per_frame();
  out.data.assign(v.data.begin() + std::ptrdiff_t(n) * f, v.data.begin() + std::ptrdiff_t(n) * (f + 1));
  return out;
}

Volume average_frames(const Volume& v) {
  validate(v);
  Volume out;
  out.dims = v.dims;
  out.frames = 1;
  out.affine = v.affine;
  const std::size_t n = v.voxels_per_frame();
  out.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int f = 0; f < v.frames; ++f) acc += v.data[i + n * f];
    out.data[i] = float(acc / v.frames);
  }
  return out;
}

bool same_grid(const std::array<int, 3>& da, const Eigen::Matrix4d& aa,
               const std::array<int, 3>& db, const Eigen::Matrix4d& ab, double tol) {
  return da == db && (aa - ab).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace jump
