#include "jump/resample.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace jump {

TemplateSpace define_template(const Volume& anchor, const TangentVector& anchor_latent,
                              const std::string& modality_id) {
  validate(anchor);
  TemplateSpace tpl;
  tpl.grid_dims = anchor.dims;
  tpl.world_affine = invert(exp_map(anchor_latent)).matrix() * anchor.affine;
  tpl.source_modality = modality_id;
  return tpl;
}

float interpolate_trilinear(const Volume& v, const Eigen::Vector3d& q, float fill, int frame) {
  for (int a = 0; a < 3; ++a)
    if (!(q[a] >= 0.0 && q[a] <= double(v.dims[a] - 1))) return fill;

  int i0[3], i1[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    i0[a] = int(std::floor(q[a]));
    if (i0[a] == v.dims[a] - 1) {  // exactly on the upper edge
      i1[a] = i0[a];
      f[a] = 0.0;
    } else {
      i1[a] = i0[a] + 1;
      f[a] = q[a] - i0[a];
    }
  }
  const double w0x = 1.0 - f[0], w0y = 1.0 - f[1], w0z = 1.0 - f[2];
  double acc = 0.0;
  acc += w0x * w0y * w0z * v.at(i0[0], i0[1], i0[2], frame);
  acc += f[0] * w0y * w0z * v.at(i1[0], i0[1], i0[2], frame);
  acc += w0x * f[1] * w0z * v.at(i0[0], i1[1], i0[2], frame);
  acc += f[0] * f[1] * w0z * v.at(i1[0], i1[1], i0[2], frame);
  acc += w0x * w0y * f[2] * v.at(i0[0], i0[1], i1[2], frame);
  acc += f[0] * w0y * f[2] * v.at(i1[0], i0[1], i1[2], frame);
  acc += w0x * f[1] * f[2] * v.at(i0[0], i1[1], i1[2], frame);
  acc += f[0] * f[1] * f[2] * v.at(i1[0], i1[1], i1[2], frame);
  return float(acc);
}

namespace {

// template index -> source voxel coordinate, as one homogeneous matrix
Eigen::Matrix4d pullback_matrix(const Eigen::Matrix4d& source_affine, const TangentVector& latent,
                                const TemplateSpace& tpl) {
  return source_affine.inverse() * exp_map(latent).matrix() * tpl.world_affine;
}

inline Eigen::Vector3d map_index(const Eigen::Matrix4d& m, int i, int j, int k) {
  return m.block<3, 3>(0, 0) * Eigen::Vector3d(i, j, k) + m.block<3, 1>(0, 3);
}

}  // namespace

Volume resample_to_template(const Volume& v, const TangentVector& latent, const TemplateSpace& tpl,
                            Interp method, float fill) {
  validate(v);
  const Eigen::Matrix4d m = pullback_matrix(v.affine, latent, tpl);

  Volume out;
  out.dims = tpl.grid_dims;
  out.frames = v.frames;
  out.affine = tpl.world_affine;
  out.data.resize(out.voxels_per_frame() * std::size_t(out.frames));

  for (int f = 0; f < v.frames; ++f)
    for (int k = 0; k < out.dims[2]; ++k)
      for (int j = 0; j < out.dims[1]; ++j)
        for (int i = 0; i < out.dims[0]; ++i) {
          const Eigen::Vector3d q = map_index(m, i, j, k);
          float val;
          if (method == Interp::trilinear) {
            val = interpolate_trilinear(v, q, fill, f);
          } else {
            const long qi = std::lround(q[0]), qj = std::lround(q[1]), qk = std::lround(q[2]);
            val = (qi < 0 || qj < 0 || qk < 0 || qi >= v.dims[0] || qj >= v.dims[1] || qk >= v.dims[2])
                      ? fill
                      : v.at(int(qi), int(qj), int(qk), f);
          }
          out.at(i, j, k, f) = val;
        }
  return out;
}

LabelVolume resample_to_template(const LabelVolume& v, const TangentVector& latent,
                                 const TemplateSpace& tpl) {
  validate(v);
  const Eigen::Matrix4d m = pullback_matrix(v.affine, latent, tpl);

  LabelVolume out;
  out.dims = tpl.grid_dims;
  out.affine = tpl.world_affine;
  out.data.resize(std::size_t(out.dims[0]) * out.dims[1] * out.dims[2]);

  for (int k = 0; k < out.dims[2]; ++k)
    for (int j = 0; j < out.dims[1]; ++j)
      for (int i = 0; i < out.dims[0]; ++i) {
        const Eigen::Vector3d q = map_index(m, i, j, k);
        const long qi = std::lround(q[0]), qj = std::lround(q[1]), qk = std::lround(q[2]);
        out.at(i, j, k) =
            (qi < 0 || qj < 0 || qk < 0 || qi >= v.dims[0] || qj >= v.dims[1] || qk >= v.dims[2])
                ? 0
                : v.at(int(qi), int(qj), int(qk));
      }
  out.rebuild_label_set();
  return out;
}

}  // namespace jump
