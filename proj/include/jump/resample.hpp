#pragma once

#include <string>

#include "jump/se3.hpp"
#include "jump/volume.hpp"

namespace jump {

// Session-template sampling frame: the anchor grid with its world frame
// mapped back through the anchor's latent transform so the template sits at
// the graph center rather than at the anchor pose.
struct TemplateSpace {
  std::array<int, 3> grid_dims{0, 0, 0};
  Eigen::Matrix4d world_affine = Eigen::Matrix4d::Identity();
  std::string source_modality;
};

enum class Interp { trilinear, nearest };

// world_affine = invert(exp(anchor_latent)) * anchor.affine.
TemplateSpace define_template(const Volume& anchor, const TangentVector& anchor_latent,
                              const std::string& modality_id);

// 8-neighbor blend at fractional voxel coordinate q; any axis outside
// [0, dim-1] yields the fill value.
float interpolate_trilinear(const Volume& v, const Eigen::Vector3d& q, float fill, int frame = 0);

// Pull-back resampling: for each template voxel i, sample the volume at
// affine^{-1} * exp(latent) * tpl.world_affine * i. Frames are resampled
// independently.
Volume resample_to_template(const Volume& v, const TangentVector& latent, const TemplateSpace& tpl,
                            Interp method = Interp::trilinear, float fill = 0.0f);

// Nearest-neighbor pull-back for parcellations (fill = background).
LabelVolume resample_to_template(const LabelVolume& v, const TangentVector& latent,
                                 const TemplateSpace& tpl);

}  // namespace jump
