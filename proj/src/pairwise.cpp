#include "jump/pairwise.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

namespace jump {

CentroidSet label_centroids(const LabelVolume& lv) {
  validate(lv);
  std::map<std::int32_t, Eigen::Vector4d> acc;  // sum of world coords + count
  const Eigen::Matrix3d rot = lv.affine.block<3, 3>(0, 0);
  const Eigen::Vector3d off = lv.affine.block<3, 1>(0, 3);
  for (int k = 0; k < lv.dims[2]; ++k)
    for (int j = 0; j < lv.dims[1]; ++j)
      for (int i = 0; i < lv.dims[0]; ++i) {
        const std::int32_t l = lv.at(i, j, k);
        if (l == 0) continue;
        const Eigen::Vector3d w = rot * Eigen::Vector3d(i, j, k) + off;
        auto& a = acc[l];
        a.head<3>() += w;
        a[3] += 1.0;
      }
  if (acc.empty()) throw EmptyParcellation("parcellation has no foreground voxels");

  const double voxel_volume = std::abs(rot.determinant());
  CentroidSet out;
  for (const auto& [label, a] : acc) {
    Centroid c;
    c.position = a.head<3>() / a[3];
    c.weight = a[3] * voxel_volume;
    out[label] = c;
  }
  return out;
}

RigidTransform weighted_procrustes(const CentroidSet& src, const CentroidSet& dst) {
  std::vector<Eigen::Vector3d> xs, ys;
  std::vector<double> ws;
  for (const auto& [label, cs] : src) {
    const auto it = dst.find(label);
    if (it == dst.end()) continue;
    xs.push_back(cs.position);
    ys.push_back(it->second.position);
    ws.push_back(std::sqrt(cs.weight * it->second.weight));
  }
  const std::size_t n = xs.size();
  if (n < 3)
    throw InsufficientCorrespondence("only " + std::to_string(n) + " shared labels; need at least 3");

  double wsum = 0.0;
  Eigen::Vector3d mx = Eigen::Vector3d::Zero(), my = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    wsum += ws[i];
    mx += ws[i] * xs[i];
    my += ws[i] * ys[i];
  }
  mx /= wsum;
  my /= wsum;

  Eigen::MatrixXd xc(3, n), yc(3, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sw = std::sqrt(ws[i]);
    xc.col(Eigen::Index(i)) = sw * (xs[i] - mx);
    yc.col(Eigen::Index(i)) = sw * (ys[i] - my);
  }

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> shape(xc);
    if (shape.singularValues()[1] <= 1e-8)
      throw DegenerateGeometry("shared centroids are collinear or coincident");
  }

  const Eigen::Matrix3d h = xc * yc.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
  return RigidTransform(r, my - r * mx);
}

TangentVector register_pair(const LabelVolume& ref, const LabelVolume& tgt) {
  return log_map(weighted_procrustes(label_centroids(ref), label_centroids(tgt)));
}

}  // namespace jump
