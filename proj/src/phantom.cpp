#include "jump/phantom.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "jump/resample.hpp"
#include "jump/rng.hpp"

namespace jump {

namespace {

struct Blob {
  Eigen::Vector3d center;  // world mm
  Eigen::Vector3d semi;    // semi-axes mm
};

// Blob sites: a fixed spread tetrahedron first (guarantees non-coplanar
// centroids), then seeded rejection-sampled extras.
std::vector<Blob> place_blobs(const PhantomSpec& spec, SplitMix64& rng) {
  const Eigen::Vector3d extent(spec.grid[0] * spec.voxel_mm, spec.grid[1] * spec.voxel_mm,
                               spec.grid[2] * spec.voxel_mm);
  const double min_extent = extent.minCoeff();

  const double r_lo = 4.0, r_hi = 7.0;
  // keep blobs inside the field of view under the worst latent motion
  const double margin = r_hi + 2.0 * spec.trans_scale + 2.0 * spec.rot_scale * min_extent + 2.0;
  const double lo = -0.5 * min_extent + margin;
  const double hi = 0.5 * min_extent - margin;
  if (hi - lo < 2.0 * r_hi)
    throw InvalidSpec("grid too small for the requested phantom (usable core " +
                      std::to_string(hi - lo) + " mm)");

  const double span = hi - lo;
  std::vector<Blob> blobs;
  const double tetra[4][3] = {{0.22, 0.22, 0.18}, {0.78, 0.30, 0.25}, {0.35, 0.78, 0.30}, {0.52, 0.42, 0.82}};
  auto radius = [&](double u) { return r_lo + (r_hi - r_lo) * u; };

  for (int i = 0; i < std::min(4, spec.n_labels); ++i) {
    Blob b;
    b.center = Eigen::Vector3d(lo + span * tetra[i][0], lo + span * tetra[i][1], lo + span * tetra[i][2]);
    const double r = radius(rng.uniform());
    b.semi = Eigen::Vector3d(r * (0.8 + 0.4 * rng.uniform()), r * (0.8 + 0.4 * rng.uniform()),
                             r * (0.8 + 0.4 * rng.uniform()));
    blobs.push_back(b);
  }
  int attempts = 0;
  while (int(blobs.size()) < spec.n_labels) {
    if (++attempts > 200 * spec.n_labels)
      throw InvalidSpec("grid too small for " + std::to_string(spec.n_labels) + " labels");
    Blob b;
    b.center = Eigen::Vector3d(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
    const double r = radius(rng.uniform());
    b.semi = Eigen::Vector3d(r * (0.8 + 0.4 * rng.uniform()), r * (0.8 + 0.4 * rng.uniform()),
                             r * (0.8 + 0.4 * rng.uniform()));
    bool ok = true;
    for (const Blob& o : blobs)
      if ((b.center - o.center).norm() < b.semi.maxCoeff() + o.semi.maxCoeff() + 3.0) ok = false;
    if (ok) blobs.push_back(b);
  }
  return blobs;
}

LabelVolume rasterize(const PhantomSpec& spec, const std::vector<Blob>& blobs,
                      const Eigen::Matrix4d& affine) {
  LabelVolume lv;
  lv.dims = spec.grid;
  lv.affine = affine;
  lv.data.assign(std::size_t(lv.dims[0]) * lv.dims[1] * lv.dims[2], 0);
  const Eigen::Matrix3d rot = affine.block<3, 3>(0, 0);
  const Eigen::Vector3d off = affine.block<3, 1>(0, 3);
  for (int k = 0; k < lv.dims[2]; ++k)
    for (int j = 0; j < lv.dims[1]; ++j)
      for (int i = 0; i < lv.dims[0]; ++i) {
        const Eigen::Vector3d w = rot * Eigen::Vector3d(i, j, k) + off;
        for (std::size_t l = 0; l < blobs.size(); ++l) {
          const Eigen::Vector3d d = (w - blobs[l].center).cwiseQuotient(blobs[l].semi);
          if (d.squaredNorm() <= 1.0) {
            lv.at(i, j, k) = std::int32_t(l + 1);
            break;
          }
        }
      }
  lv.rebuild_label_set();
  return lv;
}

// separable 3-tap [1,2,1]/4 box smoothing, one pass per axis
void smooth_inplace(Volume& v) {
  Volume tmp = v;
  for (int axis = 0; axis < 3; ++axis) {
    const int di = axis == 0 ? 1 : 0, dj = axis == 1 ? 1 : 0, dk = axis == 2 ? 1 : 0;
    for (int k = 0; k < v.dims[2]; ++k)
      for (int j = 0; j < v.dims[1]; ++j)
        for (int i = 0; i < v.dims[0]; ++i) {
          const int im = std::max(i - di, 0), jm = std::max(j - dj, 0), km = std::max(k - dk, 0);
          const int ip = std::min(i + di, v.dims[0] - 1), jp = std::min(j + dj, v.dims[1] - 1),
                    kp = std::min(k + dk, v.dims[2] - 1);
          tmp.at(i, j, k) =
              0.25f * (v.at(im, jm, km) + 2.0f * v.at(i, j, k) + v.at(ip, jp, kp));
        }
    std::swap(v.data, tmp.data);
  }
}

}  // namespace

PhantomSession make_session(const PhantomSpec& spec) {
  if (spec.n_modalities < 2) throw InvalidSpec("need at least 2 modalities");
  if (spec.n_labels < 4) throw InvalidSpec("need at least 4 labels");
  if (spec.grid[0] < 8 || spec.grid[1] < 8 || spec.grid[2] < 8)
    throw InvalidSpec("grid must be at least 8 voxels per axis");
  if (spec.voxel_mm <= 0.0) throw InvalidSpec("voxel size must be positive");
  if (spec.rot_scale < 0.0 || spec.rot_scale > 0.2)
    throw InvalidSpec("rot_scale must lie in [0, 0.2] rad");
  if (spec.trans_scale < 0.0 || spec.trans_scale > 10.0)
    throw InvalidSpec("trans_scale must lie in [0, 10] mm");
  if (spec.frames < 1) throw InvalidSpec("frames must be >= 1");

  SplitMix64 rng(spec.seed);
  const std::vector<Blob> blobs = place_blobs(spec, rng);

  // world origin at the grid center so rotations pivot near the phantom
  Eigen::Matrix4d base_affine = Eigen::Matrix4d::Identity();
  for (int a = 0; a < 3; ++a) {
    base_affine(a, a) = spec.voxel_mm;
    base_affine(a, 3) = -0.5 * spec.voxel_mm * (spec.grid[a] - 1);
  }

  PhantomSession s;
  s.base_labels = rasterize(spec, blobs, base_affine);

  // zero-sum latent transforms
  const int n = spec.n_modalities;
  std::vector<Vector6d> draws(static_cast<std::size_t>(n));
  Vector6d mean = Vector6d::Zero();
  for (auto& d : draws) {
    for (int j = 0; j < 3; ++j) d[j] = rng.uniform(-spec.rot_scale, spec.rot_scale);
    for (int j = 3; j < 6; ++j) d[j] = rng.uniform(-spec.trans_scale, spec.trans_scale);
    mean += d;
  }
  mean /= double(n);
  for (int i = 0; i < n; ++i)
    s.latents.push_back(TangentVector::from_vector(draws[std::size_t(i)] - mean));

  // per-modality contrast lookup (label 0 stays dark)
  std::vector<std::vector<float>> lut(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    lut[std::size_t(m)].resize(std::size_t(spec.n_labels) + 1);
    lut[std::size_t(m)][0] = 0.0f;
    for (int l = 1; l <= spec.n_labels; ++l)
      lut[std::size_t(m)][std::size_t(l)] = float(0.25 + 0.75 * rng.uniform());
  }

  for (int m = 0; m < n; ++m) {
    s.ids.push_back(m == 0 ? "t1w" : "mod" + std::to_string(m));
    const RigidTransform pose = exp_map(s.latents[std::size_t(m)]);

    LabelVolume lv;
    if (spec.render == PhantomSpec::Render::header) {
      lv = s.base_labels;
      lv.affine = pose.matrix() * base_affine;
    } else {
      // image content at p equals base content at exp(T_m)^-1 p; pulling with
      // the negated latent onto the base grid renders exactly that
      const TemplateSpace frame{spec.grid, base_affine, "base"};
      lv = resample_to_template(s.base_labels, -s.latents[std::size_t(m)], frame);
    }

    Volume img;
    img.dims = lv.dims;
    img.affine = lv.affine;
    img.data.resize(lv.data.size());
    for (std::size_t i = 0; i < lv.data.size(); ++i)
      img.data[i] = lut[std::size_t(m)][std::size_t(lv.data[i])];
    smooth_inplace(img);

    const bool dynamic = spec.frames > 1 && m == n - 1;
    if (dynamic) {
      Volume series;
      series.dims = img.dims;
      series.frames = spec.frames;
      series.affine = img.affine;
      series.data.resize(img.data.size() * std::size_t(spec.frames));
      // frame scales average exactly to 1
      for (int f = 0; f < spec.frames; ++f) {
        const float scale = float(0.9 + 0.2 * f / (spec.frames - 1));
        for (std::size_t i = 0; i < img.data.size(); ++i)
          series.data[i + img.data.size() * std::size_t(f)] = scale * img.data[i];
      }
      img = std::move(series);
    }
    s.images.push_back(std::move(img));
    s.label_maps.push_back(std::move(lv));
  }
  return s;
}

ObservationSet exact_observations(const std::vector<TangentVector>& latents,
                                  const std::vector<std::pair<int, int>>& pairs) {
  ObservationSet obs = build_observation_set(int(latents.size()), pairs);
  for (auto& o : obs.observations)
    o.logR = latents[std::size_t(o.tgt)] - latents[std::size_t(o.ref)];
  return obs;
}

ObservationSet group_observations(const std::vector<TangentVector>& latents,
                                  const std::vector<std::pair<int, int>>& pairs) {
  ObservationSet obs = build_observation_set(int(latents.size()), pairs);
  for (auto& o : obs.observations)
    o.logR = log_map(compose(exp_map(latents[std::size_t(o.tgt)]),
                             invert(exp_map(latents[std::size_t(o.ref)]))));
  return obs;
}

ObservationSet corrupt_observations(const ObservationSet& obs,
                                    const std::vector<OutlierEdge>& outliers, double noise_scale,
                                    std::uint64_t seed) {
  if (noise_scale < 0.0) throw InvalidArgument("noise scale must be non-negative");
  ObservationSet out = obs;
  if (noise_scale > 0.0) {
    SplitMix64 rng(seed);
    for (auto& o : out.observations)
      for (int j = 0; j < 6; ++j) o.logR[j] += rng.laplace(noise_scale);
  }
  for (const auto& ol : outliers) {
    bool found = false;
    for (auto& o : out.observations) {
      if (o.ref == ol.ref && o.tgt == ol.tgt) {
        for (int j = 0; j < 6; ++j) o.logR[j] += ol.delta[j];
        found = true;
        break;
      }
    }
    if (!found)
      throw InvalidArgument("outlier edge (" + std::to_string(ol.ref) + "," +
                            std::to_string(ol.tgt) + ") not among the observations");
  }
  return out;
}

}  // namespace jump
