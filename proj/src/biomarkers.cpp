#include "jump/biomarkers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>

namespace jump {

void validate(const std::vector<RegionSpec>& regions) {
  if (regions.empty()) throw InvalidArgument("region set is empty");
  int n_ref = 0;
  for (const auto& r : regions) {
    if (r.name.empty()) throw InvalidArgument("region with empty name");
    if (r.labels.empty()) throw InvalidArgument("region '" + r.name + "' has no labels");
    if (r.reference) ++n_ref;
  }
  if (n_ref != 1)
    throw InvalidArgument("region set must have exactly one reference region, got " +
                          std::to_string(n_ref));
}

std::vector<BiomarkerRow> suvr(const Volume& pet, const LabelVolume& seg,
                               const std::vector<RegionSpec>& regions,
                               const std::string& session_id) {
  validate(pet);
  validate(seg);
  validate(regions);
  if (pet.frames != 1) throw InvalidArgument("suvr expects a single-frame PET volume (average first)");
  if (!same_grid(pet.dims, pet.affine, seg.dims, seg.affine))
    throw InvalidArgument("PET and segmentation are not on the same grid");

  // label -> (sum, count) in one pass
  std::map<std::int32_t, std::pair<double, long>> stats;
  for (std::size_t i = 0; i < pet.data.size(); ++i) {
    const std::int32_t l = seg.data[i];
    if (l == 0) continue;
    auto& s = stats[l];
    s.first += pet.data[i];
    s.second += 1;
  }

  auto region_mean = [&](const RegionSpec& r) -> std::optional<double> {
    double sum = 0.0;
    long count = 0;
    for (std::int32_t l : r.labels) {
      const auto it = stats.find(l);
      if (it == stats.end()) continue;
      sum += it->second.first;
      count += it->second.second;
    }
    if (count == 0) return std::nullopt;
    return sum / double(count);
  };

  const RegionSpec* ref = nullptr;
  for (const auto& r : regions)
    if (r.reference) ref = &r;
  const std::optional<double> ref_mean = region_mean(*ref);
  if (!ref_mean || *ref_mean <= 0.0)
    throw InvalidReference("reference region '" + ref->name + "' has " +
                           (ref_mean ? "non-positive mean" : "no voxels"));

  std::vector<BiomarkerRow> rows;
  for (const auto& r : regions) {
    BiomarkerRow row;
    row.session = session_id;
    row.region = r.name;
    if (const auto m = region_mean(r)) row.value = *m / *ref_mean;
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd nuisance_regress(const Eigen::MatrixXd& series, const Eigen::MatrixXd& confounds) {
  const Eigen::Index t = series.rows();
  const Eigen::Index c = confounds.cols();
  if (confounds.rows() != t) throw InvalidArgument("series and confounds row counts differ");
  if (t <= c + 1)
    throw InvalidArgument("need more time points than confounds plus intercept");

  Eigen::MatrixXd design(t, c + 1);
  design.leftCols(c) = confounds;
  design.col(c).setOnes();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < c + 1)
    throw CollinearConfounds("confound design is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(c + 1) + ")");
  return series - design * qr.solve(series);
}

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw InvalidArgument("incomplete_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // symmetry keeps the continued fraction in its fast-convergence region
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);

  // modified Lentz evaluation of the standard continued fraction
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return std::exp(ln_front) * h / a;
}

double student_t_cdf(double t, double dof) {
  if (dof <= 0.0) throw InvalidArgument("student_t_cdf: dof must be positive");
  if (t == 0.0) return 0.5;
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * incomplete_beta(dof / 2.0, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& s, const char* which) {
    if (s.size() < 2) throw InvalidSample(std::string("sample ") + which + " has fewer than 2 values");
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= double(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= double(s.size() - 1);
    if (var <= 0.0) throw InvalidSample(std::string("sample ") + which + " has zero variance");
    return std::pair<double, double>(mean, var);
  };
  const auto [ma, va] = moments(a, "a");
  const auto [mb, vb] = moments(b, "b");
  const double na = double(a.size()), nb = double(b.size());
  const double sa = va / na, sb = vb / nb;

  WelchResult res;
  res.t = (ma - mb) / std::sqrt(sa + sb);
  res.dof = (sa + sb) * (sa + sb) /
            (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  res.p = 2.0 * (1.0 - student_t_cdf(std::abs(res.t), res.dof));
  return res;
}

}  // namespace jump
