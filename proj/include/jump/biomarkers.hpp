#pragma once

#include <Eigen/Core>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jump/volume.hpp"

namespace jump {

// A named group of parcellation labels; exactly one spec in a set carries the
// reference flag (the SUVr denominator region).
struct RegionSpec {
  std::string name;
  std::set<std::int32_t> labels;
  bool reference = false;
};

// Throws unless labels are non-empty and exactly one region is the reference.
void validate(const std::vector<RegionSpec>& regions);

struct BiomarkerRow {
  std::string session;
  std::string region;
  std::optional<double> value;  // missing when the region has no voxels
};

// Mean PET intensity over each region divided by the mean over the reference
// region. PET and segmentation must share the grid. Empty regions yield
// missing values; a non-positive reference mean throws invalid-reference.
std::vector<BiomarkerRow> suvr(const Volume& pet, const LabelVolume& seg,
                               const std::vector<RegionSpec>& regions,
                               const std::string& session_id);

// OLS residuals of each column of series against [confounds, intercept].
// series is T x V, confounds is T x C; requires T > C + 1 and a full-rank
// design (else collinear-confounds).
Eigen::MatrixXd nuisance_regress(const Eigen::MatrixXd& series, const Eigen::MatrixXd& confounds);

struct WelchResult {
  double t = 0.0;
  double p = 1.0;
  double dof = 0.0;
};

// Welch two-sample t statistic with Welch-Satterthwaite degrees of freedom
// and a two-sided p value. Samples need n >= 2 and positive variance.
WelchResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b), relative error ~1e-12 (continued
// fraction); basis of the t CDF below.
double incomplete_beta(double a, double b, double x);

// Student t cumulative distribution function.
double student_t_cdf(double t, double dof);

}  // namespace jump
