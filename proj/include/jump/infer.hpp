#pragma once

#include <Eigen/Core>
#include <vector>

#include "jump/graph.hpp"

namespace jump {

struct LadOptions {
  double epsilon = 1e-8;  // residual floor in the IRLS weights
  double tol = 1e-10;     // stop when the max-norm step drops below this
  int max_iters = 500;
};

struct LadResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  // Smoothed L1 objective before each reweighted step (monotone under the
  // majorize-minimize construction); last entry is the final objective.
  std::vector<double> objective_trace;
};

// Weighted least-absolute-deviations fit: minimizes sum_i c_i |y_i - a_i.x|
// by IRLS (initialize at the weighted L2 solution, reweight rows by
// c_i / max(|r_i|, epsilon)). row_weights may be empty (all ones). Penalty
// terms are passed as extra rows of the design with their weight in
// row_weights. Throws unidentifiable when the design is rank deficient; a
// non-converged run returns the best iterate with converged = false.
LadResult solve_lad(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& row_weights, const LadOptions& opts = {});

struct InferenceConfig {
  double b_ratio = 1.0;       // b_M / b_Z weight of the centering penalty (soft mode)
  double irls_epsilon = 1e-8;
  int max_iters = 500;
  double tol = 1e-10;
  bool hard_center = false;   // true: enforce sum_n T_n = 0 exactly
  // Exact vertex refinement: enumerate spanning-tree-consistent candidate
  // solutions (the vertices of the LAD polytope) and keep the best, breaking
  // exact ties by minimum norm. Capped by the subset budget below; graphs too
  // large for the budget keep the IRLS iterate.
  bool vertex_refine = true;
  long max_tree_subsets = 2'000'000;
};

struct LatentSolution {
  std::vector<TangentVector> latents;    // T_n, template -> modality n
  std::vector<TangentVector> residuals;  // R_k - (W T) at each edge
  double objective = 0.0;                // sum over parameters of data + penalty terms
  int iterations = 0;                    // max IRLS iterations over the 6 solves
  bool converged = false;
};

// MAP estimate of the latent template-to-modality transforms: six independent
// LAD problems with a centering term, either as a soft penalty
// b_ratio * |sum_n T_n| or as a hard zero-sum constraint.
LatentSolution infer_latents(const ObservationSet& obs, const InferenceConfig& cfg = {});

// Closed-form least-squares counterpart (zero-sum constrained); reference
// estimator for robustness comparisons.
std::vector<TangentVector> solve_latents_l2(const ObservationSet& obs);

}  // namespace jump
