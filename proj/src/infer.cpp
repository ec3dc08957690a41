#include "jump/infer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace jump {

namespace {

// Huber-style smoothing of |r| used by the IRLS majorizer.
double smoothed_abs(double r, double eps) {
  const double a = std::abs(r);
  return a >= eps ? a : r * r / (2.0 * eps) + eps / 2.0;
}

double smoothed_objective(const Eigen::VectorXd& r, const Eigen::VectorXd& c, double eps) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += c[i] * smoothed_abs(r[i], eps);
  return s;
}

Eigen::VectorXd weighted_ls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  return (sw.asDiagonal() * a).colPivHouseholderQr().solve(sw.asDiagonal() * y);
}

}  // namespace

LadResult solve_lad(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& row_weights, const LadOptions& opts) {
  const Eigen::Index k = design.rows();
  const Eigen::Index m = design.cols();
  if (y.size() != k) throw InvalidArgument("solve_lad: design rows and y length differ");
  Eigen::VectorXd c = row_weights.size() ? row_weights : Eigen::VectorXd::Ones(k);
  if (c.size() != k) throw InvalidArgument("solve_lad: row_weights length mismatch");
  if ((c.array() <= 0.0).any()) throw InvalidArgument("solve_lad: row weights must be positive");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < m)
    throw Unidentifiable("solve_lad: design has rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(m));

  LadResult res;
  res.x = weighted_ls(design, y, c);

  Eigen::VectorXd r = y - design * res.x;
  res.objective_trace.push_back(smoothed_objective(r, c, opts.epsilon));

  double best_obj = res.objective_trace.back();
  Eigen::VectorXd best_x = res.x;

  for (int it = 0; it < opts.max_iters; ++it) {
    Eigen::VectorXd w(k);
    for (Eigen::Index i = 0; i < k; ++i) w[i] = c[i] / std::max(std::abs(r[i]), opts.epsilon);
    const Eigen::VectorXd next = weighted_ls(design, y, w);
    const double step = (next - res.x).cwiseAbs().maxCoeff();
    res.x = next;
    r = y - design * res.x;
    res.iterations = it + 1;
    const double obj = smoothed_objective(r, c, opts.epsilon);
    res.objective_trace.push_back(obj);
    if (obj < best_obj) {
      best_obj = obj;
      best_x = res.x;
    }
    if (step < opts.tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.x = best_x;
  return res;
}

namespace {

// Basis of the zero-sum subspace: T_n = z_n for n < N-1, T_{N-1} = -sum z.
Eigen::MatrixXd zero_sum_basis(int n) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n - 1);
  b.topLeftCorner(n - 1, n - 1).setIdentity();
  b.row(n - 1).setConstant(-1.0);
  return b;
}

long binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long r = 1;
  for (long i = 1; i <= k; ++i) {
    if (r > std::numeric_limits<long>::max() / (n - k + i)) return std::numeric_limits<long>::max();
    r = r * (n - k + i) / i;
  }
  return r;
}

// All spanning trees of the observation graph as lists of edge indices.
std::vector<std::vector<int>> spanning_trees(const ObservationSet& obs, long budget) {
  const int n = obs.n_modalities;
  const int k = int(obs.observations.size());
  const int need = n - 1;
  if (need <= 0 || k < need) return {};
  if (binomial(k, need) > budget) return {};

  std::vector<std::vector<int>> trees;
  std::vector<int> pick(static_cast<std::size_t>(need));
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<int> parent(static_cast<std::size_t>(n));
  while (true) {
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
      while (parent[std::size_t(a)] != a) {
        parent[std::size_t(a)] = parent[std::size_t(parent[std::size_t(a)])];
        a = parent[std::size_t(a)];
      }
      return a;
    };
    bool acyclic = true;
    for (int e : pick) {
      const int fr = find(obs.observations[std::size_t(e)].ref);
      const int ft = find(obs.observations[std::size_t(e)].tgt);
      if (fr == ft) {
        acyclic = false;
        break;
      }
      parent[std::size_t(fr)] = ft;
    }
    if (acyclic) trees.push_back(pick);

    // next combination
    int i = need - 1;
    while (i >= 0 && pick[std::size_t(i)] == k - need + i) --i;
    if (i < 0) break;
    ++pick[std::size_t(i)];
    for (int j = i + 1; j < need; ++j) pick[std::size_t(j)] = pick[std::size_t(j - 1)] + 1;
  }
  return trees;
}

// Zero-sum solution fitting the given tree edges exactly (per parameter).
Eigen::VectorXd tree_fit(const ObservationSet& obs, const std::vector<int>& tree,
                         const Eigen::VectorXd& y) {
  const int n = obs.n_modalities;
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));  // node -> (edge, neighbor)
  for (int e : tree) {
    const auto& o = obs.observations[std::size_t(e)];
    adj[std::size_t(o.ref)].emplace_back(e, o.tgt);
    adj[std::size_t(o.tgt)].emplace_back(e, o.ref);
  }
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
  std::vector<char> done(std::size_t(n), 0);
  std::vector<int> stack{0};
  done[0] = 1;
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    for (auto [e, other] : adj[std::size_t(node)]) {
      if (done[std::size_t(other)]) continue;
      const auto& o = obs.observations[std::size_t(e)];
      // T_tgt - T_ref = y_e
      t[other] = (other == o.tgt) ? t[node] + y[e] : t[node] - y[e];
      done[std::size_t(other)] = 1;
      stack.push_back(other);
    }
  }
  t.array() -= t.mean();
  return t;
}

double lad_objective(const ObservationSet& obs, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& t, double b_ratio, bool hard_center) {
  double s = (y - obs.W * t).cwiseAbs().sum();
  if (!hard_center) s += b_ratio * std::abs(t.sum());
  return s;
}

}  // namespace

LatentSolution infer_latents(const ObservationSet& obs, const InferenceConfig& cfg) {
  check_connectivity(obs);
  const int n = obs.n_modalities;
  const Eigen::Index k = Eigen::Index(obs.observations.size());
  if (k < 1) throw InvalidArgument("infer_latents: need at least one observation");
  if (cfg.b_ratio <= 0.0) throw InvalidArgument("infer_latents: b_ratio must be positive");
  if (cfg.irls_epsilon <= 0.0 || cfg.tol <= 0.0)
    throw InvalidArgument("infer_latents: epsilon and tol must be positive");

  LadOptions lad{cfg.irls_epsilon, cfg.tol, cfg.max_iters};

  // Stacked systems shared by the 6 per-parameter solves.
  Eigen::MatrixXd soft_design;
  Eigen::VectorXd soft_weights;
  Eigen::MatrixXd basis, hard_design;
  if (cfg.hard_center) {
    basis = zero_sum_basis(n);
    hard_design = obs.W * basis;
  } else {
    soft_design.resize(k + 1, n);
    soft_design.topRows(k) = obs.W;
    soft_design.row(k).setOnes();
    soft_weights = Eigen::VectorXd::Ones(k + 1);
    soft_weights[k] = cfg.b_ratio;
  }

  const std::vector<std::vector<int>> trees =
      cfg.vertex_refine ? spanning_trees(obs, cfg.max_tree_subsets) : std::vector<std::vector<int>>{};

  Eigen::MatrixXd latents(n, 6);
  LatentSolution sol;
  sol.converged = true;

  for (int j = 0; j < 6; ++j) {
    Eigen::VectorXd y(k);
    for (Eigen::Index e = 0; e < k; ++e) y[e] = obs.observations[std::size_t(e)].logR[j];

    Eigen::VectorXd t;
    LadResult lr;
    if (cfg.hard_center) {
      lr = solve_lad(hard_design, y, Eigen::VectorXd(), lad);
      t = basis * lr.x;
    } else {
      Eigen::VectorXd ys(k + 1);
      ys << y, 0.0;
      lr = solve_lad(soft_design, ys, soft_weights, lad);
      t = lr.x;
    }
    bool param_ok = lr.converged;
    sol.iterations = std::max(sol.iterations, lr.iterations);

    double obj = lad_objective(obs, y, t, cfg.b_ratio, cfg.hard_center);
    // Exact vertex refinement. Skipped when the IRLS fit is already exact
    // (consistent observations) since the objective cannot improve on ~0.
    if (!trees.empty() && obj > 1e-9 * (1.0 + y.cwiseAbs().sum())) {
      double best_norm = t.squaredNorm();
      for (const auto& tree : trees) {
        const Eigen::VectorXd cand = tree_fit(obs, tree, y);
        const double cobj = lad_objective(obs, y, cand, cfg.b_ratio, cfg.hard_center);
        const double tie = 1e-12 * (1.0 + std::abs(obj));
        const double cnorm = cand.squaredNorm();
        if (cobj < obj - tie || (cobj <= obj + tie && cnorm < best_norm - 1e-15)) {
          obj = std::min(obj, cobj);
          best_norm = cnorm;
          t = cand;
          param_ok = true;
        }
      }
    }
    sol.converged = sol.converged && param_ok;
    sol.objective += obj;
    latents.col(j) = t;
  }

  sol.latents.resize(std::size_t(n));
  for (int i = 0; i < n; ++i)
    sol.latents[std::size_t(i)] = TangentVector::from_vector(latents.row(i).transpose());
  sol.residuals.resize(std::size_t(k));
  for (Eigen::Index e = 0; e < k; ++e) {
    const auto& o = obs.observations[std::size_t(e)];
    TangentVector r;
    for (int j = 0; j < 6; ++j) r[j] = o.logR[j] - (latents(o.tgt, j) - latents(o.ref, j));
    sol.residuals[std::size_t(e)] = r;
  }
  return sol;
}

std::vector<TangentVector> solve_latents_l2(const ObservationSet& obs) {
  check_connectivity(obs);
  const int n = obs.n_modalities;
  const Eigen::Index k = Eigen::Index(obs.observations.size());
  if (k < 1) throw InvalidArgument("solve_latents_l2: need at least one observation");
  const Eigen::MatrixXd basis = zero_sum_basis(n);
  const Eigen::MatrixXd a = obs.W * basis;
  Eigen::MatrixXd rhs(k, 6);
  for (Eigen::Index e = 0; e < k; ++e)
    rhs.row(e) = obs.observations[std::size_t(e)].logR.to_vector().transpose();
  const Eigen::MatrixXd z = a.colPivHouseholderQr().solve(rhs);
  const Eigen::MatrixXd t = basis * z;
  std::vector<TangentVector> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[std::size_t(i)] = TangentVector::from_vector(t.row(i).transpose());
  return out;
}

}  // namespace jump
