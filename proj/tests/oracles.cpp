#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracles {

Eigen::Matrix4d expm(const Eigen::Matrix4d& a) {
  double norm = a.cwiseAbs().sum();
  int squarings = 0;
  Eigen::Matrix4d s = a;
  while (norm > 0.5) {
    s *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  Eigen::Matrix4d result = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = term * s / double(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Eigen::Vector3d rotate_axis_angle(const Eigen::Vector3d& axis, double angle,
                                  const Eigen::Vector3d& p) {
  const Eigen::Vector3d a = axis.normalized();
  return p * std::cos(angle) + a.cross(p) * std::sin(angle) +
         a * (a.dot(p)) * (1.0 - std::cos(angle));
}

LpResult lad_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& cw) {
  const int k = int(a.rows());
  const int m = int(a.cols());
  const Eigen::VectorXd c = cw.size() ? cw : Eigen::VectorXd::Ones(k);

  // variables: x+ (m), x- (m), p (k), q (k)
  const int nv = 2 * m + 2 * k;
  Eigen::MatrixXd tab(k, nv);
  tab << a, -a, Eigen::MatrixXd::Identity(k, k), -Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd rhs = y;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nv);
  for (int i = 0; i < k; ++i) {
    cost[2 * m + i] = c[i];
    cost[2 * m + k + i] = c[i];
  }

  // initial basis: p_i when y_i >= 0 else q_i (identity columns)
  std::vector<int> basis(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    if (rhs[i] >= 0.0) {
      basis[std::size_t(i)] = 2 * m + i;
    } else {
      basis[std::size_t(i)] = 2 * m + k + i;
      tab.row(i) = -tab.row(i);
      rhs[i] = -rhs[i];
    }
  }
  const int max_pivots = 20000;
  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    // reduced costs: cost_j - c_B^T B^{-1} A_j; tableau is kept in canonical
    // form so B^{-1}A is `tab` and c_B^T tab gives the dual row.
    Eigen::VectorXd cb(k);
    for (int i = 0; i < k; ++i) cb[i] = cost[basis[std::size_t(i)]];
    Eigen::VectorXd reduced = cost - tab.transpose() * cb;

    // Bland's rule: smallest index with negative reduced cost
    int enter = -1;
    for (int j = 0; j < nv; ++j) {
      if (reduced[j] < -1e-11) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;  // optimal

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < k; ++i) {
      if (tab(i, enter) > 1e-11) {
        const double ratio = rhs[i] / tab(i, enter);
        if (leave < 0 || ratio < best_ratio - 1e-13 ||
            (std::abs(ratio - best_ratio) <= 1e-13 && basis[std::size_t(i)] < basis[std::size_t(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("lad_lp: unbounded (should not happen)");

    // pivot
    const double pv = tab(leave, enter);
    tab.row(leave) /= pv;
    rhs[leave] /= pv;
    for (int i = 0; i < k; ++i) {
      if (i == leave) continue;
      const double f = tab(i, enter);
      if (f != 0.0) {
        tab.row(i) -= f * tab.row(leave);
        rhs[i] -= f * rhs[leave];
      }
    }
    basis[std::size_t(leave)] = enter;
  }

  LpResult res;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(nv);
  for (int i = 0; i < k; ++i) full[basis[std::size_t(i)]] = rhs[i];
  res.x = full.head(m) - full.segment(m, m);
  res.value = cost.dot(full);
  return res;
}

double dice(const jump::LabelVolume& a, const jump::LabelVolume& b, std::int32_t label) {
  if (a.dims != b.dims) throw std::runtime_error("dice: grids differ");
  long na = 0, nb = 0, ninter = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool ia = a.data[i] == label;
    const bool ib = b.data[i] == label;
    na += ia;
    nb += ib;
    ninter += ia && ib;
  }
  if (na + nb == 0) return 0.0;
  return 2.0 * double(ninter) / double(na + nb);
}

}  // namespace oracles
