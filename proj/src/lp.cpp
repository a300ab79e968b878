#include "polylearn/lp.hpp"

#include <cmath>
#include <limits>

namespace polylearn {
namespace {

constexpr double kPivotTol = 1e-11;

class Tableau {
 public:
  Tableau(int rows, int cols) : t_(Matrix::Zero(rows, cols + 1)), basis_(rows, -1), cols_(cols) {}

  double& at(int r, int c) { return t_(r, c); }
  double& rhs(int r) { return t_(r, cols_); }
  int rows() const { return static_cast<int>(t_.rows()); }
  int cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int r, int c, Eigen::VectorXd& z) {
    double p = t_(r, c);
    t_.row(r) /= p;
    for (int i = 0; i < rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    if (z[c] != 0.0) z -= z[c] * t_.row(r).transpose();
    basis_[r] = c;
  }

  // Minimizes the objective whose reduced-cost row is z (last entry holds -value).
  // Returns false when unbounded.
  bool minimize(Eigen::VectorXd& z, const std::vector<bool>& allowed) {
    for (int iter = 0; iter < 50000; ++iter) {
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (allowed[j] && z[j] < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows(); ++i) {
        double a = t_(i, enter);
        if (a > kPivotTol) {
          double ratio = t_(i, cols_) / a;
          if (ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter, z);
    }
    throw GeometryError("linear program iteration limit");
  }

  Eigen::VectorXd reduced_costs(const Eigen::VectorXd& cost) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(cols_ + 1);
    z.head(cols_) = cost;
    for (int i = 0; i < rows(); ++i) {
      double cb = cost[basis_[i]];
      if (cb != 0.0) z -= cb * t_.row(i).transpose();
    }
    return z;
  }

 private:
  Matrix t_;
  std::vector<int> basis_;
  int cols_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.A.rows());
  const int n = static_cast<int>(lp.A.cols());
  std::vector<int> pos(n), neg(n, -1);
  int nv = 0;
  for (int j = 0; j < n; ++j) {
    pos[j] = nv++;
    if (!lp.free_vars.empty() && lp.free_vars[j]) neg[j] = nv++;
  }
  int n_art = 0;
  for (int i = 0; i < m; ++i) n_art += lp.b[i] < 0 ? 1 : 0;
  const int slack0 = nv, art0 = nv + m, cols = nv + m + n_art;

  Tableau tab(m, cols);
  int art = art0;
  for (int i = 0; i < m; ++i) {
    double sign = lp.b[i] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tab.at(i, pos[j]) = sign * lp.A(i, j);
      if (neg[j] >= 0) tab.at(i, neg[j]) = -sign * lp.A(i, j);
    }
    tab.at(i, slack0 + i) = sign;
    tab.rhs(i) = sign * lp.b[i];
    if (sign < 0) {
      tab.at(i, art) = 1.0;
      tab.basis()[i] = art++;
    } else {
      tab.basis()[i] = slack0 + i;
    }
  }

  LpResult result;
  std::vector<bool> allowed(cols, true);
  if (n_art > 0) {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
    for (int j = art0; j < cols; ++j) cost[j] = 1.0;
    Eigen::VectorXd z = tab.reduced_costs(cost);
    tab.minimize(z, allowed);
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis()[i] >= art0) infeas += tab.rhs(i);
    if (infeas > 1e-9) return result;
    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[i] < art0) continue;
      for (int j = 0; j < art0; ++j) {
        if (std::abs(tab.at(i, j)) > 1e-9) {
          Eigen::VectorXd dummy = Eigen::VectorXd::Zero(cols + 1);
          tab.pivot(i, j, dummy);
          break;
        }
      }
    }
    for (int j = art0; j < cols; ++j) allowed[j] = false;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  for (int j = 0; j < n; ++j) {
    cost[pos[j]] = -lp.c[j];
    if (neg[j] >= 0) cost[neg[j]] = lp.c[j];
  }
  Eigen::VectorXd z = tab.reduced_costs(cost);
  if (!tab.minimize(z, allowed)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < m; ++i) xs[tab.basis()[i]] = tab.rhs(i);
  result.x.resize(n);
  for (int j = 0; j < n; ++j) result.x[j] = xs[pos[j]] - (neg[j] >= 0 ? xs[neg[j]] : 0.0);
  result.value = lp.c.dot(result.x);
  result.status = LpStatus::kOptimal;
  return result;
}

}  // namespace polylearn
