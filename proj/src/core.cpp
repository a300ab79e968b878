#include "polylearn/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace polylearn {

Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}

double norm(const Point& x, Norm n) {
  return n == Norm::kL1 ? x.lpNorm<1>() : x.norm();
}

double distance(const Point& a, const Point& b, Norm n) {
  return norm(a - b, n);
}

bool in_simplex(const Point& x, double tol) {
  if (x.size() == 0) return true;
  if (x.minCoeff() < -tol) return false;
  return x.sum() <= 1.0 + tol;
}

Point simplex_vertex(int m, int i) {
  Point p = Point::Zero(m);
  if (i > 0) p[i - 1] = 1.0;
  return p;
}

std::vector<Point> simplex_vertices(int m) {
  std::vector<Point> out;
  for (int i = 0; i <= m; ++i) out.push_back(simplex_vertex(m, i));
  return out;
}

Point project_onto_simplex(const Point& x) {
  Point y = x.cwiseMax(0.0);
  if (y.sum() <= 1.0) return y;
  // Project onto {y >= 0, sum y = 1} by the sorting method.
  std::vector<double> s(x.data(), x.data() + x.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cum += s[i];
    double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (s[i] - t > 0) theta = t;
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

Point expand_reduced(const Point& x) {
  Point p(x.size() + 1);
  p[0] = 1.0 - x.sum();
  p.tail(x.size()) = x;
  return p;
}

Point reduce_full(const Point& p) { return p.tail(p.size() - 1); }

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

double binomial_real(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace polylearn
