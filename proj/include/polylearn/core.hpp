#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace polylearn {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Shared predicate tolerance for membership and equality tests.
inline constexpr double kEta = 1e-9;

enum class Norm { kL2, kL1 };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Raised when an oracle refuses a query because its budget is spent.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted() : Error("query budget exhausted") {}
};

class SearchFailure : public Error {
 public:
  using Error::Error;
};

inline bool near(double a, double b, double tol = kEta) {
  return a - b <= tol && b - a <= tol;
}

Point make_point(std::initializer_list<double> coords);

double norm(const Point& x, Norm n);
double distance(const Point& a, const Point& b, Norm n = Norm::kL2);

// Corner simplex {x >= 0, sum x <= 1}.
bool in_simplex(const Point& x, double tol = kEta);
// Vertex 0 is the origin, vertex i >= 1 is e_i.
Point simplex_vertex(int m, int i);
std::vector<Point> simplex_vertices(int m);
// Euclidean projection onto the corner simplex.
Point project_onto_simplex(const Point& x);

// Probability-simplex helpers for reduced coordinates: x' = (1 - sum x, x).
Point expand_reduced(const Point& x);
Point reduce_full(const Point& p);

std::uint64_t binomial(int n, int k);
double binomial_real(int n, int k);

}  // namespace polylearn
