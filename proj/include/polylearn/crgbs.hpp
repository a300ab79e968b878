#pragma once

#include <cstdint>
#include <vector>

#include "polylearn/cdgbs.hpp"
#include "polylearn/geometry.hpp"
#include "polylearn/labelling.hpp"
#include "polylearn/partition.hpp"

namespace polylearn {

struct CrConfig {
  int m = 0;
  int n = 1;
  double eps = 0.1;
  OracleKind kind = OracleKind::kLexicographic;
  std::uint64_t seed = 0;
  // Upper limit on C(m+1, k+1), the number of k-faces.
  std::uint64_t max_faces = 200000;
};

int face_dim(int n);
// 3 eps / (100 n^2 sqrt(k+1) (m+1)^{5/2}).
double crgbs_sub_eps(int m, int n, double eps);
// Number of faces times the CD-GBS bound at (k, n, sub_eps).
double crgbs_query_bound(int m, int n, double eps);

struct FaceRun {
  Face face;
  AffineMap to_simplex;  // Delta^k -> face of Delta^m
  EmpiricalLabelling labelling;
  std::uint64_t queries = 0;
};

struct CrStats {
  std::uint64_t queries = 0;
  int faces = 0;
  std::vector<std::uint64_t> face_queries;
  int merges = 0;
  int lex_conflicts = 0;  // conflicts seen with a lexicographic oracle
  bool fell_back = false;
};

struct CrResult {
  EmpiricalLabelling labelling;
  CrStats stats;
};

CrResult cr_gbs(const CrConfig& cfg, LabelOracle& oracle);

// Per-label union of pulled-back face points in dimension m.
EmpiricalLabelling assemble_from_faces(int m, int n, const std::vector<FaceRun>& faces);

}  // namespace polylearn
