#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include <limits>

#include "hull_detail.hpp"
#include "polylearn/geometry.hpp"

namespace polylearn::detail {
namespace {

using Vec = Eigen::VectorXd;

struct QFacet {
  std::vector<int> v;   // k vertex ids
  std::vector<int> nb;  // nb[i] is the facet across the ridge opposite v[i]
  Vec n;                // outward unit normal
  double off = 0.0;
  std::vector<int> outside;
  bool alive = true;
};

class QuickHull {
 public:
  QuickHull(const std::vector<Vec>& y, double tol) : y_(y), tol_(tol), k_(static_cast<int>(y[0].size())) {}

  bool run(const std::vector<int>& simplex) {
    center_ = Vec::Zero(k_);
    for (int s : simplex) center_ += y_[s];
    center_ /= static_cast<double>(simplex.size());
    for (int i = 0; i <= k_; ++i) {
      QFacet f;
      for (int j = 0; j <= k_; ++j) {
        if (j == i) continue;
        f.v.push_back(simplex[j]);
        f.nb.push_back(j);
      }
      plane(f);
      facets_.push_back(std::move(f));
    }
    std::set<int> in_simplex(simplex.begin(), simplex.end());
    for (int p = 0; p < static_cast<int>(y_.size()); ++p) {
      if (in_simplex.count(p)) continue;
      assign(p, 0, static_cast<int>(facets_.size()));
    }
    std::deque<int> work;
    for (int i = 0; i <= k_; ++i) work.push_back(i);
    std::vector<int> stamp;
    int round = 0;
    while (!work.empty()) {
      int fi = work.front();
      work.pop_front();
      if (!facets_[fi].alive || facets_[fi].outside.empty()) continue;
      ++round;
      int p = -1;
      double best = -1.0;
      for (int q : facets_[fi].outside) {
        double d = dist(facets_[fi], q);
        if (d > best) best = d, p = q;
      }
      stamp.resize(facets_.size(), 0);
      std::vector<int> visible{fi};
      stamp[fi] = round;
      std::vector<std::pair<int, int>> horizon;
      for (std::size_t s = 0; s < visible.size(); ++s) {
        int g = visible[s];
        for (int i = 0; i < k_; ++i) {
          int h = facets_[g].nb[i];
          if (stamp[h] == round) continue;
          if (dist(facets_[h], p) > tol_) {
            stamp[h] = round;
            visible.push_back(h);
          } else {
            horizon.emplace_back(g, i);
          }
        }
      }
      std::vector<int> orphans;
      for (int g : visible) {
        for (int q : facets_[g].outside)
          if (q != p) orphans.push_back(q);
        facets_[g].outside.clear();
        facets_[g].alive = false;
      }
      int first_new = static_cast<int>(facets_.size());
      std::map<std::vector<int>, std::pair<int, int>> ridges;
      for (auto [g, i] : horizon) {
        QFacet f;
        for (int j = 0; j < k_; ++j)
          if (j != i) f.v.push_back(facets_[g].v[j]);
        f.v.push_back(p);
        f.nb.assign(k_, -1);
        int h = facets_[g].nb[i];
        f.nb[k_ - 1] = h;
        int id = static_cast<int>(facets_.size());
        for (int j = 0; j < k_; ++j)
          if (facets_[h].nb[j] == g) facets_[h].nb[j] = id;
        plane(f);
        facets_.push_back(std::move(f));
        for (int t = 0; t < k_ - 1; ++t) {
          std::vector<int> key;
          for (int j = 0; j < k_; ++j)
            if (j != t) key.push_back(facets_[id].v[j]);
          std::sort(key.begin(), key.end());
          auto it = ridges.find(key);
          if (it == ridges.end()) {
            ridges.emplace(std::move(key), std::make_pair(id, t));
          } else {
            facets_[id].nb[t] = it->second.first;
            facets_[it->second.first].nb[it->second.second] = id;
            ridges.erase(it);
          }
        }
      }
      if (!ridges.empty()) return false;
      for (int q : orphans) assign(q, first_new, static_cast<int>(facets_.size()));
      for (int f = first_new; f < static_cast<int>(facets_.size()); ++f)
        if (!facets_[f].outside.empty()) work.push_back(f);
    }
    return true;
  }

  bool consistent(double slack) const {
    for (const auto& f : facets_) {
      if (!f.alive) continue;
      for (const auto& q : y_)
        if (f.n.dot(q) - f.off > slack) return false;
    }
    return true;
  }

  const std::vector<QFacet>& facets() const { return facets_; }

 private:
  double dist(const QFacet& f, int p) const { return f.n.dot(y_[p]) - f.off; }

  void assign(int p, int from, int to) {
    int best_f = -1;
    double best = tol_;
    for (int f = from; f < to; ++f) {
      if (!facets_[f].alive) continue;
      double d = dist(facets_[f], p);
      if (d > best) best = d, best_f = f;
    }
    if (best_f >= 0) facets_[best_f].outside.push_back(p);
  }

  void plane(QFacet& f) const {
    const Vec& o = y_[f.v[0]];
    Vec n;
    if (k_ == 3) {
      Eigen::Vector3d a = y_[f.v[1]] - o, b = y_[f.v[2]] - o;
      n = a.cross(b);
    } else {
      Matrix m(k_ - 1, k_);
      for (int j = 1; j < k_; ++j) m.row(j - 1) = (y_[f.v[j]] - o).transpose();
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
      n = svd.matrixV().col(k_ - 1);
    }
    double len = n.norm();
    if (len > 0) n /= len;
    f.n = n;
    f.off = n.dot(o);
    if (n.dot(center_) - f.off > 0) {
      f.n = -f.n;
      f.off = -f.off;
    }
  }

  const std::vector<Vec>& y_;
  double tol_;
  int k_;
  Vec center_;
  std::vector<QFacet> facets_;
};

// Andrew's monotone chain; returns a counter-clockwise ring of ids.
std::vector<int> monotone_chain(const std::vector<Vec>& y, std::vector<int> ids, double tol) {
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    return y[a][0] < y[b][0] || (y[a][0] == y[b][0] && y[a][1] < y[b][1]);
  });
  auto keep_turn = [&](int o, int a, int b) {
    Eigen::Vector2d oa = y[a] - y[o], ob = y[b] - y[o];
    double cross = oa.x() * ob.y() - oa.y() * ob.x();
    double len = ob.norm();
    return cross > tol * std::max(len, 1e-300);
  };
  std::vector<int> hull(2 * ids.size());
  std::size_t h = 0;
  for (int id : ids) {
    while (h >= 2 && !keep_turn(hull[h - 2], hull[h - 1], id)) --h;
    hull[h++] = id;
  }
  for (std::size_t i = ids.size() - 1, lower = h + 1; i-- > 0;) {
    int id = ids[i];
    while (h >= lower && !keep_turn(hull[h - 2], hull[h - 1], id)) --h;
    hull[h++] = id;
  }
  hull.resize(h > 1 ? h - 1 : h);
  return hull;
}

// Seed simplex by farthest-point selection in local coordinates.
std::vector<int> seed_simplex(const std::vector<Vec>& y, double tol) {
  const int k = static_cast<int>(y[0].size());
  int a = 0;
  double best = -1;
  for (int i = 0; i < static_cast<int>(y.size()); ++i) {
    double dd = (y[i] - y[0]).squaredNorm();
    if (dd > best) best = dd, a = i;
  }
  std::vector<int> chosen{a};
  std::vector<Vec> basis;
  while (static_cast<int>(basis.size()) < k) {
    int best_id = -1;
    double bn = tol;
    Vec br;
    for (int i = 0; i < static_cast<int>(y.size()); ++i) {
      Vec r = y[i] - y[a];
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) r -= q.dot(r) * q;
      if (r.norm() > bn) bn = r.norm(), best_id = i, br = r;
    }
    if (best_id < 0) return {};
    basis.push_back(br / bn);
    chosen.push_back(best_id);
  }
  return chosen;
}

// Full-dimensional hull of local points; returns alive facets only.
std::vector<QFacet> full_hull(const std::vector<Vec>& y, double tol) {
  std::vector<int> simplex = seed_simplex(y, tol);
  if (simplex.empty()) throw GeometryError("convex hull: degenerate point set");
  const int k = static_cast<int>(y[0].size());
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<Vec> yy = y;
    if (attempt > 0) {
      // Deterministic joggle to break exact coplanarities.
      std::uint64_t s = 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt);
      for (auto& q : yy)
        for (int j = 0; j < k; ++j) {
          s ^= s << 13, s ^= s >> 7, s ^= s << 17;
          q[j] += (static_cast<double>(s % 2001) / 1000.0 - 1.0) * tol * 0.1;
        }
    }
    QuickHull qh(yy, tol);
    if (!qh.run(simplex)) continue;
    if (qh.consistent(100 * tol) || attempt == 2) {
      std::vector<QFacet> out;
      for (const auto& f : qh.facets())
        if (f.alive) out.push_back(f);
      return out;
    }
  }
  throw GeometryError("convex hull construction failed");
}

// Keeps only the hull vertices that are extreme beyond tol.
std::vector<int> extreme_vertices(const std::vector<Vec>& y, const std::vector<QFacet>& facets, double tol) {
  const int k = static_cast<int>(y[0].size());
  std::vector<int> verts;
  for (const auto& f : facets) verts.insert(verts.end(), f.v.begin(), f.v.end());
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  std::vector<Vec> normal_sum(y.size(), Vec::Zero(k));
  for (const auto& f : facets)
    for (int v : f.v) normal_sum[v] += f.n;
  std::vector<int> extreme;
  for (int v : verts) {
    const Vec& u = normal_sum[v];
    double top = -std::numeric_limits<double>::infinity();
    for (int w : verts)
      if (w != v) top = std::max(top, u.dot(y[w]));
    bool keep = u.dot(y[v]) > top + tol * u.norm();
    if (!keep) {
      std::vector<Point> others;
      for (int w : verts)
        if (w != v) others.push_back(y[w]);
      keep = project_onto_points(y[v], others).dist > tol;
    }
    if (keep) extreme.push_back(v);
  }
  return extreme;
}

}  // namespace

HullIndices hull_indices(const std::vector<Point>& pts, double tol) {
  HullIndices out;
  if (pts.empty()) return out;
  const int d = static_cast<int>(pts[0].size());

  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (int i = 0; i < d; ++i) {
      if (pts[a][i] != pts[b][i]) return pts[a][i] < pts[b][i];
    }
    return a < b;
  });
  std::vector<int> ids;
  for (int id : order) {
    if (!ids.empty() && (pts[id] - pts[ids.back()]).lpNorm<Eigen::Infinity>() <= tol) continue;
    ids.push_back(id);
  }

  // Affine basis by farthest-point selection.
  int a = ids[0];
  {
    double best = -1;
    for (int id : ids) {
      double dd = (pts[id] - pts[ids[0]]).squaredNorm();
      if (dd > best) best = dd, a = id;
    }
  }
  std::vector<Vec> basis;
  auto residual = [&](int id) {
    Vec r = pts[id] - pts[a];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) r -= q.dot(r) * q;
    return r;
  };
  while (static_cast<int>(basis.size()) < d) {
    int best_id = -1;
    double best = tol;
    for (int id : ids) {
      double nr = residual(id).norm();
      if (nr > best) best = nr, best_id = id;
    }
    if (best_id < 0) break;
    Vec r = residual(best_id);
    basis.push_back(r / r.norm());
  }
  const int k = static_cast<int>(basis.size());
  out.affine_dim = k;
  Matrix B(d, k);
  for (int j = 0; j < k; ++j) B.col(j) = basis[j];

  // Local coordinates, indexed by position in `ids`.
  std::vector<Vec> y(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) y[i] = B.transpose() * (pts[ids[i]] - pts[a]);

  auto add_facet = [&](const Vec& n_local, double off_local) {
    Point n = B * n_local;
    out.facets.emplace_back(n, off_local + n.dot(pts[a]));
  };

  if (k == 0) {
    out.vertices = {a};
    return out;
  }
  if (k == 1) {
    int lo = 0, hi = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i][0] < y[lo][0]) lo = static_cast<int>(i);
      if (y[i][0] > y[hi][0]) hi = static_cast<int>(i);
    }
    out.vertices = {ids[lo], ids[hi]};
    out.edges = {{0, 1}};
    if (d == 1) {
      Vec e = Vec::Ones(1);
      add_facet(e, y[lo][0]);
      add_facet(-e, -y[hi][0]);
    }
    return out;
  }
  if (k == 2) {
    std::vector<int> all(y.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<int> ring = monotone_chain(y, all, tol);
    for (int r : ring) out.vertices.push_back(ids[r]);
    const int nv = static_cast<int>(ring.size());
    for (int i = 0; i < nv; ++i) {
      out.edges.emplace_back(i, (i + 1) % nv);
      if (d == 2) {
        Vec e = y[ring[(i + 1) % nv]] - y[ring[i]];
        Vec nl(2);
        nl << -e[1], e[0];
        nl /= nl.norm();
        add_facet(nl, nl.dot(y[ring[i]]));
      }
    }
    return out;
  }

  std::vector<QFacet> facets = full_hull(y, tol);
  std::vector<int> extreme = extreme_vertices(y, facets, tol);
  std::size_t nverts = 0;
  {
    std::set<int> vs;
    for (const auto& f : facets) vs.insert(f.v.begin(), f.v.end());
    nverts = vs.size();
  }
  if (extreme.size() < nverts) {
    std::vector<Vec> sub;
    for (int v : extreme) sub.push_back(y[v]);
    facets = full_hull(sub, tol);
    for (auto& f : facets)
      for (int& v : f.v) v = extreme[v];
  }

  std::map<int, int> vpos;
  std::set<std::pair<int, int>> edges;
  for (const auto& f : facets) {
    if (!f.alive) continue;
    for (int v : f.v)
      if (!vpos.count(v)) vpos[v] = 0;
  }
  int idx = 0;
  for (auto& [v, p] : vpos) {
    p = idx++;
    out.vertices.push_back(ids[v]);
  }
  for (const auto& f : facets) {
    if (!f.alive) continue;
    for (std::size_t i = 0; i < f.v.size(); ++i)
      for (std::size_t j = i + 1; j < f.v.size(); ++j) {
        int p = vpos[f.v[i]], q = vpos[f.v[j]];
        edges.emplace(std::min(p, q), std::max(p, q));
      }
    if (k == d) add_facet(-f.n, -f.off);
  }
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

}  // namespace polylearn::detail
