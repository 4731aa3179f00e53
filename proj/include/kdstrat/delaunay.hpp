#pragma once

// Delaunay triangulation of the unit square with given interior sites.
// Insertion starts from the square split into two triangles, so every
// inserted site lies inside the current triangulation and the result always
// covers the square exactly.

#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "kdstrat/error.hpp"

namespace kdstrat {

using Point2 = std::array<double, 2>;
using Triangle = std::array<std::size_t, 3>;

inline double orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

/// Positive when d is strictly inside the circumcircle of counter-clockwise (a, b, c).
inline double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) noexcept {
  const double adx = a[0] - d[0], ady = a[1] - d[1];
  const double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return adx * (bdy * clift - cdy * blift) - ady * (bdx * clift - cdx * blift) + alift * (bdx * cdy - cdx * bdy);
}

inline double triangle_area(const std::vector<Point2>& v, const Triangle& t) noexcept {
  return 0.5 * orient2d(v[t[0]], v[t[1]], v[t[2]]);
}

/// Barycentric-sign containment, boundary inclusive.
inline bool triangle_contains(const std::vector<Point2>& v, const Triangle& t, const Point2& p) noexcept {
  return orient2d(v[t[0]], v[t[1]], p) >= 0.0 && orient2d(v[t[1]], v[t[2]], p) >= 0.0 &&
         orient2d(v[t[2]], v[t[0]], p) >= 0.0;
}

/// Vertices are the four corners (0,0), (1,0), (1,1), (0,1) followed by
/// `interior` in order. Triangles are counter-clockwise.
/// Throws DegenerateGeometry if a site is outside (0,1)^2, duplicated, or
/// produces a sliver too thin to orient reliably.
inline std::vector<Triangle> delaunay_unit_square(std::span<const Point2> interior, std::vector<Point2>& vertices) {
  constexpr double kMinArea = 1e-14;
  vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  std::vector<Triangle> tris{{0, 1, 2}, {0, 2, 3}};

  const auto shares_edge = [](const Triangle& s, const Triangle& t) {
    for (int e = 0; e < 3; ++e)
      for (int f = 0; f < 3; ++f)
        if (s[e] == t[(f + 1) % 3] && s[(e + 1) % 3] == t[f]) return true;
    return false;
  };

  for (const Point2& p : interior) {
    if (!(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0))
      throw DegenerateGeometry("triangulation site outside the open unit square");
    for (const Point2& q : vertices)
      if (q == p) throw DegenerateGeometry("duplicate triangulation site");
    const std::size_t k = vertices.size();
    vertices.push_back(p);

    std::size_t start = tris.size();
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (triangle_contains(vertices, tris[t], p)) {
        start = t;
        break;
      }
    if (start == tris.size()) throw DegenerateGeometry("site not located in triangulation");

    // Cavity: triangles whose circumcircle holds p, grown by adjacency from the
    // containing triangle so it stays connected.
    std::vector<bool> bad(tris.size(), false);
    bad[start] = true;
    std::deque<std::size_t> frontier{start};
    while (!frontier.empty()) {
      const std::size_t t = frontier.front();
      frontier.pop_front();
      for (std::size_t u = 0; u < tris.size(); ++u) {
        if (bad[u] || !shares_edge(tris[t], tris[u])) continue;
        const Triangle& tu = tris[u];
        if (incircle(vertices[tu[0]], vertices[tu[1]], vertices[tu[2]], p) > 0.0) {
          bad[u] = true;
          frontier.push_back(u);
        }
      }
    }

    std::vector<std::array<std::size_t, 2>> boundary;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) continue;
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = tris[t][e], b = tris[t][(e + 1) % 3];
        bool interior_edge = false;
        for (std::size_t u = 0; u < tris.size() && !interior_edge; ++u) {
          if (u == t || !bad[u]) continue;
          for (int f = 0; f < 3; ++f)
            if (tris[u][f] == b && tris[u][(f + 1) % 3] == a) interior_edge = true;
        }
        if (!interior_edge) boundary.push_back({a, b});
      }
    }

    std::vector<Triangle> next;
    next.reserve(tris.size() + 2);
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (!bad[t]) next.push_back(tris[t]);
    for (const auto& [a, b] : boundary) {
      const Triangle t{a, b, k};
      if (triangle_area(vertices, t) <= kMinArea) throw DegenerateGeometry("sliver triangle in triangulation");
      next.push_back(t);
    }
    tris = std::move(next);
  }

  double total = 0.0;
  for (const Triangle& t : tris) total += triangle_area(vertices, t);
  if (std::abs(total - 1.0) > 1e-9) throw DegenerateGeometry("triangulation does not tile the unit square");
  return tris;
}

}  // namespace kdstrat
