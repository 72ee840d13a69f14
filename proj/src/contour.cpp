#include "flocklab/contour.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace flocklab {

namespace {

using Key = std::pair<double, double>;

struct Segment {
  ContourPoint a, b;
  bool used = false;
};

Key key_of(const ContourPoint& p) { return {p.x, p.v}; }

}  // namespace

std::vector<Polyline> contour_extract(const ProbabilityGrid& grid, double level) {
  if (!(level > 0.0) || !(level < 1.0))
    throw std::invalid_argument("contour: level must lie strictly inside (0, 1)");
  const std::size_t nx = grid.X_values.size();
  const std::size_t nv = grid.V_values.size();
  if (nx < 2 || nv < 2) return {};

  std::vector<Segment> segments;

  // Shared edges of neighboring cells interpolate from the same two corner
  // values, so endpoints match bitwise and chains can be stitched exactly.
  auto cross = [&](double pa, double xa, double va, double pb, double xb,
                   double vb) -> ContourPoint {
    const double t = (level - pa) / (pb - pa);
    return {xa + t * (xb - xa), va + t * (vb - va)};
  };

  for (std::size_t xi = 0; xi + 1 < nx; ++xi) {
    for (std::size_t vi = 0; vi + 1 < nv; ++vi) {
      const double x0 = grid.X_values[xi], x1 = grid.X_values[xi + 1];
      const double v0 = grid.V_values[vi], v1 = grid.V_values[vi + 1];
      const double pa = grid.at(xi, vi);        // (x0, v0)
      const double pb = grid.at(xi + 1, vi);    // (x1, v0)
      const double pc = grid.at(xi + 1, vi + 1);// (x1, v1)
      const double pd = grid.at(xi, vi + 1);    // (x0, v1)

      const int mask = (pa >= level ? 1 : 0) | (pb >= level ? 2 : 0) |
                       (pc >= level ? 4 : 0) | (pd >= level ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      // edge crossings, computed lazily per case
      auto e0 = [&] { return cross(pa, x0, v0, pb, x1, v0); };  // bottom
      auto e1 = [&] { return cross(pb, x1, v0, pc, x1, v1); };  // right
      auto e2 = [&] { return cross(pd, x0, v1, pc, x1, v1); };  // top
      auto e3 = [&] { return cross(pa, x0, v0, pd, x0, v1); };  // left

      auto add = [&](ContourPoint p, ContourPoint q) {
        segments.push_back({p, q, false});
      };

      switch (mask) {
        case 1: add(e3(), e0()); break;
        case 2: add(e0(), e1()); break;
        case 3: add(e3(), e1()); break;
        case 4: add(e1(), e2()); break;
        case 6: add(e0(), e2()); break;
        case 7: add(e3(), e2()); break;
        case 8: add(e2(), e3()); break;
        case 9: add(e0(), e2()); break;
        case 11: add(e1(), e2()); break;
        case 12: add(e1(), e3()); break;
        case 13: add(e0(), e1()); break;
        case 14: add(e3(), e0()); break;
        case 5: {
          const double center = 0.25 * (pa + pb + pc + pd);
          if (center >= level) {
            add(e0(), e1());
            add(e2(), e3());
          } else {
            add(e3(), e0());
            add(e1(), e2());
          }
          break;
        }
        case 10: {
          const double center = 0.25 * (pa + pb + pc + pd);
          if (center >= level) {
            add(e3(), e0());
            add(e1(), e2());
          } else {
            add(e0(), e1());
            add(e2(), e3());
          }
          break;
        }
        default: break;
      }
    }
  }

  // Stitch segments into chains: open paths first, then closed loops.
  std::multimap<Key, std::size_t> by_endpoint;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_endpoint.emplace(key_of(segments[s].a), s);
    by_endpoint.emplace(key_of(segments[s].b), s);
  }

  auto degree = [&](const Key& k) { return by_endpoint.count(k); };
  auto next_unused_at = [&](const Key& k) -> std::size_t {
    auto [lo, hi] = by_endpoint.equal_range(k);
    for (auto it = lo; it != hi; ++it)
      if (!segments[it->second].used) return it->second;
    return segments.size();
  };

  std::vector<Polyline> out;
  auto walk = [&](std::size_t start) {
    Polyline line;
    std::size_t s = start;
    segments[s].used = true;
    line.push_back(segments[s].a);
    line.push_back(segments[s].b);
    for (;;) {
      const std::size_t n = next_unused_at(key_of(line.back()));
      if (n >= segments.size()) break;
      segments[n].used = true;
      const Key tail = key_of(line.back());
      line.push_back(key_of(segments[n].a) == tail ? segments[n].b : segments[n].a);
    }
    out.push_back(std::move(line));
  };

  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!segments[s].used &&
        (degree(key_of(segments[s].a)) == 1 || degree(key_of(segments[s].b)) == 1)) {
      // start open chains at a free end so the whole path comes out in order
      if (degree(key_of(segments[s].a)) != 1)
        std::swap(segments[s].a, segments[s].b);
      walk(s);
    }
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!segments[s].used) walk(s);

  return out;
}

}  // namespace flocklab
