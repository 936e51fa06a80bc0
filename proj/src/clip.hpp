#pragma once

// Convex polygon clipping with edge provenance tags.

#include <cmath>
#include <vector>

#include "urbaneq/geometry.hpp"

namespace urbaneq::detail {

inline constexpr int kTagCell = -1;
inline constexpr int kTagDomain = -2;

struct Vertex {
  double x, y;
  int tag;  // tag of the edge leaving this vertex
};

class ConvexPolygon {
 public:
  void reset_rect(double x0, double y0, double x1, double y1) {
    v_.clear();
    v_.push_back({x0, y0, kTagCell});
    v_.push_back({x1, y0, kTagCell});
    v_.push_back({x1, y1, kTagCell});
    v_.push_back({x0, y1, kTagCell});
  }

  //! Keep c0 + a (x - cx) + b (y - cy) <= 0. Edges lying on the line take the tag.
  void clip(double c0, double a, double b, double cx, double cy, int tag, double on_tol) {
    if (v_.empty()) return;
    const std::size_t m = v_.size();
    h_.resize(m);
    bool any_out = false;
    for (std::size_t i = 0; i < m; ++i) {
      h_[i] = c0 + a * (v_[i].x - cx) + b * (v_[i].y - cy);
      if (h_[i] > 0.0) any_out = true;
    }
    out_.clear();
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (i + 1) % m;
      const Vertex& va = v_[i];
      const Vertex& vb = v_[j];
      const bool ina = h_[i] <= 0.0;
      const bool inb = h_[j] <= 0.0;
      if (ina && inb) {
        const bool on = std::abs(h_[i]) <= on_tol && std::abs(h_[j]) <= on_tol;
        out_.push_back({va.x, va.y, on ? tag : va.tag});
      } else if (ina) {
        out_.push_back(va);
        const double t = h_[i] / (h_[i] - h_[j]);
        out_.push_back({va.x + t * (vb.x - va.x), va.y + t * (vb.y - va.y), tag});
      } else if (inb) {
        const double t = h_[i] / (h_[i] - h_[j]);
        out_.push_back({va.x + t * (vb.x - va.x), va.y + t * (vb.y - va.y), va.tag});
      }
    }
    if (!any_out && out_.size() == m) {
      v_.swap(out_);
      return;
    }
    v_.swap(out_);
    if (v_.size() < 3) v_.clear();
  }

  bool empty() const { return v_.size() < 3; }

  double area() const {
    double s = 0.0;
    const std::size_t m = v_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vertex& a = v_[i];
      const Vertex& b = v_[(i + 1) % m];
      s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
  }

  //! Centroid relative to (ox, oy) for accuracy, returned in absolute coordinates.
  Point centroid(double ox, double oy) const {
    double s = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t m = v_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const double ax = v_[i].x - ox, ay = v_[i].y - oy;
      const double bx = v_[(i + 1) % m].x - ox, by = v_[(i + 1) % m].y - oy;
      const double cr = ax * by - bx * ay;
      s += cr;
      cx += (ax + bx) * cr;
      cy += (ay + by) * cr;
    }
    if (s == 0.0) return {ox, oy};
    return {ox + cx / (3.0 * s), oy + cy / (3.0 * s)};
  }

  const std::vector<Vertex>& vertices() const { return v_; }

 private:
  std::vector<Vertex> v_, out_;
  std::vector<double> h_;
};

}  // namespace urbaneq::detail
