#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace urbaneq {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BBox {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;
};

//! Linearized level-set boundary inside one cell: phi + g.(x - center) <= 0 is inside.
struct BoundaryClip {
  double phi = 0.0;
  double gx = 0.0, gy = 0.0;
};

//! Raster discretization of the residential domain.
class DomainGrid {
 public:
  using Predicate = std::function<bool(Point)>;
  using LevelSet = std::function<double(Point)>;  // negative inside

  //! Mask from the predicate at cell centers.
  static DomainGrid build(BBox bbox, int nx, int ny, const Predicate& inside);
  //! Fractional coverage from a linearized level set; boundary cells keep their clip.
  static DomainGrid build_levelset(BBox bbox, int nx, int ny, const LevelSet& phi);
  static DomainGrid from_mask(BBox bbox, int nx, int ny, std::vector<std::uint8_t> mask);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return mask_.size(); }
  const BBox& bbox() const { return bbox_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }
  double half_diagonal() const;

  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }
  Point center(std::size_t cell) const;
  //! Cell containing p, or -1 outside the bounding box.
  long cell_of(Point p) const;

  bool inside(std::size_t cell) const { return mask_[cell] != 0; }
  double coverage(std::size_t cell) const { return coverage_.empty() ? double(mask_[cell]) : coverage_[cell]; }
  //! Clip for partially covered cells, nullptr otherwise.
  const BoundaryClip* clip(std::size_t cell) const;

  std::size_t inside_count() const { return inside_count_; }
  double inside_area() const;
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  DomainGrid(BBox bbox, int nx, int ny);
  void finalize();

  BBox bbox_;
  int nx_ = 0, ny_ = 0;
  double dx_ = 0.0, dy_ = 0.0;
  std::vector<std::uint8_t> mask_;
  std::vector<double> coverage_;
  std::vector<int> clip_index_;
  std::vector<BoundaryClip> clips_;
  std::size_t inside_count_ = 0;
};

struct Site {
  int id = 0;
  Point position;
  double productivity = 1.0;
};

enum class MetricKind { euclidean, scaled_euclidean };

struct DistanceSystem {
  MetricKind kind = MetricKind::euclidean;
  std::vector<double> scales;  // per site, scaled_euclidean only

  double scale(std::size_t i) const;
  double distance(std::size_t i, Point site, Point x) const;
  //! Gradient of d_i at x (zero at the site itself).
  Point gradient(std::size_t i, Point site, Point x) const;
  DistanceSystem subset(std::span<const int> indices) const;
};

double site_distance(const DistanceSystem& metric, const std::vector<Site>& sites, std::size_t i, Point x);

inline constexpr int kVacuum = -1;

//! Sub-cell piece of a cell split between sites or by the domain boundary.
struct CellPiece {
  std::int32_t cell = 0;
  std::int32_t site = 0;
  double area = 0.0;
  Point centroid;
};

//! Shared boundary segment of site's piece against other inside one cell.
struct InterfaceSegment {
  std::int32_t cell = 0;
  std::int32_t site = 0;
  std::int32_t other = 0;
  double length = 0.0;
  Point midpoint;
  double gradient_gap = 0.0;  // |grad d_site - grad d_other| at the cell center
};

struct Tessellation {
  std::vector<double> weights;
  std::vector<int> labels;              // per cell, kVacuum outside
  std::vector<std::uint8_t> mixed;      // per cell, 1 when area is held in pieces
  std::vector<CellPiece> pieces;        // row-ordered
  std::vector<InterfaceSegment> interfaces;
  std::vector<std::size_t> row_pieces;      // ny + 1 offsets into pieces
  std::vector<std::size_t> row_interfaces;  // ny + 1 offsets into interfaces
  std::vector<double> cell_measure;
  std::vector<std::vector<int>> neighbors;
  std::vector<int> active_set;

  std::size_t site_count() const { return weights.size(); }
  bool active(std::size_t i) const { return cell_measure[i] > 0.0; }
  bool adjacent(int i, int k) const;
};

Tessellation assign_labels(const DomainGrid& grid, const std::vector<Site>& sites,
                           const DistanceSystem& metric, std::span<const double> lambda);

enum class Feasibility { interior = 0, boundary = 1, infeasible = 2 };

struct FeasibilityReport {
  std::size_t n = 0;
  std::vector<Feasibility> pairs;  // ordered (i, j), row-major; diagonal interior
  Feasibility verdict = Feasibility::interior;
  Feasibility at(std::size_t i, std::size_t j) const { return pairs[i * n + j]; }
};

FeasibilityReport lambda_feasibility(const std::vector<Site>& sites, const DistanceSystem& metric,
                                     std::span<const double> lambda, double k);

struct PairwiseMetrics {
  std::size_t n = 0;
  std::vector<double> d;  // d[i*n + j] = d_i(y_j)
  double d_min = 0.0;
  double r = 0.0;
  double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

//! Throws SingleSite when d_min is requested for one site.
PairwiseMetrics pairwise_metrics(const std::vector<Site>& sites, const DistanceSystem& metric,
                                 bool require_d_min = true);

void check_distinct_sites(const std::vector<Site>& sites);

}  // namespace urbaneq
