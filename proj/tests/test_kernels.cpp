#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "urbaneq/kernels.hpp"

using namespace urbaneq;

namespace {

struct Case {
  DomainGrid grid;
  AmenityField amenity;
  std::vector<Site> sites;
  std::vector<double> lambda;
};

Case make_case(std::uint64_t seed) {
  auto grid = DomainGrid::build_levelset({0, 0, 1, 1}, 96, 80,
                                         [](Point p) { return std::hypot(p.x - 0.5, p.y - 0.5) - 0.48; });
  auto amenity = amenity_from_function(grid, [](Point p) { return 1.0 + p.x * p.y; });
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.25, 0.75), w(-0.05, 0.05);
  std::vector<Site> sites;
  std::vector<double> lambda;
  for (int i = 0; i < 5; ++i) {
    sites.push_back({i, {u(rng), u(rng)}, 1.0});
    lambda.push_back(w(rng));
  }
  return {std::move(grid), std::move(amenity), std::move(sites), std::move(lambda)};
}

}  // namespace

TEST_CASE("serial and OpenMP kernels agree") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Case c = make_case(seed);
    const auto frame = kernels::SiteFrame::make(c.sites, DistanceSystem{});
    const auto ts = kernels::partition_serial(c.grid, frame, c.lambda);
    const auto to = kernels::partition_omp(c.grid, frame, c.lambda);
    CHECK(ts.labels == to.labels);
    CHECK(ts.mixed == to.mixed);
    REQUIRE(ts.pieces.size() == to.pieces.size());
    for (std::size_t i = 0; i < ts.pieces.size(); ++i) {
      CHECK(ts.pieces[i].area == to.pieces[i].area);
      CHECK(ts.pieces[i].site == to.pieces[i].site);
    }
    CHECK(ts.interfaces.size() == to.interfaces.size());
    CHECK(kernels::labels_serial(c.grid, frame, c.lambda) == kernels::labels_omp(c.grid, frame, c.lambda));
    const auto k = KernelSpec::make(-0.3, 10);
    const auto is = kernels::log_integrals_serial(c.grid, frame, ts, c.amenity, k);
    const auto io = kernels::log_integrals_omp(c.grid, frame, ts, c.amenity, k);
    for (std::size_t i = 0; i < is.size(); ++i) CHECK(std::abs(is[i] - io[i]) < 1e-12);
  }
}

TEST_CASE("OpenMP integrals are thread-count invariant") {
  const Case c = make_case(4);
  const auto frame = kernels::SiteFrame::make(c.sites, DistanceSystem{});
  const auto t = kernels::partition_omp(c.grid, frame, c.lambda);
  const auto k = KernelSpec::make(-0.3, 10);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = kernels::log_integrals_omp(c.grid, frame, t, c.amenity, k);
  omp_set_num_threads(4);
  const auto four = kernels::log_integrals_omp(c.grid, frame, t, c.amenity, k);
  const auto t4 = kernels::partition_omp(c.grid, frame, c.lambda);
  omp_set_num_threads(saved);
  CHECK(one == four);
  CHECK(t.labels == t4.labels);
}

TEST_CASE("labels_omp matches brute force") {
  const Case c = make_case(5);
  const auto frame = kernels::SiteFrame::make(c.sites, DistanceSystem{});
  CHECK(kernels::labels_omp(c.grid, frame, c.lambda) == support::brute_labels(c.grid, c.sites, {}, c.lambda));
}
