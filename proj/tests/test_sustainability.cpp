#include <doctest.h>

#include <cmath>
#include <functional>

#include "support.hpp"
#include "urbaneq/error.hpp"
#include "urbaneq/sustainability.hpp"

using namespace urbaneq;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

std::vector<Site> with_vacant(double productivity) {
  return {{0, {0.25, 0.5}, 1.0}, {1, {0.75, 0.5}, 1.0}, {2, {0.5, 0.85}, productivity}};
}

std::vector<Site> four_corners() {
  return {{0, {0.25, 0.25}, 1}, {1, {0.75, 0.25}, 1}, {2, {0.75, 0.75}, 1}, {3, {0.25, 0.75}, 1}};
}

ModelParams knife() {
  ModelParams p;
  p.sigma = 5;
  p.alpha = 0.25;
  return p;
}

}  // namespace

TEST_CASE("spatial_equilibrium_check: strong and weak spillovers") {
  const auto geo = support::geography(with_vacant(1.0), 64);
  const std::vector<int> ys{0, 1};
  ModelParams p;
  p.sigma = 5;
  p.alpha = 0.35;
  const auto strong = fixed_point_solve(geo, p, ys);
  REQUIRE(strong.converged());
  const auto rs = spatial_equilibrium_check(strong, geo, p);
  CHECK(rs.verdict == Verdict::sustainable);
  REQUIRE(rs.vacant.size() == 1);
  CHECK(rs.vacant[0].site == 2);
  CHECK(rs.vacant[0].weight.regime == SpilloverRegime::strong_spillover);
  CHECK(std::isinf(rs.vacant[0].lhs));
  CHECK(rs.vacant[0].lhs < 0);

  p.alpha = 0.1;
  const auto weak = fixed_point_solve(geo, p, ys);
  REQUIRE(weak.converged());
  const auto rw = spatial_equilibrium_check(weak, geo, p);
  CHECK(rw.verdict == Verdict::unsustainable);
  CHECK(rw.vacant[0].weight.regime == SpilloverRegime::weak_spillover);
  CHECK(rw.vacant[0].lhs > 0);
  CHECK(std::isinf(rw.vacant[0].lhs));

  CHECK(kind_of([&] { potential_weight(weak, geo, p, 0); }) == ErrorKind::SiteNotVacant);
  CHECK(kind_of([&] { potential_weight(weak, geo, p, 7); }) == ErrorKind::InvalidArgument);
  CHECK_FALSE(potential_weight(weak, geo, p, 2).finite());
}

TEST_CASE("spatial_equilibrium_check: full active set is sustainable") {
  const auto geo = support::geography(support::asymmetric_triple(), 64);
  ModelParams p;
  p.alpha = 0.05;
  const auto s = fixed_point_solve(geo, p, support::all(3));
  REQUIRE(s.converged());
  const auto r = spatial_equilibrium_check(s, geo, p);
  CHECK(r.sustainable());
  CHECK(r.vacant.empty());
}

TEST_CASE("potential_weight: knife-edge clone reproduces active weights") {
  const auto geo = support::geography(support::asymmetric_triple(), 96);
  const ModelParams p = knife();
  const auto s = fixed_point_solve(geo, p, support::all(3));
  REQUIRE(s.converged());
  for (std::size_t j = 0; j < 3; ++j) {
    const auto w = potential_weight(s, geo, p, geo.sites[j]);
    REQUIRE(w.finite());
    CHECK(std::abs(w.value - s.lambda[j]) < 1e-8);
  }
}

TEST_CASE("spatial_equilibrium_check: knife-edge verdict moves with productivity") {
  const ModelParams p = knife();
  const std::vector<int> ys{0, 1};
  auto lhs_at = [&](double a) {
    const auto geo = support::geography(with_vacant(a), 64);
    const auto s = fixed_point_solve(geo, p, ys);
    REQUIRE(s.converged());
    const auto r = spatial_equilibrium_check(s, geo, p);
    REQUIRE(r.vacant.size() == 1);
    return r.vacant[0];
  };
  const auto low = lhs_at(1e-3), high = lhs_at(10.0);
  CHECK(low.verdict == Verdict::sustainable);
  CHECK(high.verdict == Verdict::unsustainable);
  CHECK(low.weight.finite());
  CHECK((low.host == 0 || low.host == 1));
  double lo = std::log(1e-3), hi = std::log(10.0);
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (lhs_at(std::exp(mid)).lhs < 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(lhs_at(std::exp(lo)).lhs) < 1e-8);
  // lhs is linear in log productivity with slope st (sigma - 1).
  const double a = lhs_at(0.5).lhs, b = lhs_at(1.0).lhs;
  CHECK((b - a) / std::log(2.0) == doctest::Approx(4.0 / 9.0 * 4.0).epsilon(1e-9));
}

TEST_CASE("enumerate_urban_systems: multiple sustainable systems") {
  const auto geo = support::geography(four_corners(), 64);
  ModelParams p;
  p.delta = 20;
  SubsetSpec spec;
  const auto cat = enumerate_urban_systems(geo, p, spec);
  CHECK(cat.strategy == "exhaustive");
  CHECK(cat.entries.size() == 6);
  const auto sus = cat.sustainable_entries();
  CHECK(sus.size() >= 2);
  for (const auto* e : sus) {
    CHECK(e->solved);
    CHECK(e->margins_pass);
    CHECK(e->solution.residuals.lambda_eq < 1e-8);
  }
  const auto again = enumerate_urban_systems(geo, p, spec);
  REQUIRE(again.entries.size() == cat.entries.size());
  for (std::size_t k = 0; k < cat.entries.size(); ++k) {
    CHECK(again.entries[k].subset == cat.entries[k].subset);
    CHECK(again.entries[k].solution.lambda == cat.entries[k].solution.lambda);
  }
}

TEST_CASE("enumerate_urban_systems: weak spillovers keep only the full set") {
  const auto geo = support::geography(four_corners(), 48);
  ModelParams p;
  p.alpha = 0.05;
  p.delta = 20;
  SubsetSpec spec;
  spec.sizes = {1, 2, 3, 4};
  const auto cat = enumerate_urban_systems(geo, p, spec);
  CHECK(cat.entries.size() == 15);
  const auto sus = cat.sustainable_entries();
  REQUIRE(sus.size() == 1);
  CHECK(sus[0]->subset == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("enumerate_urban_systems: singletons, sampling, errors") {
  const auto geo = support::geography(four_corners(), 48);
  ModelParams p;
  p.delta = 20;
  SubsetSpec spec;
  spec.sizes = {1};
  const auto cat = enumerate_urban_systems(geo, p, spec);
  CHECK(cat.entries.size() == 4);
  for (const auto& e : cat.entries) {
    CHECK(e.solved);
    CHECK(e.solution.L[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  spec.sizes = {2, 3};
  spec.max_subsets = 3;
  spec.seed = 5;
  const auto a = enumerate_urban_systems(geo, p, spec), b = enumerate_urban_systems(geo, p, spec);
  CHECK(a.strategy == "sampled");
  CHECK(a.entries.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(a.entries[k].subset == b.entries[k].subset);
  spec.sizes = {5};
  CHECK(kind_of([&] { enumerate_urban_systems(geo, p, spec); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("site_swap_experiment") {
  std::vector<Site> sites = four_corners();
  sites.push_back({4, {0.25 + 1e-3, 0.25}, 1.0});
  sites.push_back({5, {0.5, 0.5}, 1e-6});
  const auto geo = support::geography(sites, 96);
  ModelParams p;
  p.delta = 20;
  const std::vector<int> ys{0, 2};

  const auto same = site_swap_experiment(geo, p, ys, 0, 0);
  CHECK(same.swap_distance == 0.0);
  CHECK(same.baseline.lambda == same.swapped.lambda);

  const auto near = site_swap_experiment(geo, p, ys, 0, 4);
  REQUIRE(near.baseline_solved);
  REQUIRE(near.swapped_solved);
  CHECK(near.swapped_set == std::vector<int>{4, 2});
  CHECK(near.swap_distance == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(near.productivity_ratio == 1.0);
  CHECK(std::abs(near.swapped.L[0] - near.baseline.L[0]) < 1e-2);

  const auto weak = site_swap_experiment(geo, p, ys, 0, 5);
  CHECK(near.baseline_margins.passes);
  CHECK_FALSE(weak.swapped_margins.passes);
  CHECK(weak.productivity_ratio == doctest::Approx(1e6));

  CHECK(kind_of([&] { site_swap_experiment(geo, p, ys, 1, 4); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { site_swap_experiment(geo, p, ys, 0, 2); }) == ErrorKind::SiteNotVacant);
}
