#include <doctest.h>

#include <cmath>
#include <functional>

#include "support.hpp"
#include "urbaneq/analysis.hpp"
#include "urbaneq/error.hpp"

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

std::vector<Site> spaced_pair(double gap) { return {{0, {0.5 - gap / 2, 0.5}, 1.0}, {1, {0.5 + gap / 2, 0.5}, 1.2}}; }

}  // namespace

TEST_CASE("classify_alpha") {
  CHECK(classify_alpha(0.2, 9) == Multiplicity::multiple);
  CHECK(classify_alpha(0.1, 9) == Multiplicity::spread);
  CHECK(classify_alpha(0.125, 9) == Multiplicity::knife_edge);
  CHECK(classify_alpha(0.25, 5) == Multiplicity::knife_edge);
  CHECK(classify_alpha(0.25 + 1e-9, 5) == Multiplicity::multiple);
}

TEST_CASE("regime_classify: worked example") {
  ModelParams p;
  const auto r = regime_classify(p);
  CHECK(r.alpha_cutoff == 0.125);
  CHECK(r.location_multiplicity == Multiplicity::multiple);
  CHECK(r.gamma1 == doctest::Approx(2.1).epsilon(1e-14));
  CHECK(r.gamma2 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(r.labor_uniqueness);
  CHECK(r.reconciliation);
  p.alpha = 0.1;
  CHECK_FALSE(regime_classify(p).reconciliation);
}

TEST_CASE("uniqueness_condition") {
  ModelParams p;
  const auto sys = variant_transform(p);
  const auto u = uniqueness_condition(sys, 2, 0.01);
  // 0.4/2.1 + (8/17)(2 * 2 + 3 * 28/3) * 0.01
  CHECK(u.lhs == doctest::Approx(0.4 / 2.1 + 8.0 / 17.0 * 32.0 * 0.01).epsilon(1e-14));
  CHECK(u.lhs == doctest::Approx(0.341064).epsilon(1e-6));
  CHECK(u.holds);
  CHECK(uniqueness_condition(sys, 1, 0.0).lhs == doctest::Approx(0.4 / 2.1).epsilon(1e-15));
  double prev = 0.0;
  for (double eta : {0.0, 0.01, 0.02, 0.05, 0.1}) {
    const double l = uniqueness_condition(sys, 3, eta).lhs;
    CHECK(l > prev);
    prev = l;
  }
  CHECK_FALSE(uniqueness_condition(sys, 3, 0.1).holds);
  CHECK(kind_of([&] { uniqueness_condition(sys, 0, 0.01); }) == ErrorKind::InvalidArgument);
  CHECK(transformed_eta(sys.weight_scale * sys.gamma1, sys) == doctest::Approx(1.0));
}

TEST_CASE("existence_check: symmetric pair") {
  const auto geo = support::geography(support::symmetric_pair(), 64);
  ModelParams p;
  const auto rep = existence_check(geo, p);
  const auto sys = variant_transform(p);
  CHECK(rep.hypothesis_value == doctest::Approx(sys.weight_scale * sys.gamma1 - 0.1 * 8).epsilon(1e-14));
  CHECK(rep.precondition);
  CHECK(rep.pairs.size() == 2);
  // Equal productivities and mirror-image cells: only the eta term remains.
  CHECK(rep.pairs[0].lhs == doctest::Approx(2 * 0.3 * rep.eta_hat * 0.5).epsilon(1e-9));
  CHECK(rep.passes);
}

TEST_CASE("existence_check: precondition and delta") {
  const auto geo = support::geography(support::asymmetric_triple(), 64);
  ModelParams p;
  p.delta = 0.01;
  p.tau = 1.0;
  const auto geo_t = support::geography(support::asymmetric_triple(), 64, 1.0);
  const auto bad = existence_check(geo_t, p);
  CHECK_FALSE(bad.precondition);
  CHECK_FALSE(bad.passes);
  p = ModelParams{};
  double prev = -std::numeric_limits<double>::infinity();
  for (double d : {2.0, 5.0, 10.0, 20.0}) {
    p.delta = d;
    const double m = existence_check(geo, p).min_margin;
    CHECK(m > prev);
    prev = m;
  }
  CHECK(existence_check(geo, p).passes);
}

TEST_CASE("existence_check: explicit trade costs") {
  const auto g = support::square(32);
  auto a = std::make_shared<AmenityField>(amenity_from_function(*g, [](Point) { return 1.0; }));
  const auto geo = Geography::create(g, a, support::symmetric_pair(), {}, trade_costs_explicit(2, {1, 1.3, 1.1, 1}));
  ModelParams p;
  CHECK(kind_of([&] { existence_check(geo, p); }) == ErrorKind::NonMetricTradeCosts);
  ExistenceOptions o;
  o.use_sharper_trade_bound = false;
  o.eta_override = 0.0;
  const auto rep = existence_check(geo, p, o);
  const double access = std::abs(std::log(1.3) - std::log(1.0));
  CHECK(rep.pairs[0].lhs == doctest::Approx(8 * access).epsilon(1e-12));
}

TEST_CASE("theorem3_check") {
  ModelParams p;
  ExistenceOptions o;
  o.eta_override = 0.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (double gap : {0.1, 0.2, 0.4, 0.6}) {
    const auto geo = support::geography(spaced_pair(gap), 64);
    const auto r = theorem3_check(geo, p, o);
    CHECK(r.hypothesis_holds);
    CHECK(r.d_min == doctest::Approx(gap).epsilon(1e-12));
    CHECK(r.existence.min_margin > prev);
    prev = r.existence.min_margin;
  }
  p.delta = 0.01;
  const auto fail = theorem3_check(support::geography(spaced_pair(0.5), 32), p, o);
  CHECK_FALSE(fail.hypothesis_holds);
  CHECK(fail.note.find("never") != std::string::npos);
  CHECK(kind_of([&] { theorem3_check(support::geography({{0, {0.5, 0.5}, 1}}, 16), ModelParams{}, o); }) ==
        ErrorKind::SingleSite);
}

TEST_CASE("regime_report on the asymmetric triple") {
  const auto geo = support::geography(support::asymmetric_triple(), 96);
  ModelParams p;
  const auto r = regime_report(geo, p, support::all(3));
  REQUIRE(r.eta_hat);
  CHECK(*r.eta_hat > 0.0);
  REQUIRE(r.uniqueness);
  CHECK(r.uniqueness->holds);
  REQUIRE(r.existence);
  CHECK(r.existence->passes);
  REQUIRE(r.theorem3);
  CHECK(r.theorem3->hypothesis_holds);
}

TEST_CASE("parameter_sweep: alpha_sigma boundary is exact") {
  SweepSpec s;
  s.panel = SweepPanel::alpha_sigma;
  const auto r = parameter_sweep(s);
  CHECK(r.cells.size() == static_cast<std::size_t>(s.n_alpha * s.n_sigma));
  REQUIRE_FALSE(r.boundary.empty());
  for (const Point& b : r.boundary) CHECK(b.x == 1.0 / (b.y - 1.0));
  for (const auto& c : r.cells) {
    const double cut = 1.0 / (c.sigma - 1.0);
    if (c.alpha > cut + kKnifeEdgeTol) CHECK(c.multiplicity == Multiplicity::multiple);
    if (c.alpha < cut - kKnifeEdgeTol) CHECK(c.multiplicity == Multiplicity::spread);
    CHECK(c.category == 2 * static_cast<int>(c.multiplicity) + (c.labor_unique ? 1 : 0));
  }
}

TEST_CASE("parameter_sweep: alpha_beta panels") {
  SweepSpec s;
  s.sigma = 9;
  s.n_alpha = 11;
  s.n_beta = 13;
  s.beta_min = -0.6;
  s.beta_max = 0.0;
  const auto r9 = parameter_sweep(s);
  CHECK(r9.cells.size() == 11 * 13);
  bool found = false;
  for (const auto& c : r9.cells) {
    if (c.beta == 0.0) CHECK_FALSE(c.valid);
    if (std::abs(c.alpha - 0.18) < 1e-12 && std::abs(c.beta + 0.3) < 1e-12) {
      found = true;
      CHECK(c.multiplicity == Multiplicity::multiple);
      CHECK(c.labor_unique);
    }
  }
  CHECK(found);
  for (const Point& b : r9.labor_boundary) CHECK((b.x == -b.y || b.x == b.y - 2.0));
  s.sigma = 5;
  const auto r5 = parameter_sweep(s);
  int multiple9 = 0, multiple5 = 0;
  for (std::size_t k = 0; k < r9.cells.size(); ++k) {
    multiple9 += r9.cells[k].valid && r9.cells[k].multiplicity == Multiplicity::multiple;
    multiple5 += r5.cells[k].valid && r5.cells[k].multiplicity == Multiplicity::multiple;
  }
  CHECK(multiple9 > multiple5);
  s.n_alpha = 1;
  CHECK(kind_of([&] { parameter_sweep(s); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("multistart_uniqueness_probe") {
  const auto geo = support::geography(support::asymmetric_triple(), 64);
  ModelParams p;
  const auto one = multistart_uniqueness_probe(geo, p, support::all(3), 1, 7);
  CHECK(one.unique);
  CHECK(one.starts.size() == 1);
  const auto many = multistart_uniqueness_probe(geo, p, support::all(3), 6, 7);
  CHECK(many.unique);
  for (const auto& s : many.starts) {
    CHECK(s.status == SolveStatus::converged);
    CHECK(s.cluster == 0);
    CHECK(s.differences[0] == 0.0);
  }
  const auto again = multistart_uniqueness_probe(geo, p, support::all(3), 6, 7);
  CHECK(again.clusters == many.clusters);
  CHECK(kind_of([&] { multistart_uniqueness_probe(geo, p, support::all(3), 0, 7); }) == ErrorKind::InvalidArgument);
}
