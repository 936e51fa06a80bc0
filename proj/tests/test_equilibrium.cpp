#include <doctest.h>

#include <algorithm>
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

double diff_spread(const EquilibriumSolution& a, const EquilibriumSolution& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.lambda.size(); ++i)
    m = std::max(m, std::abs((a.lambda[i] - a.lambda[0]) - (b.lambda[i] - b.lambda[0])));
  return m;
}

}  // namespace

TEST_CASE("composite_params: worked example") {
  ModelParams p;
  const auto sys = variant_transform(p);
  CHECK(sys.gamma1 == doctest::Approx(2.1).epsilon(1e-14));
  CHECK(sys.gamma2 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(std::abs(sys.ratio()) == doctest::Approx(0.1904761904761905).epsilon(1e-14));
  CHECK(sys.sigma_tilde == doctest::Approx(8.0 / 17.0).epsilon(1e-15));
  CHECK(sys.phi1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sys.phi2 == doctest::Approx(28.0 / 3.0).epsilon(1e-14));
  CHECK(sys.weight_scale == doctest::Approx(-(10 / -0.3) * 8.0 / 17.0).epsilon(1e-14));
  CHECK(p.alpha > 1 / (p.sigma - 1));
}

TEST_CASE("composite_params: kernel matrix") {
  const auto geo = support::geography(support::asymmetric_triple());
  ModelParams p;
  const auto c = composite_params(p, geo.sites, geo.trade);
  const double st = 8.0 / 17.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double k = std::pow(geo.trade(i, j), 1 - p.sigma) * std::pow(geo.sites[i].productivity, st * (p.sigma - 1)) *
                       std::pow(geo.sites[j].productivity, st * p.sigma);
      CHECK(c.K(i, j) == doctest::Approx(k).epsilon(1e-13));
    }
}

TEST_CASE("composite_params: limits and knife edge") {
  ModelParams p;
  p.sigma = 2;
  p.alpha = 0;
  p.beta = -1e-9;
  auto s = variant_transform(p);
  CHECK(s.gamma1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.gamma2 == doctest::Approx(1.0).epsilon(1e-8));
  p = ModelParams{};
  p.alpha = 1.0 / 8.0;
  s = variant_transform(p);
  CHECK(std::abs(s.phi1) < 1e-15);
  CHECK(s.gamma2 == doctest::Approx(1 / s.sigma_tilde + (p.sigma - 1) * p.beta).epsilon(1e-14));
  // Own term vanishes, the rest is the global-system exponent -1/beta.
  CHECK(s.exp_other() == doctest::Approx(-1 / p.beta).epsilon(1e-14));
}

TEST_CASE("composite_params: errors") {
  const auto geo = support::geography(support::symmetric_pair());
  ModelParams p;
  p.alpha = (1 - p.sigma * p.beta) / (p.sigma - 1);
  CHECK(kind_of([&] { composite_params(p, geo.sites, geo.trade); }) == ErrorKind::DegenerateGamma1);
  p = ModelParams{};
  p.sigma = 1.0;
  CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidArgument);
  p = ModelParams{};
  p.variant = Variant::two_sector;
  p.mu = 1.2;
  CHECK(kind_of([&] { variant_transform(p); }) == ErrorKind::InvalidVariantParams);
  p.mu = 0.5;
  p.beta_tilde = 0.1;
  CHECK(kind_of([&] { variant_transform(p); }) == ErrorKind::InvalidVariantParams);
}

TEST_CASE("variant_transform: home consumption and two-sector") {
  ModelParams b;
  ModelParams h = b;
  h.variant = Variant::home_consumption;
  h.tau = 0.0;
  const auto sb = variant_transform(b), sh = variant_transform(h);
  CHECK(sb.weight_scale == sh.weight_scale);
  CHECK(sb.kernel.commuting_rate == sh.kernel.commuting_rate);
  CHECK(sb.gamma1 == sh.gamma1);
  h.tau = 0.1;
  CHECK(variant_transform(h).kernel.commuting_rate == doctest::Approx(10.1));

  ModelParams t;
  t.variant = Variant::two_sector;
  t.mu = 0.5;
  t.beta_tilde = -0.2;
  t.sigma = 5;
  t.alpha = 0.1;
  const auto st = variant_transform(t);
  CHECK(st.gamma1 == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(st.weight_scale == doctest::Approx(-(10 * 0.5 / -0.2) * 4.0 / 9.0).epsilon(1e-14));
  CHECK(st.kernel.commuting_rate == doctest::Approx(10 * (0.5 + 0.2 * 0.5)).epsilon(1e-14));
  t.mu = 1 - 1e-12;
  CHECK(variant_transform(t).gamma1 == doctest::Approx(1 - 4 * 0.1).epsilon(1e-9));
}

TEST_CASE("g_map: shift covariance and symmetry") {
  const auto geo = support::geography(support::asymmetric_triple(), 64);
  ModelParams p;
  const auto c = composite_params(p, geo.sites, geo.trade);
  const std::vector<double> u{0.3, -0.2, 0.1};
  const double shift = 1.7;
  const std::vector<double> v{u[0] + shift, u[1] + shift, u[2] + shift};
  const auto g1 = g_map(u, c, geo), g2 = g_map(v, c, geo);
  for (std::size_t i = 0; i < 3; ++i) CHECK(g2[i] - g1[i] == doctest::Approx(c.sys.ratio() * shift).epsilon(1e-12));
  const auto sym = support::geography(support::symmetric_pair(), 64);
  const auto cs = composite_params(p, sym.sites, sym.trade);
  const auto gs = g_map(std::vector<double>{0, 0}, cs, sym);
  CHECK(gs[0] == doctest::Approx(gs[1]).epsilon(1e-13));
  const auto one = support::geography({{0, {0.5, 0.5}, 1}}, 32);
  CHECK(g_map(std::vector<double>{0}, composite_params(p, one.sites, one.trade), one).size() == 1);
}

TEST_CASE("g_map: empty cell in sum") {
  const auto geo = support::geography(support::symmetric_pair(), 64);
  ModelParams p;
  const auto c = composite_params(p, geo.sites, geo.trade);
  const double big = 0.9 * c.sys.weight_scale * c.sys.gamma1;
  CHECK(kind_of([&] { g_map(std::vector<double>{big, -big}, c, geo); }) == ErrorKind::EmptyCellInSum);
}

TEST_CASE("fixed_point_solve: symmetric pair") {
  const auto geo = support::geography(support::symmetric_pair(), 64);
  ModelParams p;
  const auto s = fixed_point_solve(geo, p, support::all(2));
  REQUIRE(s.converged());
  CHECK(s.lambda[0] == doctest::Approx(s.lambda[1]).epsilon(1e-12));
  CHECK(std::abs(s.L[0] / 0.5 - 1) < 1e-8);
  CHECK(std::abs(s.L[1] / 0.5 - 1) < 1e-8);
  CHECK(s.V > 0);
  CHECK(s.residuals.lambda_eq < 1e-8);
  CHECK(s.residuals.market < 1e-10);
  CHECK(s.residuals.population_slack < 1e-8);
}

TEST_CASE("fixed_point_solve: monocentric") {
  const auto geo = support::geography({{0, {0.4, 0.6}, 1.3}}, 64);
  ModelParams p;
  p.L = 2.0;
  const auto s = fixed_point_solve(geo, p, support::all(1));
  REQUIRE(s.converged());
  CHECK(s.L[0] == doctest::Approx(2.0).epsilon(1e-12));
  const double real_wage = 1.3 * std::pow(2.0, p.alpha);
  CHECK(s.w[0] / s.P[0] == doctest::Approx(real_wage).epsilon(1e-10));
  CHECK(s.V == doctest::Approx(s.B[0] * real_wage * std::pow(2.0, p.beta)).epsilon(1e-10));
  CHECK(s.tessellation.cell_measure[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed_point_solve: asymmetric residual by independent evaluation") {
  const std::vector<Site> sites{{0, {0.3, 0.5}, 1.0}, {1, {0.7, 0.5}, 1.1}};
  const auto geo = support::geography(sites, 128);
  ModelParams p;
  const auto s = fixed_point_solve(geo, p, support::all(2));
  REQUIRE(s.converged());
  const auto t = assign_labels(*geo.grid, geo.sites, geo.metric, s.lambda);
  const auto B = support::recompute_B(geo, t, p.beta, p.delta);
  const double V = support::population_V(B, s.lambda, p);
  CHECK(V == doctest::Approx(s.V).epsilon(1e-10));
  CHECK(support::lambda_eq_log_residual(geo, p, s.lambda, B, V) < 1e-8);
  CHECK(s.L[1] > s.L[0]);
}

TEST_CASE("fixed_point_solve: recovered levels are consistent") {
  const auto geo = support::geography(support::asymmetric_triple(), 128, 0.1, [](Point q) { return 1 + 0.5 * q.x; });
  ModelParams p;
  const auto s = fixed_point_solve(geo, p, support::all(3));
  REQUIRE(s.converged());
  CHECK(s.residuals.identity_spread < 1e-6);
  CHECK(s.residuals.welfare_spread < 1e-6);
  double total = 0.0;
  for (double l : s.L) total += l;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  // w^{2s-1} proportional to A^{s-1} B^{1-s} L^{b(1-s)-1+a(s-1)}.
  std::vector<double> ratio;
  for (std::size_t i = 0; i < 3; ++i)
    ratio.push_back(std::pow(s.w[i], 2 * p.sigma - 1) /
                    (std::pow(geo.sites[i].productivity, p.sigma - 1) * std::pow(s.B[i], 1 - p.sigma) *
                     std::pow(s.L[i], p.beta * (1 - p.sigma) - 1 + p.alpha * (p.sigma - 1))));
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  CHECK(*hi / *lo - 1 < 1e-6);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s.V_i[i] == doctest::Approx(s.V).epsilon(1e-10));
}

TEST_CASE("fixed_point_solve: anchor invariance") {
  const auto geo = support::geography(support::asymmetric_triple(), 96);
  ModelParams p;
  SolverOptions o0, o2;
  o2.anchor = 2;
  const auto a = fixed_point_solve(geo, p, support::all(3), o0);
  const auto b = fixed_point_solve(geo, p, support::all(3), o2);
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  CHECK(diff_spread(a, b) < 1e-8);
  CHECK(a.V == doctest::Approx(b.V).epsilon(1e-8));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.L[i] == doctest::Approx(b.L[i]).epsilon(1e-8));
    CHECK(a.w[i] / a.P[i] == doctest::Approx(b.w[i] / b.P[i]).epsilon(1e-8));
  }
}

TEST_CASE("fixed_point_solve: population scale") {
  const auto geo = support::geography(support::asymmetric_triple(), 96);
  ModelParams p;
  const auto a = fixed_point_solve(geo, p, support::all(3));
  p.L = 2.0;
  const auto b = fixed_point_solve(geo, p, support::all(3));
  CHECK(a.tessellation.labels == b.tessellation.labels);
  CHECK(diff_spread(a, b) < 1e-10);
  for (std::size_t i = 0; i < 3; ++i) CHECK(b.L[i] / 2.0 == doctest::Approx(a.L[i]).epsilon(1e-10));
  // Productivity spillovers scale real wages too: V ~ L^{alpha + beta}.
  CHECK(b.V / a.V == doctest::Approx(std::pow(2.0, p.alpha + p.beta)).epsilon(1e-9));
  p.alpha = 0.0;
  p.L = 1.0;
  const auto c = fixed_point_solve(geo, p, support::all(3));
  p.L = 2.0;
  const auto d = fixed_point_solve(geo, p, support::all(3));
  CHECK(d.V / c.V == doctest::Approx(std::pow(2.0, p.beta)).epsilon(1e-9));
}

TEST_CASE("fixed_point_solve: statuses and errors") {
  const auto geo = support::geography(support::asymmetric_triple(), 64);
  ModelParams p;
  SolverOptions o;
  o.max_iter = 1;
  const auto s = fixed_point_solve(geo, p, support::all(3), o);
  CHECK(s.status == SolveStatus::not_converged);
  CHECK(kind_of([&] { require_converged(s); }) == ErrorKind::NotConverged);

  p.delta = 2.0;
  const auto pair = support::geography({{0, {0.25, 0.5}, 1.0}, {1, {0.75, 0.5}, 2.0}}, 64);
  const auto lf = fixed_point_solve(pair, p, support::all(2));
  CHECK(lf.status == SolveStatus::left_feasible_set);
  CHECK(lf.exited_feasible);
  CHECK(kind_of([&] { require_converged(lf); }) == ErrorKind::LeftFeasibleSet);

  ModelParams q;
  q.alpha = 0.3;  // gamma1 == gamma2 when alpha = -beta
  CHECK(kind_of([&] { fixed_point_solve(geo, q, support::all(3)); }) == ErrorKind::DegenerateConstantRecovery);
  CHECK(kind_of([&] { fixed_point_solve(geo, ModelParams{}, std::vector<int>{}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("market_equilibrium_solve") {
  const auto one = support::geography({{0, {0.5, 0.5}, 1.4}}, 16);
  ModelParams p;
  const auto m1 = market_equilibrium_solve(std::vector<double>{0.7}, one, p);
  CHECK(m1.w[0] / m1.P[0] == doctest::Approx(1.4 * std::pow(0.7, p.alpha)).epsilon(1e-12));
  CHECK(m1.w[0] * 0.7 == doctest::Approx(1.0).epsilon(1e-12));

  const auto sym = support::geography(support::symmetric_pair(), 16);
  const auto m2 = market_equilibrium_solve(std::vector<double>{0.5, 0.5}, sym, p);
  CHECK(m2.w[0] == doctest::Approx(m2.w[1]).epsilon(1e-13));
  CHECK(m2.P[0] == doctest::Approx(m2.P[1]).epsilon(1e-13));

  // Both blocks by direct substitution.
  const auto geo = support::geography(support::asymmetric_triple(), 16);
  const std::vector<double> L{0.2, 0.5, 0.3};
  const auto m = market_equilibrium_solve(L, geo, p);
  CHECK(m.residual < 1e-10);
  const double s = p.sigma;
  for (std::size_t i = 0; i < 3; ++i) {
    const double Ai = geo.sites[i].productivity * std::pow(L[i], p.alpha);
    double wage = 0.0, price = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double Aj = geo.sites[j].productivity * std::pow(L[j], p.alpha);
      wage += std::pow(geo.trade(i, j), 1 - s) * std::pow(Ai, s - 1) * std::pow(m.P[j], s - 1) * m.w[j] * L[j];
      price += std::pow(geo.trade(j, i), 1 - s) * std::pow(Aj, s - 1) * std::pow(m.w[j], 1 - s);
    }
    CHECK(std::pow(m.w[i], s) * L[i] == doctest::Approx(wage).epsilon(1e-10));
    CHECK(std::pow(m.P[i], 1 - s) == doctest::Approx(price).epsilon(1e-10));
  }
  CHECK(kind_of([&] { market_equilibrium_solve(std::vector<double>{0.5, 0.0, 0.5}, geo, p); }) ==
        ErrorKind::ZeroLabor);
}

TEST_CASE("theorem2_global_solve") {
  ModelParams p;
  p.sigma = 5;
  p.alpha = 0.25;
  const auto sym = support::geography(support::symmetric_pair(), 64);
  const auto s = theorem2_global_solve(sym, p);
  REQUIRE(s.converged());
  CHECK(s.tessellation.active_set.size() == 2);
  CHECK(s.lambda[0] == doctest::Approx(s.lambda[1]).epsilon(1e-12));

  const auto geo = support::geography(support::asymmetric_triple(), 64);
  const auto a = theorem2_global_solve(geo, p);
  REQUIRE(a.converged());
  CHECK(a.residuals.lambda_eq < 1e-8);

  const std::vector<Site> weak{{0, {0.2, 0.5}, 1.0}, {1, {0.8, 0.5}, 1.0}, {2, {0.5, 0.5}, 0.01}};
  const auto wg = support::geography(weak, 64);
  const auto w = theorem2_global_solve(wg, p);
  REQUIRE(w.converged());
  CHECK(w.tessellation.cell_measure[2] == 0.0);
  CHECK(std::isfinite(w.lambda[2]));
  // The inactive weight is the potential weight of the vacant site.
  const auto act = fixed_point_solve(wg, p, std::vector<int>{0, 1});
  const auto pw = potential_weight(act, wg, p, 2);
  CHECK(std::abs((pw.value - act.lambda[0]) - (w.lambda[2] - w.lambda[0])) < 1e-6);

  ModelParams off = p;
  off.alpha = 0.2;
  CHECK(kind_of([&] { theorem2_global_solve(geo, off); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("variants solve") {
  const auto geo = support::geography(support::asymmetric_triple(), 96);
  ModelParams b;
  ModelParams h = b;
  h.variant = Variant::home_consumption;
  h.tau = 0.0;
  const auto gb0 = support::geography(support::asymmetric_triple(), 96, 0.0);
  b.tau = 0.0;
  const auto sb = fixed_point_solve(gb0, b, support::all(3));
  const auto sh = fixed_point_solve(gb0, h, support::all(3));
  REQUIRE(sb.converged());
  for (std::size_t i = 0; i < 3; ++i) CHECK(sh.lambda[i] - sh.lambda[0] == sb.lambda[i] - sb.lambda[0]);

  h.tau = 0.1;
  const auto sh1 = fixed_point_solve(geo, h, support::all(3));
  REQUIRE(sh1.converged());
  CHECK(sh1.residuals.lambda_eq < 1e-8);
  CHECK(sh1.residuals.identity_spread < 1e-6);

  ModelParams t;
  t.variant = Variant::two_sector;
  const auto st = fixed_point_solve(geo, t, support::all(3));
  REQUIRE(st.converged());
  CHECK(st.residuals.lambda_eq < 1e-8);
  CHECK(st.residuals.identity_spread < 1e-6);
  CHECK(st.residuals.welfare_spread < 1e-6);
}
