#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "numeric.hpp"
#include "urbaneq/equilibrium.hpp"
#include "urbaneq/error.hpp"

namespace urbaneq {

namespace {

struct GravityBlock {
  std::size_t n;
  double sigma;
  Eigen::MatrixXd logT;
  Eigen::VectorXd logA, logL;

  // log P from log w.
  Eigen::VectorXd log_prices(const Eigen::VectorXd& x, Eigen::MatrixXd* shares) const {
    Eigen::VectorXd logP(n);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) v[k] = (1.0 - sigma) * (logT(k, j) + x(k) - logA(k));
      const double lse = detail::logsumexp(v);
      logP(j) = lse / (1.0 - sigma);
      if (shares)
        for (std::size_t k = 0; k < n; ++k) (*shares)(k, j) = std::exp(v[k] - lse);
    }
    return logP;
  }

  // F_i = sigma x_i + log L_i - (sigma - 1) log A_i - log sum_j T_ij^{1-s} P_j^{s-1} w_j L_j.
  Eigen::VectorXd residual(const Eigen::VectorXd& x, Eigen::MatrixXd* jac) const {
    Eigen::MatrixXd t(n, n);
    const Eigen::VectorXd logP = log_prices(x, jac ? &t : nullptr);
    Eigen::VectorXd F(n);
    Eigen::MatrixXd s(n, n);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        u[j] = (1.0 - sigma) * logT(i, j) + (sigma - 1.0) * logP(j) + x(j) + logL(j);
      const double lse = detail::logsumexp(u);
      F(i) = sigma * x(i) + logL(i) - (sigma - 1.0) * logA(i) - lse;
      if (jac)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = std::exp(u[j] - lse);
    }
    if (jac) *jac = sigma * Eigen::MatrixXd::Identity(n, n) - s - (sigma - 1.0) * s * t.transpose();
    return F;
  }

  double normalization(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = x(i) + logL(i);
    const double lse = detail::logsumexp(v);
    if (grad) {
      grad->resize(n);
      for (std::size_t i = 0; i < n; ++i) (*grad)(i) = std::exp(v[i] - lse);
    }
    return lse;
  }

  // Newton system: first n-1 market equations plus the numeraire.
  Eigen::VectorXd system(const Eigen::VectorXd& x, Eigen::MatrixXd* jac) const {
    Eigen::VectorXd F = residual(x, jac);
    Eigen::VectorXd g;
    F(n - 1) = normalization(x, jac ? &g : nullptr);
    if (jac) jac->row(n - 1) = g.transpose();
    return F;
  }
};

}  // namespace

MarketSolution market_equilibrium_solve(std::span<const double> labor, const Geography& geo, const ModelParams& params,
                                        const MarketOptions& opts) {
  const std::size_t n = labor.size();
  if (n == 0 || n != geo.size()) throw Error(ErrorKind::InvalidArgument, "labor vector size mismatch");
  GravityBlock b{n, params.sigma, Eigen::MatrixXd(n, n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(labor[i] > 0.0) || !std::isfinite(labor[i]))
      throw Error(ErrorKind::ZeroLabor, "site " + std::to_string(i) + " has no labor");
    total += labor[i];
    b.logL(i) = std::log(labor[i]);
    b.logA(i) = std::log(geo.sites[i].productivity) + params.alpha * b.logL(i);
    for (std::size_t j = 0; j < n; ++j) b.logT(i, j) = std::log(geo.trade(i, j));
  }

  MarketSolution sol;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), -std::log(total));
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd F = b.system(x, &J);
  for (sol.iterations = 0; sol.iterations < opts.max_iter; ++sol.iterations) {
    if (F.lpNorm<Eigen::Infinity>() < opts.tol) break;
    const Eigen::VectorXd dx = J.partialPivLu().solve(-F);
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn;
    for (int ls = 0; ls < 40 && !accepted; ++ls, step *= 0.5) {
      xn = x + step * dx;
      const Eigen::VectorXd Fn = b.system(xn, nullptr);
      accepted = Fn.allFinite() && Fn.lpNorm<Eigen::Infinity>() < F.lpNorm<Eigen::Infinity>();
    }
    if (!accepted) break;
    x = xn;
    F = b.system(x, &J);
  }

  // Level residuals of both blocks.
  const Eigen::VectorXd full = b.residual(x, nullptr);
  const Eigen::VectorXd logP = b.log_prices(x, nullptr);
  sol.w.resize(n);
  sol.P.resize(n);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sol.w[i] = std::exp(x(i));
    sol.P[i] = std::exp(logP(i));
    res = std::max(res, std::abs(std::expm1(full(i))));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      rhs += std::pow(geo.trade(j, i), 1.0 - params.sigma) * std::exp((params.sigma - 1.0) * b.logA(j)) *
             std::pow(sol.w[j], 1.0 - params.sigma);
    res = std::max(res, std::abs(std::pow(sol.P[i], 1.0 - params.sigma) / rhs - 1.0));
  }
  double numeraire = 0.0;
  for (std::size_t i = 0; i < n; ++i) numeraire += sol.w[i] * labor[i];
  res = std::max(res, std::abs(numeraire - 1.0));
  sol.residual = res;
  if (!(res < 1e-10)) throw Error(ErrorKind::NotConverged, "gravity block residual " + std::to_string(res));
  return sol;
}

}  // namespace urbaneq
