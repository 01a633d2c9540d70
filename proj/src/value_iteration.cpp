#include "reach/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reach/errors.hpp"

namespace reach {
namespace {

// Rounding allowance when comparing B(u) with u.
constexpr double kCertifySlack = 1e-15;

}  // namespace

FixedPointResult iterate_to_fixed_point(const kernels::SweepGraph& g, std::vector<double> init,
                                        double tol, std::optional<double> monotone_tol,
                                        int max_sweeps) {
  FixedPointResult result;
  std::vector<double> next(init.size());
  result.values = std::move(init);
  result.residual = std::numeric_limits<double>::infinity();
  while (result.sweeps < max_sweeps) {
    const auto stats = kernels::bellman_apply(g, result.values, next);
    ++result.sweeps;
    if (monotone_tol && stats.max_decrease > *monotone_tol) {
      throw NonMonotoneVI("value iteration sweep " + std::to_string(result.sweeps) +
                          " decreased a value by " + std::to_string(stats.max_decrease));
    }
    result.values.swap(next);
    result.residual = stats.max_change;
    if (stats.max_change < tol) break;
  }
  return result;
}

std::optional<std::vector<double>> certify_upper(const kernels::SweepGraph& g,
                                                 const std::vector<double>& v, double delta,
                                                 double cap, int max_sweeps) {
  std::vector<double> u(v);
  for (int n = 0; n < g.num_nodes(); ++n) {
    if (!g.fixed[n]) u[n] = std::min(cap, v[n] + delta);
  }
  std::vector<double> bu(u.size());
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    kernels::bellman_apply(g, u, bu);
    bool pre_fixed = true;
    for (int n = 0; n < g.num_nodes(); ++n) {
      if (bu[n] > u[n] + kCertifySlack) {
        pre_fixed = false;
        u[n] = std::min(cap, bu[n]);
      }
    }
    if (pre_fixed) return u;
  }
  return std::nullopt;
}

CertifiedFixedPoint certified_least_fixed_point(const kernels::SweepGraph& g,
                                                std::vector<double> init, double tol,
                                                std::optional<double> monotone_tol) {
  CertifiedFixedPoint out;
  double current_tol = tol;
  for (int attempt = 0; attempt < 6; ++attempt) {
    auto fp = iterate_to_fixed_point(g, std::move(init), current_tol, monotone_tol);
    out.sweeps += fp.sweeps;
    out.lower = std::move(fp.values);
    for (double factor : {1.0, 10.0, 100.0}) {
      if (auto u = certify_upper(g, out.lower, std::max(current_tol * factor, 1e-15))) {
        out.upper = std::move(*u);
        out.certified = true;
        return out;
      }
    }
    init = out.lower;
    current_tol = std::max(current_tol * 0.1, 1e-16);
  }
  out.upper = out.lower;
  return out;
}

}  // namespace reach
