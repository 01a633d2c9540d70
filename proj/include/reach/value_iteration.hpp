#pragma once

#include <optional>
#include <vector>

#include "reach/kernels.hpp"

namespace reach {

struct FixedPointResult {
  std::vector<double> values;
  int sweeps = 0;
  double residual = 0.0;
};

/// Synchronous (Jacobi) value iteration started from `init`, stopping when
/// the sup-norm residual drops below `tol` or after `max_sweeps`. Started
/// below the least fixed point it converges to it from below.
///
/// Throws NonMonotoneVI when `monotone_tol` is set and a sweep lowers some
/// value by more than it.
FixedPointResult iterate_to_fixed_point(const kernels::SweepGraph& g, std::vector<double> init,
                                        double tol, std::optional<double> monotone_tol = {},
                                        int max_sweeps = 1'000'000);

/// Searches for a pre-fixed point (B(u) <= u), which proves u lies above the
/// least fixed point. Starts from `min(v + delta, cap)` on free nodes and
/// raises u to max(u, B(u)) until the check passes or `max_sweeps` runs out
/// (nullopt).
std::optional<std::vector<double>> certify_upper(const kernels::SweepGraph& g,
                                                 const std::vector<double>& v, double delta,
                                                 double cap = 1.0, int max_sweeps = 2000);

struct CertifiedFixedPoint {
  std::vector<double> lower;  // the VI iterate (below the lfp)
  std::vector<double> upper;  // certified over-approximation, valid iff `certified`
  bool certified = false;
  int sweeps = 0;
};

/// Value iteration from below followed by optimistic verification: keeps
/// tightening the residual until some v + delta certifies.
CertifiedFixedPoint certified_least_fixed_point(const kernels::SweepGraph& g,
                                                std::vector<double> init, double tol,
                                                std::optional<double> monotone_tol = {});

}  // namespace reach
