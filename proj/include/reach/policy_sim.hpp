#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reach/bounds.hpp"
#include "reach/pomdp.hpp"

namespace reach {

/// Executable policy: act with the action of the maximizing α-vector (ties
/// go to the earliest-inserted vector).
class AlphaPolicy {
 public:
  /// Throws EmptyPolicy when `gamma_set` has no vectors.
  AlphaPolicy(const AugmentedPomdp& p, LowerBoundSet gamma_set);

  ActionId action_for(const Belief& b) const;
  const LowerBoundSet& vectors() const { return set_; }
  const AugmentedPomdp& pomdp() const { return *p_; }
  /// True for states from which no target is reachable under any action.
  bool hopeless(StateId s) const { return hopeless_[s] != 0; }

 private:
  const AugmentedPomdp* p_;
  LowerBoundSet set_;
  std::vector<char> hopeless_;
};

struct SimReport {
  std::int64_t episodes = 0;
  std::int64_t successes = 0;
  std::int64_t truncated = 0;
  double estimate = 0.0;
  double ci99 = 0.0;

  double truncation_mass() const {
    return episodes > 0 ? static_cast<double>(truncated) / episodes : 0.0;
  }
  /// lower - ci99 - trunc <= estimate <= upper + ci99 + trunc.
  bool sandwiched(double lower, double upper) const;
};

/// Wilson score interval half-width at 99% confidence.
double wilson_half_width(std::int64_t successes, std::int64_t episodes);

/// Samples `episodes` runs from the initial belief. An episode succeeds when
/// it enters a target (or the sink), fails once the state can no longer reach
/// one, and is truncated after `max_steps` actions. Episode i draws from its own generator seeded from (seed, i), so
/// the report does not depend on the thread count.
SimReport simulate(const AlphaPolicy& pol, std::int64_t episodes, int max_steps,
                   std::uint64_t seed);

/// Same result computed on one thread.
SimReport simulate_serial(const AlphaPolicy& pol, std::int64_t episodes, int max_steps,
                          std::uint64_t seed);

std::string sim_report_json(const SimReport& r);

}  // namespace reach
