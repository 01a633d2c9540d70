#include "reach/policy_sim.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "reach/errors.hpp"

namespace reach {
namespace {

constexpr double kZ99 = 2.5758293035489;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct ExactBeliefHash {
  std::size_t operator()(const Belief& b) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (const auto& e : b.entries()) {
      h = splitmix64(h ^ static_cast<std::uint64_t>(e.state));
      h = splitmix64(h ^ std::bit_cast<std::uint64_t>(e.prob));
    }
    return h;
  }
};

// Memoizes the policy's action and posterior beliefs per distinct belief.
// Lookups are exact, so caching never changes a sampled trajectory.
class BeliefCache {
 public:
  explicit BeliefCache(const AlphaPolicy& pol) : pol_(pol) {}

  int intern(const Belief& b) {
    auto [it, inserted] = ids_.try_emplace(b, static_cast<int>(beliefs_.size()));
    if (inserted) {
      beliefs_.push_back(b);
      actions_.push_back(pol_.action_for(b));
      next_.emplace_back(pol_.pomdp().num_observations(), -1);
    }
    return it->second;
  }

  ActionId action(int id) const { return actions_[id]; }

  int next(int id, ObservationId o) {
    int& slot = next_[id][o];
    if (slot < 0) {
      int nid = id;
      try {
        nid = intern(pol_.pomdp().belief_update(beliefs_[id], actions_[id], o));
      } catch (const ZeroProbabilityObservation&) {
        // The true state carried mass below the support threshold; keep the
        // current belief rather than abort the episode.
      }
      next_[id][o] = nid;  // intern may have reallocated next_
      return nid;
    }
    return slot;
  }

 private:
  const AlphaPolicy& pol_;
  std::unordered_map<Belief, int, ExactBeliefHash> ids_;
  std::vector<Belief> beliefs_;
  std::vector<ActionId> actions_;
  std::vector<std::vector<int>> next_;
};

template <typename Dist>
int sample_index(const Dist& dist, double u) {
  double acc = 0.0;
  for (const auto& e : dist) {
    acc += e.prob;
    if (u < acc) return e.index;
  }
  return dist.back().index;
}

StateId sample_state(const Belief& b, double u) {
  double acc = 0.0;
  for (const auto& e : b.entries()) {
    acc += e.prob;
    if (u < acc) return e.state;
  }
  return b.entries().back().state;
}

enum class Outcome { success, failure, truncated };

Outcome run_episode(const AlphaPolicy& pol, BeliefCache& cache, int max_steps,
                    std::uint64_t seed) {
  const AugmentedPomdp& p = pol.pomdp();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  StateId s = sample_state(p.initial_belief(), unif(rng));
  int belief = cache.intern(p.initial_belief());
  for (int step = 0;; ++step) {
    if (p.is_target(s) || s == p.sink_state()) return Outcome::success;
    if (pol.hopeless(s)) return Outcome::failure;
    if (step >= max_steps) return Outcome::truncated;
    const ActionId a = cache.action(belief);
    s = sample_index(p.transition(s, a), unif(rng));
    const ObservationId o = sample_index(p.observation(s, a), unif(rng));
    belief = cache.next(belief, o);
  }
}

SimReport finish(std::int64_t episodes, std::int64_t successes, std::int64_t truncated) {
  SimReport r;
  r.episodes = episodes;
  r.successes = successes;
  r.truncated = truncated;
  r.estimate = episodes > 0 ? static_cast<double>(successes) / episodes : 0.0;
  r.ci99 = wilson_half_width(successes, episodes);
  return r;
}

}  // namespace

AlphaPolicy::AlphaPolicy(const AugmentedPomdp& p, LowerBoundSet gamma_set)
    : p_(&p), set_(std::move(gamma_set)), hopeless_(p.num_states(), 1) {
  if (set_.empty()) throw EmptyPolicy();
  // Backward search from the targets over every action's transitions.
  const int S = p.num_states();
  std::vector<std::vector<StateId>> preds(S);
  for (ActionId a = 0; a < p.num_actions(); ++a) {
    for (StateId s = 0; s < S; ++s) {
      for (const auto& e : p.transition(s, a)) preds[e.index].push_back(s);
    }
  }
  std::vector<StateId> stack;
  for (StateId s = 0; s < S; ++s) {
    if (p.is_target(s) || s == p.sink_state()) {
      hopeless_[s] = 0;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const StateId t = stack.back();
    stack.pop_back();
    for (StateId s : preds[t]) {
      if (hopeless_[s]) {
        hopeless_[s] = 0;
        stack.push_back(s);
      }
    }
  }
}

ActionId AlphaPolicy::action_for(const Belief& b) const {
  return set_.vectors()[set_.best(b).index].action;
}

bool SimReport::sandwiched(double lower, double upper) const {
  const double slack = ci99 + truncation_mass();
  return estimate >= lower - slack && estimate <= upper + slack;
}

double wilson_half_width(std::int64_t successes, std::int64_t episodes) {
  if (episodes <= 0) return 1.0;
  const double n = static_cast<double>(episodes);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = kZ99 * kZ99;
  return kZ99 / (1.0 + z2 / n) * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
}

SimReport simulate_serial(const AlphaPolicy& pol, std::int64_t episodes, int max_steps,
                          std::uint64_t seed) {
  BeliefCache cache(pol);
  std::int64_t successes = 0, truncated = 0;
  for (std::int64_t i = 0; i < episodes; ++i) {
    const auto out = run_episode(pol, cache, max_steps,
                                 splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i))));
    successes += out == Outcome::success;
    truncated += out == Outcome::truncated;
  }
  return finish(episodes, successes, truncated);
}

SimReport simulate(const AlphaPolicy& pol, std::int64_t episodes, int max_steps,
                   std::uint64_t seed) {
  std::int64_t successes = 0, truncated = 0;
#ifdef REACH_HAVE_OPENMP
#pragma omp parallel reduction(+ : successes, truncated)
#endif
  {
    BeliefCache cache(pol);
#ifdef REACH_HAVE_OPENMP
#pragma omp for schedule(dynamic, 256)
#endif
    for (std::int64_t i = 0; i < episodes; ++i) {
      const auto out = run_episode(pol, cache, max_steps,
                                   splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i))));
      successes += out == Outcome::success;
      truncated += out == Outcome::truncated;
    }
  }
  return finish(episodes, successes, truncated);
}

std::string sim_report_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["episodes"] = r.episodes;
  j["successes"] = r.successes;
  j["estimate"] = r.estimate;
  j["ci99"] = r.ci99;
  j["truncated"] = r.truncated;
  return j.dump(2);
}

}  // namespace reach
