#include "reach/pomdp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "reach/errors.hpp"

namespace reach {
namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

void check_row(const SparseDistribution& row, int limit, const std::string& what) {
  double sum = 0.0;
  for (const auto& e : row) {
    if (e.index < 0 || e.index >= limit) {
      throw ValidationError(what + " has out-of-range index " + std::to_string(e.index));
    }
    if (!(e.prob >= 0.0 && e.prob <= 1.0 + kStochasticTolerance)) {
      throw ValidationError(what + " has probability " + format_prob(e.prob) +
                            " outside [0,1]");
    }
    sum += e.prob;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw ValidationError(what + " sums to " + format_prob(sum));
  }
}

void accumulate(SparseDistribution& row, int index, double p) {
  for (auto& e : row) {
    if (e.index == index) {
      e.prob += p;
      return;
    }
  }
  row.push_back({index, p});
  std::sort(row.begin(), row.end(),
            [](const SparseEntry& x, const SparseEntry& y) { return x.index < y.index; });
}

// Scratch space reused across belief updates on the same thread.
struct UpdateScratch {
  std::vector<double> predicted;
  std::vector<StateId> touched;
  std::vector<std::vector<Belief::Entry>> buckets;
};

UpdateScratch& scratch(int num_states, int num_observations) {
  thread_local UpdateScratch s;
  if (static_cast<int>(s.predicted.size()) < num_states) s.predicted.assign(num_states, 0.0);
  if (static_cast<int>(s.buckets.size()) < num_observations) s.buckets.resize(num_observations);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Belief

Belief Belief::point(StateId s) {
  Belief b;
  b.entries_.push_back({s, 1.0});
  return b;
}

namespace {

std::vector<Belief::Entry> sorted_merged(std::vector<Belief::Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Belief::Entry& x, const Belief::Entry& y) { return x.state < y.state; });
  std::vector<Belief::Entry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().state == e.state) {
      merged.back().prob += e.prob;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

}  // namespace

Belief Belief::from_entries(std::vector<Entry> entries, double drop_below) {
  auto merged = sorted_merged(std::move(entries));
  double total = 0.0;
  for (const auto& e : merged) total += e.prob;
  if (!(total > 0.0)) throw ValidationError("belief has no positive mass");
  // Drop relative to the normalized mass, then renormalize.
  std::erase_if(merged,
                [&](const Entry& e) { return e.prob <= 0.0 || e.prob / total < drop_below; });
  total = 0.0;
  for (const auto& e : merged) total += e.prob;
  if (merged.empty() || !(total > 0.0)) throw ValidationError("belief has no positive mass");
  for (auto& e : merged) e.prob /= total;
  Belief b;
  b.entries_ = std::move(merged);
  return b;
}

Belief Belief::from_normalized(std::vector<Entry> entries) {
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.state < 0) throw ValidationError("belief has negative state index");
    if (e.prob < 0.0) throw ValidationError("belief has negative probability");
    total += e.prob;
  }
  if (std::abs(total - 1.0) > kStochasticTolerance) {
    throw ValidationError("belief sums to " + format_prob(total));
  }
  // Kept as given (no renormalization) so text round trips are exact.
  auto merged = sorted_merged(std::move(entries));
  std::erase_if(merged, [](const Entry& e) { return e.prob <= 0.0; });
  Belief b;
  b.entries_ = std::move(merged);
  return b;
}

double Belief::operator[](StateId s) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, StateId v) { return e.state < v; });
  return (it != entries_.end() && it->state == s) ? it->prob : 0.0;
}

double Belief::linf_distance(const Belief& other) const {
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < entries_.size() || j < other.entries_.size()) {
    if (j == other.entries_.size() ||
        (i < entries_.size() && entries_[i].state < other.entries_[j].state)) {
      d = std::max(d, entries_[i++].prob);
    } else if (i == entries_.size() || other.entries_[j].state < entries_[i].state) {
      d = std::max(d, other.entries_[j++].prob);
    } else {
      d = std::max(d, std::abs(entries_[i++].prob - other.entries_[j++].prob));
    }
  }
  return d;
}

std::uint64_t Belief::rounded_hash() const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (const auto& e : entries_) {
    const auto q = static_cast<std::uint64_t>(std::llround(e.prob * 1e10));
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(e.state) * 0x100000001b3ULL + q));
  }
  return h;
}

std::string Belief::to_string() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out += ' ';
    out += std::to_string(e.state);
    out += ':';
    out += format_prob(e.prob);
  }
  return out;
}

Belief Belief::parse(std::string_view text) {
  std::vector<Entry> entries;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) throw ValidationError("bad belief entry '" + token + "'");
    Entry e{};
    const char* first = token.data();
    auto [p1, ec1] = std::from_chars(first, first + colon, e.state);
    if (ec1 != std::errc() || p1 != first + colon) {
      throw ValidationError("bad state in belief entry '" + token + "'");
    }
    try {
      std::size_t used = 0;
      const std::string prob = token.substr(colon + 1);
      e.prob = std::stod(prob, &used);
      if (used != prob.size()) throw std::invalid_argument(prob);
    } catch (const std::exception&) {
      throw ValidationError("bad probability in belief entry '" + token + "'");
    }
    entries.push_back(e);
  }
  return from_normalized(std::move(entries));
}

// ---------------------------------------------------------------------------
// Pomdp

Pomdp::Pomdp(int num_states, int num_actions, int num_observations)
    : num_states_(num_states),
      num_actions_(num_actions),
      num_observations_(num_observations),
      transitions_(static_cast<std::size_t>(num_states) * num_actions),
      observations_(static_cast<std::size_t>(num_states) * num_actions),
      target_flags_(num_states, 0) {
  if (num_states <= 0 || num_actions <= 0 || num_observations <= 0) {
    throw ValidationError("model sizes must be positive");
  }
}

void Pomdp::set_transition(StateId s, ActionId a, SparseDistribution dist) {
  std::sort(dist.begin(), dist.end(),
            [](const SparseEntry& x, const SparseEntry& y) { return x.index < y.index; });
  transitions_[row(s, a)] = std::move(dist);
}

void Pomdp::set_observation(StateId next, ActionId a, SparseDistribution dist) {
  std::sort(dist.begin(), dist.end(),
            [](const SparseEntry& x, const SparseEntry& y) { return x.index < y.index; });
  observations_[row(next, a)] = std::move(dist);
}

void Pomdp::add_transition(StateId s, ActionId a, StateId next, double p) {
  if (p == 0.0) return;
  accumulate(transitions_[row(s, a)], next, p);
}

void Pomdp::add_observation(StateId next, ActionId a, ObservationId o, double p) {
  if (p == 0.0) return;
  accumulate(observations_[row(next, a)], o, p);
}

void Pomdp::set_targets(std::vector<StateId> targets) {
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  std::fill(target_flags_.begin(), target_flags_.end(), 0);
  for (StateId t : targets) {
    if (t < 0 || t >= num_states_) {
      throw ValidationError("target state " + std::to_string(t) + " out of range");
    }
    target_flags_[t] = 1;
  }
  targets_ = std::move(targets);
}

void Pomdp::validate() const {
  for (int a = 0; a < num_actions_; ++a) {
    for (int s = 0; s < num_states_; ++s) {
      check_row(transition(s, a), num_states_,
                "transition row (a=" + std::to_string(a) + ", s=" + std::to_string(s) + ")");
      check_row(observation(s, a), num_observations_,
                "observation row (a=" + std::to_string(a) + ", s'=" + std::to_string(s) + ")");
    }
  }
  if (targets_.empty()) throw ValidationError("target set is empty");
  if (initial_belief_.empty()) throw ValidationError("initial belief is missing");
  double total = 0.0;
  for (const auto& e : initial_belief_.entries()) {
    if (e.state < 0 || e.state >= num_states_) {
      throw ValidationError("initial belief state " + std::to_string(e.state) +
                            " out of range");
    }
    total += e.prob;
  }
  if (std::abs(total - 1.0) > kStochasticTolerance) {
    throw ValidationError("initial belief sums to " + format_prob(total));
  }
}

// ---------------------------------------------------------------------------
// AugmentedPomdp

AugmentedPomdp::AugmentedPomdp(Pomdp base)
    : base_(std::move(base)),
      num_states_(base_.num_states() + 1),
      num_actions_(base_.num_actions() + 1),
      num_observations_(base_.num_observations()) {
  if (base_.targets().empty()) throw EmptyTargetSet();
  base_.validate();

  const std::size_t rows = static_cast<std::size_t>(num_states_) * num_actions_;
  transitions_.resize(rows);
  observations_.resize(rows);
  const StateId sink = sink_state();
  const ActionId collect = sink_action();
  auto at = [&](StateId s, ActionId a) { return static_cast<std::size_t>(a) * num_states_ + s; };

  for (ActionId a = 0; a < base_.num_actions(); ++a) {
    for (StateId s = 0; s < base_.num_states(); ++s) {
      transitions_[at(s, a)] =
          base_.is_target(s) ? SparseDistribution{{s, 1.0}} : base_.transition(s, a);
      observations_[at(s, a)] = base_.observation(s, a);
    }
    transitions_[at(sink, a)] = {{sink, 1.0}};
    observations_[at(sink, a)] = {{0, 1.0}};
  }
  for (StateId s = 0; s < num_states_; ++s) {
    transitions_[at(s, collect)] =
        (s == sink || base_.is_target(s)) ? SparseDistribution{{sink, 1.0}}
                                          : SparseDistribution{{s, 1.0}};
    observations_[at(s, collect)] = {{0, 1.0}};
  }
}

double AugmentedPomdp::expected_reward(const Belief& b, ActionId a) const {
  if (a != sink_action()) return 0.0;
  double r = 0.0;
  for (const auto& e : b.entries()) {
    if (is_target(e.state)) r += e.prob;
  }
  return r;
}

std::vector<double> AugmentedPomdp::observation_probs(const Belief& b, ActionId a) const {
  std::vector<double> probs(num_observations_, 0.0);
  for (const auto& e : b.entries()) {
    for (const auto& t : transition(e.state, a)) {
      for (const auto& z : observation(t.index, a)) {
        probs[z.index] += e.prob * t.prob * z.prob;
      }
    }
  }
  return probs;
}

double AugmentedPomdp::observation_prob(const Belief& b, ActionId a, ObservationId o) const {
  return observation_probs(b, a)[o];
}

std::vector<BeliefSuccessor> AugmentedPomdp::successors(const Belief& b, ActionId a) const {
  UpdateScratch& sc = scratch(num_states_, num_observations_);
  sc.touched.clear();
  for (const auto& e : b.entries()) {
    for (const auto& t : transition(e.state, a)) {
      if (sc.predicted[t.index] == 0.0) sc.touched.push_back(t.index);
      sc.predicted[t.index] += e.prob * t.prob;
    }
  }
  std::sort(sc.touched.begin(), sc.touched.end());
  for (auto& bucket : sc.buckets) bucket.clear();
  for (StateId next : sc.touched) {
    const double mass = sc.predicted[next];
    sc.predicted[next] = 0.0;
    if (mass <= 0.0) continue;
    for (const auto& z : observation(next, a)) {
      if (z.prob > 0.0) sc.buckets[z.index].push_back({next, mass * z.prob});
    }
  }
  std::vector<BeliefSuccessor> out;
  for (ObservationId o = 0; o < num_observations_; ++o) {
    auto& bucket = sc.buckets[o];
    if (bucket.empty()) continue;
    double p = 0.0;
    for (const auto& e : bucket) p += e.prob;
    if (p <= kSupportDropThreshold) continue;
    out.push_back({o, p, Belief::from_entries(bucket)});
  }
  return out;
}

Belief AugmentedPomdp::belief_update(const Belief& b, ActionId a, ObservationId o) const {
  for (auto& succ : successors(b, a)) {
    if (succ.observation == o) return std::move(succ.belief);
  }
  throw ZeroProbabilityObservation("observation " + std::to_string(o) +
                                   " has zero probability under action " + std::to_string(a));
}

AugmentedPomdp augment(Pomdp p, std::vector<StateId> targets) {
  if (targets.empty()) throw EmptyTargetSet();
  p.set_targets(std::move(targets));
  return AugmentedPomdp(std::move(p));
}

AugmentedPomdp augment(Pomdp p) {
  if (p.targets().empty()) throw EmptyTargetSet();
  return AugmentedPomdp(std::move(p));
}

}  // namespace reach
