#include "reach/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "reach/errors.hpp"

namespace reach {
namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
           line[i] != '#') {
      ++i;
    }
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

class LineParser {
 public:
  LineParser(int line, std::vector<Token> tokens) : line_(line), tokens_(std::move(tokens)) {}

  std::size_t size() const { return tokens_.size(); }
  const Token& operator[](std::size_t i) const { return tokens_[i]; }

  [[noreturn]] void fail(std::size_t i, const std::string& msg) const {
    const int col = i < tokens_.size() ? tokens_[i].column
                                       : (tokens_.empty() ? 1
                                                          : tokens_.back().column +
                                                                static_cast<int>(
                                                                    tokens_.back().text.size()));
    throw SyntaxError(line_, col, msg);
  }

  void expect_count(std::size_t n, const char* what) const {
    if (tokens_.size() < n) fail(tokens_.size(), std::string("missing field in ") + what);
    if (tokens_.size() > n) fail(n, std::string("unexpected token in ") + what);
  }

  int integer(std::size_t i, int lo, int hi, const char* what) const {
    return parse_int(tokens_[i].text, tokens_[i].column, lo, hi, what);
  }

  int parse_int(std::string_view s, int col, int lo, int hi, const char* what) const {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw SyntaxError(line_, col, std::string("expected integer ") + what);
    }
    if (v < lo || v > hi) {
      throw SyntaxError(line_, col,
                        std::string(what) + " " + std::to_string(v) + " out of range [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
  }

  double probability(std::string_view s, int col) const {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw SyntaxError(line_, col, "expected probability");
    }
    if (!(v >= 0.0 && v <= 1.0)) throw SyntaxError(line_, col, "probability outside [0, 1]");
    return v;
  }

  int line() const { return line_; }

 private:
  int line_;
  std::vector<Token> tokens_;
};

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

}  // namespace

Pomdp parse_model(std::string_view text) {
  std::optional<int> counts[3];
  const char* const count_names[3] = {"states", "actions", "observations"};
  std::optional<Pomdp> model;
  std::vector<std::pair<int, std::string>> labels[3];
  std::vector<Belief::Entry> start;
  bool have_start = false;
  std::vector<StateId> targets;
  bool have_target = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    LineParser lp(line_no, tokenize(raw));
    if (lp.size() == 0) {
      if (end == text.size()) break;
      continue;
    }
    const std::string_view key = lp[0].text;

    bool is_count = false;
    for (int k = 0; k < 3; ++k) {
      if (key != count_names[k]) continue;
      is_count = true;
      if (model) lp.fail(0, std::string(count_names[k]) + " must precede model data");
      if (counts[k]) lp.fail(0, std::string("duplicate ") + count_names[k] + " line");
      lp.expect_count(2, count_names[k]);
      counts[k] = lp.integer(1, 1, 1 << 28, "count");
    }
    if (is_count) {
      if (end == text.size()) break;
      continue;
    }

    if (!model) {
      for (int k = 0; k < 3; ++k) {
        if (!counts[k]) lp.fail(0, std::string("expected '") + count_names[k] + "' line first");
      }
      model.emplace(*counts[0], *counts[1], *counts[2]);
    }
    const int S = *counts[0], A = *counts[1], O = *counts[2];

    if (key == "T:") {
      lp.expect_count(5, "T line");
      const int a = lp.integer(1, 0, A - 1, "action");
      const int s = lp.integer(2, 0, S - 1, "state");
      const int s2 = lp.integer(3, 0, S - 1, "state");
      model->add_transition(s, a, s2, lp.probability(lp[4].text, lp[4].column));
    } else if (key == "Z:") {
      lp.expect_count(5, "Z line");
      const int a = lp.integer(1, 0, A - 1, "action");
      const int s2 = lp.integer(2, 0, S - 1, "state");
      const int o = lp.integer(3, 0, O - 1, "observation");
      model->add_observation(s2, a, o, lp.probability(lp[4].text, lp[4].column));
    } else if (key == "start:") {
      if (have_start) lp.fail(0, "duplicate start line");
      have_start = true;
      if (lp.size() < 2) lp.fail(1, "start line needs state:prob entries");
      for (std::size_t i = 1; i < lp.size(); ++i) {
        const auto tok = lp[i].text;
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) lp.fail(i, "expected state:prob");
        const int s = lp.parse_int(tok.substr(0, colon), lp[i].column, 0, S - 1, "state");
        const double p = lp.probability(tok.substr(colon + 1),
                                        lp[i].column + static_cast<int>(colon) + 1);
        start.push_back({s, p});
      }
    } else if (key == "target:") {
      if (have_target) lp.fail(0, "duplicate target line");
      have_target = true;
      if (lp.size() < 2) lp.fail(1, "target line needs at least one state");
      for (std::size_t i = 1; i < lp.size(); ++i) {
        targets.push_back(lp.integer(i, 0, S - 1, "state"));
      }
    } else if (key == "label") {
      if (lp.size() != 4) lp.fail(std::min<std::size_t>(lp.size(), 4), "expected 'label <kind> <index> <name>'");
      int kind = -1;
      if (lp[1].text == "state") kind = 0;
      if (lp[1].text == "action") kind = 1;
      if (lp[1].text == "observation") kind = 2;
      if (kind < 0) lp.fail(1, "label kind must be state, action or observation");
      const int limit = kind == 0 ? S : kind == 1 ? A : O;
      labels[kind].emplace_back(lp.integer(2, 0, limit - 1, "index"), std::string(lp[3].text));
    } else {
      lp.fail(0, "unknown keyword '" + std::string(key) + "'");
    }
    if (end == text.size()) break;
  }

  if (!model) {
    for (int k = 0; k < 3; ++k) {
      if (!counts[k]) {
        throw SyntaxError(line_no, 1, std::string("missing '") + count_names[k] + "' line");
      }
    }
    model.emplace(*counts[0], *counts[1], *counts[2]);
  }
  if (!have_start) throw SyntaxError(line_no, 1, "missing 'start:' line");
  if (!have_target) throw SyntaxError(line_no, 1, "missing 'target:' line");

  model->set_initial_belief(Belief::from_normalized(std::move(start)));
  model->set_targets(std::move(targets));
  std::vector<std::string>* label_vectors[3] = {&model->state_labels, &model->action_labels,
                                                &model->observation_labels};
  const int sizes[3] = {model->num_states(), model->num_actions(),
                        model->num_observations()};
  for (int k = 0; k < 3; ++k) {
    if (labels[k].empty()) continue;
    label_vectors[k]->assign(sizes[k], std::string());
    for (auto& [i, name] : labels[k]) (*label_vectors[k])[i] = std::move(name);
  }
  model->validate();
  return std::move(*model);
}

Pomdp load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string serialize_model(const Pomdp& p) {
  std::ostringstream os;
  os << "states " << p.num_states() << '\n';
  os << "actions " << p.num_actions() << '\n';
  os << "observations " << p.num_observations() << '\n';
  const char* const kinds[3] = {"state", "action", "observation"};
  const std::vector<std::string>* label_vectors[3] = {&p.state_labels, &p.action_labels,
                                                      &p.observation_labels};
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < label_vectors[k]->size(); ++i) {
      const auto& name = (*label_vectors[k])[i];
      if (!name.empty()) os << "label " << kinds[k] << ' ' << i << ' ' << name << '\n';
    }
  }
  os << "start:";
  for (const auto& e : p.initial_belief().entries()) {
    os << ' ' << e.state << ':' << format_prob(e.prob);
  }
  os << "\ntarget:";
  for (StateId t : p.targets()) os << ' ' << t;
  os << '\n';
  for (ActionId a = 0; a < p.num_actions(); ++a) {
    for (StateId s = 0; s < p.num_states(); ++s) {
      for (const auto& e : p.transition(s, a)) {
        os << "T: " << a << ' ' << s << ' ' << e.index << ' ' << format_prob(e.prob) << '\n';
      }
    }
  }
  for (ActionId a = 0; a < p.num_actions(); ++a) {
    for (StateId s = 0; s < p.num_states(); ++s) {
      for (const auto& e : p.observation(s, a)) {
        os << "Z: " << a << ' ' << s << ' ' << e.index << ' ' << format_prob(e.prob) << '\n';
      }
    }
  }
  return os.str();
}

void save_model(const Pomdp& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << serialize_model(p);
  if (!out) throw Error("failed writing model file '" + path + "'");
}

}  // namespace reach
