#pragma once

// Product of the plan and rule automata: acceptance, plan existence by
// breadth-first emptiness checking, and exhaustive language comparison
// against the brute-force oracle.

#include "model.hpp"
#include "oracle.hpp"
#include "plan_automaton.hpp"
#include "rule_automaton.hpp"
#include "word.hpp"

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace eagertl {

/// Product of T_SV and A_P for one problem.
class ProductAutomaton {
public:
  explicit ProductAutomaton(const PlanningProblem &p)
      : sig_(p), rules_(sig_, p) {}

  const Signature &signature() const { return sig_; }
  const RuleAutomaton &rules() const { return rules_; }

  /// Events ending every current token; empty before the first symbol.
  EventSet closing_events(const PlanState &q) const {
    EventSet ev;
    if (q.is_init() || q.is_sink())
      return ev;
    for (std::size_t x = 0; x < q.snap.size(); ++x)
      ev.push_back({static_cast<int>(x), true, q.snap[x].second});
    std::sort(ev.begin(), ev.end());
    return ev;
  }

  /// Acceptance after the word ends: timelines close at the word length, so
  /// the rule part must still reach a final state once every current token
  /// ends.
  bool final(const PlanState &qp, const RuleState &qr) const {
    if (qp.is_sink() || qr.sink)
      return false;
    return rules_.final(rules_.step(qr, closing_events(qp)));
  }

  bool accepts(const Word &w) const {
    PlanState qp = PlanState::init();
    RuleState qr = rules_.initial();
    for (const auto &s : w) {
      qp = step(sig_, qp, s);
      qr = rules_.step(qr, s);
      if (qp.is_sink() || qr.sink)
        return false;
    }
    return final(qp, qr);
  }

private:
  Signature sig_;
  RuleAutomaton rules_;
};

inline bool product_accepts(const PlanningProblem &p, const Word &w) {
  return ProductAutomaton(p).accepts(w);
}

// ----------------------------------------------------------------------------
// Search
// ----------------------------------------------------------------------------

struct Budget {
  std::size_t max_states = 1'000'000;
  std::size_t max_len = 64;
  /// Accept the empty word (horizon-0 plan) as a witness.
  bool allow_empty = false;
};

enum class SolveStatus { solution, empty, budget_exhausted };

inline std::string to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::solution: return "solution";
  case SolveStatus::empty: return "empty";
  case SolveStatus::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

struct SolveStats {
  std::size_t states = 0;        // interned product states
  std::size_t expanded = 0;
  std::size_t frontier_peak = 0;
  std::size_t plan_states = 0;
  std::size_t rule_states = 0;
  std::size_t depth = 0;
  double wall_ms = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::empty;
  std::optional<Word> word;
  std::optional<Plan> plan;
  SolveStats stats;
  std::string reason; // budget limit that stopped the search
  std::string dot;    // explored fragment, when requested
};

struct SolveOptions {
  Budget budget;
  bool want_dot = false;
};

/// Breadth-first search for the length-lexicographically least accepted
/// word. The result is re-verified by the oracle before it is returned.
inline SolveResult find_solution(const PlanningProblem &p,
                                 const SolveOptions &opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProductAutomaton prod(p);
  const auto &sig = prod.signature();
  const auto &ra = prod.rules();

  std::map<PlanState, int> plan_ids;
  std::vector<PlanState> plan_states;
  std::map<RuleState, int> rule_ids;
  std::vector<RuleState> rule_states;
  auto intern_plan = [&](const PlanState &q) {
    auto [it, fresh] = plan_ids.emplace(q, static_cast<int>(plan_states.size()));
    if (fresh)
      plan_states.push_back(q);
    return it->second;
  };
  auto intern_rule = [&](const RuleState &q) {
    auto [it, fresh] = rule_ids.emplace(q, static_cast<int>(rule_states.size()));
    if (fresh)
      rule_states.push_back(q);
    return it->second;
  };

  struct Node {
    int plan, rule;
    int parent;
    Symbol via;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::map<std::pair<int, int>, int> ids;
  std::deque<int> queue;
  std::ostringstream dot;
  if (opt.want_dot)
    dot << "digraph product {\n  rankdir=LR;\n";

  SolveResult res;
  auto finish = [&](SolveStatus st) {
    res.status = st;
    res.stats.states = nodes.size();
    res.stats.plan_states = plan_states.size();
    res.stats.rule_states = rule_states.size();
    res.stats.wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    if (opt.want_dot) {
      for (std::size_t i = 0; i < nodes.size(); ++i)
        dot << "  s" << i << " [label=\"" << i << "\""
            << (prod.final(plan_states[nodes[i].plan], rule_states[nodes[i].rule])
                    ? ", peripheries=2"
                    : "")
            << "];\n";
      dot << "}\n";
      res.dot = dot.str();
    }
    return res;
  };
  auto witness = [&](int id) {
    Word w;
    for (int cur = id; nodes[cur].parent >= 0; cur = nodes[cur].parent)
      w.push_back(nodes[cur].via);
    std::reverse(w.begin(), w.end());
    return w;
  };
  auto accept = [&](int id) {
    Word w = witness(id);
    auto plan = decode(sig, w);
    if (!plan)
      throw error("solver produced a word that does not encode a plan");
    const auto rep = verify_solution(p, *plan);
    if (!rep.solution)
      throw error("solver witness rejected by the oracle (rule " +
                  rep.failing_rules().front() + ")");
    res.word = std::move(w);
    res.plan = std::move(*plan);
    res.stats.depth = nodes[id].depth;
    return finish(SolveStatus::solution);
  };

  const int p0 = intern_plan(PlanState::init());
  const int r0 = intern_rule(ra.initial());
  nodes.push_back({p0, r0, -1, {}, 0});
  ids[{p0, r0}] = 0;
  if (opt.budget.allow_empty && prod.final(plan_states[p0], rule_states[r0]))
    return accept(0);
  queue.push_back(0);

  bool truncated = false;
  while (!queue.empty()) {
    res.stats.frontier_peak = std::max(res.stats.frontier_peak, queue.size());
    const int cur = queue.front();
    queue.pop_front();
    const Node node = nodes[cur];
    if (node.depth >= opt.budget.max_len) {
      truncated = true;
      continue;
    }
    ++res.stats.expanded;
    const PlanState qp = plan_states[node.plan];
    const RuleState qr = rule_states[node.rule];
    std::optional<int> found;
    bool over = false;
    for_each_compatible_symbol(sig, qp, [&](const Symbol &s) {
      RuleState nr = ra.step(qr, s);
      if (nr.sink)
        return true;
      PlanState np = step(sig, qp, s);
      const int pi = intern_plan(np), ri = intern_rule(nr);
      auto [it, fresh] = ids.emplace(std::make_pair(pi, ri), static_cast<int>(nodes.size()));
      if (opt.want_dot)
        dot << "  s" << cur << " -> s" << it->second << " [label=\""
            << symbol_text(sig, s) << "\"];\n";
      if (!fresh)
        return true;
      nodes.push_back({pi, ri, cur, s, node.depth + 1});
      if (prod.final(np, nr)) {
        found = it->second;
        return false;
      }
      if (nodes.size() >= opt.budget.max_states) {
        over = true;
        return false;
      }
      queue.push_back(it->second);
      return true;
    });
    if (found)
      return accept(*found);
    if (over) {
      res.reason = "max_states";
      return finish(SolveStatus::budget_exhausted);
    }
  }
  if (truncated) {
    res.reason = "max_len";
    return finish(SolveStatus::budget_exhausted);
  }
  return finish(SolveStatus::empty);
}

// ----------------------------------------------------------------------------
// Exhaustive language comparison
// ----------------------------------------------------------------------------

struct SmokeReport {
  std::uint64_t words = 0;       // every word of length <= max_len
  std::uint64_t enumerated = 0;  // words visited one by one
  std::uint64_t accepted = 0;
  std::uint64_t solutions = 0;   // words the oracle accepts
  std::uint64_t mismatches = 0;
  std::vector<Word> examples;    // first few mismatching words
  std::size_t plan_states = 0;   // distinct non-sink T_SV states seen
  std::size_t rule_states = 0;   // distinct non-sink A_P states seen
  std::vector<std::size_t> max_viewpoints; // per rule
  bool linear = true;
  double wall_ms = 0;
};

namespace detail {

/// Letters over each variable's own domain: the initial letters, then the
/// non-initial ones.
inline std::vector<Symbol> typed_alphabet(const Signature &sig) {
  std::vector<Symbol> out;
  const std::size_t n = sig.num_vars();
  auto product = [&](const std::vector<std::vector<Entry>> &opts) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      Symbol s(n);
      for (std::size_t x = 0; x < n; ++x)
        s[x] = opts[x][idx[x]];
      out.push_back(std::move(s));
      std::size_t k = n;
      for (; k > 0; --k) {
        if (++idx[k - 1] < opts[k - 1].size())
          break;
        idx[k - 1] = 0;
      }
      if (k == 0)
        return;
    }
  };
  std::vector<std::vector<Entry>> init(n), non(n);
  for (std::size_t x = 0; x < n; ++x) {
    non[x].push_back(Entry::unchanged());
    for (int v : sig.domain[x]) {
      init[x].push_back(Entry::initial(v));
      for (int w : sig.domain[x])
        non[x].push_back(Entry::change(v, w));
    }
  }
  product(init);
  product(non);
  return out;
}

} // namespace detail

/// For every word up to `max_len` over the typed alphabet, compares product
/// acceptance with "decodes to a valid plan that the oracle accepts". A
/// prefix that already violates the plan shape, the weak encoding or the
/// domain and transition constraints stays invalid under every extension;
/// its subtree is counted in bulk after checking that T_SV sits in its sink.
inline SmokeReport language_smoke(const PlanningProblem &p, std::size_t max_len,
                                  std::size_t keep_examples = 5) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProductAutomaton prod(p);
  const auto &sig = prod.signature();
  const auto &ra = prod.rules();
  const auto alphabet = detail::typed_alphabet(sig);
  const std::uint64_t a = alphabet.size();

  // subtree[d] = number of words of length <= d over the alphabet
  std::vector<std::uint64_t> subtree(max_len + 1, 1);
  for (std::size_t d = 1; d <= max_len; ++d)
    subtree[d] = 1 + a * subtree[d - 1];

  SmokeReport rep;
  rep.max_viewpoints.assign(ra.dags().size(), 0);
  std::set<PlanState> seen_plan;
  std::set<RuleState> seen_rule;
  Word w;

  auto mismatch = [&](const Word &word) {
    ++rep.mismatches;
    if (rep.examples.size() < keep_examples)
      rep.examples.push_back(word);
  };

  // Reference validity of the word as a plan prefix, independent of T_SV.
  auto reference = [&](const Word &word) -> std::optional<Plan> {
    auto plan = decode(sig, word);
    if (!plan)
      return std::nullopt;
    if (!validate_plan(p, *plan).empty())
      return std::nullopt;
    return plan;
  };

  auto visit = [&](auto &&self, const PlanState &qp, const RuleState &qr) -> void {
    ++rep.words;
    ++rep.enumerated;
    const auto plan = reference(w);
    if (!plan) {
      if (!qp.is_sink())
        mismatch(w);
      rep.words += subtree[max_len - w.size()] - 1;
      return;
    }
    if (qp.is_sink()) {
      mismatch(w);
      return;
    }
    seen_plan.insert(qp);
    if (!qr.sink) {
      seen_rule.insert(qr);
      rep.linear &= ra.linear(qr);
      const auto counts = ra.viewpoint_counts(qr);
      for (std::size_t r = 0; r < counts.size(); ++r)
        rep.max_viewpoints[r] = std::max(rep.max_viewpoints[r], counts[r]);
    }
    const bool acc = prod.final(qp, qr);
    const bool sol = verify_solution(p, *plan).solution;
    rep.accepted += acc;
    rep.solutions += sol;
    if (acc != sol)
      mismatch(w);
    if (w.size() == max_len)
      return;
    for (const auto &s : alphabet) {
      w.push_back(s);
      const PlanState np = step(sig, qp, s);
      const RuleState nr = qr.sink ? qr : ra.step(qr, s);
      self(self, np, nr);
      w.pop_back();
    }
  };
  visit(visit, PlanState::init(), ra.initial());

  rep.plan_states = seen_plan.size();
  rep.rule_states = seen_rule.size();
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

} // namespace eagertl
