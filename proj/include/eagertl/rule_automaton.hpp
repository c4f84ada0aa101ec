#pragma once

// Rule DAGs, viewpoints and the DFA checking synchronization rules.

#include "closure.hpp"
#include "model.hpp"
#include "word.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace eagertl {

using NodeSet = std::uint64_t;

inline bool has(NodeSet s, int n) { return (s >> n) & 1u; }
inline int popcount(NodeSet s) { return std::popcount(s); }

class not_eager : public error {
public:
  not_eager(const std::string &rule, RuleClassification c)
      : error("rule '" + rule + "' is not eager" + reasons_text(c)),
        rule_name(rule), classification(std::move(c)) {}

  std::string rule_name;
  RuleClassification classification;

private:
  static std::string reasons_text(const RuleClassification &c) {
    std::string out;
    for (const auto &r : c.reasons)
      out += (out.empty() ? ": " : "; ") + r;
    return out;
  }
};

/// Labelled DAG of a disjunction-free rule. Nodes are the term classes of
/// the closure; `arcs` holds the non-strict order, `strict` the strict one.
struct RuleDag {
  std::string rule;
  std::vector<std::vector<Term>> node_terms;
  std::vector<EventSet> labels;
  std::vector<NodeSet> preds;            // dashed predecessors
  std::vector<NodeSet> succs;
  std::vector<NodeSet> strict_preds;     // solid predecessors
  std::vector<NodeSet> strict_succs;
  int trigger_start = -1;                // node holding start(a0)
  std::optional<Event> trigger_event;

  struct EndTerm {
    std::string token;
    int start_node;
    int end_node;
    Event event;
  };
  /// Ends that the waiting list may contain: names whose start and end both
  /// occur and that pass the static side condition.
  std::vector<EndTerm> waitable;
  std::size_t token_names = 0;

  std::size_t size() const { return node_terms.size(); }
  NodeSet all() const {
    return size() == 64 ? ~NodeSet{0} : ((NodeSet{1} << size()) - 1);
  }
  bool arc(int a, int b) const { return has(succs[a], b); }
  bool strict_arc(int a, int b) const { return has(strict_succs[a], b); }

  int node_of(const Term &t) const {
    for (std::size_t i = 0; i < node_terms.size(); ++i)
      for (const auto &u : node_terms[i])
        if (u == t)
          return static_cast<int>(i);
    return -1;
  }

  EventSet label_of(NodeSet s) const {
    EventSet out;
    for (std::size_t i = 0; i < size(); ++i)
      if (has(s, static_cast<int>(i)))
        out.insert(out.end(), labels[i].begin(), labels[i].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool downward_closed(NodeSet k) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (has(k, static_cast<int>(i)) && (preds[i] & ~k))
        return false;
    return true;
  }

  std::string to_dot() const {
    std::ostringstream os;
    os << "digraph \"" << rule << "\" {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n";
    for (std::size_t i = 0; i < size(); ++i) {
      os << "  n" << i << " [label=\"";
      for (std::size_t k = 0; k < node_terms[i].size(); ++k)
        os << (k ? ", " : "") << to_string(node_terms[i][k]);
      os << "\"];\n";
    }
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j)
        if (arc(static_cast<int>(i), static_cast<int>(j)))
          os << "  n" << i << " -> n" << j
             << (strict_arc(static_cast<int>(i), static_cast<int>(j))
                     ? ";\n"
                     : " [style=dashed];\n");
    os << "}\n";
    return os.str();
  }
};

/// DAG of rule `r` over `sig`. Throws when the rule has several disjuncts or
/// an inconsistent clause.
inline RuleDag build_dag(const Signature &sig, const SynchronizationRule &r) {
  if (r.disjuncts.size() != 1)
    throw error("rule '" + r.name + "' is disjunctive; no single DAG exists");
  const auto cl = close_statement(r, 0);
  if (!cl.consistent)
    throw error("rule '" + r.name + "' has an inconsistent clause");
  if (cl.classes.size() > 64)
    throw error("rule '" + r.name + "' has more than 64 term classes");

  RuleDag g;
  g.rule = r.name;
  const std::size_t n = cl.classes.size();
  auto event_of = [&](const Term &t) {
    const auto q = r.lookup(0, t.token);
    if (!q)
      throw error("unbound token '" + t.token + "' in rule '" + r.name + "'");
    const int x = sig.var_id(q->var), v = sig.value_id(q->value);
    if (x < 0 || v < 0)
      throw error("rule '" + r.name + "' refers to unknown " +
                  (x < 0 ? "variable '" + q->var + "'" : "value '" + q->value + "'"));
    return Event{x, t.endpoint == Endpoint::end, v};
  };
  for (const auto &cls : cl.classes) {
    std::vector<Term> ts;
    EventSet ev;
    for (int ti : cls) {
      ts.push_back(cl.terms[ti]);
      ev.push_back(event_of(cl.terms[ti]));
    }
    std::sort(ev.begin(), ev.end());
    ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
    g.node_terms.push_back(std::move(ts));
    g.labels.push_back(std::move(ev));
  }
  g.preds.assign(n, 0);
  g.succs.assign(n, 0);
  g.strict_preds.assign(n, 0);
  g.strict_succs.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j)
        continue;
      const int ti = cl.classes[i].front(), tj = cl.classes[j].front();
      const Rel rel = cl.rel[ti][tj];
      if (rel == Rel::none)
        continue;
      g.succs[i] |= NodeSet{1} << j;
      g.preds[j] |= NodeSet{1} << i;
      if (rel == Rel::lt) {
        g.strict_succs[i] |= NodeSet{1} << j;
        g.strict_preds[j] |= NodeSet{1} << i;
      }
    }

  if (r.trigger) {
    g.trigger_start = g.node_of(Term::start(r.trigger->token));
    g.trigger_event = trigger_event(sig, r);
  }

  std::vector<std::string> names;
  if (r.trigger)
    names.push_back(r.trigger->token);
  for (const auto &q : r.disjuncts[0].quantifiers)
    names.push_back(q.token);
  g.token_names = names.size();
  for (const auto &a : names) {
    const Term sa = Term::start(a), ea = Term::end(a);
    if (!cl.occurs(sa) || !cl.occurs(ea))
      continue;
    bool qualifies = r.trigger && r.trigger->token == a;
    for (const auto &t : cl.terms) {
      if (qualifies)
        break;
      if (t != sa && cl.le(sa, t) && !cl.le(ea, t))
        qualifies = true;
    }
    if (qualifies)
      g.waitable.push_back({a, g.node_of(sa), g.node_of(ea), event_of(ea)});
  }
  return g;
}

// ----------------------------------------------------------------------------
// Viewpoints
// ----------------------------------------------------------------------------

struct Viewpoint {
  int rule = 0;
  NodeSet k = 0;

  friend auto operator<=>(const Viewpoint &, const Viewpoint &) = default;
};

/// Largest downward-closed K' containing K with no solid arc inside K' \ K.
inline NodeSet next_set(const RuleDag &g, NodeSet k) {
  NodeSet cur = k;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const int n = static_cast<int>(i);
      if (has(cur, n) || (g.preds[i] & ~cur))
        continue;
      const NodeSet fresh = cur & ~k;
      if ((g.strict_preds[i] | g.strict_succs[i]) & fresh)
        continue;
      cur |= NodeSet{1} << n;
      grew = true;
    }
  }
  return cur;
}

/// Largest downward-closed K' within next(K) whose new labels all occur in
/// `ev`.
inline NodeSet consumed_set(const RuleDag &g, NodeSet k, const EventSet &ev) {
  const NodeSet nx = next_set(g, k);
  NodeSet cur = k;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const int n = static_cast<int>(i);
      if (has(cur, n) || !has(nx, n) || (g.preds[i] & ~cur))
        continue;
      if (!std::all_of(g.labels[i].begin(), g.labels[i].end(),
                       [&](const Event &e) { return contains(ev, e); }))
        continue;
      cur |= NodeSet{1} << n;
      grew = true;
    }
  }
  return cur;
}

/// Union of the classes in K, and of those outside K.
inline std::vector<Term> past(const RuleDag &g, NodeSet k) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (has(k, static_cast<int>(i)))
      out.insert(out.end(), g.node_terms[i].begin(), g.node_terms[i].end());
  return out;
}

inline std::vector<Term> future(const RuleDag &g, NodeSet k) {
  return past(g, g.all() & ~k);
}

inline std::vector<RuleDag::EndTerm> waiting(const RuleDag &g, NodeSet k) {
  std::vector<RuleDag::EndTerm> out;
  for (const auto &w : g.waitable)
    if (has(k, w.start_node) && !has(k, w.end_node))
      out.push_back(w);
  return out;
}

inline bool vp_compatible(const RuleDag &g, NodeSet k, const EventSet &ev) {
  const auto w = waiting(g, k);
  if (w.empty())
    return true;
  const auto absorbed = g.label_of(consumed_set(g, k, ev) & ~k);
  for (const auto &t : w)
    if (contains(ev, t.event) && !contains(absorbed, t.event))
      return false;
  return true;
}

inline std::optional<NodeSet> evolve(const RuleDag &g, NodeSet k,
                                     const EventSet &ev) {
  if (!vp_compatible(g, k, ev))
    return std::nullopt;
  return consumed_set(g, k, ev);
}

inline bool enables(const RuleDag &g, NodeSet k, const EventSet &ev) {
  if (g.trigger_start < 0)
    return false;
  const NodeSet c = consumed_set(g, k, ev);
  return has(c, g.trigger_start) && !has(k, g.trigger_start);
}

inline bool vp_enabled(const RuleDag &g, NodeSet k) {
  return g.trigger_start < 0 || has(k, g.trigger_start);
}

inline bool vp_final(const RuleDag &g, NodeSet k) { return k == g.all(); }

// ----------------------------------------------------------------------------
// The automaton over sets of viewpoints
// ----------------------------------------------------------------------------

struct RuleState {
  bool sink = false;
  std::vector<Viewpoint> vps; // sorted, unique

  friend auto operator<=>(const RuleState &, const RuleState &) = default;
};

class RuleAutomaton {
public:
  /// Refuses invalid rules with `error` and non-eager ones with `not_eager`.
  RuleAutomaton(const Signature &sig, const PlanningProblem &p) {
    for (const auto &r : p.rules) {
      const auto issues = validate_rule(p, r);
      if (const auto *e = first_error(issues))
        throw error(to_string(*e));
      auto c = is_eager_rule(r);
      if (!c.eager)
        throw not_eager(r.name, std::move(c));
      dags_.push_back(build_dag(sig, r));
    }
  }

  const std::vector<RuleDag> &dags() const { return dags_; }
  const RuleDag &dag(int rule) const { return dags_.at(rule); }

  RuleState initial() const {
    RuleState q;
    for (std::size_t r = 0; r < dags_.size(); ++r)
      q.vps.push_back({static_cast<int>(r), 0});
    return q;
  }

  bool compatible(const RuleState &q, const EventSet &ev) const {
    if (q.sink)
      return false;
    for (const auto &v : q.vps)
      if (!vp_compatible(dags_[v.rule], v.k, ev))
        return false;
    for (std::size_t r = 0; r < dags_.size(); ++r) {
      const auto &g = dags_[r];
      if (!g.trigger_event || !contains(ev, *g.trigger_event))
        continue;
      const bool some = std::any_of(q.vps.begin(), q.vps.end(), [&](const Viewpoint &v) {
        return v.rule == static_cast<int>(r) && enables(g, v.k, ev);
      });
      if (!some)
        return false;
    }
    return true;
  }

  RuleState step(const RuleState &q, const EventSet &ev) const {
    if (!compatible(q, ev))
      return {true, {}};
    RuleState out;
    for (const auto &v : q.vps) {
      const auto &g = dags_[v.rule];
      out.vps.push_back({v.rule, consumed_set(g, v.k, ev)});
      if (enables(g, v.k, ev))
        out.vps.push_back(v);
    }
    std::sort(out.vps.begin(), out.vps.end());
    out.vps.erase(std::unique(out.vps.begin(), out.vps.end()), out.vps.end());
    return out;
  }

  RuleState step(const RuleState &q, const Symbol &s) const {
    return step(q, events(s));
  }

  bool final(const RuleState &q) const {
    if (q.sink)
      return false;
    return std::all_of(q.vps.begin(), q.vps.end(), [&](const Viewpoint &v) {
      const auto &g = dags_[v.rule];
      return !vp_enabled(g, v.k) || vp_final(g, v.k);
    });
  }

  /// Linearity condition: per rule, the progress sets form a chain.
  bool linear(const RuleState &q) const {
    for (std::size_t i = 0; i < q.vps.size(); ++i)
      for (std::size_t j = i + 1; j < q.vps.size(); ++j) {
        if (q.vps[i].rule != q.vps[j].rule)
          continue;
        const NodeSet a = q.vps[i].k, b = q.vps[j].k;
        if ((a & b) != a && (a & b) != b)
          return false;
      }
    return true;
  }

  /// Largest per-rule viewpoint count in `q`.
  std::vector<std::size_t> viewpoint_counts(const RuleState &q) const {
    std::vector<std::size_t> out(dags_.size(), 0);
    for (const auto &v : q.vps)
      ++out[v.rule];
    return out;
  }

  std::string state_label(const RuleState &q) const {
    if (q.sink)
      return "sink";
    std::ostringstream os;
    for (std::size_t i = 0; i < q.vps.size(); ++i) {
      os << (i ? " " : "") << dags_[q.vps[i].rule].rule << ":{";
      bool first = true;
      for (std::size_t n = 0; n < dags_[q.vps[i].rule].size(); ++n)
        if (has(q.vps[i].k, static_cast<int>(n))) {
          os << (first ? "" : ",") << "n" << n;
          first = false;
        }
      os << "}";
    }
    return os.str();
  }

private:
  std::vector<RuleDag> dags_;
};

/// Convenience wrappers over a standalone automaton.
inline RuleState ap_initial(const RuleAutomaton &a) { return a.initial(); }
inline RuleState ap_step(const RuleAutomaton &a, const RuleState &q, const Symbol &s) {
  return a.step(q, s);
}
inline bool ap_final(const RuleAutomaton &a, const RuleState &q) { return a.final(q); }

} // namespace eagertl
