#pragma once

// Domain types for qualitative timeline-based planning: state variables,
// tokens, timelines, plans, synchronization rules and problems, together
// with structural validation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eagertl {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------------------
// State variables, tokens, timelines, plans
// ----------------------------------------------------------------------------

/// A state variable with a finite domain and a value transition function.
/// Durations are fixed to (1, unbounded) in the qualitative fragment, so they
/// are not stored.
struct StateVariable {
  std::string name;
  std::vector<std::string> values;
  std::map<std::string, std::set<std::string>> trans;

  bool has_value(const std::string &v) const {
    return std::find(values.begin(), values.end(), v) != values.end();
  }

  int value_index(const std::string &v) const {
    auto it = std::find(values.begin(), values.end(), v);
    return it == values.end() ? -1 : static_cast<int>(it - values.begin());
  }

  bool allows(const std::string &from, const std::string &to) const {
    auto it = trans.find(from);
    return it != trans.end() && it->second.count(to) > 0;
  }

  /// Variable whose transition function allows every succession.
  static StateVariable free(std::string name, std::vector<std::string> values) {
    StateVariable x{std::move(name), std::move(values), {}};
    for (const auto &v : x.values)
      x.trans[v] = std::set<std::string>(x.values.begin(), x.values.end());
    return x;
  }

  friend bool operator==(const StateVariable &, const StateVariable &) = default;
};

struct Token {
  std::string var;
  std::string value;
  std::uint64_t duration = 1;

  friend bool operator==(const Token &, const Token &) = default;
};

struct Timeline {
  std::string var;
  std::vector<Token> tokens;

  std::uint64_t start_time(std::size_t i) const {
    std::uint64_t t = 0;
    for (std::size_t j = 0; j < i; ++j)
      t += tokens[j].duration;
    return t;
  }
  std::uint64_t end_time(std::size_t i) const {
    return start_time(i) + tokens[i].duration;
  }
  std::uint64_t horizon() const {
    std::uint64_t t = 0;
    for (const auto &tok : tokens)
      t += tok.duration;
    return t;
  }

  friend bool operator==(const Timeline &, const Timeline &) = default;
};

struct Plan {
  std::map<std::string, Timeline> timelines;
  std::uint64_t horizon = 0;

  const Timeline &timeline(const std::string &var) const {
    auto it = timelines.find(var);
    if (it == timelines.end())
      throw error("plan has no timeline for variable '" + var + "'");
    return it->second;
  }

  friend bool operator==(const Plan &, const Plan &) = default;
};

// ----------------------------------------------------------------------------
// Rules
// ----------------------------------------------------------------------------

enum class Endpoint : std::uint8_t { start, end };

struct Term {
  Endpoint endpoint = Endpoint::start;
  std::string token;
  // Integer constants belong to the quantitative fragment. They are kept so
  // that the validator can name them; nothing downstream accepts them.
  std::optional<std::int64_t> constant;

  static Term start(std::string a) { return {Endpoint::start, std::move(a), {}}; }
  static Term end(std::string a) { return {Endpoint::end, std::move(a), {}}; }

  friend auto operator<=>(const Term &, const Term &) = default;
};

inline std::string to_string(const Term &t) {
  if (t.constant)
    return std::to_string(*t.constant);
  return (t.endpoint == Endpoint::start ? "start(" : "end(") + t.token + ")";
}

/// `lhs <= rhs`, or `lhs < rhs` when strict. Bounds other than (0, +inf)
/// make the atom quantitative.
struct Atom {
  Term lhs;
  Term rhs;
  bool strict = false;
  std::optional<std::pair<std::int64_t, std::optional<std::int64_t>>> bounds;

  static Atom le(Term l, Term r) { return {std::move(l), std::move(r), false, {}}; }
  static Atom lt(Term l, Term r) { return {std::move(l), std::move(r), true, {}}; }

  bool qualitative() const {
    if (lhs.constant || rhs.constant)
      return false;
    return !bounds || (bounds->first == 0 && !bounds->second);
  }

  friend auto operator<=>(const Atom &, const Atom &) = default;
};

inline std::string to_string(const Atom &a) {
  std::string op = a.strict ? "<" : "<=";
  if (a.bounds)
    op += "[" + std::to_string(a.bounds->first) + "," +
          (a.bounds->second ? std::to_string(*a.bounds->second) : "inf") + "]";
  return to_string(a.lhs) + " " + op + " " + to_string(a.rhs);
}

/// `t1 = t2`, expanded into the two non-strict atoms.
inline std::vector<Atom> equal(const Term &l, const Term &r) {
  return {Atom::le(l, r), Atom::le(r, l)};
}

struct Quantifier {
  std::string token;
  std::string var;
  std::string value;

  friend bool operator==(const Quantifier &, const Quantifier &) = default;
};

struct ExistentialStatement {
  std::vector<Quantifier> quantifiers;
  std::vector<Atom> clause;

  const Quantifier *find(const std::string &token) const {
    for (const auto &q : quantifiers)
      if (q.token == token)
        return &q;
    return nullptr;
  }

  friend bool operator==(const ExistentialStatement &,
                         const ExistentialStatement &) = default;
};

struct SynchronizationRule {
  std::string name;
  std::optional<Quantifier> trigger;
  std::vector<ExistentialStatement> disjuncts;

  bool triggerless() const { return !trigger.has_value(); }

  /// Resolves a token name to its (variable, value) within `disjunct`.
  std::optional<Quantifier> lookup(std::size_t disjunct,
                                   const std::string &token) const {
    if (trigger && trigger->token == token)
      return trigger;
    if (const auto *q = disjuncts.at(disjunct).find(token))
      return *q;
    return std::nullopt;
  }

  friend bool operator==(const SynchronizationRule &,
                         const SynchronizationRule &) = default;
};

struct PlanningProblem {
  std::vector<StateVariable> vars;
  std::vector<SynchronizationRule> rules;

  const StateVariable *find_var(const std::string &name) const {
    for (const auto &x : vars)
      if (x.name == name)
        return &x;
    return nullptr;
  }

  friend bool operator==(const PlanningProblem &, const PlanningProblem &) = default;
};

// ----------------------------------------------------------------------------
// Validation
// ----------------------------------------------------------------------------

struct Violation {
  std::string where;
  std::string what;
  bool warning = false;
};

using ValidationReport = std::vector<Violation>;

inline std::string to_string(const Violation &v) {
  const std::string text = v.where.empty() ? v.what : v.where + ": " + v.what;
  return v.warning ? "warning: " + text : text;
}

inline bool has_errors(const ValidationReport &r) {
  return std::any_of(r.begin(), r.end(),
                     [](const Violation &v) { return !v.warning; });
}

inline const Violation *first_error(const ValidationReport &r) {
  for (const auto &v : r)
    if (!v.warning)
      return &v;
  return nullptr;
}

namespace detail {

inline bool trivial_atom(const Atom &a) {
  if (a.lhs.token != a.rhs.token || a.lhs.constant || a.rhs.constant)
    return false;
  if (a.lhs.endpoint == a.rhs.endpoint)
    return true; // t <= t, t < t is not trivial but inconsistent; flagged too
  return a.lhs.endpoint == Endpoint::start && a.rhs.endpoint == Endpoint::end;
}

inline void check_quantifier(const PlanningProblem &p, const Quantifier &q,
                             const std::string &where, ValidationReport &out) {
  const auto *x = p.find_var(q.var);
  if (!x) {
    out.push_back({where, "unknown variable '" + q.var + "'"});
    return;
  }
  if (x->has_value(q.value))
    return;
  // A value of some other domain is a pattern that never matches.
  const bool known = std::any_of(p.vars.begin(), p.vars.end(), [&](const auto &y) {
    return y.has_value(q.value);
  });
  if (known)
    out.push_back({where,
                   "value '" + q.value + "' is outside the domain of '" + q.var +
                       "'; the pattern never matches",
                   true});
  else
    out.push_back({where, "value '" + q.value + "' is not in the domain of '" +
                              q.var + "'"});
}

} // namespace detail

inline ValidationReport validate_rule(const PlanningProblem &p,
                                      const SynchronizationRule &r) {
  ValidationReport out;
  const std::string where = "rule " + r.name;
  if (r.disjuncts.empty())
    out.push_back({where, "rule has no existential statement"});
  if (r.trigger)
    detail::check_quantifier(p, *r.trigger, where, out);

  bool trigger_start = false, trigger_end = false;
  for (std::size_t d = 0; d < r.disjuncts.size(); ++d) {
    const auto &e = r.disjuncts[d];
    const std::string dwhere =
        where + (r.disjuncts.size() > 1 ? " disjunct " + std::to_string(d + 1)
                                        : std::string{});
    std::set<std::string> names;
    for (const auto &q : e.quantifiers) {
      detail::check_quantifier(p, q, dwhere, out);
      if (r.trigger && q.token == r.trigger->token)
        out.push_back({dwhere, "quantified token '" + q.token +
                                   "' reuses the trigger token name"});
      if (!names.insert(q.token).second)
        out.push_back({dwhere, "duplicate quantified token '" + q.token + "'"});
    }
    std::set<std::string> mentioned;
    for (const auto &a : e.clause) {
      if (!a.qualitative()) {
        out.push_back({dwhere, "quantitative atom '" + to_string(a) +
                                   "' is out of fragment"});
      }
      for (const Term *t : {&a.lhs, &a.rhs}) {
        if (t->constant)
          continue;
        mentioned.insert(t->token);
        const bool is_trigger = r.trigger && t->token == r.trigger->token;
        if (!is_trigger && !names.count(t->token))
          out.push_back({dwhere, "undeclared token '" + t->token + "'"});
        if (is_trigger) {
          trigger_start |= t->endpoint == Endpoint::start;
          trigger_end |= t->endpoint == Endpoint::end;
        }
      }
      const bool over_trigger = r.trigger && a.lhs.token == r.trigger->token;
      if (detail::trivial_atom(a) && !over_trigger)
        out.push_back({dwhere, "trivial atom '" + to_string(a) + "'"});
    }
    // An empty clause only asserts existence; every other clause must mention
    // each quantified token.
    if (!e.clause.empty())
      for (const auto &q : e.quantifiers)
        if (!mentioned.count(q.token))
          out.push_back({dwhere, "unused quantified token '" + q.token + "'"});
  }
  if (r.trigger && !(trigger_start && trigger_end))
    out.push_back({where, "both start(" + r.trigger->token + ") and end(" +
                              r.trigger->token + ") must occur"});
  return out;
}

inline ValidationReport validate_problem(const PlanningProblem &p) {
  ValidationReport out;
  std::set<std::string> var_names;
  for (const auto &x : p.vars) {
    const std::string where = "var " + x.name;
    if (!var_names.insert(x.name).second)
      out.push_back({where, "duplicate variable"});
    if (x.values.empty())
      out.push_back({where, "empty domain"});
    std::set<std::string> seen;
    for (const auto &v : x.values)
      if (!seen.insert(v).second)
        out.push_back({where, "duplicate value '" + v + "'"});
    for (const auto &[from, tos] : x.trans) {
      if (!x.has_value(from))
        out.push_back({where, "transition from unknown value '" + from + "'"});
      for (const auto &to : tos)
        if (!x.has_value(to))
          out.push_back({where, "transition to unknown value '" + to + "'"});
    }
  }
  std::set<std::string> rule_names;
  for (const auto &r : p.rules) {
    if (!rule_names.insert(r.name).second)
      out.push_back({"rule " + r.name, "duplicate rule name"});
    auto sub = validate_rule(p, r);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

/// Checks that `plan` is a plan over the variables of `p`: one timeline per
/// variable, positive durations, in-domain values, allowed successions and a
/// common horizon.
inline ValidationReport validate_plan(const PlanningProblem &p, const Plan &plan) {
  ValidationReport out;
  for (const auto &x : p.vars) {
    auto it = plan.timelines.find(x.name);
    if (it == plan.timelines.end()) {
      out.push_back({"timeline " + x.name, "missing"});
      continue;
    }
    const auto &tl = it->second;
    const std::string where = "timeline " + x.name;
    if (tl.var != x.name)
      out.push_back({where, "timeline labelled '" + tl.var + "'"});
    for (std::size_t i = 0; i < tl.tokens.size(); ++i) {
      const auto &tok = tl.tokens[i];
      const std::string twhere = where + " token " + std::to_string(i);
      if (tok.var != x.name)
        out.push_back({twhere, "token belongs to '" + tok.var + "'"});
      if (tok.duration < 1)
        out.push_back({twhere, "duration must be positive"});
      if (!x.has_value(tok.value))
        out.push_back({twhere, "value '" + tok.value + "' not in domain"});
      if (i > 0 && !x.allows(tl.tokens[i - 1].value, tok.value))
        out.push_back({twhere, "transition " + tl.tokens[i - 1].value + " -> " +
                                   tok.value + " not allowed"});
    }
    if (tl.horizon() != plan.horizon)
      out.push_back({where, "horizon " + std::to_string(tl.horizon()) +
                                " differs from plan horizon " +
                                std::to_string(plan.horizon)});
  }
  for (const auto &[name, tl] : plan.timelines)
    if (!p.find_var(name))
      out.push_back({"timeline " + name, "unknown variable"});
  return out;
}

/// Renames token names so that distinct rules use disjoint name sets. Rule
/// `i` gets its names prefixed with `r<i>.`; the result is otherwise equal.
inline PlanningProblem rename_apart(const PlanningProblem &p) {
  PlanningProblem out = p;
  for (std::size_t i = 0; i < out.rules.size(); ++i) {
    const std::string prefix = "r" + std::to_string(i) + ".";
    auto &r = out.rules[i];
    auto ren = [&](std::string &s) { s = prefix + s; };
    if (r.trigger)
      ren(r.trigger->token);
    for (auto &e : r.disjuncts) {
      for (auto &q : e.quantifiers)
        ren(q.token);
      for (auto &a : e.clause) {
        ren(a.lhs.token);
        ren(a.rhs.token);
      }
    }
  }
  return out;
}

/// Convenience constructor for plans given as (value, duration) lists.
inline Plan make_plan(
    const std::vector<std::pair<std::string,
                                std::vector<std::pair<std::string, std::uint64_t>>>>
        &spec) {
  Plan plan;
  bool first = true;
  for (const auto &[var, toks] : spec) {
    Timeline tl{var, {}};
    for (const auto &[v, d] : toks)
      tl.tokens.push_back({var, v, d});
    const auto h = tl.horizon();
    if (first)
      plan.horizon = h;
    else if (h != plan.horizon)
      throw error("timeline '" + var + "' has horizon " + std::to_string(h) +
                  ", expected " + std::to_string(plan.horizon));
    first = false;
    plan.timelines.emplace(var, std::move(tl));
  }
  return plan;
}

} // namespace eagertl
