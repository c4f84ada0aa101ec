#pragma once

// Brute-force semantics of synchronization rules over concrete plans.

#include "model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eagertl {

/// token name -> (variable, token index)
using Assignment = std::map<std::string, std::pair<std::string, std::size_t>>;

inline std::uint64_t eval_term(const Plan &plan, const Assignment &asg,
                               const Term &t) {
  if (t.constant) {
    if (*t.constant < 0)
      throw error("negative constant term");
    return static_cast<std::uint64_t>(*t.constant);
  }
  auto it = asg.find(t.token);
  if (it == asg.end())
    throw error("unbound token '" + t.token + "'");
  const auto &tl = plan.timeline(it->second.first);
  if (it->second.second >= tl.tokens.size())
    throw error("token index out of range for '" + t.token + "'");
  return t.endpoint == Endpoint::start ? tl.start_time(it->second.second)
                                       : tl.end_time(it->second.second);
}

namespace detail {

/// Interval list of the tokens of one (variable, value) pair.
using Intervals = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

inline Intervals matching(const Plan &plan, const std::string &var,
                          const std::string &value) {
  Intervals out;
  auto it = plan.timelines.find(var);
  if (it == plan.timelines.end())
    return out;
  std::uint64_t t = 0;
  for (const auto &tok : it->second.tokens) {
    if (tok.value == value)
      out.emplace_back(t, t + tok.duration);
    t += tok.duration;
  }
  return out;
}

struct CompiledAtom {
  int lhs_slot, rhs_slot;
  bool lhs_end, rhs_end;
  bool strict;
  int ready_at; // depth at which both slots are bound
};

/// One existential statement prepared for repeated evaluation. Slot 0 is the
/// trigger when present, the quantified names follow in prefix order.
struct CompiledStatement {
  std::vector<Quantifier> slots;
  std::vector<CompiledAtom> atoms;
  bool has_trigger = false;
  bool valid = true; // false when an atom is not qualitative

  CompiledStatement(const SynchronizationRule &r, const ExistentialStatement &e) {
    if (r.trigger) {
      slots.push_back(*r.trigger);
      has_trigger = true;
    }
    slots.insert(slots.end(), e.quantifiers.begin(), e.quantifiers.end());
    auto slot = [&](const std::string &a) {
      for (std::size_t i = 0; i < slots.size(); ++i)
        if (slots[i].token == a)
          return static_cast<int>(i);
      throw error("unbound token '" + a + "'");
    };
    for (const auto &a : e.clause) {
      if (!a.qualitative()) {
        valid = false;
        continue;
      }
      CompiledAtom c{slot(a.lhs.token), slot(a.rhs.token),
                     a.lhs.endpoint == Endpoint::end,
                     a.rhs.endpoint == Endpoint::end, a.strict, 0};
      c.ready_at = std::max(c.lhs_slot, c.rhs_slot);
      atoms.push_back(c);
    }
  }

  bool search(const std::vector<Intervals> &cands,
              std::vector<const std::pair<std::uint64_t, std::uint64_t> *> &bound,
              std::size_t depth) const {
    if (depth == slots.size())
      return true;
    for (const auto &iv : cands[depth]) {
      bound[depth] = &iv;
      bool ok = true;
      for (const auto &a : atoms) {
        if (a.ready_at != static_cast<int>(depth))
          continue;
        const auto l = a.lhs_end ? bound[a.lhs_slot]->second : bound[a.lhs_slot]->first;
        const auto r = a.rhs_end ? bound[a.rhs_slot]->second : bound[a.rhs_slot]->first;
        if (a.strict ? !(l < r) : !(l <= r)) {
          ok = false;
          break;
        }
      }
      if (ok && search(cands, bound, depth + 1))
        return true;
    }
    return false;
  }

  /// Whether some assignment exists, with the trigger fixed to `trigger_iv`
  /// when the rule has one.
  bool satisfiable(const Plan &plan,
                   const std::pair<std::uint64_t, std::uint64_t> *trigger_iv) const {
    if (!valid)
      return false;
    std::vector<Intervals> cands(slots.size());
    std::size_t first = 0;
    if (has_trigger) {
      cands[0] = {*trigger_iv};
      first = 1;
    }
    for (std::size_t i = first; i < slots.size(); ++i) {
      cands[i] = matching(plan, slots[i].var, slots[i].value);
      if (cands[i].empty())
        return false;
    }
    std::vector<const std::pair<std::uint64_t, std::uint64_t> *> bound(slots.size());
    return search(cands, bound, 0);
  }
};

} // namespace detail

struct RuleCheck {
  bool satisfied = true;
  /// Index, within the trigger variable's timeline, of the first trigger
  /// token no disjunct can witness.
  std::optional<std::size_t> failing_trigger;
};

inline RuleCheck check_rule(const Plan &plan, const SynchronizationRule &rule) {
  std::vector<detail::CompiledStatement> stmts;
  for (const auto &e : rule.disjuncts)
    stmts.emplace_back(rule, e);
  RuleCheck out;
  if (!rule.trigger) {
    out.satisfied = false;
    for (const auto &s : stmts)
      if (s.satisfiable(plan, nullptr)) {
        out.satisfied = true;
        break;
      }
    return out;
  }
  auto it = plan.timelines.find(rule.trigger->var);
  if (it == plan.timelines.end())
    return out;
  std::uint64_t t = 0;
  const auto &toks = it->second.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const std::pair<std::uint64_t, std::uint64_t> iv{t, t + toks[i].duration};
    t += toks[i].duration;
    if (toks[i].value != rule.trigger->value)
      continue;
    bool ok = false;
    for (const auto &s : stmts)
      if (s.satisfiable(plan, &iv)) {
        ok = true;
        break;
      }
    if (!ok) {
      out.satisfied = false;
      out.failing_trigger = i;
      return out;
    }
  }
  return out;
}

inline bool satisfies_rule(const Plan &plan, const SynchronizationRule &rule) {
  return check_rule(plan, rule).satisfied;
}

struct RuleReport {
  std::string rule;
  bool satisfied = true;
  std::optional<std::size_t> failing_trigger;
};

struct SolutionReport {
  bool solution = true;
  std::vector<RuleReport> rules;

  std::vector<std::string> failing_rules() const {
    std::vector<std::string> out;
    for (const auto &r : rules)
      if (!r.satisfied)
        out.push_back(r.rule);
    return out;
  }
};

/// Per-rule check of `plan` against `p`; the plan must be valid for `p`.
inline SolutionReport verify_solution(const PlanningProblem &p, const Plan &plan) {
  const auto issues = validate_plan(p, plan);
  if (!issues.empty())
    throw error("invalid plan: " + to_string(issues.front()));
  SolutionReport rep;
  for (const auto &r : p.rules) {
    const auto c = check_rule(plan, r);
    rep.rules.push_back({r.name, c.satisfied, c.failing_trigger});
    rep.solution &= c.satisfied;
  }
  return rep;
}

} // namespace eagertl
