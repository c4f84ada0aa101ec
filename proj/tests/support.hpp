#pragma once

// Shared helpers for the unit tests: file access, random plans and rules,
// and a naive reference semantics written independently of the library.

#include "eagertl.hpp"

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

using namespace eagertl;

inline std::string data_path(const std::string &rel) {
  return std::string(EAGERTL_DATA_DIR) + "/" + rel;
}

inline std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PlanningProblem load(const std::string &rel) {
  return parse_problem(slurp(data_path(rel)));
}

// ---------------------------------------------------------------------------
// Naive reference semantics
// ---------------------------------------------------------------------------

struct Interval {
  std::uint64_t s, e;
};

inline std::vector<Interval> intervals_of(const Plan &plan, const std::string &var,
                                          const std::string &value) {
  std::vector<Interval> out;
  auto it = plan.timelines.find(var);
  if (it == plan.timelines.end())
    return out;
  std::uint64_t t = 0;
  for (const auto &tok : it->second.tokens) {
    if (tok.value == value)
      out.push_back({t, t + tok.duration});
    t += tok.duration;
  }
  return out;
}

/// Tries every tuple of tokens for the quantified names. Same-token
/// assignments to different names are allowed.
inline bool reference_statement(const Plan &plan, const SynchronizationRule &r,
                                const ExistentialStatement &e,
                                const Interval *trig) {
  std::vector<std::vector<Interval>> cand;
  for (const auto &q : e.quantifiers)
    cand.push_back(intervals_of(plan, q.var, q.value));
  std::map<std::string, Interval> bind;
  if (trig)
    bind[r.trigger->token] = *trig;
  auto value = [&](const Term &t) {
    const auto &iv = bind.at(t.token);
    return t.endpoint == Endpoint::start ? iv.s : iv.e;
  };
  std::vector<std::size_t> idx(cand.size(), 0);
  for (const auto &c : cand)
    if (c.empty())
      return false;
  while (true) {
    for (std::size_t i = 0; i < cand.size(); ++i)
      bind[e.quantifiers[i].token] = cand[i][idx[i]];
    bool ok = true;
    for (const auto &a : e.clause) {
      const auto l = value(a.lhs), rr = value(a.rhs);
      if (a.strict ? !(l < rr) : !(l <= rr)) {
        ok = false;
        break;
      }
    }
    if (ok)
      return true;
    std::size_t k = 0;
    for (; k < idx.size(); ++k) {
      if (++idx[k] < cand[k].size())
        break;
      idx[k] = 0;
    }
    if (k == idx.size())
      return false;
  }
}

inline bool reference_rule(const Plan &plan, const SynchronizationRule &r) {
  auto any = [&](const Interval *trig) {
    for (const auto &e : r.disjuncts)
      if (reference_statement(plan, r, e, trig))
        return true;
    return false;
  };
  if (!r.trigger)
    return any(nullptr);
  for (const auto &iv : intervals_of(plan, r.trigger->var, r.trigger->value))
    if (!any(&iv))
      return false;
  return true;
}

inline bool reference_solution(const PlanningProblem &p, const Plan &plan) {
  for (const auto &r : p.rules)
    if (!reference_rule(plan, r))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

/// Random valid plan of the given horizon, or of a random horizon in
/// [1, max_h] when `h` is 0. Retries until the transition functions allow it.
inline Plan random_plan(std::mt19937 &rng, const PlanningProblem &p,
                        std::uint64_t max_h, std::uint64_t h = 0) {
  if (h == 0)
    h = std::uniform_int_distribution<std::uint64_t>(1, max_h)(rng);
  Plan plan;
  plan.horizon = h;
  for (const auto &x : p.vars) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000)
        throw std::runtime_error("no plan for variable " + x.name);
      Timeline tl{x.name, {}};
      std::uint64_t t = 0;
      std::string cur;
      bool stuck = false;
      while (t < h) {
        const auto d = std::uniform_int_distribution<std::uint64_t>(1, h - t)(rng);
        std::vector<std::string> opts;
        if (cur.empty())
          opts = x.values;
        else
          for (const auto &v : x.values)
            if (x.allows(cur, v))
              opts.push_back(v);
        if (opts.empty()) {
          stuck = true;
          break;
        }
        cur = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)];
        tl.tokens.push_back({x.name, cur, d});
        t += d;
      }
      if (!stuck) {
        plan.timelines.emplace(x.name, std::move(tl));
        break;
      }
    }
  }
  return plan;
}

inline Term random_term(std::mt19937 &rng, const std::vector<std::string> &names) {
  const auto &a = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
  return rng() % 2 ? Term::start(a) : Term::end(a);
}

/// Random rule over the problem's variables, possibly triggerless.
inline SynchronizationRule random_rule(std::mt19937 &rng, const PlanningProblem &p,
                                       int max_names = 2, int max_atoms = 4,
                                       int max_disjuncts = 2) {
  auto pick_q = [&](const std::string &token) {
    const auto &x = p.vars[rng() % p.vars.size()];
    return Quantifier{token, x.name, x.values[rng() % x.values.size()]};
  };
  SynchronizationRule r;
  r.name = "random";
  if (rng() % 4 != 0)
    r.trigger = pick_q("a0");
  const int nd = 1 + static_cast<int>(rng() % max_disjuncts);
  for (int d = 0; d < nd; ++d) {
    ExistentialStatement e;
    const int nq = 1 + static_cast<int>(rng() % max_names);
    std::vector<std::string> names;
    if (r.trigger)
      names.push_back("a0");
    for (int i = 1; i <= nq; ++i) {
      e.quantifiers.push_back(pick_q("a" + std::to_string(i)));
      names.push_back("a" + std::to_string(i));
    }
    const int na = static_cast<int>(rng() % (max_atoms + 1));
    for (int i = 0; i < na; ++i) {
      Atom a{random_term(rng, names), random_term(rng, names), rng() % 2 == 0, {}};
      e.clause.push_back(a);
    }
    r.disjuncts.push_back(std::move(e));
  }
  return r;
}

} // namespace testing_support
