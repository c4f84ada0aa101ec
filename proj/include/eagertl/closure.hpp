#pragma once

// Clause closure, consistency, ambiguity classifiers and eagerness.

#include "model.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace eagertl {

/// Relation strength between two terms in a closure.
enum class Rel : std::uint8_t { none = 0, le = 1, lt = 2 };

/// The closed atom set of a clause over the terms that occur in it.
struct ClauseClosure {
  std::vector<Term> terms;            // sorted, unique
  std::vector<std::vector<Rel>> rel;  // rel[i][j]: terms[i] (<= | <) terms[j]
  bool consistent = true;
  std::vector<int> class_of;          // term index -> class index
  std::vector<std::vector<int>> classes;

  int index(const Term &t) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), t);
    if (it == terms.end() || *it != t)
      return -1;
    return static_cast<int>(it - terms.begin());
  }
  bool occurs(const Term &t) const { return index(t) >= 0; }

  bool le(const Term &a, const Term &b) const {
    int i = index(a), j = index(b);
    return i >= 0 && j >= 0 && rel[i][j] != Rel::none;
  }
  bool lt(const Term &a, const Term &b) const {
    int i = index(a), j = index(b);
    return i >= 0 && j >= 0 && rel[i][j] == Rel::lt;
  }
  bool equiv(const Term &a, const Term &b) const { return le(a, b) && le(b, a); }

  /// Every atom of the closure, non-strict atoms listed alongside their
  /// strict counterparts.
  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = 0; j < terms.size(); ++j) {
        if (rel[i][j] == Rel::none)
          continue;
        out.push_back(Atom::le(terms[i], terms[j]));
        if (rel[i][j] == Rel::lt)
          out.push_back(Atom::lt(terms[i], terms[j]));
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const ClauseClosure &a, const ClauseClosure &b) {
    return a.terms == b.terms && a.rel == b.rel && a.consistent == b.consistent;
  }
};

/// Least fixpoint of the six closure rules. `extra_terms` are treated as
/// occurring even when no atom mentions them.
inline ClauseClosure close_clause(const std::vector<Atom> &clause,
                                  const std::vector<Term> &extra_terms = {}) {
  ClauseClosure cl;
  std::set<Term> ts(extra_terms.begin(), extra_terms.end());
  for (const auto &a : clause) {
    ts.insert(a.lhs);
    ts.insert(a.rhs);
  }
  cl.terms.assign(ts.begin(), ts.end());
  const std::size_t n = cl.terms.size();
  cl.rel.assign(n, std::vector<Rel>(n, Rel::none));
  auto raise = [&](std::size_t i, std::size_t j, Rel r) {
    if (r > cl.rel[i][j]) {
      cl.rel[i][j] = r;
      return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i)
    raise(i, i, Rel::le);
  for (const auto &a : clause)
    raise(cl.index(a.lhs), cl.index(a.rhs), a.strict ? Rel::lt : Rel::le);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &t = cl.terms[i];
    if (t.endpoint == Endpoint::start) {
      int j = cl.index(Term::end(t.token));
      if (j >= 0)
        raise(i, static_cast<std::size_t>(j), Rel::lt);
    }
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        if (cl.rel[i][k] == Rel::none)
          continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (cl.rel[k][j] == Rel::none)
            continue;
          changed |= raise(i, j, std::max(cl.rel[i][k], cl.rel[k][j]));
        }
      }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (cl.rel[i][i] == Rel::lt)
      cl.consistent = false;

  cl.class_of.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (cl.class_of[i] >= 0)
      continue;
    const int c = static_cast<int>(cl.classes.size());
    cl.classes.emplace_back();
    for (std::size_t j = i; j < n; ++j)
      if (cl.class_of[j] < 0 && cl.rel[i][j] != Rel::none &&
          cl.rel[j][i] != Rel::none) {
        cl.class_of[j] = c;
        cl.classes[c].push_back(static_cast<int>(j));
      }
  }
  return cl;
}

/// Terms a statement speaks about: the clause terms plus start(a) for every
/// quantified name the clause leaves unmentioned.
inline std::vector<Term> statement_terms(const SynchronizationRule &r,
                                         std::size_t disjunct) {
  const auto &e = r.disjuncts.at(disjunct);
  std::set<std::string> mentioned;
  for (const auto &a : e.clause) {
    mentioned.insert(a.lhs.token);
    mentioned.insert(a.rhs.token);
  }
  std::vector<Term> extra;
  for (const auto &q : e.quantifiers)
    if (!mentioned.count(q.token))
      extra.push_back(Term::start(q.token));
  return extra;
}

inline ClauseClosure close_statement(const SynchronizationRule &r,
                                     std::size_t disjunct) {
  return close_clause(r.disjuncts.at(disjunct).clause,
                      statement_terms(r, disjunct));
}

// ----------------------------------------------------------------------------
// Ambiguity
// ----------------------------------------------------------------------------

namespace detail {

inline bool is_trigger(const SynchronizationRule &r, const std::string &a) {
  return r.trigger && r.trigger->token == a;
}

inline void require_occurs(const ClauseClosure &cl, const std::string &a) {
  if (!cl.occurs(Term::start(a)) && !cl.occurs(Term::end(a)))
    throw error("token name '" + a + "' does not occur in the clause");
}

/// Occurring terms of names other than `a`.
inline std::vector<Term> other_terms(const ClauseClosure &cl,
                                     const std::string &a) {
  std::vector<Term> out;
  for (const auto &t : cl.terms)
    if (t.token != a)
      out.push_back(t);
  return out;
}

} // namespace detail

inline bool is_left_ambiguous(const std::string &a, const SynchronizationRule &r,
                              const ClauseClosure &cl) {
  detail::require_occurs(cl, a);
  if (detail::is_trigger(r, a))
    return false;
  const Term sa = Term::start(a), ea = Term::end(a);
  if (r.trigger) {
    const auto &a0 = r.trigger->token;
    if (cl.equiv(sa, Term::start(a0)) || cl.equiv(sa, Term::end(a0)))
      return false;
  }
  for (const auto &t : detail::other_terms(cl, a)) {
    if (!detail::is_trigger(r, t.token) && cl.equiv(sa, t))
      return true;
    if (cl.le(sa, t) && !cl.le(ea, t))
      return true;
  }
  return false;
}

inline bool is_right_ambiguous(const std::string &a,
                               const SynchronizationRule &r,
                               const ClauseClosure &cl) {
  detail::require_occurs(cl, a);
  if (detail::is_trigger(r, a))
    return false;
  const Term sa = Term::start(a), ea = Term::end(a);
  for (const auto &t : detail::other_terms(cl, a)) {
    if (cl.le(ea, t))
      return true;
    if (cl.le(t, ea) && !cl.le(t, sa))
      return true;
  }
  return false;
}

inline bool is_ambiguous(const std::string &a, const SynchronizationRule &r,
                         const ClauseClosure &cl) {
  return is_left_ambiguous(a, r, cl) && is_right_ambiguous(a, r, cl);
}

struct TokenFlags {
  std::string token;
  bool trigger = false;
  bool left = false;
  bool right = false;
  bool ambiguous = false;
};

/// Token names occurring in a statement, trigger first, then in quantifier
/// order.
inline std::vector<std::string> occurring_names(const SynchronizationRule &r,
                                                std::size_t disjunct,
                                                const ClauseClosure &cl) {
  std::vector<std::string> out;
  auto occurs = [&](const std::string &a) {
    return cl.occurs(Term::start(a)) || cl.occurs(Term::end(a));
  };
  if (r.trigger && occurs(r.trigger->token))
    out.push_back(r.trigger->token);
  for (const auto &q : r.disjuncts.at(disjunct).quantifiers)
    if (occurs(q.token))
      out.push_back(q.token);
  return out;
}

inline std::vector<TokenFlags> token_flags(const SynchronizationRule &r,
                                           std::size_t disjunct,
                                           const ClauseClosure &cl) {
  std::vector<TokenFlags> out;
  for (const auto &a : occurring_names(r, disjunct, cl)) {
    TokenFlags f{a, detail::is_trigger(r, a), is_left_ambiguous(a, r, cl),
                 is_right_ambiguous(a, r, cl), false};
    f.ambiguous = f.left && f.right;
    out.push_back(f);
  }
  return out;
}

struct RuleClassification {
  bool eager = false;
  std::vector<std::string> reasons;
  std::vector<std::vector<TokenFlags>> flags; // per disjunct

  std::vector<std::string> ambiguous_tokens() const {
    std::vector<std::string> out;
    for (const auto &d : flags)
      for (const auto &f : d)
        if (f.ambiguous)
          out.push_back(f.token);
    return out;
  }
};

inline RuleClassification is_eager_rule(const SynchronizationRule &r) {
  RuleClassification c;
  if (r.disjuncts.size() != 1)
    c.reasons.push_back("disjunctive");
  for (std::size_t d = 0; d < r.disjuncts.size(); ++d) {
    const auto cl = close_statement(r, d);
    if (!cl.consistent) {
      c.reasons.push_back("inconsistent clause");
      c.flags.emplace_back();
      continue;
    }
    c.flags.push_back(token_flags(r, d, cl));
    for (const auto &f : c.flags.back())
      if (f.ambiguous)
        c.reasons.push_back("token '" + f.token + "' is ambiguous");
  }
  c.eager = c.reasons.empty();
  return c;
}

inline bool is_eager_problem(const PlanningProblem &p) {
  return std::all_of(p.rules.begin(), p.rules.end(),
                     [](const auto &r) { return is_eager_rule(r).eager; });
}

} // namespace eagertl
