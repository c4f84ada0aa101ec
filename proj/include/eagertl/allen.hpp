#pragma once

// Allen interval relations as synchronization rules and the eagerness table.

#include "closure.hpp"
#include "model.hpp"

#include <array>
#include <sstream>
#include <string>
#include <vector>

namespace eagertl {

enum class AllenRelation {
  before,
  meets,
  ends,
  starts,
  overlaps,
  during,
  equal,
  // inverses
  after,
  met_by,
  ended_by,
  started_by,
  overlapped_by,
  contains,
};

enum class TriggerRole { a, b, none };

inline std::string to_string(AllenRelation r) {
  switch (r) {
  case AllenRelation::before: return "before";
  case AllenRelation::meets: return "meets";
  case AllenRelation::ends: return "ends";
  case AllenRelation::starts: return "starts";
  case AllenRelation::overlaps: return "overlaps";
  case AllenRelation::during: return "during";
  case AllenRelation::equal: return "=";
  case AllenRelation::after: return "after";
  case AllenRelation::met_by: return "met-by";
  case AllenRelation::ended_by: return "ended-by";
  case AllenRelation::started_by: return "started-by";
  case AllenRelation::overlapped_by: return "overlapped-by";
  case AllenRelation::contains: return "contains";
  }
  return "?";
}

inline std::string to_string(TriggerRole t) {
  switch (t) {
  case TriggerRole::a: return "a";
  case TriggerRole::b: return "b";
  case TriggerRole::none: return "none";
  }
  return "?";
}

inline std::optional<AllenRelation> parse_allen_relation(const std::string &s) {
  for (int i = 0; i <= static_cast<int>(AllenRelation::contains); ++i) {
    auto r = static_cast<AllenRelation>(i);
    if (to_string(r) == s)
      return r;
  }
  if (s == "equal")
    return AllenRelation::equal;
  return std::nullopt;
}

namespace detail {

inline AllenRelation base_relation(AllenRelation r, bool &swapped) {
  swapped = true;
  switch (r) {
  case AllenRelation::after: return AllenRelation::before;
  case AllenRelation::met_by: return AllenRelation::meets;
  case AllenRelation::ended_by: return AllenRelation::ends;
  case AllenRelation::started_by: return AllenRelation::starts;
  case AllenRelation::overlapped_by: return AllenRelation::overlaps;
  case AllenRelation::contains: return AllenRelation::during;
  default: swapped = false; return r;
  }
}

} // namespace detail

/// Clause for `a rel b` over token names `a` and `b`.
inline std::vector<Atom> allen_clause(AllenRelation rel, bool reflexive,
                                      const std::string &a = "a",
                                      const std::string &b = "b") {
  bool swapped = false;
  const AllenRelation base = detail::base_relation(rel, swapped);
  const std::string &p = swapped ? b : a;
  const std::string &q = swapped ? a : b;
  const auto sp = Term::start(p), ep = Term::end(p);
  const auto sq = Term::start(q), eq = Term::end(q);
  auto before = [&](Term l, Term r) {
    return reflexive ? Atom::le(std::move(l), std::move(r))
                     : Atom::lt(std::move(l), std::move(r));
  };
  std::vector<Atom> c;
  auto add_eq = [&](const Term &l, const Term &r) {
    auto e = equal(l, r);
    c.insert(c.end(), e.begin(), e.end());
  };
  switch (base) {
  case AllenRelation::before:
    c.push_back(before(ep, sq));
    break;
  case AllenRelation::meets:
    add_eq(ep, sq);
    break;
  case AllenRelation::ends:
    c.push_back(before(sq, sp));
    add_eq(ep, eq);
    break;
  case AllenRelation::starts:
    add_eq(sp, sq);
    c.push_back(before(ep, eq));
    break;
  case AllenRelation::overlaps:
    c.push_back(before(sp, sq));
    c.push_back(before(sq, ep));
    c.push_back(before(ep, eq));
    break;
  case AllenRelation::during:
    c.push_back(before(sq, sp));
    c.push_back(before(ep, eq));
    break;
  case AllenRelation::equal:
    add_eq(sp, sq);
    add_eq(ep, eq);
    break;
  default:
    break;
  }
  return c;
}

/// Rule encoding `a rel b` with tokens a[xa=va] and b[xb=vb].
inline SynchronizationRule allen_encoding(AllenRelation rel, bool reflexive,
                                          TriggerRole role) {
  const Quantifier qa{"a", "xa", "va"}, qb{"b", "xb", "vb"};
  SynchronizationRule r;
  r.name = to_string(rel) + (reflexive ? "-reflexive" : "") + "/" +
           to_string(role);
  ExistentialStatement e;
  switch (role) {
  case TriggerRole::a:
    r.trigger = qa;
    e.quantifiers = {qb};
    break;
  case TriggerRole::b:
    r.trigger = qb;
    e.quantifiers = {qa};
    break;
  case TriggerRole::none:
    e.quantifiers = {qa, qb};
    break;
  }
  e.clause = allen_clause(rel, reflexive);
  r.disjuncts.push_back(std::move(e));
  return r;
}

/// Problem declaring the two variables the encodings refer to.
inline PlanningProblem allen_problem(const SynchronizationRule &r) {
  PlanningProblem p;
  p.vars = {StateVariable::free("xa", {"va", "wa"}),
            StateVariable::free("xb", {"vb", "wb"})};
  p.rules = {r};
  return p;
}

struct AllenCell {
  bool trigger = false; // rendered as "-"
  bool left = false;
  bool right = false;
  bool ambiguous = false;

  friend bool operator==(const AllenCell &, const AllenCell &) = default;
};

struct AllenRow {
  int row = 0;
  AllenRelation relation = AllenRelation::before;
  TriggerRole trigger = TriggerRole::none;
  AllenCell a, b;
  bool overall = false; // some token ambiguous

  friend bool operator==(const AllenRow &, const AllenRow &) = default;
};

inline AllenRow classify_allen(int row, AllenRelation rel, TriggerRole role,
                               bool reflexive) {
  const auto r = allen_encoding(rel, reflexive, role);
  const auto cl = close_statement(r, 0);
  AllenRow out{row, rel, role, {}, {}, false};
  for (const auto &f : token_flags(r, 0, cl)) {
    AllenCell c{f.trigger, f.left, f.right, f.ambiguous};
    (f.token == "a" ? out.a : out.b) = c;
    out.overall |= f.ambiguous;
  }
  return out;
}

inline const std::array<AllenRelation, 7> &table_relations() {
  static const std::array<AllenRelation, 7> rels = {
      AllenRelation::before, AllenRelation::meets,    AllenRelation::ends,
      AllenRelation::starts, AllenRelation::overlaps, AllenRelation::during,
      AllenRelation::equal};
  return rels;
}

/// The 21-row eagerness table: seven relations, each with trigger a, b and
/// none.
inline std::vector<AllenRow> allen_table(bool reflexive = false) {
  std::vector<AllenRow> rows;
  int n = 1;
  for (auto rel : table_relations())
    for (auto role : {TriggerRole::a, TriggerRole::b, TriggerRole::none})
      rows.push_back(classify_allen(n++, rel, role, reflexive));
  return rows;
}

namespace detail {
inline std::string yes_no(bool b) { return b ? "yes" : "no"; }
inline std::array<std::string, 3> cell_strings(const AllenCell &c) {
  if (c.trigger)
    return {"-", "-", "-"};
  return {yes_no(c.left), yes_no(c.right), yes_no(c.ambiguous)};
}
} // namespace detail

inline std::string allen_table_csv(const std::vector<AllenRow> &rows) {
  std::ostringstream os;
  os << "row,relation,trigger,a_left,a_right,a_ambiguous,b_left,b_right,"
        "b_ambiguous,overall_ambiguous\n";
  for (const auto &r : rows) {
    os << r.row << ',' << to_string(r.relation) << ',' << to_string(r.trigger);
    for (const auto *c : {&r.a, &r.b})
      for (const auto &s : detail::cell_strings(*c))
        os << ',' << s;
    os << ',' << detail::yes_no(r.overall) << '\n';
  }
  return os.str();
}

inline std::string allen_table_text(const std::vector<AllenRow> &rows) {
  std::ostringstream os;
  auto pad = [&](const std::string &s, std::size_t w) {
    os << s << std::string(w > s.size() ? w - s.size() : 1, ' ');
  };
  pad("row", 5);
  pad("relation", 10);
  pad("trigger", 9);
  pad("a:left", 8);
  pad("a:right", 9);
  pad("a:amb", 7);
  pad("b:left", 8);
  pad("b:right", 9);
  pad("b:amb", 7);
  os << "overall\n";
  for (const auto &r : rows) {
    pad(std::to_string(r.row), 5);
    pad(to_string(r.relation), 10);
    pad(to_string(r.trigger), 9);
    const std::size_t widths[3] = {8, 9, 7};
    for (const auto *c : {&r.a, &r.b}) {
      auto cs = detail::cell_strings(*c);
      for (int k = 0; k < 3; ++k)
        pad(cs[k], widths[k]);
    }
    os << detail::yes_no(r.overall) << '\n';
  }
  return os.str();
}

} // namespace eagertl
