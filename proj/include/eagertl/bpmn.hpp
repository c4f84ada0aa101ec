#pragma once

// SESE block trees and their compilation into eager planning problems.

#include "allen.hpp"
#include "closure.hpp"
#include "model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace eagertl {

enum class BlockKind { task, flow, parallel, loop, xor_ };

inline std::string to_string(BlockKind k) {
  switch (k) {
  case BlockKind::task: return "TASK";
  case BlockKind::flow: return "FLOW";
  case BlockKind::parallel: return "PARALLEL";
  case BlockKind::loop: return "LOOP";
  case BlockKind::xor_: return "XOR";
  }
  return "?";
}

inline std::optional<BlockKind> parse_block_kind(const std::string &s) {
  for (auto k : {BlockKind::task, BlockKind::flow, BlockKind::parallel,
                 BlockKind::loop, BlockKind::xor_})
    if (to_string(k) == s)
      return k;
  return std::nullopt;
}

inline std::size_t arity(BlockKind k) {
  switch (k) {
  case BlockKind::task: return 0;
  case BlockKind::loop: return 1;
  default: return 2;
  }
}

/// Child roles per kind, in storage order.
inline std::vector<std::string> child_roles(BlockKind k) {
  switch (k) {
  case BlockKind::flow: return {"before", "after"};
  case BlockKind::parallel: return {"left", "right"};
  case BlockKind::loop: return {"body"};
  case BlockKind::xor_: return {"high", "low"};
  case BlockKind::task: break;
  }
  return {};
}

struct SeseBlock {
  std::string id;
  BlockKind kind = BlockKind::task;
  std::vector<SeseBlock> children;

  static SeseBlock task(std::string id) { return {std::move(id), BlockKind::task, {}}; }
  static SeseBlock flow(std::string id, SeseBlock before, SeseBlock after) {
    return {std::move(id), BlockKind::flow, {std::move(before), std::move(after)}};
  }
  static SeseBlock parallel(std::string id, SeseBlock l, SeseBlock r) {
    return {std::move(id), BlockKind::parallel, {std::move(l), std::move(r)}};
  }
  static SeseBlock loop(std::string id, SeseBlock body) {
    return {std::move(id), BlockKind::loop, {std::move(body)}};
  }
  static SeseBlock xor_(std::string id, SeseBlock high, SeseBlock low) {
    return {std::move(id), BlockKind::xor_, {std::move(high), std::move(low)}};
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto &c : children)
      n += c.size();
    return n;
  }

  friend bool operator==(const SeseBlock &, const SeseBlock &) = default;
};

namespace detail {
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
} // namespace detail

/// Throws `error` on empty or non-identifier ids, repeated ids and wrong
/// child counts.
inline void validate_tree(const SeseBlock &root) {
  std::set<std::string> ids;
  auto rec = [&](auto &&self, const SeseBlock &b) -> void {
    if (b.id.empty() || !std::all_of(b.id.begin(), b.id.end(), detail::ident_char))
      throw error("block id '" + b.id + "' must be a non-empty [A-Za-z0-9_] word");
    if (!ids.insert(b.id).second)
      throw error("duplicate block id '" + b.id + "'");
    if (b.children.size() != arity(b.kind))
      throw error("block '" + b.id + "' of type " + to_string(b.kind) + " needs " +
                  std::to_string(arity(b.kind)) + " children, has " +
                  std::to_string(b.children.size()));
    for (const auto &c : b.children)
      self(self, c);
  };
  rec(rec, root);
}

namespace bpmn {
inline const std::string top = "top", bot = "bot";
inline const std::string before = "top_before", after = "top_after";
inline const std::string high = "top_high", low = "top_low";

inline std::string block_var(const std::string &id) { return "x_" + id; }
inline std::string flow_var(const std::string &id) { return "x_" + id + "_flow"; }
inline std::string dec_var(const std::string &id) { return "x_" + id + "_dec"; }

inline const std::string condition_var = "x_condition";

/// Shapes used by the catalog, read with a0 the trigger and a1 the other
/// token.
enum class Shape {
  equal,     // s0 = s1, e0 = e1
  a1_starts, // s0 = s1, e1 <= e0
  a0_starts, // s0 = s1, e0 <= e1
  a1_ends,   // s0 <= s1, e0 = e1
};

inline std::vector<Atom> shape_clause(Shape s) {
  const auto s0 = Term::start("a0"), e0 = Term::end("a0");
  const auto s1 = Term::start("a1"), e1 = Term::end("a1");
  std::vector<Atom> c;
  auto add = [&](std::vector<Atom> v) { c.insert(c.end(), v.begin(), v.end()); };
  switch (s) {
  case Shape::equal:
    add(equal(s0, s1));
    add(equal(e0, e1));
    break;
  case Shape::a1_starts:
    add(equal(s0, s1));
    c.push_back(Atom::le(e1, e0));
    break;
  case Shape::a0_starts:
    add(equal(s1, s0));
    c.push_back(Atom::le(e0, e1));
    break;
  case Shape::a1_ends:
    c.push_back(Atom::le(s0, s1));
    add(equal(e0, e1));
    break;
  }
  return c;
}

inline SynchronizationRule make_rule(std::string name, std::string tvar,
                                     std::string tval, std::string var,
                                     std::string val, Shape shape) {
  SynchronizationRule r;
  r.name = std::move(name);
  r.trigger = Quantifier{"a0", std::move(tvar), std::move(tval)};
  ExistentialStatement e;
  e.quantifiers = {{"a1", std::move(var), std::move(val)}};
  e.clause = shape_clause(shape);
  r.disjuncts.push_back(std::move(e));
  return r;
}
} // namespace bpmn

/// Catalog rules of block `b`: forward rules triggered by `b`'s own
/// variables, backward rules triggered by its children.
inline std::vector<SynchronizationRule> rules_for_block(const SeseBlock &b) {
  using namespace bpmn;
  std::vector<SynchronizationRule> out;
  const std::string xb = block_var(b.id);
  auto rule = [&](const std::string &tag, const std::string &tv,
                  const std::string &tval, const std::string &v,
                  const std::string &val, Shape sh) {
    out.push_back(make_rule(b.id + "." + tag, tv, tval, v, val, sh));
  };
  switch (b.kind) {
  case BlockKind::task:
    break;
  case BlockKind::flow: {
    const std::string xf = flow_var(b.id);
    const std::string xbef = block_var(b.children[0].id);
    const std::string xaft = block_var(b.children[1].id);
    rule("Ff.1", xb, top, xf, before, Shape::a1_starts);
    rule("Ff.2", xb, top, xf, after, Shape::a1_ends);
    rule("Ff.3", xf, before, xb, top, Shape::a0_starts);
    rule("Ff.4", xb, bot, xf, bot, Shape::equal);
    rule("Ff.5", xf, bot, xb, bot, Shape::equal);
    rule("Ff.6", xf, before, xbef, top, Shape::equal);
    rule("Ff.7", xf, after, xaft, top, Shape::equal);
    rule("Fb.1", xbef, top, xf, before, Shape::equal);
    rule("Fb.2", xaft, top, xf, after, Shape::equal);
    break;
  }
  case BlockKind::parallel: {
    const std::string x1 = block_var(b.children[0].id);
    const std::string x2 = block_var(b.children[1].id);
    rule("Pf.1", xb, top, x1, top, Shape::equal);
    rule("Pf.2", xb, top, x2, top, Shape::equal);
    rule("Pb.1", x1, top, xb, top, Shape::equal);
    rule("Pb.2", x2, top, xb, top, Shape::equal);
    break;
  }
  case BlockKind::loop: {
    const std::string xbody = block_var(b.children[0].id);
    rule("Lf.1", xb, top, xbody, top, Shape::a1_starts);
    rule("Lf.2", xb, top, xbody, top, Shape::a1_ends);
    rule("Lf.3", xb, bot, xbody, bot, Shape::equal);
    rule("Lb.1", xbody, bot, xb, bot, Shape::equal);
    break;
  }
  case BlockKind::xor_: {
    const std::string xd = dec_var(b.id);
    const std::string xh = block_var(b.children[0].id);
    const std::string xl = block_var(b.children[1].id);
    rule("Xf.1", xb, bot, xd, bot, Shape::equal);
    rule("Xf.2", xd, bot, xb, bot, Shape::equal);
    rule("Xf.3", xd, high, xb, top, Shape::equal);
    rule("Xf.4", xd, low, xb, top, Shape::equal);
    rule("Xf.5", xd, high, xh, top, Shape::equal);
    rule("Xf.6", xd, low, xl, top, Shape::equal);
    rule("Xb.1", xh, top, xd, high, Shape::equal);
    rule("Xb.2", xl, top, xd, low, Shape::equal);
    break;
  }
  }
  return out;
}

struct BlockVars {
  std::string block;
  std::optional<std::string> flow;
  std::optional<std::string> dec;
};

struct CompiledProblem {
  PlanningProblem problem;
  std::string root;
  std::map<std::string, BlockVars> var_index;
};

/// Variables of every block, the catalog rules and the triggerless goal on
/// the root region. The root variable has domain {top} and no successor, so
/// catalog patterns over x_root = bot never match.
inline CompiledProblem compile(const SeseBlock &tree) {
  using namespace bpmn;
  validate_tree(tree);
  CompiledProblem out;
  out.root = tree.id;
  auto &p = out.problem;

  auto rec = [&](auto &&self, const SeseBlock &b, bool is_root) -> void {
    BlockVars bv{block_var(b.id), {}, {}};
    if (is_root) {
      p.vars.push_back({bv.block, {top}, {{top, {}}}});
    } else {
      p.vars.push_back({bv.block, {top, bot}, {{top, {top, bot}}, {bot, {top}}}});
    }
    if (b.kind == BlockKind::flow) {
      bv.flow = flow_var(b.id);
      p.vars.push_back({*bv.flow,
                        {bot, before, after},
                        {{bot, {before}}, {before, {after}}, {after, {bot, before}}}});
    }
    if (b.kind == BlockKind::xor_) {
      bv.dec = dec_var(b.id);
      p.vars.push_back(StateVariable::free(*bv.dec, {bot, high, low}));
    }
    out.var_index.emplace(b.id, bv);
    for (auto &r : rules_for_block(b))
      p.rules.push_back(std::move(r));
    for (const auto &c : b.children)
      self(self, c, false);
  };
  rec(rec, tree, true);

  SynchronizationRule goal;
  goal.name = "goal";
  goal.disjuncts.push_back({{{"t", block_var(tree.id), top}}, {}});
  p.rules.push_back(std::move(goal));
  return out;
}

/// Patient-condition timeline with the two enrichment rules tying it to the
/// critical branch and to discharge.
inline void add_condition_overlay(CompiledProblem &cp, const std::string &critical,
                                  const std::string &discharge) {
  using namespace bpmn;
  if (!cp.var_index.count(critical) || !cp.var_index.count(discharge))
    throw error("condition overlay refers to an unknown block");
  if (cp.problem.find_var(condition_var))
    throw error("condition overlay already present");
  cp.problem.vars.push_back(
      {condition_var,
       {"unstable", "stable"},
       {{"unstable", {"stable", "unstable"}}, {"stable", {"stable"}}}});
  cp.problem.rules.push_back(make_rule("condition.1", block_var(critical), top,
                                       condition_var, "unstable", Shape::a1_starts));
  cp.problem.rules.push_back(make_rule("condition.2", block_var(discharge), top,
                                       condition_var, "stable", Shape::equal));
}

/// Row of the Allen eagerness table whose reflexive clause has the same
/// closure as the two-token rule `r`, if any.
inline std::optional<int> allen_row_of(const SynchronizationRule &r) {
  if (!r.trigger || r.disjuncts.size() != 1 || r.disjuncts[0].quantifiers.size() != 1)
    return std::nullopt;
  const std::string t = r.trigger->token;
  const std::string o = r.disjuncts[0].quantifiers[0].token;
  const auto mine = close_clause(r.disjuncts[0].clause);
  int row = 1;
  for (auto rel : table_relations())
    for (auto role : {TriggerRole::a, TriggerRole::b, TriggerRole::none}) {
      const int here = row++;
      if (role == TriggerRole::none)
        continue;
      const auto &a = role == TriggerRole::a ? t : o;
      const auto &b = role == TriggerRole::a ? o : t;
      if (close_clause(allen_clause(rel, true, a, b)) == mine)
        return here;
    }
  return std::nullopt;
}

/// The Emergency Department decomposition.
inline SeseBlock ed_tree() {
  using B = SeseBlock;
  auto b9 = B::loop("b9", B::task("b13"));
  auto b7 = B::flow("b7", B::task("b8"), std::move(b9));
  auto b5 = B::parallel("b5", B::task("b11"), B::task("b12"));
  auto b4 = B::flow("b4", std::move(b5), B::task("b6"));
  auto b3 = B::xor_("b3", std::move(b4), std::move(b7));
  auto b2 = B::flow("b2", B::task("b15"), std::move(b3));
  return B::flow("b1", std::move(b2), B::task("b16"));
}

struct Fixture {
  std::string name;
  Plan plan;
  bool solution = true;
  std::string failing_rule; // expected among the failures when !solution
};

namespace detail {
using Spans = std::vector<std::pair<std::string, std::uint64_t>>;
using PlanSpec = std::vector<std::pair<std::string, Spans>>;

inline PlanSpec fig4_spec() {
  using namespace bpmn;
  const Spans off{{bot, 11}};
  return {
      {block_var("b1"), {{top, 11}}},
      {flow_var("b1"), {{before, 9}, {after, 2}}},
      {block_var("b2"), {{top, 9}, {bot, 2}}},
      {flow_var("b2"), {{before, 2}, {after, 7}, {bot, 2}}},
      {block_var("b15"), {{top, 2}, {bot, 9}}},
      {block_var("b3"), {{bot, 2}, {top, 7}, {bot, 2}}},
      {dec_var("b3"), {{bot, 2}, {high, 7}, {bot, 2}}},
      {block_var("b4"), {{bot, 2}, {top, 7}, {bot, 2}}},
      {flow_var("b4"), {{bot, 2}, {before, 4}, {after, 3}, {bot, 2}}},
      {block_var("b5"), {{bot, 2}, {top, 4}, {bot, 5}}},
      {block_var("b11"), {{bot, 2}, {top, 4}, {bot, 5}}},
      {block_var("b12"), {{bot, 2}, {top, 4}, {bot, 5}}},
      {block_var("b6"), {{bot, 6}, {top, 3}, {bot, 2}}},
      {block_var("b7"), off},
      {flow_var("b7"), off},
      {block_var("b8"), off},
      {block_var("b9"), off},
      {block_var("b13"), off},
      {block_var("b16"), {{bot, 9}, {top, 2}}},
  };
}

inline PlanSpec fig3_spec() {
  using namespace bpmn;
  const Spans off{{bot, 11}};
  return {
      {block_var("b1"), {{top, 11}}},
      {flow_var("b1"), {{before, 9}, {after, 2}}},
      {block_var("b2"), {{top, 9}, {bot, 2}}},
      {flow_var("b2"), {{before, 2}, {after, 7}, {bot, 2}}},
      {block_var("b15"), {{top, 2}, {bot, 9}}},
      {block_var("b3"), {{bot, 2}, {top, 7}, {bot, 2}}},
      {dec_var("b3"), {{bot, 2}, {low, 7}, {bot, 2}}},
      {block_var("b4"), off},
      {flow_var("b4"), off},
      {block_var("b5"), off},
      {block_var("b11"), off},
      {block_var("b12"), off},
      {block_var("b6"), off},
      {block_var("b7"), {{bot, 2}, {top, 7}, {bot, 2}}},
      {flow_var("b7"), {{bot, 2}, {before, 2}, {after, 5}, {bot, 2}}},
      {block_var("b8"), {{bot, 2}, {top, 2}, {bot, 7}}},
      {block_var("b9"), {{bot, 4}, {top, 5}, {bot, 2}}},
      {block_var("b13"), {{bot, 4}, {top, 3}, {top, 2}, {bot, 2}}},
      {block_var("b16"), {{bot, 9}, {top, 2}}},
  };
}

inline void set_spans(PlanSpec &s, const std::string &var, Spans spans) {
  for (auto &[v, sp] : s)
    if (v == var) {
      sp = std::move(spans);
      return;
    }
  throw error("fixture has no variable '" + var + "'");
}
} // namespace detail

/// Figure plans over every variable of compile(ed_tree()), with inactive
/// variables padded by bot tokens aligned to the surrounding phase changes,
/// and two mutants.
inline std::vector<Fixture> fixture_plans() {
  using namespace bpmn;
  std::vector<Fixture> out;
  out.push_back({"fig4-critical", make_plan(detail::fig4_spec()), true, ""});
  out.push_back({"fig3-non-critical", make_plan(detail::fig3_spec()), true, ""});

  auto mut_flow = detail::fig4_spec();
  detail::set_spans(mut_flow, flow_var("b1"), {{before, 11}});
  out.push_back({"fig4-no-after-phase", make_plan(mut_flow), false, "b1.Ff.2"});

  auto mut_loop = detail::fig3_spec();
  detail::set_spans(mut_loop, block_var("b13"), {{bot, 4}, {top, 3}, {bot, 4}});
  out.push_back({"fig3-single-iteration", make_plan(mut_loop), false, "b9.Lf.2"});
  return out;
}

/// The figure plans extended with a condition timeline for the overlay
/// returned by add_condition_overlay(cp, "b4", "b16").
inline std::vector<Fixture> overlay_fixture_plans() {
  std::vector<Fixture> out;
  auto f4 = detail::fig4_spec();
  f4.push_back({bpmn::condition_var, {{"unstable", 2}, {"unstable", 7}, {"stable", 2}}});
  out.push_back({"fig4-critical+condition", make_plan(f4), true, ""});
  auto f3 = detail::fig3_spec();
  f3.push_back({bpmn::condition_var, {{"unstable", 9}, {"stable", 2}}});
  out.push_back({"fig3-non-critical+condition", make_plan(f3), true, ""});
  auto bad = detail::fig4_spec();
  bad.push_back({bpmn::condition_var, {{"unstable", 2}, {"stable", 9}}});
  out.push_back({"fig4-stable-too-early", make_plan(bad), false, "condition.1"});
  return out;
}

} // namespace eagertl
