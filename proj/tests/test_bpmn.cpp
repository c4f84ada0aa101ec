#include "support.hpp"

#include <gtest/gtest.h>

using namespace eagertl;
using namespace testing_support;

namespace {

std::vector<std::string> rule_names(const std::vector<SynchronizationRule> &rs) {
  std::vector<std::string> out;
  for (const auto &r : rs)
    out.push_back(r.name);
  return out;
}

/// Random tree with at most `budget` blocks; ids are b0, b1, ...
SeseBlock random_tree(std::mt19937 &rng, int &next_id, int budget) {
  const std::string id = "b" + std::to_string(next_id++);
  if (budget < 3 || rng() % 4 == 0) {
    if (budget >= 2 && rng() % 3 == 0)
      return SeseBlock::loop(id, random_tree(rng, next_id, budget - 1));
    return SeseBlock::task(id);
  }
  const int left = 1 + static_cast<int>(rng() % (budget - 2));
  auto a = random_tree(rng, next_id, left);
  auto b = random_tree(rng, next_id, budget - 1 - static_cast<int>(a.size()));
  switch (rng() % 3) {
  case 0: return SeseBlock::flow(id, std::move(a), std::move(b));
  case 1: return SeseBlock::parallel(id, std::move(a), std::move(b));
  default: return SeseBlock::xor_(id, std::move(a), std::move(b));
  }
}

const Fixture &fixture(const std::vector<Fixture> &fx, const std::string &name) {
  for (const auto &f : fx)
    if (f.name == name)
      return f;
  throw std::runtime_error("no fixture " + name);
}

} // namespace

TEST(RulesForBlock, Catalog) {
  const auto t = SeseBlock::task("t");
  EXPECT_TRUE(rules_for_block(t).empty());
  EXPECT_EQ(rule_names(rules_for_block(SeseBlock::flow("f", t, SeseBlock::task("u")))),
            (std::vector<std::string>{"f.Ff.1", "f.Ff.2", "f.Ff.3", "f.Ff.4", "f.Ff.5",
                                      "f.Ff.6", "f.Ff.7", "f.Fb.1", "f.Fb.2"}));
  EXPECT_EQ(rule_names(rules_for_block(SeseBlock::loop("l", t))),
            (std::vector<std::string>{"l.Lf.1", "l.Lf.2", "l.Lf.3", "l.Lb.1"}));
  EXPECT_EQ(rule_names(rules_for_block(SeseBlock::xor_("x", t, SeseBlock::task("u")))),
            (std::vector<std::string>{"x.Xf.1", "x.Xf.2", "x.Xf.3", "x.Xf.4", "x.Xf.5",
                                      "x.Xf.6", "x.Xb.1", "x.Xb.2"}));
  EXPECT_EQ(rule_names(rules_for_block(SeseBlock::parallel("p", t, SeseBlock::task("u")))),
            (std::vector<std::string>{"p.Pf.1", "p.Pf.2", "p.Pb.1", "p.Pb.2"}));
}

TEST(RulesForBlock, FlowStartRuleIsLiteral) {
  const auto rs = rules_for_block(SeseBlock::flow("f", SeseBlock::task("t"), SeseBlock::task("u")));
  const auto &ff1 = rs.at(0);
  ASSERT_TRUE(ff1.trigger);
  EXPECT_EQ(ff1.trigger->var, "x_f");
  EXPECT_EQ(ff1.trigger->value, "top");
  const auto &e = ff1.disjuncts.at(0);
  ASSERT_EQ(e.quantifiers.size(), 1u);
  EXPECT_EQ(e.quantifiers[0].var, "x_f_flow");
  EXPECT_EQ(e.quantifiers[0].value, "top_before");
  const auto cl = close_clause(e.clause);
  const auto a0 = ff1.trigger->token, a1 = e.quantifiers[0].token;
  EXPECT_TRUE(cl.equiv(Term::start(a0), Term::start(a1)));
  EXPECT_TRUE(cl.le(Term::end(a1), Term::end(a0)));
  for (const auto &a : e.clause)
    EXPECT_FALSE(a.strict);
}

TEST(Compile, BareTaskRoot) {
  const auto cp = compile(SeseBlock::task("t"));
  ASSERT_EQ(cp.problem.vars.size(), 1u);
  EXPECT_EQ(cp.problem.vars[0].values, std::vector<std::string>{"top"});
  EXPECT_EQ(rule_names(cp.problem.rules), std::vector<std::string>{"goal"});
  const auto r = find_solution(cp.problem);
  ASSERT_EQ(r.status, SolveStatus::solution);
}

TEST(Compile, FlowOfTwoTasks) {
  const auto cp = compile(SeseBlock::flow("f", SeseBlock::task("t"), SeseBlock::task("u")));
  EXPECT_EQ(cp.problem.vars.size(), 4u);
  EXPECT_EQ(cp.problem.rules.size(), 10u);
  EXPECT_TRUE(validate_problem(cp.problem).empty() ||
              !has_errors(validate_problem(cp.problem)));
  EXPECT_EQ(*cp.var_index.at("f").flow, "x_f_flow");
  const auto root = cp.problem.find_var("x_f");
  ASSERT_TRUE(root);
  EXPECT_EQ(root->values, std::vector<std::string>{"top"});
  EXPECT_TRUE(root->trans.at("top").empty());
}

TEST(Compile, TransitionFunctions) {
  const auto cp = compile(ed_tree());
  const auto *xb = cp.problem.find_var("x_b2");
  ASSERT_TRUE(xb);
  EXPECT_TRUE(xb->allows("top", "bot"));
  EXPECT_TRUE(xb->allows("top", "top"));
  EXPECT_FALSE(xb->allows("bot", "bot"));
  const auto *xf = cp.problem.find_var("x_b2_flow");
  ASSERT_TRUE(xf);
  EXPECT_TRUE(xf->allows("bot", "top_before"));
  EXPECT_TRUE(xf->allows("top_before", "top_after"));
  EXPECT_TRUE(xf->allows("top_after", "bot"));
  EXPECT_TRUE(xf->allows("top_after", "top_before"));
  EXPECT_FALSE(xf->allows("top_before", "bot"));
  const auto *xd = cp.problem.find_var("x_b3_dec");
  ASSERT_TRUE(xd);
  EXPECT_TRUE(xd->allows("top_high", "top_low"));
}

TEST(Compile, EmergencyDepartmentTree) {
  const auto tree = ed_tree();
  EXPECT_EQ(tree.size(), 14u);
  const auto cp = compile(tree);
  EXPECT_EQ(cp.problem.vars.size(), 19u);
  EXPECT_EQ(cp.problem.rules.size(), 53u);
  EXPECT_FALSE(has_errors(validate_problem(cp.problem)));
  for (const auto &r : cp.problem.rules) {
    EXPECT_TRUE(is_eager_rule(r).eager) << r.name;
    if (r.name == "goal")
      continue;
    const auto row = allen_row_of(r);
    ASSERT_TRUE(row) << r.name;
    EXPECT_TRUE(*row == 8 || *row == 10 || *row == 11 || *row == 19) << r.name;
  }
}

TEST(Compile, RejectsMalformedTrees) {
  EXPECT_THROW(compile(SeseBlock::flow("a", SeseBlock::task("a"), SeseBlock::task("b"))), error);
  SeseBlock bad{"f", BlockKind::flow, {SeseBlock::task("t")}};
  EXPECT_THROW(compile(bad), error);
  EXPECT_THROW(compile(SeseBlock::task("no space")), error);
}

TEST(Fixtures, FigurePlansAreSolutions) {
  const auto cp = compile(ed_tree());
  const auto fx = fixture_plans();
  for (const auto &f : fx) {
    ASSERT_TRUE(validate_plan(cp.problem, f.plan).empty()) << f.name;
    const auto rep = verify_solution(cp.problem, f.plan);
    EXPECT_EQ(rep.solution, f.solution) << f.name;
    EXPECT_EQ(reference_solution(cp.problem, f.plan), f.solution) << f.name;
    if (!f.solution) {
      const auto failing = rep.failing_rules();
      EXPECT_NE(std::find(failing.begin(), failing.end(), f.failing_rule), failing.end())
          << f.name;
    }
  }
}

TEST(Fixtures, FigureDetails) {
  const auto fx = fixture_plans();
  const auto &f4 = fixture(fx, "fig4-critical").plan;
  for (const char *v : {"x_b11", "x_b12"}) {
    const auto &tl = f4.timeline(v);
    ASSERT_EQ(tl.tokens.at(1).value, "top");
    EXPECT_EQ(tl.start_time(1), 2u);
    EXPECT_EQ(tl.end_time(1), 6u);
  }
  const auto &dec = f4.timeline("x_b3_dec");
  EXPECT_EQ(dec.tokens.at(1).value, "top_high");
  EXPECT_EQ(dec.start_time(1), 2u);
  EXPECT_EQ(dec.end_time(1), 9u);
  const auto &f3 = fixture(fx, "fig3-non-critical").plan.timeline("x_b13");
  EXPECT_EQ(f3.start_time(1), 4u);
  EXPECT_EQ(f3.end_time(1), 7u);
  EXPECT_EQ(f3.start_time(2), 7u);
  EXPECT_EQ(f3.end_time(2), 9u);
}

TEST(Fixtures, DroppingTheAfterPhaseBreaksFf2) {
  const auto cp = compile(ed_tree());
  const auto fx = fixture_plans();
  const auto &f = fixture(fx, "fig4-no-after-phase");
  const auto failing = verify_solution(cp.problem, f.plan).failing_rules();
  EXPECT_NE(std::find(failing.begin(), failing.end(), "b1.Ff.2"), failing.end());
}

TEST(Fixtures, ConditionOverlay) {
  auto cp = compile(ed_tree());
  add_condition_overlay(cp, "b4", "b16");
  EXPECT_THROW(add_condition_overlay(cp, "b4", "b16"), error);
  for (const auto &r : cp.problem.rules)
    EXPECT_TRUE(is_eager_rule(r).eager) << r.name;
  for (const auto &f : overlay_fixture_plans()) {
    const auto rep = verify_solution(cp.problem, f.plan);
    EXPECT_EQ(rep.solution, f.solution) << f.name;
    if (!f.solution) {
      const auto failing = rep.failing_rules();
      EXPECT_NE(std::find(failing.begin(), failing.end(), f.failing_rule), failing.end());
    }
  }
  auto other = compile(ed_tree());
  EXPECT_THROW(add_condition_overlay(other, "nope", "b16"), error);
}

TEST(BpmnProperty, RandomTreesCompileToEagerRules) {
  std::mt19937 rng(88);
  std::set<int> rows_seen;
  for (int it = 0; it < 300; ++it) {
    int id = 0;
    const auto tree = random_tree(rng, id, 1 + static_cast<int>(rng() % 10));
    ASSERT_LE(tree.size(), 10u);
    const auto cp = compile(tree);
    EXPECT_FALSE(has_errors(validate_problem(cp.problem)));
    for (const auto &r : cp.problem.rules) {
      EXPECT_TRUE(is_eager_rule(r).eager) << r.name;
      if (!r.trigger)
        continue;
      const auto row = allen_row_of(r);
      ASSERT_TRUE(row) << r.name;
      EXPECT_TRUE(*row == 8 || *row == 10 || *row == 11 || *row == 19) << r.name;
      rows_seen.insert(*row);
    }
  }
  EXPECT_EQ(rows_seen, (std::set<int>{8, 10, 11, 19}));
}

TEST(BpmnSolve, FlowOfTwoTasksSolves) {
  const auto cp = compile(SeseBlock::flow("f", SeseBlock::task("t"), SeseBlock::task("u")));
  const auto r = find_solution(cp.problem);
  ASSERT_EQ(r.status, SolveStatus::solution);
  EXPECT_EQ(r.word->size(), 2u);
  EXPECT_TRUE(verify_solution(cp.problem, *r.plan).solution);
  EXPECT_TRUE(reference_solution(cp.problem, *r.plan));
}
