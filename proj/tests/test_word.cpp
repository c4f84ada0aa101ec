#include "support.hpp"

#include <gtest/gtest.h>

using namespace eagertl;
using namespace testing_support;

namespace {

PlanningProblem xy() {
  PlanningProblem p;
  p.vars = {StateVariable::free("x", {"v", "w"}), StateVariable::free("y", {"u", "v"})};
  return p;
}

/// Random word of legal shape whose entries draw from all of V.
Word random_shaped_word(std::mt19937 &rng, const Signature &sig, std::size_t len) {
  const int nv = static_cast<int>(sig.num_values());
  Word w;
  for (std::size_t i = 0; i < len; ++i) {
    Symbol s(sig.num_vars());
    for (auto &e : s) {
      if (i == 0)
        e = Entry::initial(static_cast<int>(rng() % nv));
      else if (rng() % 2)
        e = Entry::unchanged();
      else
        e = Entry::change(static_cast<int>(rng() % nv), static_cast<int>(rng() % nv));
    }
    w.push_back(s);
  }
  return w;
}

/// Index-by-index reading: with i_0 < i_1 < ... the positions where x
/// changes, the value ending at i_h is the one started at i_{h-1}.
bool reference_weak(const Word &w) {
  if (w.empty())
    return true;
  for (std::size_t x = 0; x < w[0].size(); ++x) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i][x].changed)
        idx.push_back(i);
    if (idx.empty() || idx[0] != 0)
      return false;
    for (std::size_t h = 1; h < idx.size(); ++h)
      if (w[idx[h]][x].ended != w[idx[h - 1]][x].started)
        return false;
  }
  return true;
}

} // namespace

TEST(Events, ChangeAndUnchanged) {
  const Signature sig(xy());
  const int x = sig.var_id("x"), v = sig.value_id("v"), w = sig.value_id("w");
  Symbol s(2);
  s[x] = Entry::change(v, w);
  const auto ev = events(s);
  EXPECT_EQ(ev, (EventSet{{x, false, w}, {x, true, v}}));
  EXPECT_TRUE(contains(ev, {x, true, v}));
  EXPECT_TRUE(events(Symbol(2)).empty());
  Symbol init{Entry::initial(v), Entry::initial(sig.value_id("u"))};
  const auto iev = events(init);
  ASSERT_EQ(iev.size(), 2u);
  for (const auto &e : iev)
    EXPECT_FALSE(e.is_end);
}

TEST(Triggers, StartOfTriggerValue) {
  auto p = xy();
  SynchronizationRule r;
  r.name = "r";
  r.trigger = Quantifier{"a0", "x", "w"};
  r.disjuncts.push_back({{}, {Atom::le(Term::start("a0"), Term::end("a0"))}});
  const Signature sig(p);
  const int x = sig.var_id("x");
  Symbol s(2);
  s[x] = Entry::change(sig.value_id("v"), sig.value_id("w"));
  EXPECT_TRUE(triggers(sig, s, r));
  s[x] = Entry::change(sig.value_id("w"), sig.value_id("v"));
  EXPECT_FALSE(triggers(sig, s, r));
  SynchronizationRule free_rule = r;
  free_rule.trigger.reset();
  EXPECT_FALSE(triggers(sig, s, free_rule));
}

TEST(Decode, LengthFourExample) {
  PlanningProblem p;
  p.vars = {StateVariable::free("x", {"v", "w"})};
  const Signature sig(p);
  const int v = sig.value_id("v"), w = sig.value_id("w");
  const Word word = {{Entry::initial(v)}, {Entry::unchanged()}, {Entry::unchanged()},
                     {Entry::change(v, w)}};
  const auto plan = decode(sig, word);
  ASSERT_TRUE(plan);
  EXPECT_EQ(plan->horizon, 4u);
  EXPECT_EQ(plan->timeline("x").tokens,
            (std::vector<Token>{{"x", "v", 3}, {"x", "w", 1}}));
}

TEST(Decode, MismatchedEndedValueIsRejected) {
  PlanningProblem p;
  p.vars = {StateVariable::free("x", {"v", "w"})};
  const Signature sig(p);
  const int v = sig.value_id("v"), w = sig.value_id("w");
  const Word word = {{Entry::initial(v)}, {Entry::change(w, v)}};
  EXPECT_FALSE(weakly_encodes(word));
  EXPECT_FALSE(decode(sig, word));
}

TEST(Decode, EmptyWordIsEmptyPlan) {
  const Signature sig(xy());
  const auto plan = decode(sig, {});
  ASSERT_TRUE(plan);
  EXPECT_EQ(plan->horizon, 0u);
  for (const auto &[_, tl] : plan->timelines)
    EXPECT_TRUE(tl.tokens.empty());
}

TEST(Encode, SingleTokenAndEmptyPlan) {
  PlanningProblem p;
  p.vars = {StateVariable::free("x", {"v"})};
  const Signature sig(p);
  const auto w = encode(sig, make_plan({{"x", {{"v", 2}}}}));
  EXPECT_EQ(w, (Word{{Entry::initial(sig.value_id("v"))}, {Entry::unchanged()}}));
  Plan empty;
  empty.timelines.emplace("x", Timeline{"x", {}});
  EXPECT_TRUE(encode(sig, empty).empty());
}

TEST(Encode, AsynchronousChangesArePadded) {
  const auto p = xy();
  const Signature sig(p);
  const auto plan = make_plan({{"x", {{"v", 1}, {"w", 2}}}, {"y", {{"u", 2}, {"v", 1}}}});
  const auto w = encode(sig, plan);
  ASSERT_EQ(w.size(), 3u);
  const int x = sig.var_id("x"), y = sig.var_id("y");
  EXPECT_TRUE(w[1][x].changed);
  EXPECT_FALSE(w[1][y].changed);
  EXPECT_FALSE(w[2][x].changed);
  EXPECT_TRUE(w[2][y].changed);
  EXPECT_EQ(decode(sig, w), plan);
}

TEST(AlphabetSize, Formula) {
  EXPECT_EQ(alphabet_size(2, 2), 29u);
  EXPECT_EQ(alphabet_size(1, 1), 3u);
  EXPECT_EQ(alphabet_size(0, 5), 2u);
  EXPECT_EQ(alphabet_size(40, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(WordProperty, RoundTrip) {
  std::mt19937 rng(31);
  PlanningProblem p;
  p.vars = {StateVariable::free("x", {"a", "b", "c"}),
            StateVariable::free("y", {"a", "d"}),
            StateVariable{"z", {"e", "f"}, {{"e", {"f"}}, {"f", {"e"}}}}};
  const Signature sig(p);
  for (int it = 0; it < 1000; ++it) {
    const auto plan = random_plan(rng, p, 5);
    const auto w = encode(sig, plan);
    EXPECT_EQ(w.size(), plan.horizon);
    EXPECT_TRUE(weakly_encodes(w));
    EXPECT_EQ(decode(sig, w), plan);
  }
}

TEST(WordProperty, WeakEncodingMatchesIndexReading) {
  std::mt19937 rng(8);
  const Signature sig(xy());
  int positive = 0;
  for (int it = 0; it < 5000; ++it) {
    const auto w = random_shaped_word(rng, sig, 1 + rng() % 6);
    const bool weak = weakly_encodes(w);
    EXPECT_EQ(weak, reference_weak(w));
    EXPECT_EQ(decode(sig, w).has_value(), weak);
    positive += weak;
  }
  EXPECT_GT(positive, 100);
}

TEST(WordProperty, EndEventsMarkTokenEnds) {
  std::mt19937 rng(4);
  const auto p = xy();
  const Signature sig(p);
  for (int it = 0; it < 500; ++it) {
    const auto plan = random_plan(rng, p, 6);
    const auto w = encode(sig, plan);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto ev = events(w[i]);
      for (std::size_t x = 0; x < sig.num_vars(); ++x)
        for (int v = 0; v < static_cast<int>(sig.num_values()); ++v) {
          bool ends_here = false;
          const auto &tl = plan.timeline(sig.vars[x].name);
          for (std::size_t k = 0; k < tl.tokens.size(); ++k)
            ends_here |= tl.end_time(k) == i && sig.value_id(tl.tokens[k].value) == v;
          EXPECT_EQ(contains(ev, {static_cast<int>(x), true, v}), ends_here);
        }
    }
  }
}

TEST(WordText, PrintParseRoundTrip) {
  std::mt19937 rng(10);
  const auto p = xy();
  const Signature sig(p);
  for (int it = 0; it < 200; ++it) {
    const auto w = encode(sig, random_plan(rng, p, 6));
    EXPECT_EQ(parse_word(sig, word_text(sig, w)), w);
  }
  const auto w = parse_word(sig, "x:- >v y:->u  # first\n\nx:v>w\n");
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[1][sig.var_id("y")], Entry::unchanged());
  EXPECT_THROW(parse_word(sig, "q:->v\n"), error);
  EXPECT_THROW(parse_word(sig, "x:v\n"), error);
}
