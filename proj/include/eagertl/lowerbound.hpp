#pragma once

// The non-eager family P_n, the words W_n and their one-letter extensions,
// and a Myhill-Nerode style count of pairwise distinguished words.

#include "model.hpp"
#include "oracle.hpp"
#include "word.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace eagertl {

using IndexSet = std::set<int>; // subset of {1..n}

struct PnInstance {
  int n = 0;
  PlanningProblem problem;
  Signature sig;
};

namespace pn {
inline std::string var(int j) { return "x" + std::to_string(j); }
inline std::string v(int j) { return "v" + std::to_string(j); }
inline std::string vp(int j) { return "v" + std::to_string(j) + "p"; }
inline std::string vbar(int j) { return "v" + std::to_string(j) + "bar"; }
} // namespace pn

inline PnInstance build_pn(int n) {
  if (n < 1 || n > 9)
    throw error("P_n is provided for 1 <= n <= 9");
  PnInstance inst;
  inst.n = n;
  auto &p = inst.problem;
  p.vars.push_back(StateVariable::free(pn::var(0), {pn::v(0), pn::vbar(0)}));
  for (int j = 1; j <= n; ++j)
    p.vars.push_back(
        StateVariable::free(pn::var(j), {pn::v(j), pn::vp(j), pn::vbar(j)}));

  SynchronizationRule r;
  r.name = "pn";
  r.trigger = Quantifier{"a0", pn::var(0), pn::v(0)};
  for (int j = 1; j <= n; ++j) {
    const std::string a = "a" + std::to_string(j), ap = a + "p";
    ExistentialStatement e;
    e.quantifiers = {{a, pn::var(j), pn::v(j)}, {ap, pn::var(j), pn::vp(j)}};
    e.clause = {Atom::le(Term::start("a0"), Term::start(a)),
                Atom::le(Term::start(a), Term::end("a0")),
                Atom::le(Term::end("a0"), Term::start(ap))};
    r.disjuncts.push_back(std::move(e));
  }
  p.rules.push_back(std::move(r));
  inst.sig = Signature(p);
  return inst;
}

/// A word of W_n given by its sequence mu_1 ... mu_{h/2}. The empty
/// sequence stands for the one-letter word of all barred values.
struct WnSpec {
  int n = 0;
  std::vector<IndexSet> mus;
};

/// Element of Lambda given by the set of j with sigma(x_j) = v'_j.
struct LambdaExt {
  int n = 0;
  IndexSet mu;
};

inline Word wn_word(const PnInstance &inst, const WnSpec &spec) {
  const auto &sig = inst.sig;
  const int n = inst.n;
  const std::size_t h = 2 * spec.mus.size();
  Word w(h + 1, Symbol(sig.num_vars()));
  auto id = [&](const std::string &v) { return sig.value_id(v); };
  auto vx = [&](int j) { return sig.var_id(pn::var(j)); };

  if (h == 0) {
    w[0][vx(0)] = Entry::initial(id(pn::vbar(0)));
    for (int j = 1; j <= n; ++j)
      w[0][vx(j)] = Entry::initial(id(pn::vbar(j)));
    return w;
  }
  const int v0 = id(pn::v(0)), v0bar = id(pn::vbar(0));
  w[0][vx(0)] = Entry::initial(v0);
  for (std::size_t i = 2; i + 2 <= h; i += 2)
    w[i][vx(0)] = Entry::change(v0, v0);
  w[h][vx(0)] = Entry::change(v0, v0bar);

  for (int j = 1; j <= n; ++j) {
    int prev = id(pn::vbar(j));
    w[0][vx(j)] = Entry::initial(prev);
    for (std::size_t i = 1; i <= h; i += 2) {
      const auto &mu = spec.mus[(i + 1) / 2 - 1];
      const int now = mu.count(j) ? id(pn::v(j)) : id(pn::vbar(j));
      w[i][vx(j)] = Entry::change(prev, now);
      prev = now;
    }
  }
  return w;
}

/// The letter of Lambda appended after `w`.
inline Symbol lambda_symbol(const PnInstance &inst, const Word &w,
                            const LambdaExt &ext) {
  const auto &sig = inst.sig;
  Symbol s(sig.num_vars());
  // current value of every variable at the end of w
  std::vector<int> cur(sig.num_vars(), -1);
  for (const auto &sym : w)
    for (std::size_t x = 0; x < sym.size(); ++x)
      if (sym[x].changed)
        cur[x] = sym[x].started;
  const int x0 = sig.var_id(pn::var(0));
  s[x0] = Entry::change(cur[x0], sig.value_id(pn::vbar(0)));
  for (int j = 1; j <= inst.n; ++j) {
    const int x = sig.var_id(pn::var(j));
    const int to = ext.mu.count(j) ? sig.value_id(pn::vp(j))
                                   : sig.value_id(pn::vbar(j));
    s[x] = Entry::change(cur[x], to);
  }
  return s;
}

/// Closed form: every mu_i meets mu.
inline bool closed_form(const WnSpec &spec, const LambdaExt &ext) {
  for (const auto &m : spec.mus) {
    bool meet = false;
    for (int j : m)
      meet |= ext.mu.count(j) > 0;
    if (!meet)
      return false;
  }
  return true;
}

/// Letter reading: at every odd position some x_j
/// starts v_j and the extension starts v'_j on the same variable.
inline bool letter_form(const PnInstance &inst, const Word &w, const Symbol &s) {
  const auto &sig = inst.sig;
  for (std::size_t i = 1; i < w.size(); i += 2) {
    bool some = false;
    for (int j = 1; j <= inst.n; ++j) {
      const int x = sig.var_id(pn::var(j));
      some |= w[i][x].changed && w[i][x].started == sig.value_id(pn::v(j)) &&
              s[x].started == sig.value_id(pn::vp(j));
    }
    if (!some)
      return false;
  }
  return true;
}

struct ExtensionCheck {
  bool oracle = false;
  bool closed = false;
  bool letters = false;
};

/// Decodes w_spec . sigma_ext and runs the oracle; throws when the oracle
/// and the two closed forms disagree.
inline ExtensionCheck extend_and_check(const PnInstance &inst, const WnSpec &spec,
                                       const LambdaExt &ext) {
  Word w = wn_word(inst, spec);
  const Symbol s = lambda_symbol(inst, w, ext);
  ExtensionCheck c;
  c.letters = letter_form(inst, w, s);
  w.push_back(s);
  const auto plan = decode(inst.sig, w);
  if (!plan)
    throw error("Lambda extension does not encode a plan");
  c.oracle = verify_solution(inst.problem, *plan).solution;
  c.closed = closed_form(spec, ext);
  if (c.oracle != c.closed || c.oracle != c.letters)
    throw error("oracle and closed form disagree on a Lambda extension");
  return c;
}

/// Subsets of {1..n} with exactly k elements, in lexicographic order.
inline std::vector<IndexSet> k_subsets(int n, int k) {
  std::vector<IndexSet> out;
  std::vector<int> pick;
  auto rec = [&](auto &&self, int from) -> void {
    if (static_cast<int>(pick.size()) == k) {
      out.emplace_back(pick.begin(), pick.end());
      return;
    }
    for (int j = from; j <= n; ++j) {
      pick.push_back(j);
      self(self, j + 1);
      pick.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

struct DistinguisherWitness {
  std::size_t first, second; // indices of the representatives
  IndexSet mu;                // distinguishing extension
  bool first_accepts = false; // which side becomes a solution
};

struct LowerBoundReport {
  int n = 0;
  std::uint64_t classes = 0;
  std::uint64_t pairs = 0;
  std::uint64_t verified_pairs = 0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t disagreements = 0;
  std::vector<WnSpec> representatives;
  std::vector<DistinguisherWitness> witnesses;
  double wall_ms = 0;
};

inline std::string to_string(const IndexSet &s) {
  std::string out = "{";
  for (int j : s)
    out += (out.size() > 1 ? "," : "") + std::to_string(j);
  return out + "}";
}

/// One representative per set of floor(n/2)-subsets, each pair separated by
/// the extension built from elements of mu' \ mu, every claim confirmed by
/// the oracle.
inline LowerBoundReport count_distinguished(int n) {
  const auto t0 = std::chrono::steady_clock::now();
  if (n < 1 || n > 5)
    throw error("count_distinguished supports 1 <= n <= 5");
  const auto inst = build_pn(n);
  const auto family = k_subsets(n, n / 2);
  const std::size_t c = family.size();
  LowerBoundReport rep;
  rep.n = n;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << c); ++mask) {
    WnSpec s{n, {}};
    for (std::size_t i = 0; i < c; ++i)
      if ((mask >> i) & 1u)
        s.mus.push_back(family[i]);
    rep.representatives.push_back(std::move(s));
  }
  const auto &reps = rep.representatives;

  auto check = [&](const WnSpec &spec, const IndexSet &mu) {
    ++rep.oracle_calls;
    try {
      return extend_and_check(inst, spec, {n, mu}).oracle;
    } catch (const error &) {
      ++rep.disagreements;
      throw;
    }
  };
  auto missing = [](const WnSpec &a, const WnSpec &b) {
    // some mu of a that b lacks
    for (const auto &m : a.mus)
      if (std::find(b.mus.begin(), b.mus.end(), m) == b.mus.end())
        return std::optional<IndexSet>(m);
    return std::optional<IndexSet>();
  };
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      ++rep.pairs;
      const WnSpec *a = &reps[i], *b = &reps[j];
      auto mu = missing(*a, *b);
      bool swapped = false;
      if (!mu) {
        mu = missing(*b, *a);
        std::swap(a, b);
        swapped = true;
      }
      if (!mu)
        continue; // identical supports cannot happen for distinct masks
      // a has mu, b does not: pick e in mu' \ mu for every mu' in b
      IndexSet ext;
      for (const auto &m : b->mus)
        for (int e : m)
          if (!mu->count(e)) {
            ext.insert(e);
            break;
          }
      const bool acc_a = check(*a, ext), acc_b = check(*b, ext);
      if (!acc_a && acc_b) {
        ++rep.verified_pairs;
        rep.witnesses.push_back({i, j, ext, swapped});
      }
    }
  // classes are certified when every pair is separated
  rep.classes = rep.verified_pairs == rep.pairs ? reps.size() : 0;
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

inline std::string lowerbound_csv(const std::vector<LowerBoundReport> &reps,
                                  bool timing) {
  std::ostringstream os;
  os << "n,classes,two_pow_n,pairs,verified_pairs,oracle_calls";
  if (timing)
    os << ",runtime_ms";
  os << '\n';
  for (const auto &r : reps) {
    os << r.n << ',' << r.classes << ',' << (std::uint64_t{1} << r.n) << ','
       << r.pairs << ',' << r.verified_pairs << ',' << r.oracle_calls;
    if (timing)
      os << ',' << r.wall_ms;
    os << '\n';
  }
  return os.str();
}

} // namespace eagertl
