#pragma once

// The DFA accepting exactly the words that encode plans over a signature.

#include "word.hpp"

#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace eagertl {

struct PlanState {
  enum class Kind : std::uint8_t { init, snapshot, sink };
  Kind kind = Kind::init;
  /// Per variable (previous value, current value). After the initial symbol
  /// both slots hold the started value.
  std::vector<std::pair<int, int>> snap;

  static PlanState init() { return {}; }
  static PlanState sink() { return {Kind::sink, {}}; }

  bool is_sink() const { return kind == Kind::sink; }
  bool is_init() const { return kind == Kind::init; }

  friend auto operator<=>(const PlanState &, const PlanState &) = default;
};

inline bool compatible(const Signature &sig, const PlanState &q, const Symbol &s) {
  if (q.is_sink() || s.size() != sig.num_vars())
    return false;
  if (q.is_init()) {
    if (!is_initial_symbol(s))
      return false;
    for (std::size_t x = 0; x < s.size(); ++x) {
      const int v = s[x].started;
      if (v < 0 || static_cast<std::size_t>(v) >= sig.num_values() ||
          !sig.in_domain[x][v])
        return false;
    }
    return true;
  }
  if (!is_noninitial_symbol(s))
    return false;
  for (std::size_t x = 0; x < s.size(); ++x) {
    const auto &e = s[x];
    if (!e.changed)
      continue;
    const int cur = q.snap[x].second;
    if (e.ended != cur)
      return false;
    if (e.started < 0 || static_cast<std::size_t>(e.started) >= sig.num_values() ||
        !sig.in_domain[x][e.started] || !sig.allows(x, cur, e.started))
      return false;
  }
  return true;
}

inline PlanState step(const Signature &sig, const PlanState &q, const Symbol &s) {
  if (!compatible(sig, q, s))
    return PlanState::sink();
  PlanState out{PlanState::Kind::snapshot, {}};
  if (q.is_init()) {
    for (const auto &e : s)
      out.snap.emplace_back(e.started, e.started);
    return out;
  }
  out.snap = q.snap;
  for (std::size_t x = 0; x < s.size(); ++x)
    if (s[x].changed)
      out.snap[x] = {s[x].ended, s[x].started};
  return out;
}

inline PlanState run(const Signature &sig, const Word &w) {
  PlanState q = PlanState::init();
  for (const auto &s : w)
    q = step(sig, q, s);
  return q;
}

inline bool accepts(const Signature &sig, const Word &w) {
  return !run(sig, w).is_sink();
}

/// Bound on reachable states: |V|^|SV| + (|V|^2+1)^|SV| + 2.
inline std::uint64_t plan_state_bound(const Signature &sig) {
  const auto a = alphabet_size(sig);
  return a > std::numeric_limits<std::uint64_t>::max() - 2 ? a : a + 2;
}

/// Compatible symbols of `q` in canonical order: variables by name, and per
/// variable "unchanged" first, then changes by value declaration order.
template <class F>
void for_each_compatible_symbol(const Signature &sig, const PlanState &q, F &&f) {
  if (q.is_sink())
    return;
  const std::size_t n = sig.num_vars();
  std::vector<std::vector<Entry>> opts(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (q.is_init()) {
      for (int v : sig.domain[x])
        opts[x].push_back(Entry::initial(v));
    } else {
      opts[x].push_back(Entry::unchanged());
      const int cur = q.snap[x].second;
      for (int v : sig.domain[x])
        if (sig.allows(x, cur, v))
          opts[x].push_back(Entry::change(cur, v));
    }
    if (opts[x].empty())
      return;
  }
  std::vector<std::size_t> idx(n, 0);
  Symbol s(n);
  while (true) {
    for (std::size_t x = 0; x < n; ++x)
      s[x] = opts[x][idx[x]];
    if constexpr (std::is_same_v<decltype(f(s)), bool>) {
      if (!f(s))
        return;
    } else {
      f(s);
    }
    std::size_t k = n;
    for (; k > 0; --k) {
      if (++idx[k - 1] < opts[k - 1].size())
        break;
      idx[k - 1] = 0;
    }
    if (k == 0)
      return;
  }
}

/// Lazily interned reachable fragment.
class PlanAutomaton {
public:
  explicit PlanAutomaton(Signature sig) : sig_(std::move(sig)) {
    intern(PlanState::init());
    intern(PlanState::sink());
  }

  const Signature &signature() const { return sig_; }
  int initial() const { return 0; }
  int sink_id() const { return 1; }
  const PlanState &state(int id) const { return states_.at(id); }
  std::size_t size() const { return states_.size(); }

  int intern(const PlanState &q) {
    auto [it, fresh] = ids_.emplace(q, static_cast<int>(states_.size()));
    if (fresh)
      states_.push_back(q);
    return it->second;
  }

  int step(int q, const Symbol &s) { return intern(eagertl::step(sig_, states_.at(q), s)); }

  /// Interns every state reachable from the initial one.
  std::size_t explore_all() {
    std::vector<int> stack{initial()};
    std::set<int> seen{initial()};
    while (!stack.empty()) {
      const int q = stack.back();
      stack.pop_back();
      const PlanState cur = states_[q];
      for_each_compatible_symbol(sig_, cur, [&](const Symbol &s) {
        const int r = step(q, s);
        if (seen.insert(r).second)
          stack.push_back(r);
      });
    }
    // the sink is reachable through any incompatible symbol
    return seen.size() + 1;
  }

  std::string state_label(int id) const {
    const auto &q = states_.at(id);
    if (q.is_init())
      return "init";
    if (q.is_sink())
      return "sink";
    std::string out;
    for (std::size_t x = 0; x < q.snap.size(); ++x) {
      if (x)
        out += ", ";
      out += sig_.vars[x].name + "=(" + sig_.values[q.snap[x].first] + "," +
             sig_.values[q.snap[x].second] + ")";
    }
    return out;
  }

  /// DOT rendering of the reachable fragment.
  std::string to_dot(bool show_sink = false) {
    explore_all();
    std::ostringstream os;
    os << "digraph plan_automaton {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (!show_sink && static_cast<int>(i) == sink_id())
        continue;
      os << "  q" << i << " [label=\"" << state_label(static_cast<int>(i))
         << "\"" << (static_cast<int>(i) == sink_id() ? "" : ", peripheries=2")
         << "];\n";
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (static_cast<int>(i) == sink_id())
        continue;
      const PlanState q = states_[i];
      for_each_compatible_symbol(sig_, q, [&](const Symbol &s) {
        const int r = step(static_cast<int>(i), s);
        os << "  q" << i << " -> q" << r << " [label=\""
           << symbol_text(sig_, s) << "\"];\n";
      });
    }
    os << "}\n";
    return os.str();
  }

private:
  Signature sig_;
  std::vector<PlanState> states_;
  std::map<PlanState, int> ids_;
};

} // namespace eagertl
