#pragma once

// Alphabet symbols, words, events and the word <-> plan correspondence.

#include "model.hpp"

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace eagertl {

/// Variables of a problem in canonical order (sorted by name) together with
/// a global numbering of the value union V.
struct Signature {
  std::vector<StateVariable> vars;
  std::vector<std::string> values;           // V, first-seen order
  std::vector<std::vector<int>> domain;      // per var, declaration order
  std::vector<std::vector<char>> in_domain;  // per var, indexed by value id
  std::vector<std::vector<std::vector<char>>> trans; // per var [from][to]

  Signature() = default;

  explicit Signature(std::vector<StateVariable> vs) : vars(std::move(vs)) {
    std::sort(vars.begin(), vars.end(),
              [](const auto &a, const auto &b) { return a.name < b.name; });
    for (const auto &x : vars)
      for (const auto &v : x.values)
        if (value_id(v) < 0)
          values.push_back(v);
    const std::size_t nv = values.size();
    for (const auto &x : vars) {
      std::vector<int> dom;
      std::vector<char> in(nv, 0);
      for (const auto &v : x.values) {
        dom.push_back(value_id(v));
        in[value_id(v)] = 1;
      }
      std::vector<std::vector<char>> tr(nv, std::vector<char>(nv, 0));
      for (const auto &[from, tos] : x.trans) {
        const int f = value_id(from);
        if (f < 0)
          continue;
        for (const auto &to : tos) {
          const int t = value_id(to);
          if (t >= 0 && in[t])
            tr[f][t] = 1;
        }
      }
      domain.push_back(std::move(dom));
      in_domain.push_back(std::move(in));
      trans.push_back(std::move(tr));
    }
  }

  explicit Signature(const PlanningProblem &p) : Signature(p.vars) {}

  int var_id(const std::string &name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name)
        return static_cast<int>(i);
    return -1;
  }
  int value_id(const std::string &v) const {
    auto it = std::find(values.begin(), values.end(), v);
    return it == values.end() ? -1 : static_cast<int>(it - values.begin());
  }
  std::size_t num_vars() const { return vars.size(); }
  std::size_t num_values() const { return values.size(); }
  bool allows(std::size_t x, int from, int to) const {
    return from >= 0 && to >= 0 && trans[x][from][to];
  }
};

// ----------------------------------------------------------------------------
// Symbols and words
// ----------------------------------------------------------------------------

/// One variable's component of a symbol: unchanged, or (ended, started) with
/// `ended == -1` for the initial form (-, v).
struct Entry {
  bool changed = false;
  int ended = -1;
  int started = -1;

  static Entry unchanged() { return {}; }
  static Entry initial(int v) { return {true, -1, v}; }
  static Entry change(int from, int to) { return {true, from, to}; }

  bool is_initial_form() const { return changed && ended < 0; }

  friend auto operator<=>(const Entry &, const Entry &) = default;
};

using Symbol = std::vector<Entry>;
using Word = std::vector<Symbol>;

inline bool is_initial_symbol(const Symbol &s) {
  return std::all_of(s.begin(), s.end(),
                     [](const Entry &e) { return e.is_initial_form(); });
}

inline bool is_noninitial_symbol(const Symbol &s) {
  return std::none_of(s.begin(), s.end(),
                      [](const Entry &e) { return e.is_initial_form(); });
}

/// Empty, or one initial symbol followed by non-initial ones.
inline bool legal_shape(const Word &w) {
  if (w.empty())
    return true;
  if (!is_initial_symbol(w[0]))
    return false;
  return std::all_of(w.begin() + 1, w.end(), is_noninitial_symbol);
}

struct Event {
  int var = 0;
  bool is_end = false;
  int value = 0;

  friend auto operator<=>(const Event &, const Event &) = default;
};

using EventSet = std::vector<Event>; // sorted, unique

inline EventSet events(const Symbol &s) {
  EventSet out;
  for (std::size_t x = 0; x < s.size(); ++x) {
    const auto &e = s[x];
    if (!e.changed)
      continue;
    if (e.ended >= 0)
      out.push_back({static_cast<int>(x), true, e.ended});
    out.push_back({static_cast<int>(x), false, e.started});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool contains(const EventSet &es, const Event &e) {
  return std::binary_search(es.begin(), es.end(), e);
}

/// start(x0, v0) for the trigger of `r`, if the signature knows it.
inline std::optional<Event> trigger_event(const Signature &sig,
                                          const SynchronizationRule &r) {
  if (!r.trigger)
    return std::nullopt;
  const int x = sig.var_id(r.trigger->var);
  const int v = sig.value_id(r.trigger->value);
  if (x < 0 || v < 0)
    return std::nullopt;
  return Event{x, false, v};
}

inline bool triggers(const Signature &sig, const Symbol &s,
                     const SynchronizationRule &r) {
  const auto ev = trigger_event(sig, r);
  return ev && contains(events(s), *ev);
}

// ----------------------------------------------------------------------------
// Encoding
// ----------------------------------------------------------------------------

/// Whether the word weakly encodes a plan: legal shape and, per variable,
/// each change ends the value the previous change started.
inline bool weakly_encodes(const Word &w) {
  if (!legal_shape(w))
    return false;
  if (w.empty())
    return true;
  const std::size_t n = w[0].size();
  for (std::size_t x = 0; x < n; ++x) {
    int cur = w[0][x].started;
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (w[i].size() != n)
        return false;
      const auto &e = w[i][x];
      if (!e.changed)
        continue;
      if (e.ended != cur)
        return false;
      cur = e.started;
    }
  }
  return true;
}

/// Induced plan, or nothing when the word does not weakly encode a plan.
inline std::optional<Plan> decode(const Signature &sig, const Word &w) {
  if (!weakly_encodes(w))
    return std::nullopt;
  Plan plan;
  plan.horizon = w.size();
  for (std::size_t x = 0; x < sig.num_vars(); ++x) {
    Timeline tl{sig.vars[x].name, {}};
    if (!w.empty()) {
      if (w[0].size() != sig.num_vars())
        return std::nullopt;
      std::size_t since = 0;
      int cur = w[0][x].started;
      for (std::size_t i = 1; i <= w.size(); ++i) {
        if (i < w.size() && !w[i][x].changed)
          continue;
        if (cur < 0 || static_cast<std::size_t>(cur) >= sig.num_values())
          return std::nullopt;
        tl.tokens.push_back({tl.var, sig.values[cur], i - since});
        since = i;
        if (i < w.size())
          cur = w[i][x].started;
      }
    }
    plan.timelines.emplace(tl.var, std::move(tl));
  }
  return plan;
}

inline Word encode(const Signature &sig, const Plan &plan) {
  Word w(plan.horizon, Symbol(sig.num_vars()));
  for (std::size_t x = 0; x < sig.num_vars(); ++x) {
    const auto &tl = plan.timeline(sig.vars[x].name);
    if (tl.horizon() != plan.horizon)
      throw error("timeline '" + tl.var + "' does not span the plan horizon");
    std::uint64_t t = 0;
    int prev = -1;
    for (const auto &tok : tl.tokens) {
      const int v = sig.value_id(tok.value);
      if (v < 0)
        throw error("value '" + tok.value + "' is not in the signature");
      if (tok.duration == 0)
        throw error("token of zero duration on '" + tl.var + "'");
      w[t][x] = Entry{true, prev, v};
      prev = v;
      t += tok.duration;
    }
  }
  return w;
}

/// |V|^|SV| + (|V|^2 + 1)^|SV|, saturating at the largest uint64.
inline std::uint64_t alphabet_size(std::size_t num_vars, std::size_t num_values) {
  constexpr auto top = std::numeric_limits<std::uint64_t>::max();
  auto pow_sat = [&](std::uint64_t base, std::size_t e) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < e; ++i) {
      if (base != 0 && r > top / base)
        return top;
      r *= base;
    }
    return r;
  };
  const std::uint64_t v = num_values;
  const auto a = pow_sat(v, num_vars);
  const auto b = pow_sat(v * v + 1, num_vars);
  return a > top - b ? top : a + b;
}

inline std::uint64_t alphabet_size(const Signature &sig) {
  return alphabet_size(sig.num_vars(), sig.num_values());
}

// ----------------------------------------------------------------------------
// Text form
// ----------------------------------------------------------------------------
//
//   word   := symbol*            (one symbol per line, '#' starts a comment)
//   symbol := entry*             (whitespace separated; omitted vars are '.')
//   entry  := var ':' ( '.' | '-' '>' value | value '>' value )
//
// A space is tolerated between '-' and '>'.

inline std::string entry_text(const Signature &sig, const Entry &e) {
  if (!e.changed)
    return ".";
  const std::string to = e.started >= 0 ? sig.values[e.started] : "?";
  if (e.ended < 0)
    return "->" + to;
  return sig.values[e.ended] + ">" + to;
}

inline std::string symbol_text(const Signature &sig, const Symbol &s) {
  std::string out;
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (x)
      out += ' ';
    out += sig.vars[x].name + ":" + entry_text(sig, s[x]);
  }
  return out;
}

inline std::string word_text(const Signature &sig, const Word &w) {
  std::string out;
  for (const auto &s : w)
    out += symbol_text(sig, s) + "\n";
  return out;
}

inline Symbol parse_symbol(const Signature &sig, const std::string &line) {
  Symbol s(sig.num_vars());
  std::string text = line;
  // glue "- >" into "->"
  for (std::size_t p; (p = text.find("- >")) != std::string::npos;)
    text.erase(p + 1, 1);
  std::istringstream is(text);
  std::string item;
  while (is >> item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw error("symbol entry '" + item + "' lacks ':'");
    const int x = sig.var_id(item.substr(0, colon));
    if (x < 0)
      throw error("unknown variable in '" + item + "'");
    const std::string rest = item.substr(colon + 1);
    if (rest == ".") {
      s[x] = Entry::unchanged();
      continue;
    }
    const auto gt = rest.find('>');
    if (gt == std::string::npos)
      throw error("malformed entry '" + item + "'");
    const std::string from = rest.substr(0, gt), to = rest.substr(gt + 1);
    const int t = sig.value_id(to);
    if (t < 0)
      throw error("unknown value '" + to + "'");
    if (from == "-") {
      s[x] = Entry::initial(t);
    } else {
      const int f = sig.value_id(from);
      if (f < 0)
        throw error("unknown value '" + from + "'");
      s[x] = Entry::change(f, t);
    }
  }
  return s;
}

inline Word parse_word(const Signature &sig, const std::string &text) {
  Word w;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); }))
      continue;
    w.push_back(parse_symbol(sig, line));
  }
  return w;
}

} // namespace eagertl
