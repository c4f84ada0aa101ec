#pragma once

// Textual problem format, version 1.
//
//   file      := [ 'version' INT ';' ] ( var | rule )*
//   var       := 'var' ID '{' 'values' ID ( ',' ID )* ';' ( trans | 'free' ';' )* '}'
//   trans     := 'trans' ID '->' '{' [ ID ( ',' ID )* ] '}' ';'
//   rule      := 'rule' NAME ':' head '=>' body ';'
//   head      := 'true' | ID '[' ID '=' ID ']'
//   body      := stmt ( '|' stmt )*
//   stmt      := 'exists' quant ( ','? quant )* '.' clause | clause
//   quant     := ID '[' ID '=' ID ']'
//   clause    := 'true' | '(' clause ')' | atom ( '&' atom )*
//   atom      := term ( '<=' | '<' | '=' ) [ '[' INT ',' ( INT | 'inf' ) ']' ] term
//   term      := ( 'start' | 'end' ) '(' ID ')' | INT
//
// ID is [A-Za-z_][A-Za-z0-9_']*; NAME additionally admits '.', '-', '/'.
// '#' starts a comment running to the end of the line. A variable without
// any 'trans' or 'free' line admits no succession at all. Integer terms and
// bounded atoms parse but belong to the quantitative fragment, which
// validation rejects.

#include "model.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace eagertl {

inline constexpr int dsl_version = 1;

class parse_error : public error {
public:
  parse_error(std::size_t line, std::size_t col, const std::string &msg)
      : error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line), col_(col) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

private:
  std::size_t line_, col_;
};

namespace detail {

class DslParser {
public:
  explicit DslParser(const std::string &text) : s_(text) {}

  PlanningProblem parse() {
    PlanningProblem p;
    skip();
    if (peek_word("version")) {
      word();
      const auto v = integer();
      if (v != dsl_version)
        fail("unsupported format version " + std::to_string(v));
      expect(";");
    }
    while (skip(), !at_end()) {
      if (peek_word("var"))
        p.vars.push_back(var_decl());
      else if (peek_word("rule"))
        p.rules.push_back(rule_decl());
      else
        fail("expected 'var' or 'rule'");
    }
    return p;
  }

private:
  const std::string &s_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string &msg) const {
    throw parse_error(line_, col_, msg);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char cur() const { return at_end() ? '\0' : s_[pos_]; }

  void advance() {
    if (cur() == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(cur()))) {
        advance();
      } else if (cur() == '#') {
        while (!at_end() && cur() != '\n')
          advance();
      } else {
        break;
      }
    }
  }

  static bool id_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool id_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  bool peek(const std::string &lit) {
    skip();
    return s_.compare(pos_, lit.size(), lit) == 0;
  }

  bool peek_word(const std::string &w) {
    if (!peek(w))
      return false;
    const std::size_t after = pos_ + w.size();
    return after >= s_.size() || !id_char(s_[after]);
  }

  bool accept(const std::string &lit) {
    if (!peek(lit))
      return false;
    for (std::size_t i = 0; i < lit.size(); ++i)
      advance();
    return true;
  }

  void expect(const std::string &lit) {
    if (!accept(lit))
      fail("expected '" + lit + "'");
  }

  void expect_word(const std::string &w) {
    if (!peek_word(w))
      fail("expected '" + w + "'");
    word();
  }

  std::string word() {
    skip();
    if (!id_start(cur()))
      fail("expected an identifier");
    std::string out;
    while (!at_end() && id_char(cur())) {
      out += cur();
      advance();
    }
    return out;
  }

  std::string name() {
    skip();
    if (!id_start(cur()))
      fail("expected a rule name");
    std::string out;
    while (!at_end() && (id_char(cur()) || cur() == '.' || cur() == '-' ||
                         cur() == '/')) {
      out += cur();
      advance();
    }
    return out;
  }

  std::int64_t integer() {
    skip();
    bool neg = accept("-");
    if (!std::isdigit(static_cast<unsigned char>(cur())))
      fail("expected an integer");
    std::int64_t v = 0;
    while (std::isdigit(static_cast<unsigned char>(cur()))) {
      if (v > (std::int64_t{1} << 55))
        fail("integer too large");
      v = v * 10 + (cur() - '0');
      advance();
    }
    return neg ? -v : v;
  }

  std::vector<std::string> id_list(const std::string &close) {
    std::vector<std::string> out;
    if (peek(close))
      return out;
    out.push_back(word());
    while (accept(","))
      out.push_back(word());
    return out;
  }

  StateVariable var_decl() {
    expect_word("var");
    StateVariable x;
    x.name = word();
    expect("{");
    expect_word("values");
    x.values = id_list(";");
    if (x.values.empty())
      fail("a variable needs at least one value");
    expect(";");
    while (!accept("}")) {
      if (at_end())
        fail("unterminated variable declaration");
      if (peek_word("free")) {
        word();
        expect(";");
        for (const auto &v : x.values)
          x.trans[v].insert(x.values.begin(), x.values.end());
      } else if (peek_word("trans")) {
        word();
        const std::string from = word();
        expect("->");
        expect("{");
        auto tos = id_list("}");
        expect("}");
        expect(";");
        auto &set = x.trans[from];
        set.insert(tos.begin(), tos.end());
      } else {
        fail("expected 'trans', 'free' or '}'");
      }
    }
    return x;
  }

  Quantifier quant() {
    Quantifier q;
    q.token = word();
    expect("[");
    q.var = word();
    expect("=");
    q.value = word();
    expect("]");
    return q;
  }

  Term term() {
    skip();
    if (cur() == '-' || std::isdigit(static_cast<unsigned char>(cur()))) {
      Term t;
      t.constant = integer();
      return t;
    }
    Endpoint ep;
    if (peek_word("start"))
      ep = Endpoint::start;
    else if (peek_word("end"))
      ep = Endpoint::end;
    else
      fail("expected start(..), end(..) or an integer");
    word();
    expect("(");
    Term t{ep, word(), {}};
    expect(")");
    return t;
  }

  void atom(std::vector<Atom> &out) {
    const Term l = term();
    enum { le, lt, eq } op;
    if (accept("<="))
      op = le;
    else if (accept("<"))
      op = lt;
    else if (accept("="))
      op = eq;
    else
      fail("expected '<=', '<' or '='");
    std::optional<std::pair<std::int64_t, std::optional<std::int64_t>>> bounds;
    if (accept("[")) {
      const auto lo = integer();
      expect(",");
      std::optional<std::int64_t> hi;
      if (peek_word("inf"))
        word();
      else
        hi = integer();
      expect("]");
      bounds.emplace(lo, hi);
    }
    const Term r = term();
    if (op == eq) {
      if (bounds)
        fail("'=' takes no bounds");
      auto e = equal(l, r);
      out.insert(out.end(), e.begin(), e.end());
      return;
    }
    Atom a{l, r, op == lt, bounds};
    out.push_back(std::move(a));
  }

  std::vector<Atom> clause() {
    std::vector<Atom> out;
    if (peek_word("true")) {
      word();
      return out;
    }
    if (accept("(")) {
      out = clause();
      expect(")");
    } else {
      atom(out);
    }
    while (accept("&")) {
      if (accept("(")) {
        auto more = clause();
        expect(")");
        out.insert(out.end(), more.begin(), more.end());
      } else {
        atom(out);
      }
    }
    return out;
  }

  ExistentialStatement statement() {
    ExistentialStatement e;
    if (peek_word("exists")) {
      word();
      e.quantifiers.push_back(quant());
      while (true) {
        accept(",");
        skip();
        if (cur() == '.')
          break;
        e.quantifiers.push_back(quant());
      }
      expect(".");
    }
    e.clause = clause();
    return e;
  }

  SynchronizationRule rule_decl() {
    expect_word("rule");
    SynchronizationRule r;
    r.name = name();
    expect(":");
    if (peek_word("true"))
      word();
    else
      r.trigger = quant();
    expect("=>");
    r.disjuncts.push_back(statement());
    while (accept("|"))
      r.disjuncts.push_back(statement());
    expect(";");
    return r;
  }
};

inline std::string quant_text(const Quantifier &q) {
  return q.token + "[" + q.var + "=" + q.value + "]";
}

} // namespace detail

inline PlanningProblem parse_problem(const std::string &text) {
  return detail::DslParser(text).parse();
}

/// Canonical text; parse_problem(print_problem(p)) reproduces `p`.
inline std::string print_problem(const PlanningProblem &p) {
  std::ostringstream os;
  os << "version " << dsl_version << ";\n";
  for (const auto &x : p.vars) {
    os << "\nvar " << x.name << " {\n  values ";
    for (std::size_t i = 0; i < x.values.size(); ++i)
      os << (i ? ", " : "") << x.values[i];
    os << ";\n";
    const auto full = StateVariable::free(x.name, x.values).trans;
    if (!x.trans.empty() && x.trans == full) {
      os << "  free;\n";
    } else {
      for (const auto &[from, tos] : x.trans) {
        os << "  trans " << from << " -> {";
        bool first = true;
        for (const auto &to : tos) {
          os << (first ? "" : ", ") << to;
          first = false;
        }
        os << "};\n";
      }
    }
    os << "}\n";
  }
  if (!p.rules.empty())
    os << "\n";
  for (const auto &r : p.rules) {
    os << "rule " << r.name << ": "
       << (r.trigger ? detail::quant_text(*r.trigger) : std::string("true"))
       << " =>";
    for (std::size_t d = 0; d < r.disjuncts.size(); ++d) {
      const auto &e = r.disjuncts[d];
      os << (d ? "\n  | " : "\n  ");
      if (!e.quantifiers.empty()) {
        os << "exists";
        for (const auto &q : e.quantifiers)
          os << " " << detail::quant_text(q);
        os << ". ";
      }
      if (e.clause.empty()) {
        os << "true";
        continue;
      }
      const auto &c = e.clause;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i)
          os << " & ";
        const bool pair = i + 1 < c.size() && !c[i].strict && !c[i + 1].strict &&
                          !c[i].bounds && !c[i + 1].bounds &&
                          c[i].lhs == c[i + 1].rhs && c[i].rhs == c[i + 1].lhs;
        if (pair) {
          os << to_string(c[i].lhs) << " = " << to_string(c[i].rhs);
          ++i;
        } else {
          os << to_string(c[i]);
        }
      }
    }
    os << ";\n";
  }
  return os.str();
}

} // namespace eagertl
