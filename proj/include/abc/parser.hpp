#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abc/ast.hpp"

// Concrete syntax:
//
//   program  := ['attrs' ':' id {',' id}] {def} ['system' ':'] system
//   def      := 'def' K ['(' x {',' x} ')'] '=' process [';']
//   system   := unary {'||' unary}
//   unary    := '!' ['<' n '>'] unary | 'nu' x unary | '(' system ')' | component
//   component:= '{' [a ':=' value {',' ...}] '}' ':' process  |  process   (shorthand for {}:P)
//   process  := sum {'|' sum}
//   sum      := prefix {'+' prefix}
//   prefix   := '0' | '(' E {',' E} ')' '@' '(' pred ')' '.' prefix
//             | '(' pred ')' '(' x {',' x} ')' '.' prefix
//             | '[' ['this' '.'] a ':=' E {',' ...} ']' prefix | '<' pred '>' prefix
//             | K ['(' E {',' E} ')'] | '(' process ')'
//   pred     := conj {'or' conj};  conj := neg {'and' neg};  neg := 'not' neg | atom
//   atom     := 'tt' | 'ff' | '(' pred ')' | E op E       op in = != < <= > >=
//   E        := term {('+'|'-') term};  term := factor {'*' factor}
//   factor   := value | x | a | 'this' '.' a | 'rand' '(' n ')' | '(' E ')'
//   value    := n | '-' n | 'name' | true | false | tt | ff | '<' [value {',' value}] '>'
//
// '#' starts a line comment.

namespace abc {

struct SourcePos {
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, std::vector<std::string> expected, const std::string& found)
      : std::runtime_error(format(pos, expected, found)), pos_(pos), expected_(std::move(expected)) {}

  const SourcePos& position() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string format(const SourcePos& pos, const std::vector<std::string>& expected,
                            const std::string& found) {
    std::string msg = "parse error at " + std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                      ": unexpected " + found;
    if (!expected.empty()) {
      msg += ", expected one of:";
      for (const auto& e : expected) msg += " " + e;
    }
    return msg;
  }

  SourcePos pos_;
  std::vector<std::string> expected_;
};

class ResolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

enum class TokKind { Ident, Int, NameLit, Punct, End };

struct Token {
  TokKind kind;
  std::string text;
  SourcePos pos;
};

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case TokKind::End: return "end of input";
    case TokKind::NameLit: return "name '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

inline std::vector<Token> lex(std::string_view text) {
  static const std::vector<std::string> puncts = {"||", ":=", "!=", "<=", ">=", "(", ")", "{", "}",
                                                  "[",  "]",  "<",  ">",  "=",  ",", ".", "@", ":",
                                                  "|",  "+",  "-",  "*",  "!",  ";"};
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
      ++i;
      pos.offset = i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const SourcePos start = pos;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({TokKind::Ident, std::string(text.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({TokKind::Int, std::string(text.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (c == '\'') {
      std::string id;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == '\\' && j + 1 < text.size()) {
          id.push_back(text[j + 1]);
          j += 2;
        } else if (text[j] == '\'') {
          closed = true;
          ++j;
          break;
        } else {
          id.push_back(text[j++]);
        }
      }
      if (!closed) throw ParseError(start, {"closing quote"}, "end of input");
      out.push_back({TokKind::NameLit, id, start});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const auto& p : puncts) {
      if (text.substr(i, p.size()) == p) {
        out.push_back({TokKind::Punct, p, start});
        advance(p.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(start, {}, std::string("character '") + c + "'");
  }
  out.push_back({TokKind::End, "", pos});
  return out;
}

inline bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"and", "or",  "not", "tt",  "ff",     "true",  "false",
                                           "this", "nu", "def", "rand", "system", "attrs"};
  return kw.count(s) != 0;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Program program() {
    Program prog;
    if (is_word("attrs") && peek(1).text == ":") {
      next();
      next();
      prog.declared_attrs.push_back(ident());
      while (accept(",")) prog.declared_attrs.push_back(ident());
    }
    while (is_word("def")) {
      const Token def_tok = next();
      std::string name = ident();
      Definition def;
      if (accept("(")) {
        if (!is(")")) {
          def.params.push_back(ident());
          while (accept(",")) def.params.push_back(ident());
        }
        expect(")");
      }
      expect("=");
      def.body = process();
      accept(";");
      if (prog.definitions.count(name)) {
        throw ResolveError("duplicate definition '" + name + "' at line " +
                           std::to_string(def_tok.pos.line));
      }
      prog.definitions.emplace(name, std::move(def));
    }
    if (is_word("system") && peek(1).text == ":") {
      next();
      next();
    }
    prog.main = system();
    expect_end();
    return prog;
  }

  System system_only() {
    System s = system();
    expect_end();
    return s;
  }
  Process process_only() {
    Process p = process();
    expect_end();
    return p;
  }
  Predicate predicate_only() {
    Predicate p = predicate();
    expect_end();
    return p;
  }
  Expression expression_only() {
    Expression e = expression();
    expect_end();
    return e;
  }
  Value value_only() {
    Value v = value();
    expect_end();
    return v;
  }

 private:
  // --- token helpers ---------------------------------------------------------
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is(const std::string& punct) const {
    return peek().kind == TokKind::Punct && peek().text == punct;
  }
  bool is_word(const std::string& w) const { return peek().kind == TokKind::Ident && peek().text == w; }
  bool accept(const std::string& punct) {
    if (is(punct)) {
      next();
      return true;
    }
    note_expected("'" + punct + "'");
    return false;
  }
  bool accept_word(const std::string& w) {
    if (is_word(w)) {
      next();
      return true;
    }
    note_expected(w);
    return false;
  }
  void expect(const std::string& punct) {
    if (!accept(punct)) fail();
  }
  void expect_word(const std::string& w) {
    if (!accept_word(w)) fail();
  }
  void expect_end() {
    if (peek().kind != TokKind::End) {
      note_expected("end of input");
      fail();
    }
  }
  std::string ident() {
    if (peek().kind == TokKind::Ident && !is_keyword(peek().text)) return next().text;
    note_expected("identifier");
    fail();
  }
  std::int64_t integer() {
    if (peek().kind == TokKind::Int) return std::stoll(next().text);
    note_expected("integer");
    fail();
  }

  // Expected-token bookkeeping for the furthest failure point.
  void note_expected(const std::string& what) {
    const std::size_t off = peek().pos.offset;
    if (!furthest_ || off > furthest_->pos.offset) {
      furthest_ = peek();
      expected_.clear();
    }
    if (furthest_ && off == furthest_->pos.offset &&
        std::find(expected_.begin(), expected_.end(), what) == expected_.end()) {
      expected_.push_back(what);
    }
  }
  [[noreturn]] void fail() {
    const Token& at = furthest_ ? *furthest_ : peek();
    throw ParseError(at.pos, expected_, describe(at));
  }

  template <class F>
  auto attempt(F&& f) -> std::optional<decltype(f())> {
    const std::size_t save = pos_;
    try {
      return f();
    } catch (const ParseError&) {
      pos_ = save;
      return std::nullopt;
    }
  }

  bool is_cmp(const Token& t) const {
    if (guard_close_ && t.text == ">") return false;
    return t.kind == TokKind::Punct &&
           (t.text == "=" || t.text == "!=" || t.text == "<" || t.text == "<=" || t.text == ">" ||
            t.text == ">=");
  }
  static bool is_arith(const Token& t) {
    return t.kind == TokKind::Punct && (t.text == "+" || t.text == "-" || t.text == "*");
  }

  // --- values and expressions ------------------------------------------------
  Value value() {
    const Token& t = peek();
    if (t.kind == TokKind::Int) return Value::integer(integer());
    if (is("-")) {
      next();
      return Value::integer(-integer());
    }
    if (t.kind == TokKind::NameLit) return Value::name(next().text);
    if (is_word("true") || is_word("tt")) {
      next();
      return Value::boolean(true);
    }
    if (is_word("false") || is_word("ff")) {
      next();
      return Value::boolean(false);
    }
    if (accept("<")) {
      std::vector<Value> items;
      if (!is(">")) {
        items.push_back(value());
        while (accept(",")) items.push_back(value());
      }
      expect(">");
      return Value::tuple(std::move(items));
    }
    note_expected("value");
    fail();
  }

  Expression factor() {
    const Token& t = peek();
    if (t.kind == TokKind::Int || t.kind == TokKind::NameLit || is("-") || is("<") || is_word("true") ||
        is_word("false") || is_word("tt") || is_word("ff")) {
      return Expression::lit(value());
    }
    if (is_word("this")) {
      next();
      expect(".");
      return Expression::this_attr(ident());
    }
    if (is_word("rand")) {
      next();
      expect("(");
      const std::int64_t bound = integer();
      expect(")");
      return Expression::rand(bound);
    }
    if (accept("(")) {
      GuardMode open(*this, false);
      Expression e = expression();
      expect(")");
      return e;
    }
    // Resolved into a variable or an attribute later.
    return Expression::var(ident());
  }

  Expression term() {
    Expression e = factor();
    while (is("*")) {
      next();
      e = Expression::arith(ArithOp::Mul, e, factor());
    }
    return e;
  }

  Expression expression() {
    Expression e = term();
    while (is("+") || is("-")) {
      const ArithOp op = next().text == "+" ? ArithOp::Add : ArithOp::Sub;
      e = Expression::arith(op, e, term());
    }
    return e;
  }

  // --- predicates ------------------------------------------------------------
  Predicate atom() {
    if ((is_word("tt") || is_word("ff")) && !is_cmp(peek(1)) && !is_arith(peek(1))) {
      return next().text == "tt" ? Predicate::tt() : Predicate::ff();
    }
    if (is("(")) {
      const std::size_t start = pos_;
      auto grouped = attempt([&] {
        next();
        GuardMode open(*this, false);
        Predicate p = predicate();
        expect(")");
        return p;
      });
      // "(e) op e" is a comparison; a '>' may also close an awareness guard.
      if (grouped && !is_cmp(peek()) && !is_arith(peek())) return *grouped;
      if (grouped) {
        const std::size_t after = pos_;
        pos_ = start;
        if (auto cmp = attempt([&] { return comparison(); })) return *cmp;
        pos_ = after;
        return *grouped;
      }
    }
    return comparison();
  }

  Predicate comparison() {
    Expression lhs = expression();
    if (!is_cmp(peek())) {
      note_expected("comparison operator");
      fail();
    }
    const std::string op = next().text;
    Expression rhs = expression();
    CmpOp cop = CmpOp::Eq;
    if (op == "!=") cop = CmpOp::Ne;
    else if (op == "<") cop = CmpOp::Lt;
    else if (op == "<=") cop = CmpOp::Le;
    else if (op == ">") cop = CmpOp::Gt;
    else if (op == ">=") cop = CmpOp::Ge;
    return Predicate::cmp(cop, lhs, rhs);
  }

  Predicate negation() {
    if (is_word("not")) {
      next();
      return Predicate::neg(negation());
    }
    return atom();
  }

  Predicate conjunction() {
    Predicate p = negation();
    while (is_word("and")) {
      next();
      p = Predicate::conj(p, negation());
    }
    return p;
  }

  Predicate predicate() {
    Predicate p = conjunction();
    while (is_word("or")) {
      next();
      p = Predicate::disj(p, conjunction());
    }
    return p;
  }

  // --- processes ---------------------------------------------------------------
  std::vector<Expression> expression_list(const std::string& close) {
    std::vector<Expression> out;
    if (!is(close)) {
      out.push_back(expression());
      while (accept(",")) out.push_back(expression());
    }
    expect(close);
    return out;
  }

  Process prefix() {
    if (peek().kind == TokKind::Int && peek().text == "0") {
      next();
      return Process::nil();
    }
    if (accept("[")) {
      std::vector<Assignment> assigns;
      do {
        if (is_word("this")) {
          next();
          expect(".");
        }
        std::string a = ident();
        expect(":=");
        assigns.emplace_back(std::move(a), expression());
      } while (accept(","));
      expect("]");
      return Process::upd(std::move(assigns), prefix());
    }
    if (accept("<")) {
      // Greedy first; if that eats the closing '>', a top-level '>' closes the guard.
      auto p = attempt([&] {
        Predicate g = predicate();
        expect(">");
        return g;
      });
      if (!p) {
        GuardMode closing(*this, true);
        p = predicate();
        expect(">");
      }
      return Process::aware(*p, prefix());
    }
    if (is("(")) {
      if (auto out = attempt([&] {
            next();
            auto exprs = expression_list(")");
            expect("@");
            expect("(");
            Predicate p = predicate();
            expect(")");
            expect(".");
            return Process::out(std::move(exprs), p, prefix());
          })) {
        return *out;
      }
      if (auto in = attempt([&] {
            next();
            Predicate p = predicate();
            expect(")");
            expect("(");
            std::vector<std::string> vars;
            if (!is(")")) {
              vars.push_back(ident());
              while (accept(",")) vars.push_back(ident());
            }
            expect(")");
            expect(".");
            return Process::in(p, std::move(vars), prefix());
          })) {
        return *in;
      }
      next();
      Process p = process();
      expect(")");
      return p;
    }
    if (peek().kind == TokKind::Ident && !is_keyword(peek().text)) {
      std::string name = next().text;
      std::vector<Expression> args;
      if (accept("(")) args = expression_list(")");
      return Process::call(std::move(name), std::move(args));
    }
    note_expected("process");
    fail();
  }

  Process sum() {
    Process p = prefix();
    while (is("+")) {
      next();
      p = Process::sum(p, prefix());
    }
    return p;
  }

  Process process() {
    Process p = sum();
    while (is("|")) {
      next();
      p = Process::par(p, sum());
    }
    return p;
  }

  // --- systems -----------------------------------------------------------------
  System component() {
    if (accept("{")) {
      std::map<std::string, Value> env;
      if (!is("}")) {
        do {
          std::string a = ident();
          expect(":=");
          env[a] = value();
        } while (accept(","));
      }
      expect("}");
      expect(":");
      return System::comp(AttributeEnv(std::move(env)), process());
    }
    return System::comp(AttributeEnv{}, process());
  }

  System unary() {
    if (is("!")) {
      next();
      int unfolded = 0;
      if (is("<") && peek(1).kind == TokKind::Int && peek(2).text == ">") {
        next();
        unfolded = static_cast<int>(integer());
        next();
      }
      return System::bang(unary(), unfolded);
    }
    if (is_word("nu")) {
      next();
      std::string x = ident();
      return System::nu(std::move(x), unary());
    }
    if (is("(")) {
      if (auto grouped = attempt([&] {
            next();
            System s = system();
            expect(")");
            return s;
          })) {
        return *grouped;
      }
    }
    return component();
  }

  System system() {
    System s = unary();
    while (is("||")) {
      next();
      s = System::par(s, unary());
    }
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool guard_close_ = false;

  struct GuardMode {
    GuardMode(Parser& p, bool on) : p_(p), saved_(p.guard_close_) { p.guard_close_ = on; }
    ~GuardMode() { p_.guard_close_ = saved_; }
    Parser& p_;
    bool saved_;
  };
  std::optional<Token> furthest_;
  std::vector<std::string> expected_;
};

// --- resolution ----------------------------------------------------------------

struct Resolver {
  const std::set<std::string>& attrs;
  const std::map<std::string, Definition>* defs;

  Expression expr(const Expression& e, const std::set<std::string>& scope, bool in_pred) const {
    return std::visit(
        overloaded{[&](const expr::Var& v) -> Expression {
                     if (scope.count(v.name)) return e;
                     if (attrs.count(v.name)) return Expression::attr(v.name);
                     throw ResolveError("unresolvable identifier '" + v.name +
                                        "' (not a bound variable or declared attribute)");
                   },
                   [&](const expr::Arith& a) -> Expression {
                     return Expression::arith(a.op, expr(a.lhs, scope, in_pred), expr(a.rhs, scope, in_pred));
                   },
                   [&](const expr::Rand&) -> Expression {
                     if (in_pred) throw ResolveError("rand() is not allowed inside a predicate");
                     return e;
                   },
                   [&](const auto&) -> Expression { return e; }},
        e.node().v);
  }

  Predicate pred(const Predicate& p, const std::set<std::string>& scope) const {
    return std::visit(
        overloaded{[&](const pred::Cmp& c) {
                     return Predicate::cmp(c.op, expr(c.lhs, scope, true), expr(c.rhs, scope, true));
                   },
                   [&](const pred::And& a) { return Predicate::conj(pred(a.lhs, scope), pred(a.rhs, scope)); },
                   [&](const pred::Or& o) { return Predicate::disj(pred(o.lhs, scope), pred(o.rhs, scope)); },
                   [&](const pred::Not& n) { return Predicate::neg(pred(n.arg, scope)); },
                   [&](const auto&) { return p; }},
        p.node().v);
  }

  std::vector<Expression> exprs(const std::vector<Expression>& es, const std::set<std::string>& scope) const {
    std::vector<Expression> out;
    for (const auto& e : es) out.push_back(expr(e, scope, false));
    return out;
  }

  Process process(const Process& p, const std::set<std::string>& scope) const {
    return std::visit(
        overloaded{
            [&](const proc::Nil&) { return p; },
            [&](const proc::Out& o) {
              return Process::out(exprs(o.exprs, scope), pred(o.pred, scope), process(o.cont, scope));
            },
            [&](const proc::In& i) {
              std::set<std::string> seen;
              for (const auto& x : i.vars) {
                if (!seen.insert(x).second) throw ResolveError("input variable '" + x + "' bound twice");
              }
              std::set<std::string> inner = scope;
              inner.insert(i.vars.begin(), i.vars.end());
              return Process::in(pred(i.pred, inner), i.vars, process(i.cont, inner));
            },
            [&](const proc::Upd& u) {
              std::vector<Assignment> assigns;
              for (const auto& [a, e] : u.assigns) assigns.emplace_back(a, expr(e, scope, false));
              return Process::upd(std::move(assigns), process(u.cont, scope));
            },
            [&](const proc::Aware& a) { return Process::aware(pred(a.pred, scope), process(a.cont, scope)); },
            [&](const proc::Sum& s) { return Process::sum(process(s.lhs, scope), process(s.rhs, scope)); },
            [&](const proc::Par& s) { return Process::par(process(s.lhs, scope), process(s.rhs, scope)); },
            [&](const proc::Call& c) {
              if (defs) {
                auto it = defs->find(c.name);
                if (it == defs->end()) throw ResolveError("unknown definition '" + c.name + "'");
                if (it->second.params.size() != c.args.size()) {
                  throw ResolveError("definition '" + c.name + "' expects " +
                                     std::to_string(it->second.params.size()) + " argument(s), got " +
                                     std::to_string(c.args.size()));
                }
              }
              return Process::call(c.name, exprs(c.args, scope));
            }},
        p.node().v);
  }

  System system(const System& s) const {
    return std::visit(
        overloaded{[&](const sys::Comp& c) { return System::comp(c.env, process(c.proc, {})); },
                   [&](const sys::Par& p) { return System::par(system(p.lhs), system(p.rhs)); },
                   [&](const sys::Bang& b) { return System::bang(system(b.body), b.unfolded); },
                   [&](const sys::Nu& n) { return System::nu(n.name, system(n.body)); }},
        s.node().v);
  }
};

inline void collect_env_keys(const System& s, std::set<std::string>& out) {
  std::visit(overloaded{[&](const sys::Comp& c) {
                          for (const auto& [a, v] : c.env.bindings()) out.insert(a);
                        },
                        [&](const sys::Par& p) {
                          collect_env_keys(p.lhs, out);
                          collect_env_keys(p.rhs, out);
                        },
                        [&](const sys::Bang& b) { collect_env_keys(b.body, out); },
                        [&](const sys::Nu& n) { collect_env_keys(n.body, out); }},
             s.node().v);
}

}  // namespace detail

/// Identifiers that resolve to attributes: the `attrs:` header plus every
/// environment key of the main system.
inline std::set<std::string> declared_attributes(const Program& prog) {
  std::set<std::string> attrs(prog.declared_attrs.begin(), prog.declared_attrs.end());
  detail::collect_env_keys(prog.main, attrs);
  return attrs;
}

/// Resolves bare identifiers into variables or attributes and checks calls.
inline Program resolve(const Program& raw) {
  const std::set<std::string> attrs = declared_attributes(raw);
  detail::Resolver r{attrs, &raw.definitions};
  Program out;
  out.declared_attrs = raw.declared_attrs;
  for (const auto& [id, def] : raw.definitions) {
    std::set<std::string> scope;
    for (const auto& p : def.params) {
      if (!scope.insert(p).second) throw ResolveError("parameter '" + p + "' repeated in '" + id + "'");
    }
    out.definitions.emplace(id, Definition{def.params, r.process(def.body, scope)});
  }
  out.main = r.system(raw.main);
  return out;
}

inline Program parse_program(std::string_view text) {
  detail::Parser p(text);
  return resolve(p.program());
}

/// Parses a process; bare identifiers in `attrs` become attributes, the rest
/// must be bound by an enclosing input or appear in `scope`.
inline Process parse_process(std::string_view text, const std::set<std::string>& attrs = {},
                             const std::set<std::string>& scope = {}) {
  detail::Parser p(text);
  detail::Resolver r{attrs, nullptr};
  return r.process(p.process_only(), scope);
}

inline Predicate parse_predicate(std::string_view text, const std::set<std::string>& attrs = {},
                                 const std::set<std::string>& scope = {}) {
  detail::Parser p(text);
  detail::Resolver r{attrs, nullptr};
  return r.pred(p.predicate_only(), scope);
}

inline Expression parse_expression(std::string_view text, const std::set<std::string>& attrs = {},
                                   const std::set<std::string>& scope = {}) {
  detail::Parser p(text);
  detail::Resolver r{attrs, nullptr};
  return r.expr(p.expression_only(), scope, false);
}

inline Value parse_value(std::string_view text) {
  detail::Parser p(text);
  return p.value_only();
}

}  // namespace abc
