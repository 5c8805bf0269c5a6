#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "abc/ast.hpp"
#include "abc/attributes.hpp"
#include "abc/explorer.hpp"
#include "abc/names.hpp"
#include "abc/parser.hpp"
#include "abc/printer.hpp"
#include "abc/system.hpp"

// Broadcast π-calculus (bπ): two-level syntax, a broadcast operational
// semantics used as an oracle, the encoding into AbC, and a checker that
// compares the two transition systems step by step.
//
//   P ::= G | P | P | nu x P
//   G ::= nil | a(x̃).G | a<ṽ>.G | tau.G | G + G | rec A(x̃).G @ (ỹ) | A(ỹ)

namespace abc::bpi {

enum class Kind { Nil, Tau, In, Out, Sum, Rec, Call, Par, Nu };

struct Node;
using Term = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Nil;
  std::string name;                // channel, binder or recursion identifier
  std::vector<std::string> names;  // input variables, output values or rec parameters
  std::vector<std::string> args;   // rec / call arguments
  Term a;                          // continuation, left operand or body
  Term b;                          // right operand
};

inline Term nil() {
  static const Term t = std::make_shared<const Node>(Node{});
  return t;
}
inline Term tau(Term cont) { return std::make_shared<const Node>(Node{Kind::Tau, "", {}, {}, std::move(cont), nullptr}); }
inline Term in(std::string chan, std::vector<std::string> vars, Term cont) {
  return std::make_shared<const Node>(Node{Kind::In, std::move(chan), std::move(vars), {}, std::move(cont), nullptr});
}
inline Term out(std::string chan, std::vector<std::string> values, Term cont) {
  return std::make_shared<const Node>(Node{Kind::Out, std::move(chan), std::move(values), {}, std::move(cont), nullptr});
}
inline Term sum(Term l, Term r) {
  return std::make_shared<const Node>(Node{Kind::Sum, "", {}, {}, std::move(l), std::move(r)});
}
inline Term par(Term l, Term r) {
  return std::make_shared<const Node>(Node{Kind::Par, "", {}, {}, std::move(l), std::move(r)});
}
inline Term nu(std::string x, Term body) {
  return std::make_shared<const Node>(Node{Kind::Nu, std::move(x), {}, {}, std::move(body), nullptr});
}
inline Term rec(std::string id, std::vector<std::string> params, Term body, std::vector<std::string> args) {
  return std::make_shared<const Node>(
      Node{Kind::Rec, std::move(id), std::move(params), std::move(args), std::move(body), nullptr});
}
inline Term call(std::string id, std::vector<std::string> args) {
  return std::make_shared<const Node>(Node{Kind::Call, std::move(id), {}, std::move(args), nullptr, nullptr});
}

inline bool guarded(const Term& t) { return t->kind != Kind::Par && t->kind != Kind::Nu; }

// ---------------------------------------------------------------------------
// Printing.

namespace detail {
inline std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out;
}
}  // namespace detail

inline std::string pretty(const Term& t);

namespace detail {
// Continuations and ν bodies are atoms unless they are prefixes.
inline std::string atom(const Term& t) {
  if (t->kind == Kind::Sum || t->kind == Kind::Par || t->kind == Kind::Nu) return "(" + pretty(t) + ")";
  return pretty(t);
}
}  // namespace detail

inline std::string pretty(const Term& t) {
  switch (t->kind) {
    case Kind::Nil: return "nil";
    case Kind::Tau: return "tau." + detail::atom(t->a);
    case Kind::In: return t->name + "(" + detail::join(t->names) + ")." + detail::atom(t->a);
    case Kind::Out: return t->name + "<" + detail::join(t->names) + ">." + detail::atom(t->a);
    case Kind::Sum: {
      std::string r = pretty(t->b);
      if (t->b->kind == Kind::Sum || t->b->kind == Kind::Par) r = "(" + r + ")";
      std::string l = t->a->kind == Kind::Par ? "(" + pretty(t->a) + ")" : pretty(t->a);
      return l + " + " + r;
    }
    case Kind::Par: {
      std::string r = pretty(t->b);
      if (t->b->kind == Kind::Par) r = "(" + r + ")";
      return pretty(t->a) + " | " + r;
    }
    case Kind::Nu: return "nu " + t->name + " " + detail::atom(t->a);
    case Kind::Rec:
      return "rec " + t->name + "(" + detail::join(t->names) + ")." + detail::atom(t->a) + " @ (" +
             detail::join(t->args) + ")";
    case Kind::Call: return t->name + "(" + detail::join(t->args) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parsing.

class BpiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(abc::detail::lex(text)) {}

  Term top() {
    Term t = proc();
    if (peek().kind != abc::detail::TokKind::End) fail("end of input");
    return t;
  }

 private:
  using Tok = abc::detail::Token;
  using TK = abc::detail::TokKind;

  const Tok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Tok next() {
    Tok t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is(const std::string& p) const { return peek().kind == TK::Punct && peek().text == p; }
  bool is_word(const std::string& w) const { return peek().kind == TK::Ident && peek().text == w; }
  bool accept(const std::string& p) {
    if (!is(p)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(peek().pos, {expected}, abc::detail::describe(peek()));
  }
  void expect(const std::string& p) {
    if (!accept(p)) fail("'" + p + "'");
  }
  static bool reserved(const std::string& s) { return s == "nil" || s == "tau" || s == "nu" || s == "rec"; }
  std::string ident() {
    if (peek().kind == TK::Ident && !reserved(peek().text)) return next().text;
    fail("identifier");
  }
  std::vector<std::string> idents(const std::string& close) {
    std::vector<std::string> out;
    if (!is(close)) {
      out.push_back(ident());
      while (accept(",")) out.push_back(ident());
    }
    expect(close);
    return out;
  }

  Term cont() {
    if (accept(".")) return unary();
    return nil();
  }

  Term unary() {
    if (is_word("nil")) {
      next();
      return nil();
    }
    if (is_word("tau")) {
      next();
      return tau(cont());
    }
    if (is_word("nu")) {
      next();
      std::string x = ident();
      return nu(std::move(x), unary());
    }
    if (is_word("rec")) {
      next();
      std::string id = ident();
      expect("(");
      auto params = idents(")");
      expect(".");
      recs_.push_back(id);
      Term body = unary();
      recs_.pop_back();
      expect("@");
      expect("(");
      auto args = idents(")");
      return rec(std::move(id), std::move(params), std::move(body), std::move(args));
    }
    if (accept("(")) {
      Term t = proc();
      expect(")");
      return t;
    }
    std::string id = ident();
    if (std::find(recs_.begin(), recs_.end(), id) != recs_.end()) {
      expect("(");
      return call(id, idents(")"));
    }
    if (accept("(")) {
      auto vars = idents(")");
      return in(std::move(id), std::move(vars), cont());
    }
    if (accept("<")) {
      auto vals = idents(">");
      return out(std::move(id), std::move(vals), cont());
    }
    fail("'(' or '<' after channel");
  }

  Term sum_level() {
    Term t = unary();
    while (accept("+")) t = sum(t, unary());
    return t;
  }

  Term proc() {
    Term t = sum_level();
    while (accept("|")) t = par(t, sum_level());
    return t;
  }

  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> recs_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Names and substitution.

inline NameSet free_names(const Term& t) {
  NameSet out;
  switch (t->kind) {
    case Kind::Nil: break;
    case Kind::Tau: out = free_names(t->a); break;
    case Kind::In: {
      out = free_names(t->a);
      for (const auto& x : t->names) out.erase(x);
      out.insert(t->name);
      break;
    }
    case Kind::Out:
      out = free_names(t->a);
      out.insert(t->name);
      out.insert(t->names.begin(), t->names.end());
      break;
    case Kind::Sum:
    case Kind::Par: {
      out = free_names(t->a);
      NameSet r = free_names(t->b);
      out.insert(r.begin(), r.end());
      break;
    }
    case Kind::Nu:
      out = free_names(t->a);
      out.erase(t->name);
      break;
    case Kind::Rec: {
      out = free_names(t->a);
      for (const auto& x : t->names) out.erase(x);
      out.insert(t->args.begin(), t->args.end());
      break;
    }
    case Kind::Call: out.insert(t->args.begin(), t->args.end()); break;
  }
  return out;
}

inline void all_names_into(const Term& t, NameSet& out) {
  if (t->kind != Kind::Sum && t->kind != Kind::Par && t->kind != Kind::Nil && t->kind != Kind::Tau &&
      t->kind != Kind::Rec && t->kind != Kind::Call)
    out.insert(t->name);
  out.insert(t->names.begin(), t->names.end());
  out.insert(t->args.begin(), t->args.end());
  if (t->a) all_names_into(t->a, out);
  if (t->b) all_names_into(t->b, out);
}

inline NameSet all_names(const Term& t) {
  NameSet out;
  all_names_into(t, out);
  return out;
}

/// Checks the two-level discipline and the recursion side conditions.
inline void validate(const Term& t, std::vector<std::pair<std::string, std::size_t>> recs = {}) {
  auto need_guarded = [](const Term& g, const char* where) {
    if (!guarded(g)) throw BpiError(std::string(where) + " must be a guarded process: " + pretty(g));
  };
  switch (t->kind) {
    case Kind::Nil: break;
    case Kind::Tau:
      need_guarded(t->a, "prefix continuation");
      validate(t->a, recs);
      break;
    case Kind::In: {
      std::set<std::string> seen;
      for (const auto& x : t->names) {
        if (!seen.insert(x).second) throw BpiError("input variable '" + x + "' bound twice");
        if (x == t->name) throw BpiError("input on '" + x + "' binds its own channel");
      }
      need_guarded(t->a, "prefix continuation");
      validate(t->a, recs);
      break;
    }
    case Kind::Out:
      need_guarded(t->a, "prefix continuation");
      validate(t->a, recs);
      break;
    case Kind::Sum:
      need_guarded(t->a, "summand");
      need_guarded(t->b, "summand");
      validate(t->a, recs);
      validate(t->b, recs);
      break;
    case Kind::Par:
      validate(t->a, recs);
      validate(t->b, recs);
      break;
    case Kind::Nu: validate(t->a, recs); break;
    case Kind::Rec: {
      need_guarded(t->a, "recursion body");
      if (t->names.size() != t->args.size()) throw BpiError("rec " + t->name + " instantiated with wrong arity");
      NameSet fn = free_names(t->a);
      for (const auto& x : fn) {
        if (std::find(t->names.begin(), t->names.end(), x) == t->names.end())
          throw BpiError("free name '" + x + "' of rec " + t->name + " is not a parameter");
      }
      recs.emplace_back(t->name, t->names.size());
      validate(t->a, recs);
      break;
    }
    case Kind::Call: {
      auto it = std::find_if(recs.rbegin(), recs.rend(), [&](const auto& r) { return r.first == t->name; });
      if (it == recs.rend()) throw BpiError("call to unknown recursion '" + t->name + "'");
      if (it->second != t->args.size()) throw BpiError("call to " + t->name + " with wrong arity");
      break;
    }
  }
}

inline Term parse_bpi(std::string_view text) {
  detail::Parser p(text);
  Term t = p.top();
  validate(t);
  return t;
}

using NameMap = std::map<std::string, std::string>;

/// Capture-avoiding simultaneous substitution of names.
inline Term subst(const Term& t, const NameMap& s) {
  if (s.empty()) return t;
  auto map = [&](const std::string& x) {
    auto it = s.find(x);
    return it == s.end() ? x : it->second;
  };
  auto maps = [&](const std::vector<std::string>& xs) {
    std::vector<std::string> out;
    for (const auto& x : xs) out.push_back(map(x));
    return out;
  };
  // Binders: drop shadowed entries, rename binders that would capture.
  auto bind = [&](const std::vector<std::string>& vars, const Term& body, std::vector<std::string>& fresh_vars,
                  NameMap& inner) {
    inner = s;
    for (const auto& x : vars) inner.erase(x);
    NameSet range;
    for (const auto& [k, v] : inner) range.insert(v);
    NameSet avoid = all_names(body);
    avoid.insert(range.begin(), range.end());
    for (const auto& [k, v] : inner) avoid.insert(k);
    avoid.insert(vars.begin(), vars.end());
    fresh_vars = vars;
    NameSet fnb = free_names(body);
    bool needed = false;
    for (const auto& [k, v] : inner) needed = needed || fnb.count(k);
    if (!needed) return;
    for (auto& x : fresh_vars) {
      if (range.count(x)) {
        std::string y = fresh_name(x, avoid);
        avoid.insert(y);
        inner[x] = y;
        x = y;
      }
    }
  };
  switch (t->kind) {
    case Kind::Nil: return t;
    case Kind::Tau: return tau(subst(t->a, s));
    case Kind::In: {
      std::vector<std::string> vars;
      NameMap inner;
      bind(t->names, t->a, vars, inner);
      return in(map(t->name), vars, subst(t->a, inner));
    }
    case Kind::Out: return out(map(t->name), maps(t->names), subst(t->a, s));
    case Kind::Sum: return sum(subst(t->a, s), subst(t->b, s));
    case Kind::Par: return par(subst(t->a, s), subst(t->b, s));
    case Kind::Nu: {
      std::vector<std::string> vars;
      NameMap inner;
      bind({t->name}, t->a, vars, inner);
      return nu(vars[0], subst(t->a, inner));
    }
    case Kind::Rec: return rec(t->name, t->names, t->a, maps(t->args));  // body is closed
    case Kind::Call: return call(t->name, maps(t->args));
  }
  return t;
}

namespace detail {
inline Term replace_calls(const Term& t, const std::string& id, const Term& r) {
  switch (t->kind) {
    case Kind::Nil: return t;
    case Kind::Tau: return tau(replace_calls(t->a, id, r));
    case Kind::In: return in(t->name, t->names, replace_calls(t->a, id, r));
    case Kind::Out: return out(t->name, t->names, replace_calls(t->a, id, r));
    case Kind::Sum: return sum(replace_calls(t->a, id, r), replace_calls(t->b, id, r));
    case Kind::Par: return par(replace_calls(t->a, id, r), replace_calls(t->b, id, r));
    case Kind::Nu: return nu(t->name, replace_calls(t->a, id, r));
    case Kind::Rec:
      if (t->name == id) return t;
      return rec(t->name, t->names, replace_calls(t->a, id, r), t->args);
    case Kind::Call:
      if (t->name != id) return t;
      return bpi::rec(r->name, r->names, r->a, t->args);
  }
  return t;
}
}  // namespace detail

/// (rec A(x̃).G)(ỹ) ↦ G[rec A(x̃).G / A][ỹ/x̃]
inline Term unfold(const Term& r) {
  Term body = detail::replace_calls(r->a, r->name, r);
  NameMap s;
  for (std::size_t i = 0; i < r->names.size(); ++i) s[r->names[i]] = r->args[i];
  return subst(body, s);
}

// ---------------------------------------------------------------------------
// Oracle semantics (broadcast): an output reaches every parallel input on the
// same channel; subterms without an enabled input on it stay unchanged.

struct Label {
  enum class Kind { Out, Tau };
  Kind kind = Kind::Tau;
  std::vector<std::string> bound;
  std::string chan;
  std::vector<std::string> values;
};

inline std::string pretty(const Label& l) {
  if (l.kind == Label::Kind::Tau) return "tau";
  std::string out;
  if (!l.bound.empty()) out = "nu " + detail::join(l.bound) + ". ";
  return out + l.chan + "<" + detail::join(l.values) + ">";
}

struct Step {
  Label label;
  Term next;
};

namespace detail {

constexpr int kMaxUnfold = 64;

struct Received {
  std::vector<Term> states;
  bool discarded = true;
};

class Oracle {
 public:
  explicit Oracle(const Term& top) {
    taken_ = all_names(top);
    visible_ = free_names(top);
    count(top);
  }

  std::vector<Step> outputs(const Term& t, int depth = 0) {
    if (depth > kMaxUnfold) throw BpiError("unguarded recursion in " + pretty(t));
    std::vector<Step> res;
    switch (t->kind) {
      case Kind::Nil:
      case Kind::In:
      case Kind::Call: break;
      case Kind::Tau: res.push_back({Label{}, t->a}); break;
      case Kind::Out: res.push_back({Label{Label::Kind::Out, {}, t->name, t->names}, t->a}); break;
      case Kind::Sum:
        res = outputs(t->a, depth);
        for (auto& s : outputs(t->b, depth)) res.push_back(std::move(s));
        break;
      case Kind::Rec: res = outputs(unfold(t), depth + 1); break;
      case Kind::Par: {
        auto side = [&](const Term& sender, const Term& other, bool left) {
          for (auto& s : outputs(sender, depth)) {
            if (s.label.kind == Label::Kind::Tau) {
              res.push_back({s.label, left ? par(s.next, other) : par(other, s.next)});
              continue;
            }
            for (auto& o : receive(other, s.label.chan, s.label.values).states)
              res.push_back({s.label, left ? par(s.next, o) : par(o, s.next)});
          }
        };
        side(t->a, t->b, true);
        side(t->b, t->a, false);
        break;
      }
      case Kind::Nu: {
        const std::string& x = t->name;
        for (auto& s : outputs(t->a, depth)) {
          const Label& l = s.label;
          if (l.kind == Label::Kind::Tau) {
            res.push_back({l, nu(x, s.next)});
          } else if (l.chan == x) {  // broadcast on a private channel is internal
            Term next = s.next;
            for (auto it = l.bound.rbegin(); it != l.bound.rend(); ++it) next = nu(*it, next);
            res.push_back({Label{}, nu(x, next)});
          } else if (std::find(l.values.begin(), l.values.end(), x) != l.values.end()) {  // scope opening
            std::string y = x;
            if (visible_.count(x) || binders_[x] > 1) {
              NameSet avoid = taken_;
              avoid.insert(l.values.begin(), l.values.end());
              avoid.insert(l.bound.begin(), l.bound.end());
              avoid.insert(l.chan);
              y = fresh_name(x, avoid);
              taken_.insert(y);
            }
            Label ol = l;
            for (auto& v : ol.values) v = v == x ? y : v;
            ol.bound.push_back(y);
            res.push_back({ol, subst(s.next, {{x, y}})});
          } else {
            res.push_back({l, nu(x, s.next)});
          }
        }
        break;
      }
    }
    return res;
  }

  Received receive(const Term& t, const std::string& chan, const std::vector<std::string>& vals, int depth = 0) {
    if (depth > kMaxUnfold) throw BpiError("unguarded recursion in " + pretty(t));
    switch (t->kind) {
      case Kind::In: {
        if (t->name != chan || t->names.size() != vals.size()) return {{t}, true};
        NameMap s;
        for (std::size_t i = 0; i < vals.size(); ++i) s[t->names[i]] = vals[i];
        return {{subst(t->a, s)}, false};
      }
      case Kind::Sum: {
        Received l = receive(t->a, chan, vals, depth);
        Received r = receive(t->b, chan, vals, depth);
        if (l.discarded && r.discarded) return {{t}, true};
        Received out;
        out.discarded = false;
        if (!l.discarded) out.states = l.states;
        if (!r.discarded) out.states.insert(out.states.end(), r.states.begin(), r.states.end());
        return out;
      }
      case Kind::Rec: {
        Received r = receive(unfold(t), chan, vals, depth + 1);
        if (r.discarded) return {{t}, true};
        return r;
      }
      case Kind::Par: {
        Received l = receive(t->a, chan, vals, depth);
        Received r = receive(t->b, chan, vals, depth);
        if (l.discarded && r.discarded) return {{t}, true};
        Received out;
        out.discarded = false;
        for (const auto& x : l.states)
          for (const auto& y : r.states) out.states.push_back(par(x, y));
        return out;
      }
      case Kind::Nu: {
        std::string x = t->name;
        Term body = t->a;
        if (x == chan || std::find(vals.begin(), vals.end(), x) != vals.end()) {
          NameSet avoid = taken_;
          avoid.insert(vals.begin(), vals.end());
          avoid.insert(chan);
          NameSet bn = all_names(body);
          avoid.insert(bn.begin(), bn.end());
          std::string y = fresh_name(x, avoid);
          taken_.insert(y);
          body = subst(body, {{x, y}});
          x = y;
        }
        Received r = receive(body, chan, vals, depth);
        Received out;
        out.discarded = r.discarded;
        for (const auto& s : r.states) out.states.push_back(r.discarded ? t : nu(x, s));
        return out;
      }
      default: return {{t}, true};
    }
  }

 private:
  void count(const Term& t) {
    if (t->kind == Kind::Nu) ++binders_[t->name];
    if (t->a) count(t->a);
    if (t->b) count(t->b);
  }

  NameSet taken_;
  NameSet visible_;
  std::map<std::string, int> binders_;
};

}  // namespace detail

inline std::vector<Step> bpi_steps(const Term& t) {
  detail::Oracle o(t);
  return o.outputs(t);
}

/// α-canonical text of a term: ν binders %0, %1, … and input variables $0, … in pre-order.
inline std::string canonical_key(const Term& t) {
  int binders = 0;
  int vars = 0;
  std::function<Term(const Term&)> go = [&](const Term& x) -> Term {
    switch (x->kind) {
      case Kind::Nil:
      case Kind::Call:
      case Kind::Rec: return x;
      case Kind::Tau: return tau(go(x->a));
      case Kind::Out: return out(x->name, x->names, go(x->a));
      case Kind::In: {
        NameMap m;
        std::vector<std::string> fresh;
        for (const auto& v : x->names) {
          fresh.push_back("$" + std::to_string(vars++));
          m[v] = fresh.back();
        }
        return in(x->name, fresh, go(subst(x->a, m)));
      }
      case Kind::Sum: {
        Term l = go(x->a);
        return sum(l, go(x->b));
      }
      case Kind::Par: {
        Term l = go(x->a);
        return par(l, go(x->b));
      }
      case Kind::Nu: {
        std::string fresh = "%" + std::to_string(binders++);
        return nu(fresh, go(subst(x->a, {{x->name, fresh}})));
      }
    }
    return x;
  };
  return pretty(go(t));
}

// ---------------------------------------------------------------------------
// Encoding into AbC.

class Encoder {
 public:
  /// (P)c. Definitions for every recursion met so far accumulate in defs().
  System system(const Term& t) {
    avoid_ = all_names(t);
    for (const auto& [k, name] : recs_) avoid_.insert(name);
    return sys(t);
  }

  Program program(const Term& t) {
    Program p;
    p.main = system(t);
    p.definitions = defs_;
    return p;
  }

  const Definitions& defs() const { return defs_; }

 private:
  using Scope = std::set<std::string>;

  static Expression name_expr(const std::string& x, const Scope& vars) {
    return vars.count(x) ? Expression::var(x) : Expression::lit(Value::name(x));
  }

  System sys(const Term& t) {
    switch (t->kind) {
      case Kind::Par: return System::par(sys(t->a), sys(t->b));
      case Kind::Nu: return System::nu(t->name, sys(t->a));
      default: return System::comp(AttributeEnv{}, proc(t, {}, {}));
    }
  }

  Process proc(const Term& t, const Scope& vars, const std::map<std::string, std::string>& calls) {
    switch (t->kind) {
      case Kind::Nil: return Process::nil();
      case Kind::Tau: return Process::out({}, Predicate::ff(), proc(t->a, vars, calls));
      case Kind::Out: {
        const Expression chan = name_expr(t->name, vars);
        std::vector<Expression> exprs{chan};
        for (const auto& v : t->names) exprs.push_back(name_expr(v, vars));
        return Process::out(std::move(exprs), Predicate::cmp(CmpOp::Eq, chan, chan), proc(t->a, vars, calls));
      }
      case Kind::In: {
        NameSet avoid = avoid_;
        avoid.insert(vars.begin(), vars.end());
        avoid.insert(t->names.begin(), t->names.end());
        const std::string y = fresh_name("y", avoid);
        Scope inner = vars;
        inner.insert(t->names.begin(), t->names.end());
        std::vector<std::string> xs{y};
        xs.insert(xs.end(), t->names.begin(), t->names.end());
        const Predicate pred = Predicate::cmp(CmpOp::Eq, Expression::var(y), name_expr(t->name, vars));
        inner.insert(y);
        return Process::in(pred, std::move(xs), proc(t->a, inner, calls));
      }
      case Kind::Sum: return Process::sum(proc(t->a, vars, calls), proc(t->b, vars, calls));
      case Kind::Rec: {
        const std::string def = definition(t);
        std::vector<Expression> args;
        for (const auto& y : t->args) args.push_back(name_expr(y, vars));
        return Process::call(def, std::move(args));
      }
      case Kind::Call: {
        std::vector<Expression> args;
        for (const auto& y : t->args) args.push_back(name_expr(y, vars));
        return Process::call(calls.at(t->name), std::move(args));
      }
      default: throw BpiError("process-level operator under a prefix: " + pretty(t));
    }
  }

  // ((rec A(x̃).G)(ỹ))p: one definition A(x̃) = (G)p per distinct recursion.
  std::string definition(const Term& r) {
    const std::string key = pretty(rec(r->name, r->names, r->a, {}));
    auto it = recs_.find(key);
    if (it != recs_.end()) return it->second;
    NameSet used;
    for (const auto& [id, d] : defs_) used.insert(id);
    const std::string id = fresh_name(r->name, used);
    recs_.emplace(key, id);
    defs_[id] = Definition{r->names, Process::nil()};  // reserve the name before encoding the body
    Scope params(r->names.begin(), r->names.end());
    const NameSet saved = avoid_;
    NameSet body_names = all_names(r->a);
    avoid_.insert(body_names.begin(), body_names.end());
    defs_[id] = Definition{r->names, proc(r->a, params, {{r->name, id}})};
    avoid_ = saved;
    return id;
  }

  NameSet avoid_;
  std::map<std::string, std::string> recs_;
  Definitions defs_;
};

inline Program encode(const Term& t) {
  Encoder e;
  return e.program(t);
}

// ---------------------------------------------------------------------------
// Operational correspondence.

struct CorrespondenceReport {
  std::size_t pairs = 0;
  std::size_t steps = 0;
  std::size_t step_mismatches = 0;
  std::size_t barb_mismatches = 0;
  std::size_t divergence_mismatches = 0;
  std::size_t invariance_failures = 0;
  std::vector<std::string> details;

  bool ok() const {
    return step_mismatches == 0 && barb_mismatches == 0 && divergence_mismatches == 0 && invariance_failures == 0;
  }
};

namespace detail {

// Opened names are renamed to %b0, %b1, … in the successor so that the choice
// of fresh names does not matter.
inline std::string successor_key(const System& next, const std::vector<std::string>& bound) {
  System s = next;
  for (std::size_t i = 0; i < bound.size(); ++i) s = rename_name(s, bound[i], "%b" + std::to_string(i));
  return abc::canonical_key(s);
}

inline SystemLabel translate(const Label& l) {
  if (l.kind == Label::Kind::Tau) return SystemLabel::tau();
  const Expression chan = Expression::lit(Value::name(l.chan));
  std::vector<Value> values{Value::name(l.chan)};
  for (const auto& v : l.values) values.push_back(Value::name(v));
  return SystemLabel::out(l.bound, Predicate::cmp(CmpOp::Eq, chan, chan), values);
}

inline bool has_tau_cycle(const std::vector<std::vector<std::size_t>>& tau, std::size_t from) {
  // nodes reachable by τ from `from` (including itself) that lie on a τ-cycle
  std::vector<bool> reach(tau.size(), false);
  std::vector<std::size_t> stack{from};
  reach[from] = true;
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y : tau[x])
      if (!reach[y]) {
        reach[y] = true;
        stack.push_back(y);
      }
  }
  for (std::size_t s = 0; s < tau.size(); ++s) {
    if (!reach[s]) continue;
    std::vector<bool> seen(tau.size(), false);
    std::vector<std::size_t> st(tau[s].begin(), tau[s].end());
    while (!st.empty()) {
      std::size_t x = st.back();
      st.pop_back();
      if (x == s) return true;
      if (seen[x]) continue;
      seen[x] = true;
      for (std::size_t y : tau[x]) st.push_back(y);
    }
  }
  return false;
}

inline System permute(const System& s, const NameMap& sigma) {
  NameSet avoid = all_names(s);
  for (const auto& [k, v] : sigma) {
    avoid.insert(k);
    avoid.insert(v);
  }
  System out = s;
  std::vector<std::pair<std::string, std::string>> tmp;
  for (const auto& [k, v] : sigma) {
    std::string t = fresh_name("perm", avoid);
    avoid.insert(t);
    out = rename_name(out, k, t);
    tmp.emplace_back(t, v);
  }
  for (const auto& [t, v] : tmp) out = rename_name(out, t, v);
  return out;
}

}  // namespace detail

/// Explores pairs (P, (P)c) breadth-first to `depth` and checks: a one-to-one
/// match between bπ steps and AbC steps (labels by meaning, successors up to
/// α and the choice of opened names), barbs, divergence, and name invariance
/// of the encoding for `permutations` sampled renamings.
inline CorrespondenceReport correspondence_check(const Term& p, int depth, std::uint64_t seed = 0,
                                                 int permutations = 4) {
  CorrespondenceReport rep;
  Encoder enc;
  StepOptions opts;

  struct Pair {
    Term term;
    System sys;
    int depth;
  };
  std::unordered_map<std::string, std::size_t> bids, aids;
  std::vector<std::vector<std::size_t>> btau, atau;
  std::vector<std::pair<std::size_t, std::size_t>> pair_ids;
  auto id_of = [](std::unordered_map<std::string, std::size_t>& ids, std::vector<std::vector<std::size_t>>& g,
                  const std::string& key) {
    auto [it, fresh] = ids.emplace(key, g.size());
    if (fresh) g.emplace_back();
    return it->second;
  };

  std::deque<Pair> queue;
  std::set<std::string> visited;
  queue.push_back({p, enc.system(p), 0});
  while (!queue.empty()) {
    Pair cur = queue.front();
    queue.pop_front();
    const std::string bkey = canonical_key(cur.term);
    if (!visited.insert(bkey).second) continue;
    ++rep.pairs;
    const std::size_t bi = id_of(bids, btau, bkey);
    const std::size_t ai = id_of(aids, atau, abc::canonical_key(cur.sys));
    pair_ids.emplace_back(bi, ai);

    const Definitions defs = enc.defs();
    Program probe;
    probe.main = cur.sys;
    probe.definitions = defs;
    Universe u = make_universe(probe);

    auto bsteps = bpi_steps(cur.term);
    auto asteps = system_steps(cur.sys, defs, u, opts).steps;
    rep.steps += bsteps.size();

    // Expected AbC steps: translate each bπ step and encode its successor.
    std::vector<std::pair<SystemLabel, System>> expected;
    for (const auto& s : bsteps) expected.emplace_back(detail::translate(s.label), enc.system(s.next));
    std::set<Value> lits;
    for (const auto& [l, s] : expected)
      for (const auto& v : l.values) lits.insert(v);
    for (const auto& s : asteps)
      for (const auto& v : s.label.values) lits.insert(v);
    const Universe lu = extend_universe(u, lits);

    auto keyed = [&](const SystemLabel& l, const System& next) {
      return std::make_pair(canonical_label(l, lu), detail::successor_key(next, l.bound));
    };
    std::vector<std::pair<CanonicalLabel, std::string>> want, got;
    for (const auto& [l, s] : expected) want.push_back(keyed(l, s));
    for (const auto& s : asteps) got.push_back(keyed(s.label, s.next));
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) {
      ++rep.step_mismatches;
      std::string d = "step mismatch at " + pretty(cur.term) + "\n  bpi:";
      for (const auto& s : bsteps) d += "\n    " + pretty(s.label) + " -> " + pretty(s.next);
      d += "\n  abc:";
      for (const auto& s : asteps) d += "\n    " + abc::pretty(s.label) + " -> " + abc::pretty(s.next);
      rep.details.push_back(d);
    }

    // Barbs: channels with an output, against AbC outputs whose predicate
    // means tt (as (a=a) does), read through the first transmitted value.
    std::set<std::string> bchans, achans;
    for (const auto& s : bsteps)
      if (s.label.kind == Label::Kind::Out) bchans.insert(s.label.chan);
    const Fingerprint tt = fingerprint(Predicate::tt(), lu);
    for (const auto& s : asteps) {
      if (!s.label.is_out()) continue;
      if (fingerprint(s.label.pred, lu) == tt && !s.label.values.empty() && s.label.values[0].is_name())
        achans.insert(s.label.values[0].as_name().id);
      else
        achans.insert("<non-channel output " + abc::pretty(s.label) + ">");
    }
    if (bchans != achans) {
      ++rep.barb_mismatches;
      rep.details.push_back("barb mismatch at " + pretty(cur.term));
    }

    for (const auto& s : bsteps) {
      if (s.label.kind == Label::Kind::Tau) {
        const std::size_t t = id_of(bids, btau, canonical_key(s.next));
        btau[bi].push_back(t);
      }
    }
    for (const auto& s : asteps) {
      if (s.label.is_tau()) {
        const std::size_t t = id_of(aids, atau, abc::canonical_key(s.next));
        atau[ai].push_back(t);
      }
    }
    if (cur.depth < depth) {
      for (const auto& s : bsteps) queue.push_back({s.next, enc.system(s.next), cur.depth + 1});
    }
  }

  for (const auto& [bi, ai] : pair_ids) {
    if (detail::has_tau_cycle(btau, bi) != detail::has_tau_cycle(atau, ai)) ++rep.divergence_mismatches;
  }
  if (rep.divergence_mismatches) rep.details.push_back("divergence mismatch below " + pretty(p));

  // (Pσ)c = (P)c σ for sampled permutations σ of free names (plus a fresh one).
  NameSet fn = free_names(p);
  std::vector<std::string> pool(fn.begin(), fn.end());
  pool.push_back(fresh_name("fresh", all_names(p)));
  Rng rng(seed);
  for (int k = 0; k < permutations && pool.size() >= 2; ++k) {
    std::vector<std::string> image = pool;
    for (std::size_t i = image.size(); i > 1; --i) std::swap(image[i - 1], image[static_cast<std::size_t>(draw(rng, static_cast<std::int64_t>(i)))]);
    NameMap sigma;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i] != image[i]) sigma[pool[i]] = image[i];
    Encoder e1, e2;
    const std::string lhs = abc::canonical_key(e1.system(subst(p, sigma)));
    const std::string rhs = abc::canonical_key(detail::permute(e2.system(p), sigma));
    if (lhs != rhs) {
      ++rep.invariance_failures;
      rep.details.push_back("encoding not name-invariant for " + pretty(p));
    }
  }
  return rep;
}

}  // namespace abc::bpi
