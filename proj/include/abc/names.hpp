#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "abc/ast.hpp"

// Free/bound names, capture-avoiding substitution and renaming.
//
// Name atoms ('x') and input variables (x) share one name space here, as in
// the calculus: a variable is a name bound by an input prefix. Attribute
// identifiers are never names.

namespace abc {

using NameSet = std::set<std::string>;

namespace detail {

inline void names_of(const Expression& e, NameSet& out, bool include_vars = true) {
  std::visit(overloaded{[&](const expr::Lit& l) { collect_names(l.value, out); },
                        [&](const expr::Var& v) {
                          if (include_vars) out.insert(v.name);
                        },
                        [&](const expr::Attr&) {}, [&](const expr::This&) {},
                        [&](const expr::Arith& a) {
                          names_of(a.lhs, out, include_vars);
                          names_of(a.rhs, out, include_vars);
                        },
                        [&](const expr::Rand&) {}},
             e.node().v);
}

inline void names_of(const Predicate& p, NameSet& out, bool include_vars = true) {
  std::visit(overloaded{[&](const pred::True&) {}, [&](const pred::False&) {},
                        [&](const pred::Cmp& c) {
                          names_of(c.lhs, out, include_vars);
                          names_of(c.rhs, out, include_vars);
                        },
                        [&](const pred::And& a) {
                          names_of(a.lhs, out, include_vars);
                          names_of(a.rhs, out, include_vars);
                        },
                        [&](const pred::Or& o) {
                          names_of(o.lhs, out, include_vars);
                          names_of(o.rhs, out, include_vars);
                        },
                        [&](const pred::Not& n) { names_of(n.arg, out, include_vars); }},
             p.node().v);
}

inline void free_names_into(const Process& p, NameSet& out) {
  std::visit(overloaded{
                 [&](const proc::Nil&) {},
                 [&](const proc::Out& o) {
                   for (const auto& e : o.exprs) names_of(e, out);
                   names_of(o.pred, out);
                   free_names_into(o.cont, out);
                 },
                 [&](const proc::In& i) {
                   NameSet inner;
                   names_of(i.pred, inner);
                   free_names_into(i.cont, inner);
                   for (const auto& x : i.vars) inner.erase(x);
                   out.insert(inner.begin(), inner.end());
                 },
                 [&](const proc::Upd& u) {
                   for (const auto& [a, e] : u.assigns) names_of(e, out);
                   free_names_into(u.cont, out);
                 },
                 [&](const proc::Aware& a) {
                   names_of(a.pred, out);
                   free_names_into(a.cont, out);
                 },
                 [&](const proc::Sum& s) {
                   free_names_into(s.lhs, out);
                   free_names_into(s.rhs, out);
                 },
                 [&](const proc::Par& s) {
                   free_names_into(s.lhs, out);
                   free_names_into(s.rhs, out);
                 },
                 [&](const proc::Call& c) {
                   for (const auto& e : c.args) names_of(e, out);
                 }},
             p.node().v);
}

inline void free_names_into(const System& s, NameSet& out) {
  std::visit(overloaded{[&](const sys::Comp& c) {
                          for (const auto& [a, v] : c.env.bindings()) collect_names(v, out);
                          free_names_into(c.proc, out);
                        },
                        [&](const sys::Par& p) {
                          free_names_into(p.lhs, out);
                          free_names_into(p.rhs, out);
                        },
                        [&](const sys::Bang& b) { free_names_into(b.body, out); },
                        [&](const sys::Nu& n) {
                          NameSet inner;
                          free_names_into(n.body, inner);
                          inner.erase(n.name);
                          out.insert(inner.begin(), inner.end());
                        }},
             s.node().v);
}

inline void bound_names_into(const Process& p, NameSet& out) {
  std::visit(overloaded{[&](const proc::Nil&) {},
                        [&](const proc::Out& o) { bound_names_into(o.cont, out); },
                        [&](const proc::In& i) {
                          out.insert(i.vars.begin(), i.vars.end());
                          bound_names_into(i.cont, out);
                        },
                        [&](const proc::Upd& u) { bound_names_into(u.cont, out); },
                        [&](const proc::Aware& a) { bound_names_into(a.cont, out); },
                        [&](const proc::Sum& s) {
                          bound_names_into(s.lhs, out);
                          bound_names_into(s.rhs, out);
                        },
                        [&](const proc::Par& s) {
                          bound_names_into(s.lhs, out);
                          bound_names_into(s.rhs, out);
                        },
                        [&](const proc::Call&) {}},
             p.node().v);
}

inline void bound_names_into(const System& s, NameSet& out) {
  std::visit(overloaded{[&](const sys::Comp& c) { bound_names_into(c.proc, out); },
                        [&](const sys::Par& p) {
                          bound_names_into(p.lhs, out);
                          bound_names_into(p.rhs, out);
                        },
                        [&](const sys::Bang& b) { bound_names_into(b.body, out); },
                        [&](const sys::Nu& n) {
                          out.insert(n.name);
                          bound_names_into(n.body, out);
                        }},
             s.node().v);
}

}  // namespace detail

/// Names of a predicate, excluding attribute identifiers.
inline NameSet predicate_names(const Predicate& p) {
  NameSet out;
  detail::names_of(p, out);
  return out;
}

inline NameSet expression_names(const Expression& e) {
  NameSet out;
  detail::names_of(e, out);
  return out;
}

inline NameSet free_names(const Process& p) {
  NameSet out;
  detail::free_names_into(p, out);
  return out;
}

/// Free names of a system, including attribute values outside any binder.
inline NameSet free_names(const System& s) {
  NameSet out;
  detail::free_names_into(s, out);
  return out;
}

inline NameSet bound_names(const Process& p) {
  NameSet out;
  detail::bound_names_into(p, out);
  return out;
}

inline NameSet bound_names(const System& s) {
  NameSet out;
  detail::bound_names_into(s, out);
  return out;
}

/// Every name occurring anywhere, free or bound.
inline NameSet all_names(const System& s) {
  NameSet out = free_names(s);
  NameSet b = bound_names(s);
  out.insert(b.begin(), b.end());
  return out;
}

inline NameSet all_names(const Program& prog) {
  NameSet out = all_names(prog.main);
  for (const auto& [id, def] : prog.definitions) {
    NameSet f = free_names(def.body);
    NameSet b = bound_names(def.body);
    out.insert(f.begin(), f.end());
    out.insert(b.begin(), b.end());
    out.insert(def.params.begin(), def.params.end());
  }
  return out;
}

/// Smallest `base_k` (or `base` itself) not in `avoid`.
inline std::string fresh_name(const std::string& base, const NameSet& avoid) {
  std::string stem = base;
  if (auto pos = stem.rfind('_'); pos != std::string::npos && pos + 1 < stem.size() &&
                                  stem.find_first_not_of("0123456789", pos + 1) == std::string::npos) {
    stem = stem.substr(0, pos);
  }
  if (!avoid.count(stem)) return stem;
  for (int k = 1;; ++k) {
    std::string candidate = stem + "_" + std::to_string(k);
    if (!avoid.count(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Substitution of values for variables.

using Substitution = std::map<std::string, Value>;

inline Expression substitute(const Expression& e, const Substitution& s) {
  if (s.empty()) return e;
  return std::visit(
      overloaded{[&](const expr::Var& v) -> Expression {
                   auto it = s.find(v.name);
                   return it == s.end() ? e : Expression::lit(it->second);
                 },
                 [&](const expr::Arith& a) -> Expression {
                   return Expression::arith(a.op, substitute(a.lhs, s), substitute(a.rhs, s));
                 },
                 [&](const auto&) -> Expression { return e; }},
      e.node().v);
}

inline Predicate substitute(const Predicate& p, const Substitution& s) {
  if (s.empty()) return p;
  return std::visit(
      overloaded{[&](const pred::Cmp& c) -> Predicate {
                   return Predicate::cmp(c.op, substitute(c.lhs, s), substitute(c.rhs, s));
                 },
                 [&](const pred::And& a) -> Predicate {
                   return Predicate::conj(substitute(a.lhs, s), substitute(a.rhs, s));
                 },
                 [&](const pred::Or& o) -> Predicate {
                   return Predicate::disj(substitute(o.lhs, s), substitute(o.rhs, s));
                 },
                 [&](const pred::Not& n) -> Predicate { return Predicate::neg(substitute(n.arg, s)); },
                 [&](const auto&) -> Predicate { return p; }},
      p.node().v);
}

inline std::vector<Expression> substitute(const std::vector<Expression>& es, const Substitution& s) {
  std::vector<Expression> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(substitute(e, s));
  return out;
}

/// Replaces free occurrences of the variables in `s` by their values.
/// Values are closed, so only shadowing by an inner input needs care.
inline Process substitute(const Process& p, const Substitution& s) {
  if (s.empty()) return p;
  return std::visit(
      overloaded{
          [&](const proc::Nil&) { return p; },
          [&](const proc::Out& o) {
            return Process::out(substitute(o.exprs, s), substitute(o.pred, s), substitute(o.cont, s));
          },
          [&](const proc::In& i) {
            Substitution inner = s;
            for (const auto& x : i.vars) inner.erase(x);
            return Process::in(substitute(i.pred, inner), i.vars, substitute(i.cont, inner));
          },
          [&](const proc::Upd& u) {
            std::vector<Assignment> assigns;
            for (const auto& [a, e] : u.assigns) assigns.emplace_back(a, substitute(e, s));
            return Process::upd(std::move(assigns), substitute(u.cont, s));
          },
          [&](const proc::Aware& a) {
            return Process::aware(substitute(a.pred, s), substitute(a.cont, s));
          },
          [&](const proc::Sum& x) { return Process::sum(substitute(x.lhs, s), substitute(x.rhs, s)); },
          [&](const proc::Par& x) { return Process::par(substitute(x.lhs, s), substitute(x.rhs, s)); },
          [&](const proc::Call& c) { return Process::call(c.name, substitute(c.args, s)); }},
      p.node().v);
}

// ---------------------------------------------------------------------------
// Renaming of name atoms.

inline Expression rename_name(const Expression& e, const std::string& from, const std::string& to) {
  return std::visit(
      overloaded{[&](const expr::Lit& l) { return Expression::lit(rename_value(l.value, from, to)); },
                 [&](const expr::Arith& a) {
                   return Expression::arith(a.op, rename_name(a.lhs, from, to),
                                            rename_name(a.rhs, from, to));
                 },
                 [&](const auto&) { return e; }},
      e.node().v);
}

inline Predicate rename_name(const Predicate& p, const std::string& from, const std::string& to) {
  return std::visit(
      overloaded{[&](const pred::Cmp& c) {
                   return Predicate::cmp(c.op, rename_name(c.lhs, from, to), rename_name(c.rhs, from, to));
                 },
                 [&](const pred::And& a) {
                   return Predicate::conj(rename_name(a.lhs, from, to), rename_name(a.rhs, from, to));
                 },
                 [&](const pred::Or& o) {
                   return Predicate::disj(rename_name(o.lhs, from, to), rename_name(o.rhs, from, to));
                 },
                 [&](const pred::Not& n) { return Predicate::neg(rename_name(n.arg, from, to)); },
                 [&](const auto&) { return p; }},
      p.node().v);
}

/// Renames the name atom `from` to `to` in a process. Variables are distinct
/// syntax from name literals, so input prefixes cannot capture.
inline Process rename_name(const Process& p, const std::string& from, const std::string& to) {
  auto exprs = [&](const std::vector<Expression>& es) {
    std::vector<Expression> out;
    for (const auto& e : es) out.push_back(rename_name(e, from, to));
    return out;
  };
  return std::visit(
      overloaded{
          [&](const proc::Nil&) { return p; },
          [&](const proc::Out& o) {
            return Process::out(exprs(o.exprs), rename_name(o.pred, from, to),
                                rename_name(o.cont, from, to));
          },
          [&](const proc::In& i) {
            return Process::in(rename_name(i.pred, from, to), i.vars, rename_name(i.cont, from, to));
          },
          [&](const proc::Upd& u) {
            std::vector<Assignment> assigns;
            for (const auto& [a, e] : u.assigns) assigns.emplace_back(a, rename_name(e, from, to));
            return Process::upd(std::move(assigns), rename_name(u.cont, from, to));
          },
          [&](const proc::Aware& a) {
            return Process::aware(rename_name(a.pred, from, to), rename_name(a.cont, from, to));
          },
          [&](const proc::Sum& x) {
            return Process::sum(rename_name(x.lhs, from, to), rename_name(x.rhs, from, to));
          },
          [&](const proc::Par& x) {
            return Process::par(rename_name(x.lhs, from, to), rename_name(x.rhs, from, to));
          },
          [&](const proc::Call& c) { return Process::call(c.name, exprs(c.args)); }},
      p.node().v);
}

inline AttributeEnv rename_name(const AttributeEnv& env, const std::string& from, const std::string& to) {
  std::map<std::string, Value> out;
  for (const auto& [a, v] : env.bindings()) out.emplace(a, rename_value(v, from, to));
  return AttributeEnv(std::move(out));
}

/// Capture-avoiding replacement of the free name `from` by `to` in a system.
/// An inner binder named `to` is renamed away first.
inline System rename_name(const System& s, const std::string& from, const std::string& to) {
  if (from == to) return s;
  return std::visit(
      overloaded{[&](const sys::Comp& c) {
                   return System::comp(rename_name(c.env, from, to), rename_name(c.proc, from, to));
                 },
                 [&](const sys::Par& p) {
                   return System::par(rename_name(p.lhs, from, to), rename_name(p.rhs, from, to));
                 },
                 [&](const sys::Bang& b) { return System::bang(rename_name(b.body, from, to), b.unfolded); },
                 [&](const sys::Nu& n) -> System {
                   if (n.name == from) return s;
                   if (n.name == to) {
                     NameSet avoid = all_names(n.body);
                     avoid.insert(from);
                     avoid.insert(to);
                     std::string fresh = fresh_name(n.name, avoid);
                     System body = rename_name(n.body, n.name, fresh);
                     return System::nu(fresh, rename_name(body, from, to));
                   }
                   return System::nu(n.name, rename_name(n.body, from, to));
                 }},
      s.node().v);
}

/// α-renames the outermost binder `old` occurring in `sys` to `fresh`.
/// `fresh` must not occur in `sys`.
inline System alpha_rename(const System& s, const std::string& old, const std::string& fresh) {
  return std::visit(
      overloaded{[&](const sys::Nu& n) -> System {
                   if (n.name == old) return System::nu(fresh, rename_name(n.body, old, fresh));
                   return System::nu(n.name, alpha_rename(n.body, old, fresh));
                 },
                 [&](const sys::Par& p) {
                   return System::par(alpha_rename(p.lhs, old, fresh), alpha_rename(p.rhs, old, fresh));
                 },
                 [&](const sys::Bang& b) { return System::bang(alpha_rename(b.body, old, fresh), b.unfolded); },
                 [&](const sys::Comp&) { return s; }},
      s.node().v);
}

}  // namespace abc
