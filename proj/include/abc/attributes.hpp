#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "abc/ast.hpp"
#include "abc/names.hpp"
#include "abc/printer.hpp"

namespace abc {

/// The run-level generator behind rand(n). Draws are `gen() % n`, which is
/// stable across standard libraries (unlike std::uniform_int_distribution).
using Rng = std::mt19937_64;

inline std::int64_t draw(Rng& rng, std::int64_t bound) {
  return static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(bound));
}

namespace detail {

inline std::optional<Value> arith(ArithOp op, const Value& a, const Value& b) {
  if (!a.is_int() || !b.is_int()) return std::nullopt;
  const std::int64_t x = a.as_int();
  const std::int64_t y = b.as_int();
  switch (op) {
    case ArithOp::Add: return Value::integer(x + y);
    case ArithOp::Sub: return Value::integer(x - y);
    case ArithOp::Mul: return Value::integer(x * y);
  }
  return std::nullopt;
}

inline bool compare(CmpOp op, const Value& a, const Value& b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return !(a == b);
    default: break;
  }
  if (!a.is_int() || !b.is_int()) return false;
  const std::int64_t x = a.as_int();
  const std::int64_t y = b.as_int();
  switch (op) {
    case CmpOp::Lt: return x < y;
    case CmpOp::Le: return x <= y;
    case CmpOp::Gt: return x > y;
    case CmpOp::Ge: return x >= y;
    default: return false;
  }
}

// Evaluation parameterized by attribute lookup so the fingerprint enumerator
// can avoid building maps.
template <class Lookup>
std::optional<Value> eval_with(const Expression& e, const Lookup& lookup, Rng* rng) {
  return std::visit(overloaded{[&](const expr::Lit& l) -> std::optional<Value> { return l.value; },
                               [&](const expr::Var&) -> std::optional<Value> { return std::nullopt; },
                               [&](const expr::Attr& a) -> std::optional<Value> { return lookup(a.name); },
                               [&](const expr::This& t) -> std::optional<Value> { return lookup(t.name); },
                               [&](const expr::Arith& a) -> std::optional<Value> {
                                 auto l = eval_with(a.lhs, lookup, rng);
                                 if (!l) return std::nullopt;
                                 auto r = eval_with(a.rhs, lookup, rng);
                                 if (!r) return std::nullopt;
                                 return arith(a.op, *l, *r);
                               },
                               [&](const expr::Rand& r) -> std::optional<Value> {
                                 if (!rng || r.bound <= 0) return std::nullopt;
                                 return Value::integer(draw(*rng, r.bound));
                               }},
                    e.node().v);
}

template <class Lookup>
bool satisfies_with(const Predicate& p, const Lookup& lookup) {
  return std::visit(overloaded{[&](const pred::True&) { return true; },
                               [&](const pred::False&) { return false; },
                               [&](const pred::Cmp& c) {
                                 auto l = eval_with(c.lhs, lookup, nullptr);
                                 if (!l) return false;
                                 auto r = eval_with(c.rhs, lookup, nullptr);
                                 if (!r) return false;
                                 return compare(c.op, *l, *r);
                               },
                               [&](const pred::And& a) {
                                 return satisfies_with(a.lhs, lookup) && satisfies_with(a.rhs, lookup);
                               },
                               [&](const pred::Or& o) {
                                 return satisfies_with(o.lhs, lookup) || satisfies_with(o.rhs, lookup);
                               },
                               [&](const pred::Not& n) { return !satisfies_with(n.arg, lookup); }},
                    p.node().v);
}

}  // namespace detail

/// Evaluates a closed expression locally: `a` and `this.a` both read env(a).
/// std::nullopt is the Undefined outcome (unbound attribute, free variable,
/// arithmetic on non-integers).
inline std::optional<Value> eval_expr(const Expression& e, const AttributeEnv& env, Rng* rng = nullptr) {
  return detail::eval_with(e, [&](const std::string& a) { return env.lookup(a); }, rng);
}

inline bool satisfies(const AttributeEnv& env, const Predicate& p) {
  return detail::satisfies_with(p, [&](const std::string& a) { return env.lookup(a); });
}

/// Replaces every `this.a` by the sender's value. std::nullopt if some
/// referenced attribute is unbound.
inline std::optional<Expression> close_expression(const Expression& e, const AttributeEnv& env) {
  return std::visit(overloaded{[&](const expr::This& t) -> std::optional<Expression> {
                                 auto v = env.lookup(t.name);
                                 if (!v) return std::nullopt;
                                 return Expression::lit(*v);
                               },
                               [&](const expr::Arith& a) -> std::optional<Expression> {
                                 auto l = close_expression(a.lhs, env);
                                 auto r = close_expression(a.rhs, env);
                                 if (!l || !r) return std::nullopt;
                                 return Expression::arith(a.op, *l, *r);
                               },
                               [&](const auto&) -> std::optional<Expression> { return e; }},
                    e.node().v);
}

inline std::optional<Predicate> close_predicate(const Predicate& p, const AttributeEnv& env) {
  return std::visit(
      overloaded{[&](const pred::Cmp& c) -> std::optional<Predicate> {
                   auto l = close_expression(c.lhs, env);
                   auto r = close_expression(c.rhs, env);
                   if (!l || !r) return std::nullopt;
                   return Predicate::cmp(c.op, *l, *r);
                 },
                 [&](const pred::And& a) -> std::optional<Predicate> {
                   auto l = close_predicate(a.lhs, env);
                   auto r = close_predicate(a.rhs, env);
                   if (!l || !r) return std::nullopt;
                   return Predicate::conj(*l, *r);
                 },
                 [&](const pred::Or& o) -> std::optional<Predicate> {
                   auto l = close_predicate(o.lhs, env);
                   auto r = close_predicate(o.rhs, env);
                   if (!l || !r) return std::nullopt;
                   return Predicate::disj(*l, *r);
                 },
                 [&](const pred::Not& n) -> std::optional<Predicate> {
                   auto a = close_predicate(n.arg, env);
                   if (!a) return std::nullopt;
                   return Predicate::neg(*a);
                 },
                 [&](const auto&) -> std::optional<Predicate> { return p; }},
      p.node().v);
}

/// Π ▶ x: atoms mentioning the name x become ff; connectives are kept.
inline Predicate restrict_predicate(const Predicate& p, const std::string& x) {
  return std::visit(
      overloaded{[&](const pred::Cmp&) -> Predicate {
                   return predicate_names(p).count(x) ? Predicate::ff() : p;
                 },
                 [&](const pred::And& a) -> Predicate {
                   return Predicate::conj(restrict_predicate(a.lhs, x), restrict_predicate(a.rhs, x));
                 },
                 [&](const pred::Or& o) -> Predicate {
                   return Predicate::disj(restrict_predicate(o.lhs, x), restrict_predicate(o.rhs, x));
                 },
                 [&](const pred::Not& n) -> Predicate { return Predicate::neg(restrict_predicate(n.arg, x)); },
                 [&](const auto&) -> Predicate { return p; }},
      p.node().v);
}

/// Γ[ã ↦ ṽ], applied left to right (the last write to an id wins).
inline AttributeEnv update_env(const AttributeEnv& env, const std::vector<std::pair<std::string, Value>>& assigns) {
  AttributeEnv out = env;
  for (const auto& [a, v] : assigns) out = out.with(a, v);
  return out;
}

// ---------------------------------------------------------------------------
// Semantic equivalence over a finite universe.

class UniverseTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Fingerprint {
  std::vector<std::string> attrs;  // attributes the predicate actually depends on
  std::vector<bool> bits;          // truth table over domain^attrs, row-major

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

inline std::string to_string(const Fingerprint& f) {
  std::string out = "[";
  for (std::size_t i = 0; i < f.attrs.size(); ++i) out += (i ? "," : "") + f.attrs[i];
  out += "]";
  for (bool b : f.bits) out.push_back(b ? '1' : '0');
  return out;
}

struct Universe {
  std::set<Value> values;
  std::string witness = "w";
  std::set<std::string> attrs;
  std::uint64_t budget = 1'000'000;

  struct Cache {
    std::map<std::string, Fingerprint> fingerprints;
    std::map<std::string, bool> ff;
  };
  std::shared_ptr<Cache> cache = std::make_shared<Cache>();

  /// Enumeration domain: values, the witness, booleans, and the integer
  /// neighbours c-1, c+1 so that ordering thresholds are separated.
  std::vector<Value> domain() const {
    std::set<Value> d = values;
    d.insert(Value::name(witness));
    d.insert(Value::boolean(true));
    d.insert(Value::boolean(false));
    for (const auto& v : values) {
      if (v.is_int()) {
        d.insert(Value::integer(v.as_int() - 1));
        d.insert(Value::integer(v.as_int() + 1));
      }
    }
    return {d.begin(), d.end()};
  }
};

namespace detail {

inline void literals_of(const Expression& e, std::set<Value>& out) {
  std::visit(overloaded{[&](const expr::Lit& l) {
                          out.insert(l.value);
                          if (l.value.is_tuple())
                            for (const auto& item : l.value.as_tuple()) out.insert(item);
                        },
                        [&](const expr::Arith& a) {
                          literals_of(a.lhs, out);
                          literals_of(a.rhs, out);
                        },
                        [&](const auto&) {}},
             e.node().v);
}

inline void literals_of(const Predicate& p, std::set<Value>& out) {
  std::visit(overloaded{[&](const pred::Cmp& c) {
                          literals_of(c.lhs, out);
                          literals_of(c.rhs, out);
                        },
                        [&](const pred::And& a) {
                          literals_of(a.lhs, out);
                          literals_of(a.rhs, out);
                        },
                        [&](const pred::Or& o) {
                          literals_of(o.lhs, out);
                          literals_of(o.rhs, out);
                        },
                        [&](const pred::Not& n) { literals_of(n.arg, out); }, [&](const auto&) {}},
             p.node().v);
}

inline void attrs_of(const Expression& e, std::set<std::string>& out) {
  std::visit(overloaded{[&](const expr::Attr& a) { out.insert(a.name); },
                        [&](const expr::This& t) { out.insert(t.name); },
                        [&](const expr::Arith& a) {
                          attrs_of(a.lhs, out);
                          attrs_of(a.rhs, out);
                        },
                        [&](const auto&) {}},
             e.node().v);
}

inline void attrs_of(const Predicate& p, std::set<std::string>& out) {
  std::visit(overloaded{[&](const pred::Cmp& c) {
                          attrs_of(c.lhs, out);
                          attrs_of(c.rhs, out);
                        },
                        [&](const pred::And& a) {
                          attrs_of(a.lhs, out);
                          attrs_of(a.rhs, out);
                        },
                        [&](const pred::Or& o) {
                          attrs_of(o.lhs, out);
                          attrs_of(o.rhs, out);
                        },
                        [&](const pred::Not& n) { attrs_of(n.arg, out); }, [&](const auto&) {}},
             p.node().v);
}

// Truth table of `p` over (domain ∪ {unbound})^attrs. Index of a point is
// mixed radix with the first attribute most significant; digit 0 = unbound.
inline std::vector<bool> truth_table(const Predicate& p, const std::vector<std::string>& attrs,
                                     const std::vector<Value>& domain, std::uint64_t budget) {
  const std::size_t radix = domain.size() + 1;
  std::uint64_t points = 1;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (points > budget / radix) {
      throw UniverseTooLarge("predicate " + pretty(p) + " needs more than " + std::to_string(budget) +
                             " environments");
    }
    points *= radix;
  }
  std::vector<std::size_t> digits(attrs.size(), 0);
  std::vector<bool> bits(points);
  auto lookup = [&](const std::string& a) -> std::optional<Value> {
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (attrs[i] == a) {
        if (digits[i] == 0) return std::nullopt;
        return domain[digits[i] - 1];
      }
    }
    return std::nullopt;
  };
  for (std::uint64_t idx = 0; idx < points; ++idx) {
    bits[idx] = satisfies_with(p, lookup);
    for (std::size_t i = attrs.size(); i-- > 0;) {
      if (++digits[i] < radix) break;
      digits[i] = 0;
    }
  }
  return bits;
}

// Drops every attribute the table does not depend on.
inline Fingerprint reduce(std::vector<std::string> attrs, std::vector<bool> bits, std::size_t radix) {
  for (std::size_t i = 0; i < attrs.size();) {
    std::size_t inner = 1;  // stride of digit i
    for (std::size_t j = i + 1; j < attrs.size(); ++j) inner *= radix;
    const std::size_t block = inner * radix;
    bool relevant = false;
    for (std::size_t base = 0; base < bits.size() && !relevant; base += block) {
      for (std::size_t off = 0; off < inner && !relevant; ++off) {
        const bool first = bits[base + off];
        for (std::size_t d = 1; d < radix; ++d) {
          if (bits[base + d * inner + off] != first) {
            relevant = true;
            break;
          }
        }
      }
    }
    if (relevant) {
      ++i;
      continue;
    }
    std::vector<bool> projected;
    projected.reserve(bits.size() / radix);
    for (std::size_t base = 0; base < bits.size(); base += block) {
      for (std::size_t off = 0; off < inner; ++off) projected.push_back(bits[base + off]);
    }
    bits = std::move(projected);
    attrs.erase(attrs.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return {std::move(attrs), std::move(bits)};
}

}  // namespace detail

/// Literal values occurring in a predicate (tuple components included).
inline std::set<Value> predicate_literals(const Predicate& p) {
  std::set<Value> out;
  detail::literals_of(p, out);
  return out;
}

inline std::set<std::string> predicate_attrs(const Predicate& p) {
  std::set<std::string> out;
  detail::attrs_of(p, out);
  return out;
}

/// Universe `u` enlarged by extra values; starts a fresh cache.
inline Universe extend_universe(const Universe& u, const std::set<Value>& extra) {
  Universe out = u;
  out.cache = std::make_shared<Universe::Cache>();
  for (const auto& v : extra) {
    out.values.insert(v);
    if (v.is_tuple())
      for (const auto& item : v.as_tuple()) out.values.insert(item);
  }
  NameSet avoid;
  for (const auto& v : out.values) collect_names(v, avoid);
  if (avoid.count(out.witness)) out.witness = fresh_name(out.witness, avoid);
  return out;
}

/// Canonical semantic key of a closed predicate over the universe domain.
/// Equal fingerprints under one universe ⇔ equal satisfaction on every
/// environment drawn from that domain.
inline Fingerprint fingerprint(const Predicate& p, const Universe& u) {
  const std::string key = pretty(p);
  if (u.cache) {
    auto it = u.cache->fingerprints.find(key);
    if (it != u.cache->fingerprints.end()) return it->second;
  }
  const auto attr_set = predicate_attrs(p);
  std::vector<std::string> attrs(attr_set.begin(), attr_set.end());
  const auto domain = u.domain();
  Fingerprint f = detail::reduce(attrs, detail::truth_table(p, attrs, domain, u.budget), domain.size() + 1);
  if (u.cache) u.cache->fingerprints.emplace(key, f);
  return f;
}

inline bool semantically_equiv(const Predicate& a, const Predicate& b, const Universe& u) {
  std::set<Value> lits = predicate_literals(a);
  auto more = predicate_literals(b);
  lits.insert(more.begin(), more.end());
  bool covered = true;
  for (const auto& v : lits) covered = covered && u.values.count(v);
  if (covered) return fingerprint(a, u) == fingerprint(b, u);
  const Universe wide = extend_universe(u, lits);
  return fingerprint(a, wide) == fingerprint(b, wide);
}

inline bool is_ff(const Predicate& p, const Universe& u) {
  if (std::holds_alternative<pred::False>(p.node().v)) return true;
  if (std::holds_alternative<pred::True>(p.node().v)) return false;
  const std::string key = pretty(p);
  if (u.cache) {
    auto it = u.cache->ff.find(key);
    if (it != u.cache->ff.end()) return it->second;
  }
  const bool result = semantically_equiv(p, Predicate::ff(), u);
  if (u.cache) u.cache->ff.emplace(key, result);
  return result;
}

inline bool is_tt(const Predicate& p, const Universe& u) { return semantically_equiv(p, Predicate::tt(), u); }

// ---------------------------------------------------------------------------
// Universe construction from a program.

namespace detail {

inline void universe_of(const Process& p, std::set<Value>& vals, std::set<std::string>& attrs) {
  std::visit(overloaded{[&](const proc::Nil&) {},
                        [&](const proc::Out& o) {
                          for (const auto& e : o.exprs) {
                            literals_of(e, vals);
                            attrs_of(e, attrs);
                          }
                          literals_of(o.pred, vals);
                          attrs_of(o.pred, attrs);
                          universe_of(o.cont, vals, attrs);
                        },
                        [&](const proc::In& i) {
                          literals_of(i.pred, vals);
                          attrs_of(i.pred, attrs);
                          universe_of(i.cont, vals, attrs);
                        },
                        [&](const proc::Upd& u) {
                          for (const auto& [a, e] : u.assigns) {
                            attrs.insert(a);
                            literals_of(e, vals);
                            attrs_of(e, attrs);
                          }
                          universe_of(u.cont, vals, attrs);
                        },
                        [&](const proc::Aware& a) {
                          literals_of(a.pred, vals);
                          attrs_of(a.pred, attrs);
                          universe_of(a.cont, vals, attrs);
                        },
                        [&](const proc::Sum& s) {
                          universe_of(s.lhs, vals, attrs);
                          universe_of(s.rhs, vals, attrs);
                        },
                        [&](const proc::Par& s) {
                          universe_of(s.lhs, vals, attrs);
                          universe_of(s.rhs, vals, attrs);
                        },
                        [&](const proc::Call& c) {
                          for (const auto& e : c.args) {
                            literals_of(e, vals);
                            attrs_of(e, attrs);
                          }
                        }},
             p.node().v);
}

inline void universe_of(const System& s, std::set<Value>& vals, std::set<std::string>& attrs) {
  std::visit(overloaded{[&](const sys::Comp& c) {
                          for (const auto& [a, v] : c.env.bindings()) {
                            attrs.insert(a);
                            vals.insert(v);
                            if (v.is_tuple())
                              for (const auto& item : v.as_tuple()) vals.insert(item);
                          }
                          universe_of(c.proc, vals, attrs);
                        },
                        [&](const sys::Par& p) {
                          universe_of(p.lhs, vals, attrs);
                          universe_of(p.rhs, vals, attrs);
                        },
                        [&](const sys::Bang& b) { universe_of(b.body, vals, attrs); },
                        [&](const sys::Nu& n) {
                          vals.insert(Value::name(n.name));
                          universe_of(n.body, vals, attrs);
                        }},
             s.node().v);
}

}  // namespace detail

/// Every literal and attribute value of the program, plus `extra`, and a
/// witness name occurring nowhere in the program.
inline Universe make_universe(const Program& prog, const std::vector<Value>& extra = {},
                              std::uint64_t budget = 1'000'000) {
  Universe u;
  u.budget = budget;
  detail::universe_of(prog.main, u.values, u.attrs);
  for (const auto& [id, def] : prog.definitions) detail::universe_of(def.body, u.values, u.attrs);
  u.attrs.insert(prog.declared_attrs.begin(), prog.declared_attrs.end());
  for (const auto& v : extra) u.values.insert(v);
  NameSet avoid = all_names(prog);
  for (const auto& v : u.values) collect_names(v, avoid);
  u.witness = fresh_name("w", avoid);
  return u;
}

}  // namespace abc
