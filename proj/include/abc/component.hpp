#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "abc/ast.hpp"
#include "abc/attributes.hpp"
#include "abc/labels.hpp"
#include "abc/names.hpp"

// Component semantics: outputs derivable by Γ:P, and delivery of a message to
// Γ:P (receive or discard).

namespace abc {

using Definitions = std::map<std::string, Definition>;

class SemanticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputStep {
  Predicate pred;  // closed: no this-references left
  std::vector<Value> values;
  AttributeEnv env;
  Process proc;
};

struct Delivery {
  std::vector<std::pair<AttributeEnv, Process>> receives;  // empty ⇔ discard
  bool discards() const { return receives.empty(); }
};

namespace detail {

constexpr int kMaxUnfold = 64;

// Unfolds a call under `env`. std::nullopt when an argument is undefined.
inline std::optional<Process> unfold(const proc::Call& c, const AttributeEnv& env, const Definitions& defs,
                                     Rng* rng) {
  auto it = defs.find(c.name);
  if (it == defs.end()) throw SemanticsError("unknown definition '" + c.name + "'");
  const Definition& def = it->second;
  if (def.params.size() != c.args.size()) throw SemanticsError("arity mismatch calling '" + c.name + "'");
  Substitution sub;
  for (std::size_t i = 0; i < c.args.size(); ++i) {
    auto v = eval_expr(c.args[i], env, rng);
    if (!v) return std::nullopt;
    sub[def.params[i]] = *v;
  }
  return substitute(def.body, sub);
}

inline std::optional<std::vector<std::pair<std::string, Value>>> eval_assigns(const std::vector<Assignment>& as,
                                                                              const AttributeEnv& env, Rng* rng) {
  std::vector<std::pair<std::string, Value>> out;
  for (const auto& [a, e] : as) {
    auto v = eval_expr(e, env, rng);
    if (!v) return std::nullopt;
    out.emplace_back(a, *v);
  }
  return out;
}

inline void outputs(const AttributeEnv& env, const Process& p, const Definitions& defs, Rng* rng, int depth,
                    std::vector<OutputStep>& out) {
  if (depth > kMaxUnfold) throw SemanticsError("unguarded recursion while unfolding " + pretty(p));
  std::visit(overloaded{
                 [&](const proc::Nil&) {},
                 [&](const proc::In&) {},
                 [&](const proc::Out& o) {  // Brd
                   std::vector<Value> values;
                   for (const auto& e : o.exprs) {
                     auto v = eval_expr(e, env, rng);
                     if (!v) return;
                     values.push_back(*v);
                   }
                   auto closed = close_predicate(o.pred, env);
                   if (!closed) return;
                   out.push_back({*closed, std::move(values), env, o.cont});
                 },
                 [&](const proc::Upd& u) {  // Upd: the action runs under Γ[ã ↦ ṽ]
                   auto assigns = eval_assigns(u.assigns, env, rng);
                   if (!assigns) return;
                   outputs(update_env(env, *assigns), u.cont, defs, rng, depth, out);
                 },
                 [&](const proc::Aware& a) {
                   if (satisfies(env, a.pred)) outputs(env, a.cont, defs, rng, depth, out);
                 },
                 [&](const proc::Sum& s) {
                   outputs(env, s.lhs, defs, rng, depth, out);
                   outputs(env, s.rhs, defs, rng, depth, out);
                 },
                 [&](const proc::Par& s) {  // Int and its symmetric variant
                   std::vector<OutputStep> left;
                   outputs(env, s.lhs, defs, rng, depth, left);
                   for (auto& st : left) {
                     st.proc = Process::par(st.proc, s.rhs);
                     out.push_back(std::move(st));
                   }
                   std::vector<OutputStep> right;
                   outputs(env, s.rhs, defs, rng, depth, right);
                   for (auto& st : right) {
                     st.proc = Process::par(s.lhs, st.proc);
                     out.push_back(std::move(st));
                   }
                 },
                 [&](const proc::Call& c) {  // Rec
                   auto body = unfold(c, env, defs, rng);
                   if (body) outputs(env, *body, defs, rng, depth + 1, out);
                 }},
             p.node().v);
}

inline void deliver(const AttributeEnv& env, const Process& p, const Definitions& defs,
                    const Predicate& sender_pred, const std::vector<Value>& values, Rng* rng, int depth,
                    Delivery& out) {
  if (depth > kMaxUnfold) throw SemanticsError("unguarded recursion while unfolding " + pretty(p));
  std::visit(
      overloaded{
          [&](const proc::Nil&) {},  // FZero
          [&](const proc::Out&) {},  // FBrd
          [&](const proc::In& i) {   // Rcv / FRcv
            if (i.vars.size() != values.size()) return;
            Substitution sub;
            for (std::size_t k = 0; k < values.size(); ++k) sub[i.vars[k]] = values[k];
            if (satisfies(env, substitute(i.pred, sub)) && satisfies(env, sender_pred)) {
              out.receives.emplace_back(env, substitute(i.cont, sub));
            }
          },
          [&](const proc::Upd& u) {  // Upd / FUpd
            auto assigns = eval_assigns(u.assigns, env, rng);
            if (!assigns) return;
            deliver(update_env(env, *assigns), u.cont, defs, sender_pred, values, rng, depth, out);
          },
          [&](const proc::Aware& a) {  // Aware / FAware1 / FAware2
            if (satisfies(env, a.pred)) deliver(env, a.cont, defs, sender_pred, values, rng, depth, out);
          },
          [&](const proc::Sum& s) {  // Sum / FSum
            deliver(env, s.lhs, defs, sender_pred, values, rng, depth, out);
            deliver(env, s.rhs, defs, sender_pred, values, rng, depth, out);
          },
          [&](const proc::Par& s) {  // Int / FInt: exactly one thread receives
            Delivery left;
            deliver(env, s.lhs, defs, sender_pred, values, rng, depth, left);
            for (auto& [e, q] : left.receives) out.receives.emplace_back(e, Process::par(q, s.rhs));
            Delivery right;
            deliver(env, s.rhs, defs, sender_pred, values, rng, depth, right);
            for (auto& [e, q] : right.receives) out.receives.emplace_back(e, Process::par(s.lhs, q));
          },
          [&](const proc::Call& c) {
            auto body = unfold(c, env, defs, rng);
            if (body) deliver(env, *body, defs, sender_pred, values, rng, depth + 1, out);
          }},
      p.node().v);
}

}  // namespace detail

/// Every output Γ:P can perform, with updates and awareness guards applied
/// atomically together with the action they prefix.
inline std::vector<OutputStep> output_steps(const AttributeEnv& env, const Process& p, const Definitions& defs,
                                            Rng* rng = nullptr) {
  std::vector<OutputStep> out;
  detail::outputs(env, p, defs, rng, 0, out);
  return out;
}

/// Delivers the message `sender_pred(values)` to Γ:P. Either a nonempty list
/// of receive outcomes or a discard (the component stays unchanged).
inline Delivery deliver(const AttributeEnv& env, const Process& p, const Definitions& defs,
                        const Predicate& sender_pred, const std::vector<Value>& values, Rng* rng = nullptr) {
  Delivery out;
  detail::deliver(env, p, defs, sender_pred, values, rng, 0, out);
  return out;
}

}  // namespace abc
