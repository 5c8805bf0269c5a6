#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "abc/ast.hpp"
#include "abc/attributes.hpp"
#include "abc/component.hpp"
#include "abc/labels.hpp"
#include "abc/names.hpp"
#include "abc/printer.hpp"

// System semantics: Comp, C-Fail, Rep, τ-Int, Res, Sync, Com, Hide1, Hide2, Open.

namespace abc {

struct StepOptions {
  int repl_bound = 2;
  std::size_t max_combinations = 100'000;
};

struct SystemStep {
  SystemLabel label;
  System next;
};

struct StepResult {
  std::vector<SystemStep> steps;
  bool truncated = false;
  std::string reason;
};

namespace detail {

inline void count_binders(const System& s, std::map<std::string, int>& out) {
  std::visit(overloaded{[&](const sys::Comp&) {},
                        [&](const sys::Par& p) {
                          count_binders(p.lhs, out);
                          count_binders(p.rhs, out);
                        },
                        [&](const sys::Bang& b) { count_binders(b.body, out); },
                        [&](const sys::Nu& n) {
                          ++out[n.name];
                          count_binders(n.body, out);
                        }},
             s.node().v);
}

inline NameSet definition_names(const Definitions& defs) {
  NameSet out;
  for (const auto& [id, def] : defs) {
    NameSet f = free_names(def.body);
    for (const auto& x : f) {
      if (std::find(def.params.begin(), def.params.end(), x) == def.params.end()) out.insert(x);
    }
  }
  return out;
}

struct Received {
  std::vector<System> states;
  bool discarded = true;
};

class Stepper {
 public:
  Stepper(const System& top, const Definitions& defs, const Universe& u, const StepOptions& opts, Rng* rng,
          StepResult& result)
      : defs_(defs), u_(u), opts_(opts), rng_(rng), result_(result) {
    taken_ = all_names(top);
    NameSet dn = definition_names(defs);
    taken_.insert(dn.begin(), dn.end());
    visible_ = free_names(top);
    visible_.insert(dn.begin(), dn.end());
    count_binders(top, binders_);
  }

  std::vector<SystemStep> outputs(const System& s) {
    return std::visit([&](const auto& n) { return outputs_of(n, s); }, s.node().v);
  }

  Received receive(const System& s, const Predicate& pred, const std::vector<Value>& values) {
    return std::visit([&](const auto& n) { return receive_of(n, s, pred, values); }, s.node().v);
  }

 private:
  void truncate(const std::string& why) {
    if (!result_.truncated) result_.reason = why;
    result_.truncated = true;
  }

  // Comp + τ-Int at the source: ff-sends become τ.
  std::vector<SystemStep> outputs_of(const sys::Comp& c, const System&) {
    std::vector<SystemStep> out;
    for (auto& st : output_steps(c.env, c.proc, defs_, rng_)) {
      System next = System::comp(st.env, st.proc);
      if (is_ff(st.pred, u_)) {
        out.push_back({SystemLabel::tau(), next});
      } else {
        out.push_back({SystemLabel::out({}, st.pred, st.values), next});
      }
    }
    return out;
  }

  // τ-Int and Com, both orientations. The sibling takes its unique
  // receive/discard outcome (Sync, C-Fail).
  std::vector<SystemStep> outputs_of(const sys::Par& p, const System&) {
    std::vector<SystemStep> out;
    auto side = [&](const System& sender, const System& other, bool left) {
      for (auto& st : outputs(sender)) {
        if (st.label.is_tau()) {
          out.push_back({st.label, left ? System::par(st.next, other) : System::par(other, st.next)});
          continue;
        }
        Received r = receive(other, st.label.pred, st.label.values);
        for (const auto& o : r.states) {
          if (out.size() >= opts_.max_combinations) {
            truncate("combination ceiling reached");
            return;
          }
          out.push_back({st.label, left ? System::par(st.next, o) : System::par(o, st.next)});
        }
      }
    };
    side(p.lhs, p.rhs, true);
    side(p.rhs, p.lhs, false);
    return out;
  }

  // Rep: one copy acts, the template stays (with its unfolding counter bumped).
  std::vector<SystemStep> outputs_of(const sys::Bang& b, const System&) {
    std::vector<SystemStep> out;
    auto inner = outputs(b.body);
    if (inner.empty()) return out;
    if (b.unfolded >= opts_.repl_bound) {
      truncate("replication bound " + std::to_string(opts_.repl_bound) + " reached");
      return out;
    }
    for (auto& st : inner) out.push_back({st.label, System::par(st.next, System::bang(b.body, b.unfolded + 1))});
    return out;
  }

  std::vector<SystemStep> outputs_of(const sys::Nu& n, const System&) {
    std::vector<SystemStep> out;
    const std::string& x = n.name;
    for (auto& st : outputs(n.body)) {
      const SystemLabel& l = st.label;
      if (l.is_tau()) {  // Res
        out.push_back({l, System::nu(x, st.next)});
        continue;
      }
      if (predicate_names(l.pred).count(x)) {
        Predicate restricted = restrict_predicate(l.pred, x);
        if (is_ff(restricted, u_)) {  // Hide1: private names stay private
          System next = st.next;
          for (auto it = l.bound.rbegin(); it != l.bound.rend(); ++it) next = System::nu(*it, next);
          out.push_back({SystemLabel::tau(), System::nu(x, next)});
        } else {  // Hide2
          out.push_back({SystemLabel::out(l.bound, restricted, l.values), System::nu(x, st.next)});
        }
        continue;
      }
      if (value_names(l.values).count(x)) {  // Open: the scope is dissolved
        std::string y = x;
        if (visible_.count(x) || binders_[x] > 1) {
          NameSet avoid = taken_;
          NameSet ln = value_names(l.values);
          avoid.insert(ln.begin(), ln.end());
          avoid.insert(l.bound.begin(), l.bound.end());
          y = fresh_name(x, avoid);
          taken_.insert(y);
        }
        std::vector<Value> values;
        for (const auto& v : l.values) values.push_back(rename_value(v, x, y));
        std::vector<std::string> bound = l.bound;
        bound.push_back(y);
        out.push_back({SystemLabel::out(bound, rename_name(l.pred, x, y), values), rename_name(st.next, x, y)});
        continue;
      }
      out.push_back({l, System::nu(x, st.next)});  // Res
    }
    return out;
  }

  Received receive_of(const sys::Comp& c, const System& self, const Predicate& pred,
                      const std::vector<Value>& values) {
    Delivery d = deliver(c.env, c.proc, defs_, pred, values, rng_);
    if (d.discards()) return {{self}, true};  // C-Fail
    Received r;
    r.discarded = false;
    for (auto& [env, proc] : d.receives) r.states.push_back(System::comp(env, proc));
    return r;
  }

  Received receive_of(const sys::Par& p, const System& self, const Predicate& pred,
                      const std::vector<Value>& values) {  // Sync
    Received l = receive(p.lhs, pred, values);
    Received r = receive(p.rhs, pred, values);
    if (l.discarded && r.discarded) return {{self}, true};
    Received out;
    out.discarded = false;
    for (const auto& a : l.states) {
      for (const auto& b : r.states) {
        if (out.states.size() >= opts_.max_combinations) {
          truncate("combination ceiling reached");
          return out;
        }
        out.states.push_back(System::par(a, b));
      }
    }
    return out;
  }

  Received receive_of(const sys::Bang& b, const System& self, const Predicate& pred,
                      const std::vector<Value>& values) {
    Received inner = receive(b.body, pred, values);
    if (inner.discarded) return {{self}, true};
    if (b.unfolded >= opts_.repl_bound) {
      truncate("replication bound " + std::to_string(opts_.repl_bound) + " reached");
      return {{self}, true};
    }
    Received out;
    out.discarded = false;
    for (const auto& c : inner.states) out.states.push_back(System::par(c, System::bang(b.body, b.unfolded + 1)));
    return out;
  }

  // Res for inputs: a clashing binder is renamed away first.
  Received receive_of(const sys::Nu& n, const System&, const Predicate& pred, const std::vector<Value>& values) {
    std::string x = n.name;
    System body = n.body;
    NameSet msg = predicate_names(pred);
    NameSet vn = value_names(values);
    msg.insert(vn.begin(), vn.end());
    if (msg.count(x)) {
      NameSet avoid = taken_;
      avoid.insert(msg.begin(), msg.end());
      NameSet bn = all_names(body);
      avoid.insert(bn.begin(), bn.end());
      std::string y = fresh_name(x, avoid);
      taken_.insert(y);
      body = rename_name(body, x, y);
      x = y;
    }
    Received inner = receive(body, pred, values);
    Received out;
    out.discarded = inner.discarded;
    for (const auto& c : inner.states) out.states.push_back(System::nu(x, c));
    return out;
  }

  const Definitions& defs_;
  const Universe& u_;
  StepOptions opts_;
  Rng* rng_;
  StepResult& result_;
  NameSet taken_;
  NameSet visible_;
  std::map<std::string, int> binders_;
};

}  // namespace detail

/// All (γ, C′) with C →γ C′ where γ is an output or τ.
inline StepResult system_steps(const System& sys, const Definitions& defs, const Universe& u,
                               const StepOptions& opts = {}, Rng* rng = nullptr) {
  StepResult result;
  detail::Stepper stepper(sys, defs, u, opts, rng, result);
  result.steps = stepper.outputs(sys);
  return result;
}

/// States reached when the whole system performs the input Π(ṽ): every
/// component takes its receive or discard outcome.
inline std::vector<System> external_input_steps(const System& sys, const Definitions& defs, const Universe& u,
                                                const Predicate& pred, const std::vector<Value>& values,
                                                const StepOptions& opts = {}, Rng* rng = nullptr) {
  StepResult result;
  detail::Stepper stepper(sys, defs, u, opts, rng, result);
  return stepper.receive(sys, pred, values).states;
}

/// Many messages against one system; the name bookkeeping is done once.
/// `Messages` is a range of items with `.pred` and `.values`.
template <class Messages>
std::vector<std::vector<System>> external_input_steps_many(const System& sys, const Definitions& defs,
                                                           const Universe& u, const Messages& msgs,
                                                           const StepOptions& opts = {}, Rng* rng = nullptr) {
  StepResult result;
  detail::Stepper stepper(sys, defs, u, opts, rng, result);
  std::vector<std::vector<System>> out;
  for (const auto& m : msgs) out.push_back(stepper.receive(sys, m.pred, m.values).states);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical forms: binders renamed in pre-order, input variables numbered.

namespace detail {

using VarMap = std::map<std::string, std::string>;

inline Expression canon(const Expression& e, const VarMap& vars) {
  return std::visit(overloaded{[&](const expr::Var& v) -> Expression {
                                 auto it = vars.find(v.name);
                                 return it == vars.end() ? e : Expression::var(it->second);
                               },
                               [&](const expr::Arith& a) -> Expression {
                                 return Expression::arith(a.op, canon(a.lhs, vars), canon(a.rhs, vars));
                               },
                               [&](const auto&) -> Expression { return e; }},
                    e.node().v);
}

inline Predicate canon(const Predicate& p, const VarMap& vars) {
  return std::visit(
      overloaded{[&](const pred::Cmp& c) { return Predicate::cmp(c.op, canon(c.lhs, vars), canon(c.rhs, vars)); },
                 [&](const pred::And& a) { return Predicate::conj(canon(a.lhs, vars), canon(a.rhs, vars)); },
                 [&](const pred::Or& o) { return Predicate::disj(canon(o.lhs, vars), canon(o.rhs, vars)); },
                 [&](const pred::Not& n) { return Predicate::neg(canon(n.arg, vars)); },
                 [&](const auto&) { return p; }},
      p.node().v);
}

inline Process canon(const Process& p, const VarMap& vars, int& counter) {
  auto exprs = [&](const std::vector<Expression>& es) {
    std::vector<Expression> out;
    for (const auto& e : es) out.push_back(canon(e, vars));
    return out;
  };
  return std::visit(
      overloaded{[&](const proc::Nil&) { return p; },
                 [&](const proc::Out& o) {
                   return Process::out(exprs(o.exprs), canon(o.pred, vars), canon(o.cont, vars, counter));
                 },
                 [&](const proc::In& i) {
                   VarMap inner = vars;
                   std::vector<std::string> fresh;
                   for (const auto& x : i.vars) {
                     fresh.push_back("$" + std::to_string(counter++));
                     inner[x] = fresh.back();
                   }
                   return Process::in(canon(i.pred, inner), fresh, canon(i.cont, inner, counter));
                 },
                 [&](const proc::Upd& u) {
                   std::vector<Assignment> as;
                   for (const auto& [a, e] : u.assigns) as.emplace_back(a, canon(e, vars));
                   return Process::upd(std::move(as), canon(u.cont, vars, counter));
                 },
                 [&](const proc::Aware& a) { return Process::aware(canon(a.pred, vars), canon(a.cont, vars, counter)); },
                 [&](const proc::Sum& s) {
                   Process l = canon(s.lhs, vars, counter);
                   return Process::sum(l, canon(s.rhs, vars, counter));
                 },
                 [&](const proc::Par& s) {
                   Process l = canon(s.lhs, vars, counter);
                   return Process::par(l, canon(s.rhs, vars, counter));
                 },
                 [&](const proc::Call& c) { return Process::call(c.name, exprs(c.args)); }},
      p.node().v);
}

inline System canon(const System& s, int& binders, int& vars) {
  return std::visit(overloaded{[&](const sys::Comp& c) { return System::comp(c.env, canon(c.proc, {}, vars)); },
                               [&](const sys::Par& p) {
                                 System l = canon(p.lhs, binders, vars);
                                 return System::par(l, canon(p.rhs, binders, vars));
                               },
                               [&](const sys::Bang& b) { return System::bang(canon(b.body, binders, vars), b.unfolded); },
                               [&](const sys::Nu& n) {
                                 std::string fresh = "%" + std::to_string(binders++);
                                 System body = rename_name(n.body, n.name, fresh);
                                 return System::nu(fresh, canon(body, binders, vars));
                               }},
                    s.node().v);
}

}  // namespace detail

/// α-canonical representative: restricted names become %0, %1, … in
/// pre-order and input variables $0, $1, …. Not meant to be reparsed.
inline System canonical_system(const System& s) {
  int binders = 0;
  int vars = 0;
  return detail::canon(s, binders, vars);
}

inline std::string canonical_key(const System& s) { return pretty(canonical_system(s)); }

}  // namespace abc
