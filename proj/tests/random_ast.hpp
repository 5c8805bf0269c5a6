#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "abc/ast.hpp"
#include "abc/printer.hpp"

namespace abc::testing {

// Random AST generator. Small alphabets so that collisions between names,
// attributes and literals actually happen.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 0; }

  Value value() {
    switch (pick(3)) {
      case 0: return Value::integer(pick(10));
      case 1: return Value::boolean(coin());
      default: return Value::name(names_[pick(static_cast<int>(names_.size()))]);
    }
  }

  Expression expr(int depth, const std::vector<std::string>& vars, bool in_pred = false) {
    int k = depth <= 0 ? pick(4) : pick(6);
    if (k == 4 && in_pred) k = 0;
    switch (k) {
      case 0: return Expression::lit(value());
      case 1: return Expression::attr(attrs_[pick(3)]);
      case 2: return Expression::this_attr(attrs_[pick(3)]);
      case 3:
        if (!vars.empty()) return Expression::var(vars[pick(static_cast<int>(vars.size()))]);
        return Expression::lit(value());
      case 4: return Expression::rand(1 + pick(9));
      default:
        return Expression::arith(static_cast<ArithOp>(pick(3)), expr(depth - 1, vars, in_pred), expr(depth - 1, vars, in_pred));
    }
  }

  Predicate pred(int depth, const std::vector<std::string>& vars) {
    const int k = depth <= 0 ? pick(3) : pick(6);
    switch (k) {
      case 0: return Predicate::tt();
      case 1: return Predicate::ff();
      case 2: return Predicate::cmp(static_cast<CmpOp>(pick(6)), expr(1, vars, true), expr(1, vars, true));
      case 3: return Predicate::conj(pred(depth - 1, vars), pred(depth - 1, vars));
      case 4: return Predicate::disj(pred(depth - 1, vars), pred(depth - 1, vars));
      default: return Predicate::neg(pred(depth - 1, vars));
    }
  }

  Process proc(int depth, std::vector<std::string> vars) {
    const int k = depth <= 0 ? pick(2) : pick(8);
    switch (k) {
      case 0: return Process::nil();
      case 1: {
        if (defs_.empty()) return Process::nil();
        auto it = std::next(defs_.begin(), pick(static_cast<int>(defs_.size())));
        std::vector<Expression> args;
        for (std::size_t i = 0; i < it->second; ++i) args.push_back(expr(1, vars));
        return Process::call(it->first, std::move(args));
      }
      case 2: {
        std::vector<Expression> es;
        for (int i = pick(3); i > 0; --i) es.push_back(expr(1, vars));
        return Process::out(std::move(es), pred(2, vars), proc(depth - 1, vars));
      }
      case 3: {
        std::vector<std::string> bound;
        for (int i = 1 + pick(2); i > 0; --i) bound.push_back(vars_[pick(3)]);
        std::sort(bound.begin(), bound.end());
        bound.erase(std::unique(bound.begin(), bound.end()), bound.end());
        auto inner = vars;
        inner.insert(inner.end(), bound.begin(), bound.end());
        return Process::in(pred(2, inner), bound, proc(depth - 1, inner));
      }
      case 4: {
        std::vector<Assignment> as;
        for (int i = 1 + pick(2); i > 0; --i) as.emplace_back(attrs_[pick(3)], expr(1, vars));
        return Process::upd(std::move(as), proc(depth - 1, vars));
      }
      case 5: return Process::aware(pred(2, vars), proc(depth - 1, vars));
      case 6: return Process::sum(proc(depth - 1, vars), proc(depth - 1, vars));
      default: return Process::par(proc(depth - 1, vars), proc(depth - 1, vars));
    }
  }

  AttributeEnv env() {
    std::map<std::string, Value> m;
    for (const auto& a : attrs_)
      if (coin()) m[a] = value();
    return AttributeEnv(std::move(m));
  }

  System system(int depth) {
    const int k = depth <= 0 ? 0 : pick(4);
    switch (k) {
      case 0: return System::comp(env(), proc(3, {}));
      case 1: return System::par(system(depth - 1), system(depth - 1));
      case 2: return System::bang(system(depth - 1));
      default: return System::nu(names_[pick(static_cast<int>(names_.size()))], system(depth - 1));
    }
  }

  Program program() {
    Program p;
    p.declared_attrs = attrs_;
    defs_.clear();
    const int n = pick(3);
    for (int i = 0; i < n; ++i) defs_["K" + std::to_string(i)] = static_cast<std::size_t>(pick(3));
    for (const auto& [id, arity] : defs_) {
      std::vector<std::string> params(vars_.begin(), vars_.begin() + static_cast<long>(arity));
      p.definitions[id] = Definition{params, proc(3, params)};
    }
    p.main = system(2);
    return p;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> attrs_{"a", "b", "role"};
  std::vector<std::string> vars_{"x", "y", "z"};
  std::vector<std::string> names_{"m", "n", "k"};
  std::map<std::string, std::size_t> defs_;
};

// Closed predicate: no `this.` and no variables.
inline Predicate closed_pred(Gen& g, int depth) {
  for (;;) {
    Predicate p = g.pred(depth, {});
    if (pretty(p).find("this.") == std::string::npos) return p;
  }
}

}  // namespace abc::testing
