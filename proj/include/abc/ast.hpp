#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "abc/value.hpp"

namespace abc {

enum class ArithOp { Add, Sub, Mul };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct ExpressionNode;
struct PredicateNode;
struct ProcessNode;
struct SystemNode;

// All AST handles are immutable shared nodes: cheap to copy, safe to share
// between threads, compared structurally.

class Expression {
 public:
  Expression() = default;
  explicit Expression(std::shared_ptr<const ExpressionNode> n) : node_(std::move(n)) {}

  static Expression lit(Value v);
  static Expression var(std::string x);
  static Expression attr(std::string a);
  static Expression this_attr(std::string a);
  static Expression arith(ArithOp op, Expression lhs, Expression rhs);
  static Expression rand(std::int64_t bound);

  const ExpressionNode& node() const { return *node_; }
  friend bool operator==(const Expression& a, const Expression& b);

 private:
  std::shared_ptr<const ExpressionNode> node_;
};

namespace expr {
struct Lit {
  Value value;
  friend bool operator==(const Lit&, const Lit&) = default;
};
struct Var {
  std::string name;
  friend bool operator==(const Var&, const Var&) = default;
};
/// Bare attribute identifier; denotes the receiver's attribute in a sender predicate.
struct Attr {
  std::string name;
  friend bool operator==(const Attr&, const Attr&) = default;
};
/// `this.a`: always the evaluating component's own attribute.
struct This {
  std::string name;
  friend bool operator==(const This&, const This&) = default;
};
struct Arith {
  ArithOp op;
  Expression lhs;
  Expression rhs;
  friend bool operator==(const Arith&, const Arith&) = default;
};
/// Uniform integer in [0, bound).
struct Rand {
  std::int64_t bound;
  friend bool operator==(const Rand&, const Rand&) = default;
};
}  // namespace expr

struct ExpressionNode {
  std::variant<expr::Lit, expr::Var, expr::Attr, expr::This, expr::Arith, expr::Rand> v;
  friend bool operator==(const ExpressionNode&, const ExpressionNode&) = default;
};

class Predicate {
 public:
  Predicate() = default;
  explicit Predicate(std::shared_ptr<const PredicateNode> n) : node_(std::move(n)) {}

  static Predicate tt();
  static Predicate ff();
  static Predicate cmp(CmpOp op, Expression lhs, Expression rhs);
  static Predicate conj(Predicate a, Predicate b);
  static Predicate disj(Predicate a, Predicate b);
  static Predicate neg(Predicate a);

  const PredicateNode& node() const { return *node_; }
  friend bool operator==(const Predicate& a, const Predicate& b);

 private:
  std::shared_ptr<const PredicateNode> node_;
};

namespace pred {
struct True {
  friend bool operator==(const True&, const True&) = default;
};
struct False {
  friend bool operator==(const False&, const False&) = default;
};
struct Cmp {
  CmpOp op;
  Expression lhs;
  Expression rhs;
  friend bool operator==(const Cmp&, const Cmp&) = default;
};
struct And {
  Predicate lhs;
  Predicate rhs;
  friend bool operator==(const And&, const And&) = default;
};
struct Or {
  Predicate lhs;
  Predicate rhs;
  friend bool operator==(const Or&, const Or&) = default;
};
struct Not {
  Predicate arg;
  friend bool operator==(const Not&, const Not&) = default;
};
}  // namespace pred

struct PredicateNode {
  std::variant<pred::True, pred::False, pred::Cmp, pred::And, pred::Or, pred::Not> v;
  friend bool operator==(const PredicateNode&, const PredicateNode&) = default;
};

using Assignment = std::pair<std::string, Expression>;

class Process {
 public:
  Process() = default;
  explicit Process(std::shared_ptr<const ProcessNode> n) : node_(std::move(n)) {}

  static Process nil();
  static Process out(std::vector<Expression> exprs, Predicate pred, Process cont);
  static Process in(Predicate pred, std::vector<std::string> vars, Process cont);
  static Process upd(std::vector<Assignment> assigns, Process cont);
  static Process aware(Predicate pred, Process cont);
  static Process sum(Process a, Process b);
  static Process par(Process a, Process b);
  static Process call(std::string name, std::vector<Expression> args);

  const ProcessNode& node() const { return *node_; }
  friend bool operator==(const Process& a, const Process& b);

 private:
  std::shared_ptr<const ProcessNode> node_;
};

namespace proc {
struct Nil {
  friend bool operator==(const Nil&, const Nil&) = default;
};
struct Out {
  std::vector<Expression> exprs;
  Predicate pred;
  Process cont;
  friend bool operator==(const Out&, const Out&) = default;
};
struct In {
  Predicate pred;
  std::vector<std::string> vars;
  Process cont;
  friend bool operator==(const In&, const In&) = default;
};
struct Upd {
  std::vector<Assignment> assigns;
  Process cont;
  friend bool operator==(const Upd&, const Upd&) = default;
};
struct Aware {
  Predicate pred;
  Process cont;
  friend bool operator==(const Aware&, const Aware&) = default;
};
struct Sum {
  Process lhs;
  Process rhs;
  friend bool operator==(const Sum&, const Sum&) = default;
};
struct Par {
  Process lhs;
  Process rhs;
  friend bool operator==(const Par&, const Par&) = default;
};
struct Call {
  std::string name;
  std::vector<Expression> args;
  friend bool operator==(const Call&, const Call&) = default;
};
}  // namespace proc

struct ProcessNode {
  std::variant<proc::Nil, proc::Out, proc::In, proc::Upd, proc::Aware, proc::Sum, proc::Par,
               proc::Call>
      v;
  friend bool operator==(const ProcessNode&, const ProcessNode&) = default;
};

/// Partial map from attribute identifiers to values. Lookup of an unbound
/// attribute yields std::nullopt, never a default.
class AttributeEnv {
 public:
  AttributeEnv() = default;
  explicit AttributeEnv(std::map<std::string, Value> bindings) : bindings_(std::move(bindings)) {}

  std::optional<Value> lookup(const std::string& a) const {
    auto it = bindings_.find(a);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const std::string& a) const { return bindings_.count(a) != 0; }
  AttributeEnv with(const std::string& a, Value v) const {
    AttributeEnv copy = *this;
    copy.bindings_[a] = std::move(v);
    return copy;
  }
  const std::map<std::string, Value>& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }

  friend bool operator==(const AttributeEnv&, const AttributeEnv&) = default;

 private:
  std::map<std::string, Value> bindings_;
};

class System {
 public:
  System() = default;
  explicit System(std::shared_ptr<const SystemNode> n) : node_(std::move(n)) {}

  static System comp(AttributeEnv env, Process proc);
  static System par(System a, System b);
  static System bang(System body, int unfolded = 0);
  static System nu(std::string name, System body);

  const SystemNode& node() const { return *node_; }
  friend bool operator==(const System& a, const System& b);

 private:
  std::shared_ptr<const SystemNode> node_;
};

namespace sys {
struct Comp {
  AttributeEnv env;
  Process proc;
  friend bool operator==(const Comp&, const Comp&) = default;
};
struct Par {
  System lhs;
  System rhs;
  friend bool operator==(const Par&, const Par&) = default;
};
/// Replication. `unfolded` counts copies already spawned on the current path.
struct Bang {
  System body;
  int unfolded = 0;
  friend bool operator==(const Bang&, const Bang&) = default;
};
struct Nu {
  std::string name;
  System body;
  friend bool operator==(const Nu&, const Nu&) = default;
};
}  // namespace sys

struct SystemNode {
  std::variant<sys::Comp, sys::Par, sys::Bang, sys::Nu> v;
  friend bool operator==(const SystemNode&, const SystemNode&) = default;
};

struct Definition {
  std::vector<std::string> params;
  Process body;
  friend bool operator==(const Definition&, const Definition&) = default;
};

struct Program {
  std::vector<std::string> declared_attrs;
  std::map<std::string, Definition> definitions;
  System main;
  friend bool operator==(const Program&, const Program&) = default;
};

// ---------------------------------------------------------------------------

inline bool operator==(const Expression& a, const Expression& b) {
  return a.node_ == b.node_ || (a.node_ && b.node_ && *a.node_ == *b.node_);
}
inline bool operator==(const Predicate& a, const Predicate& b) {
  return a.node_ == b.node_ || (a.node_ && b.node_ && *a.node_ == *b.node_);
}
inline bool operator==(const Process& a, const Process& b) {
  return a.node_ == b.node_ || (a.node_ && b.node_ && *a.node_ == *b.node_);
}
inline bool operator==(const System& a, const System& b) {
  return a.node_ == b.node_ || (a.node_ && b.node_ && *a.node_ == *b.node_);
}

inline Expression Expression::lit(Value v) {
  return Expression(std::make_shared<const ExpressionNode>(ExpressionNode{expr::Lit{std::move(v)}}));
}
inline Expression Expression::var(std::string x) {
  return Expression(std::make_shared<const ExpressionNode>(ExpressionNode{expr::Var{std::move(x)}}));
}
inline Expression Expression::attr(std::string a) {
  return Expression(std::make_shared<const ExpressionNode>(ExpressionNode{expr::Attr{std::move(a)}}));
}
inline Expression Expression::this_attr(std::string a) {
  return Expression(std::make_shared<const ExpressionNode>(ExpressionNode{expr::This{std::move(a)}}));
}
inline Expression Expression::arith(ArithOp op, Expression lhs, Expression rhs) {
  return Expression(std::make_shared<const ExpressionNode>(
      ExpressionNode{expr::Arith{op, std::move(lhs), std::move(rhs)}}));
}
inline Expression Expression::rand(std::int64_t bound) {
  return Expression(std::make_shared<const ExpressionNode>(ExpressionNode{expr::Rand{bound}}));
}

inline Predicate Predicate::tt() {
  static const Predicate p(std::make_shared<const PredicateNode>(PredicateNode{pred::True{}}));
  return p;
}
inline Predicate Predicate::ff() {
  static const Predicate p(std::make_shared<const PredicateNode>(PredicateNode{pred::False{}}));
  return p;
}
inline Predicate Predicate::cmp(CmpOp op, Expression lhs, Expression rhs) {
  return Predicate(std::make_shared<const PredicateNode>(
      PredicateNode{pred::Cmp{op, std::move(lhs), std::move(rhs)}}));
}
inline Predicate Predicate::conj(Predicate a, Predicate b) {
  return Predicate(
      std::make_shared<const PredicateNode>(PredicateNode{pred::And{std::move(a), std::move(b)}}));
}
inline Predicate Predicate::disj(Predicate a, Predicate b) {
  return Predicate(
      std::make_shared<const PredicateNode>(PredicateNode{pred::Or{std::move(a), std::move(b)}}));
}
inline Predicate Predicate::neg(Predicate a) {
  return Predicate(std::make_shared<const PredicateNode>(PredicateNode{pred::Not{std::move(a)}}));
}

inline Process Process::nil() {
  static const Process p(std::make_shared<const ProcessNode>(ProcessNode{proc::Nil{}}));
  return p;
}
inline Process Process::out(std::vector<Expression> exprs, Predicate pred, Process cont) {
  return Process(std::make_shared<const ProcessNode>(
      ProcessNode{proc::Out{std::move(exprs), std::move(pred), std::move(cont)}}));
}
inline Process Process::in(Predicate pred, std::vector<std::string> vars, Process cont) {
  return Process(std::make_shared<const ProcessNode>(
      ProcessNode{proc::In{std::move(pred), std::move(vars), std::move(cont)}}));
}
inline Process Process::upd(std::vector<Assignment> assigns, Process cont) {
  return Process(std::make_shared<const ProcessNode>(
      ProcessNode{proc::Upd{std::move(assigns), std::move(cont)}}));
}
inline Process Process::aware(Predicate pred, Process cont) {
  return Process(std::make_shared<const ProcessNode>(
      ProcessNode{proc::Aware{std::move(pred), std::move(cont)}}));
}
inline Process Process::sum(Process a, Process b) {
  return Process(
      std::make_shared<const ProcessNode>(ProcessNode{proc::Sum{std::move(a), std::move(b)}}));
}
inline Process Process::par(Process a, Process b) {
  return Process(
      std::make_shared<const ProcessNode>(ProcessNode{proc::Par{std::move(a), std::move(b)}}));
}
inline Process Process::call(std::string name, std::vector<Expression> args) {
  return Process(std::make_shared<const ProcessNode>(
      ProcessNode{proc::Call{std::move(name), std::move(args)}}));
}

inline System System::comp(AttributeEnv env, Process proc) {
  return System(std::make_shared<const SystemNode>(
      SystemNode{sys::Comp{std::move(env), std::move(proc)}}));
}
inline System System::par(System a, System b) {
  return System(
      std::make_shared<const SystemNode>(SystemNode{sys::Par{std::move(a), std::move(b)}}));
}
inline System System::bang(System body, int unfolded) {
  return System(std::make_shared<const SystemNode>(SystemNode{sys::Bang{std::move(body), unfolded}}));
}
inline System System::nu(std::string name, System body) {
  return System(
      std::make_shared<const SystemNode>(SystemNode{sys::Nu{std::move(name), std::move(body)}}));
}

}  // namespace abc
