#pragma once

#include <sstream>
#include <string>

#include "abc/ast.hpp"

// Pretty-printer for the concrete syntax accepted by abc/parser.hpp.
// Output always reparses to the same AST.

namespace abc {

namespace detail {

inline std::string quote_name(const std::string& id) {
  std::string out = "'";
  for (char c : id) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

inline int precedence(ArithOp op) { return op == ArithOp::Mul ? 2 : 1; }

inline const char* symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
  }
  return "?";
}

}  // namespace detail

inline const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

inline std::string pretty(const Value& v) {
  return std::visit(overloaded{[](const Name& n) { return detail::quote_name(n.id); },
                               [](std::int64_t n) { return std::to_string(n); },
                               [](bool b) { return std::string(b ? "true" : "false"); },
                               [](const Value::Tuple& t) {
                                 std::string out = "<";
                                 for (std::size_t i = 0; i < t.items.size(); ++i) {
                                   if (i) out += ", ";
                                   out += pretty(t.items[i]);
                                 }
                                 return out + ">";
                               }},
                    v.rep());
}

inline std::string pretty(const Expression& e);

namespace detail {
inline std::string pretty_operand(const Expression& e, int parent_prec, bool right) {
  if (const auto* a = std::get_if<expr::Arith>(&e.node().v)) {
    const int p = precedence(a->op);
    if (p < parent_prec || (right && p == parent_prec)) return "(" + pretty(e) + ")";
  }
  return pretty(e);
}
}  // namespace detail

inline std::string pretty(const Expression& e) {
  return std::visit(
      overloaded{[](const expr::Lit& l) { return pretty(l.value); },
                 [](const expr::Var& v) { return v.name; },
                 [](const expr::Attr& a) { return a.name; },
                 [](const expr::This& t) { return "this." + t.name; },
                 [](const expr::Arith& a) {
                   const int p = detail::precedence(a.op);
                   return detail::pretty_operand(a.lhs, p, false) + " " + detail::symbol(a.op) + " " +
                          detail::pretty_operand(a.rhs, p, true);
                 },
                 [](const expr::Rand& r) { return "rand(" + std::to_string(r.bound) + ")"; }},
      e.node().v);
}

inline std::string pretty(const Predicate& p);

namespace detail {
// or = 1, and = 2, not/atoms = 3
inline int precedence(const Predicate& p) {
  if (std::holds_alternative<pred::Or>(p.node().v)) return 1;
  if (std::holds_alternative<pred::And>(p.node().v)) return 2;
  return 3;
}

inline std::string pretty_pred_operand(const Predicate& p, int parent_prec, bool right) {
  const int q = precedence(p);
  if (q < parent_prec || (right && q == parent_prec && q < 3)) return "(" + pretty(p) + ")";
  return pretty(p);
}
}  // namespace detail

inline std::string pretty(const Predicate& p) {
  return std::visit(
      overloaded{[](const pred::True&) { return std::string("tt"); },
                 [](const pred::False&) { return std::string("ff"); },
                 [](const pred::Cmp& c) {
                   std::string lhs = pretty(c.lhs);
                   // keep a closing tuple bracket from fusing with the operator
                   const char* sep = (!lhs.empty() && lhs.back() == '>') ? " " : "";
                   return lhs + sep + to_string(c.op) + pretty(c.rhs);
                 },
                 [](const pred::And& a) {
                   return detail::pretty_pred_operand(a.lhs, 2, false) + " and " +
                          detail::pretty_pred_operand(a.rhs, 2, true);
                 },
                 [](const pred::Or& o) {
                   return detail::pretty_pred_operand(o.lhs, 1, false) + " or " +
                          detail::pretty_pred_operand(o.rhs, 1, true);
                 },
                 [](const pred::Not& n) {
                   if (std::holds_alternative<pred::True>(n.arg.node().v) ||
                       std::holds_alternative<pred::False>(n.arg.node().v) ||
                       std::holds_alternative<pred::Not>(n.arg.node().v))
                     return "not " + pretty(n.arg);
                   return "not (" + pretty(n.arg) + ")";
                 }},
      p.node().v);
}

inline std::string pretty(const Process& p);

namespace detail {
// par = 1, sum = 2, prefixes and atoms = 3
inline int precedence(const Process& p) {
  if (std::holds_alternative<proc::Par>(p.node().v)) return 1;
  if (std::holds_alternative<proc::Sum>(p.node().v)) return 2;
  return 3;
}

inline std::string pretty_proc_operand(const Process& p, int parent_prec, bool right) {
  const int q = precedence(p);
  if (q < parent_prec || (right && q == parent_prec && q < 3)) return "(" + pretty(p) + ")";
  return pretty(p);
}

inline std::string join_exprs(const std::vector<Expression>& es) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ", ";
    out += pretty(es[i]);
  }
  return out;
}
}  // namespace detail

inline std::string pretty(const Process& p) {
  using detail::pretty_proc_operand;
  return std::visit(
      overloaded{
          [](const proc::Nil&) { return std::string("0"); },
          [](const proc::Out& o) {
            return "(" + detail::join_exprs(o.exprs) + ")@(" + pretty(o.pred) + ")." +
                   pretty_proc_operand(o.cont, 3, false);
          },
          [](const proc::In& i) {
            std::string vars;
            for (std::size_t k = 0; k < i.vars.size(); ++k) {
              if (k) vars += ", ";
              vars += i.vars[k];
            }
            return "(" + pretty(i.pred) + ")(" + vars + ")." + pretty_proc_operand(i.cont, 3, false);
          },
          [](const proc::Upd& u) {
            std::string out = "[";
            for (std::size_t k = 0; k < u.assigns.size(); ++k) {
              if (k) out += ", ";
              out += "this." + u.assigns[k].first + " := " + pretty(u.assigns[k].second);
            }
            return out + "]" + pretty_proc_operand(u.cont, 3, false);
          },
          [](const proc::Aware& a) {
            std::string pred = pretty(a.pred);
            // any '>' inside could be read as the closing bracket
            if (pred.find('>') != std::string::npos) pred = "(" + pred + ")";
            return "<" + pred + ">" + pretty_proc_operand(a.cont, 3, false);
          },
          [](const proc::Sum& s) {
            return pretty_proc_operand(s.lhs, 2, false) + " + " + pretty_proc_operand(s.rhs, 2, true);
          },
          [](const proc::Par& s) {
            return pretty_proc_operand(s.lhs, 1, false) + " | " + pretty_proc_operand(s.rhs, 1, true);
          },
          [](const proc::Call& c) {
            if (c.args.empty()) return c.name;
            return c.name + "(" + detail::join_exprs(c.args) + ")";
          }},
      p.node().v);
}

inline std::string pretty(const AttributeEnv& env) {
  std::string out = "{";
  bool first = true;
  for (const auto& [a, v] : env.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += a + " := " + pretty(v);
  }
  return out + "}";
}

inline std::string pretty(const System& s);

namespace detail {
inline std::string pretty_sys_operand(const System& s) {
  if (std::holds_alternative<sys::Par>(s.node().v)) return "(" + pretty(s) + ")";
  return pretty(s);
}
}  // namespace detail

inline std::string pretty(const System& s) {
  return std::visit(
      overloaded{[](const sys::Comp& c) { return pretty(c.env) + ":" + pretty(c.proc); },
                 [](const sys::Par& p) {
                   std::string rhs = pretty(p.rhs);
                   if (std::holds_alternative<sys::Par>(p.rhs.node().v)) rhs = "(" + rhs + ")";
                   std::string lhs = pretty(p.lhs);
                   return lhs + " || " + rhs;
                 },
                 [](const sys::Bang& b) {
                   std::string count = b.unfolded ? "<" + std::to_string(b.unfolded) + ">" : "";
                   return "!" + count + detail::pretty_sys_operand(b.body);
                 },
                 [](const sys::Nu& n) { return "nu " + n.name + " " + detail::pretty_sys_operand(n.body); }},
      s.node().v);
}

inline std::string pretty(const Program& prog) {
  std::ostringstream os;
  if (!prog.declared_attrs.empty()) {
    os << "attrs: ";
    for (std::size_t i = 0; i < prog.declared_attrs.size(); ++i) {
      if (i) os << ", ";
      os << prog.declared_attrs[i];
    }
    os << "\n";
  }
  for (const auto& [id, def] : prog.definitions) {
    os << "def " << id;
    if (!def.params.empty()) {
      os << "(";
      for (std::size_t i = 0; i < def.params.size(); ++i) {
        if (i) os << ", ";
        os << def.params[i];
      }
      os << ")";
    }
    os << " = " << pretty(def.body) << "\n";
  }
  os << "system: " << pretty(prog.main) << "\n";
  return os.str();
}

}  // namespace abc
