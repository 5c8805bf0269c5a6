#pragma once

#include <string>
#include <vector>

#include "abc/ast.hpp"
#include "abc/attributes.hpp"
#include "abc/names.hpp"
#include "abc/printer.hpp"

namespace abc {

/// Component-level label: output Π̄(ṽ), input Π(ṽ) or discard Π(ṽ)~.
struct ComponentLabel {
  enum class Kind { Out, In, Discard };
  Kind kind = Kind::Out;
  Predicate pred;
  std::vector<Value> values;

  friend bool operator==(const ComponentLabel&, const ComponentLabel&) = default;
};

/// System-level label γ ::= ν x̃ Π̄(ṽ) | Π(ṽ) | τ.
struct SystemLabel {
  enum class Kind { Out, In, Tau };
  Kind kind = Kind::Tau;
  std::vector<std::string> bound;
  Predicate pred = Predicate::ff();
  std::vector<Value> values;

  static SystemLabel tau() { return {}; }
  static SystemLabel out(std::vector<std::string> bound, Predicate pred, std::vector<Value> values) {
    return {Kind::Out, std::move(bound), std::move(pred), std::move(values)};
  }
  static SystemLabel in(Predicate pred, std::vector<Value> values) {
    return {Kind::In, {}, std::move(pred), std::move(values)};
  }

  bool is_tau() const { return kind == Kind::Tau; }
  bool is_out() const { return kind == Kind::Out; }
  bool is_in() const { return kind == Kind::In; }

  friend bool operator==(const SystemLabel&, const SystemLabel&) = default;
};

namespace detail {
inline std::string value_list(const std::vector<Value>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += pretty(vs[i]);
  }
  return out + ")";
}
}  // namespace detail

inline std::string pretty(const ComponentLabel& l) {
  const std::string body = "(" + pretty(l.pred) + ")" + detail::value_list(l.values);
  switch (l.kind) {
    case ComponentLabel::Kind::Out: return "out " + body;
    case ComponentLabel::Kind::In: return "in " + body;
    case ComponentLabel::Kind::Discard: return "discard " + body;
  }
  return body;
}

inline std::string pretty(const SystemLabel& l) {
  if (l.is_tau()) return "tau";
  std::string out;
  if (!l.bound.empty()) {
    out = "nu";
    for (const auto& x : l.bound) out += " " + x;
    out += ". ";
  }
  out += l.is_out() ? "out " : "in ";
  return out + "(" + pretty(l.pred) + ")" + detail::value_list(l.values);
}

/// n(γ): all names of a label; empty for τ and for outputs whose predicate is ff.
inline NameSet label_names(const SystemLabel& l, const Universe& u) {
  if (l.is_tau()) return {};
  if (l.is_out() && is_ff(l.pred, u)) return {};
  NameSet out = predicate_names(l.pred);
  for (const auto& v : l.values) collect_names(v, out);
  out.insert(l.bound.begin(), l.bound.end());
  return out;
}

/// fn(ν x̃ Π̄(ṽ)) = fn(Π(ṽ)) \ x̃, empty when Π ≃ ff.
inline NameSet free_names(const SystemLabel& l, const Universe& u) {
  NameSet out = label_names(l, u);
  for (const auto& x : l.bound) out.erase(x);
  return out;
}

/// bn(ν x̃ Π̄(ṽ)) = x̃, empty when Π ≃ ff.
inline NameSet bound_names(const SystemLabel& l, const Universe& u) {
  if (!l.is_out() || is_ff(l.pred, u)) return {};
  return NameSet(l.bound.begin(), l.bound.end());
}

}  // namespace abc
