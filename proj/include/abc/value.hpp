#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace abc {

// Helper for std::visit with a set of lambdas.
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// An atom of the name lexicon. Names are the only values a restriction can bind.
struct Name {
  std::string id;

  friend bool operator==(const Name&, const Name&) = default;
  friend std::strong_ordering operator<=>(const Name& a, const Name& b) { return a.id <=> b.id; }
};

/// Carrier set of attribute environments and messages: names, integers,
/// booleans and (nested) tuples. Equality and ordering are structural.
class Value {
 public:
  struct Tuple {
    std::vector<Value> items;
  };
  using Rep = std::variant<Name, std::int64_t, bool, Tuple>;

  Value() : rep_(std::int64_t{0}) {}
  Value(Rep rep) : rep_(std::move(rep)) {}

  static Value name(std::string id) { return Value(Name{std::move(id)}); }
  static Value integer(std::int64_t n) { return Value(n); }
  static Value boolean(bool b) { return Value(b); }
  static Value tuple(std::vector<Value> items) { return Value(Tuple{std::move(items)}); }

  const Rep& rep() const { return rep_; }

  bool is_name() const { return std::holds_alternative<Name>(rep_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(rep_); }
  bool is_bool() const { return std::holds_alternative<bool>(rep_); }
  bool is_tuple() const { return std::holds_alternative<Tuple>(rep_); }

  const Name& as_name() const { return std::get<Name>(rep_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(rep_); }
  bool as_bool() const { return std::get<bool>(rep_); }
  const std::vector<Value>& as_tuple() const { return std::get<Tuple>(rep_).items; }

  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    const int c = compare(a, b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  static int compare(const Value& a, const Value& b) {
    if (a.rep_.index() != b.rep_.index()) return a.rep_.index() < b.rep_.index() ? -1 : 1;
    return std::visit(
        overloaded{
            [&](const Name& n) {
              const auto& m = std::get<Name>(b.rep_);
              return n.id < m.id ? -1 : (m.id < n.id ? 1 : 0);
            },
            [&](std::int64_t n) {
              const auto m = std::get<std::int64_t>(b.rep_);
              return n < m ? -1 : (m < n ? 1 : 0);
            },
            [&](bool x) {
              const bool y = std::get<bool>(b.rep_);
              return x == y ? 0 : (x ? 1 : -1);
            },
            [&](const Tuple& t) {
              const auto& u = std::get<Tuple>(b.rep_);
              const std::size_t n = std::min(t.items.size(), u.items.size());
              for (std::size_t i = 0; i < n; ++i) {
                if (int c = compare(t.items[i], u.items[i]); c != 0) return c;
              }
              if (t.items.size() == u.items.size()) return 0;
              return t.items.size() < u.items.size() ? -1 : 1;
            }},
        a.rep_);
  }

  Rep rep_;
};

/// Collects every name atom occurring in `v` (recursively through tuples).
inline void collect_names(const Value& v, std::set<std::string>& out) {
  if (v.is_name()) {
    out.insert(v.as_name().id);
  } else if (v.is_tuple()) {
    for (const auto& item : v.as_tuple()) collect_names(item, out);
  }
}

inline std::set<std::string> value_names(const std::vector<Value>& values) {
  std::set<std::string> out;
  for (const auto& v : values) collect_names(v, out);
  return out;
}

/// Replaces the name atom `from` by `to` everywhere inside `v`.
inline Value rename_value(const Value& v, const std::string& from, const std::string& to) {
  if (v.is_name()) return v.as_name().id == from ? Value::name(to) : v;
  if (v.is_tuple()) {
    std::vector<Value> items;
    items.reserve(v.as_tuple().size());
    for (const auto& item : v.as_tuple()) items.push_back(rename_value(item, from, to));
    return Value::tuple(std::move(items));
  }
  return v;
}

}  // namespace abc
