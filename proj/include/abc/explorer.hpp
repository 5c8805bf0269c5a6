#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "abc/ast.hpp"
#include "abc/attributes.hpp"
#include "abc/labels.hpp"
#include "abc/printer.hpp"
#include "abc/system.hpp"

namespace abc {

struct Bounds {
  std::size_t max_states = 100'000;
  int max_depth = 50;
  int repl_bound = 2;
  std::size_t max_combinations = 100'000;
};

struct Message {
  Predicate pred;
  std::vector<Value> values;
};

/// Label key under which bisimulation matches transitions: kind, predicate meaning,
/// values with bound names replaced by positional placeholders.
struct CanonicalLabel {
  SystemLabel::Kind kind = SystemLabel::Kind::Tau;
  std::size_t bound = 0;
  Fingerprint pred;
  std::vector<Value> values;

  friend bool operator==(const CanonicalLabel&, const CanonicalLabel&) = default;
  friend auto operator<=>(const CanonicalLabel& a, const CanonicalLabel& b) {
    if (auto c = static_cast<int>(a.kind) <=> static_cast<int>(b.kind); c != 0) return c;
    if (auto c = a.bound <=> b.bound; c != 0) return c;
    if (auto c = a.pred <=> b.pred; c != 0) return c;
    return a.values <=> b.values;
  }
};

/// Replaces the bound names of an output label by %b0, %b1, ….
inline SystemLabel normalize_label(const SystemLabel& l) {
  if (l.bound.empty()) return l;
  SystemLabel out = l;
  for (std::size_t i = 0; i < l.bound.size(); ++i) {
    const std::string ph = "%b" + std::to_string(i);
    out.bound[i] = ph;
    out.pred = rename_name(out.pred, l.bound[i], ph);
    for (auto& v : out.values) v = rename_value(v, l.bound[i], ph);
  }
  return out;
}

inline CanonicalLabel canonical_label(const SystemLabel& raw, const Universe& u) {
  const SystemLabel l = normalize_label(raw);
  CanonicalLabel c;
  c.kind = l.kind;
  if (l.is_tau()) return c;
  c.bound = l.bound.size();
  c.pred = fingerprint(l.pred, u);
  c.values = l.values;
  return c;
}

struct Transition {
  std::size_t src;
  std::size_t label;
  std::size_t dst;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Lts {
  std::vector<System> states;       // representatives, in BFS discovery order
  std::vector<std::string> keys;    // canonical keys
  std::vector<int> depth;
  std::vector<SystemLabel> labels;  // one normalized representative per canonical label
  std::vector<CanonicalLabel> canonical;
  std::vector<Transition> transitions;
  std::size_t initial = 0;
  bool truncated = false;
  std::string reason;
  bool inputs_capped = false;
  std::uint64_t seed = 0;
  Universe universe;  // extended with every label literal

  std::vector<std::vector<std::size_t>> out_edges() const {
    std::vector<std::vector<std::size_t>> out(states.size());
    for (std::size_t i = 0; i < transitions.size(); ++i) out[transitions[i].src].push_back(i);
    return out;
  }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline bool closed_expr(const Expression& e) {
  return std::visit(overloaded{[](const expr::Var&) { return false; }, [](const expr::This&) { return false; },
                               [](const expr::Arith& a) { return closed_expr(a.lhs) && closed_expr(a.rhs); },
                               [](const auto&) { return true; }},
                    e.node().v);
}

// No variables and no this-references.
inline bool closed_pred(const Predicate& p) {
  return std::visit(overloaded{[](const pred::Cmp& c) { return closed_expr(c.lhs) && closed_expr(c.rhs); },
                               [](const pred::And& a) { return closed_pred(a.lhs) && closed_pred(a.rhs); },
                               [](const pred::Or& o) { return closed_pred(o.lhs) && closed_pred(o.rhs); },
                               [](const pred::Not& n) { return closed_pred(n.arg); },
                               [](const auto&) { return true; }},
                    p.node().v);
}

inline void output_preds(const Process& p, std::map<std::string, Predicate>& out) {
  std::visit(overloaded{[&](const proc::Out& o) {
                          if (closed_pred(o.pred)) out.emplace(pretty(o.pred), o.pred);
                          output_preds(o.cont, out);
                        },
                        [&](const proc::In& i) { output_preds(i.cont, out); },
                        [&](const proc::Upd& u) { output_preds(u.cont, out); },
                        [&](const proc::Aware& a) { output_preds(a.cont, out); },
                        [&](const proc::Sum& s) {
                          output_preds(s.lhs, out);
                          output_preds(s.rhs, out);
                        },
                        [&](const proc::Par& s) {
                          output_preds(s.lhs, out);
                          output_preds(s.rhs, out);
                        },
                        [&](const auto&) {}},
             p.node().v);
}

inline void input_arities(const Process& p, std::set<std::size_t>& out) {
  std::visit(overloaded{[&](const proc::In& i) {
                          out.insert(i.vars.size());
                          input_arities(i.cont, out);
                        },
                        [&](const proc::Out& o) { input_arities(o.cont, out); },
                        [&](const proc::Upd& u) { input_arities(u.cont, out); },
                        [&](const proc::Aware& a) { input_arities(a.cont, out); },
                        [&](const proc::Sum& s) {
                          input_arities(s.lhs, out);
                          input_arities(s.rhs, out);
                        },
                        [&](const proc::Par& s) {
                          input_arities(s.lhs, out);
                          input_arities(s.rhs, out);
                        },
                        [&](const auto&) {}},
             p.node().v);
}

inline void system_processes(const System& s, std::vector<Process>& out) {
  std::visit(overloaded{[&](const sys::Comp& c) { out.push_back(c.proc); },
                        [&](const sys::Par& p) {
                          system_processes(p.lhs, out);
                          system_processes(p.rhs, out);
                        },
                        [&](const sys::Bang& b) { system_processes(b.body, out); },
                        [&](const sys::Nu& n) { system_processes(n.body, out); }},
             s.node().v);
}

}  // namespace detail

struct MessageUniverse {
  std::vector<Message> messages;
  bool capped = false;
};

/// Finite surrogate for the input actions: predicates tt plus every
/// closed output predicate of the program, values drawn from the universe with
/// the widths of the program's inputs.
inline MessageUniverse message_universe(const Program& prog, const Universe& u, std::size_t max_messages = 64) {
  std::vector<Process> procs;
  detail::system_processes(prog.main, procs);
  for (const auto& [id, def] : prog.definitions) procs.push_back(def.body);
  std::map<std::string, Predicate> preds;
  std::set<std::size_t> arities;
  for (const auto& p : procs) {
    detail::output_preds(p, preds);
    detail::input_arities(p, arities);
  }
  std::vector<Predicate> ps = {Predicate::tt()};
  for (const auto& [k, p] : preds)
    if (k != "tt") ps.push_back(p);
  std::vector<Value> pool(u.values.begin(), u.values.end());
  pool.push_back(Value::name(u.witness));

  MessageUniverse mu;
  for (std::size_t n : arities) {
    std::vector<std::size_t> idx(n, 0);
    bool done = pool.empty() && n > 0;
    while (!done) {
      std::vector<Value> vals;
      for (std::size_t i : idx) vals.push_back(pool[i]);
      for (const auto& p : ps) {
        if (mu.messages.size() >= max_messages) {
          mu.capped = true;
          return mu;
        }
        mu.messages.push_back({p, vals});
      }
      std::size_t k = n;
      while (k > 0) {
        if (++idx[k - 1] < pool.size()) break;
        idx[k - 1] = 0;
        --k;
      }
      done = (k == 0);
    }
  }
  return mu;
}

/// Finalizes label identities: the universe is widened by every label literal
/// so that fingerprints are comparable, then equal labels share an id.
inline void assign_labels(Lts& lts, const std::vector<std::tuple<std::size_t, SystemLabel, std::size_t>>& raw) {
  std::set<Value> lits;
  for (const auto& [s, l, d] : raw) {
    if (l.is_tau()) continue;
    auto ls = predicate_literals(l.pred);
    lits.insert(ls.begin(), ls.end());
  }
  lts.universe = extend_universe(lts.universe, lits);
  std::map<CanonicalLabel, std::size_t> ids;
  std::unordered_map<std::string, std::size_t> by_text;  // input labels repeat on every state
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  for (const auto& [s, l, d] : raw) {
    std::string text = pretty(l);
    for (const auto& b : l.bound) text += " " + b;
    if (auto hit = by_text.find(text); hit != by_text.end()) {
      if (seen.emplace(s, hit->second, d).second) lts.transitions.push_back({s, hit->second, d});
      continue;
    }
    CanonicalLabel c = canonical_label(l, lts.universe);
    auto [it, fresh] = ids.emplace(c, lts.labels.size());
    by_text.emplace(std::move(text), it->second);
    if (fresh) {
      lts.labels.push_back(l);
      lts.canonical.push_back(c);
    }
    if (seen.emplace(s, it->second, d).second) lts.transitions.push_back({s, it->second, d});
  }
}

/// Bounded BFS over system_steps (and, if `inputs` is given, over
/// external_input_steps for each message). Hitting any bound marks the LTS
/// truncated instead of failing.
inline Lts build_lts(const System& init, const Definitions& defs, const Universe& u, const Bounds& bounds = {},
                     std::uint64_t seed = 0, const MessageUniverse* inputs = nullptr) {
  Lts lts;
  lts.seed = seed;
  lts.universe = u;
  lts.inputs_capped = inputs && inputs->capped;
  std::unordered_map<std::string, std::size_t> index;
  auto intern = [&](const System& s, int depth) -> std::optional<std::size_t> {
    std::string key = canonical_key(s);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (lts.states.size() >= bounds.max_states) {
      if (!lts.truncated) lts.reason = "state bound " + std::to_string(bounds.max_states) + " reached";
      lts.truncated = true;
      return std::nullopt;
    }
    const std::size_t id = lts.states.size();
    index.emplace(key, id);
    lts.states.push_back(s);
    lts.keys.push_back(std::move(key));
    lts.depth.push_back(depth);
    return id;
  };
  auto note = [&](const std::string& why) {
    if (!lts.truncated) lts.reason = why;
    lts.truncated = true;
  };

  std::vector<std::tuple<std::size_t, SystemLabel, std::size_t>> raw;
  lts.initial = *intern(init, 0);
  const StepOptions opts{bounds.repl_bound, bounds.max_combinations};
  for (std::size_t cur = 0; cur < lts.states.size(); ++cur) {
    const System state = lts.states[cur];
    const int d = lts.depth[cur];
    Rng rng(seed ^ detail::fnv1a(lts.keys[cur]));
    StepResult r;
    try {
      r = system_steps(state, defs, lts.universe, opts, &rng);
    } catch (const UniverseTooLarge& e) {
      note(std::string("universe budget: ") + e.what());
      continue;
    }
    if (r.truncated) note(r.reason);
    std::vector<std::pair<SystemLabel, System>> succ;
    for (auto& st : r.steps) succ.emplace_back(normalize_label(st.label), st.next);
    if (inputs) {
      auto all = external_input_steps_many(state, defs, lts.universe, inputs->messages, opts, &rng);
      for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& m = inputs->messages[i];
        for (auto& next : all[i]) succ.emplace_back(SystemLabel::in(m.pred, m.values), next);
      }
    }
    if (succ.empty()) continue;
    if (d >= bounds.max_depth) {
      note("depth bound " + std::to_string(bounds.max_depth) + " reached");
      continue;
    }
    for (auto& [label, next] : succ) {
      auto id = next == state ? std::optional<std::size_t>(cur) : intern(next, d + 1);
      if (id) raw.emplace_back(cur, label, *id);
    }
  }
  assign_labels(lts, raw);
  return lts;
}

// ---------------------------------------------------------------------------
// Traces.

enum class TracePolicy { Random, Interactive };

/// Runs up to `steps` transitions. Random picks with the seeded generator;
/// Interactive lists the transitions on `out` and reads a 0-based index from
/// `in` (end of input stops the trace).
inline std::vector<SystemStep> trace(const System& init, const Definitions& defs, const Universe& u, int steps,
                                     std::uint64_t seed, TracePolicy policy = TracePolicy::Random,
                                     std::istream* in = nullptr, std::ostream* out = nullptr,
                                     const StepOptions& opts = {}) {
  std::vector<SystemStep> result;
  Rng rng(seed);
  System cur = init;
  for (int k = 0; k < steps; ++k) {
    StepResult r = system_steps(cur, defs, u, opts, &rng);
    if (r.steps.empty()) break;
    std::size_t choice = 0;
    if (policy == TracePolicy::Random) {
      choice = static_cast<std::size_t>(draw(rng, static_cast<std::int64_t>(r.steps.size())));
    } else {
      if (!in) break;
      if (out) {
        *out << "state: " << pretty(cur) << "\n";
        for (std::size_t i = 0; i < r.steps.size(); ++i) *out << "  [" << i << "] " << pretty(r.steps[i].label) << "\n";
        *out << "choice> " << std::flush;
      }
      bool chosen = false;
      std::string line;
      while (std::getline(*in, line)) {
        std::istringstream is(line);
        long long n = -1;
        if (is >> n && n >= 0 && static_cast<std::size_t>(n) < r.steps.size()) {
          choice = static_cast<std::size_t>(n);
          chosen = true;
          break;
        }
        if (out) *out << "invalid choice, expected 0.." << r.steps.size() - 1 << "\nchoice> " << std::flush;
      }
      if (!chosen) break;
    }
    result.push_back(r.steps[choice]);
    cur = r.steps[choice].next;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reachability.

struct Witness {
  std::size_t state;
  std::vector<std::size_t> path;  // transition indices from the initial state
};

using StateProperty = std::function<bool(const System&)>;

inline std::optional<Witness> reachable(const Lts& lts, const StateProperty& prop) {
  if (lts.states.empty()) return std::nullopt;
  const auto edges = lts.out_edges();
  std::vector<std::optional<std::size_t>> via(lts.states.size());
  std::vector<bool> seen(lts.states.size(), false);
  std::deque<std::size_t> queue{lts.initial};
  seen[lts.initial] = true;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    if (prop(lts.states[s])) {
      Witness w{s, {}};
      for (std::size_t cur = s; via[cur];) {
        w.path.push_back(*via[cur]);
        cur = lts.transitions[*via[cur]].src;
      }
      std::reverse(w.path.begin(), w.path.end());
      return w;
    }
    for (std::size_t t : edges[s]) {
      const std::size_t d = lts.transitions[t].dst;
      if (!seen[d]) {
        seen[d] = true;
        via[d] = t;
        queue.push_back(d);
      }
    }
  }
  return std::nullopt;
}

/// "Some component has attr = value". Replication templates are not counted:
/// they are not running components.
inline StateProperty some_component_has(const std::string& attr, const Value& value) {
  return [attr, value](const System& s) {
    std::function<bool(const System&)> walk = [&](const System& c) -> bool {
      return std::visit(overloaded{[&](const sys::Comp& k) {
                                     auto v = k.env.lookup(attr);
                                     return v && *v == value;
                                   },
                                   [&](const sys::Par& p) { return walk(p.lhs) || walk(p.rhs); },
                                   [&](const sys::Bang&) { return false; },
                                   [&](const sys::Nu& n) { return walk(n.body); }},
                        c.node().v);
    };
    return walk(s);
  };
}

/// Re-derives each transition of `path` with system_steps from its source
/// state; true iff every edge is reproduced.
inline bool replay(const Lts& lts, const std::vector<std::size_t>& path, const Definitions& defs,
                   const Bounds& bounds = {}) {
  const StepOptions opts{bounds.repl_bound, bounds.max_combinations};
  for (std::size_t t : path) {
    const Transition& tr = lts.transitions[t];
    Rng rng(lts.seed ^ detail::fnv1a(lts.keys[tr.src]));
    StepResult r = system_steps(lts.states[tr.src], defs, lts.universe, opts, &rng);
    bool found = false;
    for (const auto& st : r.steps) {
      if (canonical_label(st.label, lts.universe) == lts.canonical[tr.label] &&
          canonical_key(st.next) == lts.keys[tr.dst]) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Export.

inline std::string escape_label(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

inline std::string to_text(const Lts& lts) {
  std::ostringstream os;
  os << "# seed " << lts.seed << "\n";
  if (lts.truncated) os << "# truncated: " << lts.reason << "\n";
  os << "states " << lts.states.size() << "\n";
  os << "init " << lts.initial << "\n";
  for (std::size_t i = 0; i < lts.states.size(); ++i) os << "# state " << i << " " << pretty(lts.states[i]) << "\n";
  for (const auto& t : lts.transitions) {
    os << "trans " << t.src << " \"" << escape_label(pretty(lts.labels[t.label])) << "\" " << t.dst << "\n";
  }
  return os.str();
}

/// Structured dump. Keys are emitted in a fixed order:
/// seed, truncated, reason, initial, states[{id, depth, system}],
/// labels[{id, kind, bound, pred, values, fingerprint}], transitions[{src, label, dst}].
inline nlohmann::ordered_json to_json(const Lts& lts) {
  nlohmann::ordered_json j;
  j["seed"] = lts.seed;
  j["truncated"] = lts.truncated;
  j["reason"] = lts.reason;
  j["initial"] = lts.initial;
  j["states"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    nlohmann::ordered_json s;
    s["id"] = i;
    s["depth"] = lts.depth[i];
    s["system"] = pretty(lts.states[i]);
    j["states"].push_back(s);
  }
  j["labels"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < lts.labels.size(); ++i) {
    const SystemLabel& l = lts.labels[i];
    nlohmann::ordered_json o;
    o["id"] = i;
    o["kind"] = l.is_tau() ? "tau" : (l.is_out() ? "out" : "in");
    o["bound"] = l.bound;
    o["pred"] = l.is_tau() ? "" : pretty(l.pred);
    std::vector<std::string> vals;
    for (const auto& v : l.values) vals.push_back(pretty(v));
    o["values"] = vals;
    o["fingerprint"] = l.is_tau() ? "" : to_string(lts.canonical[i].pred);
    j["labels"].push_back(o);
  }
  j["transitions"] = nlohmann::ordered_json::array();
  for (const auto& t : lts.transitions) {
    nlohmann::ordered_json o;
    o["src"] = t.src;
    o["label"] = t.label;
    o["dst"] = t.dst;
    j["transitions"].push_back(o);
  }
  return j;
}

}  // namespace abc
