#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "abc/attributes.hpp"
#include "abc/explorer.hpp"
#include "abc/labels.hpp"

// Barbs and strong/weak bisimilarity on finite LTSs.

namespace abc {

using BarbSet = std::set<Fingerprint>;

/// Strong barbs: fingerprints of the output edges of `state` (outputs never
/// carry an ff predicate, those are τ). Weak barbs: the same, collected over
/// every state reachable through outputs and τ.
inline BarbSet barbs(const Lts& lts, std::size_t state, bool weak) {
  const auto edges = lts.out_edges();
  BarbSet out;
  std::vector<bool> seen(lts.states.size(), false);
  std::vector<std::size_t> stack{state};
  seen[state] = true;
  while (!stack.empty()) {
    const std::size_t s = stack.back();
    stack.pop_back();
    for (std::size_t t : edges[s]) {
      const Transition& tr = lts.transitions[t];
      const SystemLabel& l = lts.labels[tr.label];
      if (l.is_in()) continue;
      if (l.is_out()) out.insert(lts.canonical[tr.label].pred);
      if (weak && !seen[tr.dst]) {
        seen[tr.dst] = true;
        stack.push_back(tr.dst);
      }
    }
  }
  return out;
}

struct WitnessStep {
  int side;  // 0 = left system, 1 = right system
  std::string label;
};

struct Verdict {
  bool equivalent = false;
  bool bounded = false;  // some input LTS was truncated or its message universe capped
  std::vector<WitnessStep> witness;
  std::string note;
};

inline std::string describe(const Verdict& v) {
  std::string out = v.equivalent ? "equivalent" : "distinguished";
  if (v.bounded) out += " (bounded verdict)";
  out += "\n";
  for (const auto& w : v.witness) out += std::string(w.side == 0 ? "  left:  " : "  right: ") + w.label + "\n";
  if (!v.note.empty()) out += "  " + v.note + "\n";
  return out;
}

namespace detail {

struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> succ;  // (label, dst)
  std::vector<std::string> label_text;
  std::size_t tau = SIZE_MAX;
};

inline Universe joint_universe(const Universe& a, const Universe& b) {
  Universe u = a;
  u.cache = std::make_shared<Universe::Cache>();
  u.values.insert(b.values.begin(), b.values.end());
  u.budget = std::max(a.budget, b.budget);
  NameSet avoid;
  for (const auto& v : u.values) collect_names(v, avoid);
  avoid.insert(b.witness);
  u.witness = fresh_name(a.witness, avoid);
  return u;
}

// Disjoint union of the two LTSs with label ids shared through a joint universe.
inline Graph disjoint_union(const Lts& a, const Lts& b) {
  const Universe u = joint_universe(a.universe, b.universe);
  std::map<CanonicalLabel, std::size_t> ids;
  Graph g;
  g.n = a.states.size() + b.states.size();
  g.succ.resize(g.n);
  auto add = [&](const Lts& lts, std::size_t offset) {
    std::vector<std::size_t> local(lts.labels.size());
    for (std::size_t i = 0; i < lts.labels.size(); ++i) {
      CanonicalLabel c = canonical_label(lts.labels[i], u);
      auto [it, fresh] = ids.emplace(c, g.label_text.size());
      if (fresh) g.label_text.push_back(pretty(lts.labels[i]));
      if (lts.labels[i].is_tau()) g.tau = it->second;
      local[i] = it->second;
    }
    for (const auto& t : lts.transitions) g.succ[t.src + offset].emplace_back(local[t.label], t.dst + offset);
  };
  add(a, 0);
  add(b, a.states.size());
  for (auto& s : g.succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return g;
}

// Weak transitions: s =τ̂=> s' is τ* (zero steps allowed), s =ℓ=> s'' is τ*ℓτ*.
inline Graph saturate(const Graph& g) {
  std::vector<std::vector<std::size_t>> closure(g.n);
  for (std::size_t s = 0; s < g.n; ++s) {
    std::vector<bool> seen(g.n, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      closure[s].push_back(x);
      for (const auto& [l, d] : g.succ[x]) {
        if (l == g.tau && !seen[d]) {
          seen[d] = true;
          stack.push_back(d);
        }
      }
    }
  }
  Graph w = g;
  std::size_t tau = g.tau;
  if (tau == SIZE_MAX) {
    tau = w.label_text.size();
    w.label_text.push_back("tau");
    w.tau = tau;
  }
  for (std::size_t s = 0; s < g.n; ++s) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t x : closure[s]) {
      out.emplace(tau, x);
      for (const auto& [l, d] : g.succ[x]) {
        if (l == g.tau) continue;
        for (std::size_t y : closure[d]) out.emplace(l, y);
      }
    }
    w.succ[s].assign(out.begin(), out.end());
  }
  return w;
}

struct Refinement {
  std::vector<std::vector<std::size_t>> rounds;  // block of each state after each round
};

inline Refinement refine(const Graph& g) {
  Refinement r;
  r.rounds.push_back(std::vector<std::size_t>(g.n, 0));
  std::size_t blocks = g.n ? 1 : 0;
  while (true) {
    const auto& prev = r.rounds.back();
    using Sig = std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>;
    std::map<Sig, std::size_t> ids;
    std::vector<Sig> sigs(g.n);
    for (std::size_t s = 0; s < g.n; ++s) {
      std::vector<std::pair<std::size_t, std::size_t>> moves;
      for (const auto& [l, d] : g.succ[s]) moves.emplace_back(l, prev[d]);
      std::sort(moves.begin(), moves.end());
      moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
      sigs[s] = {prev[s], std::move(moves)};
      ids.emplace(sigs[s], 0);
    }
    std::size_t k = 0;
    for (auto& [sig, id] : ids) id = k++;
    std::vector<std::size_t> next(g.n);
    for (std::size_t s = 0; s < g.n; ++s) next[s] = ids[sigs[s]];
    r.rounds.push_back(std::move(next));
    if (k == blocks) break;
    blocks = k;
  }
  return r;
}

// Builds a distinguishing sequence for s, t separated at some round.
inline void explain(const Graph& g, const Refinement& r, std::size_t s, std::size_t t, std::size_t offset,
                    std::vector<WitnessStep>& out, std::string& note) {
  std::size_t k = 1;
  while (k < r.rounds.size() && r.rounds[k][s] == r.rounds[k][t]) ++k;
  if (k >= r.rounds.size()) return;
  const auto& prev = r.rounds[k - 1];
  auto find_unmatched = [&](std::size_t x, std::size_t y) -> std::optional<std::pair<std::size_t, std::size_t>> {
    for (const auto& [l, d] : g.succ[x]) {
      bool matched = false;
      for (const auto& [l2, d2] : g.succ[y]) {
        if (l2 == l && prev[d2] == prev[d]) {
          matched = true;
          break;
        }
      }
      if (!matched) return std::make_pair(l, d);
    }
    return std::nullopt;
  };
  int side = 0;
  auto mv = find_unmatched(s, t);
  std::size_t x = s, y = t;
  if (!mv) {
    side = 1;
    mv = find_unmatched(t, s);
    std::swap(x, y);
  }
  if (!mv) return;
  const auto [l, d] = *mv;
  out.push_back({(x < offset) ? 0 : 1, g.label_text[l]});
  (void)side;
  // Continue with an answer of the other side, if it has one.
  for (const auto& [l2, d2] : g.succ[y]) {
    if (l2 == l) {
      out.push_back({(y < offset) ? 0 : 1, g.label_text[l]});
      if (x < offset)
        explain(g, r, d, d2, offset, out, note);
      else
        explain(g, r, d2, d, offset, out, note);
      return;
    }
  }
  note = std::string((y < offset) ? "left" : "right") + " cannot match " + g.label_text[l];
}

// A capped message universe drops the same inputs on both sides: that can only
// merge states, so it weakens "equivalent" but not "distinguished".
inline Verdict check(const Graph& g, std::size_t s, std::size_t t, std::size_t offset, bool truncated, bool capped) {
  Refinement r = refine(g);
  Verdict v;
  v.equivalent = r.rounds.back()[s] == r.rounds.back()[t];
  v.bounded = truncated || (capped && v.equivalent);
  if (!v.equivalent) explain(g, r, s, t, offset, v.witness, v.note);
  return v;
}

}  // namespace detail

inline Verdict strong_bisim(const Lts& a, std::size_t sa, const Lts& b, std::size_t sb) {
  detail::Graph g = detail::disjoint_union(a, b);
  return detail::check(g, sa, a.states.size() + sb, a.states.size(), a.truncated || b.truncated,
                       a.inputs_capped || b.inputs_capped);
}

inline Verdict weak_bisim(const Lts& a, std::size_t sa, const Lts& b, std::size_t sb) {
  detail::Graph g = detail::saturate(detail::disjoint_union(a, b));
  return detail::check(g, sa, a.states.size() + sb, a.states.size(), a.truncated || b.truncated,
                       a.inputs_capped || b.inputs_capped);
}

// ---------------------------------------------------------------------------
// Whole-program comparison: shared universe and shared input messages.

struct BisimOptions {
  bool weak = true;
  bool inputs = true;
  std::size_t max_messages = 64;
  Bounds bounds;
  std::uint64_t seed = 0;
  std::vector<Value> extra_values;
};

inline MessageUniverse message_universe(const std::vector<const Program*>& progs, const Universe& u,
                                        std::size_t max_messages) {
  Program merged;
  std::vector<System> mains;
  for (const Program* p : progs) {
    for (const auto& [id, def] : p->definitions) merged.definitions.emplace(id + "#" + std::to_string(mains.size()), def);
    mains.push_back(p->main);
  }
  if (mains.empty()) return {};
  merged.main = mains[0];
  for (std::size_t i = 1; i < mains.size(); ++i) merged.main = System::par(merged.main, mains[i]);
  return message_universe(merged, u, max_messages);
}

inline Universe joint_program_universe(const Program& a, const Program& b, const std::vector<Value>& extra = {}) {
  Universe ua = make_universe(a, extra);
  Universe ub = make_universe(b, extra);
  Universe u = detail::joint_universe(ua, ub);
  u.attrs.insert(ub.attrs.begin(), ub.attrs.end());
  NameSet avoid = all_names(a);
  NameSet nb = all_names(b);
  avoid.insert(nb.begin(), nb.end());
  for (const auto& v : u.values) collect_names(v, avoid);
  u.witness = fresh_name("w", avoid);
  return u;
}

inline Verdict bisim_programs(const Program& a, const Program& b, const BisimOptions& opts = {}) {
  const Universe u = joint_program_universe(a, b, opts.extra_values);
  std::optional<MessageUniverse> mu;
  if (opts.inputs) mu = message_universe({&a, &b}, u, opts.max_messages);
  const Lts la = build_lts(a.main, a.definitions, u, opts.bounds, opts.seed, mu ? &*mu : nullptr);
  const Lts lb = build_lts(b.main, b.definitions, u, opts.bounds, opts.seed, mu ? &*mu : nullptr);
  return opts.weak ? weak_bisim(la, la.initial, lb, lb.initial) : strong_bisim(la, la.initial, lb, lb.initial);
}

// ---------------------------------------------------------------------------
// Sampled congruence: equivalent pairs stay equivalent inside random contexts
//   C[•] ::= [•] | [•] || C | C || [•] | nu x [•] | ![•]

struct CongruenceReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t bounded = 0;
  std::size_t inconclusive = 0;  // distinguished, but only in a truncated LTS
  std::vector<std::string> details;
};

struct EquivalentPair {
  Program left;
  Program right;
};

inline CongruenceReport congruence_sample(const std::vector<EquivalentPair>& pairs,
                                          const std::vector<System>& context_components, std::size_t trials,
                                          std::uint64_t seed, const BisimOptions& opts = {}) {
  CongruenceReport report;
  if (pairs.empty()) return report;
  Rng rng(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    const EquivalentPair& pair = pairs[static_cast<std::size_t>(draw(rng, static_cast<std::int64_t>(pairs.size())))];
    Program l = pair.left;
    Program r = pair.right;
    std::string shape = "[.]";
    const int layers = 1 + static_cast<int>(draw(rng, 2));
    for (int k = 0; k < layers; ++k) {
      const auto kind = draw(rng, 5);
      if (kind == 1 || kind == 2) {
        if (context_components.empty()) continue;
        const System& c =
            context_components[static_cast<std::size_t>(draw(rng, static_cast<std::int64_t>(context_components.size())))];
        if (kind == 1) {
          l.main = System::par(l.main, c);
          r.main = System::par(r.main, c);
          shape = shape + " || " + pretty(c);
        } else {
          l.main = System::par(c, l.main);
          r.main = System::par(c, r.main);
          shape = pretty(c) + " || " + shape;
        }
      } else if (kind == 3) {
        NameSet names = all_names(l);
        NameSet rn = all_names(r);
        names.insert(rn.begin(), rn.end());
        std::string x = (!names.empty() && draw(rng, 2) == 0)
                            ? *std::next(names.begin(), draw(rng, static_cast<std::int64_t>(names.size())))
                            : fresh_name("x", names);
        l.main = System::nu(x, l.main);
        r.main = System::nu(x, r.main);
        shape = "nu " + x + " (" + shape + ")";
      } else if (kind == 4) {
        l.main = System::bang(l.main);
        r.main = System::bang(r.main);
        shape = "!(" + shape + ")";
      }
    }
    Verdict v = bisim_programs(l, r, opts);
    ++report.trials;
    if (v.bounded) ++report.bounded;
    // e.g. bounded replication: the unbounded ![•] has every copy receive a
    // broadcast, the bounded one only the copies spawned so far
    if (!v.equivalent && v.bounded) {
      ++report.inconclusive;
    } else if (!v.equivalent) {
      ++report.violations;
      report.details.push_back("context " + shape + ": " + describe(v));
    }
  }
  return report;
}

}  // namespace abc
