#include "tjk/kripke.hpp"

#include <algorithm>

namespace tjk {

int KripkeModel::world(const std::string& id) const {
  for (std::size_t i = 0; i < world_ids.size(); ++i)
    if (world_ids[i] == id) return static_cast<int>(i);
  throw ModelError("unknown world '" + id + "'");
}

int KripkeModel::add_world(const std::string& id) {
  if (size() >= kMaxWorlds) throw ModelError("models are limited to 64 worlds");
  world_ids.push_back(id);
  succ.push_back(0);
  return size() - 1;
}

void KripkeModel::close_transitively() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int w = 0; w < size(); ++w) {
      WorldSet s = succ[w];
      for (int u = 0; u < size(); ++u)
        if (succ[w] & bit(u)) s |= succ[u];
      if (s != succ[w]) {
        succ[w] = s;
        changed = true;
      }
    }
  }
}

std::size_t KripkeModel::tuple_count(int arity) const {
  std::size_t n = 1;
  for (int i = 0; i < arity; ++i) n *= static_cast<std::size_t>(domain);
  return n;
}

namespace {

std::size_t tuple_index(const std::vector<int>& vals, int domain) {
  std::size_t idx = 0;
  for (int v : vals) idx = idx * domain + v;
  return idx;
}

std::vector<int> tuple_of(std::size_t idx, int arity, int domain) {
  std::vector<int> out(arity);
  for (int i = arity - 1; i >= 0; --i) {
    out[i] = static_cast<int>(idx % domain);
    idx /= domain;
  }
  return out;
}

bool upward_closed(const KripkeModel& m, WorldSet s) {
  for (int w = 0; w < m.size(); ++w)
    if ((s & bit(w)) && (m.succ[w] & ~s)) return false;
  return true;
}

}  // namespace

std::vector<std::string> KripkeModel::violations() const {
  std::vector<std::string> out;
  if (succ.empty()) out.push_back("model has no worlds");
  if (domain < 1) out.push_back("domain must be non-empty");
  if (world_ids.size() != succ.size()) out.push_back("world ids and accessibility disagree");
  if (!out.empty()) return out;
  for (int w = 0; w < size(); ++w) {
    if (succ[w] & ~all()) out.push_back("edge to a missing world");
    for (int u = 0; u < size(); ++u)
      if (sees(w, u) && (succ[u] & ~succ[w]))
        out.push_back("accessibility not transitive at " + world_ids[w] + " -> " + world_ids[u]);
  }
  for (auto& [c, v] : consts)
    if (v < 0 || v >= domain) out.push_back("constant " + c + " outside the domain");
  for (auto& [f, fi] : funs) {
    if (fi.table.size() != tuple_count(fi.arity)) out.push_back("function " + f + " has a malformed table");
    for (int v : fi.table)
      if (v < 0 || v >= domain) out.push_back("function " + f + " leaves the domain");
  }
  for (auto& [r, ri] : rels) {
    if (ri.holds.size() != tuple_count(ri.arity)) {
      out.push_back("relation " + r + " has a malformed extension");
      continue;
    }
    for (WorldSet s : ri.holds)
      if (!upward_closed(*this, s)) {
        out.push_back("relation " + r + " violates persistence");
        break;
      }
  }
  if (!out.empty()) return out;

  auto eq = rels.find("=");
  if (identity == IdentityMode::Strict && eq != rels.end()) {
    for (std::size_t t = 0; t < eq->second.holds.size(); ++t) {
      auto ab = tuple_of(t, 2, domain);
      WorldSet want = ab[0] == ab[1] ? all() : 0;
      if (eq->second.holds[t] != want) {
        out.push_back("strict identity must be the diagonal at every world");
        break;
      }
    }
  }
  if (identity == IdentityMode::Congruence && eq != rels.end()) {
    const auto& h = eq->second.holds;
    auto same = [&](int a, int b, int w) { return (h[tuple_index({a, b}, domain)] & bit(w)) != 0; };
    for (int w = 0; w < size(); ++w) {
      bool ok = true;
      for (int a = 0; a < domain && ok; ++a) {
        if (!same(a, a, w)) ok = false;
        for (int b = 0; b < domain && ok; ++b) {
          if (same(a, b, w) != same(b, a, w)) ok = false;
          for (int c = 0; c < domain && ok; ++c)
            if (same(a, b, w) && same(b, c, w) && !same(a, c, w)) ok = false;
        }
      }
      if (!ok) {
        out.push_back("identity is not an equivalence relation at " + world_ids[w]);
        continue;
      }
      auto equiv = [&](const std::vector<int>& x, const std::vector<int>& y) {
        for (std::size_t i = 0; i < x.size(); ++i)
          if (!same(x[i], y[i], w)) return false;
        return true;
      };
      for (auto& [f, fi] : funs)
        for (std::size_t s = 0; s < fi.table.size(); ++s)
          for (std::size_t t = 0; t < fi.table.size(); ++t)
            if (equiv(tuple_of(s, fi.arity, domain), tuple_of(t, fi.arity, domain)) &&
                !same(fi.table[s], fi.table[t], w))
              out.push_back("function " + f + " not compatible with identity at " + world_ids[w]);
      for (auto& [r, ri] : rels) {
        if (r == "=") continue;
        for (std::size_t s = 0; s < ri.holds.size(); ++s)
          for (std::size_t t = 0; t < ri.holds.size(); ++t)
            if (equiv(tuple_of(s, ri.arity, domain), tuple_of(t, ri.arity, domain)) &&
                ((ri.holds[s] ^ ri.holds[t]) & bit(w)))
              out.push_back("relation " + r + " not compatible with identity at " + world_ids[w]);
      }
    }
  }
  return out;
}

void KripkeModel::validate() const {
  auto v = violations();
  if (!v.empty()) throw ModelError(v.front());
}

// ---------------------------------------------------------------------------
// Evaluation

int eval_term(const KripkeModel& m, const Term& t, const Assignment& asg) {
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = asg.find(t.name());
      if (it == asg.end()) throw ModelError("unassigned variable " + t.name());
      return it->second;
    }
    case TermKind::Const:
    case TermKind::Param: {
      auto it = m.consts.find(to_string(t));
      if (it == m.consts.end()) throw ModelError("uninterpreted constant " + to_string(t));
      return it->second;
    }
    case TermKind::App: {
      auto it = m.funs.find(t.name());
      if (it == m.funs.end()) throw ModelError("uninterpreted function " + t.name());
      std::vector<int> vals;
      for (auto& a : t.args()) vals.push_back(eval_term(m, a, asg));
      return it->second.table[tuple_index(vals, m.domain)];
    }
  }
  return 0;
}

static WorldSet atom_set(const KripkeModel& m, const Formula& f, const Assignment& asg) {
  std::vector<int> vals;
  for (auto& a : f.args()) vals.push_back(eval_term(m, a, asg));
  if (f.name() == "=" && vals.size() == 2) {
    if (m.identity == IdentityMode::Strict) return vals[0] == vals[1] ? m.all() : 0;
    if (m.identity == IdentityMode::Congruence && !m.rels.count("="))
      return vals[0] == vals[1] ? m.all() : 0;
  }
  auto it = m.rels.find(f.name());
  if (it == m.rels.end()) return 0;
  if (it->second.arity != static_cast<int>(vals.size())) {
    bool empty = std::all_of(it->second.holds.begin(), it->second.holds.end(), [](WorldSet s) { return s == 0; });
    if (empty) return 0;
    throw ModelError("relation " + f.name() + " used with the wrong arity");
  }
  return it->second.holds[tuple_index(vals, m.domain)];
}

bool satisfies(const KripkeModel& m, int w, const Formula& f, const Assignment& asg) {
  switch (f.op()) {
    case Op::Top: return true;
    case Op::Bot: return false;
    case Op::Atom: return (atom_set(m, f, asg) & bit(w)) != 0;
    case Op::And: return satisfies(m, w, f.lhs(), asg) && satisfies(m, w, f.rhs(), asg);
    case Op::Or: return satisfies(m, w, f.lhs(), asg) || satisfies(m, w, f.rhs(), asg);
    case Op::Imp:
      for (int u = 0; u < m.size(); ++u)
        if (m.sees(w, u) && satisfies(m, u, f.lhs(), asg) && !satisfies(m, u, f.rhs(), asg)) return false;
      return true;
    case Op::Forall:
    case Op::Exists: {
      Assignment a = asg;
      for (int d = 0; d < m.domain; ++d) {
        a[f.var()] = d;
        bool v = satisfies(m, w, f.body(), a);
        if (f.op() == Op::Forall && !v) return false;
        if (f.op() == Op::Exists && v) return true;
      }
      return f.op() == Op::Forall;
    }
  }
  return false;
}

static WorldSet truth(const KripkeModel& m, const Formula& f, Assignment& asg) {
  switch (f.op()) {
    case Op::Top: return m.all();
    case Op::Bot: return 0;
    case Op::Atom: return atom_set(m, f, asg);
    case Op::And: return truth(m, f.lhs(), asg) & truth(m, f.rhs(), asg);
    case Op::Or: return truth(m, f.lhs(), asg) | truth(m, f.rhs(), asg);
    case Op::Imp: {
      WorldSet bad = truth(m, f.lhs(), asg) & ~truth(m, f.rhs(), asg);
      WorldSet out = 0;
      for (int w = 0; w < m.size(); ++w)
        if (!(m.succ[w] & bad)) out |= bit(w);
      return out;
    }
    case Op::Forall:
    case Op::Exists: {
      auto it = asg.find(f.var());
      bool had = it != asg.end();
      int old = had ? it->second : 0;
      WorldSet acc = f.op() == Op::Forall ? m.all() : 0;
      for (int d = 0; d < m.domain; ++d) {
        asg[f.var()] = d;
        WorldSet s = truth(m, f.body(), asg);
        acc = f.op() == Op::Forall ? acc & s : acc | s;
      }
      if (had) asg[f.var()] = old;
      else asg.erase(f.var());
      return acc;
    }
  }
  return 0;
}

WorldSet truth_set(const KripkeModel& m, const Formula& f, const Assignment& asg) {
  Assignment a = asg;
  return truth(m, f, a);
}

std::optional<int> refuting_world(const KripkeModel& m, const std::vector<Formula>& gamma, const Formula& phi,
                                  bool reflexive_only) {
  WorldSet cand = m.all();
  for (auto& g : gamma) cand &= truth_set(m, g);
  cand &= ~truth_set(m, phi);
  for (int w = 0; w < m.size(); ++w)
    if ((cand & bit(w)) && (!reflexive_only || m.reflexive(w))) return w;
  return std::nullopt;
}

bool entails_in_model(const KripkeModel& m, const std::vector<Formula>& gamma, const Formula& phi) {
  return !refuting_world(m, gamma, phi, true).has_value();
}

bool check_persistence(const KripkeModel& m, const Formula& f, const std::vector<Assignment>& sample) {
  std::vector<Assignment> asgs = sample;
  if (asgs.empty()) asgs.push_back({});
  for (auto& a : asgs)
    for (int w = 0; w < m.size(); ++w) {
      if (!satisfies(m, w, f, a)) continue;
      for (int u = 0; u < m.size(); ++u)
        if (m.sees(w, u) && !satisfies(m, u, f, a)) return false;
    }
  return true;
}

KripkeModel add_chain(const KripkeModel& m, int w, int n, std::vector<int>* added) {
  if (n < 1) throw ModelError("chain length must be at least 1");
  if (w < 0 || w >= m.size()) throw ModelError("chain anchor is not a world of the model");
  KripkeModel out = m;
  if (added) added->clear();
  int above = w;
  for (int i = 1; i <= n; ++i) {
    std::string id = "u" + std::to_string(i);
    while (std::find(out.world_ids.begin(), out.world_ids.end(), id) != out.world_ids.end()) id += "'";
    int u = out.add_world(id);
    out.add_edge(u, above);
    if (added) added->push_back(u);
    above = u;
  }
  out.close_transitively();
  return out;
}

static bool in_fragment(const Formula& f) {
  switch (f.op()) {
    case Op::Or:
    case Op::Exists: return false;
    case Op::And:
    case Op::Imp: return in_fragment(f.lhs()) && in_fragment(f.rhs());
    case Op::Forall: return in_fragment(f.body());
    default: return true;
  }
}

bool check_intersection_config(const KripkeModel& m, int w, const std::vector<int>& us, const Formula& f) {
  if (!in_fragment(f)) throw IntersectionError(0, "formula contains a disjunction or an existential");
  if (us.empty()) throw IntersectionError(0, "the family of worlds must be non-empty");
  for (auto& [r, ri] : m.rels)
    for (WorldSet s : ri.holds) {
      bool all_u = std::all_of(us.begin(), us.end(), [&](int u) { return (s & bit(u)) != 0; });
      if (((s & bit(w)) != 0) != all_u)
        throw IntersectionError(1, "extension of " + r + " at the base world is not the intersection");
    }
  for (int u : us)
    if (!m.reflexive(u)) throw IntersectionError(2, "world " + m.world_ids[u] + " is not reflexive");
  for (int u : us)
    if (!m.sees(w, u)) throw IntersectionError(3, "base world does not see " + m.world_ids[u]);
  for (int z = 0; z < m.size(); ++z) {
    if (z == w || !m.sees(w, z)) continue;
    bool covered = std::any_of(us.begin(), us.end(), [&](int u) { return m.sees(u, z); });
    if (!covered) throw IntersectionError(4, "successor " + m.world_ids[z] + " is not seen by the family");
  }
  bool lhs = satisfies(m, w, f);
  bool rhs = std::all_of(us.begin(), us.end(), [&](int u) { return satisfies(m, u, f); });
  return lhs == rhs;
}

}  // namespace tjk
