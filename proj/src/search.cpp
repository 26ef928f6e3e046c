// Bounded countermodel search.
//
// Only rooted models are enumerated: a world's satisfaction depends on its
// successors alone, so any countermodel restricts to the submodel generated by
// its witness. Frames are transitive relations on k labelled worlds with world
// 0 as the root, kept up to permutations of the other worlds. Interpretations
// are enumerated as digit vectors and only the lexicographically least member
// of each orbit under frame automorphisms and domain permutations is
// evaluated.

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <thread>

#include "tjk/kripke.hpp"

namespace tjk {

std::string to_string(SearchMode m) {
  switch (m) {
    case SearchMode::BqlcdR: return "bqlcd_r";
    case SearchMode::Bqlcd: return "bqlcd";
    case SearchMode::StrictIdentity: return "strict";
    case SearchMode::CongruenceIdentity: return "congruence";
  }
  return "bqlcd_r";
}

SearchMode search_mode_from_string(const std::string& s) {
  if (s == "bqlcd_r" || s == "bqlcd-r") return SearchMode::BqlcdR;
  if (s == "bqlcd") return SearchMode::Bqlcd;
  if (s == "strict" || s == "strict-identity") return SearchMode::StrictIdentity;
  if (s == "congruence" || s == "congruence-identity") return SearchMode::CongruenceIdentity;
  throw std::invalid_argument("unknown search mode '" + s + "'");
}

namespace {

constexpr int kStrictEq = -2;
constexpr double kMaxInterpretations = 5e8;

struct Symbols {
  std::vector<std::string> consts;
  std::vector<std::pair<std::string, int>> funs;
  std::vector<std::pair<std::string, int>> rels;
  int eq_rel = -1;  // index into rels when identity is a congruence
};

struct CTerm {
  enum Kind { Var, Const, Fun } kind;
  int slot;
  std::vector<CTerm> args;
};

struct CNode {
  Op op;
  int rel = -1;
  std::vector<CTerm> args;
  int var = -1;
  int lhs = -1, rhs = -1;
};

struct Compiled {
  std::vector<CNode> nodes;
  int root = -1;
  int var_slots = 0;
};

template <class V>
int index_of(const std::vector<V>& v, const std::string& name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if constexpr (std::is_same_v<V, std::string>) {
      if (v[i] == name) return static_cast<int>(i);
    } else {
      if (v[i].first == name) return static_cast<int>(i);
    }
  return -1;
}

void collect(const Term& t, Symbols& s) {
  switch (t.kind()) {
    case TermKind::Var: return;
    case TermKind::Const:
    case TermKind::Param:
      if (index_of(s.consts, to_string(t)) < 0) s.consts.push_back(to_string(t));
      return;
    case TermKind::App: {
      int i = index_of(s.funs, t.name());
      if (i < 0) s.funs.push_back({t.name(), static_cast<int>(t.args().size())});
      else if (s.funs[i].second != static_cast<int>(t.args().size()))
        throw std::invalid_argument("function " + t.name() + " used with two arities");
      for (auto& a : t.args()) collect(a, s);
      return;
    }
  }
}

void collect(const Formula& f, Symbols& s, bool logical_eq) {
  switch (f.op()) {
    case Op::Top:
    case Op::Bot: return;
    case Op::Atom: {
      for (auto& a : f.args()) collect(a, s);
      if (logical_eq && f.name() == "=" && f.args().size() == 2) return;
      int i = index_of(s.rels, f.name());
      if (i < 0) s.rels.push_back({f.name(), static_cast<int>(f.args().size())});
      else if (s.rels[i].second != static_cast<int>(f.args().size()))
        throw std::invalid_argument("relation " + f.name() + " used with two arities");
      return;
    }
    case Op::And:
    case Op::Or:
    case Op::Imp:
      collect(f.lhs(), s, logical_eq);
      collect(f.rhs(), s, logical_eq);
      return;
    case Op::Forall:
    case Op::Exists: collect(f.body(), s, logical_eq); return;
  }
}

struct Compiler {
  const Symbols& syms;
  bool strict_eq;
  Compiled out;
  std::vector<std::pair<std::string, int>> scope;

  CTerm term(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var:
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
          if (it->first == t.name()) return {CTerm::Var, it->second, {}};
        throw std::invalid_argument("free variable " + t.name() + " in a search formula");
      case TermKind::Const:
      case TermKind::Param: return {CTerm::Const, index_of(syms.consts, to_string(t)), {}};
      case TermKind::App: {
        CTerm c{CTerm::Fun, index_of(syms.funs, t.name()), {}};
        for (auto& a : t.args()) c.args.push_back(term(a));
        return c;
      }
    }
    return {CTerm::Const, 0, {}};
  }

  int node(const Formula& f) {
    CNode n;
    n.op = f.op();
    switch (f.op()) {
      case Op::Top:
      case Op::Bot: break;
      case Op::Atom:
        for (auto& a : f.args()) n.args.push_back(term(a));
        n.rel = (strict_eq && f.name() == "=" && f.args().size() == 2) ? kStrictEq : index_of(syms.rels, f.name());
        if (n.rel == -1 && f.name() == "=" && syms.eq_rel >= 0) n.rel = syms.eq_rel;
        break;
      case Op::And:
      case Op::Or:
      case Op::Imp:
        n.lhs = node(f.lhs());
        n.rhs = node(f.rhs());
        break;
      case Op::Forall:
      case Op::Exists: {
        n.var = out.var_slots++;
        scope.push_back({f.var(), n.var});
        n.lhs = node(f.body());
        scope.pop_back();
        break;
      }
    }
    out.nodes.push_back(std::move(n));
    return static_cast<int>(out.nodes.size()) - 1;
  }
};

struct Frame {
  int k;
  std::vector<WorldSet> succ;
  std::vector<std::vector<int>> automorphisms;  // non-identity, root fixed
};

struct Instance {
  int k = 1, n = 1;
  WorldSet all = 1;
  const std::vector<WorldSet>* succ = nullptr;
  std::vector<int> consts;
  std::vector<std::vector<int>> funs;
  std::vector<std::vector<WorldSet>> rels;
  std::vector<int> env;

  int term(const CTerm& t) {
    switch (t.kind) {
      case CTerm::Var: return env[t.slot];
      case CTerm::Const: return consts[t.slot];
      case CTerm::Fun: {
        std::size_t idx = 0;
        for (auto& a : t.args) idx = idx * n + term(a);
        return funs[t.slot][idx];
      }
    }
    return 0;
  }

  WorldSet eval(const Compiled& c, int i) {
    const CNode& nd = c.nodes[i];
    switch (nd.op) {
      case Op::Top: return all;
      case Op::Bot: return 0;
      case Op::Atom: {
        if (nd.rel == kStrictEq) return term(nd.args[0]) == term(nd.args[1]) ? all : 0;
        std::size_t idx = 0;
        for (auto& a : nd.args) idx = idx * n + term(a);
        return rels[nd.rel][idx];
      }
      case Op::And: {
        WorldSet l = eval(c, nd.lhs);
        return l ? l & eval(c, nd.rhs) : 0;
      }
      case Op::Or: {
        WorldSet l = eval(c, nd.lhs);
        return l == all ? all : l | eval(c, nd.rhs);
      }
      case Op::Imp: {
        WorldSet bad = eval(c, nd.lhs);
        if (bad) bad &= ~eval(c, nd.rhs);
        if (!bad) return all;
        WorldSet out = 0;
        for (int w = 0; w < k; ++w)
          if (!((*succ)[w] & bad)) out |= bit(w);
        return out;
      }
      case Op::Forall:
      case Op::Exists: {
        bool fa = nd.op == Op::Forall;
        WorldSet acc = fa ? all : 0;
        for (int d = 0; d < n; ++d) {
          env[nd.var] = d;
          WorldSet s = eval(c, nd.lhs);
          acc = fa ? acc & s : acc | s;
          if (fa ? acc == 0 : acc == all) break;
        }
        return acc;
      }
    }
    return 0;
  }
};

bool transitive(const std::vector<WorldSet>& succ) {
  for (std::size_t w = 0; w < succ.size(); ++w)
    for (std::size_t u = 0; u < succ.size(); ++u)
      if ((succ[w] & bit(static_cast<int>(u))) && (succ[u] & ~succ[w])) return false;
  return true;
}

std::vector<WorldSet> permute_frame(const std::vector<WorldSet>& succ, const std::vector<int>& p) {
  std::vector<WorldSet> out(succ.size(), 0);
  for (std::size_t w = 0; w < succ.size(); ++w)
    for (std::size_t u = 0; u < succ.size(); ++u)
      if (succ[w] & bit(static_cast<int>(u))) out[p[w]] |= bit(p[u]);
  return out;
}

WorldSet permute_set(WorldSet s, const std::vector<int>& p) {
  WorldSet out = 0;
  for (std::size_t w = 0; w < p.size(); ++w)
    if (s & bit(static_cast<int>(w))) out |= bit(p[w]);
  return out;
}

// Rooted transitive frames on k worlds, one per isomorphism class.
std::vector<Frame> rooted_frames(int k, bool reflexive_root, bool any_root) {
  std::vector<Frame> out;
  int free_bits = k * (k - 1);  // rows of the non-root worlds
  WorldSet others = (bit(k) - 1) & ~WorldSet(1);
  std::vector<std::vector<int>> perms;
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin() + 1, p.end()));

  for (int refl = 0; refl < 2; ++refl) {
    bool r = refl == 1;
    if (!any_root && r != reflexive_root) continue;
    for (std::uint64_t code = 0; code < (std::uint64_t(1) << free_bits); ++code) {
      std::vector<WorldSet> succ(k, 0);
      succ[0] = others | (r ? 1 : 0);
      for (int w = 1; w < k; ++w) succ[w] = (code >> ((w - 1) * k)) & (bit(k) - 1);
      if (!transitive(succ)) continue;
      bool minimal = true;
      std::vector<std::vector<int>> autos;
      for (std::size_t i = 1; i < perms.size(); ++i) {
        auto q = permute_frame(succ, perms[i]);
        if (q == succ) autos.push_back(perms[i]);
        else if (std::lexicographical_compare(q.begin(), q.end(), succ.begin(), succ.end())) {
          minimal = false;
          break;
        }
      }
      if (minimal) out.push_back({k, succ, autos});
    }
  }
  return out;
}

std::vector<WorldSet> upsets(const std::vector<WorldSet>& succ) {
  int k = static_cast<int>(succ.size());
  std::vector<WorldSet> out;
  for (WorldSet s = 0; s < bit(k); ++s) {
    bool ok = true;
    for (int w = 0; w < k && ok; ++w)
      if ((s & bit(w)) && (succ[w] & ~s)) ok = false;
    if (ok) out.push_back(s);
  }
  return out;
}

std::size_t power(int n, int a) {
  std::size_t r = 1;
  for (int i = 0; i < a; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

struct Task {
  int k, n;
  const Frame* frame;
};

struct TaskResult {
  bool found = false;
  std::vector<int> digits;
  long long candidates = 0;
  std::string note;
};

class Searcher {
public:
  Searcher(const Symbols& syms, const std::vector<Compiled>& premises, const Compiled& goal)
    : syms_(syms), premises_(premises), goal_(goal) {}

  TaskResult run(const Task& t) const {
    TaskResult res;
    const int n = t.n;
    const auto& succ = t.frame->succ;
    auto ups = upsets(succ);
    WorldSet all = bit(t.k) - 1;

    // digit layout: constants, function entries, relation tuples
    std::vector<int> radix;
    for (std::size_t c = 0; c < syms_.consts.size(); ++c) radix.push_back(n);
    std::vector<std::size_t> fun_off, rel_off;
    for (auto& [f, a] : syms_.funs) {
      fun_off.push_back(radix.size());
      for (std::size_t i = 0; i < power(n, a); ++i) radix.push_back(n);
    }
    for (auto& [r, a] : syms_.rels) {
      rel_off.push_back(radix.size());
      for (std::size_t i = 0; i < power(n, a); ++i) radix.push_back(static_cast<int>(ups.size()));
    }
    double space = 1;
    for (int r : radix) space *= r;
    if (space > kMaxInterpretations) {
      res.note = "skipped " + std::to_string(t.k) + " worlds / domain " + std::to_string(n) +
                 ": interpretation space too large";
      return res;
    }

    // orbit transformations: frame automorphisms (plus identity) x domain permutations
    std::vector<std::vector<int>> frame_perms = t.frame->automorphisms;
    std::vector<int> id(t.k);
    std::iota(id.begin(), id.end(), 0);
    frame_perms.insert(frame_perms.begin(), id);
    std::vector<std::vector<int>> dom_perms;
    std::vector<int> dp(n);
    std::iota(dp.begin(), dp.end(), 0);
    do dom_perms.push_back(dp);
    while (std::next_permutation(dp.begin(), dp.end()));
    struct Sym {
      std::vector<int> upset_map;
      const std::vector<int>* dom;
    };
    std::vector<Sym> syms;
    for (auto& fp : frame_perms)
      for (auto& dpm : dom_perms) {
        if (&fp == &frame_perms[0] && &dpm == &dom_perms[0]) continue;
        Sym s;
        s.dom = &dpm;
        for (WorldSet u : ups) {
          WorldSet v = permute_set(u, fp);
          s.upset_map.push_back(static_cast<int>(std::find(ups.begin(), ups.end(), v) - ups.begin()));
        }
        syms.push_back(std::move(s));
      }
    auto tuple_perm = [&](std::size_t idx, int arity, const std::vector<int>& d) {
      std::vector<int> vals(arity);
      for (int i = arity - 1; i >= 0; --i) {
        vals[i] = static_cast<int>(idx % n);
        idx /= n;
      }
      std::size_t out = 0;
      for (int v : vals) out = out * n + d[v];
      return out;
    };

    Instance inst;
    inst.k = t.k;
    inst.n = n;
    inst.all = all;
    inst.succ = &succ;
    inst.consts.assign(syms_.consts.size(), 0);
    inst.funs.resize(syms_.funs.size());
    for (std::size_t f = 0; f < syms_.funs.size(); ++f) inst.funs[f].assign(power(n, syms_.funs[f].second), 0);
    inst.rels.resize(syms_.rels.size());
    for (std::size_t r = 0; r < syms_.rels.size(); ++r) inst.rels[r].assign(power(n, syms_.rels[r].second), 0);
    int slots = goal_.var_slots;
    for (auto& p : premises_) slots = std::max(slots, p.var_slots);
    inst.env.assign(std::max(slots, 1), 0);

    std::vector<int> digits(radix.size(), 0);
    std::vector<int> image(radix.size());
    auto load = [&]() {
      std::size_t i = 0;
      for (std::size_t c = 0; c < syms_.consts.size(); ++c) inst.consts[c] = digits[i++];
      for (std::size_t f = 0; f < syms_.funs.size(); ++f)
        for (auto& v : inst.funs[f]) v = digits[i++];
      for (std::size_t r = 0; r < syms_.rels.size(); ++r)
        for (auto& v : inst.rels[r]) v = ups[digits[i++]];
    };
    auto canonical = [&]() {
      for (auto& s : syms) {
        const auto& d = *s.dom;
        std::size_t i = 0;
        for (std::size_t c = 0; c < syms_.consts.size(); ++c, ++i) image[i] = d[digits[i]];
        for (std::size_t f = 0; f < syms_.funs.size(); ++f) {
          int a = syms_.funs[f].second;
          std::size_t cnt = power(n, a);
          for (std::size_t e = 0; e < cnt; ++e)
            image[fun_off[f] + tuple_perm(e, a, d)] = d[digits[fun_off[f] + e]];
        }
        for (std::size_t r = 0; r < syms_.rels.size(); ++r) {
          int a = syms_.rels[r].second;
          std::size_t cnt = power(n, a);
          for (std::size_t e = 0; e < cnt; ++e)
            image[rel_off[r] + tuple_perm(e, a, d)] = s.upset_map[digits[rel_off[r] + e]];
        }
        if (std::lexicographical_compare(image.begin(), image.end(), digits.begin(), digits.end())) return false;
      }
      return true;
    };
    auto congruent = [&]() {
      if (syms_.eq_rel < 0) return true;
      const auto& eq = inst.rels[syms_.eq_rel];
      for (int a = 0; a < n; ++a)
        if (eq[a * n + a] != all) return false;
      for (int w = 0; w < t.k; ++w) {
        auto same = [&](int a, int b) { return (eq[a * n + b] & bit(w)) != 0; };
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            if (same(a, b) != same(b, a)) return false;
            for (int c = 0; c < n; ++c)
              if (same(a, b) && same(b, c) && !same(a, c)) return false;
          }
        auto equiv = [&](std::size_t x, std::size_t y, int arity) {
          for (int i = 0; i < arity; ++i) {
            if (!same(static_cast<int>(x % n), static_cast<int>(y % n))) return false;
            x /= n;
            y /= n;
          }
          return true;
        };
        for (std::size_t f = 0; f < syms_.funs.size(); ++f) {
          int a = syms_.funs[f].second;
          auto& tab = inst.funs[f];
          for (std::size_t x = 0; x < tab.size(); ++x)
            for (std::size_t y = 0; y < tab.size(); ++y)
              if (equiv(x, y, a) && !same(tab[x], tab[y])) return false;
        }
        for (std::size_t r = 0; r < syms_.rels.size(); ++r) {
          if (static_cast<int>(r) == syms_.eq_rel) continue;
          int a = syms_.rels[r].second;
          auto& h = inst.rels[r];
          for (std::size_t x = 0; x < h.size(); ++x)
            for (std::size_t y = 0; y < h.size(); ++y)
              if (equiv(x, y, a) && ((h[x] ^ h[y]) & bit(w))) return false;
        }
      }
      return true;
    };

    while (true) {
      load();
      if (congruent() && canonical()) {
        ++res.candidates;
        bool refutes = !(inst.eval(goal_, goal_.root) & 1);
        for (std::size_t p = 0; refutes && p < premises_.size(); ++p)
          refutes = (inst.eval(premises_[p], premises_[p].root) & 1) != 0;
        if (refutes) {
          res.found = true;
          res.digits = digits;
          return res;
        }
      }
      std::size_t i = digits.size();
      while (i > 0) {
        --i;
        if (++digits[i] < radix[i]) break;
        digits[i] = 0;
        if (i == 0) return res;
      }
      if (digits.empty()) return res;
    }
  }

  KripkeModel build(const Task& t, const std::vector<int>& digits, IdentityMode identity) const {
    KripkeModel m;
    for (int w = 0; w < t.k; ++w) m.add_world("w" + std::to_string(w));
    m.succ = t.frame->succ;
    m.domain = t.n;
    m.identity = identity;
    auto ups = upsets(t.frame->succ);
    std::size_t i = 0;
    for (auto& c : syms_.consts) m.consts[c] = digits[i++];
    for (auto& [f, a] : syms_.funs) {
      FunInterp fi;
      fi.arity = a;
      for (std::size_t e = 0; e < power(t.n, a); ++e) fi.table.push_back(digits[i++]);
      m.funs[f] = fi;
    }
    for (auto& [r, a] : syms_.rels) {
      RelInterp ri;
      ri.arity = a;
      for (std::size_t e = 0; e < power(t.n, a); ++e) ri.holds.push_back(ups[digits[i++]]);
      m.rels[r] = ri;
    }
    return m;
  }

private:
  const Symbols& syms_;
  const std::vector<Compiled>& premises_;
  const Compiled& goal_;
};

}  // namespace

SearchResult countermodel_search(const std::vector<Formula>& gamma, const Formula& phi, SearchBounds bounds,
                                 SearchMode mode, int jobs) {
  if (bounds.max_worlds < 1 || bounds.max_domain < 1)
    throw std::invalid_argument("search bounds must be positive");
  for (auto& g : gamma)
    if (!is_sentence(g)) throw std::invalid_argument("premise " + to_string(g) + " is not a sentence");
  if (!is_sentence(phi)) throw std::invalid_argument("conclusion " + to_string(phi) + " is not a sentence");

  SearchResult result;
  int max_worlds = bounds.max_worlds;
  if (max_worlds > 5) {
    result.notes.push_back("world bound capped at 5");
    max_worlds = 5;
  }
  bool logical_eq = mode == SearchMode::StrictIdentity || mode == SearchMode::CongruenceIdentity;
  Symbols syms;
  for (auto& g : gamma) collect(g, syms, logical_eq);
  collect(phi, syms, logical_eq);
  if (mode == SearchMode::CongruenceIdentity) {
    syms.rels.push_back({"=", 2});
    syms.eq_rel = static_cast<int>(syms.rels.size()) - 1;
  }
  if (syms.consts.empty() && syms.funs.empty() && max_worlds > 0) {
    // nothing to add; constants only matter when present
  }

  bool strict = mode == SearchMode::StrictIdentity;
  std::vector<Compiled> premises;
  for (auto& g : gamma) {
    Compiler c{syms, strict, {}, {}};
    c.out.root = c.node(g);
    premises.push_back(std::move(c.out));
  }
  Compiler gc{syms, strict, {}, {}};
  gc.out.root = gc.node(phi);
  Compiled goal = std::move(gc.out);

  bool reflexive_required = mode != SearchMode::Bqlcd && bounds.require_reflexive_root;
  std::vector<std::vector<Frame>> frames(max_worlds + 1);
  for (int k = 1; k <= max_worlds; ++k) frames[k] = rooted_frames(k, true, !reflexive_required);

  std::vector<Task> tasks;
  for (int k = 1; k <= max_worlds; ++k)
    for (int n = 1; n <= bounds.max_domain; ++n)
      for (auto& f : frames[k]) tasks.push_back({k, n, &f});

  Searcher searcher(syms, premises, goal);
  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{tasks.size()};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      if (i > best.load()) continue;
      results[i] = searcher.run(tasks[i]);
      if (results[i].found) {
        std::size_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::size_t stop = best.load();
  for (std::size_t i = 0; i < tasks.size() && i <= stop; ++i) {
    result.candidates += results[i].candidates;
    if (!results[i].note.empty()) result.notes.push_back(results[i].note);
  }
  if (stop < tasks.size()) {
    IdentityMode im = mode == SearchMode::StrictIdentity       ? IdentityMode::Strict
                      : mode == SearchMode::CongruenceIdentity ? IdentityMode::Congruence
                                                               : IdentityMode::Absent;
    result.found = true;
    result.model = searcher.build(tasks[stop], results[stop].digits, im);
    result.witness = 0;
    result.model.validate();
    auto w = refuting_world(result.model, gamma, phi, reflexive_required);
    bool ok = true;
    for (auto& g : gamma) ok = ok && satisfies(result.model, 0, g);
    ok = ok && !satisfies(result.model, 0, phi) && (!reflexive_required || result.model.reflexive(0));
    if (!w || !ok) throw std::logic_error("search produced a witness that does not refute the sequent");
  }
  return result;
}

}  // namespace tjk
