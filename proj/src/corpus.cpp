#include <algorithm>

#include "tjk/corpus.hpp"

namespace tjk {

namespace {

int pick(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

Formula random_atom(std::mt19937_64& rng) {
  switch (pick(rng, 6)) {
    case 0: return atom("p");
    case 1: return atom("q");
    case 2: return atom("P", {constant("c")});
    case 3: return atom("P", {param(0)});
    case 4: return top();
    default: return pick(rng, 2) ? atom("p") : bot();
  }
}

class Generator {
public:
  explicit Generator(std::mt19937_64& rng) : rng_(rng) {}

  // `hyps` are formulas the leaves should prefer, so that enclosing rules
  // find something to discharge.
  Proof gen(int depth, const std::vector<Formula>& hyps) {
    if (depth <= 0 || pick(rng_, 12) == 0) return base(hyps);
    for (int attempt = 0; attempt < 6; ++attempt) {
      auto p = step(depth, hyps);
      if (p) return *p;
    }
    return base(hyps);
  }

private:
  std::mt19937_64& rng_;

  Proof base(const std::vector<Formula>& hyps) {
    if (!hyps.empty() && pick(rng_, 3) != 0) return leaf(hyps[pick(rng_, static_cast<int>(hyps.size()))]);
    if (pick(rng_, 6) == 0) return node(Rule::TopInt, top(), {});
    return leaf(random_formula(rng_, 1));
  }

  // Proof of exactly `goal`: a leaf, ⊤-Int, or a small introduction.
  Proof prove(const Formula& goal, int depth, const std::vector<Formula>& hyps) {
    if (goal.is(Op::Top)) return node(Rule::TopInt, top(), {});
    if (depth > 0) {
      int r = pick(rng_, 4);
      if (r == 0 && goal.is(Op::And))
        return node(Rule::AndInt, goal, {prove(goal.lhs(), depth - 1, hyps), prove(goal.rhs(), depth - 1, hyps)});
      if (r == 1 && goal.is(Op::Imp)) {
        auto inner = hyps;
        inner.push_back(goal.lhs());
        return discharge(goal.lhs(), prove(goal.rhs(), depth - 1, inner), goal);
      }
      if (r == 2 && goal.is(Op::Or))
        return pick(rng_, 2) ? node(Rule::OrIntL, goal, {prove(goal.lhs(), depth - 1, hyps)})
                             : node(Rule::OrIntR, goal, {prove(goal.rhs(), depth - 1, hyps)});
    }
    return leaf(goal);
  }

  // →-Int discharging the safe open leaves of `a`.
  static Proof discharge(const Formula& a, const Proof& body, const Formula& conclusion) {
    std::vector<std::string> ids;
    for (auto& l : leaves_of(body))
      if (l.open && !l.unsafe && l.formula == a) ids.push_back(l.id);
    return node(Rule::ImpInt, conclusion, {body}, ids);
  }

  static std::vector<std::string> safe_open(const Proof& p, const Formula& f) {
    std::vector<std::string> ids;
    for (auto& l : leaves_of(p))
      if (l.open && !l.unsafe && l.formula == f) ids.push_back(l.id);
    return ids;
  }

  std::optional<Proof> step(int depth, const std::vector<Formula>& hyps) {
    try {
      return step_unchecked(depth, hyps);
    } catch (const SyntaxError&) {
      // abstraction would capture a bound variable
      return std::nullopt;
    }
  }

  std::optional<Proof> step_unchecked(int depth, const std::vector<Formula>& hyps) {
    int d = depth - 1;
    switch (pick(rng_, 15)) {
      case 0: {
        Proof a = gen(d, hyps), b = gen(d, hyps);
        return node(Rule::AndInt, conj(a.conclusion, b.conclusion), {a, b});
      }
      case 1: {
        Proof a = gen(d, hyps);
        if (!a.conclusion.is(Op::And)) return std::nullopt;
        return pick(rng_, 2) ? node(Rule::AndElimL, a.conclusion.lhs(), {a}) : node(Rule::AndElimR, a.conclusion.rhs(), {a});
      }
      case 2: {
        Proof a = gen(d, hyps);
        Formula other = random_formula(rng_, 1);
        return pick(rng_, 2) ? node(Rule::OrIntL, disj(a.conclusion, other), {a})
                             : node(Rule::OrIntR, disj(other, a.conclusion), {a});
      }
      case 3:
      case 4: {
        Formula a = hyps.empty() || pick(rng_, 2) ? random_formula(rng_, 1) : hyps[pick(rng_, static_cast<int>(hyps.size()))];
        auto inner = hyps;
        inner.push_back(a);
        Proof body = gen(d, inner);
        return discharge(a, body, imp(a, body.conclusion));
      }
      case 5:
      case 6: {
        // modus ponens: conditional premise first, then its antecedent
        Proof fn = gen(d, hyps);
        if (!fn.conclusion.is(Op::Imp)) {
          Formula a = random_formula(rng_, 1);
          if (pick(rng_, 2)) {
            // derive the conditional by a nested modus ponens so that strata stack up
            Formula b = random_formula(rng_, 1);
            fn = node(Rule::ImpElim, imp(a, b), {fn, leaf(imp(fn.conclusion, imp(a, b)))});
          } else {
            fn = leaf(imp(a, fn.conclusion));
          }
        }
        Proof arg = prove(fn.conclusion.lhs(), d, hyps);
        return node(Rule::ImpElim, fn.conclusion.rhs(), {arg, fn});
      }
      case 7: {
        Formula a = random_formula(rng_, 1), b = random_formula(rng_, 1);
        Formula ab = disj(a, b);
        Proof major = pick(rng_, 2) ? leaf(ab) : gen(d, hyps);
        if (!major.conclusion.is(Op::Or)) return std::nullopt;
        a = major.conclusion.lhs();
        b = major.conclusion.rhs();
        auto h1 = hyps, h2 = hyps;
        h1.push_back(a);
        h2.push_back(b);
        Proof left = gen(d, h1);
        Proof right = prove(left.conclusion, d, h2);
        auto ids = safe_open(left, a);
        auto more = safe_open(right, b);
        ids.insert(ids.end(), more.begin(), more.end());
        return node(Rule::OrElim, left.conclusion, {major, left, right}, ids);
      }
      case 8: {
        // ∀-Int over a parameter absent from the open assumptions
        Proof a = gen(d, hyps);
        auto ps = parameters_of(a.conclusion);
        if (ps.empty()) return std::nullopt;
        int k = *ps.begin();
        for (auto& f : open_assumptions(a))
          if (has_parameter(f, k)) return std::nullopt;
        return node(Rule::ForallInt, forall("x", abstract_parameter(a.conclusion, k, "x")), {a});
      }
      case 9: {
        Formula body = pick(rng_, 2) ? atom("P", {var("x")}) : disj(atom("P", {var("x")}), random_formula(rng_, 0));
        Proof a = pick(rng_, 2) ? leaf(forall("x", body)) : gen(d, hyps);
        if (!a.conclusion.is(Op::Forall)) return std::nullopt;
        Term t = pick(rng_, 2) ? constant("c") : param(0);
        return node(Rule::ForallElim, substitute(a.conclusion.body(), a.conclusion.var(), t), {a});
      }
      case 10: {
        Proof a = gen(d, hyps);
        Term t = pick(rng_, 2) ? constant("c") : param(0);
        Formula body = abstract_term(a.conclusion, t, "x");
        if (body == a.conclusion) return std::nullopt;
        return node(Rule::ExistsInt, exists("x", body), {a});
      }
      case 11: {
        // ∃-Elim with a fresh eigenparameter
        Formula body = pick(rng_, 2) ? atom("P", {var("x")}) : conj(atom("P", {var("x")}), random_formula(rng_, 0));
        Proof major = pick(rng_, 2) ? leaf(exists("x", body)) : gen(d, hyps);
        if (!major.conclusion.is(Op::Exists)) return std::nullopt;
        int eigen = 7;
        Formula inst = substitute(major.conclusion.body(), major.conclusion.var(), param(eigen));
        auto h = hyps;
        h.push_back(inst);
        Proof minor = gen(d, h);
        if (has_parameter(minor.conclusion, eigen) || has_parameter(major.conclusion, eigen)) return std::nullopt;
        std::vector<std::string> ids;
        for (auto& l : leaves_of(minor)) {
          if (!l.open) continue;
          if (l.formula == inst) {
            if (l.unsafe) return std::nullopt;
            ids.push_back(l.id);
          } else if (has_parameter(l.formula, eigen)) {
            return std::nullopt;
          }
        }
        return node(Rule::ExistsElim, minor.conclusion, {major, minor}, ids);
      }
      case 12: {
        Proof a = gen(d, hyps);
        if (!a.conclusion.is(Op::Bot)) a = leaf(bot());
        return node(Rule::BotElim, random_formula(rng_, 1), {a});
      }
      case 13: {
        // internal transitivity / conjunction / disjunction on conditionals
        Formula x = random_formula(rng_, 0), y = random_formula(rng_, 0), z = random_formula(rng_, 0);
        auto cond = [&](const Formula& a, const Formula& b) { return prove(imp(a, b), d, hyps); };
        switch (pick(rng_, 3)) {
          case 0: return node(Rule::IntTrans, imp(x, z), {cond(x, y), cond(y, z)});
          case 1: return node(Rule::IntAndInt, imp(x, conj(y, z)), {cond(x, y), cond(x, z)});
          default: return node(Rule::IntOrElim, imp(disj(x, y), z), {cond(x, z), cond(y, z)});
        }
      }
      default: {
        Formula a = random_formula(rng_, 0);
        Formula body = disj(a, atom("P", {var("x")}));
        Proof prem = leaf(forall("x", body));
        if (pick(rng_, 2)) return node(Rule::CD, disj(a, forall("x", atom("P", {var("x")}))), {prem});
        Formula ib = imp(a, atom("P", {var("x")}));
        if (pick(rng_, 2))
          return node(Rule::IntForallInt, imp(a, forall("x", atom("P", {var("x")}))), {leaf(forall("x", ib))});
        Formula eb = imp(atom("P", {var("x")}), a);
        return node(Rule::IntExistsElim, imp(exists("x", atom("P", {var("x")})), a), {leaf(forall("x", eb))});
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Axiomatic proofs

Proof mp(const Proof& arg, const Proof& fn) { return node(Rule::ImpElim, fn.conclusion.rhs(), {arg, fn}); }

Proof ax(Schema s, const Formula& f) { return axiom(s, f); }

// Closed proof of A→C from proofs of A→B and B→C via the transitivity axiom.
Proof chain(const Proof& p, const Proof& q) {
  Formula both = conj(p.conclusion, q.conclusion);
  Formula goal = imp(p.conclusion.lhs(), q.conclusion.rhs());
  return mp(node(Rule::AndInt, both, {p, q}), ax(Schema::Transitivity, imp(both, goal)));
}

class AxiomGenerator {
public:
  explicit AxiomGenerator(std::mt19937_64& rng) : rng_(rng) {}

  // A random closed proof of a conditional.
  Proof conditional(int depth) {
    if (depth <= 0) return simple_axiom();
    switch (pick(rng_, 6)) {
      case 0: {
        Proof p = conditional(depth - 1);
        Formula b = p.conclusion.rhs();
        Formula c = random_formula(rng_, 0);
        return chain(p, ax(Schema::OrIntroL, imp(b, disj(b, c))));
      }
      case 1: {
        Proof p = conditional(depth - 1);
        Formula a = p.conclusion.lhs();
        Formula c = random_formula(rng_, 0);
        return chain(ax(Schema::AndElimL, imp(conj(a, c), a)), p);
      }
      case 2: {
        // suffixing by modus ponens
        Proof p = conditional(depth - 1);
        Formula c = random_formula(rng_, 0);
        Formula a = p.conclusion.lhs(), b = p.conclusion.rhs();
        return mp(p, ax(Schema::Suffixing, imp(p.conclusion, imp(imp(b, c), imp(a, c)))));
      }
      case 3: {
        Proof p = conditional(depth - 1), q = conditional(depth - 1);
        return node(Rule::Affixing, imp(imp(p.conclusion.rhs(), q.conclusion.lhs()), imp(p.conclusion.lhs(), q.conclusion.rhs())),
                    {p, q});
      }
      case 4: {
        Proof p = conditional(depth - 1);
        Formula c = random_formula(rng_, 0);
        return mp(p, ax(Schema::Weakening, imp(p.conclusion, imp(c, p.conclusion))));
      }
      default: {
        // pair two conditionals with the same antecedent
        Proof p = conditional(depth - 1);
        Formula a = p.conclusion.lhs();
        Proof q = ax(Schema::Identity, imp(a, a));
        Formula both = conj(p.conclusion, q.conclusion);
        return mp(node(Rule::AndInt, both, {p, q}),
                  ax(Schema::AndIntro, imp(both, imp(a, conj(p.conclusion.rhs(), a)))));
      }
    }
  }

  Proof simple_axiom() {
    Formula a = random_formula(rng_, 1), b = random_formula(rng_, 0);
    switch (pick(rng_, 6)) {
      case 0: return ax(Schema::Identity, imp(a, a));
      case 1: return ax(Schema::AndElimR, imp(conj(b, a), a));
      case 2: return ax(Schema::OrIntroR, imp(a, disj(b, a)));
      case 3: return ax(Schema::Bot, imp(bot(), a));
      case 4: return ax(Schema::Top, imp(a, top()));
      default: {
        Formula body = disj(b, atom("P", {var("x")}));
        return ax(Schema::CD, imp(forall("x", body), disj(b, forall("x", atom("P", {var("x")})))));
      }
    }
  }

 private:
  std::mt19937_64& rng_;
};

}  // namespace

Formula random_formula(std::mt19937_64& rng, int depth) {
  if (depth <= 0 || pick(rng, 3) == 0) return random_atom(rng);
  Formula a = random_formula(rng, depth - 1), b = random_formula(rng, depth - 1);
  switch (pick(rng, 3)) {
    case 0: return conj(a, b);
    case 1: return disj(a, b);
    default: return imp(a, b);
  }
}

namespace {

Formula sentence_rec(std::mt19937_64& rng, int depth, bool full, const std::vector<std::string>& bound) {
  if (depth <= 0 || pick(rng, 4) == 0) {
    int r = pick(rng, bound.empty() ? 6 : 8);
    switch (r) {
      case 0: return atom("p");
      case 1: return atom("q");
      case 2: return atom("P", {constant("c")});
      case 3: return top();
      case 4: return bot();
      case 5: return atom("P", {param(0)});
      default: return atom("P", {var(bound[pick(rng, static_cast<int>(bound.size()))])});
    }
  }
  int r = pick(rng, full ? 6 : 4);
  auto sub = [&](const std::vector<std::string>& b) { return sentence_rec(rng, depth - 1, full, b); };
  if (r == 3 || r == 5) {
    std::string v = bound.size() % 2 ? "y" : "x";
    auto inner = bound;
    inner.push_back(v);
    return r == 3 ? forall(v, sub(inner)) : exists(v, sub(inner));
  }
  Formula a = sub(bound), b = sub(bound);
  if (r == 0) return conj(a, b);
  if (r == 1) return imp(a, b);
  if (r == 2) return full ? disj(a, b) : imp(b, a);
  return disj(a, b);
}

}  // namespace

Formula random_sentence(std::mt19937_64& rng, int depth, bool with_or_exists) {
  return sentence_rec(rng, depth, with_or_exists, {});
}

Proof random_nd_proof(std::mt19937_64& rng, int depth) {
  Generator g(rng);
  return g.gen(depth, {});
}

std::vector<Proof> nd_corpus(int count, int max_depth, std::uint64_t seed) {
  std::vector<Proof> out;
  System sys = System::parse("nbqlcd_r");
  std::mt19937_64 rng(seed);
  while (static_cast<int>(out.size()) < count) {
    // favour the deeper end of the range
    int depth = std::max(1, max_depth - pick(rng, 3));
    Proof p = random_nd_proof(rng, depth);
    if (p.height() > static_cast<std::size_t>(max_depth) + 1) continue;
    // thin out the many tiny trees
    std::size_t floor = static_cast<std::size_t>(std::min(max_depth, 4));
    if (p.height() < floor && pick(rng, 4) != 0) continue;
    if (!check_proof(p, sys).valid) continue;
    // keep a healthy share of proofs that use modus ponens
    if (stratum(p) < 0 && pick(rng, 3) == 0) continue;
    out.push_back(canonical_ids(p));
  }
  return out;
}

std::vector<Proof> axiomatic_theorems(int count, std::uint64_t seed) {
  std::vector<Proof> out;
  System sys = System::parse("tjkd+");
  std::mt19937_64 rng(seed);
  AxiomGenerator g(rng);
  while (static_cast<int>(out.size()) < count) {
    Proof p = g.conditional(1 + pick(rng, 3));
    if (stratum(p) < 0 || !open_assumptions(p).empty()) continue;
    if (!check_proof(p, sys).valid) continue;
    out.push_back(canonical_ids(p));
  }
  return out;
}

std::vector<Proof> axiomatic_derivations(int count, std::uint64_t seed) {
  std::vector<Proof> out;
  System sys = System::parse("tjkd+");
  std::mt19937_64 rng(seed);
  AxiomGenerator g(rng);
  Formula p = atom("p"), q = atom("q");
  Formula px = atom("P", {var("x")});
  while (static_cast<int>(out.size()) < count) {
    Proof base;
    switch (pick(rng, 3)) {
      case 0: {
        // from p ∨ q: q ∨ p by disjunction elimination
        Proof lp = leaf(p), lq = leaf(q);
        Formula goal = disj(q, p);
        base = node(Rule::OrElim, goal,
                    {leaf(disj(p, q)), node(Rule::OrIntR, goal, {lp}), node(Rule::OrIntL, goal, {lq})}, {lp.id, lq.id});
        break;
      }
      case 1: {
        // from ∃x P(x): ∃x (P(x) ∨ q)
        Formula inst = atom("P", {param(5)});
        Proof li = leaf(inst);
        Formula goal = exists("x", disj(px, q));
        Proof minor = node(Rule::ExistsInt, goal, {node(Rule::OrIntL, disj(inst, q), {li})});
        base = node(Rule::ExistsElim, goal, {leaf(exists("x", px)), minor}, {li.id});
        break;
      }
      default: {
        // modus ponens from hypotheses p and p → q
        base = mp(leaf(p), leaf(imp(p, q)));
        break;
      }
    }
    // push the result through a closed conditional about it
    Formula c = base.conclusion;
    Proof fn;
    switch (pick(rng, 3)) {
      case 0: fn = ax(Schema::OrIntroL, imp(c, disj(c, random_formula(rng, 0)))); break;
      case 1: fn = chain(ax(Schema::Identity, imp(c, c)), ax(Schema::Top, imp(c, top()))); break;
      default: {
        Formula a = random_formula(rng, 0);
        fn = ax(Schema::Weakening, imp(c, imp(a, c)));
        break;
      }
    }
    Proof result = mp(base, fn);
    if (pick(rng, 2)) {
      Proof side = g.conditional(1);
      result = node(Rule::AndInt, conj(result.conclusion, side.conclusion), {result, side});
    }
    if (!check_proof(result, sys).valid) continue;
    out.push_back(canonical_ids(result));
  }
  return out;
}

KripkeModel random_model(std::mt19937_64& rng, int worlds, int domain) {
  KripkeModel m;
  for (int w = 0; w < worlds; ++w) m.add_world("w" + std::to_string(w));
  for (int w = 0; w < worlds; ++w)
    for (int u = 0; u < worlds; ++u)
      if (pick(rng, 3) == 0) m.add_edge(w, u);
  m.close_transitively();
  m.domain = domain;
  m.consts["c"] = pick(rng, domain);
  m.consts["#0"] = pick(rng, domain);
  auto relation = [&](int arity) {
    RelInterp ri;
    ri.arity = arity;
    ri.holds.assign(m.tuple_count(arity), 0);
    for (auto& s : ri.holds) {
      for (int w = 0; w < worlds; ++w)
        if (pick(rng, 2) == 0) s |= bit(w);
      // close upward so that persistence holds
      for (int w = 0; w < worlds; ++w)
        if (s & bit(w)) s |= m.succ[w];
    }
    return ri;
  };
  m.rels["p"] = relation(0);
  m.rels["q"] = relation(0);
  m.rels["P"] = relation(1);
  return m;
}

}  // namespace tjk
