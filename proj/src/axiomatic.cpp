#include <algorithm>
#include <functional>

#include "tjk/transform.hpp"

namespace tjk {

namespace {

std::optional<int> discharged_eigen(const Proof& p) {
  const Formula& major = p.children[0].conclusion;
  std::set<std::string> ids(p.discharges.begin(), p.discharges.end());
  for (auto& l : leaves_of(p.children[1]))
    if (ids.count(l.id)) {
      auto t = match_instance(major.body(), major.var(), l.formula);
      if (t && *t && t->kind() == TermKind::Param) return t->index();
    }
  return std::nullopt;
}

Proof to_nd(const Proof& t) {
  switch (t.rule) {
    case Rule::Assumption: return t;
    case Rule::Axiom: {
      if (t.schema) return axiom_template(*t.schema, t.conclusion);
      for (Schema s : all_schemas())
        if (matches_schema(s, t.conclusion)) return axiom_template(s, t.conclusion);
      throw TransformError(to_string(t.conclusion) + " is not an axiom");
    }
    case Rule::Affixing: {
      // φ→ψ, χ→γ gives (ψ→χ)→(φ→γ) by two internal transitivity steps
      Proof a = to_nd(t.children[0]);
      Proof b = to_nd(t.children[1]);
      Formula mid = t.conclusion.lhs();
      Proof h = leaf(mid);
      Proof inner = node(Rule::IntTrans, imp(mid.lhs(), b.conclusion.rhs()), {h, b});
      Proof outer = node(Rule::IntTrans, t.conclusion.rhs(), {a, inner});
      return node(Rule::ImpInt, t.conclusion, {outer}, {h.id});
    }
    case Rule::OrElim:
      return unrestricted_or_elim(to_nd(t.children[0]), to_nd(t.children[1]), to_nd(t.children[2]));
    case Rule::ExistsElim:
      return unrestricted_exists_elim(to_nd(t.children[0]), to_nd(t.children[1]), discharged_eigen(t));
    default: {
      Proof q = t;
      for (auto& c : q.children) c = to_nd(c);
      return q;
    }
  }
}

// From proofs of A→B and B→C, a proof of A→C.
Proof trans(const Proof& p, const Proof& q) {
  Formula ab = p.conclusion, bc = q.conclusion;
  Formula both = conj(ab, bc);
  Formula goal = imp(ab.lhs(), bc.rhs());
  return node(Rule::ImpElim, goal, {node(Rule::AndInt, both, {p, q}), axiom(Schema::Transitivity, imp(both, goal))});
}

// From proofs of A→B and A→C, a proof of A→B∧C.
Proof combine(const Proof& p, const Proof& q) {
  Formula both = conj(p.conclusion, q.conclusion);
  Formula goal = imp(p.conclusion.lhs(), conj(p.conclusion.rhs(), q.conclusion.rhs()));
  return node(Rule::ImpElim, goal, {node(Rule::AndInt, both, {p, q}), axiom(Schema::AndIntro, imp(both, goal))});
}

Proof mp(const Proof& arg, const Proof& fn) { return node(Rule::ImpElim, fn.conclusion.rhs(), {arg, fn}); }

// Closed proof of S→φ where φ is the member of `s` reached along `path`.
Proof projection(const Formula& s, const std::vector<int>& path) {
  Formula cur = s;
  Proof acc = axiom(Schema::Identity, imp(s, s));
  for (int bit : path) {
    Formula next = bit == 0 ? cur.lhs() : cur.rhs();
    Proof step = axiom(bit == 0 ? Schema::AndElimL : Schema::AndElimR, imp(cur, next));
    acc = acc.conclusion.lhs() == acc.conclusion.rhs() ? step : trans(acc, step);
    cur = next;
  }
  return acc;
}

// Closed proof of from→to for contexts whose members all occur in `from`.
Proof restrict_context(const Context& from, const Context& to) {
  Formula s = from.formula();
  if (to.empty()) return axiom(Schema::Top, imp(s, top()));
  std::function<Proof(const Formula&, const std::vector<int>&)> build = [&](const Formula& target,
                                                                             const std::vector<int>& prefix) -> Proof {
    for (auto& [g, path] : to.members)
      if (path == prefix) {
        auto src = from.find(g);
        if (!src) throw TransformError("context member " + to_string(g) + " is missing");
        return projection(s, *src);
      }
    // the ⊤ placeholder of an empty base context
    if (target.is(Op::Top)) return axiom(Schema::Top, imp(s, top()));
    if (!target.is(Op::And)) throw TransformError("context shape does not match its members");
    auto l = prefix, r = prefix;
    l.push_back(0);
    r.push_back(1);
    return combine(build(target.lhs(), l), build(target.rhs(), r));
  };
  return build(to.conj, {});
}

// Base context: ⊤ with no members, so that every extension is a conjunction.
Context base_context(const std::vector<Formula>& gamma) {
  if (gamma.empty()) return Context{top(), {}};
  return Context::of(gamma);
}

Context extended(const Context& c, const Formula& f) { return c.extend(f); }

class Hilbert {
public:
  // Closed axiomatic proof of S → conclusion(t).
  Proof run(const Proof& t, const Context& ctx) {
    Formula s = ctx.formula();
    const Formula& c = t.conclusion;
    auto weaken = [&](const Proof& p) {
      return mp(p, axiom(Schema::Weakening, imp(p.conclusion, imp(s, p.conclusion))));
    };
    switch (t.rule) {
      case Rule::Assumption: {
        auto path = ctx.find(c);
        if (!path) throw TransformError("open assumption " + to_string(c) + " is outside the context");
        return projection(s, *path);
      }
      case Rule::TopInt: return axiom(Schema::Top, imp(s, top()));
      case Rule::EqInt:
      case Rule::IdXm: return weaken(t);

      case Rule::BotElim: return unary(t, ctx, Schema::Bot);
      case Rule::AndElimL: return unary(t, ctx, Schema::AndElimL);
      case Rule::AndElimR: return unary(t, ctx, Schema::AndElimR);
      case Rule::OrIntL: return unary(t, ctx, Schema::OrIntroL);
      case Rule::OrIntR: return unary(t, ctx, Schema::OrIntroR);
      case Rule::ForallElim: return unary(t, ctx, Schema::ForallElim);
      case Rule::ExistsInt: return unary(t, ctx, Schema::ExistsIntro);
      case Rule::CD: return unary(t, ctx, Schema::CD);
      case Rule::IntForallInt: return unary(t, ctx, Schema::ForallImp);
      case Rule::IntExistsElim: return unary(t, ctx, Schema::ExistsImp);

      case Rule::AndInt: return combine(run(t.children[0], ctx), run(t.children[1], ctx));
      case Rule::IntTrans: return binary(t, ctx, Schema::Transitivity);
      case Rule::IntAndInt: return binary(t, ctx, Schema::AndIntro);
      case Rule::IntOrElim: return binary(t, ctx, Schema::OrElim);

      case Rule::OrElim: {
        const Formula& major = t.children[0].conclusion;
        const Formula& a = major.lhs();
        const Formula& b = major.rhs();
        Proof left = run(t.children[1], extended(ctx, a));    // S∧α → χ
        Proof right = run(t.children[2], extended(ctx, b));   // S∧β → χ
        Formula sa = conj(s, a), sb = conj(s, b);
        Formula both = conj(left.conclusion, right.conclusion);
        Proof cases = mp(node(Rule::AndInt, both, {left, right}),
                         axiom(Schema::OrElim, imp(both, imp(disj(sa, sb), c))));
        Proof dist = axiom(Schema::Distribution, imp(conj(s, major), disj(sa, sb)));
        Proof pair = combine(axiom(Schema::Identity, imp(s, s)), run(t.children[0], ctx));
        return trans(trans(pair, dist), cases);
      }

      case Rule::ImpInt: return release(run(t.children[0], extended(ctx, c.lhs())), s, c.lhs(), c.rhs());

      case Rule::ForallInt: {
        auto e = match_instance(c.body(), c.var(), t.children[0].conclusion);
        Context sub = restricted(t.children[0], ctx, std::nullopt, Formula());
        Formula s2 = sub.formula();
        Proof p = run(t.children[0], sub);  // S* → φ(a)
        Formula body = (e && *e) ? abstract_parameter(p.conclusion, (*e).index(), c.var()) : p.conclusion;
        Proof gen = node(Rule::ForallInt, forall(c.var(), body), {p});
        Proof dist = mp(gen, axiom(Schema::ForallImp, imp(gen.conclusion, imp(s2, c))));
        if (s2 == s) return dist;
        return trans(restrict_context(ctx, sub), dist);
      }

      case Rule::ExistsElim: {
        const Formula& major = t.children[0].conclusion;
        const std::string& v = major.var();
        auto eigen = discharged_eigen(t);
        if (!eigen && occurs_free(major.body(), v)) {
          int fresh = 0;
          for (int k : parameters_of(t)) fresh = std::max(fresh, k + 1);
          for (int k : parameters_of(s)) fresh = std::max(fresh, k + 1);
          eigen = fresh;
        }
        Formula inst = eigen ? substitute(major.body(), v, param(*eigen)) : major.body();
        Context sub = restricted(t.children[1], ctx, eigen, inst);
        Formula s2 = sub.formula();
        Proof p = run(t.children[1], extended(sub, inst));  // S*∧φ(a) → χ
        Formula hyp = conj(s2, major.body());
        Formula body = eigen ? abstract_parameter(p.conclusion, *eigen, v) : p.conclusion;
        Proof gen = node(Rule::ForallInt, forall(v, body), {p});
        Proof elim = mp(gen, axiom(Schema::ExistsImp, imp(gen.conclusion, imp(exists(v, hyp), c))));
        Proof inf = axiom(Schema::InfDistribution, imp(conj(s2, major), exists(v, hyp)));
        Proof inner = trans(inf, elim);  // S*∧∃vφ → χ
        Proof major_p = run(t.children[0], ctx);
        Proof to_sub = combine(restrict_context(ctx, sub), major_p);  // S → S*∧∃vφ
        return trans(to_sub, inner);
      }

      case Rule::EqElim: throw TransformError("identity elimination has no axiomatic counterpart here");
      case Rule::ImpElim: throw TransformError("modus ponens inside the source proof");
      case Rule::Axiom:
      case Rule::Affixing: break;
    }
    throw TransformError(to_string(t.rule) + " does not belong to natural deduction");
  }

private:
  Proof unary(const Proof& t, const Context& ctx, Schema s) {
    Proof p = run(t.children[0], ctx);
    return trans(p, axiom(s, imp(t.children[0].conclusion, t.conclusion)));
  }

  Proof binary(const Proof& t, const Context& ctx, Schema s) {
    Proof p = combine(run(t.children[0], ctx), run(t.children[1], ctx));
    return trans(p, axiom(s, imp(p.conclusion.rhs(), t.conclusion)));
  }

  // From a proof of S∧α → β, a proof of S → (α → β).
  static Proof release(const Proof& p, const Formula& s, const Formula& a, const Formula& b) {
    Formula sa = conj(s, a);
    Proof w1 = axiom(Schema::Weakening, imp(s, imp(a, s)));                                   // S → (α → S)
    Proof id = axiom(Schema::Identity, imp(a, a));
    Proof w2 = mp(id, axiom(Schema::Weakening, imp(id.conclusion, imp(s, id.conclusion))));   // S → (α → α)
    Proof both = combine(w1, w2);                                                             // S → (α→S)∧(α→α)
    Formula pairs = both.conclusion.rhs();
    Proof intro = axiom(Schema::AndIntro, imp(pairs, imp(a, sa)));
    Proof to_sa = trans(both, intro);                                                         // S → (α → S∧α)
    Formula pre = imp(imp(a, sa), imp(a, b));
    Proof prefixed = mp(p, axiom(Schema::Prefixing, imp(imp(sa, b), pre)));                  // (α→S∧α) → (α→β)
    return trans(to_sa, prefixed);
  }

  static Context restricted(const Proof& sub, const Context& ctx, std::optional<int> avoid, const Formula& skip) {
    auto open = open_assumptions(sub);
    std::vector<Formula> members;
    for (auto& [g, path] : ctx.members) {
      if (skip && g == skip) continue;
      if (avoid && has_parameter(g, *avoid)) continue;
      if (std::find(open.begin(), open.end(), g) == open.end()) continue;
      if (std::find(members.begin(), members.end(), g) == members.end()) members.push_back(g);
    }
    Context c{top(), {}};
    for (auto& g : members) c = c.extend(g);
    return c;
  }
};

}  // namespace

Proof axiomatic_to_nd(const Proof& t) { return to_nd(t); }

Proof nd_to_axiomatic(const Proof& t, const std::vector<Formula>& gamma) {
  if (stratum(t) != -1) throw TransformError("source proof uses modus ponens");
  Context ctx = base_context(gamma);
  Hilbert h;
  return h.run(t, ctx);
}

Proof nd_to_axiomatic(const Proof& t) { return nd_to_axiomatic(t, open_assumptions(t)); }

}  // namespace tjk
