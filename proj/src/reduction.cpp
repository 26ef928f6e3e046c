#include <algorithm>

#include "tjk/transform.hpp"

namespace tjk {

namespace {

bool contains(const std::vector<Formula>& v, const Formula& f) { return std::find(v.begin(), v.end(), f) != v.end(); }

// Templates with open leaves, used as the inner proof of a regularity step.
Proof trans_template(const Formula& a, const Formula& b, const Formula& c) {
  return node(Rule::IntTrans, imp(a, c), {leaf(imp(a, b)), leaf(imp(b, c))});
}

Proof and_template(const Formula& a, const Formula& b, const Formula& c) {
  return node(Rule::IntAndInt, imp(a, conj(b, c)), {leaf(imp(a, b)), leaf(imp(a, c))});
}

Proof or_template(const Formula& a, const Formula& b, const Formula& c) {
  return node(Rule::IntOrElim, imp(disj(a, b), c), {leaf(imp(a, c)), leaf(imp(b, c))});
}

// Box-free step: from □ⁿ(A → B) and □ⁿ(B → C) to □ⁿ(A → C).
Proof chain(const Proof& p, const Proof& q, int n) {
  Formula ab = *unbox_formula(n, p.conclusion);
  Formula bc = *unbox_formula(n, q.conclusion);
  return regularize(trans_template(ab.lhs(), ab.rhs(), bc.rhs()), n, {p, q});
}

Proof pair(const Proof& p, const Proof& q, int n) {
  Formula ab = *unbox_formula(n, p.conclusion);
  Formula ac = *unbox_formula(n, q.conclusion);
  return regularize(and_template(ab.lhs(), ab.rhs(), ac.rhs()), n, {p, q});
}

// □ⁿ(S → S)
Proof reflexivity(const Formula& s, int n) { return pad_box(close_assumption(s, leaf(s)), 0, n); }

std::optional<int> quantifier_eigen(const Proof& p) {
  if (p.rule == Rule::ForallInt) {
    auto t = match_instance(p.conclusion.body(), p.conclusion.var(), p.children[0].conclusion);
    if (t && *t && t->kind() == TermKind::Param) return t->index();
    return std::nullopt;
  }
  const Formula& major = p.children[0].conclusion;
  std::set<std::string> ids(p.discharges.begin(), p.discharges.end());
  for (auto& l : leaves_of(p.children[1]))
    if (ids.count(l.id)) {
      auto t = match_instance(major.body(), major.var(), l.formula);
      if (t && *t && t->kind() == TermKind::Param) return t->index();
    }
  return std::nullopt;
}

class Deducer {
public:
  Proof rd(const Proof& t, const std::vector<Formula>& gamma, const Context& ctx, int n) {
    const Formula& phi = t.conclusion;
    Formula s = ctx.formula();
    switch (t.rule) {
      case Rule::TopInt:
      case Rule::EqInt:
      case Rule::IdXm: return pad_box(vacuous_imp_int(s, t), 0, n);
      case Rule::Assumption:
        if (contains(gamma, phi)) return pad_box(vacuous_imp_int(s, t), 0, n);
        if (auto path = ctx.find(phi)) return pad_box(close_assumption(s, project(s, *path)), 0, n);
        throw TransformError("assumption " + to_string(phi) + " is in neither context");

      case Rule::BotElim:
      case Rule::AndElimL:
      case Rule::AndElimR:
      case Rule::OrIntL:
      case Rule::OrIntR:
      case Rule::IntForallInt:
      case Rule::IntExistsElim:
      case Rule::ForallElim:
      case Rule::CD:
      case Rule::ExistsInt: {
        const Formula& alpha = t.children[0].conclusion;
        Proof prem = rd(t.children[0], gamma, ctx, n);
        Proof step = pad_box(close_assumption(alpha, node(t.rule, phi, {leaf(alpha)})), 0, n);
        return chain(prem, step, n);
      }

      case Rule::AndInt:
      case Rule::IntTrans:
      case Rule::IntAndInt:
      case Rule::IntOrElim:
      case Rule::EqElim: {
        const Formula& a = t.children[0].conclusion;
        const Formula& b = t.children[1].conclusion;
        Proof q = pair(rd(t.children[0], gamma, ctx, n), rd(t.children[1], gamma, ctx, n), n);
        Formula ab = conj(a, b);
        Proof rule = node(t.rule, phi, {node(Rule::AndElimL, a, {leaf(ab)}), node(Rule::AndElimR, b, {leaf(ab)})});
        return chain(q, pad_box(close_assumption(ab, rule), 0, n), n);
      }

      case Rule::OrElim: return or_elim(t, gamma, ctx, n);

      case Rule::ImpInt: {
        const Formula& a = phi.lhs();
        const Formula& b = phi.rhs();
        if (ctx.empty()) {
          Proof p = rd(t.children[0], gamma, ctx.extend(a), n);
          return regularize(vacuous_imp_int(top(), leaf(imp(a, b))), n, {p});
        }
        Proof p = rd(t.children[0], gamma, ctx.extend(a), n);
        return regularize(derive_and_release(s, a, b), n, {p});
      }

      case Rule::ImpElim: {
        const Proof& right = t.children[1];
        int m = stratum(right);
        Proof p1 = rd(t.children[0], gamma, ctx, n);
        Proof p2 = m < 0 ? pad_box(right, 0, n) : pad_box(rd(right, gamma, Context{}, m), m + 1, n);
        return chain(p1, p2, n);
      }

      case Rule::ForallInt: return forall_int(t, gamma, ctx, n);
      case Rule::ExistsElim: return exists_elim(t, gamma, ctx, n);

      case Rule::Axiom:
      case Rule::Affixing: break;
    }
    throw TransformError(to_string(t.rule) + " does not belong to natural deduction");
  }

private:
  Proof or_elim(const Proof& t, const std::vector<Formula>& gamma, const Context& ctx, int n) {
    const Formula& major = t.children[0].conclusion;
    const Formula& a = major.lhs();
    const Formula& b = major.rhs();
    const Formula& chi = t.conclusion;
    Proof q1 = rd(t.children[1], gamma, ctx.extend(a), n);
    Proof q2 = rd(t.children[2], gamma, ctx.extend(b), n);
    if (ctx.empty()) {
      Proof q = regularize(or_template(a, b, chi), n, {q1, q2});
      return chain(rd(t.children[0], gamma, ctx, n), q, n);
    }
    Formula s = ctx.conj;
    Proof q = regularize(or_template(conj(s, a), conj(s, b), chi), n, {q1, q2});
    Proof d = pad_box(close_assumption(conj(s, major), derive_distribution(s, a, b)), 0, n);
    Proof e = chain(d, q, n);
    Proof f = pair(reflexivity(s, n), rd(t.children[0], gamma, ctx, n), n);
    return chain(f, e, n);
  }

  // Context members and outer hypotheses still open in `sub`, minus those
  // mentioning `avoid` and the formula `skip`.
  static void restrict(const Proof& sub, const std::vector<Formula>& gamma, const Context& ctx, std::optional<int> avoid,
                       const Formula& skip, std::vector<Formula>& gamma_out, Context& ctx_out) {
    auto open = open_assumptions(sub);
    auto keep = [&](const Formula& f) {
      if (skip && f == skip) return false;
      if (avoid && has_parameter(f, *avoid)) return false;
      return contains(open, f);
    };
    for (auto& g : gamma)
      if (keep(g)) gamma_out.push_back(g);
    std::vector<Formula> members;
    for (auto& [g, path] : ctx.members)
      if (keep(g) && !contains(members, g)) members.push_back(g);
    ctx_out = Context::of(members);
  }

  // ∀v□ⁿθ(v) from a proof of □ⁿθ(a), then □ⁿ∀vθ.
  static Proof generalize(const Proof& p, int eigen, const std::string& v, int n) {
    Formula inst = *unbox_formula(n, p.conclusion);
    Formula body = abstract_parameter(inst, eigen, v);
    Formula boxed = abstract_parameter(p.conclusion, eigen, v);
    Proof g = node(Rule::ForallInt, forall(v, boxed), {p});
    return graft(derive_forall_embedding(n, v, body), {g});
  }

  Proof forall_int(const Proof& t, const std::vector<Formula>& gamma, const Context& ctx, int n) {
    const Formula& phi = t.conclusion;
    const std::string& v = phi.var();
    auto eigen = quantifier_eigen(t);
    std::vector<Formula> gamma2;
    Context ctx2;
    restrict(t.children[0], gamma, ctx, eigen, Formula(), gamma2, ctx2);
    Formula s2 = ctx2.formula();
    Proof p = rd(t.children[0], gamma2, ctx2, n);
    Proof emb;
    if (eigen) {
      emb = generalize(p, *eigen, v, n);
    } else {
      // vacuous instance: the premise already is the body
      Proof g = node(Rule::ForallInt, forall(v, p.conclusion), {p});
      emb = graft(derive_forall_embedding(n, v, imp(s2, phi.body())), {g});
    }
    Proof c = regularize(node(Rule::IntForallInt, imp(s2, phi), {leaf(forall(v, imp(s2, phi.body())))}), n, {emb});
    if (s2 == ctx.formula()) return c;
    return chain(pad_box(rearrange(ctx, ctx2), 0, n), c, n);
  }

  Proof exists_elim(const Proof& t, const std::vector<Formula>& gamma, const Context& ctx, int n) {
    const Formula& major = t.children[0].conclusion;
    const std::string& v = major.var();
    const Formula& chi = t.conclusion;
    auto eigen = quantifier_eigen(t);
    if (!eigen && occurs_free(major.body(), v)) {
      // nothing discharged: any parameter foreign to the whole situation works
      int fresh = 0;
      for (int k : parameters_of(t)) fresh = std::max(fresh, k + 1);
      for (auto& g : gamma)
        for (int k : parameters_of(g)) fresh = std::max(fresh, k + 1);
      for (int k : parameters_of(ctx.formula())) fresh = std::max(fresh, k + 1);
      eigen = fresh;
    }
    Formula inst = major.body();
    if (eigen) inst = substitute(major.body(), v, param(*eigen));
    std::vector<Formula> gamma2;
    Context ctx2;
    restrict(t.children[1], gamma, ctx, eigen, inst, gamma2, ctx2);

    Context minor_ctx = ctx2.extend(inst);
    Proof p = rd(t.children[1], gamma2, minor_ctx, n);
    Formula hyp = ctx2.empty() ? major.body() : conj(ctx2.conj, major.body());
    Proof emb;
    if (eigen) {
      emb = generalize(p, *eigen, v, n);
    } else {
      Proof g = node(Rule::ForallInt, forall(v, p.conclusion), {p});
      emb = graft(derive_forall_embedding(n, v, imp(hyp, chi)), {g});
    }
    Proof c = regularize(node(Rule::IntExistsElim, imp(exists(v, hyp), chi), {leaf(forall(v, imp(hyp, chi)))}), n, {emb});
    Proof maj = rd(t.children[0], gamma, ctx, n);
    if (ctx2.empty()) return chain(maj, c, n);

    Formula s2 = ctx2.conj;
    Proof d = pad_box(close_assumption(conj(s2, major), derive_infinite_distribution(s2, v, major.body())), 0, n);
    Proof e = chain(d, c, n);
    Proof f = pad_box(rearrange(ctx.extend(major), ctx2.extend(major)), 0, n);
    Proof g = chain(f, e, n);
    Proof h = pair(reflexivity(ctx.formula(), n), maj, n);
    return chain(h, g, n);
  }
};

}  // namespace

Proof relative_deduction(const Proof& t, const std::vector<Formula>& gamma, const std::vector<Formula>& sigma, int n) {
  if (n < 0) throw TransformError("box depth must be non-negative");
  if (stratum(t) > n) throw TransformError("stratum exceeds the requested depth");
  Judgment j{gamma, sigma, n, t.conclusion};
  CheckReport report;
  if (!check_judgment(j, t, &report)) {
    std::string why = report.violations.empty() ? "" : ": " + report.violations.front().message;
    throw TransformError("judgment does not hold" + why);
  }
  Deducer d;
  return d.rd(t, gamma, Context::of(sigma), n);
}

ReductionResult reduce(const Proof& t) {
  ReductionResult r;
  r.source_stratum = stratum(t);
  if (r.source_stratum < 0) {
    r.proof = t;
    return r;
  }
  r.n = r.source_stratum + 1;
  r.proof = relative_deduction(t, open_assumptions(t), {}, r.source_stratum);
  return r;
}

Proof unrestricted_or_elim(const Proof& major, const Proof& left, const Proof& right) {
  if (!major.conclusion.is(Op::Or)) throw TransformError("major premise is not a disjunction");
  if (left.conclusion != right.conclusion) throw TransformError("branches prove different formulas");
  auto l = reduce(left), r = reduce(right);
  int n = std::max(l.n, r.n);
  Proof lp = pad_box(l.proof, l.n, n), rp = pad_box(r.proof, r.n, n);
  std::vector<std::string> ids;
  for (auto& x : leaves_of(lp))
    if (x.open && x.formula == major.conclusion.lhs()) ids.push_back(x.id);
  for (auto& x : leaves_of(rp))
    if (x.open && x.formula == major.conclusion.rhs()) ids.push_back(x.id);
  return unbox(node(Rule::OrElim, lp.conclusion, {major, lp, rp}, ids), n);
}

Proof unrestricted_exists_elim(const Proof& major, const Proof& body, std::optional<int> eigen) {
  const Formula& ex = major.conclusion;
  if (!ex.is(Op::Exists)) throw TransformError("major premise is not existential");
  auto open = open_assumptions(body);
  if (!eigen) {
    for (auto& f : open) {
      auto t = match_instance(ex.body(), ex.var(), f);
      if (t && *t && t->kind() == TermKind::Param && !has_parameter(ex, t->index()) &&
          !has_parameter(body.conclusion, t->index())) {
        eigen = t->index();
        break;
      }
    }
  }
  Formula inst = eigen ? substitute(ex.body(), ex.var(), param(*eigen)) : ex.body();
  if (eigen) {
    if (has_parameter(ex, *eigen) || has_parameter(body.conclusion, *eigen))
      throw TransformError("eigenparameter is not fresh");
    for (auto& f : open)
      if (f != inst && has_parameter(f, *eigen)) throw TransformError("eigenparameter occurs in " + to_string(f));
  }
  auto r = reduce(body);
  std::vector<std::string> ids;
  if (eigen || !occurs_free(ex.body(), ex.var()))
    for (auto& x : leaves_of(r.proof))
      if (x.open && x.formula == inst) ids.push_back(x.id);
  return unbox(node(Rule::ExistsElim, r.proof.conclusion, {major, r.proof}, ids), r.n);
}

}  // namespace tjk
