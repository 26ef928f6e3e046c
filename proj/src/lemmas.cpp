#include <algorithm>

#include "tjk/transform.hpp"

namespace tjk {

// ---------------------------------------------------------------------------
// Building blocks

Proof vacuous_imp_int(const Formula& a, const Proof& p) { return node(Rule::ImpInt, imp(a, p.conclusion), {p}); }

Proof close_assumption(const Formula& a, const Proof& p) {
  std::vector<std::string> ids;
  for (auto& l : leaves_of(p))
    if (l.open && l.formula == a) ids.push_back(l.id);
  return node(Rule::ImpInt, imp(a, p.conclusion), {p}, ids);
}

Proof pad_box(const Proof& p, int n, int m) {
  if (m < n) throw TransformError("cannot pad to fewer boxes");
  Proof q = p;
  for (int i = n; i < m; ++i) q = vacuous_imp_int(top(), q);
  return q;
}

Proof unbox(const Proof& p, int n) {
  if (!unbox_formula(n, p.conclusion)) throw TransformError("conclusion is not boxed " + std::to_string(n) + " times");
  Proof q = p;
  for (int i = 0; i < n; ++i) q = node(Rule::ImpElim, q.conclusion.rhs(), {node(Rule::TopInt, top(), {}), q});
  return q;
}

Context Context::of(const std::vector<Formula>& fs) {
  Context c;
  if (fs.empty()) return c;
  c.conj = big_conj(fs);
  std::vector<int> path;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    std::vector<int> p = path;
    if (i + 1 < fs.size()) p.push_back(0);
    c.members.push_back({fs[i], p});
    path.push_back(1);
  }
  return c;
}

Context Context::extend(const Formula& f) const {
  Context c;
  if (empty()) {
    c.conj = f;
    c.members.push_back({f, {}});
    return c;
  }
  c.conj = tjk::conj(conj, f);
  for (auto& [g, path] : members) {
    std::vector<int> p{0};
    p.insert(p.end(), path.begin(), path.end());
    c.members.push_back({g, p});
  }
  c.members.push_back({f, {1}});
  return c;
}

const std::vector<int>* Context::find(const Formula& f) const {
  for (auto& [g, path] : members)
    if (g == f) return &path;
  return nullptr;
}

Proof project(const Formula& conj, const std::vector<int>& path) {
  Proof p = leaf(conj);
  for (int bit : path) {
    if (!p.conclusion.is(Op::And)) throw TransformError("projection path leaves the conjunction");
    if (bit == 0) p = node(Rule::AndElimL, p.conclusion.lhs(), {p});
    else p = node(Rule::AndElimR, p.conclusion.rhs(), {p});
  }
  return p;
}

namespace {

// Builds `target` (a conjunction over members of `from`) from projections.
Proof assemble(const Context& from, const Formula& target, const Context& to, const std::vector<int>& prefix) {
  for (auto& [g, path] : to.members)
    if (path == prefix) {
      auto src = from.find(g);
      if (!src) throw TransformError("context member " + to_string(g) + " is missing");
      return project(from.conj, *src);
    }
  if (!target.is(Op::And)) throw TransformError("malformed context");
  auto l = prefix, r = prefix;
  l.push_back(0);
  r.push_back(1);
  return node(Rule::AndInt, target, {assemble(from, target.lhs(), to, l), assemble(from, target.rhs(), to, r)});
}

}  // namespace

Proof rearrange(const Context& from, const Context& to) {
  Formula a = from.formula();
  if (to.empty()) return vacuous_imp_int(a, node(Rule::TopInt, top(), {}));
  if (from.empty()) throw TransformError("cannot rearrange the empty context");
  return close_assumption(a, assemble(from, to.conj, to, {}));
}

// ---------------------------------------------------------------------------
// Lemmas

Proof derive_distribution(const Formula& phi, const Formula& psi, const Formula& chi) {
  Formula hyp = conj(phi, disj(psi, chi));
  Formula goal = disj(conj(phi, psi), conj(phi, chi));
  Proof major = node(Rule::AndElimR, disj(psi, chi), {leaf(hyp)});
  Proof lp = leaf(psi), lc = leaf(chi);
  Proof left = node(Rule::OrIntL, goal, {node(Rule::AndInt, conj(phi, psi), {node(Rule::AndElimL, phi, {leaf(hyp)}), lp})});
  Proof right = node(Rule::OrIntR, goal, {node(Rule::AndInt, conj(phi, chi), {node(Rule::AndElimL, phi, {leaf(hyp)}), lc})});
  return node(Rule::OrElim, goal, {major, left, right}, {lp.id, lc.id});
}

Proof derive_infinite_distribution(const Formula& phi, const std::string& v, const Formula& psi) {
  int eigen = 0;
  for (int k : parameters_of(phi)) eigen = std::max(eigen, k + 1);
  for (int k : parameters_of(psi)) eigen = std::max(eigen, k + 1);
  Formula hyp = conj(phi, exists(v, psi));
  Formula goal = exists(v, conj(phi, psi));
  Formula inst = substitute(psi, v, param(eigen));
  Proof major = node(Rule::AndElimR, exists(v, psi), {leaf(hyp)});
  Proof li = leaf(inst);
  Proof minor = node(Rule::ExistsInt, goal, {node(Rule::AndInt, conj(phi, inst), {node(Rule::AndElimL, phi, {leaf(hyp)}), li})});
  return node(Rule::ExistsElim, goal, {major, minor}, {li.id});
}

Proof derive_and_release(const Formula& phi, const Formula& psi, const Formula& chi) {
  Proof lphi = leaf(phi), lpsi = leaf(psi);
  // discharge by id: φ and ψ may coincide
  Proof inner = node(Rule::ImpInt, imp(psi, conj(phi, psi)), {node(Rule::AndInt, conj(phi, psi), {lphi, lpsi})},
                     {lpsi.id});
  Proof trans = node(Rule::IntTrans, imp(psi, chi), {inner, leaf(imp(conj(phi, psi), chi))});
  return node(Rule::ImpInt, imp(phi, imp(psi, chi)), {trans}, {lphi.id});
}

Proof derive_forall_embedding(int n, const std::string& v, const Formula& phi) {
  if (n < 0) throw TransformError("negative box depth");
  if (n == 0) return leaf(forall(v, phi));
  // ∀v(⊤ → □ⁿ⁻¹φ) gives ⊤ → ∀v□ⁿ⁻¹φ, then the induction hypothesis inside
  Proof first = node(Rule::IntForallInt, imp(top(), forall(v, box(n - 1, phi))), {leaf(forall(v, box(n, phi)))});
  Proof rest = close_assumption(forall(v, box(n - 1, phi)), derive_forall_embedding(n - 1, v, phi));
  return node(Rule::IntTrans, box(n, forall(v, phi)), {first, rest});
}

// ---------------------------------------------------------------------------
// Axiom templates

Proof axiom_template(Schema s, const Formula& f) {
  if (!matches_schema(s, f)) throw TransformError(to_string(f) + " is not an instance of " + to_string(s));
  const Formula& a = f.lhs();
  const Formula& b = f.rhs();
  Proof h = leaf(a);
  auto wrap = [&](const Proof& body) { return close_assumption(a, body); };
  switch (s) {
    case Schema::Identity: return wrap(h);
    case Schema::Top: return vacuous_imp_int(a, node(Rule::TopInt, top(), {}));
    case Schema::Bot: return wrap(node(Rule::BotElim, b, {h}));
    case Schema::AndIntro:
      return wrap(node(Rule::IntAndInt, b, {node(Rule::AndElimL, a.lhs(), {h}), node(Rule::AndElimR, a.rhs(), {leaf(a)})}));
    case Schema::AndElimL: return wrap(node(Rule::AndElimL, b, {h}));
    case Schema::AndElimR: return wrap(node(Rule::AndElimR, b, {h}));
    case Schema::OrIntroL: return wrap(node(Rule::OrIntL, b, {h}));
    case Schema::OrIntroR: return wrap(node(Rule::OrIntR, b, {h}));
    case Schema::OrElim:
      return wrap(node(Rule::IntOrElim, b, {node(Rule::AndElimL, a.lhs(), {h}), node(Rule::AndElimR, a.rhs(), {leaf(a)})}));
    case Schema::Distribution: return wrap(derive_distribution(a.lhs(), a.rhs().lhs(), a.rhs().rhs()));
    case Schema::ForallImp: return wrap(node(Rule::IntForallInt, b, {h}));
    case Schema::ForallElim: return wrap(node(Rule::ForallElim, b, {h}));
    case Schema::ExistsIntro: return wrap(node(Rule::ExistsInt, b, {h}));
    case Schema::ExistsImp: return wrap(node(Rule::IntExistsElim, b, {h}));
    case Schema::CD: return wrap(node(Rule::CD, b, {h}));
    case Schema::InfDistribution: return wrap(derive_infinite_distribution(a.lhs(), a.rhs().var(), a.rhs().body()));
    case Schema::Transitivity:
      return wrap(node(Rule::IntTrans, b, {node(Rule::AndElimL, a.lhs(), {h}), node(Rule::AndElimR, a.rhs(), {leaf(a)})}));
    case Schema::Suffixing: {
      // (A → B) → ((B → C) → (A → C))
      Proof second = leaf(b.lhs());
      Proof body = node(Rule::IntTrans, b.rhs(), {h, second});
      return wrap(node(Rule::ImpInt, b, {body}, {second.id}));
    }
    case Schema::Prefixing: {
      // (A → B) → ((C → A) → (C → B))
      Proof second = leaf(b.lhs());
      Proof body = node(Rule::IntTrans, b.rhs(), {second, h});
      return wrap(node(Rule::ImpInt, b, {body}, {second.id}));
    }
    case Schema::Weakening: return node(Rule::ImpInt, f, {vacuous_imp_int(b.lhs(), h)}, {h.id});
  }
  throw TransformError("no template for " + to_string(s));
}

// ---------------------------------------------------------------------------
// Regularity

Proof regularize(const Proof& inner, int n, const std::vector<Proof>& premises) {
  if (n == 0) return graft(inner, premises);
  std::vector<Formula> boxed;  // □ⁿ⁻¹φ_i, one per distinct premise formula
  std::vector<Proof> prems;
  for (auto& p : premises) {
    auto f = unbox_formula(1, p.conclusion);
    if (!f) throw TransformError("premise " + to_string(p.conclusion) + " is not boxed");
    if (std::find(boxed.begin(), boxed.end(), *f) != boxed.end()) continue;
    boxed.push_back(*f);
    prems.push_back(p);
  }
  for (auto& f : open_assumptions(inner))
    if (std::find(boxed.begin(), boxed.end(), box(n - 1, f)) == boxed.end())
      throw TransformError("no premise for the open assumption " + to_string(f));
  if (prems.empty()) return pad_box(inner, 0, n);

  // ⊤ → ⋀□ⁿ⁻¹φ_i by Internal ∧-Int
  Proof left = prems.back();
  for (std::size_t i = prems.size() - 1; i-- > 0;)
    left = node(Rule::IntAndInt, imp(top(), conj(boxed[i], left.conclusion.rhs())), {prems[i], left});

  Context k = Context::of(boxed);
  std::vector<Proof> projections;
  for (auto& [g, path] : k.members) projections.push_back(project(k.conj, path));
  Proof rec = regularize(inner, n - 1, projections);
  Proof right = close_assumption(k.conj, rec);
  return node(Rule::IntTrans, imp(top(), rec.conclusion), {left, right});
}

Proof regularity_transform(const Proof& p, int n) {
  if (stratum(p) != -1) throw TransformError("regularity needs a proof without modus ponens");
  std::vector<Proof> prems;
  for (auto& f : open_assumptions(p)) prems.push_back(leaf(box(n, f)));
  return regularize(p, n, prems);
}

}  // namespace tjk
