#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tjk/proof.hpp"

namespace tjk {

struct TransformError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small building blocks

// →-Int with antecedent `a` and no discharges.
Proof vacuous_imp_int(const Formula& a, const Proof& p);
// →-Int with antecedent `a`, discharging every open leaf of that formula.
Proof close_assumption(const Formula& a, const Proof& p);

// Adds `extra` vacuous ⊤-antecedents: a proof of □^(n+extra) from □^n.
Proof pad_box(const Proof& p, int n, int m);
// Strips n boxes with ⊤-Int and →-Elim.
Proof unbox(const Proof& p, int n);

// A conjunction of hypotheses together with the ∧-Elim path to each member
// (0 = left, 1 = right). The empty context stands for ⊤.
struct Context {
  Formula conj;
  std::vector<std::pair<Formula, std::vector<int>>> members;

  static Context of(const std::vector<Formula>& fs);
  bool empty() const { return !conj; }
  Formula formula() const { return empty() ? top() : conj; }
  Context extend(const Formula& f) const;
  const std::vector<int>* find(const Formula& f) const;
};

// Proof of the member at `path` from an open leaf of the whole conjunction.
Proof project(const Formula& conj, const std::vector<int>& path);
// Closed proof of from.formula() -> to.formula(); every member of `to` must
// occur in `from`.
Proof rearrange(const Context& from, const Context& to);

// ---------------------------------------------------------------------------
// Derived lemmas, each with its hypothesis as the sole open assumption

// φ ∧ (ψ ∨ χ) ⊢ (φ ∧ ψ) ∨ (φ ∧ χ)
Proof derive_distribution(const Formula& phi, const Formula& psi, const Formula& chi);
// φ ∧ ∃vψ ⊢ ∃v(φ ∧ ψ)
Proof derive_infinite_distribution(const Formula& phi, const std::string& v, const Formula& psi);
// φ ∧ ψ → χ ⊢ φ → (ψ → χ)
Proof derive_and_release(const Formula& phi, const Formula& psi, const Formula& chi);
// ∀v□ⁿφ ⊢ □ⁿ∀vφ
Proof derive_forall_embedding(int n, const std::string& v, const Formula& phi);

// Closed natural-deduction proof of an axiom instance.
Proof axiom_template(Schema s, const Formula& f);

// Given a stratum -1 proof `inner` whose open assumptions are φ_1..φ_m and
// proofs of □ⁿφ_i, builds a proof of □ⁿψ whose open assumptions are those
// of the premises.
Proof regularize(const Proof& inner, int n, const std::vector<Proof>& premises);
// The same with the premises left as open leaves □ⁿφ_i.
Proof regularity_transform(const Proof& p, int n);

// ---------------------------------------------------------------------------
// Reduction

// Proof of □ⁿ(⋀Σ → φ) with no modus ponens and open assumptions within Γ.
Proof relative_deduction(const Proof& t, const std::vector<Formula>& gamma, const std::vector<Formula>& sigma,
                         int n);

struct ReductionResult {
  int n = 0;
  Proof proof;
  int source_stratum = -1;
};

ReductionResult reduce(const Proof& t);

Proof unrestricted_or_elim(const Proof& major, const Proof& left, const Proof& right);
// `eigen` is the parameter instantiating the existential in the body; when
// omitted it is inferred from the open assumptions of `body`.
Proof unrestricted_exists_elim(const Proof& major, const Proof& body, std::optional<int> eigen = std::nullopt);

// ---------------------------------------------------------------------------
// Axiomatic systems

Proof axiomatic_to_nd(const Proof& t);
// Closed axiomatic proof of ⋀Γ → φ from a modus-ponens-free proof of φ whose
// open assumptions lie in Γ.
Proof nd_to_axiomatic(const Proof& t, const std::vector<Formula>& gamma);
Proof nd_to_axiomatic(const Proof& t);

}  // namespace tjk
