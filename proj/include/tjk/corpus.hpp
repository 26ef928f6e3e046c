#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tjk/kripke.hpp"
#include "tjk/proof.hpp"

namespace tjk {

// Random formula over the atoms p, q, P(c), P(#0) with nesting up to `depth`.
Formula random_formula(std::mt19937_64& rng, int depth);

// Random sentence with quantifiers over P/1. Without `with_or_exists` the
// result avoids disjunction and the existential.
Formula random_sentence(std::mt19937_64& rng, int depth, bool with_or_exists = true);

// A random natural-deduction tree of height at most depth + 1. Most results
// check in the unrestricted system; callers filter with check_proof.
Proof random_nd_proof(std::mt19937_64& rng, int depth);

// `count` distinct-by-seed proofs valid in the unrestricted system.
std::vector<Proof> nd_corpus(int count, int max_depth, std::uint64_t seed);

// Closed axiomatic proofs valid in TJK^{d+} (no modus-ponens-free shortcut:
// every proof applies modus ponens at least once).
std::vector<Proof> axiomatic_theorems(int count, std::uint64_t seed);

// Axiomatic proofs from open hypotheses, mixing in the disjunction and
// existential elimination rules.
std::vector<Proof> axiomatic_derivations(int count, std::uint64_t seed);

// A well-formed model over p, q, P/1, the constant c and parameter #0: random transitive
// frame, persistent relations, no identity.
KripkeModel random_model(std::mt19937_64& rng, int worlds, int domain);

}  // namespace tjk
