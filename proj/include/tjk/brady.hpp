#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tjk/io.hpp"
#include "tjk/kripke.hpp"

namespace tjk {

struct BradyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A finite, subformula-closed set of sentences with an injective coding into
// the domain. The truth predicate is the unary relation `T`; every other
// symbol is interpreted classically, identically at every world.
struct Universe {
  std::vector<Formula> sentences;
  std::vector<int> codes;  // codes[i] is the code of sentences[i]
  KripkeModel base;        // domain, constants and T-free relations; no worlds

  int size() const { return static_cast<int>(sentences.size()); }
  int index_of(const Formula& f) const;  // -1 when absent
  std::optional<int> sentence_with_code(int code) const;
};

// Format: {"sentences": [...], "codes": {"<formula>": int}, "domain": n,
//          "consts": {"c": int or "<formula>"}, "rels": {"R": [[...], ...]}}
// Constants q<k> denote code k without being declared.
Universe universe_from_json(const json& j);

using CodeSet = std::set<int>;

struct JumpTrace {
  int world = 0;
  std::vector<CodeSet> stages;  // X(0) = ∅, X(1), ..., up to the first repeat
  int fixed_point_stage = 0;
};

struct BradyChecks {
  bool monotone = true;
  bool locally_increasing = true;
  bool fixed_point_bound = true;
  bool globally_decreasing = true;
  bool stagewise_decreasing = true;
  bool closure = true;
  std::vector<std::string> failures;
};

struct ChainState {
  Universe universe;
  int depth = 0;               // index of the current bottom world
  std::vector<CodeSet> t_ext;  // extension of T at each world
  std::vector<JumpTrace> traces;
  bool loop_added = false;
  BradyChecks checks;
  std::uint64_t seed = 0;
};

// Chain with only the dead-end world w_0 installed.
ChainState start_chain(const Universe& u, std::uint64_t seed = 0);

// The chain-so-far as a Kripke model: worlds w_0..w_depth, w_j sees every
// w_i with i < j, T read from t_ext. `hypothesis` replaces the extension at
// world `alpha` when given.
KripkeModel chain_model(const ChainState& s, int worlds, std::optional<std::pair<int, CodeSet>> hypothesis = {});

// Codes of universe sentences true at w_alpha when T there is X.
CodeSet phi_operator(const ChainState& s, int alpha, const CodeSet& x);
JumpTrace jump_to_fixpoint(const ChainState& s, int alpha);
// Installs a new bottom world with its fixed point and re-checks the
// structural lemmas.
void extend_chain(ChainState& s);

// Truth values of the universe sentences at world w.
std::vector<bool> satisfaction_record(const ChainState& s, int w);

struct Convergence {
  int theta = -1;
  bool stable = false;
};

// Extends the chain up to depth `budget` looking for S(α) = S(α+1).
Convergence detect_convergence(ChainState& s, int budget);

struct LoopReport {
  bool values_unchanged = true;
  bool closure = true;
  bool tarski = true;
  bool modus_ponens = true;
  std::vector<std::string> failures;
  bool ok() const { return values_unchanged && closure && tarski && modus_ponens; }
};

// Cuts the chain back to w_theta, makes it reflexive and verifies the loop.
LoopReport add_loop_and_verify(ChainState& s, const Convergence& c);

struct BradyRun {
  ChainState state;
  Convergence convergence;
  std::optional<LoopReport> loop;
  json report;
};

BradyRun run_brady(const Universe& u, int budget, std::uint64_t seed = 0);

}  // namespace tjk
