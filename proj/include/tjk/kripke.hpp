#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tjk/syntax.hpp"

namespace tjk {

// Sets of worlds as bitmasks; models are capped at 64 worlds.
using WorldSet = std::uint64_t;
constexpr int kMaxWorlds = 64;

inline WorldSet bit(int w) { return WorldSet(1) << w; }

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RelInterp {
  int arity = 0;
  // holds[i]: worlds at which the i-th tuple (row-major over the domain) is in
  // the relation
  std::vector<WorldSet> holds;
};

struct FunInterp {
  int arity = 1;
  std::vector<int> table;
};

struct KripkeModel {
  std::vector<std::string> world_ids;
  std::vector<WorldSet> succ;  // bit u of succ[w] set iff w < u
  int domain = 1;
  std::map<std::string, int> consts;  // parameters are keyed "#i"
  std::map<std::string, FunInterp> funs;
  std::map<std::string, RelInterp> rels;
  IdentityMode identity = IdentityMode::Absent;

  int size() const { return static_cast<int>(succ.size()); }
  WorldSet all() const { return size() == 64 ? ~WorldSet(0) : bit(size()) - 1; }
  bool sees(int w, int u) const { return succ[w] & bit(u); }
  bool reflexive(int w) const { return sees(w, w); }
  int world(const std::string& id) const;

  int add_world(const std::string& id);
  void add_edge(int w, int u) { succ[w] |= bit(u); }
  void close_transitively();
  std::size_t tuple_count(int arity) const;

  // Transitivity, persistence and the identity-mode constraints.
  void validate() const;
  std::vector<std::string> violations() const;
};

using Assignment = std::map<std::string, int>;

int eval_term(const KripkeModel& m, const Term& t, const Assignment& asg = {});

// Direct transcription of the satisfaction clauses.
bool satisfies(const KripkeModel& m, int w, const Formula& f, const Assignment& asg = {});

// The set of worlds satisfying `f`, computed bottom-up over masks.
WorldSet truth_set(const KripkeModel& m, const Formula& f, const Assignment& asg = {});

// Consequence over reflexive worlds only.
bool entails_in_model(const KripkeModel& m, const std::vector<Formula>& gamma, const Formula& phi);
std::optional<int> refuting_world(const KripkeModel& m, const std::vector<Formula>& gamma,
                                  const Formula& phi, bool reflexive_only);

bool check_persistence(const KripkeModel& m, const Formula& f, const std::vector<Assignment>& sample);

// Adds u_n < ... < u_1 < w. New worlds are irreflexive with empty relations.
// Returns the indices u_1..u_n through `added` when given.
KripkeModel add_chain(const KripkeModel& m, int w, int n, std::vector<int>* added = nullptr);

struct IntersectionError : std::runtime_error {
  int condition;  // 1..4, or 0 for a formula outside the fragment
  IntersectionError(int c, const std::string& msg) : std::runtime_error(msg), condition(c) {}
};

bool check_intersection_config(const KripkeModel& m, int w, const std::vector<int>& us, const Formula& f);

// ---------------------------------------------------------------------------
// Bounded countermodel search

enum class SearchMode { BqlcdR, Bqlcd, StrictIdentity, CongruenceIdentity };

std::string to_string(SearchMode m);
SearchMode search_mode_from_string(const std::string& s);

struct SearchBounds {
  int max_worlds = 3;
  int max_domain = 2;
  bool require_reflexive_root = true;
};

struct SearchResult {
  bool found = false;
  KripkeModel model;
  int witness = -1;
  long long candidates = 0;
  std::vector<std::string> notes;
};

SearchResult countermodel_search(const std::vector<Formula>& gamma, const Formula& phi,
                                 SearchBounds bounds, SearchMode mode, int jobs = 1);

}  // namespace tjk
