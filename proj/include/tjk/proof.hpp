#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tjk/io.hpp"
#include "tjk/syntax.hpp"

namespace tjk {

enum class Rule {
  Assumption,
  TopInt,
  BotElim,
  AndInt,
  AndElimL,
  AndElimR,
  OrIntL,
  OrIntR,
  OrElim,
  ImpInt,
  ImpElim,
  IntTrans,
  IntAndInt,
  IntOrElim,
  IntForallInt,
  IntExistsElim,
  ForallInt,
  ForallElim,
  CD,
  ExistsInt,
  ExistsElim,
  Axiom,
  Affixing,
  EqInt,
  EqElim,
  IdXm,
};

std::string to_string(Rule r);
Rule rule_from_string(const std::string& s);

// Axiom schemas of the Hilbert-style systems.
enum class Schema {
  Identity,
  Top,
  Bot,
  AndIntro,
  AndElimL,
  AndElimR,
  OrIntroL,
  OrIntroR,
  OrElim,
  Distribution,
  ForallImp,
  ForallElim,
  ExistsIntro,
  ExistsImp,
  CD,
  InfDistribution,
  Transitivity,
  Suffixing,
  Prefixing,
  Weakening,
};

std::string to_string(Schema s);
Schema schema_from_string(const std::string& s);
const std::vector<Schema>& all_schemas();
bool matches_schema(Schema s, const Formula& f);

// A derivation node. Leaves are Assumption nodes carrying an id; a node that
// discharges assumptions lists the ids of the leaves it closes.
struct Proof {
  Rule rule = Rule::Assumption;
  Formula conclusion;
  std::vector<Proof> children;
  std::vector<std::string> discharges;
  std::string id;
  std::optional<Schema> schema;

  std::size_t size() const;
  std::size_t height() const;
};

Proof leaf(const Formula& f, const std::string& id = "");
Proof node(Rule r, const Formula& conclusion, std::vector<Proof> children,
           std::vector<std::string> discharges = {});
Proof axiom(Schema s, const Formula& f);

// A process-wide unique leaf id.
std::string fresh_leaf_id();

Proof proof_from_json(const json& j, Signature& sig);
Proof proof_from_json(const json& j);
json proof_to_json(const Proof& p);

// Structural equality after renumbering leaf ids in preorder.
Proof canonical_ids(const Proof& p);
bool same_proof(const Proof& a, const Proof& b);
// Gives every leaf a fresh id, keeping discharge links.
Proof relabel(const Proof& p);

std::set<int> parameters_of(const Proof& p);

struct LeafInfo {
  std::string id;
  Formula formula;
  std::string path;
  bool open;
  bool unsafe;
};

std::vector<LeafInfo> leaves_of(const Proof& p);
std::vector<Formula> open_assumptions(const Proof& p);
std::set<std::string> unsafe_leaves(const Proof& p);

struct AssumptionSplit {
  std::vector<Formula> unsafe_open;
  std::vector<Formula> safe_only_open;
};
AssumptionSplit split_assumptions(const Proof& p);

// -1 when the tree has no modus ponens; otherwise the deepest nesting of
// modus ponens through conditional premises.
int stratum(const Proof& p);

// Renames the eigenparameters of every quantifier rule to fresh indices
// outside `avoid`, each rule getting its own.
Proof rename_eigenvariables(const Proof& p, const std::set<int>& avoid);

// Replaces open leaves by proofs of the same formula. Grafted copies get
// fresh leaf ids.
Proof graft(const Proof& host, const std::vector<Proof>& pieces);

// ---------------------------------------------------------------------------
// Systems and checking

enum class SystemKind { NaturalR, NaturalStratified, Axiomatic };
enum class AxiomLevel { B, DJ, TJ, TJK, TJKPlus };

struct System {
  SystemKind kind = SystemKind::NaturalR;
  int stratum = -1;  // bound for stratified natural deduction
  AxiomLevel level = AxiomLevel::TJK;
  IdentityMode identity = IdentityMode::Absent;

  static System parse(const std::string& s);
  std::string name() const;
  bool allows(Rule r) const;
  bool allows(Schema s) const;
  bool restricts_discharge() const { return kind != SystemKind::Axiomatic; }
};

struct Violation {
  std::string node;
  std::string constraint;
  std::string message;
};

struct CheckReport {
  bool valid = true;
  std::vector<Violation> violations;
  int stratum = -1;
};

json report_to_json(const CheckReport& r);

CheckReport check_proof(const Proof& p, const System& sys);

struct Judgment {
  std::vector<Formula> gamma;
  std::vector<Formula> sigma;
  std::optional<int> stratum;  // nullopt for the unrestricted system
  Formula conclusion;
};

bool check_judgment(const Judgment& j, const Proof& p, CheckReport* report = nullptr);

}  // namespace tjk
