#include <chrono>
#include <functional>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "tjk/corpus.hpp"

using namespace tjk;
using testing::F;
using testing::load_proof;
using testing::oracle_sat;

namespace {

const System kFull = System::parse("nbqlcd_r");
const System kBase = System::parse("nbqlcd");

// Leaves lying in the conditional premise of some modus ponens above them.
std::set<std::string> oracle_unsafe(const Proof& p, bool under_major = false) {
  std::set<std::string> out;
  if (p.rule == Rule::Assumption) {
    if (under_major) out.insert(p.id);
    return out;
  }
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    bool major = under_major || (p.rule == Rule::ImpElim && i == 1);
    auto sub = oracle_unsafe(p.children[i], major);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

int oracle_stratum(const Proof& p) {
  int s = -1;
  for (auto& c : p.children) s = std::max(s, oracle_stratum(c));
  if (p.rule == Rule::ImpElim) s = std::max(s, oracle_stratum(p.children[1]) + 1);
  return s;
}

bool has_violation(const CheckReport& r, const std::string& constraint) {
  for (auto& v : r.violations)
    if (v.constraint == constraint) return true;
  return false;
}

// ∀x(P(x) -> P(x)) by ∀-Int over the eigenparameter k.
Proof forall_identity(int k) {
  Formula pk = atom("P", {param(k)});
  Proof l = leaf(pk, fresh_leaf_id());
  Proof body = node(Rule::ImpInt, imp(pk, pk), {l}, {l.id});
  return node(Rule::ForallInt, F("forall x. (P(x) -> P(x))"), {body});
}

std::set<int> eigen_parameters(const Proof& p) {
  std::set<int> out;
  std::function<void(const Proof&)> walk = [&](const Proof& q) {
    if (q.rule == Rule::ForallInt) {
      auto t = match_instance(q.conclusion.body(), q.conclusion.var(), q.children[0].conclusion);
      if (t && *t && t->kind() == TermKind::Param) out.insert(t->index());
    }
    for (auto& c : q.children) walk(c);
  };
  walk(p);
  return out;
}

}  // namespace

TEST_CASE("Curry derivation is rejected at the discharge of the starred assumption") {
  auto start = std::chrono::steady_clock::now();
  Proof curry = load_proof("curry.json");
  CheckReport r = check_proof(curry, kFull);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK_FALSE(r.valid);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].constraint == "C5");
  CHECK(r.violations[0].node == "/0/0");
  CHECK(secs < 1.0);
  // without the restriction the same tree is a valid axiomatic-style derivation shape
  CHECK(oracle_unsafe(curry).count("b"));
  CHECK_FALSE(oracle_unsafe(curry).count("a"));
}

TEST_CASE("top introduction is valid everywhere") {
  Proof t = load_proof("top.json");
  for (auto s : {"nbqlcd_r", "nbqlcd", "nbqlcd[0]", "nbqlcd[3]", "bd+", "djd+", "tjd+", "tjkd+", "tjk+", "nbqlcd_r+eq",
                 "tjkd+eqxm"})
    CHECK(check_proof(t, System::parse(s)).valid);
}

TEST_CASE("identity by conditional proof is valid without modus ponens") {
  Proof t = load_proof("identity.json");
  CHECK(check_proof(t, kBase).valid);
  CHECK(unsafe_leaves(t).empty());
}

TEST_CASE("unsafe occurrences in the two displayed examples") {
  Proof one = load_proof("unsafe1.json");
  Proof two = load_proof("unsafe2.json");
  CHECK(unsafe_leaves(one) == std::set<std::string>{"target"});
  CHECK(unsafe_leaves(two) == std::set<std::string>{"target", "suffix"});
  CHECK(unsafe_leaves(one) == oracle_unsafe(one));
  CHECK(unsafe_leaves(two) == oracle_unsafe(two));
  CHECK(unsafe_leaves(load_proof("identity.json")).empty());
}

TEST_CASE("splitting open assumptions") {
  AssumptionSplit mp = split_assumptions(load_proof("mp.json"));
  CHECK(mp.unsafe_open == std::vector<Formula>{F("p -> q")});
  CHECK(mp.safe_only_open == std::vector<Formula>{F("p")});
  AssumptionSplit curry = split_assumptions(load_proof("curry.json"));
  std::set<Formula> unsafe(curry.unsafe_open.begin(), curry.unsafe_open.end());
  CHECK(unsafe.count(F("T(c) -> (T(c) -> false)")));
  CHECK(unsafe.count(F("(T(c) -> false) -> T(c)")));
  CHECK(unsafe.count(F("T(c) -> false")));
  AssumptionSplit closed = split_assumptions(load_proof("identity.json"));
  CHECK(closed.unsafe_open.empty());
  CHECK(closed.safe_only_open.empty());
}

TEST_CASE("stratum of the displayed nested proof") {
  CHECK(stratum(load_proof("top.json")) == -1);
  CHECK(stratum(load_proof("mp.json")) == 0);
  Proof nested = load_proof("stratum.json");
  CHECK(stratum(nested) == 1);
  CHECK(oracle_stratum(nested) == 1);
  CHECK_FALSE(check_proof(nested, System::parse("nbqlcd[0]")).valid);
  CHECK(has_violation(check_proof(nested, System::parse("nbqlcd[0]")), "stratum"));
  for (int n = 1; n <= 4; ++n) CHECK(check_proof(nested, System::parse("nbqlcd[" + std::to_string(n) + "]")).valid);
  CHECK_FALSE(check_proof(load_proof("mp.json"), kBase).valid);
}

TEST_CASE("eigenvariable constraints") {
  // C2: the eigenparameter occurs in an open assumption
  Proof open = node(Rule::ForallInt, F("forall x. P(x)"), {leaf(F("P(#0)"), "h")});
  CHECK(has_violation(check_proof(open, kFull), "C2"));
  CHECK(check_proof(forall_identity(0), kFull).valid);

  // C4: both occurrences of P(#0) must be discharged
  auto body = [](std::vector<std::string> ds) {
    Proof pair = node(Rule::AndInt, F("P(#0) & P(#0)"), {leaf(F("P(#0)"), "a"), leaf(F("P(#0)"), "b")});
    Proof all = node(Rule::AndInt, F("(P(#0) & P(#0)) & q"), {pair, leaf(F("q"), "qq")});
    Proof q = node(Rule::AndElimR, F("q"), {all});
    return node(Rule::ExistsElim, F("q"), {leaf(F("exists x. P(x)"), "m"), q}, ds);
  };
  CHECK(check_proof(body({"a", "b"}), kFull).valid);
  CHECK(has_violation(check_proof(body({"a"}), kFull), "C4"));

  // C3: the eigenparameter may not occur in the conclusion
  Proof l = leaf(F("P(#0)"), "a");
  Proof bad = node(Rule::ExistsElim, F("P(#0)"), {leaf(F("exists x. P(x)"), "m"), l}, {"a"});
  CHECK(has_violation(check_proof(bad, kFull), "C3"));
}

TEST_CASE("malformed discharge links are reported") {
  Proof p = node(Rule::ImpInt, F("p -> p"), {leaf(F("p"), "h")}, {"nope"});
  CHECK(has_violation(check_proof(p, kFull), "discharge"));
  Proof wrong = node(Rule::ImpInt, F("q -> p"), {leaf(F("p"), "h")}, {"h"});
  CHECK(has_violation(check_proof(wrong, kFull), "discharge"));
}

TEST_CASE("judgments") {
  Proof mp = load_proof("mp.json");
  CHECK(check_judgment({{F("p -> q")}, {F("p")}, 0, F("q")}, mp));
  CHECK_FALSE(check_judgment({{}, {F("p"), F("p -> q")}, 0, F("q")}, mp));
  CHECK_FALSE(check_judgment({{F("p -> q")}, {F("p")}, -1, F("q")}, mp));
  CHECK(check_judgment({{F("p"), F("p -> q")}, {}, std::nullopt, F("q")}, mp));
  CHECK_FALSE(check_judgment({{F("p"), F("p -> q")}, {}, std::nullopt, F("p")}, mp));
}

TEST_CASE("renaming eigenvariables") {
  Proof p = forall_identity(0);
  Proof r = rename_eigenvariables(p, {0});
  CHECK(check_proof(r, kFull).valid);
  CHECK(r.conclusion == p.conclusion);
  CHECK_FALSE(eigen_parameters(r).count(0));
  Proof same = rename_eigenvariables(p, {});
  CHECK(check_proof(same, kFull).valid);
  CHECK(same.conclusion == p.conclusion);
}

TEST_CASE("grafting proofs that share eigenparameters") {
  Formula theorem = F("forall x. (P(x) -> P(x))");
  Proof host = node(Rule::AndInt, conj(theorem, theorem), {forall_identity(0), leaf(theorem, "slot")});
  Proof g = graft(host, {forall_identity(0)});
  CHECK(check_proof(g, kFull).valid);
  CHECK(open_assumptions(g).empty());

  // the piece's open assumption mentions #0, so the host's eigenparameter must move
  Formula body = F("(P(#0) -> P(#0)) & q");
  Proof hl = leaf(F("P(#0)"), "h");
  Proof inner = node(Rule::AndInt, body, {node(Rule::ImpInt, F("P(#0) -> P(#0)"), {hl}, {"h"}), leaf(F("q"), "slot")});
  Proof host2 = node(Rule::ForallInt, F("forall x. ((P(x) -> P(x)) & q)"), {inner});
  REQUIRE(check_proof(host2, kFull).valid);
  Proof piece = node(Rule::AndElimR, F("q"), {leaf(F("P(#0) & q"), "src")});
  Proof g2 = graft(host2, {piece});
  CHECK(check_proof(g2, kFull).valid);
  CHECK(open_assumptions(g2) == std::vector<Formula>{F("P(#0) & q")});
}

TEST_CASE("axiomatic systems admit exactly their schemas") {
  std::vector<std::pair<Schema, std::string>> instances = {
      {Schema::Identity, "p -> p"},
      {Schema::Top, "p -> true"},
      {Schema::Bot, "false -> p"},
      {Schema::AndIntro, "(p -> q) & (p -> r) -> (p -> q & r)"},
      {Schema::AndElimL, "p & q -> p"},
      {Schema::AndElimR, "p & q -> q"},
      {Schema::OrIntroL, "p -> p | q"},
      {Schema::OrIntroR, "q -> p | q"},
      {Schema::OrElim, "(p -> r) & (q -> r) -> (p | q -> r)"},
      {Schema::Distribution, "p & (q | r) -> p & q | p & r"},
      {Schema::ForallImp, "forall x. (p -> P(x)) -> (p -> forall x. P(x))"},
      {Schema::ForallElim, "forall x. P(x) -> P(c)"},
      {Schema::ExistsIntro, "P(c) -> exists x. P(x)"},
      {Schema::ExistsImp, "forall x. (P(x) -> p) -> (exists x. P(x) -> p)"},
      {Schema::CD, "forall x. (p | P(x)) -> p | forall x. P(x)"},
      {Schema::InfDistribution, "p & exists x. P(x) -> exists x. (p & P(x))"},
      {Schema::Transitivity, "(p -> q) & (q -> r) -> (p -> r)"},
      {Schema::Suffixing, "(p -> q) -> ((q -> r) -> (p -> r))"},
      {Schema::Prefixing, "(p -> q) -> ((r -> p) -> (r -> q))"},
      {Schema::Weakening, "p -> (q -> p)"},
  };
  REQUIRE(instances.size() == all_schemas().size());
  auto min_level = [](Schema s) {
    switch (s) {
      case Schema::Transitivity: return AxiomLevel::DJ;
      case Schema::Suffixing:
      case Schema::Prefixing: return AxiomLevel::TJ;
      case Schema::Weakening: return AxiomLevel::TJK;
      default: return AxiomLevel::B;
    }
  };
  const std::vector<std::pair<std::string, AxiomLevel>> systems = {
      {"bd+", AxiomLevel::B}, {"djd+", AxiomLevel::DJ}, {"tjd+", AxiomLevel::TJ}, {"tjkd+", AxiomLevel::TJK},
      {"tjk+", AxiomLevel::TJKPlus}};
  for (auto& [schema, text] : instances) {
    Formula f = F(text);
    CAPTURE(text);
    CHECK(matches_schema(schema, f));
    for (auto& [name, level] : systems) {
      bool expected = static_cast<int>(level) >= static_cast<int>(min_level(schema));
      CHECK(check_proof(axiom(schema, f), System::parse(name)).valid == expected);
    }
  }
  CHECK_FALSE(matches_schema(Schema::Weakening, F("p -> (q -> q)")));
  CHECK_FALSE(check_proof(axiom(Schema::Identity, F("p -> q")), System::parse("tjkd+")).valid);
}

TEST_CASE("axiomatic systems reject natural-deduction discharge rules") {
  CHECK_FALSE(check_proof(load_proof("identity.json"), System::parse("tjkd+")).valid);
  CHECK(check_proof(load_proof("mp.json"), System::parse("bd+")).valid);
}

TEST_CASE("property: corpus proofs obey the structural invariants") {
  auto corpus = nd_corpus(150, 6, 21);
  for (auto& p : corpus) {
    CAPTURE(proof_to_json(p).dump());
    CheckReport r = check_proof(p, kFull);
    REQUIRE(r.valid);
    CHECK(unsafe_leaves(p) == oracle_unsafe(p));
    int s = stratum(p);
    CHECK(s == oracle_stratum(p));
    CHECK(r.stratum == s);
    CHECK(check_proof(p, System::parse("nbqlcd[" + std::to_string(s) + "]")).valid);
    if (s >= 0) CHECK_FALSE(check_proof(p, System::parse("nbqlcd[" + std::to_string(s - 1) + "]")).valid);
    if (check_proof(p, kBase).valid) CHECK(unsafe_leaves(p).empty());
    Proof again = proof_from_json(json::parse(proof_to_json(p).dump()));
    CHECK(report_to_json(check_proof(again, kFull)) == report_to_json(r));
    CHECK(same_proof(again, p));
  }
}

TEST_CASE("property: checked proofs are sound for reflexive-root consequence") {
  auto corpus = nd_corpus(120, 5, 22);
  std::mt19937_64 rng(23);
  std::vector<KripkeModel> battery;
  for (int i = 0; i < 60; ++i)
    battery.push_back(random_model(rng, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2)));
  for (auto& p : corpus) {
    AssumptionSplit split = split_assumptions(p);
    for (auto& m : battery)
      for (int w = 0; w < m.size(); ++w) {
        if (!m.reflexive(w)) continue;
        bool gamma = std::all_of(split.unsafe_open.begin(), split.unsafe_open.end(),
                                 [&](const Formula& g) { return oracle_sat(m, w, g); });
        if (!gamma) continue;
        for (int u = 0; u < m.size(); ++u) {
          if (!m.sees(w, u)) continue;
          bool sigma = std::all_of(split.safe_only_open.begin(), split.safe_only_open.end(),
                                   [&](const Formula& s) { return oracle_sat(m, u, s); });
          if (sigma) CHECK(oracle_sat(m, u, p.conclusion));
        }
      }
  }
}

TEST_CASE("identity rules follow the identity mode") {
  Proof refl = node(Rule::EqInt, F("c = c"), {});
  CHECK_FALSE(check_proof(refl, kFull).valid);
  CHECK(check_proof(refl, System::parse("nbqlcd_r+eq")).valid);
  CHECK_FALSE(check_proof(node(Rule::EqInt, F("c = d"), {}), System::parse("nbqlcd_r+eq")).valid);

  Proof subst = node(Rule::EqElim, F("P(d, c)"), {leaf(F("c = d"), "e"), leaf(F("P(c, c)"), "h")});
  CHECK(check_proof(subst, System::parse("nbqlcd_r+eq")).valid);
  Proof wrong = node(Rule::EqElim, F("P(c, c)"), {leaf(F("c = d"), "e"), leaf(F("P(d, d)"), "h")});
  CHECK_FALSE(check_proof(wrong, System::parse("nbqlcd_r+eq")).valid);

  Proof xm = node(Rule::IdXm, F("c = d | (c = d -> false)"), {});
  CHECK_FALSE(check_proof(xm, System::parse("nbqlcd_r+eq")).valid);
  CHECK(check_proof(xm, System::parse("nbqlcd_r+eqxm")).valid);
  CHECK(check_proof(xm, System::parse("tjkd+eqxm")).valid);
}
