#include <random>

#include <doctest.h>

#include "support.hpp"
#include "tjk/corpus.hpp"

using namespace tjk;
using testing::F;
using testing::oracle_sat;

namespace {

// W = {w, u}, w reflexive, w < u; p holds only at u.
KripkeModel m1() { return model_from_json(read_json_file(testing::data("m1.json"))); }

KripkeModel single_world(bool reflexive) {
  KripkeModel m;
  m.add_world("w");
  if (reflexive) m.add_edge(0, 0);
  return m;
}

}  // namespace

TEST_CASE("term denotation") {
  KripkeModel m = single_world(false);
  m.domain = 3;
  m.consts["c"] = 2;
  m.funs["f"] = FunInterp{1, {0, 1, 2}};
  CHECK(eval_term(m, constant("c")) == 2);
  CHECK(eval_term(m, app("f", {constant("c")})) == 2);
  CHECK(eval_term(m, var("x"), {{"x", 1}}) == 1);
}

TEST_CASE("satisfaction clauses") {
  KripkeModel m = m1();
  for (int w = 0; w < m.size(); ++w) {
    CHECK(satisfies(m, w, top()));
    CHECK_FALSE(satisfies(m, w, bot()));
  }
  int u = m.world("u"), w = m.world("w");
  // u is a dead end: every conditional holds there
  CHECK(satisfies(m, u, F("p -> false")));
  CHECK(satisfies(m, u, F("true -> false")));
  Formula mp = F("(p & (p -> q)) -> q");
  CHECK(oracle_sat(m, w, mp) == false);
  CHECK(satisfies(m, w, mp) == false);
  CHECK_FALSE(entails_in_model(m, {}, mp));
  CHECK(entails_in_model(m, {F("p"), F("p -> q")}, F("q")));
  CHECK(entails_in_model(m, {}, top()));
}

TEST_CASE("persistence checker") {
  KripkeModel m = m1();
  CHECK(check_persistence(m, F("p -> q"), {{}}));
  CHECK(check_persistence(single_world(true), F("true"), {{}}));
  // p at w but not at u, w < u: bypasses the loader's validation
  KripkeModel broken;
  broken.add_world("w");
  broken.add_world("u");
  broken.add_edge(0, 1);
  broken.rels["p"] = RelInterp{0, {bit(0)}};
  CHECK_FALSE(broken.violations().empty());
  CHECK_FALSE(check_persistence(broken, F("p"), {{}}));
}

TEST_CASE("model loader closes edges and rejects broken persistence") {
  json j = json::object();
  j["worlds"] = {"a", "b", "c"};
  j["edges"] = json::array({json::array({"a", "b"}), json::array({"b", "c"})});
  j["domain"] = 1;
  KripkeModel m = model_from_json(j);
  CHECK(m.sees(m.world("a"), m.world("c")));
  // p holds at a and b; closing adds a < c, where p fails
  j["rels"]["p"]["a"] = json::array({json::array()});
  j["rels"]["p"]["b"] = json::array({json::array()});
  CHECK_THROWS_AS(model_from_json(j), InputError);
  KripkeModel back = model_from_json(model_to_json(m1()));
  CHECK(back.succ == m1().succ);
  CHECK(back.rels.at("p").holds == m1().rels.at("p").holds);
}

TEST_CASE("countermodel search") {
  SearchBounds small{2, 1, true};
  SearchResult r = countermodel_search({}, F("(p & (p -> q)) -> q"), small, SearchMode::BqlcdR);
  REQUIRE(r.found);
  CHECK(r.model.size() <= 2);
  CHECK(r.model.reflexive(r.witness));
  CHECK(r.model.violations().empty());
  CHECK_FALSE(oracle_sat(r.model, r.witness, F("(p & (p -> q)) -> q")));

  SearchBounds b{3, 2, true};
  CHECK_FALSE(countermodel_search({}, F("p -> (q -> p)"), b, SearchMode::BqlcdR).found);
  CHECK_FALSE(countermodel_search({F("p"), F("p -> q")}, F("q"), b, SearchMode::BqlcdR).found);
  CHECK_FALSE(countermodel_search({F("p -> q"), F("q -> r")}, F("p -> r"), b, SearchMode::BqlcdR).found);
  CHECK(countermodel_search({}, F("p | (p -> false)"), b, SearchMode::BqlcdR).found);
}

TEST_CASE("identity modes") {
  Formula xm = F("c = d | (c = d -> false)");
  CHECK_FALSE(countermodel_search({}, xm, {2, 2, true}, SearchMode::StrictIdentity).found);
  SearchResult r = countermodel_search({}, xm, {2, 2, true}, SearchMode::CongruenceIdentity);
  REQUIRE(r.found);
  CHECK(r.model.violations().empty());
  CHECK_FALSE(oracle_sat(r.model, r.witness, xm));
}

TEST_CASE("non-reflexive mode refutes modus ponens at a dead end") {
  SearchResult r = countermodel_search({F("p"), F("p -> q")}, F("q"), {1, 1, false}, SearchMode::Bqlcd);
  REQUIRE(r.found);
  CHECK_FALSE(r.model.reflexive(r.witness));
}

TEST_CASE("search result does not depend on the worker count") {
  Formula phi = F("(p -> q) | (q -> p)");
  SearchResult a = countermodel_search({}, phi, {3, 1, true}, SearchMode::BqlcdR, 1);
  SearchResult b = countermodel_search({}, phi, {3, 1, true}, SearchMode::BqlcdR, 4);
  REQUIRE(a.found == b.found);
  if (a.found) CHECK(model_to_json(a.model) == model_to_json(b.model));
}

TEST_CASE("adding a chain below a world") {
  KripkeModel one = single_world(false);
  std::vector<int> added;
  KripkeModel two = add_chain(one, 0, 1, &added);
  CHECK(two.size() == 2);
  CHECK(two.sees(added[0], 0));
  CHECK_FALSE(two.reflexive(added[0]));
  CHECK_THROWS(add_chain(one, 0, 0));

  // w refutes p; u_n refutes the n-fold box of p
  KripkeModel base = single_world(true);
  base.rels["p"] = RelInterp{0, {0}};
  for (int n = 1; n <= 3; ++n) {
    KripkeModel c = add_chain(base, 0, n, &added);
    CHECK_FALSE(oracle_sat(c, added.back(), box(n, F("p"))));
    CHECK_FALSE(satisfies(c, added.back(), box(n, F("p"))));
  }

  // below a dead end: u_n satisfies box^(n+1) false but not box^n false
  KripkeModel dead = single_world(false);
  KripkeModel c = add_chain(dead, 0, 4, &added);
  for (int n = 1; n <= 4; ++n) {
    int un = added[n - 1];
    CHECK(satisfies(c, un, box(n + 1, bot())));
    CHECK_FALSE(satisfies(c, un, box(n, bot())));
  }
}

TEST_CASE("intersection configurations") {
  // w irreflexive sees a single reflexive u with the same atoms
  KripkeModel m;
  m.add_world("w");
  m.add_world("u");
  m.add_edge(0, 1);
  m.add_edge(1, 1);
  m.rels["p"] = RelInterp{0, {bit(0) | bit(1)}};
  m.rels["q"] = RelInterp{0, {0}};
  for (auto s : {"p", "q", "p -> q", "q -> p", "(p -> q) -> q", "true -> false"})
    CHECK(check_intersection_config(m, 0, {1}, F(s)));
  CHECK_THROWS_AS(check_intersection_config(m, 0, {1}, F("p | q")), IntersectionError);

  // two reflexive worlds and their intersection below
  KripkeModel two;
  for (auto id : {"w", "a", "b"}) two.add_world(id);
  two.add_edge(0, 1);
  two.add_edge(0, 2);
  two.add_edge(1, 1);
  two.add_edge(2, 2);
  two.rels["p"] = RelInterp{0, {bit(1)}};
  two.rels["q"] = RelInterp{0, {bit(0) | bit(1) | bit(2)}};
  for (auto s : {"p", "q", "p -> q", "q -> p", "(q -> p) -> p"})
    CHECK(check_intersection_config(two, 0, {1, 2}, F(s)));

  // an irreflexive family member violates condition (ii)
  KripkeModel bad = m;
  bad.succ[1] = 0;
  try {
    check_intersection_config(bad, 0, {1}, F("p"));
    FAIL("expected a precondition error");
  } catch (const IntersectionError& e) {
    CHECK(e.condition == 2);
  }
}

TEST_CASE("property: evaluators agree and persistence holds") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 150; ++i) {
    KripkeModel m = random_model(rng, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 3));
    REQUIRE(m.violations().empty());
    for (int k = 0; k < 12; ++k) {
      Formula f = random_sentence(rng, 5);
      WorldSet t = truth_set(m, f);
      for (int w = 0; w < m.size(); ++w) {
        bool o = oracle_sat(m, w, f);
        CHECK(satisfies(m, w, f) == o);
        CHECK(((t >> w) & 1) == o);
        for (int u = 0; u < m.size(); ++u)
          if (m.sees(w, u) && o) CHECK(oracle_sat(m, u, f));
      }
      CHECK(check_persistence(m, f, {{}}));
    }
  }
}

TEST_CASE("property: modus ponens at reflexive worlds") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    KripkeModel m = random_model(rng, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 2));
    Formula a = random_sentence(rng, 3), b = random_sentence(rng, 3);
    for (int w = 0; w < m.size(); ++w)
      if (m.reflexive(w) && satisfies(m, w, a) && satisfies(m, w, imp(a, b))) CHECK(satisfies(m, w, b));
  }
}

TEST_CASE("property: strict identity validates excluded middle for identity") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    KripkeModel m = random_model(rng, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 3));
    m.identity = IdentityMode::Strict;
    m.consts["d"] = static_cast<int>(rng() % m.domain);
    Formula xm = F("c = d | (c = d -> false)");
    for (int w = 0; w < m.size(); ++w) CHECK(satisfies(m, w, xm));
    CHECK(satisfies(m, 0, F("forall x. forall y. (x = y | (x = y -> false))")));
  }
}

TEST_CASE("property: adding a chain leaves the original worlds alone") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 60; ++i) {
    KripkeModel m = random_model(rng, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2));
    KripkeModel c = add_chain(m, static_cast<int>(rng() % m.size()), 1 + static_cast<int>(rng() % 3));
    CHECK(c.violations().empty());
    for (int k = 0; k < 8; ++k) {
      Formula f = random_sentence(rng, 4);
      for (int w = 0; w < m.size(); ++w) CHECK(satisfies(c, w, f) == satisfies(m, w, f));
    }
  }
}

TEST_CASE("property: search witnesses always refute the sequent") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 40; ++i) {
    Formula g = random_formula(rng, 2), phi = random_formula(rng, 2);
    if (!parameters_of(g).empty() || !parameters_of(phi).empty()) continue;
    SearchResult r = countermodel_search({g}, phi, {2, 1, true}, SearchMode::BqlcdR);
    if (!r.found) continue;
    CHECK(r.model.violations().empty());
    CHECK(r.model.reflexive(r.witness));
    CHECK(oracle_sat(r.model, r.witness, g));
    CHECK_FALSE(oracle_sat(r.model, r.witness, phi));
  }
}
