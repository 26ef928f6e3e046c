#include <random>

#include "tjk/brady.hpp"
#include "tjk/corpus.hpp"
#include "tjk/selftest.hpp"
#include "tjk/transform.hpp"

namespace tjk {

namespace {

struct Suite {
  std::string name;
  int cases = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++cases;
    if (!ok && failures.size() < 10) failures.push_back(what);
  }
  json to_json() const { return {{"name", name}, {"cases", cases}, {"failures", failures}, {"passed", failures.empty()}}; }
};

Suite round_trip(std::mt19937_64& rng) {
  Suite s;
  s.name = "parse-print round trip";
  for (int i = 0; i < 200; ++i) {
    Formula f = random_sentence(rng, 6);
    std::string text = to_string(f);
    bool ok = false;
    try {
      ok = parse_formula(text) == f;
    } catch (const SyntaxError&) {
    }
    s.expect(ok, text);
  }
  return s;
}

Suite persistence(std::mt19937_64& rng) {
  Suite s;
  s.name = "persistence and modus ponens";
  for (int i = 0; i < 40; ++i) {
    KripkeModel m = random_model(rng, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 3));
    for (int k = 0; k < 10; ++k) {
      Formula a = random_sentence(rng, 4), b = random_sentence(rng, 4);
      s.expect(check_persistence(m, a, {{}}), "persistence of " + to_string(a));
      WorldSet ta = truth_set(m, a), tab = truth_set(m, imp(a, b)), tb = truth_set(m, b);
      bool mp = true;
      for (int w = 0; w < m.size(); ++w)
        if (m.reflexive(w) && (ta & tab & bit(w)) && !(tb & bit(w))) mp = false;
      s.expect(mp, "modus ponens for " + to_string(a) + " / " + to_string(b));
    }
  }
  return s;
}

Suite checking(std::uint64_t seed) {
  Suite s;
  s.name = "checker determinism";
  System sys = System::parse("nbqlcd_r");
  for (auto& p : nd_corpus(30, 5, seed)) {
    CheckReport a = check_proof(p, sys);
    CheckReport b = check_proof(proof_from_json(proof_to_json(p)), sys);
    s.expect(a.valid && report_to_json(a) == report_to_json(b), proof_to_json(p).dump());
    int st = stratum(p);
    if (st >= 0) {
      System tight = System::parse("nbqlcd[" + std::to_string(st - 1) + "]");
      s.expect(!check_proof(p, tight).valid, "stratum not minimal");
    }
  }
  return s;
}

Suite reduction(std::uint64_t seed) {
  Suite s;
  s.name = "reduction";
  System target = System::parse("nbqlcd");
  System full = System::parse("nbqlcd_r");
  for (auto& p : nd_corpus(30, 5, seed + 1)) {
    try {
      ReductionResult r = reduce(p);
      int st = stratum(p);
      bool ok = check_proof(r.proof, target).valid && r.n == (st >= 0 ? st + 1 : 0) &&
                r.proof.conclusion == box(r.n, p.conclusion);
      Proof back = unbox(r.proof, r.n);
      ok = ok && back.conclusion == p.conclusion && check_proof(back, full).valid;
      s.expect(ok, proof_to_json(p).dump());
    } catch (const std::exception& e) {
      s.expect(false, e.what());
    }
  }
  return s;
}

Suite brady(std::uint64_t seed) {
  Suite s;
  s.name = "brady construction";
  json uj = {{"sentences", {"true", "false", "T(c) -> false", "T(c)"}}, {"consts", {{"c", "T(c) -> false"}}}};
  BradyRun run = run_brady(universe_from_json(uj), 8, seed);
  s.expect(run.state.checks.failures.empty(), "chain lemmas");
  s.expect(run.convergence.stable, "convergence");
  s.expect(run.loop && run.loop->ok(), "loop verification");
  return s;
}

}  // namespace

json run_selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Suite> suites{round_trip(rng), persistence(rng), checking(seed), reduction(seed), brady(seed)};
  json out = {{"seed", seed}, {"suites", json::array()}};
  bool passed = true;
  for (auto& s : suites) {
    out["suites"].push_back(s.to_json());
    passed = passed && s.failures.empty();
  }
  out["passed"] = passed;
  return out;
}

}  // namespace tjk
