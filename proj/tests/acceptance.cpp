// Acceptance battery: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "tjk/brady.hpp"
#include "tjk/corpus.hpp"
#include "tjk/transform.hpp"

using namespace tjk;
using testing::F;
using testing::load_proof;

namespace {

const System kFull = System::parse("nbqlcd_r");
const System kBase = System::parse("nbqlcd");

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

bool valid(const Proof& p, const System& s) { return check_proof(p, s).valid; }

bool subset(const std::vector<Formula>& a, const std::vector<Formula>& b) {
  std::set<Formula> sb(b.begin(), b.end());
  return std::all_of(a.begin(), a.end(), [&](const Formula& f) { return sb.count(f) > 0; });
}

std::vector<Proof> reduction_corpus() {
  static const std::vector<Proof> corpus = nd_corpus(250, 6, 2026);
  return corpus;
}

Outcome curry_rejection() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  CheckReport r = check_proof(load_proof("curry.json"), kFull);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(!r.valid, "accepted");
  o.require(r.violations.size() == 1, std::to_string(r.violations.size()) + " violations");
  if (!r.violations.empty()) {
    o.require(r.violations[0].constraint == "C5", "constraint " + r.violations[0].constraint);
    o.require(r.violations[0].node == "/0/0", "node " + r.violations[0].node);
  }
  o.require(secs < 1.0, "too slow");
  return o;
}

Outcome unsafe_oracle() {
  Outcome o;
  Proof one = load_proof("unsafe1.json"), two = load_proof("unsafe2.json");
  o.require(unsafe_leaves(one) == std::set<std::string>{"target"}, "first example");
  o.require(unsafe_leaves(two) == std::set<std::string>{"target", "suffix"}, "second example");
  return o;
}

Outcome stratum_example() {
  Outcome o;
  Proof p = load_proof("stratum.json");
  o.require(stratum(p) == 1, "stratum " + std::to_string(stratum(p)));
  o.require(!valid(p, System::parse("nbqlcd[0]")), "accepted at stratum 0");
  for (int n = 1; n <= 5; ++n) o.require(valid(p, System::parse("nbqlcd[" + std::to_string(n) + "]")), "rejected");
  return o;
}

Outcome reduction_theorem() {
  Outcome o;
  auto corpus = reduction_corpus();
  o.require(corpus.size() >= 200, "corpus too small");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Proof& p = corpus[i];
    std::string tag = "proof " + std::to_string(i) + ": ";
    if (!valid(p, kFull)) {
      o.require(false, tag + "corpus proof invalid");
      continue;
    }
    ReductionResult r = reduce(p);
    o.require(r.n == stratum(p) + 1, tag + "wrong n");
    o.require(r.proof.conclusion == box(r.n, p.conclusion), tag + "wrong conclusion");
    o.require(valid(r.proof, kBase), tag + "output does not re-check");
    o.require(subset(open_assumptions(r.proof), open_assumptions(p)), tag + "new open assumptions");
    Proof back = unbox(r.proof, r.n);
    o.require(back.conclusion == p.conclusion && valid(back, kFull), tag + "unbox failed");
  }
  return o;
}

Outcome semantic_counterexample() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  SearchResult r = countermodel_search({}, F("(p & (p -> q)) -> q"), {2, 1, true}, SearchMode::BqlcdR);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(r.found, "no countermodel to the conditional");
  o.require(!r.found || (r.model.size() <= 2 && r.model.domain == 1), "countermodel too large");
  o.require(secs < 1.0, "too slow");
  SearchBounds b{3, 2, true};
  o.require(!countermodel_search({F("p & (p -> q)")}, F("q"), b, SearchMode::BqlcdR).found, "modus ponens refuted");
  o.require(!countermodel_search({}, F("p -> (q -> p)"), b, SearchMode::BqlcdR).found, "weakening refuted");
  o.require(!countermodel_search({}, F("((p -> q) & (q -> r)) -> (p -> r)"), b, SearchMode::BqlcdR).found,
            "transitivity refuted");
  return o;
}

Outcome soundness_battery() {
  Outcome o;
  int tried = 0;
  for (auto& p : reduction_corpus()) {
    auto gamma = open_assumptions(p);
    if (gamma.size() > 3) continue;
    ++tried;
    SearchResult r = countermodel_search(gamma, p.conclusion, {3, 2, true}, SearchMode::BqlcdR);
    o.require(!r.found, "countermodel to " + to_string(p.conclusion));
  }
  o.require(tried > 0, "no proofs with at most three open assumptions");
  o.detail = o.ok ? std::to_string(tried) + " proofs" : o.detail;
  return o;
}

Outcome theorem_equivalence() {
  Outcome o;
  auto theorems = axiomatic_theorems(20, 7);
  o.require(theorems.size() == 20, "too few theorems");
  for (auto& t : theorems) {
    Proof nd = axiomatic_to_nd(t);
    o.require(valid(nd, kFull) && open_assumptions(nd).empty(), "translation is not a closed proof");
    ReductionResult r = reduce(nd);
    o.require(r.proof.conclusion == box(r.n, t.conclusion), "wrong conclusion");
    o.require(valid(r.proof, kBase) && open_assumptions(r.proof).empty(), "reduction does not re-check");
  }
  KripkeModel base;
  base.add_world("w");
  base.add_edge(0, 0);
  base.rels["p"] = RelInterp{0, {0}};
  for (int n = 1; n <= 3; ++n) {
    std::vector<int> added;
    KripkeModel c = add_chain(base, 0, n, &added);
    o.require(!satisfies(c, added.back(), box(n, F("p"))), "u_" + std::to_string(n) + " forces the box");
    o.require(!testing::oracle_sat(c, added.back(), box(n, F("p"))), "oracle disagrees");
  }
  return o;
}

Outcome identity_modes() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  Formula xm = F("c = d | (c = d -> false)");
  o.require(!countermodel_search({}, xm, {3, 2, true}, SearchMode::StrictIdentity).found, "strict refuted");
  SearchResult r = countermodel_search({}, xm, {2, 2, true}, SearchMode::CongruenceIdentity);
  o.require(r.found, "congruence not refuted");
  o.require(!r.found || !testing::oracle_sat(r.model, r.witness, xm), "witness does not refute");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 5.0, "too slow");
  return o;
}

Outcome brady_construction() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  BradyRun run = run_brady(universe_from_json(read_json_file(testing::data("curry_universe.json"))), 8);
  const json& r = run.report;
  for (auto& [k, v] : r["checks"].items()) o.require(v == true, "check " + k);
  o.require(r["failures"].empty(), "failures reported");
  o.require(r["stable"] == true, "Curry chain not stable");
  o.require(run.loop && run.loop->values_unchanged, "loop changed values");
  o.require(run.loop && run.loop->closure, "closure fails at the loop");
  o.require(run.loop && run.loop->tarski, "TB fails at the loop");
  if (run.loop) {
    KripkeModel m = chain_model(run.state, run.state.depth + 1);
    int w = run.convergence.theta;
    Formula c = F("T(c) -> false");
    Formula tc = F("T(c)");
    o.require(m.reflexive(w), "loop missing");
    o.require(satisfies(m, w, imp(tc, c)) && satisfies(m, w, imp(c, tc)), "TB for C fails");
  }
  BradyRun tower = run_brady(universe_from_json(read_json_file(testing::data("bottom_tower.json"))), 5);
  o.require(tower.report["stable"] == false, "tower reported stable");
  KripkeModel m = chain_model(tower.state, tower.state.depth + 1);
  for (int n = 0; n <= 4; ++n) {
    o.require(satisfies(m, n, box(n + 1, bot())), "w_n misses the box tower");
    o.require(!satisfies(m, n + 1, box(n + 1, bot())), "w_n+1 forces the box tower");
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 10.0, "too slow");
  return o;
}

// Random configuration: an irreflexive base world w that sees a family of
// reflexive worlds and everything below them, with w's atoms the
// intersection of the family's.
struct Config {
  KripkeModel m;
  std::vector<int> us;
};

Config random_config(std::mt19937_64& rng) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  Config c;
  int family = 1 + pick(3), extra = pick(3);
  int worlds = 1 + family + extra;
  for (int i = 0; i < worlds; ++i) c.m.add_world("w" + std::to_string(i));
  for (int u = 1; u <= family; ++u) {
    c.us.push_back(u);
    c.m.add_edge(u, u);
  }
  for (int z = family + 1; z < worlds; ++z) {
    c.m.add_edge(c.us[pick(family)], z);
    if (pick(2)) c.m.add_edge(z, z);
    for (int y = family + 1; y < z; ++y)
      if (pick(3) == 0) c.m.add_edge(y, z);
  }
  for (int u = 1; u < worlds; ++u) c.m.add_edge(0, u);
  c.m.close_transitively();
  c.m.domain = 1 + pick(2);
  c.m.consts["c"] = pick(c.m.domain);
  c.m.consts["#0"] = pick(c.m.domain);
  auto relation = [&](int arity) {
    RelInterp ri{arity, std::vector<WorldSet>(c.m.tuple_count(arity), 0)};
    for (auto& s : ri.holds) {
      for (int z = 1; z < worlds; ++z)
        if (pick(2)) s |= bit(z) | c.m.succ[z];
      if (std::all_of(c.us.begin(), c.us.end(), [&](int u) { return (s & bit(u)) != 0; })) s |= bit(0);
    }
    return ri;
  };
  c.m.rels["p"] = relation(0);
  c.m.rels["q"] = relation(0);
  c.m.rels["P"] = relation(1);
  return c;
}

// The value of a formula with free variable x: the worlds satisfying it
// under each assignment of x.
using Value = std::vector<WorldSet>;

std::set<Value> fragment_values(const KripkeModel& m, int depth) {
  int d = m.domain;
  auto constant = [&](WorldSet s) { return Value(d, s); };
  std::set<Value> level;
  level.insert(constant(m.all()));
  level.insert(constant(0));
  level.insert(constant(m.rels.at("p").holds[0]));
  level.insert(constant(m.rels.at("q").holds[0]));
  level.insert(constant(m.rels.at("P").holds[m.consts.at("c")]));
  level.insert(constant(m.rels.at("P").holds[m.consts.at("#0")]));
  level.insert(m.rels.at("P").holds);
  auto implies = [&](WorldSet a, WorldSet b) {
    WorldSet out = 0;
    for (int w = 0; w < m.size(); ++w)
      if ((m.succ[w] & a & ~b) == 0) out |= bit(w);
    return out;
  };
  for (int k = 0; k < depth; ++k) {
    std::set<Value> next = level;
    for (auto& a : level) {
      WorldSet all = m.all();
      for (WorldSet s : a) all &= s;
      next.insert(constant(all));
      for (auto& b : level) {
        Value conj(d), cond(d);
        for (int i = 0; i < d; ++i) {
          conj[i] = a[i] & b[i];
          cond[i] = implies(a[i], b[i]);
        }
        next.insert(conj);
        next.insert(cond);
      }
    }
    level.swap(next);
  }
  return level;
}

Outcome intersection_lemma() {
  Outcome o;
  std::mt19937_64 rng(99);
  long long classes = 0, sentences = 0;
  for (int i = 0; i < 500; ++i) {
    Config c = random_config(rng);
    std::string tag = "configuration " + std::to_string(i) + ": ";
    o.require(c.m.violations().empty(), tag + "model not persistent");
    for (const Value& v : fragment_values(c.m, 3)) {
      ++classes;
      for (WorldSet s : v) {
        bool lhs = (s & bit(0)) != 0;
        bool rhs = std::all_of(c.us.begin(), c.us.end(), [&](int u) { return (s & bit(u)) != 0; });
        o.require(lhs == rhs, tag + "biconditional fails for a formula class");
      }
    }
    for (int k = 0; k < 10; ++k) {
      Formula f = random_sentence(rng, 3, false);
      ++sentences;
      try {
        o.require(check_intersection_config(c.m, 0, c.us, f), tag + "fails for " + to_string(f));
      } catch (const IntersectionError& e) {
        o.require(false, tag + e.what());
      }
    }
  }
  if (o.ok) o.detail = std::to_string(classes) + " formula classes, " + std::to_string(sentences) + " sentences";
  return o;
}

Outcome translation_round_trip() {
  Outcome o;
  const System tjkd = System::parse("tjkd+"), plus = System::parse("tjk+");
  auto proofs = axiomatic_theorems(10, 11);
  auto derivations = axiomatic_derivations(10, 13);
  proofs.insert(proofs.end(), derivations.begin(), derivations.end());
  o.require(proofs.size() == 20, "too few proofs");
  for (auto& t : proofs) {
    o.require(valid(t, tjkd), "source proof invalid");
    Proof nd = axiomatic_to_nd(t);
    o.require(valid(nd, kFull) && nd.conclusion == t.conclusion, "axiomatic_to_nd output does not check");
    ReductionResult r = reduce(nd);
    auto gamma = open_assumptions(t);
    Proof back = nd_to_axiomatic(r.proof, gamma);
    o.require(valid(back, plus), "nd_to_axiomatic output does not check");
    Formula ante = gamma.empty() ? top() : big_conj(gamma);
    o.require(back.conclusion == imp(ante, box(r.n, t.conclusion)), "wrong conclusion");
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "Curry rejection", curry_rejection},
      {2, "unsafe-occurrence oracle", unsafe_oracle},
      {3, "stratum of the nested proof", stratum_example},
      {4, "reduction theorem on the corpus", reduction_theorem},
      {5, "semantic counterexample", semantic_counterexample},
      {6, "soundness battery", soundness_battery},
      {7, "theorem equivalence", theorem_equivalence},
      {8, "identity modes", identity_modes},
      {9, "Brady construction", brady_construction},
      {10, "intersection lemma", intersection_lemma},
      {11, "translation round trip", translation_round_trip},
  };
  int failed = 0;
  for (auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
