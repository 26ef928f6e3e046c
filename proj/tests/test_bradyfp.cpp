#include <random>

#include <doctest.h>

#include "support.hpp"
#include "tjk/brady.hpp"

using namespace tjk;
using testing::F;
using testing::oracle_sat;

namespace {

Universe load_universe(const std::string& name) { return universe_from_json(read_json_file(testing::data(name))); }

int code_of(const Universe& u, const std::string& text) {
  int i = u.index_of(F(text));
  REQUIRE(i >= 0);
  return u.codes[i];
}

CodeSet codes(const Universe& u, std::initializer_list<const char*> texts) {
  CodeSet out;
  for (auto t : texts) out.insert(code_of(u, t));
  return out;
}

// Independent chain simulation: w_a sees every w_b with b < a, T at each
// world is the least fixed point reached by iterating from the empty set.
std::vector<CodeSet> oracle_chain(const Universe& u, int depth) {
  std::vector<CodeSet> ext;
  for (int a = 0; a <= depth; ++a) {
    CodeSet x;
    for (;;) {
      KripkeModel m = u.base;
      for (int w = 0; w <= a; ++w) m.add_world("w" + std::to_string(w));
      for (int w = 0; w <= a; ++w)
        for (int v = 0; v < w; ++v) m.add_edge(w, v);
      RelInterp t{1, std::vector<WorldSet>(m.domain, 0)};
      for (int w = 0; w <= a; ++w)
        for (int c : (w == a ? x : ext[w])) t.holds[c] |= bit(w);
      m.rels["T"] = t;
      for (auto& [name, ri] : m.rels)
        if (name != "T")
          for (auto& h : ri.holds) h = h ? m.all() : 0;
      CodeSet next;
      for (int i = 0; i < u.size(); ++i)
        if (oracle_sat(m, a, u.sentences[i])) next.insert(u.codes[i]);
      if (next == x) break;
      x = next;
    }
    ext.push_back(x);
  }
  return ext;
}

bool checks_ok(const BradyChecks& c) {
  return c.monotone && c.locally_increasing && c.fixed_point_bound && c.globally_decreasing &&
         c.stagewise_decreasing && c.closure && c.failures.empty();
}

}  // namespace

TEST_CASE("jump operator at the dead end") {
  Universe u = load_universe("top_universe.json");
  ChainState s = start_chain(u);
  CHECK(phi_operator(s, 0, {}) == codes(u, {"true"}));
  CHECK(phi_operator(s, 0, codes(u, {"true"})) == codes(u, {"true", "T(q0)"}));
  CHECK_THROWS_AS(phi_operator(s, 5, {}), BradyError);
}

TEST_CASE("iteration to the fixed point") {
  Universe top = load_universe("top_universe.json");
  JumpTrace tr = jump_to_fixpoint(start_chain(top), 0);
  REQUIRE(tr.stages.size() == 3);
  CHECK(tr.stages[0].empty());
  CHECK(tr.stages[1] == codes(top, {"true"}));
  CHECK(tr.stages[2] == codes(top, {"true", "T(q0)"}));
  CHECK(tr.fixed_point_stage == 2);

  Universe bot = universe_from_json({{"sentences", {"false"}}});
  JumpTrace tb = jump_to_fixpoint(start_chain(bot), 0);
  CHECK(tb.stages.back().empty());
  // X(1) = X(0) = ∅, so the least stage with X(β+1) = X(β) is 0
  CHECK(tb.fixed_point_stage == 0);

  Universe curry = load_universe("curry_universe.json");
  ChainState s = start_chain(curry);
  CHECK(s.t_ext[0] == codes(curry, {"true", "T(c) -> false", "T(c)"}));
  CHECK(s.traces[0].fixed_point_stage == 2);
}

TEST_CASE("extending the Curry chain") {
  Universe u = load_universe("curry_universe.json");
  ChainState s = start_chain(u);
  extend_chain(s);
  CHECK(s.depth == 1);
  CHECK(s.t_ext[1] == codes(u, {"true"}));
  CHECK(checks_ok(s.checks));
  auto oracle = oracle_chain(u, 3);
  extend_chain(s);
  extend_chain(s);
  for (int w = 0; w <= 3; ++w) CHECK(s.t_ext[w] == oracle[w]);
}

TEST_CASE("a universe of falsum stays empty") {
  Universe u = universe_from_json({{"sentences", {"false"}}});
  ChainState s = start_chain(u);
  for (int i = 0; i < 4; ++i) extend_chain(s);
  for (auto& x : s.t_ext) CHECK(x.empty());
}

TEST_CASE("box-falsum tower along the chain") {
  Universe u = load_universe("bottom_tower.json");
  ChainState s = start_chain(u);
  for (int i = 0; i < 6; ++i) extend_chain(s);
  KripkeModel m = chain_model(s, s.depth + 1);
  for (int n = 0; n <= 5; ++n) {
    CHECK(satisfies(m, n, box(n + 1, bot())));
    CHECK_FALSE(satisfies(m, n + 1, box(n + 1, bot())));
    CHECK(oracle_sat(m, n, box(n + 1, bot())));
  }
  CHECK(checks_ok(s.checks));
}

TEST_CASE("convergence detection") {
  ChainState top = start_chain(load_universe("top_universe.json"));
  Convergence ct = detect_convergence(top, 8);
  CHECK(ct.stable);
  CHECK(ct.theta == 0);

  ChainState curry = start_chain(load_universe("curry_universe.json"));
  Convergence cc = detect_convergence(curry, 8);
  CHECK(cc.stable);
  CHECK(cc.theta == 1);

  ChainState tower = start_chain(load_universe("bottom_tower.json"));
  Convergence cb = detect_convergence(tower, 5);
  CHECK_FALSE(cb.stable);
  CHECK(tower.depth == 5);
}

TEST_CASE("loop addition") {
  ChainState top = start_chain(load_universe("top_universe.json"));
  LoopReport rt = add_loop_and_verify(top, detect_convergence(top, 8));
  CHECK(rt.ok());

  Universe u = load_universe("curry_universe.json");
  ChainState s = start_chain(u);
  Convergence c = detect_convergence(s, 8);
  LoopReport r = add_loop_and_verify(s, c);
  CHECK(r.ok());
  CHECK(r.tarski);
  // the Curry sentence and its truth ascription are both false at the looped world
  KripkeModel m = chain_model(s, s.depth + 1);
  REQUIRE(m.reflexive(c.theta));
  CHECK_FALSE(oracle_sat(m, c.theta, F("T(c) -> false")));
  CHECK_FALSE(oracle_sat(m, c.theta, F("T(c)")));
  CHECK(oracle_sat(m, c.theta, F("(T(c) -> (T(c) -> false)) & ((T(c) -> false) -> T(c))")));

  ChainState dead = start_chain(u);
  CHECK_THROWS_AS(add_loop_and_verify(dead, Convergence{}), BradyError);
}

TEST_CASE("universe validation") {
  CHECK_THROWS_AS(universe_from_json({{"sentences", {"T(q7)"}}}), InputError);
  CHECK_THROWS_AS(universe_from_json({{"sentences", {"T(d)"}}, {"consts", {{"d", 9}}}}), InputError);
  CHECK_THROWS_AS(universe_from_json({{"sentences", {"p", "q"}}, {"codes", {{"p", 1}, {"q", 1}}}}), InputError);
  Universe u = universe_from_json({{"sentences", {"T(q0) -> p"}}, {"codes", {{"T(q0) -> p", 0}}}});
  // closed under subformulas
  CHECK(u.index_of(F("T(q0)")) >= 0);
  CHECK(u.index_of(F("p")) >= 0);
}

TEST_CASE("run report") {
  BradyRun run = run_brady(load_universe("curry_universe.json"), 8);
  const json& r = run.report;
  CHECK(r["stable"] == true);
  CHECK(r["failures"].empty());
  for (auto& [k, v] : r["checks"].items()) CHECK_MESSAGE(v == true, k);
  CHECK(r["loop"]["tarski"] == true);
  CHECK(r["loop"]["values_unchanged"] == true);
  BradyRun tower = run_brady(load_universe("bottom_tower.json"), 5);
  CHECK(tower.report["stable"] == false);
  CHECK(tower.report["loop"].is_null());
}

TEST_CASE("property: random universes satisfy the chain lemmas") {
  std::mt19937_64 rng(53);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  std::function<std::string(int, int)> sentence = [&](int depth, int quotes) -> std::string {
    if (depth == 0 || pick(3) == 0) {
      switch (pick(4)) {
        case 0: return "true";
        case 1: return "false";
        default: return "T(q" + std::to_string(pick(quotes)) + ")";
      }
    }
    std::string a = sentence(depth - 1, quotes), b = sentence(depth - 1, quotes);
    switch (pick(3)) {
      case 0: return "(" + a + " & " + b + ")";
      case 1: return "(" + a + " | " + b + ")";
      default: return "(" + a + " -> " + b + ")";
    }
  };
  int stable = 0;
  for (int i = 0; i < 40; ++i) {
    int n = 2 + pick(3);
    json j = {{"sentences", json::array()}, {"codes", json::object()}};
    for (int k = 0; k < n; ++k) {
      std::string s = sentence(3, n);
      j["sentences"].push_back(s);
      j["codes"][s] = k;
    }
    Universe u;
    try {
      u = universe_from_json(j);
    } catch (const InputError&) {
      continue;  // duplicate sentences received two codes
    }
    CAPTURE(j.dump());
    ChainState s = start_chain(u, i);
    Convergence c = detect_convergence(s, 6);
    CHECK(checks_ok(s.checks));
    auto oracle = oracle_chain(u, s.depth);
    for (int w = 0; w <= s.depth; ++w) CHECK(s.t_ext[w] == oracle[w]);
    for (int w = 1; w <= s.depth; ++w)
      for (std::size_t k = 0; k < s.traces[w].stages.size(); ++k) {
        const auto& lo = s.traces[w].stages[k];
        const auto& hi = s.traces[w - 1].stages[std::min(k, s.traces[w - 1].stages.size() - 1)];
        CHECK(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
      }
    if (c.stable) {
      ++stable;
      CHECK(add_loop_and_verify(s, c).ok());
    }
  }
  CHECK(stable > 0);
}
