#include <algorithm>
#include <random>

#include "tjk/brady.hpp"

namespace tjk {

namespace {

const char* const kTruth = "T";

void closed_subformulas(const Formula& f, std::vector<Formula>& out) {
  if (is_sentence(f) && std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  if (f.binary()) {
    closed_subformulas(f.lhs(), out);
    closed_subformulas(f.rhs(), out);
  } else if (f.quantifier()) {
    closed_subformulas(f.body(), out);
  }
}

void truth_atoms(const Formula& f, std::vector<Formula>& out) {
  if (f.is(Op::Atom)) {
    if (f.name() == kTruth) out.push_back(f);
  } else if (f.binary()) {
    truth_atoms(f.lhs(), out);
    truth_atoms(f.rhs(), out);
  } else if (f.quantifier()) {
    truth_atoms(f.body(), out);
  }
}

bool subset(const CodeSet& a, const CodeSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

std::string show(const Universe& u, const CodeSet& x) {
  std::string out = "{";
  for (int c : x) {
    if (out.size() > 1) out += ", ";
    auto i = u.sentence_with_code(c);
    out += i ? to_string(u.sentences[*i]) : std::to_string(c);
  }
  return out + "}";
}

}  // namespace

int Universe::index_of(const Formula& f) const {
  for (int i = 0; i < size(); ++i)
    if (sentences[i] == f) return i;
  return -1;
}

std::optional<int> Universe::sentence_with_code(int code) const {
  for (int i = 0; i < size(); ++i)
    if (codes[i] == code) return i;
  return std::nullopt;
}

Universe universe_from_json(const json& j) {
  try {
    Universe u;
    Signature sig = Signature::inferring();
    sig.relations[kTruth] = 1;
    auto parse = [&](const std::string& text) {
      try {
        Formula f = parse_formula(text, sig);
        if (!is_sentence(f)) throw InputError("universe formula '" + text + "' is not a sentence");
        return f;
      } catch (const SyntaxError& e) {
        throw InputError("universe formula '" + text + "': " + e.what());
      }
    };

    std::vector<Formula> given;
    for (auto& s : j.at("sentences")) given.push_back(parse(s.get<std::string>()));
    std::map<std::string, Formula> const_formulas;
    std::map<std::string, int> const_values;
    if (j.contains("consts"))
      for (auto& [name, v] : j.at("consts").items()) {
        if (v.is_string()) {
          Formula f = parse(v.get<std::string>());
          const_formulas[name] = f;
          given.push_back(f);
        } else {
          const_values[name] = v.get<int>();
        }
      }
    for (auto& f : given) closed_subformulas(f, u.sentences);

    std::map<int, int> fixed;  // sentence index -> code
    if (j.contains("codes"))
      for (auto& [text, code] : j.at("codes").items()) {
        int i = u.index_of(parse(text));
        if (i < 0) throw InputError("code given for a formula outside the universe: " + text);
        fixed[i] = code.get<int>();
      }
    std::set<int> used;
    for (auto& [i, c] : fixed) {
      if (c < 0) throw InputError("codes must be non-negative");
      if (!used.insert(c).second) throw InputError("two sentences share the code " + std::to_string(c));
    }
    int next = 0;
    for (int i = 0; i < u.size(); ++i) {
      if (fixed.count(i)) {
        u.codes.push_back(fixed[i]);
        continue;
      }
      while (used.count(next)) ++next;
      u.codes.push_back(next);
      used.insert(next);
    }

    int top_value = *std::max_element(u.codes.begin(), u.codes.end());
    for (auto& [name, v] : const_values) top_value = std::max(top_value, v);
    int domain = j.contains("domain") ? j.at("domain").get<int>() : top_value + 1;
    if (domain <= top_value) throw InputError("domain too small for the codes and constants");
    KripkeModel& m = u.base;
    m.domain = domain;
    if (sig.identity != IdentityMode::Absent) m.identity = IdentityMode::Strict;
    if (!sig.functions.empty()) throw InputError("function symbols are not supported in universes");

    for (auto& [name, v] : const_values) {
      if (v < 0) throw InputError("constant " + name + " is negative");
      m.consts[name] = v;
    }
    for (auto& [name, f] : const_formulas) m.consts[name] = u.codes[u.index_of(f)];
    for (auto& name : sig.constants) {
      if (m.consts.count(name)) continue;
      if (name.size() > 1 && name[0] == 'q' && std::all_of(name.begin() + 1, name.end(), ::isdigit)) {
        int code = std::stoi(name.substr(1));
        if (!u.sentence_with_code(code)) throw InputError("quotation " + name + " names no universe sentence");
        m.consts[name] = code;
      } else {
        throw InputError("constant " + name + " has no value");
      }
    }

    std::map<std::string, std::vector<std::vector<int>>> rel_rows;
    if (j.contains("rels")) rel_rows = j.at("rels").get<std::map<std::string, std::vector<std::vector<int>>>>();
    for (auto& [name, arity] : sig.relations) {
      if (name == kTruth || name == "=") continue;
      RelInterp ri;
      ri.arity = arity;
      ri.holds.assign(m.tuple_count(arity), 0);
      for (auto& row : rel_rows[name]) {
        if (static_cast<int>(row.size()) != arity) throw InputError("relation " + name + " has a row of wrong arity");
        std::size_t idx = 0;
        for (int x : row) {
          if (x < 0 || x >= domain) throw InputError("relation " + name + " leaves the domain");
          idx = idx * domain + x;
        }
        ri.holds[idx] = ~WorldSet(0);
      }
      m.rels[name] = ri;
    }
    if (sig.relations.at(kTruth) != 1) throw InputError("T must be unary");

    // every closed T-atom must name a universe sentence
    for (auto& f : u.sentences) {
      std::vector<Formula> atoms;
      truth_atoms(f, atoms);
      for (auto& a : atoms) {
        if (!a.args()[0].closed()) continue;
        int v = eval_term(m, a.args()[0]);
        if (!u.sentence_with_code(v))
          throw InputError("T-atom " + to_string(a) + " points outside the code table");
      }
    }
    return u;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed universe: ") + e.what());
  }
}

ChainState start_chain(const Universe& u, std::uint64_t seed) {
  ChainState s;
  s.universe = u;
  s.seed = seed;
  s.depth = -1;
  extend_chain(s);
  return s;
}

KripkeModel chain_model(const ChainState& s, int worlds, std::optional<std::pair<int, CodeSet>> hypothesis) {
  KripkeModel m = s.universe.base;
  for (int w = 0; w < worlds; ++w) m.add_world("w" + std::to_string(w));
  for (int w = 0; w < worlds; ++w)
    for (int u = 0; u < w; ++u) m.add_edge(w, u);
  for (auto& [name, ri] : m.rels) {
    WorldSet all = m.all();
    for (auto& h : ri.holds) h &= all;
  }
  RelInterp t;
  t.arity = 1;
  t.holds.assign(m.domain, 0);
  for (int w = 0; w < worlds; ++w) {
    const CodeSet* ext = nullptr;
    if (hypothesis && hypothesis->first == w) ext = &hypothesis->second;
    else if (w < static_cast<int>(s.t_ext.size())) ext = &s.t_ext[w];
    if (!ext) continue;
    for (int c : *ext)
      if (c < m.domain) t.holds[c] |= bit(w);
  }
  m.rels[kTruth] = t;
  if (s.loop_added) m.add_edge(worlds - 1, worlds - 1);
  return m;
}

CodeSet phi_operator(const ChainState& s, int alpha, const CodeSet& x) {
  if (alpha < 0 || alpha > static_cast<int>(s.t_ext.size())) throw BradyError("world beyond the chain frontier");
  KripkeModel m = chain_model(s, alpha + 1, std::make_pair(alpha, x));
  CodeSet out;
  for (int i = 0; i < s.universe.size(); ++i)
    if (satisfies(m, alpha, s.universe.sentences[i])) out.insert(s.universe.codes[i]);
  return out;
}

JumpTrace jump_to_fixpoint(const ChainState& s, int alpha) {
  JumpTrace tr;
  tr.world = alpha;
  tr.stages.push_back({});
  int bound = s.universe.size() + 1;
  for (int k = 0;; ++k) {
    CodeSet next = phi_operator(s, alpha, tr.stages.back());
    if (!subset(tr.stages.back(), next))
      throw BradyError("jump at w" + std::to_string(alpha) + " is not increasing at stage " + std::to_string(k));
    if (next == tr.stages.back()) {
      tr.fixed_point_stage = k;
      return tr;
    }
    tr.stages.push_back(next);
    if (k + 1 > bound) throw BradyError("no fixed point within the stage bound");
  }
}

namespace {

void check_monotone(ChainState& s, int alpha) {
  const Universe& u = s.universe;
  int n = u.size();
  auto set_of = [&](std::uint64_t mask) {
    CodeSet x;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) x.insert(u.codes[i]);
    return x;
  };
  auto test = [&](std::uint64_t small, std::uint64_t big) {
    if (!subset(phi_operator(s, alpha, set_of(small)), phi_operator(s, alpha, set_of(big)))) {
      s.checks.monotone = false;
      s.checks.failures.push_back("monotonicity fails at w" + std::to_string(alpha) + " for " +
                                  show(u, set_of(small)) + " within " + show(u, set_of(big)));
      return false;
    }
    return true;
  };
  if (n <= 8) {
    // every pair X ⊆ Y: Y ranges over all subsets, X over the subsets of Y
    for (std::uint64_t big = 0; big < (std::uint64_t(1) << n); ++big)
      for (std::uint64_t small = big;; small = (small - 1) & big) {
        if (!test(small, big)) return;
        if (small == 0) break;
      }
    return;
  }
  std::mt19937_64 rng(s.seed + static_cast<std::uint64_t>(alpha));
  std::uint64_t full = n >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n) - 1;
  for (int k = 0; k < 200; ++k) {
    std::uint64_t big = rng() & full;
    std::uint64_t small = big & rng();
    if (!test(small, big)) return;
  }
}

}  // namespace

void extend_chain(ChainState& s) {
  int alpha = s.depth + 1;
  if (alpha >= kMaxWorlds) throw BradyError("chain exceeds the world limit");
  if (s.universe.size() <= 16) check_monotone(s, alpha);
  JumpTrace tr = jump_to_fixpoint(s, alpha);
  for (std::size_t k = 1; k < tr.stages.size(); ++k)
    if (!subset(tr.stages[k - 1], tr.stages[k])) s.checks.locally_increasing = false;
  if (tr.fixed_point_stage > s.universe.size() + 1) s.checks.fixed_point_bound = false;
  s.t_ext.push_back(tr.stages.back());
  s.traces.push_back(tr);
  s.depth = alpha;

  // lower worlds have smaller extensions, stage by stage as well
  for (int a = 0; a < alpha; ++a) {
    if (!subset(s.t_ext[alpha], s.t_ext[a])) {
      s.checks.globally_decreasing = false;
      s.checks.failures.push_back("T at w" + std::to_string(alpha) + " is not within T at w" + std::to_string(a));
    }
    const auto& hi = s.traces[a].stages;
    const auto& lo = tr.stages;
    std::size_t len = std::max(hi.size(), lo.size());
    for (std::size_t k = 0; k < len; ++k) {
      const CodeSet& x = lo[std::min(k, lo.size() - 1)];
      const CodeSet& y = hi[std::min(k, hi.size() - 1)];
      if (!subset(x, y)) {
        s.checks.stagewise_decreasing = false;
        s.checks.failures.push_back("stage " + std::to_string(k) + " at w" + std::to_string(alpha) +
                                    " exceeds the same stage at w" + std::to_string(a));
        break;
      }
    }
  }
  // closure: truth at every world matches its installed extension
  KripkeModel m = chain_model(s, alpha + 1);
  for (int w = 0; w <= alpha; ++w)
    for (int i = 0; i < s.universe.size(); ++i) {
      bool truth = satisfies(m, w, s.universe.sentences[i]);
      bool listed = s.t_ext[w].count(s.universe.codes[i]) > 0;
      if (truth != listed) {
        s.checks.closure = false;
        s.checks.failures.push_back("closure fails at w" + std::to_string(w) + " for " +
                                    to_string(s.universe.sentences[i]));
      }
    }
}

std::vector<bool> satisfaction_record(const ChainState& s, int w) {
  KripkeModel m = chain_model(s, s.depth + 1);
  std::vector<bool> out;
  for (auto& f : s.universe.sentences) out.push_back(satisfies(m, w, f));
  return out;
}

Convergence detect_convergence(ChainState& s, int budget) {
  Convergence c;
  for (int a = 0;; ++a) {
    while (s.depth < a + 1) {
      if (s.depth >= budget) return c;
      extend_chain(s);
    }
    if (satisfaction_record(s, a) == satisfaction_record(s, a + 1)) {
      c.theta = a;
      c.stable = true;
      return c;
    }
  }
}

LoopReport add_loop_and_verify(ChainState& s, const Convergence& c) {
  if (!c.stable || c.theta < 0) throw BradyError("the chain has not converged; no loop can be added");
  if (s.loop_added) throw BradyError("loop already added");
  int worlds = c.theta + 1;
  s.t_ext.resize(worlds);
  s.traces.resize(worlds);
  s.depth = c.theta;

  LoopReport r;
  const Universe& u = s.universe;
  KripkeModel before = chain_model(s, worlds);
  s.loop_added = true;
  KripkeModel after = chain_model(s, worlds);
  int w = c.theta;
  for (int x = 0; x < worlds; ++x)
    for (int i = 0; i < u.size(); ++i) {
      const Formula& f = u.sentences[i];
      bool b = satisfies(before, x, f), a = satisfies(after, x, f);
      if (a != b) {
        r.values_unchanged = false;
        r.failures.push_back("loop changes " + to_string(f) + " at w" + std::to_string(x));
      }
      if (a != (s.t_ext[x].count(u.codes[i]) > 0)) {
        r.closure = false;
        r.failures.push_back("closure fails after the loop at w" + std::to_string(x) + " for " + to_string(f));
      }
    }
  for (int i = 0; i < u.size(); ++i) {
    const Formula& f = u.sentences[i];
    Formula t = atom(kTruth, {constant("q" + std::to_string(u.codes[i]))});
    after.consts["q" + std::to_string(u.codes[i])] = u.codes[i];
    Formula tb = conj(imp(t, f), imp(f, t));
    if (!satisfies(after, w, tb)) {
      r.tarski = false;
      r.failures.push_back("Tarski biconditional fails for " + to_string(f));
    }
  }
  for (auto& f : u.sentences)
    for (auto& g : u.sentences)
      if (satisfies(after, w, f) && satisfies(after, w, imp(f, g)) && !satisfies(after, w, g)) {
        r.modus_ponens = false;
        r.failures.push_back("modus ponens fails from " + to_string(f) + " to " + to_string(g));
      }
  return r;
}

namespace {

json codes_json(const Universe& u, const CodeSet& x) {
  json a = json::array();
  for (int c : x) {
    auto i = u.sentence_with_code(c);
    a.push_back(i ? to_string(u.sentences[*i]) : std::to_string(c));
  }
  return a;
}

}  // namespace

BradyRun run_brady(const Universe& u, int budget, std::uint64_t seed) {
  BradyRun run;
  run.state = start_chain(u, seed);
  run.convergence = detect_convergence(run.state, budget);
  ChainState& s = run.state;

  json rep;
  json sentences = json::array();
  for (int i = 0; i < u.size(); ++i) sentences.push_back({{"sentence", to_string(u.sentences[i])}, {"code", u.codes[i]}});
  rep["universe"] = sentences;
  json worlds = json::array();
  for (int w = 0; w <= s.depth; ++w) {
    json tr = json::array();
    for (auto& st : s.traces[w].stages) tr.push_back(codes_json(u, st));
    auto rec = satisfaction_record(s, w);
    json truths = json::array();
    for (int i = 0; i < u.size(); ++i)
      if (rec[i]) truths.push_back(to_string(u.sentences[i]));
    worlds.push_back({{"world", "w" + std::to_string(w)},
                      {"t_ext", codes_json(u, s.t_ext[w])},
                      {"stages", tr},
                      {"fixed_point_stage", s.traces[w].fixed_point_stage},
                      {"true", truths}});
  }
  rep["chain"] = worlds;
  rep["theta"] = run.convergence.theta;
  rep["stable"] = run.convergence.stable;
  rep["checks"] = {{"monotonicity", s.checks.monotone},
                   {"locally_increasing", s.checks.locally_increasing},
                   {"fixed_point_bound", s.checks.fixed_point_bound},
                   {"globally_decreasing", s.checks.globally_decreasing},
                   {"stagewise_decreasing", s.checks.stagewise_decreasing},
                   {"closure", s.checks.closure}};
  json failures = s.checks.failures;
  if (run.convergence.stable) {
    run.loop = add_loop_and_verify(s, run.convergence);
    rep["loop"] = {{"world", "w" + std::to_string(run.convergence.theta)},
                   {"values_unchanged", run.loop->values_unchanged},
                   {"closure", run.loop->closure},
                   {"tarski", run.loop->tarski},
                   {"modus_ponens", run.loop->modus_ponens}};
    for (auto& f : run.loop->failures) failures.push_back(f);
  } else {
    rep["loop"] = nullptr;
  }
  rep["failures"] = failures;
  run.report = rep;
  return run;
}

}  // namespace tjk
