#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tjk/brady.hpp"
#include "tjk/selftest.hpp"
#include "tjk/transform.hpp"

using namespace tjk;

namespace {

constexpr int kOk = 0;
constexpr int kSemantic = 1;
constexpr int kInput = 2;

struct Options {
  std::string input;
  std::string system = "nbqlcd_r";
  std::string out;
  std::string world;
  std::string formula;
  bool trace = false;
  std::vector<std::string> premises;
  std::string conclusion;
  int max_worlds = 3;
  int max_domain = 2;
  std::string mode = "bqlcd_r";
  int depth_budget = 8;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void emit(const Options& o, const json& j) {
  if (o.out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw InputError("cannot write " + o.out);
  f << j.dump(2) << "\n";
}

Proof load_proof(const std::string& path) { return proof_from_json(read_json_file(path)); }

int cmd_check(const Options& o) {
  Proof p = load_proof(o.input);
  System sys = System::parse(o.system);
  CheckReport r = check_proof(p, sys);
  json j = report_to_json(r);
  j["system"] = sys.name();
  emit(o, j);
  return r.valid ? kOk : kSemantic;
}

int cmd_reduce(const Options& o) {
  Proof p = load_proof(o.input);
  CheckReport in = check_proof(p, System::parse("nbqlcd_r"));
  if (!in.valid) {
    json j = report_to_json(in);
    j["error"] = "input proof does not check in nbqlcd_r";
    emit(o, j);
    return kSemantic;
  }
  ReductionResult r = reduce(p);
  CheckReport outr = check_proof(r.proof, System::parse("nbqlcd"));
  if (!outr.valid || r.proof.conclusion != box(r.n, p.conclusion)) {
    json j = report_to_json(outr);
    j["error"] = "reduced proof failed to re-check";
    emit(o, j);
    return kSemantic;
  }
  json j = {{"n", r.n},
            {"proof", proof_to_json(r.proof)},
            {"stats",
             {{"nodes_in", p.size()},
              {"nodes_out", r.proof.size()},
              {"strata", {{"in", r.source_stratum}, {"out", outr.stratum}}}}}};
  emit(o, j);
  return kOk;
}

// Subformulas that are sentences, in preorder.
void closed_subformulas(const Formula& f, std::vector<Formula>& out) {
  if (is_sentence(f)) out.push_back(f);
  if (f.binary()) {
    closed_subformulas(f.lhs(), out);
    closed_subformulas(f.rhs(), out);
  } else if (f.quantifier()) {
    closed_subformulas(f.body(), out);
  }
}

int cmd_sat(const Options& o) {
  KripkeModel m = model_from_json(read_json_file(o.input));
  int w;
  try {
    w = m.world(o.world);
  } catch (const std::exception&) {
    throw InputError("unknown world '" + o.world + "'");
  }
  Formula f = parse_formula(o.formula);
  if (!is_sentence(f)) throw InputError("formula is not closed");
  bool value = satisfies(m, w, f);
  json j = {{"world", o.world}, {"formula", to_string(f)}, {"value", value}};
  if (o.trace) {
    json tr = json::array();
    std::vector<Formula> subs;
    closed_subformulas(f, subs);
    for (auto& s : subs) {
      WorldSet t = truth_set(m, s);
      json ws = json::array();
      for (int u = 0; u < m.size(); ++u)
        if (t & bit(u)) ws.push_back(m.world_ids[u]);
      tr.push_back({{"formula", to_string(s)}, {"true_at", ws}});
    }
    j["trace"] = tr;
  }
  emit(o, j);
  return kOk;
}

int cmd_countermodel(const Options& o) {
  std::vector<Formula> gamma;
  for (auto& s : o.premises) gamma.push_back(parse_formula(s));
  Formula phi = parse_formula(o.conclusion);
  for (auto& g : gamma)
    if (!is_sentence(g)) throw InputError("premise is not closed: " + to_string(g));
  if (!is_sentence(phi)) throw InputError("conclusion is not closed");
  if (o.max_worlds < 1 || o.max_domain < 1) throw InputError("bounds must be positive");
  SearchMode mode;
  try {
    mode = search_mode_from_string(o.mode);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  SearchBounds b{o.max_worlds, o.max_domain, mode != SearchMode::Bqlcd};
  SearchResult r = countermodel_search(gamma, phi, b, mode, o.jobs);
  if (!r.found) {
    json j = {{"result", "none"}, {"candidates", r.candidates}, {"notes", r.notes}};
    emit(o, j);
    return kOk;
  }
  json j = {{"result", "countermodel"},
            {"model", model_to_json(r.model)},
            {"witness", r.model.world_ids[r.witness]},
            {"candidates", r.candidates},
            {"notes", r.notes}};
  emit(o, j);
  return kSemantic;
}

int cmd_brady(const Options& o) {
  Universe u = universe_from_json(read_json_file(o.input));
  if (o.depth_budget < 0) throw InputError("depth budget must be non-negative");
  BradyRun run = run_brady(u, o.depth_budget, o.seed);
  emit(o, run.report);
  return run.report["failures"].empty() ? kOk : kSemantic;
}

int cmd_selftest(const Options& o) {
  json r = run_selftest(o.seed);
  emit(o, r);
  return r["passed"].get<bool>() ? kOk : kSemantic;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workbench for TJK^d+ natural deduction, Kripke models and the fixed-point truth construction"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "seed for randomized components");
  app.add_option("--jobs", o.jobs, "worker cap")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "write the report here instead of stdout");

  auto* check = app.add_subcommand("check", "check a proof");
  check->add_option("proof", o.input)->required();
  check->add_option("--system", o.system, "system id, e.g. nbqlcd_r, nbqlcd, nbqlcd[2], tjkd+");

  auto* red = app.add_subcommand("reduce", "reduce a proof to a modus-ponens-free proof of a boxed conclusion");
  red->add_option("proof", o.input)->required();

  auto* sat = app.add_subcommand("sat", "evaluate a sentence at a world");
  sat->add_option("model", o.input)->required();
  sat->add_option("--world", o.world)->required();
  sat->add_option("--formula", o.formula)->required();
  sat->add_flag("--trace", o.trace, "list where each closed subformula holds");

  auto* cm = app.add_subcommand("countermodel", "bounded countermodel search");
  cm->add_option("--premises", o.premises, "premise sentence (repeatable)");
  cm->add_option("--conclusion", o.conclusion)->required();
  cm->add_option("--max-worlds", o.max_worlds);
  cm->add_option("--max-domain", o.max_domain);
  cm->add_option("--mode", o.mode, "bqlcd_r, bqlcd, strict or congruence");

  auto* br = app.add_subcommand("brady", "run the fixed-point chain construction");
  br->add_option("universe", o.input)->required();
  br->add_option("--depth-budget", o.depth_budget);

  auto* st = app.add_subcommand("selftest", "run the randomized invariant suites");

  for (auto* sc : {check, red, sat, cm, br, st}) {
    sc->add_option("--seed", o.seed);
    sc->add_option("--out", o.out);
    sc->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*check) return cmd_check(o);
    if (*red) return cmd_reduce(o);
    if (*sat) return cmd_sat(o);
    if (*cm) return cmd_countermodel(o);
    if (*br) return cmd_brady(o);
    return cmd_selftest(o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kInput;
  } catch (const BradyError& e) {
    std::cerr << "invalid universe: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemantic;
  }
}
