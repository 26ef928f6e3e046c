#include <cctype>
#include <algorithm>
#include <atomic>
#include <functional>
#include <map>

#include "tjk/proof.hpp"

namespace tjk {

namespace {

const std::vector<std::pair<Rule, std::string>>& rule_names() {
  static const std::vector<std::pair<Rule, std::string>> names = {
    {Rule::Assumption, "assumption"},
    {Rule::TopInt, "top-int"},
    {Rule::BotElim, "bot-elim"},
    {Rule::AndInt, "and-int"},
    {Rule::AndElimL, "and-elim-l"},
    {Rule::AndElimR, "and-elim-r"},
    {Rule::OrIntL, "or-int-l"},
    {Rule::OrIntR, "or-int-r"},
    {Rule::OrElim, "or-elim"},
    {Rule::ImpInt, "imp-int"},
    {Rule::ImpElim, "imp-elim"},
    {Rule::IntTrans, "int-trans"},
    {Rule::IntAndInt, "int-and-int"},
    {Rule::IntOrElim, "int-or-elim"},
    {Rule::IntForallInt, "int-forall-int"},
    {Rule::IntExistsElim, "int-exists-elim"},
    {Rule::ForallInt, "forall-int"},
    {Rule::ForallElim, "forall-elim"},
    {Rule::CD, "cd"},
    {Rule::ExistsInt, "exists-int"},
    {Rule::ExistsElim, "exists-elim"},
    {Rule::Axiom, "axiom"},
    {Rule::Affixing, "affixing"},
    {Rule::EqInt, "eq-int"},
    {Rule::EqElim, "eq-elim"},
    {Rule::IdXm, "id-xm"},
  };
  return names;
}

const std::vector<std::pair<Schema, std::string>>& schema_names() {
  static const std::vector<std::pair<Schema, std::string>> names = {
    {Schema::Identity, "identity"},
    {Schema::Top, "top"},
    {Schema::Bot, "bot"},
    {Schema::AndIntro, "and-intro"},
    {Schema::AndElimL, "and-elim-l"},
    {Schema::AndElimR, "and-elim-r"},
    {Schema::OrIntroL, "or-intro-l"},
    {Schema::OrIntroR, "or-intro-r"},
    {Schema::OrElim, "or-elim"},
    {Schema::Distribution, "distribution"},
    {Schema::ForallImp, "forall-imp"},
    {Schema::ForallElim, "forall-elim"},
    {Schema::ExistsIntro, "exists-intro"},
    {Schema::ExistsImp, "exists-imp"},
    {Schema::CD, "cd"},
    {Schema::InfDistribution, "inf-distribution"},
    {Schema::Transitivity, "transitivity"},
    {Schema::Suffixing, "suffixing"},
    {Schema::Prefixing, "prefixing"},
    {Schema::Weakening, "weakening"},
  };
  return names;
}

// Folds the symbolic spellings onto the ASCII rule names.
std::string normalize_rule_name(std::string s) {
  static const std::vector<std::pair<std::string, std::string>> subst = {
    {"⊤", "top"}, {"⊥", "bot"}, {"∧", "and"}, {"∨", "or"},
    {"→", "imp"}, {"∀", "forall"}, {"∃", "exists"}, {"=", "eq"},
    {"_", "-"}, {" ", "-"},
  };
  for (auto& [from, to] : subst) {
    std::size_t pos;
    while ((pos = s.find(from)) != std::string::npos) s.replace(pos, from.size(), to);
  }
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  while (s.find("--") != std::string::npos) s.replace(s.find("--"), 2, "-");
  if (s.rfind("internal-", 0) == 0) s = "int-" + s.substr(9);
  static const std::map<std::string, std::string> alias = {
    {"int-transitivity", "int-trans"}, {"mp", "imp-elim"}, {"modus-ponens", "imp-elim"},
    {"leaf", "assumption"}, {"assume", "assumption"}, {"idxm", "id-xm"},
    {"identity-excluded-middle", "id-xm"}, {"top-intro", "top-int"},
  };
  if (auto it = alias.find(s); it != alias.end()) return it->second;
  return s;
}

std::atomic<unsigned long long> leaf_counter{0};

}  // namespace

std::string to_string(Rule r) {
  for (auto& [rule, name] : rule_names())
    if (rule == r) return name;
  return "?";
}

Rule rule_from_string(const std::string& s) {
  std::string n = normalize_rule_name(s);
  for (auto& [rule, name] : rule_names())
    if (name == n) return rule;
  throw InputError("unknown rule '" + s + "'");
}

std::string to_string(Schema s) {
  for (auto& [schema, name] : schema_names())
    if (schema == s) return name;
  return "?";
}

Schema schema_from_string(const std::string& s) {
  std::string n = normalize_rule_name(s);
  for (auto& [schema, name] : schema_names())
    if (name == n) return schema;
  throw InputError("unknown axiom schema '" + s + "'");
}

const std::vector<Schema>& all_schemas() {
  static const std::vector<Schema> all = [] {
    std::vector<Schema> v;
    for (auto& [s, n] : schema_names()) v.push_back(s);
    return v;
  }();
  return all;
}

std::size_t Proof::size() const {
  std::size_t n = 1;
  for (auto& c : children) n += c.size();
  return n;
}

std::size_t Proof::height() const {
  std::size_t h = 0;
  for (auto& c : children) h = std::max(h, c.height());
  return h + 1;
}

std::string fresh_leaf_id() { return "~" + std::to_string(++leaf_counter); }

Proof leaf(const Formula& f, const std::string& id) {
  Proof p;
  p.rule = Rule::Assumption;
  p.conclusion = f;
  p.id = id.empty() ? fresh_leaf_id() : id;
  return p;
}

Proof node(Rule r, const Formula& conclusion, std::vector<Proof> children, std::vector<std::string> discharges) {
  Proof p;
  p.rule = r;
  p.conclusion = conclusion;
  p.children = std::move(children);
  p.discharges = std::move(discharges);
  return p;
}

Proof axiom(Schema s, const Formula& f) {
  Proof p = node(Rule::Axiom, f, {});
  p.schema = s;
  return p;
}

// ---------------------------------------------------------------------------
// JSON

Proof proof_from_json(const json& j, Signature& sig) {
  if (!j.is_object()) throw InputError("proof nodes must be objects");
  auto formula = [&](const json& v) {
    if (!v.is_string()) throw InputError("formulas must be strings");
    try {
      return parse_formula(v.get<std::string>(), sig);
    } catch (const SyntaxError& e) {
      throw InputError(std::string(e.what()) + " in '" + v.get<std::string>() + "'");
    }
  };
  if (j.contains("assume")) {
    std::string id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump()) : "";
    return leaf(formula(j["assume"]), id);
  }
  if (!j.contains("rule") || !j.contains("conclusion")) throw InputError("proof node needs 'rule' and 'conclusion'");
  Proof p;
  p.rule = rule_from_string(j["rule"].get<std::string>());
  p.conclusion = formula(j["conclusion"]);
  if (p.rule == Rule::Assumption) {
    p.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump()) : fresh_leaf_id();
    return p;
  }
  if (j.contains("children")) {
    if (!j["children"].is_array()) throw InputError("'children' must be an array");
    for (auto& c : j["children"]) p.children.push_back(proof_from_json(c, sig));
  }
  if (j.contains("discharges")) {
    if (!j["discharges"].is_array()) throw InputError("'discharges' must be an array");
    for (auto& d : j["discharges"]) p.discharges.push_back(d.is_string() ? d.get<std::string>() : d.dump());
  }
  if (j.contains("schema")) p.schema = schema_from_string(j["schema"].get<std::string>());
  return p;
}

Proof proof_from_json(const json& j) {
  Signature sig = Signature::inferring();
  return proof_from_json(j.contains("proof") ? j["proof"] : j, sig);
}

json proof_to_json(const Proof& p) {
  json j;
  if (p.rule == Rule::Assumption) {
    j["assume"] = to_string(p.conclusion);
    j["id"] = p.id;
    return j;
  }
  j["rule"] = to_string(p.rule);
  j["conclusion"] = to_string(p.conclusion);
  if (p.schema) j["schema"] = to_string(*p.schema);
  json ch = json::array();
  for (auto& c : p.children) ch.push_back(proof_to_json(c));
  j["children"] = ch;
  if (!p.discharges.empty()) j["discharges"] = p.discharges;
  return j;
}

// ---------------------------------------------------------------------------
// Leaf ids

namespace {

void collect_ids(const Proof& p, std::vector<std::string>& out) {
  if (p.rule == Rule::Assumption) out.push_back(p.id);
  for (auto& c : p.children) collect_ids(c, out);
}

Proof rename_ids(const Proof& p, const std::map<std::string, std::string>& m) {
  Proof q;
  q.rule = p.rule;
  q.conclusion = p.conclusion;
  q.schema = p.schema;
  if (p.rule == Rule::Assumption) {
    auto it = m.find(p.id);
    q.id = it == m.end() ? p.id : it->second;
  }
  q.children.reserve(p.children.size());
  for (auto& c : p.children) q.children.push_back(rename_ids(c, m));
  for (auto& d : p.discharges) {
    auto it = m.find(d);
    q.discharges.push_back(it == m.end() ? d : it->second);
  }
  return q;
}

}  // namespace

Proof canonical_ids(const Proof& p) {
  std::vector<std::string> ids;
  collect_ids(p, ids);
  std::map<std::string, std::string> m;
  int next = 0;
  for (auto& id : ids)
    if (!m.count(id)) m[id] = "l" + std::to_string(++next);
  Proof q = rename_ids(p, m);
  std::function<void(Proof&)> sort_discharges = [&](Proof& n) {
    std::sort(n.discharges.begin(), n.discharges.end());
    n.discharges.erase(std::unique(n.discharges.begin(), n.discharges.end()), n.discharges.end());
    for (auto& c : n.children) sort_discharges(c);
  };
  sort_discharges(q);
  return q;
}

namespace {

bool structurally_equal(const Proof& a, const Proof& b) {
  if (a.rule != b.rule || a.conclusion != b.conclusion || a.schema != b.schema || a.id != b.id ||
      a.discharges != b.discharges || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  return true;
}

}  // namespace

bool same_proof(const Proof& a, const Proof& b) {
  return structurally_equal(canonical_ids(a), canonical_ids(b));
}

Proof relabel(const Proof& p) {
  std::vector<std::string> ids;
  collect_ids(p, ids);
  std::map<std::string, std::string> m;
  for (auto& id : ids)
    if (!m.count(id)) m[id] = fresh_leaf_id();
  return rename_ids(p, m);
}

std::set<int> parameters_of(const Proof& p) {
  std::set<int> out = parameters_of(p.conclusion);
  for (auto& c : p.children) {
    auto s = parameters_of(c);
    out.insert(s.begin(), s.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assumption analysis

namespace {

void discharged_ids(const Proof& p, std::set<std::string>& out) {
  out.insert(p.discharges.begin(), p.discharges.end());
  for (auto& c : p.children) discharged_ids(c, out);
}

void walk_leaves(const Proof& p, const std::string& path, bool unsafe, const std::set<std::string>& closed,
                 std::vector<LeafInfo>& out) {
  if (p.rule == Rule::Assumption) {
    out.push_back({p.id, p.conclusion, path, !closed.count(p.id), unsafe});
    return;
  }
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    bool u = unsafe || (p.rule == Rule::ImpElim && i == 1);
    walk_leaves(p.children[i], path + (path == "/" ? "" : "/") + std::to_string(i), u, closed, out);
  }
}

void push_unique(std::vector<Formula>& v, const Formula& f) {
  if (std::find(v.begin(), v.end(), f) == v.end()) v.push_back(f);
}

}  // namespace

std::vector<LeafInfo> leaves_of(const Proof& p) {
  std::set<std::string> closed;
  discharged_ids(p, closed);
  std::vector<LeafInfo> out;
  walk_leaves(p, "/", false, closed, out);
  return out;
}

std::vector<Formula> open_assumptions(const Proof& p) {
  std::vector<Formula> out;
  for (auto& l : leaves_of(p))
    if (l.open) push_unique(out, l.formula);
  return out;
}

std::set<std::string> unsafe_leaves(const Proof& p) {
  std::set<std::string> out;
  for (auto& l : leaves_of(p))
    if (l.unsafe) out.insert(l.id);
  return out;
}

AssumptionSplit split_assumptions(const Proof& p) {
  AssumptionSplit s;
  auto ls = leaves_of(p);
  for (auto& l : ls)
    if (l.open && l.unsafe) push_unique(s.unsafe_open, l.formula);
  for (auto& l : ls)
    if (l.open && std::find(s.unsafe_open.begin(), s.unsafe_open.end(), l.formula) == s.unsafe_open.end())
      push_unique(s.safe_only_open, l.formula);
  return s;
}

int stratum(const Proof& p) {
  int s = -1;
  for (auto& c : p.children) s = std::max(s, stratum(c));
  if (p.rule == Rule::ImpElim && p.children.size() == 2) s = std::max(s, stratum(p.children[1]) + 1);
  return s;
}

// ---------------------------------------------------------------------------
// Eigenparameters and grafting

namespace {

Proof rename_param_tree(const Proof& p, int from, int to) {
  Proof q = p;
  q.conclusion = rename_parameter(p.conclusion, from, to);
  for (auto& c : q.children) c = rename_param_tree(c, from, to);
  return q;
}

const Proof* find_leaf(const Proof& p, const std::string& id) {
  if (p.rule == Rule::Assumption) return p.id == id ? &p : nullptr;
  for (auto& c : p.children)
    if (auto r = find_leaf(c, id)) return r;
  return nullptr;
}

std::optional<int> eigen_of(const Proof& p) {
  if (p.rule == Rule::ForallInt && p.children.size() == 1 && p.conclusion.is(Op::Forall)) {
    auto t = match_instance(p.conclusion.body(), p.conclusion.var(), p.children[0].conclusion);
    if (t && *t && t->kind() == TermKind::Param) return t->index();
  }
  if (p.rule == Rule::ExistsElim && p.children.size() == 2 && p.children[0].conclusion.is(Op::Exists)) {
    const Formula& major = p.children[0].conclusion;
    for (auto& id : p.discharges)
      if (auto l = find_leaf(p.children[1], id)) {
        auto t = match_instance(major.body(), major.var(), l->conclusion);
        if (t && *t && t->kind() == TermKind::Param) return t->index();
      }
  }
  return std::nullopt;
}

Proof rename_eigen(const Proof& p, int& next) {
  Proof q = p;
  if (auto e = eigen_of(p)) {
    int fresh = next++;
    std::size_t body = p.rule == Rule::ForallInt ? 0 : 1;
    q.children[body] = rename_param_tree(q.children[body], *e, fresh);
  }
  for (auto& c : q.children) c = rename_eigen(c, next);
  return q;
}

}  // namespace

Proof rename_eigenvariables(const Proof& p, const std::set<int>& avoid) {
  auto used = parameters_of(p);
  int next = 0;
  if (!used.empty()) next = std::max(next, *used.rbegin() + 1);
  if (!avoid.empty()) next = std::max(next, *avoid.rbegin() + 1);
  return rename_eigen(p, next);
}

namespace {

Proof graft_rec(const Proof& p, const std::set<std::string>& closed, const std::vector<Proof>& pieces) {
  if (p.rule == Rule::Assumption) {
    if (closed.count(p.id)) return p;
    for (auto& piece : pieces)
      if (piece.conclusion == p.conclusion) return relabel(piece);
    return p;
  }
  Proof q = p;
  for (auto& c : q.children) c = graft_rec(c, closed, pieces);
  return q;
}

// Renames only the eigenparameters of `p` that occur in `avoid`.
Proof rename_clashing(const Proof& p, const std::set<int>& avoid, int& next) {
  Proof q = p;
  if (auto e = eigen_of(p); e && avoid.count(*e)) {
    std::size_t body = p.rule == Rule::ForallInt ? 0 : 1;
    q.children[body] = rename_param_tree(q.children[body], *e, next++);
  }
  for (auto& c : q.children) c = rename_clashing(c, avoid, next);
  return q;
}

}  // namespace

Proof graft(const Proof& host, const std::vector<Proof>& pieces) {
  std::set<int> avoid;
  for (auto& piece : pieces)
    for (auto& f : open_assumptions(piece)) {
      auto ps = parameters_of(f);
      avoid.insert(ps.begin(), ps.end());
    }
  Proof h = host;
  if (!avoid.empty()) {
    auto used = parameters_of(host);
    int next = std::max(*avoid.rbegin(), used.empty() ? 0 : *used.rbegin()) + 1;
    h = rename_clashing(host, avoid, next);
  }
  std::set<std::string> closed;
  discharged_ids(h, closed);
  return graft_rec(h, closed, pieces);
}

}  // namespace tjk
