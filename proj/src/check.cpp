#include <algorithm>
#include <cctype>
#include <map>

#include "tjk/proof.hpp"

namespace tjk {

// ---------------------------------------------------------------------------
// Systems

System System::parse(const std::string& text) {
  System s;
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  auto strip = [&](const std::string& suffix) {
    if (t.size() > suffix.size() && t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0) {
      t.erase(t.size() - suffix.size());
      return true;
    }
    return false;
  };
  if (strip("+eqxm")) s.identity = IdentityMode::Strict;
  else if (strip("+eq")) s.identity = IdentityMode::Congruence;

  if (t == "nbqlcd_r" || t == "nbqlcd-r" || t == "r" || t == "nbqlcd^r") {
    s.kind = SystemKind::NaturalR;
  } else if (t == "nbqlcd") {
    s.kind = SystemKind::NaturalStratified;
    s.stratum = -1;
  } else if (t.rfind("nbqlcd[", 0) == 0 && t.back() == ']') {
    s.kind = SystemKind::NaturalStratified;
    try {
      std::size_t used = 0;
      std::string num = t.substr(7, t.size() - 8);
      s.stratum = std::stoi(num, &used);
      if (used != num.size() || s.stratum < -1) throw std::invalid_argument(num);
    } catch (const std::exception&) {
      throw InputError("bad stratum in system '" + text + "'");
    }
  } else {
    static const std::map<std::string, AxiomLevel> levels = {
      {"bd+", AxiomLevel::B}, {"djd+", AxiomLevel::DJ}, {"tjd+", AxiomLevel::TJ},
      {"tjkd+", AxiomLevel::TJK}, {"tjk+", AxiomLevel::TJKPlus},
    };
    auto it = levels.find(t);
    // "tjkd+eq" reads as "tjkd+" with the suffix "+eq"
    if (it == levels.end() && s.identity != IdentityMode::Absent) it = levels.find(t + "+");
    if (it == levels.end()) throw InputError("unknown system '" + text + "'");
    s.kind = SystemKind::Axiomatic;
    s.level = it->second;
  }
  return s;
}

std::string System::name() const {
  std::string base;
  switch (kind) {
    case SystemKind::NaturalR: base = "nbqlcd_r"; break;
    case SystemKind::NaturalStratified:
      base = stratum == -1 ? "nbqlcd" : "nbqlcd[" + std::to_string(stratum) + "]";
      break;
    case SystemKind::Axiomatic:
      switch (level) {
        case AxiomLevel::B: base = "bd+"; break;
        case AxiomLevel::DJ: base = "djd+"; break;
        case AxiomLevel::TJ: base = "tjd+"; break;
        case AxiomLevel::TJK: base = "tjkd+"; break;
        case AxiomLevel::TJKPlus: base = "tjk+"; break;
      }
  }
  if (identity == IdentityMode::Congruence) base += "+eq";
  if (identity == IdentityMode::Strict) base += "+eqxm";
  return base;
}

bool System::allows(Rule r) const {
  switch (r) {
    case Rule::Assumption: return true;
    case Rule::EqInt:
    case Rule::EqElim: return identity != IdentityMode::Absent;
    case Rule::IdXm: return identity == IdentityMode::Strict;
    default: break;
  }
  if (kind == SystemKind::Axiomatic) {
    switch (r) {
      case Rule::TopInt:
      case Rule::BotElim:
      case Rule::AndInt:
      case Rule::AndElimL:
      case Rule::AndElimR:
      case Rule::OrIntL:
      case Rule::OrIntR:
      case Rule::OrElim:
      case Rule::ImpElim:
      case Rule::ForallInt:
      case Rule::ForallElim:
      case Rule::CD:
      case Rule::ExistsInt:
      case Rule::Axiom:
      case Rule::Affixing: return true;
      case Rule::ExistsElim: return level != AxiomLevel::TJKPlus;
      default: return false;
    }
  }
  if (r == Rule::Axiom || r == Rule::Affixing) return false;
  if (r == Rule::ImpElim) return !(kind == SystemKind::NaturalStratified && stratum == -1);
  return true;
}

bool System::allows(Schema s) const {
  if (kind != SystemKind::Axiomatic) return false;
  switch (s) {
    case Schema::Transitivity: return level != AxiomLevel::B;
    case Schema::Suffixing:
    case Schema::Prefixing: return level == AxiomLevel::TJ || level == AxiomLevel::TJK || level == AxiomLevel::TJKPlus;
    case Schema::Weakening: return level == AxiomLevel::TJK || level == AxiomLevel::TJKPlus;
    default: return true;
  }
}

// ---------------------------------------------------------------------------
// Axiom schemas

namespace {

bool is_imp(const Formula& f) { return f.is(Op::Imp); }
bool is_and(const Formula& f) { return f.is(Op::And); }
bool is_or(const Formula& f) { return f.is(Op::Or); }

bool is_identity_atom(const Formula& f) {
  return f.is(Op::Atom) && f.name() == "=" && f.args().size() == 2;
}

}  // namespace

bool matches_schema(Schema s, const Formula& f) {
  if (!is_imp(f)) return false;
  const Formula& a = f.lhs();
  const Formula& b = f.rhs();
  switch (s) {
    case Schema::Identity: return a == b;
    case Schema::Top: return b.is(Op::Top);
    case Schema::Bot: return a.is(Op::Bot);
    case Schema::AndIntro:
      // (C -> A) & (C -> B) -> (C -> A & B)
      return is_and(a) && is_imp(a.lhs()) && is_imp(a.rhs()) && is_imp(b) && is_and(b.rhs()) &&
             a.lhs().lhs() == a.rhs().lhs() && a.lhs().lhs() == b.lhs() && a.lhs().rhs() == b.rhs().lhs() &&
             a.rhs().rhs() == b.rhs().rhs();
    case Schema::AndElimL: return is_and(a) && a.lhs() == b;
    case Schema::AndElimR: return is_and(a) && a.rhs() == b;
    case Schema::OrIntroL: return is_or(b) && b.lhs() == a;
    case Schema::OrIntroR: return is_or(b) && b.rhs() == a;
    case Schema::OrElim:
      // (A -> C) & (B -> C) -> (A | B -> C)
      return is_and(a) && is_imp(a.lhs()) && is_imp(a.rhs()) && is_imp(b) && is_or(b.lhs()) &&
             a.lhs().rhs() == a.rhs().rhs() && a.lhs().rhs() == b.rhs() && a.lhs().lhs() == b.lhs().lhs() &&
             a.rhs().lhs() == b.lhs().rhs();
    case Schema::Distribution:
      // A & (B | C) -> (A & B) | (A & C)
      return is_and(a) && is_or(a.rhs()) && is_or(b) && is_and(b.lhs()) && is_and(b.rhs()) &&
             b.lhs().lhs() == a.lhs() && b.rhs().lhs() == a.lhs() && b.lhs().rhs() == a.rhs().lhs() &&
             b.rhs().rhs() == a.rhs().rhs();
    case Schema::ForallImp:
      // forall v (A -> B) -> (A -> forall v B)
      return a.is(Op::Forall) && is_imp(a.body()) && is_imp(b) && b.rhs().is(Op::Forall) &&
             b.rhs().var() == a.var() && a.body().lhs() == b.lhs() && a.body().rhs() == b.rhs().body() &&
             !occurs_free(b.lhs(), a.var());
    case Schema::ForallElim: return a.is(Op::Forall) && match_instance(a.body(), a.var(), b).has_value();
    case Schema::ExistsIntro: return b.is(Op::Exists) && match_instance(b.body(), b.var(), a).has_value();
    case Schema::ExistsImp:
      // forall v (A -> B) -> (exists v A -> B)
      return a.is(Op::Forall) && is_imp(a.body()) && is_imp(b) && b.lhs().is(Op::Exists) &&
             b.lhs().var() == a.var() && b.lhs().body() == a.body().lhs() && b.rhs() == a.body().rhs() &&
             !occurs_free(b.rhs(), a.var());
    case Schema::CD:
      // forall v (A | B) -> A | forall v B
      return a.is(Op::Forall) && is_or(a.body()) && is_or(b) && b.rhs().is(Op::Forall) &&
             b.rhs().var() == a.var() && b.lhs() == a.body().lhs() && b.rhs().body() == a.body().rhs() &&
             !occurs_free(b.lhs(), a.var());
    case Schema::InfDistribution:
      // A & exists v B -> exists v (A & B)
      return is_and(a) && a.rhs().is(Op::Exists) && b.is(Op::Exists) && b.var() == a.rhs().var() &&
             is_and(b.body()) && b.body().lhs() == a.lhs() && b.body().rhs() == a.rhs().body() &&
             !occurs_free(a.lhs(), b.var());
    case Schema::Transitivity:
      // (A -> B) & (B -> C) -> (A -> C)
      return is_and(a) && is_imp(a.lhs()) && is_imp(a.rhs()) && is_imp(b) && a.lhs().rhs() == a.rhs().lhs() &&
             b.lhs() == a.lhs().lhs() && b.rhs() == a.rhs().rhs();
    case Schema::Suffixing:
      // (A -> B) -> ((B -> C) -> (A -> C))
      return is_imp(a) && is_imp(b) && is_imp(b.lhs()) && is_imp(b.rhs()) && b.lhs().lhs() == a.rhs() &&
             b.rhs().lhs() == a.lhs() && b.rhs().rhs() == b.lhs().rhs();
    case Schema::Prefixing:
      // (A -> B) -> ((C -> A) -> (C -> B))
      return is_imp(a) && is_imp(b) && is_imp(b.lhs()) && is_imp(b.rhs()) && b.lhs().rhs() == a.lhs() &&
             b.rhs().lhs() == b.lhs().lhs() && b.rhs().rhs() == a.rhs();
    case Schema::Weakening: return is_imp(b) && b.rhs() == a;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Checking

json report_to_json(const CheckReport& r) {
  json j;
  j["valid"] = r.valid;
  json vs = json::array();
  for (auto& v : r.violations) vs.push_back({{"node", v.node}, {"constraint", v.constraint}, {"message", v.message}});
  j["violations"] = vs;
  j["stratum"] = r.stratum;
  return j;
}

namespace {

struct Flat {
  const Proof* p;
  int parent;
  int child_index;
  std::string path;
  int end;  // one past the last preorder index of the subtree
};

class Checker {
public:
  Checker(const Proof& root, const System& sys) : sys_(sys) { flatten(root, -1, -1, "/"); }

  CheckReport run() {
    strata_.assign(nodes_.size(), -1);
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
      const Proof& p = *nodes_[i].p;
      int s = -1;
      int c = i + 1;
      for (std::size_t k = 0; k < p.children.size(); ++k) {
        s = std::max(s, strata_[c]);
        if (p.rule == Rule::ImpElim && k == 1) s = std::max(s, strata_[c] + 1);
        c = nodes_[c].end;
      }
      strata_[i] = s;
    }
    report_.stratum = strata_.empty() ? -1 : strata_[0];
    link_discharges();
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) check_node(i);
    check_leaves();
    report_.valid = report_.violations.empty();
    return report_;
  }

private:
  const System& sys_;
  std::vector<Flat> nodes_;
  std::vector<int> strata_;
  std::map<std::string, int> leaf_index_;
  std::map<int, int> discharger_;  // leaf node -> discharging node
  CheckReport report_;

  void flatten(const Proof& p, int parent, int child_index, const std::string& path) {
    int me = static_cast<int>(nodes_.size());
    nodes_.push_back({&p, parent, child_index, path, 0});
    for (std::size_t i = 0; i < p.children.size(); ++i)
      flatten(p.children[i], me, static_cast<int>(i), path + (path == "/" ? "" : "/") + std::to_string(i));
    nodes_[me].end = static_cast<int>(nodes_.size());
  }

  void add(int node, const std::string& constraint, const std::string& message) {
    report_.violations.push_back({nodes_[node].path, constraint, message});
  }

  int child(int i, std::size_t k) const {
    int c = i + 1;
    for (std::size_t j = 0; j < k; ++j) c = nodes_[c].end;
    return c;
  }

  bool inside(int node, int root) const { return node >= root && node < nodes_[root].end; }

  void link_discharges() {
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
      const Proof& p = *nodes_[i].p;
      if (p.rule != Rule::Assumption) continue;
      if (leaf_index_.count(p.id)) add(i, "discharge", "duplicate leaf id '" + p.id + "'");
      else leaf_index_[p.id] = i;
    }
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
      const Proof& p = *nodes_[i].p;
      if (p.discharges.empty()) continue;
      bool may = p.rule == Rule::ImpInt || p.rule == Rule::OrElim || p.rule == Rule::ExistsElim;
      if (!may) {
        add(i, "discharge", to_string(p.rule) + " cannot discharge assumptions");
        continue;
      }
      for (auto& id : p.discharges) {
        auto it = leaf_index_.find(id);
        if (it == leaf_index_.end()) {
          add(i, "discharge", "discharged leaf '" + id + "' does not exist");
          continue;
        }
        int l = it->second;
        if (!inside(l, i) || l == i) {
          add(i, "discharge", "leaf '" + id + "' is not above the discharging node");
          continue;
        }
        if (discharger_.count(l)) {
          add(i, "discharge", "leaf '" + id + "' is discharged twice");
          continue;
        }
        const Formula& f = nodes_[l].p->conclusion;
        bool ok = true;
        if (p.rule == Rule::ImpInt && p.children.size() == 1) {
          ok = p.conclusion.is(Op::Imp) && f == p.conclusion.lhs();
        } else if (p.rule == Rule::OrElim && p.children.size() == 3) {
          const Formula& major = p.children[0].conclusion;
          bool in1 = inside(l, child(i, 1)), in2 = inside(l, child(i, 2));
          ok = major.is(Op::Or) && ((in1 && f == major.lhs()) || (in2 && f == major.rhs()));
        } else if (p.rule == Rule::ExistsElim && p.children.size() == 2) {
          const Formula& major = p.children[0].conclusion;
          ok = inside(l, child(i, 1)) && major.is(Op::Exists) &&
               match_instance(major.body(), major.var(), f).has_value();
        } else {
          ok = false;
        }
        if (!ok) {
          add(i, "discharge", "leaf '" + id + "' (" + to_string(f) + ") does not fit the discharged shape");
          continue;
        }
        discharger_[l] = i;
      }
    }
  }

  // Walks from every leaf to its discharger (or the root), collecting the
  // nodes at which the leaf is an open assumption, and the positions at which
  // it is unsafe relative to its discharger.
  void check_leaves() {
    for (auto& [id, l] : leaf_index_) {
      auto dit = discharger_.find(l);
      int stop = dit == discharger_.end() ? -1 : dit->second;
      bool unsafe = false;
      int cur = l;
      while (nodes_[cur].parent != -1 && nodes_[cur].parent != stop) {
        int par = nodes_[cur].parent;
        const Proof& pp = *nodes_[par].p;
        if (pp.rule == Rule::ImpElim && nodes_[cur].child_index == 1) unsafe = true;
        // `cur` is the root of a subproof in which the leaf is open
        if (pp.rule == Rule::ForallInt && nodes_[cur].child_index == 0) forall_open_[par].push_back(l);
        if (pp.rule == Rule::ExistsElim && nodes_[cur].child_index == 1) exists_open_[par].push_back(l);
        cur = par;
      }
      if (stop != -1) {
        const Proof& dp = *nodes_[stop].p;
        if (dp.rule == Rule::ExistsElim && nodes_[cur].child_index == 1) exists_open_[stop].push_back(l);
        if (dp.rule == Rule::ImpElim && nodes_[cur].child_index == 1) unsafe = true;
        if (unsafe && sys_.restricts_discharge())
          add(stop, "C5", "discharges the unsafe assumption " + to_string(nodes_[l].p->conclusion) + " (leaf '" +
                              id + "')");
      }
    }
    for (auto& [q, leaves] : forall_open_) {
      auto e = eigen_.find(q);
      if (e == eigen_.end()) continue;
      for (int l : leaves)
        if (has_parameter(nodes_[l].p->conclusion, e->second)) {
          add(q, "C2", "eigenparameter #" + std::to_string(e->second) + " occurs in the open assumption " +
                           to_string(nodes_[l].p->conclusion));
          break;
        }
    }
    for (int q : exists_nodes_) {
      const Proof& p = *nodes_[q].p;
      auto e = eigen_.find(q);
      const Formula& major = p.children[0].conclusion;
      std::optional<Formula> inst;
      if (e != eigen_.end()) inst = substitute(major.body(), major.var(), param(e->second));
      else if (!occurs_free(major.body(), major.var())) inst = major.body();
      for (int l : exists_open_[q]) {
        const Formula& f = nodes_[l].p->conclusion;
        bool discharged_here = discharger_.count(l) && discharger_[l] == q;
        if (inst && f == *inst && !discharged_here) {
          add(q, "C4", "open occurrence of " + to_string(f) + " is not discharged");
          continue;
        }
        if (e != eigen_.end() && !discharged_here && has_parameter(f, e->second))
          add(q, "C3", "eigenparameter #" + std::to_string(e->second) + " occurs in the open assumption " +
                           to_string(f));
      }
    }
  }

  std::map<int, std::vector<int>> forall_open_, exists_open_;
  std::map<int, int> eigen_;
  std::vector<int> exists_nodes_;

  void check_node(int i) {
    const Proof& p = *nodes_[i].p;
    const Formula& c = p.conclusion;
    if (!c) {
      add(i, "rule", "missing conclusion");
      return;
    }
    if (!is_sentence(c)) add(i, "C1", to_string(c) + " is not a sentence");
    if (!sys_.allows(p.rule)) add(i, "system", to_string(p.rule) + " is not a rule of " + sys_.name());

    auto arity = [&](std::size_t n) {
      if (p.children.size() == n) return true;
      add(i, "rule", to_string(p.rule) + " takes " + std::to_string(n) + " premises");
      return false;
    };
    auto k = [&](std::size_t j) -> const Formula& { return p.children[j].conclusion; };
    auto bad = [&](const std::string& msg) { add(i, "rule", to_string(p.rule) + ": " + msg); };
    for (auto& ch : p.children)
      if (!ch.conclusion) return bad("premise without conclusion");

    switch (p.rule) {
      case Rule::Assumption:
        if (!p.children.empty()) bad("assumptions have no premises");
        break;
      case Rule::TopInt:
        if (arity(0) && !c.is(Op::Top)) bad("conclusion must be true");
        break;
      case Rule::BotElim:
        if (arity(1) && !k(0).is(Op::Bot)) bad("premise must be false");
        break;
      case Rule::AndInt:
        if (arity(2) && c != conj(k(0), k(1))) bad("conclusion must conjoin the premises");
        break;
      case Rule::AndElimL:
        if (arity(1) && !(k(0).is(Op::And) && k(0).lhs() == c)) bad("premise must be a conjunction with this left part");
        break;
      case Rule::AndElimR:
        if (arity(1) && !(k(0).is(Op::And) && k(0).rhs() == c)) bad("premise must be a conjunction with this right part");
        break;
      case Rule::OrIntL:
        if (arity(1) && !(c.is(Op::Or) && c.lhs() == k(0))) bad("conclusion must be a disjunction with this left part");
        break;
      case Rule::OrIntR:
        if (arity(1) && !(c.is(Op::Or) && c.rhs() == k(0))) bad("conclusion must be a disjunction with this right part");
        break;
      case Rule::OrElim:
        if (arity(3) && !(k(0).is(Op::Or) && k(1) == c && k(2) == c)) bad("needs a disjunction and two proofs of the conclusion");
        break;
      case Rule::ImpInt:
        if (arity(1) && !(c.is(Op::Imp) && c.rhs() == k(0))) bad("conclusion must be a conditional with the premise as consequent");
        break;
      case Rule::ImpElim:
        if (arity(2) && k(1) != imp(k(0), c)) bad("second premise must be the conditional from the first to the conclusion");
        if (sys_.kind == SystemKind::NaturalStratified && sys_.stratum >= 0 && p.children.size() == 2 &&
            strata_[child(i, 1)] >= sys_.stratum)
          add(i, "stratum", "conditional premise has stratum " + std::to_string(strata_[child(i, 1)]) +
                                ", system allows below " + std::to_string(sys_.stratum));
        break;
      case Rule::IntTrans:
        if (arity(2) && !(k(0).is(Op::Imp) && k(1).is(Op::Imp) && k(0).rhs() == k(1).lhs() &&
                          c == imp(k(0).lhs(), k(1).rhs())))
          bad("needs A -> B and B -> C concluding A -> C");
        break;
      case Rule::IntAndInt:
        if (arity(2) && !(k(0).is(Op::Imp) && k(1).is(Op::Imp) && k(0).lhs() == k(1).lhs() &&
                          c == imp(k(0).lhs(), conj(k(0).rhs(), k(1).rhs()))))
          bad("needs A -> B and A -> C concluding A -> B & C");
        break;
      case Rule::IntOrElim:
        if (arity(2) && !(k(0).is(Op::Imp) && k(1).is(Op::Imp) && k(0).rhs() == k(1).rhs() &&
                          c == imp(disj(k(0).lhs(), k(1).lhs()), k(0).rhs())))
          bad("needs A -> C and B -> C concluding A | B -> C");
        break;
      case Rule::IntForallInt:
        if (arity(1)) {
          const Formula& a = k(0);
          if (!(a.is(Op::Forall) && a.body().is(Op::Imp) && c.is(Op::Imp) && c.rhs().is(Op::Forall) &&
                c.rhs().var() == a.var() && c.lhs() == a.body().lhs() && c.rhs().body() == a.body().rhs()))
            bad("needs forall v (A -> B) concluding A -> forall v B");
        }
        break;
      case Rule::IntExistsElim:
        if (arity(1)) {
          const Formula& a = k(0);
          if (!(a.is(Op::Forall) && a.body().is(Op::Imp) && c.is(Op::Imp) && c.lhs().is(Op::Exists) &&
                c.lhs().var() == a.var() && c.lhs().body() == a.body().lhs() && c.rhs() == a.body().rhs()))
            bad("needs forall v (A -> B) concluding exists v A -> B");
        }
        break;
      case Rule::ForallInt:
        if (arity(1)) {
          if (!c.is(Op::Forall)) {
            bad("conclusion must be universal");
            break;
          }
          auto t = match_instance(c.body(), c.var(), k(0));
          if (!t) {
            bad("premise is not an instance of the conclusion");
          } else if (*t) {
            if (t->kind() != TermKind::Param) bad("premise must instantiate with a parameter");
            else {
              eigen_[i] = t->index();
              if (has_parameter(c, t->index()))
                add(i, "C2", "eigenparameter #" + std::to_string(t->index()) + " occurs in the conclusion");
            }
          }
        }
        break;
      case Rule::ForallElim:
        if (arity(1) && !(k(0).is(Op::Forall) && match_instance(k(0).body(), k(0).var(), c)))
          bad("conclusion must instantiate the universal premise");
        break;
      case Rule::CD:
        if (arity(1)) {
          const Formula& a = k(0);
          if (!(a.is(Op::Forall) && a.body().is(Op::Or) && c.is(Op::Or) && c.rhs().is(Op::Forall) &&
                c.rhs().var() == a.var() && c.lhs() == a.body().lhs() && c.rhs().body() == a.body().rhs()))
            bad("needs forall v (A | B) concluding A | forall v B");
        }
        break;
      case Rule::ExistsInt:
        if (arity(1) && !(c.is(Op::Exists) && match_instance(c.body(), c.var(), k(0))))
          bad("premise must instantiate the existential conclusion");
        break;
      case Rule::ExistsElim:
        if (arity(2)) {
          if (!k(0).is(Op::Exists) || k(1) != c) {
            bad("needs an existential and a proof of the conclusion");
            break;
          }
          exists_nodes_.push_back(i);
          const Formula& major = k(0);
          std::optional<int> eigen;
          bool consistent = true;
          for (auto& id : p.discharges) {
            auto it = leaf_index_.find(id);
            if (it == leaf_index_.end()) continue;
            auto t = match_instance(major.body(), major.var(), nodes_[it->second].p->conclusion);
            if (!t || !*t) continue;
            if (t->kind() != TermKind::Param) {
              bad("discharged instance must use a parameter");
              consistent = false;
            } else if (eigen && *eigen != t->index()) {
              bad("discharged instances use different parameters");
              consistent = false;
            } else {
              eigen = t->index();
            }
          }
          if (eigen && consistent) {
            eigen_[i] = *eigen;
            if (has_parameter(major, *eigen) || has_parameter(c, *eigen))
              add(i, "C3", "eigenparameter #" + std::to_string(*eigen) + " occurs in the major premise or conclusion");
          }
        }
        break;
      case Rule::Axiom:
        if (arity(0)) {
          if (p.schema) {
            if (sys_.kind == SystemKind::Axiomatic && !sys_.allows(*p.schema))
              add(i, "system", "axiom " + to_string(*p.schema) + " is not available in " + sys_.name());
            if (!matches_schema(*p.schema, c)) bad(to_string(c) + " is not an instance of " + to_string(*p.schema));
          } else {
            bool any = false;
            for (Schema s : all_schemas())
              if (sys_.allows(s) && matches_schema(s, c)) any = true;
            if (!any && sys_.kind == SystemKind::Axiomatic) bad(to_string(c) + " is not an axiom of " + sys_.name());
          }
        }
        break;
      case Rule::Affixing:
        if (arity(2)) {
          const Formula& a = k(0);
          const Formula& b = k(1);
          if (!(a.is(Op::Imp) && b.is(Op::Imp) && c == imp(imp(a.rhs(), b.lhs()), imp(a.lhs(), b.rhs()))))
            bad("needs A -> B and C -> D concluding (B -> C) -> (A -> D)");
        }
        break;
      case Rule::EqInt:
        if (arity(0) && !(is_identity_atom(c) && c.args()[0] == c.args()[1])) bad("conclusion must be t = t");
        break;
      case Rule::EqElim:
        if (arity(2)) {
          if (!is_identity_atom(k(0))) bad("first premise must be an identity");
          else if (!replaces_some(k(1), c, k(0).args()[0], k(0).args()[1]))
            bad("conclusion must replace occurrences of the left term by the right term");
        }
        break;
      case Rule::IdXm:
        if (arity(0) && !(c.is(Op::Or) && is_identity_atom(c.lhs()) && c.rhs() == imp(c.lhs(), bot())))
          bad("conclusion must be t1 = t2 | (t1 = t2 -> false)");
        break;
    }
  }
};

}  // namespace

CheckReport check_proof(const Proof& p, const System& sys) {
  Checker c(p, sys);
  return c.run();
}

namespace {

void rules_used(const Proof& p, std::set<Rule>& out) {
  out.insert(p.rule);
  for (auto& c : p.children) rules_used(c, out);
}

}  // namespace

bool check_judgment(const Judgment& j, const Proof& p, CheckReport* report) {
  System sys;
  if (j.stratum) {
    sys.kind = SystemKind::NaturalStratified;
    sys.stratum = *j.stratum;
  }
  std::set<Rule> used;
  rules_used(p, used);
  if (used.count(Rule::IdXm)) sys.identity = IdentityMode::Strict;
  else if (used.count(Rule::EqInt) || used.count(Rule::EqElim)) sys.identity = IdentityMode::Congruence;
  CheckReport r = check_proof(p, sys);
  auto fail = [&](const std::string& msg) {
    r.valid = false;
    r.violations.push_back({"/", "judgment", msg});
  };
  if (p.conclusion != j.conclusion) fail("proof concludes " + to_string(p.conclusion));
  auto in = [](const std::vector<Formula>& v, const Formula& f) { return std::find(v.begin(), v.end(), f) != v.end(); };
  for (auto& f : open_assumptions(p))
    if (!in(j.gamma, f) && !in(j.sigma, f)) fail("open assumption " + to_string(f) + " is not in the context");
  for (auto& f : split_assumptions(p).unsafe_open)
    if (!in(j.gamma, f)) fail("unsafe assumption " + to_string(f) + " is not in the outer context");
  if (report) *report = r;
  return r.valid;
}

}  // namespace tjk
