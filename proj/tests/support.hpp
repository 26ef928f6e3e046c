#pragma once

#include <string>

#include "tjk/io.hpp"
#include "tjk/kripke.hpp"
#include "tjk/proof.hpp"

namespace testing {

inline std::string data(const std::string& name) { return std::string(TJK_DATA_DIR) + "/" + name; }

inline tjk::Proof load_proof(const std::string& name) { return tjk::proof_from_json(tjk::read_json_file(data(name))); }

inline tjk::Formula F(const std::string& s) { return tjk::parse_formula(s); }

// Satisfaction written straight from the clauses, kept apart from the
// library evaluator so that one can check the other.
inline int oracle_term(const tjk::KripkeModel& m, const tjk::Term& t, const tjk::Assignment& a) {
  using tjk::TermKind;
  switch (t.kind()) {
    case TermKind::Var: return a.at(t.name());
    case TermKind::Const: return m.consts.at(t.name());
    case TermKind::Param: return m.consts.at("#" + std::to_string(t.index()));
    case TermKind::App: {
      const auto& fi = m.funs.at(t.name());
      std::size_t idx = 0;
      for (auto& x : t.args()) idx = idx * m.domain + oracle_term(m, x, a);
      return fi.table.at(idx);
    }
  }
  return 0;
}

inline bool oracle_sat(const tjk::KripkeModel& m, int w, const tjk::Formula& f, tjk::Assignment a = {}) {
  using tjk::Op;
  switch (f.op()) {
    case Op::Top: return true;
    case Op::Bot: return false;
    case Op::Atom: {
      std::size_t idx = 0;
      for (auto& x : f.args()) idx = idx * m.domain + oracle_term(m, x, a);
      bool diagonal = m.identity == tjk::IdentityMode::Strict ||
                      (m.identity == tjk::IdentityMode::Congruence && !m.rels.count("="));
      if (f.name() == "=" && diagonal)
        return oracle_term(m, f.args()[0], a) == oracle_term(m, f.args()[1], a);
      auto it = m.rels.find(f.name());
      if (it == m.rels.end()) return false;
      return (it->second.holds.at(idx) >> w) & 1;
    }
    case Op::And: return oracle_sat(m, w, f.lhs(), a) && oracle_sat(m, w, f.rhs(), a);
    case Op::Or: return oracle_sat(m, w, f.lhs(), a) || oracle_sat(m, w, f.rhs(), a);
    case Op::Imp:
      for (int u = 0; u < m.size(); ++u)
        if (m.sees(w, u) && oracle_sat(m, u, f.lhs(), a) && !oracle_sat(m, u, f.rhs(), a)) return false;
      return true;
    case Op::Forall:
    case Op::Exists: {
      bool all = true, some = false;
      for (int d = 0; d < m.domain; ++d) {
        a[f.var()] = d;
        bool v = oracle_sat(m, w, f.body(), a);
        all = all && v;
        some = some || v;
      }
      return f.op() == Op::Forall ? all : some;
    }
  }
  return false;
}

}  // namespace testing
