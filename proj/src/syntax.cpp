#include "tjk/syntax.hpp"

#include <functional>

namespace tjk {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

const std::vector<Term> kNoArgs;
const Formula kNoFormula;

}  // namespace

std::string to_string(IdentityMode m) {
  switch (m) {
    case IdentityMode::Absent: return "absent";
    case IdentityMode::Congruence: return "congruence";
    case IdentityMode::Strict: return "strict";
  }
  return "absent";
}

IdentityMode identity_mode_from_string(const std::string& s) {
  if (s == "absent") return IdentityMode::Absent;
  if (s == "congruence") return IdentityMode::Congruence;
  if (s == "strict") return IdentityMode::Strict;
  throw std::invalid_argument("unknown identity mode '" + s + "'");
}

void Signature::validate() const {
  auto clash = [&](const std::string& n) {
    throw std::invalid_argument("symbol '" + n + "' used in two categories");
  };
  for (auto& c : constants)
    if (functions.count(c) || relations.count(c)) clash(c);
  for (auto& [f, a] : functions) {
    if (a < 1) throw std::invalid_argument("function '" + f + "' needs arity >= 1");
    if (relations.count(f)) clash(f);
  }
  for (auto& [r, a] : relations)
    if (a < 0) throw std::invalid_argument("relation '" + r + "' has negative arity");
  if (identity != IdentityMode::Absent) {
    auto it = relations.find("=");
    if (it != relations.end() && it->second != 2)
      throw std::invalid_argument("'=' is reserved for binary identity");
  }
}

void Signature::merge(const Signature& o) {
  constants.insert(o.constants.begin(), o.constants.end());
  for (auto& [k, v] : o.functions) functions.emplace(k, v);
  for (auto& [k, v] : o.relations) relations.emplace(k, v);
  if (o.identity != IdentityMode::Absent) identity = o.identity;
}

// ---------------------------------------------------------------------------
// Terms

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
int Term::index() const { return node_->index; }
const std::vector<Term>& Term::args() const { return node_ ? node_->args : kNoArgs; }
std::size_t Term::hash() const { return node_ ? node_->hash : 0; }
bool Term::closed() const { return node_->closed; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  if (a.kind() == TermKind::Param) return a.index() == b.index();
  if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (a.args()[i] != b.args()[i]) return false;
  return true;
}

bool operator<(const Term& a, const Term& b) { return to_string(a) < to_string(b); }

static Term make_term(TermKind k, std::string name, int index, std::vector<Term> args) {
  auto n = std::make_shared<TermNode>();
  n->kind = k;
  n->name = std::move(name);
  n->index = index;
  n->args = std::move(args);
  std::size_t h = mix(static_cast<std::size_t>(k) + 17, std::hash<std::string>()(n->name));
  h = mix(h, static_cast<std::size_t>(index));
  n->closed = k != TermKind::Var;
  for (auto& a : n->args) {
    h = mix(h, a.hash());
    n->closed = n->closed && a.closed();
  }
  n->hash = h;
  return Term(std::move(n));
}

Term var(const std::string& name) { return make_term(TermKind::Var, name, 0, {}); }
Term constant(const std::string& name) { return make_term(TermKind::Const, name, 0, {}); }
Term param(int index) {
  if (index < 0) throw std::invalid_argument("negative parameter index");
  return make_term(TermKind::Param, "", index, {});
}
Term app(const std::string& fn, std::vector<Term> args) {
  if (args.empty()) throw std::invalid_argument("function application needs arguments");
  return make_term(TermKind::App, fn, 0, std::move(args));
}

// ---------------------------------------------------------------------------
// Formulas

Op Formula::op() const { return node_->op; }
const std::string& Formula::name() const { return node_->name; }
const std::vector<Term>& Formula::args() const { return node_->args; }
const Formula& Formula::lhs() const { return node_->lhs; }
const Formula& Formula::rhs() const { return node_->rhs; }
std::size_t Formula::hash() const { return node_ ? node_->hash : 0; }
std::size_t Formula::size() const { return node_ ? node_->size : 0; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash() || a.op() != b.op() || a.size() != b.size()) return false;
  switch (a.op()) {
    case Op::Top:
    case Op::Bot: return true;
    case Op::Atom:
      if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (a.args()[i] != b.args()[i]) return false;
      return true;
    case Op::And:
    case Op::Or:
    case Op::Imp: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Op::Forall:
    case Op::Exists: return a.var() == b.var() && a.body() == b.body();
  }
  return false;
}

bool operator<(const Formula& a, const Formula& b) {
  if (a == b) return false;
  return to_string(a) < to_string(b);
}

static Formula make(Op op, std::string name, std::vector<Term> args, Formula l, Formula r) {
  auto n = std::make_shared<FormulaNode>();
  n->op = op;
  n->name = std::move(name);
  n->args = std::move(args);
  std::size_t h = mix(static_cast<std::size_t>(op) * 131 + 7, std::hash<std::string>()(n->name));
  for (auto& a : n->args) h = mix(h, a.hash());
  if (l) {
    h = mix(h, l.hash());
    n->size += l.size();
  }
  if (r) {
    h = mix(h, r.hash() * 3);
    n->size += r.size();
  }
  n->hash = h;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return Formula(std::move(n));
}

Formula top() {
  static const Formula t = make(Op::Top, "", {}, {}, {});
  return t;
}
Formula bot() {
  static const Formula b = make(Op::Bot, "", {}, {}, {});
  return b;
}
Formula atom(const std::string& rel, std::vector<Term> args) {
  return make(Op::Atom, rel, std::move(args), {}, {});
}
Formula equals(Term a, Term b) { return atom("=", {std::move(a), std::move(b)}); }
Formula conj(Formula a, Formula b) { return make(Op::And, "", {}, std::move(a), std::move(b)); }
Formula disj(Formula a, Formula b) { return make(Op::Or, "", {}, std::move(a), std::move(b)); }
Formula imp(Formula a, Formula b) { return make(Op::Imp, "", {}, std::move(a), std::move(b)); }
Formula forall(const std::string& v, Formula body) { return make(Op::Forall, v, {}, std::move(body), {}); }
Formula exists(const std::string& v, Formula body) { return make(Op::Exists, v, {}, std::move(body), {}); }

// ---------------------------------------------------------------------------
// Free variables, parameters

static void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.closed()) return;
  if (t.kind() == TermKind::Var) out.insert(t.name());
  for (auto& a : t.args()) collect_vars(a, out);
}

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  collect_vars(t, out);
  return out;
}

static void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.op()) {
    case Op::Top:
    case Op::Bot: return;
    case Op::Atom:
      for (auto& a : f.args()) {
        std::set<std::string> vs;
        collect_vars(a, vs);
        for (auto& v : vs)
          if (!bound.count(v)) out.insert(v);
      }
      return;
    case Op::And:
    case Op::Or:
    case Op::Imp:
      collect_free(f.lhs(), bound, out);
      collect_free(f.rhs(), bound, out);
      return;
    case Op::Forall:
    case Op::Exists: {
      bool fresh = bound.insert(f.var()).second;
      collect_free(f.body(), bound, out);
      if (fresh) bound.erase(f.var());
      return;
    }
  }
}

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

bool is_sentence(const Formula& f) { return free_vars(f).empty(); }

bool occurs_free(const Formula& f, const std::string& v) { return free_vars(f).count(v) > 0; }

static Term subst_term(const Term& t, const std::string& v, const Term& by) {
  if (t.closed()) return t;
  if (t.kind() == TermKind::Var) return t.name() == v ? by : t;
  std::vector<Term> args;
  bool changed = false;
  for (auto& a : t.args()) {
    args.push_back(subst_term(a, v, by));
    changed = changed || !(args.back() == a);
  }
  return changed ? app(t.name(), std::move(args)) : t;
}

static Formula subst(const Formula& f, const std::string& v, const Term& by) {
  switch (f.op()) {
    case Op::Top:
    case Op::Bot: return f;
    case Op::Atom: {
      std::vector<Term> args;
      bool changed = false;
      for (auto& a : f.args()) {
        args.push_back(subst_term(a, v, by));
        changed = changed || !(args.back() == a);
      }
      return changed ? atom(f.name(), std::move(args)) : f;
    }
    case Op::And:
    case Op::Or:
    case Op::Imp: {
      Formula l = subst(f.lhs(), v, by), r = subst(f.rhs(), v, by);
      if (l == f.lhs() && r == f.rhs()) return f;
      return f.op() == Op::And ? conj(l, r) : f.op() == Op::Or ? disj(l, r) : imp(l, r);
    }
    case Op::Forall:
    case Op::Exists: {
      if (f.var() == v) return f;
      Formula b = subst(f.body(), v, by);
      if (b == f.body()) return f;
      return f.op() == Op::Forall ? forall(f.var(), b) : exists(f.var(), b);
    }
  }
  return f;
}

Formula substitute(const Formula& f, const std::string& v, const Term& t) {
  if (!t.closed()) throw SyntaxError(SyntaxError::NotClosed, 0, "substituted term " + to_string(t) + " is not closed");
  return subst(f, v, t);
}

static void collect_params(const Term& t, std::set<int>& out) {
  if (t.kind() == TermKind::Param) out.insert(t.index());
  for (auto& a : t.args()) collect_params(a, out);
}

std::set<int> parameters_of(const Term& t) {
  std::set<int> out;
  collect_params(t, out);
  return out;
}

static void collect_params(const Formula& f, std::set<int>& out) {
  switch (f.op()) {
    case Op::Top:
    case Op::Bot: return;
    case Op::Atom:
      for (auto& a : f.args()) collect_params(a, out);
      return;
    case Op::And:
    case Op::Or:
    case Op::Imp:
      collect_params(f.lhs(), out);
      collect_params(f.rhs(), out);
      return;
    case Op::Forall:
    case Op::Exists: collect_params(f.body(), out); return;
  }
}

std::set<int> parameters_of(const Formula& f) {
  std::set<int> out;
  collect_params(f, out);
  return out;
}

bool has_parameter(const Formula& f, int k) { return parameters_of(f).count(k) > 0; }

// Generic term rewriting over a formula. `binders` tracks bound variables so
// callers can reject captures.
using TermMap = std::function<Term(const Term&, const std::set<std::string>&)>;

static Formula map_terms(const Formula& f, const TermMap& fn, std::set<std::string>& binders) {
  switch (f.op()) {
    case Op::Top:
    case Op::Bot: return f;
    case Op::Atom: {
      std::vector<Term> args;
      bool changed = false;
      for (auto& a : f.args()) {
        args.push_back(fn(a, binders));
        changed = changed || !(args.back() == a);
      }
      return changed ? atom(f.name(), std::move(args)) : f;
    }
    case Op::And:
    case Op::Or:
    case Op::Imp: {
      Formula l = map_terms(f.lhs(), fn, binders), r = map_terms(f.rhs(), fn, binders);
      if (l == f.lhs() && r == f.rhs()) return f;
      return f.op() == Op::And ? conj(l, r) : f.op() == Op::Or ? disj(l, r) : imp(l, r);
    }
    case Op::Forall:
    case Op::Exists: {
      bool fresh = binders.insert(f.var()).second;
      Formula b = map_terms(f.body(), fn, binders);
      if (fresh) binders.erase(f.var());
      if (b == f.body()) return f;
      return f.op() == Op::Forall ? forall(f.var(), b) : exists(f.var(), b);
    }
  }
  return f;
}

static Formula map_terms(const Formula& f, const TermMap& fn) {
  std::set<std::string> binders;
  return map_terms(f, fn, binders);
}

static Term replace_term(const Term& t, const Term& from, const Term& to) {
  if (t == from) return to;
  if (t.kind() != TermKind::App) return t;
  std::vector<Term> args;
  bool changed = false;
  for (auto& a : t.args()) {
    args.push_back(replace_term(a, from, to));
    changed = changed || !(args.back() == a);
  }
  return changed ? app(t.name(), std::move(args)) : t;
}

Formula rename_parameter(const Formula& f, int from, int to) {
  if (from == to) return f;
  Term a = param(from), b = param(to);
  return map_terms(f, [&](const Term& t, const std::set<std::string>&) { return replace_term(t, a, b); });
}

Formula abstract_term(const Formula& f, const Term& t, const std::string& v) {
  Term x = var(v);
  return map_terms(f, [&](const Term& s, const std::set<std::string>& binders) {
    Term r = replace_term(s, t, x);
    if (!(r == s) && binders.count(v))
      throw SyntaxError(SyntaxError::Grammar, 0, "variable " + v + " would be captured");
    return r;
  });
}

Formula abstract_parameter(const Formula& f, int k, const std::string& v) {
  return abstract_term(f, param(k), v);
}

// ---------------------------------------------------------------------------
// Instance matching

namespace {

struct Matcher {
  const std::string& v;
  std::optional<Term> bound;

  bool term(const Term& p, const Term& t, bool shadowed) {
    if (!shadowed && p.kind() == TermKind::Var && p.name() == v) {
      if (!t.closed()) return false;
      if (bound) return *bound == t;
      bound = t;
      return true;
    }
    if (p.closed() || shadowed) return p == t;
    if (p.kind() != t.kind() || p.name() != t.name() || p.args().size() != t.args().size())
      return false;
    for (std::size_t i = 0; i < p.args().size(); ++i)
      if (!term(p.args()[i], t.args()[i], shadowed)) return false;
    return true;
  }

  bool formula(const Formula& p, const Formula& t, bool shadowed) {
    if (p.op() != t.op()) return false;
    switch (p.op()) {
      case Op::Top:
      case Op::Bot: return true;
      case Op::Atom:
        if (p.name() != t.name() || p.args().size() != t.args().size()) return false;
        for (std::size_t i = 0; i < p.args().size(); ++i)
          if (!term(p.args()[i], t.args()[i], shadowed)) return false;
        return true;
      case Op::And:
      case Op::Or:
      case Op::Imp: return formula(p.lhs(), t.lhs(), shadowed) && formula(p.rhs(), t.rhs(), shadowed);
      case Op::Forall:
      case Op::Exists:
        if (p.var() != t.var()) return false;
        return formula(p.body(), t.body(), shadowed || p.var() == v);
    }
    return false;
  }
};

}  // namespace

std::optional<Term> match_instance(const Formula& pattern, const std::string& v, const Formula& target) {
  Matcher m{v, std::nullopt};
  if (!m.formula(pattern, target, false)) return std::nullopt;
  return m.bound ? *m.bound : Term();
}

static bool replaces_term(const Term& x, const Term& y, const Term& a, const Term& b) {
  if (x == y) return true;
  if (x == a && y == b) return true;
  if (x.kind() != TermKind::App || y.kind() != TermKind::App) return false;
  if (x.name() != y.name() || x.args().size() != y.args().size()) return false;
  for (std::size_t i = 0; i < x.args().size(); ++i)
    if (!replaces_term(x.args()[i], y.args()[i], a, b)) return false;
  return true;
}

bool replaces_some(const Formula& x, const Formula& y, const Term& a, const Term& b) {
  if (x.op() != y.op()) return false;
  switch (x.op()) {
    case Op::Top:
    case Op::Bot: return true;
    case Op::Atom:
      if (x.name() != y.name() || x.args().size() != y.args().size()) return false;
      for (std::size_t i = 0; i < x.args().size(); ++i)
        if (!replaces_term(x.args()[i], y.args()[i], a, b)) return false;
      return true;
    case Op::And:
    case Op::Or:
    case Op::Imp: return replaces_some(x.lhs(), y.lhs(), a, b) && replaces_some(x.rhs(), y.rhs(), a, b);
    case Op::Forall:
    case Op::Exists: return x.var() == y.var() && replaces_some(x.body(), y.body(), a, b);
  }
  return false;
}

// ---------------------------------------------------------------------------

Formula box(int n, Formula f) {
  if (n < 0) throw std::invalid_argument("negative box depth");
  for (int i = 0; i < n; ++i) f = imp(top(), f);
  return f;
}

std::optional<Formula> unbox_formula(int n, Formula f) {
  for (int i = 0; i < n; ++i) {
    if (!f.is(Op::Imp) || !f.lhs().is(Op::Top)) return std::nullopt;
    f = f.rhs();
  }
  return f;
}

Formula big_conj(const std::vector<Formula>& fs) {
  if (fs.empty()) return top();
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = conj(fs[i], acc);
  return acc;
}

static void collect_symbols(const Term& t, Signature& s) {
  switch (t.kind()) {
    case TermKind::Const: s.constants.insert(t.name()); break;
    case TermKind::App:
      s.functions.emplace(t.name(), static_cast<int>(t.args().size()));
      for (auto& a : t.args()) collect_symbols(a, s);
      break;
    default: break;
  }
}

static void collect_symbols(const Formula& f, Signature& s) {
  switch (f.op()) {
    case Op::Top:
    case Op::Bot: return;
    case Op::Atom:
      s.relations.emplace(f.name(), static_cast<int>(f.args().size()));
      if (f.name() == "=" && s.identity == IdentityMode::Absent) s.identity = IdentityMode::Congruence;
      for (auto& a : f.args()) collect_symbols(a, s);
      return;
    case Op::And:
    case Op::Or:
    case Op::Imp:
      collect_symbols(f.lhs(), s);
      collect_symbols(f.rhs(), s);
      return;
    case Op::Forall:
    case Op::Exists: collect_symbols(f.body(), s); return;
  }
}

Signature signature_of(const Formula& f) {
  Signature s;
  collect_symbols(f, s);
  return s;
}

std::set<std::string> constants_of(const Formula& f) { return signature_of(f).constants; }

// ---------------------------------------------------------------------------
// Printing. Precedence: -> (1, right assoc) < | (2) < & (3) < items (4).

std::string to_string(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const: return t.name();
    case TermKind::Param: return "#" + std::to_string(t.index());
    case TermKind::App: {
      std::string s = t.name() + "(";
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) s += ",";
        s += to_string(t.args()[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

static int level(const Formula& f) {
  switch (f.op()) {
    case Op::Imp: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    default: return 4;
  }
}

static void print(const Formula& f, std::string& out);

static void print_at(const Formula& f, int min_level, std::string& out) {
  if (level(f) < min_level) {
    out += "(";
    print(f, out);
    out += ")";
  } else {
    print(f, out);
  }
}

static void print(const Formula& f, std::string& out) {
  switch (f.op()) {
    case Op::Top: out += "true"; return;
    case Op::Bot: out += "false"; return;
    case Op::Atom:
      if (f.name() == "=" && f.args().size() == 2) {
        out += to_string(f.args()[0]) + " = " + to_string(f.args()[1]);
        return;
      }
      out += f.name();
      if (!f.args().empty()) {
        out += "(";
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          if (i) out += ",";
          out += to_string(f.args()[i]);
        }
        out += ")";
      }
      return;
    case Op::And:
    case Op::Or:
    case Op::Imp: {
      int l = level(f);
      print_at(f.lhs(), l + 1, out);
      out += f.op() == Op::And ? " & " : f.op() == Op::Or ? " | " : " -> ";
      print_at(f.rhs(), l, out);
      return;
    }
    case Op::Forall:
    case Op::Exists:
      out += f.op() == Op::Forall ? "forall " : "exists ";
      out += f.var() + ". ";
      print_at(f.body(), 4, out);
      return;
  }
}

std::string to_string(const Formula& f) {
  if (!f) return "<null>";
  std::string out;
  print(f, out);
  return out;
}

}  // namespace tjk
