#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tjk {

enum class IdentityMode { Absent, Congruence, Strict };

std::string to_string(IdentityMode m);
IdentityMode identity_mode_from_string(const std::string& s);

// Symbols of a first-order language. Propositional atoms are relations of
// arity 0. When `open` is set the parser registers unknown symbols instead of
// rejecting them.
struct Signature {
  std::set<std::string> constants;
  std::map<std::string, int> functions;
  std::map<std::string, int> relations;
  IdentityMode identity = IdentityMode::Absent;
  bool open = false;

  static Signature inferring() {
    Signature s;
    s.open = true;
    return s;
  }
  void validate() const;
  void merge(const Signature& other);
};

struct SyntaxError : std::runtime_error {
  enum Kind { Grammar, UnknownSymbol, Arity, NotClosed };
  Kind kind;
  std::size_t position;
  SyntaxError(Kind k, std::size_t pos, const std::string& msg)
    : std::runtime_error(msg), kind(k), position(pos) {}
};

// ---------------------------------------------------------------------------
// Terms

enum class TermKind { Var, Const, Param, App };

struct TermNode;

class Term {
public:
  Term() = default;
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}

  TermKind kind() const;
  const std::string& name() const;
  int index() const;
  const std::vector<Term>& args() const;
  std::size_t hash() const;
  bool closed() const;
  explicit operator bool() const { return node_ != nullptr; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b);

private:
  std::shared_ptr<const TermNode> node_;
};

struct TermNode {
  TermKind kind;
  std::string name;
  int index = 0;
  std::vector<Term> args;
  std::size_t hash = 0;
  bool closed = true;
};

Term var(const std::string& name);
Term constant(const std::string& name);
Term param(int index);
Term app(const std::string& fn, std::vector<Term> args);

// ---------------------------------------------------------------------------
// Formulas

enum class Op { Top, Bot, Atom, And, Or, Imp, Forall, Exists };

struct FormulaNode;

class Formula {
public:
  Formula() = default;
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}

  Op op() const;
  // relation name for atoms, bound variable for quantifiers
  const std::string& name() const;
  const std::string& var() const { return name(); }
  const std::vector<Term>& args() const;
  const Formula& lhs() const;
  const Formula& rhs() const;
  const Formula& body() const { return lhs(); }
  std::size_t hash() const;
  std::size_t size() const;
  bool is(Op o) const { return op() == o; }
  bool binary() const { return op() == Op::And || op() == Op::Or || op() == Op::Imp; }
  bool quantifier() const { return op() == Op::Forall || op() == Op::Exists; }
  explicit operator bool() const { return node_ != nullptr; }
  const FormulaNode* raw() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b);

private:
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  Op op;
  std::string name;
  std::vector<Term> args;
  Formula lhs, rhs;
  std::size_t hash = 0;
  std::size_t size = 1;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

Formula top();
Formula bot();
Formula atom(const std::string& rel, std::vector<Term> args = {});
Formula equals(Term a, Term b);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula imp(Formula a, Formula b);
Formula forall(const std::string& v, Formula body);
Formula exists(const std::string& v, Formula body);

std::set<std::string> free_vars(const Formula& f);
std::set<std::string> free_vars(const Term& t);
bool is_sentence(const Formula& f);
bool occurs_free(const Formula& f, const std::string& v);

// Replaces free occurrences of `v` by the closed term `t`.
Formula substitute(const Formula& f, const std::string& v, const Term& t);

std::set<int> parameters_of(const Formula& f);
std::set<int> parameters_of(const Term& t);
bool has_parameter(const Formula& f, int k);

Formula rename_parameter(const Formula& f, int from, int to);
// Replaces every occurrence of parameter `k` by the variable `v`. Throws if
// `v` would be captured by a binder.
Formula abstract_parameter(const Formula& f, int k, const std::string& v);
// Replaces every occurrence of the closed term `t` by the variable `v`.
Formula abstract_term(const Formula& f, const Term& t, const std::string& v);

// Finds t with substitute(pattern, v, t) == target. Returns nullopt on
// mismatch; an empty Term when `v` does not occur free in `pattern`.
std::optional<Term> match_instance(const Formula& pattern, const std::string& v,
                                   const Formula& target);

// True if `to` arises from `from` by replacing some occurrences of the
// closed term `a` by `b`.
bool replaces_some(const Formula& from, const Formula& to, const Term& a, const Term& b);

Formula box(int n, Formula f);
// Strips n leading `true ->`; nullopt if the shape does not fit.
std::optional<Formula> unbox_formula(int n, Formula f);
Formula big_conj(const std::vector<Formula>& fs);

std::set<std::string> constants_of(const Formula& f);
Signature signature_of(const Formula& f);

std::string to_string(const Term& t);
std::string to_string(const Formula& f);

Formula parse_formula(const std::string& text, const Signature& sig);
// Parses and, when `sig.open`, records new symbols into `sig`.
Formula parse_formula(const std::string& text, Signature& sig);
Formula parse_formula(const std::string& text);

}  // namespace tjk
