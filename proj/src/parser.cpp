#include "tjk/syntax.hpp"

#include <cctype>

namespace tjk {

namespace {

enum class Tok { Ident, Param, LParen, RParen, Comma, Dot, And, Or, Imp, Iff, Eq, True, False, Forall, Exists, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

struct Alias {
  const char* utf8;
  Tok kind;
};

const Alias kAliases[] = {
  {"\xE2\x88\xA7", Tok::And},    {"\xE2\x88\xA8", Tok::Or},    {"\xE2\x86\x92", Tok::Imp},
  {"\xE2\x86\x94", Tok::Iff},    {"\xE2\x88\x80", Tok::Forall}, {"\xE2\x88\x83", Tok::Exists},
  {"\xE2\x8A\xA4", Tok::True},   {"\xE2\x8A\xA5", Tok::False},
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    bool aliased = false;
    for (auto& a : kAliases) {
      std::size_t n = std::char_traits<char>::length(a.utf8);
      if (s.compare(i, n, a.utf8) == 0) {
        out.push_back({a.kind, a.utf8, i});
        i += n;
        aliased = true;
        break;
      }
    }
    if (aliased) continue;
    std::size_t start = i;
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", i++}); continue;
      case ')': out.push_back({Tok::RParen, ")", i++}); continue;
      case ',': out.push_back({Tok::Comma, ",", i++}); continue;
      case '.': out.push_back({Tok::Dot, ".", i++}); continue;
      case '&': out.push_back({Tok::And, "&", i++}); continue;
      case '|': out.push_back({Tok::Or, "|", i++}); continue;
      case '=': out.push_back({Tok::Eq, "=", i++}); continue;
      default: break;
    }
    if (s.compare(i, 2, "->") == 0) {
      out.push_back({Tok::Imp, "->", i});
      i += 2;
      continue;
    }
    if (s.compare(i, 3, "<->") == 0) {
      out.push_back({Tok::Iff, "<->", i});
      i += 3;
      continue;
    }
    if (c == '#') {
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i == start + 1) throw SyntaxError(SyntaxError::Grammar, start, "expected digits after '#'");
      out.push_back({Tok::Param, s.substr(start + 1, i - start - 1), start});
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '\''))
        ++i;
      std::string w = s.substr(start, i - start);
      Tok k = Tok::Ident;
      if (w == "true") k = Tok::True;
      else if (w == "false") k = Tok::False;
      else if (w == "forall") k = Tok::Forall;
      else if (w == "exists") k = Tok::Exists;
      out.push_back({k, w, start});
      continue;
    }
    throw SyntaxError(SyntaxError::Grammar, i, std::string("unexpected character '") + s[i] + "'");
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
public:
  Parser(const std::string& text, Signature& sig) : toks_(lex(text)), sig_(sig) {}

  Formula run() {
    Formula f = implication();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  Signature& sig_;
  std::vector<std::string> bound_;

  const Token& peek() const { return toks_[at_]; }
  const Token& next() { return toks_[at_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++at_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(SyntaxError::Grammar, peek().pos,
                      "syntax error at " + std::to_string(peek().pos) + ": " + msg);
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }

  Formula implication() {
    Formula l = disjunction();
    if (accept(Tok::Imp)) return imp(l, implication());
    if (accept(Tok::Iff)) {
      Formula r = implication();
      return conj(imp(l, r), imp(r, l));
    }
    return l;
  }

  Formula disjunction() {
    Formula l = conjunction();
    if (accept(Tok::Or)) return disj(l, disjunction());
    return l;
  }

  Formula conjunction() {
    Formula l = item();
    if (accept(Tok::And)) return conj(l, conjunction());
    return l;
  }

  Formula item() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::True: ++at_; return top();
      case Tok::False: ++at_; return bot();
      case Tok::LParen: {
        ++at_;
        Formula f = implication();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Forall:
      case Tok::Exists: {
        ++at_;
        if (peek().kind != Tok::Ident) fail("expected variable after quantifier");
        std::string v = next().text;
        accept(Tok::Dot);
        bound_.push_back(v);
        Formula body = item();
        bound_.pop_back();
        return t.kind == Tok::Forall ? forall(v, body) : exists(v, body);
      }
      case Tok::Ident:
      case Tok::Param: return atomic();
      default: fail("expected a formula");
    }
  }

  Formula atomic() {
    std::size_t pos = peek().pos;
    if (peek().kind == Tok::Param) {
      Term l = term();
      return equation(l);
    }
    std::string name = next().text;
    std::vector<Term> args;
    bool applied = false;
    if (accept(Tok::LParen)) {
      applied = true;
      args = arguments();
    }
    if (peek().kind == Tok::Eq) {
      Term l = applied ? function(name, std::move(args), pos) : identifier(name, pos);
      return equation(l);
    }
    relation(name, args.size(), pos);
    return atom(name, std::move(args));
  }

  Formula equation(const Term& l) {
    std::size_t pos = peek().pos;
    expect(Tok::Eq, "'='");
    if (!sig_.open && sig_.identity == IdentityMode::Absent)
      throw SyntaxError(SyntaxError::UnknownSymbol, pos, "identity is not part of the signature");
    if (sig_.open) {
      sig_.relations["="] = 2;
      if (sig_.identity == IdentityMode::Absent) sig_.identity = IdentityMode::Congruence;
    }
    Term r = term();
    return equals(l, r);
  }

  std::vector<Term> arguments() {
    std::vector<Term> args;
    if (accept(Tok::RParen)) fail("empty argument list");
    do {
      args.push_back(term());
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    return args;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::Param) {
      ++at_;
      return param(std::stoi(t.text));
    }
    if (t.kind != Tok::Ident) fail("expected a term");
    ++at_;
    if (accept(Tok::LParen)) return function(t.text, arguments(), t.pos);
    return identifier(t.text, t.pos);
  }

  Term identifier(const std::string& name, std::size_t pos) {
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
      if (*it == name) return var(name);
    if (sig_.constants.count(name)) return constant(name);
    if (sig_.functions.count(name) || sig_.relations.count(name))
      throw SyntaxError(SyntaxError::Arity, pos, "symbol '" + name + "' used as a constant");
    if (sig_.open) {
      sig_.constants.insert(name);
      return constant(name);
    }
    if (std::islower(static_cast<unsigned char>(name[0]))) return var(name);
    throw SyntaxError(SyntaxError::UnknownSymbol, pos, "unknown symbol '" + name + "'");
  }

  Term function(const std::string& name, std::vector<Term> args, std::size_t pos) {
    auto it = sig_.functions.find(name);
    if (it == sig_.functions.end()) {
      if (!sig_.open || sig_.relations.count(name) || sig_.constants.count(name))
        throw SyntaxError(SyntaxError::UnknownSymbol, pos, "unknown function '" + name + "'");
      sig_.functions[name] = static_cast<int>(args.size());
    } else if (it->second != static_cast<int>(args.size())) {
      throw SyntaxError(SyntaxError::Arity, pos,
                        "function '" + name + "' expects " + std::to_string(it->second) + " arguments");
    }
    return app(name, std::move(args));
  }

  void relation(const std::string& name, std::size_t arity, std::size_t pos) {
    auto it = sig_.relations.find(name);
    if (it == sig_.relations.end()) {
      if (!sig_.open || sig_.functions.count(name) || sig_.constants.count(name))
        throw SyntaxError(SyntaxError::UnknownSymbol, pos, "unknown relation '" + name + "'");
      sig_.relations[name] = static_cast<int>(arity);
    } else if (it->second != static_cast<int>(arity)) {
      throw SyntaxError(SyntaxError::Arity, pos,
                        "relation '" + name + "' expects " + std::to_string(it->second) + " arguments");
    }
  }
};

}  // namespace

Formula parse_formula(const std::string& text, Signature& sig) {
  if (sig.open) return Parser(text, sig).run();
  Signature copy = sig;
  return Parser(text, copy).run();
}

Formula parse_formula(const std::string& text, const Signature& sig) {
  Signature copy = sig;
  return Parser(text, copy).run();
}

Formula parse_formula(const std::string& text) {
  Signature s = Signature::inferring();
  return Parser(text, s).run();
}

}  // namespace tjk
