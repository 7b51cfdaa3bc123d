#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "pqc/syntax.hpp"

namespace pqc {

std::string to_string(Token::Kind k) {
  using K = Token::Kind;
  switch (k) {
    case K::Ident: return "identifier";
    case K::KwLet: return "'let'";
    case K::KwIn: return "'in'";
    case K::KwLift: return "'lift'";
    case K::KwForce: return "'force'";
    case K::KwBox: return "'box'";
    case K::KwApply: return "'apply'";
    case K::KwReverse: return "'reverse'";
    case K::KwControlled: return "'controlled'";
    case K::KwWithComputed: return "'withComputed'";
    case K::KwFun: return "'fun'";
    case K::Circ: return "'Circ'";
    case K::Lambda: return "'\\'";
    case K::Dot: return "'.'";
    case K::Comma: return "','";
    case K::LParen: return "'('";
    case K::RParen: return "')'";
    case K::Colon: return "':'";
    case K::Equals: return "'='";
    case K::Star: return "'*'";
    case K::Arrow: return "'-o'";
    case K::Bang: return "'!'";
    case K::CtrlSpec: return "control spec";
    case K::Eof: return "end of input";
  }
  return "?";
}

// --- lexer ------------------------------------------------------------------

namespace {

const std::map<std::string, Token::Kind, std::less<>>& keywords() {
  static const std::map<std::string, Token::Kind, std::less<>> kw{
      {"let", Token::Kind::KwLet},
      {"in", Token::Kind::KwIn},
      {"lift", Token::Kind::KwLift},
      {"force", Token::Kind::KwForce},
      {"box", Token::Kind::KwBox},
      {"apply", Token::Kind::KwApply},
      {"reverse", Token::Kind::KwReverse},
      {"controlled", Token::Kind::KwControlled},
      {"control", Token::Kind::KwControlled},
      {"withComputed", Token::Kind::KwWithComputed},
      {"fun", Token::Kind::KwFun},
  };
  return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  bool fresh_line = true;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
        fresh_line = true;
      } else {
        ++col;
      }
    }
  };
  auto modality_digit = [&](Token& t) {
    if (i < src.size() && src[i] >= '0' && src[i] <= '2' &&
        !(i + 1 < src.size() && ident_char(src[i + 1]))) {
      t.mod = Modality(src[i] - '0');
      t.text += src[i];
      advance(1);
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span = {line, col};
    t.line_start = fresh_line;
    fresh_line = false;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.text = std::string(src.substr(i, j - i));
      if (auto it = keywords().find(t.text); it != keywords().end()) {
        t.kind = it->second;
      } else if (t.text == "Circ" || t.text == "Circ0" || t.text == "Circ1" || t.text == "Circ2") {
        t.kind = Token::Kind::Circ;
        if (t.text.size() == 5) t.mod = Modality(t.text[4] - '0');
      } else {
        t.kind = Token::Kind::Ident;
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    auto single = [&](Token::Kind k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(t);
    };
    switch (c) {
      case '\\': single(Token::Kind::Lambda); continue;
      case '.': single(Token::Kind::Dot); continue;
      case ',': single(Token::Kind::Comma); continue;
      case '(': single(Token::Kind::LParen); continue;
      case ')': single(Token::Kind::RParen); continue;
      case ':': single(Token::Kind::Colon); continue;
      case '=': single(Token::Kind::Equals); continue;
      case '*': single(Token::Kind::Star); continue;
      default: break;
    }
    if (c == '!') {
      t.kind = Token::Kind::Bang;
      t.text = "!";
      advance(1);
      modality_digit(t);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '-' && i + 1 < src.size() && (src[i + 1] == 'o' || src[i + 1] == '>')) {
      // "-o" must not swallow an identifier such as "-oops".
      if (src[i + 1] == 'o' && i + 2 < src.size() && ident_char(src[i + 2]) &&
          !(src[i + 2] >= '0' && src[i + 2] <= '2'))
        throw SourceError("E-LEX", t.span, "unexpected character '-'");
      t.kind = Token::Kind::Arrow;
      t.text = std::string(src.substr(i, 2));
      advance(2);
      modality_digit(t);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '[') {
      std::size_t j = i + 1;
      while (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
      if (j >= src.size() || src[j] != ']')
        throw SourceError("E-LEX", t.span, "control spec must be '[' followed by + and - then ']'");
      t.kind = Token::Kind::CtrlSpec;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + std::to_string(static_cast<unsigned char>(c));
    throw SourceError("E-LEX", t.span, "unexpected character '" + shown + "'");
  }
  Token eof;
  eof.kind = Token::Kind::Eof;
  eof.span = {line, col};
  eof.line_start = true;
  out.push_back(eof);
  return out;
}

// --- parser -----------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::vector<Token> toks, bool layout) : toks_(std::move(toks)), layout_(layout) {}

  Program program() {
    Program p;
    std::map<std::string, TypePtr> pending;
    std::map<std::string, Span> pending_span;
    std::set<std::string> defined;
    while (peek().kind != Token::Kind::Eof) {
      const Token& head = peek();
      if (head.kind != Token::Kind::Ident || head.span.column != 1)
        fail({Token::Kind::Ident}, "a top-level definition must start in column 1");
      std::string name = head.text;
      Span span = head.span;
      next();
      if (peek().kind == Token::Kind::Colon) {
        next();
        if (pending.contains(name) || defined.contains(name))
          throw SourceError("E-PARSE", span, "duplicate declaration of '" + name + "'");
        pending[name] = type();
        pending_span[name] = span;
        expect_stop();
        continue;
      }
      if (defined.contains(name))
        throw SourceError("E-PARSE", span, "duplicate definition of '" + name + "'");
      std::vector<std::pair<std::string, TypePtr>> args;
      while (peek().kind != Token::Kind::Equals) args.push_back(binder());
      next();
      for (const auto& [x, _] : args) bound_.push_back(x);
      TermPtr body = term();
      bound_.resize(bound_.size() - args.size());
      expect_stop();
      Definition d;
      d.name = name;
      d.span = span;
      if (auto it = pending.find(name); it != pending.end()) {
        d.declared = it->second;
        pending.erase(it);
      }
      if (!args.empty()) {
        for (auto it = args.rbegin(); it != args.rend(); ++it)
          body = Term::lambda(it->first, body, it->second, body->span);
        if (d.declared && d.declared->kind == Type::Kind::Bang) body = Term::lift(body, span);
      }
      d.body = body;
      p.defs.push_back(std::move(d));
      defined.insert(name);
      bound_.push_back(name);
    }
    if (!pending.empty())
      throw SourceError("E-PARSE", pending_span.begin()->second,
                        "declaration of '" + pending.begin()->first + "' has no definition");
    return p;
  }

  TermPtr whole_term(const std::vector<std::string>& bound) {
    bound_ = bound;
    TermPtr t = term();
    if (peek().kind != Token::Kind::Eof) fail({Token::Kind::Eof});
    return t;
  }

  TypePtr whole_type() {
    TypePtr t = type();
    if (peek().kind != Token::Kind::Eof) fail({Token::Kind::Eof});
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  /// A column-1 token ends the current definition.
  bool at_stop() const {
    const Token& t = peek();
    return t.kind == Token::Kind::Eof || (layout_ && t.line_start && t.span.column == 1 && pos_ > 0);
  }

  [[noreturn]] void fail(std::initializer_list<Token::Kind> expected, const std::string& note = "") {
    const Token& t = peek();
    std::string msg = "expected ";
    std::size_t n = 0;
    for (auto k : expected) {
      if (n++) msg += n == expected.size() ? " or " : ", ";
      msg += to_string(k);
    }
    msg += ", found " + (t.kind == Token::Kind::Eof ? std::string("end of input") : "'" + t.text + "'");
    if (!note.empty()) msg += " (" + note + ")";
    throw SourceError("E-PARSE", t.span, msg);
  }

  const Token& expect(Token::Kind k) {
    if (peek().kind != k || (at_stop() && k != Token::Kind::Eof)) fail({k});
    return next();
  }

  void expect_stop() {
    if (!at_stop()) fail({Token::Kind::Eof}, "a new definition must start in column 1");
  }

  // --- types ---

  TypePtr type() {
    TypePtr a = tensor_type();
    if (!at_stop() && peek().kind == Token::Kind::Arrow) {
      ModHole m = next().mod;
      return Type::lolli(a, m, type());
    }
    return a;
  }

  TypePtr tensor_type() {
    TypePtr a = prefix_type();
    if (!at_stop() && peek().kind == Token::Kind::Star) {
      next();
      return Type::tensor(a, tensor_type());
    }
    return a;
  }

  TypePtr prefix_type() {
    if (!at_stop() && peek().kind == Token::Kind::Bang) {
      ModHole m = next().mod;
      return Type::bang(m, prefix_type());
    }
    return atom_type();
  }

  SimpleType simple(const TypePtr& t, Span at) {
    auto s = as_simple(*t);
    if (!s) throw SourceError("E-PARSE", at, "expected a simple type, found " + print_type(*t));
    return *s;
  }

  TypePtr atom_type() {
    if (at_stop()) fail({Token::Kind::Ident, Token::Kind::Circ, Token::Kind::LParen});
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Ident: {
        next();
        if (t.text == "Unit") return Type::unit();
        if (t.text == "Bool") return Type::boolean();
        return Type::wire_of({t.text});
      }
      case Token::Kind::Circ: {
        ModHole m = next().mod;
        expect(Token::Kind::LParen);
        Span sa = peek().span;
        SimpleType s = simple(type(), sa);
        expect(Token::Kind::Comma);
        Span su = peek().span;
        SimpleType u = simple(type(), su);
        expect(Token::Kind::RParen);
        return Type::circ(m, s, u);
      }
      case Token::Kind::LParen: {
        next();
        if (peek().kind == Token::Kind::RParen) {
          next();
          return Type::unit();
        }
        TypePtr inner = type();
        expect(Token::Kind::RParen);
        return inner;
      }
      default: fail({Token::Kind::Ident, Token::Kind::Circ, Token::Kind::LParen});
    }
  }

  // --- terms ---

  std::pair<std::string, TypePtr> binder() {
    if (!at_stop() && peek().kind == Token::Kind::LParen) {
      next();
      std::string x = expect(Token::Kind::Ident).text;
      expect(Token::Kind::Colon);
      TypePtr t = type();
      expect(Token::Kind::RParen);
      return {x, t};
    }
    return {expect(Token::Kind::Ident).text, nullptr};
  }

  bool starts_binding_form() const {
    if (at_stop()) return false;
    auto k = peek().kind;
    return k == Token::Kind::Lambda || k == Token::Kind::KwFun || k == Token::Kind::KwLet;
  }

  bool starts_prefix() const {
    if (at_stop()) return false;
    switch (peek().kind) {
      case Token::Kind::Ident:
      case Token::Kind::LParen:
      case Token::Kind::KwApply:
      case Token::Kind::KwLift:
      case Token::Kind::KwForce:
      case Token::Kind::KwReverse:
      case Token::Kind::KwControlled:
      case Token::Kind::KwBox:
      case Token::Kind::KwWithComputed: return true;
      default: return false;
    }
  }

  TermPtr term() {
    if (!at_stop()) {
      if (peek().kind == Token::Kind::Lambda || peek().kind == Token::Kind::KwFun) return lambda();
      if (peek().kind == Token::Kind::KwLet) return let();
    }
    return app();
  }

  TermPtr lambda() {
    const Token& kw = next();
    bool fun = kw.kind == Token::Kind::KwFun;
    Span span = kw.span;
    std::vector<std::pair<std::string, TypePtr>> params;
    do {
      params.push_back(binder());
    } while (!at_stop() && (peek().kind == Token::Kind::Ident || peek().kind == Token::Kind::LParen));
    if (fun) {
      const Token& arrow = expect(Token::Kind::Arrow);
      if (arrow.text.rfind("->", 0) != 0 || arrow.mod)
        throw SourceError("E-PARSE", arrow.span, "expected '->' after fun parameters");
    } else {
      expect(Token::Kind::Dot);
    }
    for (const auto& p : params) bound_.push_back(p.first);
    TermPtr body = term();
    bound_.resize(bound_.size() - params.size());
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      body = Term::lambda(it->first, body, it->second, span);
    return body;
  }

  TermPtr let() {
    Span span = next().span;
    if (!at_stop() && peek().kind == Token::Kind::LParen) {
      next();
      std::string x = expect(Token::Kind::Ident).text;
      expect(Token::Kind::Comma);
      std::string y = expect(Token::Kind::Ident).text;
      expect(Token::Kind::RParen);
      if (x == y) throw SourceError("E-PARSE", span, "let binds '" + x + "' twice");
      expect(Token::Kind::Equals);
      TermPtr bound = term();
      expect(Token::Kind::KwIn);
      bound_.push_back(x);
      bound_.push_back(y);
      TermPtr body = term();
      bound_.resize(bound_.size() - 2);
      return Term::let_pair(x, y, bound, body, span);
    }
    std::string x = expect(Token::Kind::Ident).text;
    expect(Token::Kind::Equals);
    TermPtr bound = term();
    expect(Token::Kind::KwIn);
    bound_.push_back(x);
    TermPtr body = term();
    bound_.pop_back();
    return Term::app(Term::lambda(x, body, nullptr, span), bound, span);
  }

  TermPtr app() {
    TermPtr f = prefix();
    for (;;) {
      if (starts_binding_form()) return Term::app(f, term(), f->span);
      if (!starts_prefix()) return f;
      f = Term::app(f, prefix(), f->span);
    }
  }

  TermPtr arg() {
    if (starts_binding_form()) return term();
    return prefix();
  }

  TermPtr prefix() {
    if (at_stop()) fail({Token::Kind::Ident, Token::Kind::LParen});
    const Token& t = peek();
    Span span = t.span;
    switch (t.kind) {
      case Token::Kind::KwLift: next(); return Term::lift(arg(), span);
      case Token::Kind::KwForce: next(); return Term::force(arg(), span);
      case Token::Kind::KwReverse: next(); return Term::reverse(arg(), span);
      case Token::Kind::KwControlled: {
        next();
        ControlSpec k = ControlSpec::black();
        if (!at_stop() && peek().kind == Token::Kind::CtrlSpec) {
          k.gadgets.clear();
          for (char c : next().text)
            k.gadgets.push_back({c == '+' ? Polarity::Black : Polarity::White});
        }
        return Term::controlled(k, arg(), span);
      }
      case Token::Kind::KwBox: {
        next();
        Span ts = peek().span;
        SimpleType s = simple(atom_type(), ts);
        return Term::box(s, arg(), span);
      }
      case Token::Kind::KwWithComputed: {
        next();
        TermPtr m = arg();
        TermPtr n = arg();
        return Term::with_computed(m, n, span);
      }
      default: return atom();
    }
  }

  TermPtr atom() {
    if (at_stop()) fail({Token::Kind::Ident, Token::Kind::LParen});
    const Token& t = peek();
    Span span = t.span;
    switch (t.kind) {
      case Token::Kind::Ident: {
        next();
        bool is_bound = std::find(bound_.rbegin(), bound_.rend(), t.text) != bound_.rend();
        return is_bound ? Term::var(t.text, span) : Term::constant(t.text, span);
      }
      case Token::Kind::KwApply: {
        next();
        expect(Token::Kind::LParen);
        TermPtr m = term();
        expect(Token::Kind::Comma);
        TermPtr n = term();
        expect(Token::Kind::RParen);
        return Term::apply(m, n, span);
      }
      case Token::Kind::LParen: {
        next();
        if (!at_stop() && peek().kind == Token::Kind::RParen) {
          next();
          return Term::unit(span);
        }
        std::vector<TermPtr> items{term()};
        while (!at_stop() && peek().kind == Token::Kind::Comma) {
          next();
          items.push_back(term());
        }
        if (at_stop() || peek().kind != Token::Kind::RParen)
          fail({Token::Kind::Comma, Token::Kind::RParen});
        next();
        TermPtr out = items.back();
        for (auto it = items.rbegin() + 1; it != items.rend(); ++it)
          out = Term::pair(*it, out, (*it)->span);
        if (items.size() > 1) {
          // The outermost pair starts at the parenthesis.
          Term copy = *out;
          copy.span = span;
          out = std::make_shared<const Term>(std::move(copy));
        }
        return out;
      }
      default:
        fail({Token::Kind::Ident, Token::Kind::LParen, Token::Kind::KwApply});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool layout_;
  std::vector<std::string> bound_;
};

}  // namespace

Program parse_program(std::string_view source) { return Parser(tokenize(source), true).program(); }

TermPtr parse_term(std::string_view source, const std::vector<std::string>& bound) {
  return Parser(tokenize(source), false).whole_term(bound);
}

TypePtr parse_type(std::string_view source) { return Parser(tokenize(source), false).whole_type(); }

}  // namespace pqc
