#include "cvd/expression.hpp"

#include <cctype>
#include <vector>

namespace cvd {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Number, Imag, Quad, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  int mode = 0;
  bool is_p = false;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= s_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        t.kind = Tok::Number;
        t.text = read_number();
        if (pos_ < s_.size() && s_[pos_] == 'i' && !ident_follows(pos_ + 1)) {
          advance();
          t.kind = Tok::Imag;
        }
      } else if (c == 'X' || c == 'P' || c == 'x' || c == 'p') {
        advance();
        t.kind = Tok::Quad;
        t.is_p = (c == 'P' || c == 'p');
        if (pos_ < s_.size() && s_[pos_] == '_') advance();
        std::string digits;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          digits += s_[pos_];
          advance();
        }
        t.mode = digits.empty() ? 0 : std::stoi(digits);
      } else if (c == 'i' && !ident_follows(pos_ + 1)) {
        advance();
        t.kind = Tok::Imag;
        t.text = "1";
      } else {
        switch (c) {
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case '*': t.kind = Tok::Star; break;
          case '/': t.kind = Tok::Slash; break;
          case '^': t.kind = Tok::Caret; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
        advance();
      }
      out.push_back(t);
    }
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
  }
  bool ident_follows(std::size_t at) const {
    return at < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[at])) || s_[at] == '_');
  }
  std::string read_digits() {
    std::string d;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      d += s_[pos_];
      advance();
    }
    return d;
  }
  // 12, 1.5, 1e-3, 3/4 (a rational literal is one token)
  std::string read_number() {
    int line = line_, col = col_;
    std::string t = read_digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      t += '.';
      advance();
      t += read_digits();
    }
    if (t == ".") throw ParseError("malformed number", line, col);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      int sl = line_, sc = col_;
      std::string e = "e";
      advance();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        e += s_[pos_];
        advance();
      }
      std::string d = read_digits();
      if (d.empty()) {
        pos_ = save;
        line_ = sl;
        col_ = sc;
      } else {
        t += e + d;
      }
    }
    if (pos_ + 1 < s_.size() && s_[pos_] == '/' &&
        std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) && t.find_first_of(".eE") == std::string::npos) {
      advance();
      t += '/';
      t += read_digits();
    }
    return t;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, int n_modes) : toks_(std::move(toks)), n_(n_modes) {}

  QuadPolynomial parse() {
    QuadPolynomial q = expr();
    if (peek().kind != Tok::End) fail("unexpected trailing input");
    return q;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }
  bool starts_atom() const {
    Tok k = peek().kind;
    return k == Tok::Number || k == Tok::Imag || k == Tok::Quad || k == Tok::LParen;
  }

  QuadPolynomial expr() {
    QuadPolynomial acc = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool minus = take().kind == Tok::Minus;
      QuadPolynomial rhs = term();
      if (minus)
        acc -= rhs;
      else
        acc += rhs;
    }
    return acc;
  }

  QuadPolynomial term() {
    QuadPolynomial acc = unary();
    while (true) {
      if (peek().kind == Tok::Star) {
        take();
        acc = acc * unary();
      } else if (peek().kind == Tok::Slash) {
        take();
        const Token& t = peek();
        if (t.kind != Tok::Number) fail("only division by a number is supported");
        Rational d = parse_rational(take().text);
        if (sgn(d) == 0) fail("division by zero");
        acc *= GaussRational(Rational(1) / d);
      } else if (starts_atom()) {
        acc = acc * power();
      } else {
        return acc;
      }
    }
  }

  QuadPolynomial unary() {
    if (peek().kind == Tok::Minus) {
      take();
      return -unary();
    }
    if (peek().kind == Tok::Plus) {
      take();
      return unary();
    }
    return power();
  }

  QuadPolynomial power() {
    QuadPolynomial base = atom();
    if (peek().kind == Tok::Caret) {
      take();
      const Token& t = peek();
      if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos)
        fail("exponent must be a non-negative integer");
      int e = std::stoi(take().text);
      base = cvd::power(base, e);
    }
    return base;
  }

  QuadPolynomial atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        take();
        return QuadPolynomial::scalar(GaussRational(parse_rational(t.text)), n_);
      }
      case Tok::Imag: {
        take();
        return QuadPolynomial::scalar(GaussRational(Rational(0), parse_rational(t.text)), n_);
      }
      case Tok::Quad: {
        take();
        return t.is_p ? QuadPolynomial::p(t.mode, n_) : QuadPolynomial::x(t.mode, n_);
      }
      case Tok::LParen: {
        take();
        QuadPolynomial inner = expr();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        take();
        return inner;
      }
      case Tok::End:
        fail("unexpected end of input");
      default:
        fail("unexpected token");
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int n_;
};

}  // namespace

QuadPolynomial parse_polynomial(const std::string& text, int min_modes) {
  std::vector<Token> toks = Lexer(text).run();
  int n = std::max(1, min_modes);
  for (const auto& t : toks)
    if (t.kind == Tok::Quad) n = std::max(n, t.mode + 1);
  return Parser(std::move(toks), n).parse();
}

}  // namespace cvd
