#pragma once

// Concrete syntax for type expressions and programs.
//
//   program   := (line NEWLINE)* ; line := decl | comment | empty
//   decl      := [IDENT ['*'] ':'] type
//   type      := coroutine | seq | tuple | list | atom
//   coroutine := '<' type ';' type '>'
//   seq       := '[' type (',' type)* ']'
//   tuple     := '(' type (',' type)+ ')'
//   list      := (atom | tuple) '^' (length | '*')
//   length    := NAT | LIDENT | 'dec' '(' length ')'
//                | 'min' '(' length ',' length ')'
//   atom      := UIDENT | LIDENT | '@' IDENT | 'void'
//
// Identifiers starting with an uppercase letter are concrete types,
// lowercase ones are variables. '#' starts a comment. Programs list one
// declaration per line, in activation order. Fresh symbols print as
// Greek letters with a generation counter; they re-parse as ordinary
// length variables, which is the one lossy corner of the round trip.

#include "corotype/program.hpp"
#include "corotype/types.hpp"

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace corotype {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) +
                           ": " + msg),
        line(line_),
        col(col_) {}
};

namespace detail {

struct Token {
  enum class Type {
    LAngle, RAngle, Semi, LBracket, RBracket, LParen, RParen,
    Comma, Caret, Colon, Star, At, Nat, UIdent, LIdent, KwVoid, End,
  };
  Type type = Type::End;
  std::string text;
  std::uint64_t nat = 0;
  int line = 1, col = 1;
};

inline bool ident_start_lower(unsigned char c) {
  return (c >= 'a' && c <= 'z') || c >= 0x80;  // non-ASCII reads as lowercase
}
inline bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

inline std::vector<Token> lex(std::string_view text, int startLine) {
  std::vector<Token> out;
  int line = startLine, col = 1;
  std::size_t i = 0;
  auto push = [&](Token::Type type, std::string lexeme, int l, int c) {
    Token t;
    t.type = type;
    t.text = std::move(lexeme);
    t.line = l;
    t.col = c;
    out.push_back(std::move(t));
  };
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (c == ' ' || c == '\t' || c == '\r') { ++col; ++i; continue; }
    if (c == '#') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') { ++i; ++col; }
      continue;
    }
    const int tl = line, tc = col;
    switch (c) {
      case '<': push(Token::Type::LAngle, "<", tl, tc); ++i; ++col; continue;
      case '>': push(Token::Type::RAngle, ">", tl, tc); ++i; ++col; continue;
      case ';': push(Token::Type::Semi, ";", tl, tc); ++i; ++col; continue;
      case '[': push(Token::Type::LBracket, "[", tl, tc); ++i; ++col; continue;
      case ']': push(Token::Type::RBracket, "]", tl, tc); ++i; ++col; continue;
      case '(': push(Token::Type::LParen, "(", tl, tc); ++i; ++col; continue;
      case ')': push(Token::Type::RParen, ")", tl, tc); ++i; ++col; continue;
      case ',': push(Token::Type::Comma, ",", tl, tc); ++i; ++col; continue;
      case '^': push(Token::Type::Caret, "^", tl, tc); ++i; ++col; continue;
      case ':': push(Token::Type::Colon, ":", tl, tc); ++i; ++col; continue;
      case '*': push(Token::Type::Star, "*", tl, tc); ++i; ++col; continue;
      case '@': push(Token::Type::At, "@", tl, tc); ++i; ++col; continue;
      default: break;
    }
    if (std::isdigit(c)) {
      std::uint64_t n = 0;
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        n = n * 10 + static_cast<std::uint64_t>(text[i] - '0');
        ++i;
        ++col;
      }
      Token t;
      t.type = Token::Type::Nat;
      t.nat = n;
      t.text = std::string(text.substr(start, i - start));
      t.line = tl;
      t.col = tc;
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(c) || c >= 0x80) {
      std::size_t start = i;
      bool lower = ident_start_lower(c);
      while (i < text.size() && ident_char(static_cast<unsigned char>(text[i]))) {
        ++i;
        ++col;
      }
      std::string word(text.substr(start, i - start));
      if (word == "void")
        push(Token::Type::KwVoid, std::move(word), tl, tc);
      else
        push(lower ? Token::Type::LIdent : Token::Type::UIdent,
             std::move(word), tl, tc);
      continue;
    }
    throw ParseError(tl, tc, std::string("unexpected character '") +
                                 static_cast<char>(c) + "'");
  }
  Token end;
  end.type = Token::Type::End;
  end.line = line;
  end.col = col;
  out.push_back(std::move(end));
  return out;
}

class TypeParser {
 public:
  explicit TypeParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  TypePtr parse_full_type() {
    TypePtr t = parse_type();
    expect_end();
    return t;
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  void expect_end() {
    if (peek().type != Token::Type::End)
      fail("unexpected trailing input '" + peek().text + "'");
  }

  TypePtr parse_type() {
    TypePtr base = parse_primary();
    if (peek().type != Token::Type::Caret) return base;
    const Token& caret = take();
    switch (base->kind) {
      case TypeExpr::Kind::Seq:
        throw ParseError(caret.line, caret.col,
                         "cannot apply '^' to a sequence");
      case TypeExpr::Kind::Coroutine:
        throw ParseError(caret.line, caret.col,
                         "cannot apply '^' to a coroutine");
      case TypeExpr::Kind::List:
        throw ParseError(caret.line, caret.col, "cannot apply '^' to a list");
      default: break;
    }
    LenPtr len;
    if (peek().type == Token::Type::Star) {
      take();
      len = len_star();
    } else {
      len = parse_length();
    }
    TypePtr list = t_list(std::move(base), std::move(len));
    if (peek().type == Token::Type::Caret)
      fail("cannot apply '^' to a list");
    return list;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(peek().line, peek().col, msg);
  }

  Token expect(Token::Type type, const char* what) {
    if (peek().type != type)
      fail(std::string("expected ") + what + " before '" + peek().text + "'");
    return take();
  }

  TypePtr parse_primary() {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::KwVoid: take(); return t_void();
      case Token::Type::UIdent: return t_con(take().text);
      case Token::Type::LIdent: return t_var(take().text);
      case Token::Type::At: {
        take();
        const Token& name = peek();
        if (name.type != Token::Type::UIdent && name.type != Token::Type::LIdent)
          fail("expected a label after '@'");
        return t_ref(take().text);
      }
      case Token::Type::LAngle: {
        take();
        TypePtr recv = parse_type();
        expect(Token::Type::Semi, "';' in coroutine type");
        TypePtr yld = parse_type();
        expect(Token::Type::RAngle, "'>' closing coroutine type");
        return t_coroutine(std::move(recv), std::move(yld));
      }
      case Token::Type::LBracket: {
        take();
        std::vector<TypePtr> items;
        items.push_back(parse_type());
        while (peek().type == Token::Type::Comma) {
          take();
          items.push_back(parse_type());
        }
        expect(Token::Type::RBracket, "']' closing sequence");
        return t_seq(std::move(items));
      }
      case Token::Type::LParen: {
        const Token open = take();
        std::vector<TypePtr> items;
        items.push_back(parse_type());
        while (peek().type == Token::Type::Comma) {
          take();
          items.push_back(parse_type());
        }
        expect(Token::Type::RParen, "')' closing tuple");
        if (items.size() < 2)
          throw ParseError(open.line, open.col,
                           "a tuple needs at least two components");
        return t_tuple(std::move(items));
      }
      default:
        fail("expected a type before '" + t.text + "'");
    }
  }

  LenPtr parse_length() {
    const Token& t = peek();
    if (t.type == Token::Type::Nat) return len_lit(take().nat);
    if (t.type == Token::Type::LIdent) {
      // dec/min act as functions only when applied; bare they are
      // ordinary length variables
      if (t.text == "dec" && tokens_[pos_ + 1].type == Token::Type::LParen) {
        take();
        take();
        LenPtr inner = parse_length();
        expect(Token::Type::RParen, "')' closing dec");
        return len_dec(std::move(inner));
      }
      if (t.text == "min" && tokens_[pos_ + 1].type == Token::Type::LParen) {
        take();
        take();
        LenPtr lhs = parse_length();
        expect(Token::Type::Comma, "',' in min");
        LenPtr rhs = parse_length();
        expect(Token::Type::RParen, "')' closing min");
        return len_min(std::move(lhs), std::move(rhs));
      }
      return len_var(take().text);
    }
    fail("expected a length before '" + t.text + "'");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline void collect_ref_labels(const TypePtr& t, std::vector<std::string>& out) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Ref: out.push_back(t->name); break;
    case K::Seq:
    case K::Tuple:
      for (const auto& it : t->items) collect_ref_labels(it, out);
      break;
    case K::List: collect_ref_labels(t->elem, out); break;
    case K::Coroutine:
      collect_ref_labels(t->recv, out);
      collect_ref_labels(t->yld, out);
      break;
    default: break;
  }
}

}  // namespace detail

// Parses a single type expression; the result is in normal form.
inline TypePtr parse_type(std::string_view text) {
  detail::TypeParser parser(detail::lex(text, 1));
  return normalize(parser.parse_full_type());
}

// Parses a program, one declaration per line. Labels must be unique,
// every '@label' reference must resolve to a labeled declaration, and
// labels (and stars) attach only to coroutine declarations.
inline Program parse_program(std::string_view text) {
  Program program;
  std::vector<std::string> labels;
  int lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++lineNo;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::vector<detail::Token> tokens = detail::lex(line, lineNo);
    if (tokens.front().type == detail::Token::Type::End) continue;

    Declaration decl;
    using T = detail::Token::Type;
    bool labeled =
        (tokens[0].type == T::UIdent || tokens[0].type == T::LIdent) &&
        (tokens[1].type == T::Colon ||
         (tokens[1].type == T::Star && tokens[2].type == T::Colon));
    std::size_t skip = 0;
    if (labeled) {
      decl.label = tokens[0].text;
      decl.starred = tokens[1].type == T::Star;
      skip = decl.starred ? 3 : 2;
    }
    detail::TypeParser parser(
        std::vector<detail::Token>(tokens.begin() + skip, tokens.end()));
    TypePtr type = normalize(parser.parse_full_type());
    if (decl.label) {
      if (type->kind != TypeExpr::Kind::Coroutine)
        throw ParseError(tokens[0].line, tokens[0].col,
                         "label '" + *decl.label +
                             "' is attached to a non-coroutine declaration");
      for (const auto& known : labels)
        if (known == *decl.label)
          throw ParseError(tokens[0].line, tokens[0].col,
                           "duplicate label '" + *decl.label + "'");
      labels.push_back(*decl.label);
      type = t_coroutine(type->recv, type->yld, decl.label, decl.starred);
    }
    decl.type = std::move(type);
    program.decls.push_back(std::move(decl));
  }

  std::vector<std::string> refs;
  for (const auto& decl : program.decls)
    detail::collect_ref_labels(decl.type, refs);
  for (const auto& r : refs) {
    bool found = false;
    for (const auto& known : labels) found = found || known == r;
    if (!found)
      throw ParseError(1, 1, "unresolved label reference '@" + r + "'");
  }
  return program;
}

// Fresh symbols render as Greek letters; the counter past omega rolls
// into a generation suffix, so ids 0, 1, 24 print as α0, β0, α1.
inline std::string fresh_name(std::uint64_t id) {
  static const char* const kGreek[24] = {
      "α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ",
      "ν", "ξ", "ο", "π", "ρ", "σ", "τ", "υ", "φ", "χ", "ψ", "ω"};
  return std::string(kGreek[id % 24]) + std::to_string(id / 24);
}

inline std::string print_length(const LenPtr& l) {
  using K = LengthExpr::Kind;
  switch (l->kind) {
    case K::Literal: return std::to_string(l->value);
    case K::Var: return l->name;
    case K::Fresh: return fresh_name(l->freshId);
    case K::Dec: return "dec(" + print_length(l->a) + ")";
    case K::Min:
      return "min(" + print_length(l->a) + ", " + print_length(l->b) + ")";
    case K::Star: return "*";
  }
  return "?";
}

// Canonical rendering; parse_type(print_type(t)) reproduces t for every
// printable type (fresh symbols re-parse as length variables).
inline std::string print_type(const TypePtr& t) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Void: return "void";
    case K::Concrete:
    case K::Var:
      return t->name;
    case K::Ref: return "@" + t->name;
    case K::Seq:
    case K::Tuple: {
      std::string out(t->kind == K::Seq ? "[" : "(");
      for (std::size_t i = 0; i < t->items.size(); ++i) {
        if (i) out += ", ";
        out += print_type(t->items[i]);
      }
      out += t->kind == K::Seq ? "]" : ")";
      return out;
    }
    case K::List: return print_type(t->elem) + "^" + print_length(t->len);
    case K::Coroutine:
      return "<" + print_type(t->recv) + " ; " + print_type(t->yld) + ">";
  }
  return "?";
}

}  // namespace corotype
