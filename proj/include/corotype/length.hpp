#pragma once

// Symbolic list-length expressions: literals, length variables, fresh
// symbols minted for indefinite lists, and the arithmetic forms dec/min.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

namespace corotype {

// Raised when length arithmetic cannot be carried out, e.g. dec(0).
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LengthExpr;
using LenPtr = std::shared_ptr<const LengthExpr>;

struct LengthExpr {
  enum class Kind { Literal, Var, Fresh, Dec, Min, Star };

  Kind kind = Kind::Literal;
  std::uint64_t value = 0;    // Literal
  std::string name;           // Var
  std::uint64_t freshId = 0;  // Fresh
  LenPtr a;                   // Dec operand, Min left
  LenPtr b;                   // Min right
};

inline LenPtr len_lit(std::uint64_t n) {
  auto e = std::make_shared<LengthExpr>();
  e->kind = LengthExpr::Kind::Literal;
  e->value = n;
  return e;
}

inline LenPtr len_var(std::string name) {
  auto e = std::make_shared<LengthExpr>();
  e->kind = LengthExpr::Kind::Var;
  e->name = std::move(name);
  return e;
}

inline LenPtr len_fresh(std::uint64_t id) {
  auto e = std::make_shared<LengthExpr>();
  e->kind = LengthExpr::Kind::Fresh;
  e->freshId = id;
  return e;
}

inline LenPtr len_dec(LenPtr inner) {
  auto e = std::make_shared<LengthExpr>();
  e->kind = LengthExpr::Kind::Dec;
  e->a = std::move(inner);
  return e;
}

inline LenPtr len_min(LenPtr lhs, LenPtr rhs) {
  auto e = std::make_shared<LengthExpr>();
  e->kind = LengthExpr::Kind::Min;
  e->a = std::move(lhs);
  e->b = std::move(rhs);
  return e;
}

inline LenPtr len_star() {
  static const LenPtr star = [] {
    auto e = std::make_shared<LengthExpr>();
    e->kind = LengthExpr::Kind::Star;
    return LenPtr(e);
  }();
  return star;
}

inline bool len_equal(const LenPtr& x, const LenPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  using K = LengthExpr::Kind;
  switch (x->kind) {
    case K::Literal: return x->value == y->value;
    case K::Var: return x->name == y->name;
    case K::Fresh: return x->freshId == y->freshId;
    case K::Dec: return len_equal(x->a, y->a);
    case K::Min: return len_equal(x->a, y->a) && len_equal(x->b, y->b);
    case K::Star: return true;
  }
  return false;
}

// Reduces ground arithmetic: dec(n) -> n-1 for n >= 1, min of two
// literals -> the smaller one. Symbolic forms are left intact, so the
// result of an already-irreducible expression is the expression itself.
inline LenPtr eval_length(const LenPtr& l) {
  using K = LengthExpr::Kind;
  switch (l->kind) {
    case K::Literal:
    case K::Var:
    case K::Fresh:
    case K::Star:
      return l;
    case K::Dec: {
      LenPtr inner = eval_length(l->a);
      if (inner->kind == K::Literal) {
        if (inner->value == 0) throw EvalError("dec applied to a zero length");
        return len_lit(inner->value - 1);
      }
      return inner == l->a ? l : len_dec(inner);
    }
    case K::Min: {
      LenPtr lhs = eval_length(l->a);
      LenPtr rhs = eval_length(l->b);
      if (lhs->kind == K::Literal && rhs->kind == K::Literal)
        return len_lit(lhs->value < rhs->value ? lhs->value : rhs->value);
      return (lhs == l->a && rhs == l->b) ? l : len_min(lhs, rhs);
    }
  }
  return l;
}

}  // namespace corotype
