#pragma once

// The type language for coroutine composition.
//
// A type is one of: the empty type void, a concrete type (uppercase
// name), a type variable (lowercase name), a flat sequence, a tuple, a
// list of some element type with a symbolic length, a coroutine with a
// receiving and a yielding part, or a reference to a labeled coroutine.
//
// Values are immutable after construction and shared by pointer; every
// operation builds new nodes. Normal form: sequences are flattened,
// contain no void and at least two items; zero-length lists are void.

#include "corotype/length.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace corotype {

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct TypeExpr {
  enum class Kind { Void, Concrete, Var, Seq, Tuple, List, Coroutine, Ref };

  Kind kind = Kind::Void;
  std::string name;                 // Concrete, Var, Ref (target label)
  std::vector<TypePtr> items;       // Seq, Tuple
  TypePtr elem;                     // List element
  LenPtr len;                       // List length
  TypePtr recv, yld;                // Coroutine parts
  std::optional<std::string> label; // Coroutine declaration label
  bool starred = false;             // Coroutine restores itself when drained
};

inline TypePtr t_void() {
  static const TypePtr v = std::make_shared<TypeExpr>();
  return v;
}

inline TypePtr t_con(std::string name) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Concrete;
  t->name = std::move(name);
  return t;
}

inline TypePtr t_var(std::string name) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Var;
  t->name = std::move(name);
  return t;
}

inline TypePtr t_seq(std::vector<TypePtr> items) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Seq;
  t->items = std::move(items);
  return t;
}

inline TypePtr t_tuple(std::vector<TypePtr> items) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Tuple;
  t->items = std::move(items);
  return t;
}

inline TypePtr t_list(TypePtr elem, LenPtr len) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::List;
  t->elem = std::move(elem);
  t->len = std::move(len);
  return t;
}

inline TypePtr t_coroutine(TypePtr recv, TypePtr yld,
                           std::optional<std::string> label = std::nullopt,
                           bool starred = false) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Coroutine;
  t->recv = std::move(recv);
  t->yld = std::move(yld);
  t->label = std::move(label);
  t->starred = starred;
  return t;
}

inline TypePtr t_ref(std::string label) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Ref;
  t->name = std::move(label);
  return t;
}

inline bool is_void(const TypePtr& t) { return t->kind == TypeExpr::Kind::Void; }

// Structural equality. Coroutine labels and the starred flag are
// annotations, not structure, and do not participate.
inline bool equal(const TypePtr& x, const TypePtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  using K = TypeExpr::Kind;
  switch (x->kind) {
    case K::Void: return true;
    case K::Concrete:
    case K::Var:
    case K::Ref:
      return x->name == y->name;
    case K::Seq:
    case K::Tuple: {
      if (x->items.size() != y->items.size()) return false;
      for (std::size_t i = 0; i < x->items.size(); ++i)
        if (!equal(x->items[i], y->items[i])) return false;
      return true;
    }
    case K::List: return equal(x->elem, y->elem) && len_equal(x->len, y->len);
    case K::Coroutine: return equal(x->recv, y->recv) && equal(x->yld, y->yld);
  }
  return false;
}

// Flattens sequences, removes void items, unwraps singleton sequences,
// and turns zero-length or void-element lists into void. Idempotent.
inline TypePtr normalize(const TypePtr& t) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Void:
    case K::Concrete:
    case K::Var:
    case K::Ref:
      return t;
    case K::List: {
      TypePtr elem = normalize(t->elem);
      if (is_void(elem)) return t_void();
      if (t->len->kind == LengthExpr::Kind::Literal && t->len->value == 0)
        return t_void();
      return elem == t->elem ? t : t_list(elem, t->len);
    }
    case K::Tuple: {
      std::vector<TypePtr> items;
      items.reserve(t->items.size());
      bool changed = false;
      for (const auto& it : t->items) {
        TypePtr n = normalize(it);
        changed = changed || n != it;
        items.push_back(std::move(n));
      }
      return changed ? t_tuple(std::move(items)) : t;
    }
    case K::Coroutine: {
      TypePtr recv = normalize(t->recv);
      TypePtr yld = normalize(t->yld);
      if (recv == t->recv && yld == t->yld) return t;
      return t_coroutine(std::move(recv), std::move(yld), t->label, t->starred);
    }
    case K::Seq: {
      std::vector<TypePtr> out;
      out.reserve(t->items.size());
      for (const auto& it : t->items) {
        TypePtr n = normalize(it);
        if (is_void(n)) continue;
        if (n->kind == K::Seq)
          out.insert(out.end(), n->items.begin(), n->items.end());
        else
          out.push_back(std::move(n));
      }
      if (out.empty()) return t_void();
      if (out.size() == 1) return out[0];
      return t_seq(std::move(out));
    }
  }
  return t;
}

// Head of a type. The head of a sequence is the head of its first
// element; concrete types, variables, tuples, lists, coroutines and
// references are their own head. The empty type has no head.
inline TypePtr hd(const TypePtr& t) {
  if (is_void(t)) throw std::logic_error("hd of the empty type");
  if (t->kind == TypeExpr::Kind::Seq) return hd(t->items.front());
  return t;
}

// Tail of a type: what remains once the head is taken. Atoms, tuples,
// lists, coroutines and references leave nothing behind.
inline TypePtr tl(const TypePtr& t) {
  if (is_void(t)) throw std::logic_error("tl of the empty type");
  if (t->kind == TypeExpr::Kind::Seq) {
    std::vector<TypePtr> items;
    items.reserve(t->items.size());
    items.push_back(tl(t->items.front()));
    items.insert(items.end(), t->items.begin() + 1, t->items.end());
    return normalize(t_seq(std::move(items)));
  }
  return t_void();
}

// Complexity measure: void counts 0, every atom 1, a coroutine is the
// sum of its parts plus 1, sequences and tuples are the sum of their
// items, and a list counts its element plus 1 regardless of length so
// the measure stays finite under symbolic lengths.
inline std::uint64_t complexity(const TypePtr& t) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Void: return 0;
    case K::Concrete:
    case K::Var:
    case K::Ref:
      return 1;
    case K::Seq:
    case K::Tuple: {
      std::uint64_t sum = 0;
      for (const auto& it : t->items) sum += complexity(it);
      return sum;
    }
    case K::List: return complexity(t->elem) + 1;
    case K::Coroutine: return complexity(t->recv) + complexity(t->yld) + 1;
  }
  return 0;
}

inline LenPtr rename_length(const LenPtr& l, const std::string& suffix) {
  using K = LengthExpr::Kind;
  switch (l->kind) {
    case K::Var: return len_var(l->name + suffix);
    case K::Dec: return len_dec(rename_length(l->a, suffix));
    case K::Min:
      return len_min(rename_length(l->a, suffix), rename_length(l->b, suffix));
    default: return l;
  }
}

// Suffixes every type variable and length variable so that two
// instances of the same declared type never share a variable. Labels,
// references and concrete names are untouched.
inline TypePtr rename(const TypePtr& t, const std::string& suffix) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Void:
    case K::Concrete:
    case K::Ref:
      return t;
    case K::Var: return t_var(t->name + suffix);
    case K::Seq:
    case K::Tuple: {
      std::vector<TypePtr> items;
      items.reserve(t->items.size());
      for (const auto& it : t->items) items.push_back(rename(it, suffix));
      return t->kind == K::Seq ? t_seq(std::move(items))
                               : t_tuple(std::move(items));
    }
    case K::List:
      return t_list(rename(t->elem, suffix), rename_length(t->len, suffix));
    case K::Coroutine:
      return t_coroutine(rename(t->recv, suffix), rename(t->yld, suffix),
                         t->label, t->starred);
  }
  return t;
}

namespace detail {

struct NameBijection {
  // forward and reverse maps keep the correspondence one-to-one
  std::vector<std::pair<std::string, std::string>> typeVars, lenVars;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> fresh;

  template <typename T, typename Vec>
  static bool bind(Vec& vec, const T& a, const T& b) {
    for (const auto& [x, y] : vec) {
      if (x == a) return y == b;
      if (y == b) return false;
    }
    vec.emplace_back(a, b);
    return true;
  }
};

inline bool shape_equal_len(const LenPtr& x, const LenPtr& y, NameBijection& m) {
  if (x->kind != y->kind) return false;
  using K = LengthExpr::Kind;
  switch (x->kind) {
    case K::Literal: return x->value == y->value;
    case K::Var: return NameBijection::bind(m.lenVars, x->name, y->name);
    case K::Fresh: return NameBijection::bind(m.fresh, x->freshId, y->freshId);
    case K::Dec: return shape_equal_len(x->a, y->a, m);
    case K::Min:
      return shape_equal_len(x->a, y->a, m) && shape_equal_len(x->b, y->b, m);
    case K::Star: return true;
  }
  return false;
}

inline bool shape_equal(const TypePtr& x, const TypePtr& y, NameBijection& m) {
  if (x->kind != y->kind) return false;
  using K = TypeExpr::Kind;
  switch (x->kind) {
    case K::Void: return true;
    case K::Concrete:
    case K::Ref:
      return x->name == y->name;
    case K::Var: return NameBijection::bind(m.typeVars, x->name, y->name);
    case K::Seq:
    case K::Tuple: {
      if (x->items.size() != y->items.size()) return false;
      for (std::size_t i = 0; i < x->items.size(); ++i)
        if (!shape_equal(x->items[i], y->items[i], m)) return false;
      return true;
    }
    case K::List:
      return shape_equal(x->elem, y->elem, m) && shape_equal_len(x->len, y->len, m);
    case K::Coroutine:
      return shape_equal(x->recv, y->recv, m) && shape_equal(x->yld, y->yld, m);
  }
  return false;
}

}  // namespace detail

// Structural equality up to a consistent renaming of type variables,
// length variables and fresh symbols. Distinguishes nonlinear patterns:
// (x, x) is not shape-equal to (x, y).
inline bool equal_up_to_var_names(const TypePtr& x, const TypePtr& y) {
  detail::NameBijection m;
  return detail::shape_equal(x, y, m);
}

// Collects variable names occurring anywhere in a type, split between
// type variables and length variables. Used for hygiene checks.
inline void collect_var_names(const TypePtr& t, std::set<std::string>& typeVars,
                              std::set<std::string>& lenVars) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Var: typeVars.insert(t->name); break;
    case K::Seq:
    case K::Tuple:
      for (const auto& it : t->items) collect_var_names(it, typeVars, lenVars);
      break;
    case K::List: {
      collect_var_names(t->elem, typeVars, lenVars);
      // walk the length expression for variables
      std::vector<LenPtr> stack{t->len};
      while (!stack.empty()) {
        LenPtr l = stack.back();
        stack.pop_back();
        if (l->kind == LengthExpr::Kind::Var) lenVars.insert(l->name);
        if (l->a) stack.push_back(l->a);
        if (l->b) stack.push_back(l->b);
      }
      break;
    }
    case K::Coroutine:
      collect_var_names(t->recv, typeVars, lenVars);
      collect_var_names(t->yld, typeVars, lenVars);
      break;
    default: break;
  }
}

}  // namespace corotype
