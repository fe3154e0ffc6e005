#pragma once

// Matching an offered type against a receiving pattern.
//
// Variables occurring in the pattern are binding sites; variables in
// the offered type are rigid. A successful match returns the bindings
// that make the pattern equal to the offer; failure is the absorbing
// bottom value, never an exception.

#include "corotype/types.hpp"

#include <map>

namespace corotype {

// Conditions produced by match: a variable-to-type map plus a
// length-variable-to-length map, or the absorbing bottom.
struct Bindings {
  bool bottom = false;
  std::map<std::string, TypePtr> types;
  std::map<std::string, LenPtr> lengths;

  static Bindings bot() {
    Bindings b;
    b.bottom = true;
    return b;
  }
  bool is_bottom() const { return bottom; }
  bool empty() const { return !bottom && types.empty() && lengths.empty(); }
};

// Mints fresh length symbols. One source is scoped to each composition
// so that runs are independent and deterministic.
struct FreshSource {
  std::uint64_t next = 0;
  LenPtr mint() { return len_fresh(next++); }
};

inline LenPtr substitute_length(const LenPtr& l, const Bindings& d);
inline TypePtr substitute(const TypePtr& t, const Bindings& d);

// Union of two conditions. Bottom absorbs; binding the same name to
// two different values collapses the result to bottom. Incoming values
// are resolved against the accumulated bindings so that no bound value
// refers to a variable bound by the same result.
inline Bindings merge(const Bindings& lhs, const Bindings& rhs) {
  if (lhs.bottom || rhs.bottom) return Bindings::bot();
  Bindings out = lhs;
  for (const auto& [name, value] : rhs.types) {
    TypePtr v = out.empty() ? value : substitute(value, out);
    auto it = out.types.find(name);
    if (it != out.types.end()) {
      if (!equal(it->second, v)) return Bindings::bot();
    } else if (!(v->kind == TypeExpr::Kind::Var && v->name == name)) {
      out.types.emplace(name, std::move(v));
    }
  }
  for (const auto& [name, value] : rhs.lengths) {
    LenPtr v = out.empty() ? value : substitute_length(value, out);
    auto it = out.lengths.find(name);
    if (it != out.lengths.end()) {
      if (!len_equal(it->second, v)) return Bindings::bot();
    } else if (!(v->kind == LengthExpr::Kind::Var && v->name == name)) {
      out.lengths.emplace(name, std::move(v));
    }
  }
  return out;
}

namespace detail {

inline LenPtr subst_len(const LenPtr& l, const Bindings& d) {
  using K = LengthExpr::Kind;
  switch (l->kind) {
    case K::Var: {
      auto it = d.lengths.find(l->name);
      return it != d.lengths.end() ? it->second : l;
    }
    case K::Dec: return len_dec(subst_len(l->a, d));
    case K::Min: return len_min(subst_len(l->a, d), subst_len(l->b, d));
    default: return l;
  }
}

inline TypePtr subst_type(const TypePtr& t, const Bindings& d) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Void:
    case K::Concrete:
    case K::Ref:
      return t;
    case K::Var: {
      auto it = d.types.find(t->name);
      return it != d.types.end() ? it->second : t;
    }
    case K::Seq:
    case K::Tuple: {
      std::vector<TypePtr> items;
      items.reserve(t->items.size());
      for (const auto& it : t->items) items.push_back(subst_type(it, d));
      return t->kind == K::Seq ? t_seq(std::move(items))
                               : t_tuple(std::move(items));
    }
    case K::List:
      return t_list(subst_type(t->elem, d),
                    eval_length(subst_len(t->len, d)));
    case K::Coroutine:
      // bindings from a coroutine's receiving part propagate into the
      // coroutines it later yields
      return t_coroutine(subst_type(t->recv, d), subst_type(t->yld, d),
                         t->label, t->starred);
  }
  return t;
}

}  // namespace detail

// Substitutes bound variables after evaluating length arithmetic that
// became ground. Throws EvalError when a length reduces to dec(0).
inline LenPtr substitute_length(const LenPtr& l, const Bindings& d) {
  if (d.bottom) throw std::logic_error("substitute with bottom bindings");
  return eval_length(detail::subst_len(l, d));
}

// Applies bindings throughout a type, evaluates lengths that became
// ground, and renormalizes. Throws EvalError when evaluation fails.
inline TypePtr substitute(const TypePtr& t, const Bindings& d) {
  if (d.bottom) throw std::logic_error("substitute with bottom bindings");
  return normalize(detail::subst_type(t, d));
}

// Unifies an offered length with a length pattern. A length variable
// in the pattern binds the offered length, where an indefinite offer
// is replaced by a freshly minted symbol. Anything else must be
// structurally equal after evaluation.
inline Bindings unify_length(const LenPtr& offered, const LenPtr& pattern,
                             FreshSource& fresh) {
  LenPtr off = eval_length(offered);
  if (pattern->kind == LengthExpr::Kind::Var) {
    Bindings b;
    LenPtr v = off->kind == LengthExpr::Kind::Star ? fresh.mint() : off;
    if (!(v->kind == LengthExpr::Kind::Var && v->name == pattern->name))
      b.lengths.emplace(pattern->name, std::move(v));
    return b;
  }
  return len_equal(off, eval_length(pattern)) ? Bindings{} : Bindings::bot();
}

// Matches an offered type against a pattern, both normalized. The
// result makes the pattern equal to the offer; a coroutine pattern
// matches only a coroutine, part by part. Sequence patterns require a
// sequence offer of the same arity and match componentwise; a single
// pending element is only ever matched against the head of a demand,
// which is never a sequence.
inline Bindings match(const TypePtr& offered, const TypePtr& pattern,
                      FreshSource& fresh) {
  using K = TypeExpr::Kind;
  switch (pattern->kind) {
    case K::Coroutine:
      if (offered->kind != K::Coroutine) return Bindings::bot();
      return merge(match(offered->recv, pattern->recv, fresh),
                   match(offered->yld, pattern->yld, fresh));
    case K::Var: {
      Bindings b;
      if (!(offered->kind == K::Var && offered->name == pattern->name))
        b.types.emplace(pattern->name, offered);
      return b;
    }
    case K::Void:
      return is_void(offered) ? Bindings{} : Bindings::bot();
    case K::Concrete:
      return (offered->kind == K::Concrete && offered->name == pattern->name)
                 ? Bindings{}
                 : Bindings::bot();
    case K::Ref:
      return (offered->kind == K::Ref && offered->name == pattern->name)
                 ? Bindings{}
                 : Bindings::bot();
    case K::Seq:
    case K::Tuple: {
      if (offered->kind != pattern->kind) return Bindings::bot();
      if (offered->items.size() != pattern->items.size()) return Bindings::bot();
      Bindings acc;
      for (std::size_t i = 0; i < pattern->items.size(); ++i) {
        acc = merge(acc, match(offered->items[i], pattern->items[i], fresh));
        if (acc.bottom) return acc;
      }
      return acc;
    }
    case K::List: {
      if (offered->kind != K::List) return Bindings::bot();
      Bindings elems = match(offered->elem, pattern->elem, fresh);
      if (elems.bottom) return elems;
      return merge(elems, unify_length(offered->len, pattern->len, fresh));
    }
  }
  return Bindings::bot();
}

// Convenience overload with a throwaway fresh source; fresh symbols
// then start at zero for every call.
inline Bindings match(const TypePtr& offered, const TypePtr& pattern) {
  FreshSource fresh;
  return match(offered, pattern, fresh);
}

}  // namespace corotype
