#pragma once

// A program is an ordered list of coroutine declarations; the order is
// the activation order used by composition.

#include "corotype/types.hpp"

#include <optional>
#include <vector>

namespace corotype {

struct Declaration {
  std::optional<std::string> label;
  bool starred = false;
  TypePtr type;
};

struct Program {
  std::vector<Declaration> decls;
};

}  // namespace corotype
