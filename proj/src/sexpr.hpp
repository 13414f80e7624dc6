#pragma once

#include <string>
#include <vector>

#include "relavi/errors.hpp"

namespace relavi {

// Minimal s-expression reader for the PPDDL subset. Tokenization is
// whitespace-insensitive; a leading '-' glued to a name (the source's
// "?x -folder" spacing) is split into a separate '-' token.
struct Sexpr {
  bool is_atom = false;
  std::string text;          // atoms only
  std::vector<Sexpr> items;  // lists only
  int line = 0, col = 0;

  bool is_list() const { return !is_atom; }
  const Sexpr& at(std::size_t i) const;
  std::size_t size() const { return items.size(); }
};

std::vector<Sexpr> parse_sexprs(const std::string& text);

}  // namespace relavi
