#include "sexpr.hpp"

#include <cctype>

namespace relavi {

const Sexpr& Sexpr::at(std::size_t i) const {
  if (i >= items.size())
    throw ParseError("expected at least " + std::to_string(i + 1) + " elements", line, col);
  return items[i];
}

namespace {

struct Token {
  std::string text;
  int line, col;
  bool open = false, close = false;
};

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') { ++line; col = 1; } else { ++col; }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ';') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') { advance(text[i]); ++i; }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) { advance(c); ++i; continue; }
    if (c == '(' || c == ')') {
      out.push_back({std::string(1, c), line, col, c == '(', c == ')'});
      advance(c); ++i;
      continue;
    }
    int tl = line, tc = col;
    std::string tok;
    while (i < text.size()) {
      char d = text[i];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      tok.push_back(d);
      advance(d); ++i;
    }
    // "-folder" → '-' 'folder'; names never start with '-' in this subset
    if (tok.size() > 1 && tok[0] == '-' &&
        std::isalpha(static_cast<unsigned char>(tok[1]))) {
      out.push_back({"-", tl, tc});
      out.push_back({tok.substr(1), tl, tc + 1});
    } else {
      out.push_back({tok, tl, tc});
    }
  }
  return out;
}

Sexpr parse_one(const std::vector<Token>& toks, std::size_t& pos) {
  const Token& t = toks[pos];
  if (t.close) throw ParseError("unexpected ')'", t.line, t.col);
  if (t.open) {
    Sexpr list;
    list.line = t.line;
    list.col = t.col;
    ++pos;
    while (true) {
      if (pos >= toks.size()) throw ParseError("unbalanced '(': missing ')'", t.line, t.col);
      if (toks[pos].close) { ++pos; return list; }
      list.items.push_back(parse_one(toks, pos));
    }
  }
  Sexpr atom;
  atom.is_atom = true;
  atom.text = t.text;
  atom.line = t.line;
  atom.col = t.col;
  ++pos;
  return atom;
}

}  // namespace

std::vector<Sexpr> parse_sexprs(const std::string& text) {
  auto toks = lex(text);
  std::vector<Sexpr> out;
  std::size_t pos = 0;
  while (pos < toks.size()) out.push_back(parse_one(toks, pos));
  return out;
}

}  // namespace relavi
