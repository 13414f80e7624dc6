#include "relavi/feature.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace relavi {

std::string EnrichedPredicate::text() const {
  std::string out;
  if (modifier == PredModifier::min) out += "min-";
  else if (modifier == PredModifier::max) out += "max-";
  if (enrichment == GoalEnrichment::goal) out += "goal-";
  else if (enrichment == GoalEnrichment::correct) out += "correct-";
  out += base;
  if (modifier == PredModifier::closure) out += "+";
  return out;
}

std::vector<Name> FeatureExpr::free_vars() const {
  std::vector<Name> out;
  for (const auto& lit : literals)
    for (const auto& t : lit.atom.terms) {
      if (!t.is_var) continue;
      if (std::find(exists_vars.begin(), exists_vars.end(), t.name) != exists_vars.end()) continue;
      if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Concrete syntax
// ---------------------------------------------------------------------------

namespace {

struct FTok {
  enum Kind { ident, plus, lparen, rparen, comma, dot, amp, bang, end } kind;
  std::string text;
  int col;  // 1-based offset into the line
};

std::vector<FTok> flex(const std::string& text) {
  std::vector<FTok> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    int col = static_cast<int>(i) + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
              text[j] == '-'))
        ++j;
      out.push_back({FTok::ident, text.substr(i, j - i), col});
      i = j;
      continue;
    }
    switch (c) {
      case '+': out.push_back({FTok::plus, "+", col}); break;
      case '(': out.push_back({FTok::lparen, "(", col}); break;
      case ')': out.push_back({FTok::rparen, ")", col}); break;
      case ',': out.push_back({FTok::comma, ",", col}); break;
      case '.': out.push_back({FTok::dot, ".", col}); break;
      case '&': out.push_back({FTok::amp, "&", col}); break;
      case '!': out.push_back({FTok::bang, "!", col}); break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "' in feature", 1, col);
    }
    ++i;
  }
  out.push_back({FTok::end, "", static_cast<int>(text.size()) + 1});
  return out;
}

bool strip_prefix(std::string& s, const char* pre) {
  std::size_t n = std::strlen(pre);
  if (s.size() > n && s.compare(0, n, pre) == 0) {
    s.erase(0, n);
    return true;
  }
  return false;
}

// Analyzes "[min-|max-][goal-|correct-]base[+]". With a domain at hand,
// a prefix is only stripped when the remainder is a declared predicate,
// so predicates whose own names start with "goal-" etc. stay intact.
EnrichedPredicate analyze_pred_name(std::string tok, bool closure, const DomainDef* d, int col) {
  EnrichedPredicate ep;
  auto known = [&](const std::string& n) { return d == nullptr || d->find_predicate(n) != nullptr; };

  std::string rest = tok;
  PredModifier mod = PredModifier::none;
  if (strip_prefix(rest, "min-")) mod = PredModifier::min;
  else if (strip_prefix(rest, "max-")) mod = PredModifier::max;

  std::string rest2 = rest;
  GoalEnrichment g = GoalEnrichment::none;
  if (strip_prefix(rest2, "goal-")) g = GoalEnrichment::goal;
  else if (strip_prefix(rest2, "correct-")) g = GoalEnrichment::correct;

  if (d != nullptr) {
    // prefer the most-enriched reading whose base predicate exists
    if (!rest2.empty() && known(rest2)) { ep.base = rest2; ep.enrichment = g; ep.modifier = mod; }
    else if (!rest.empty() && known(rest)) { ep.base = rest; ep.modifier = mod; }
    else { ep.base = tok; }
  } else {
    ep.base = rest2;
    ep.enrichment = g;
    ep.modifier = mod;
  }
  if (closure) {
    if (ep.modifier != PredModifier::none)
      throw ParseError("cannot combine min-/max- with '+'", 1, col);
    ep.modifier = PredModifier::closure;
  }
  if (ep.base.empty()) throw ParseError("empty predicate name in feature", 1, col);
  return ep;
}

struct FeatureParser {
  const std::vector<FTok>& toks;
  std::size_t pos = 0;
  const std::set<Name>* constants;
  const DomainDef* domain;  // optional, for enriched-name resolution

  const FTok& peek() const { return toks[pos]; }
  FTok take() { return toks[pos++]; }
  [[noreturn]] void err(const std::string& msg) const {
    throw ParseError(msg, 1, peek().col);
  }

  FeatureExpr parse_expr() {
    FeatureExpr f;
    while (peek().kind == FTok::ident && peek().text == "exists") {
      take();
      if (peek().kind != FTok::ident) err("expected variable after 'exists'");
      f.exists_vars.push_back(take().text);
      if (peek().kind != FTok::dot) err("expected '.' after exists variable");
      take();
    }
    f.literals.push_back(parse_literal(f));
    while (peek().kind == FTok::amp) {
      take();
      f.literals.push_back(parse_literal(f));
    }
    if (peek().kind != FTok::end) err("unexpected trailing input in feature");
    return f;
  }

  FeatureLiteral parse_literal(const FeatureExpr& ctx) {
    FeatureLiteral lit;
    if (peek().kind == FTok::bang) { take(); lit.negated = true; }
    if (peek().kind != FTok::ident) err("expected predicate name");
    FTok name = take();
    bool closure = false;
    if (peek().kind == FTok::plus) { take(); closure = true; }
    lit.atom.pred = analyze_pred_name(name.text, closure, domain, name.col);
    if (peek().kind != FTok::lparen) err("expected '(' after predicate name");
    take();
    if (peek().kind != FTok::rparen) {
      while (true) {
        if (peek().kind != FTok::ident) err("expected term");
        FTok t = take();
        FTerm term;
        bool bound = std::find(ctx.exists_vars.begin(), ctx.exists_vars.end(), t.text) !=
                     ctx.exists_vars.end();
        term.is_var = bound || !constants->count(t.text);
        term.name = t.text;
        lit.atom.terms.push_back(term);
        if (peek().kind == FTok::comma) { take(); continue; }
        break;
      }
    }
    if (peek().kind != FTok::rparen) err("expected ')' or ','");
    take();
    return lit;
  }
};

}  // namespace

FeatureExpr parse_feature(const std::string& text, const std::set<Name>& known_constants) {
  auto toks = flex(text);
  FeatureParser p{toks, 0, &known_constants, nullptr};
  FeatureExpr f = p.parse_expr();
  auto fv = f.free_vars();
  if (fv.size() > 1) {
    std::string names;
    for (const auto& v : fv) names += (names.empty() ? "" : ", ") + v;
    throw ParseError("more than one free variable: " + names);
  }
  return f;
}

FeatureExpr parse_feature(const std::string& text, const ProblemInstance& inst,
                          std::size_t quantifier_bound) {
  std::set<Name> known(inst.universe.begin(), inst.universe.end());
  auto toks = flex(text);
  FeatureParser p{toks, 0, &known, inst.domain.get()};
  FeatureExpr f = p.parse_expr();
  auto violations = check_wellformed(f, *inst.domain, quantifier_bound);
  if (inst.goal.empty()) {
    for (const auto& lit : f.literals)
      if (lit.atom.pred.enrichment != GoalEnrichment::none)
        violations.push_back("goal-based enrichment '" + lit.atom.pred.text() +
                             "' is unavailable for a goal-free instance");
  }
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
    throw ParseError(msg);
  }
  return f;
}

std::string print_feature(const FeatureExpr& f) {
  std::string out;
  for (const auto& v : f.exists_vars) out += "exists " + v + " . ";
  for (std::size_t i = 0; i < f.literals.size(); ++i) {
    if (i) out += " & ";
    const auto& lit = f.literals[i];
    if (lit.negated) out += "!";
    out += lit.atom.pred.text() + "(";
    for (std::size_t j = 0; j < lit.atom.terms.size(); ++j) {
      if (j) out += ",";
      out += lit.atom.terms[j].name;
    }
    out += ")";
  }
  return out;
}

std::vector<std::string> check_wellformed(const FeatureExpr& f, const DomainDef& d,
                                          std::size_t quantifier_bound) {
  std::vector<std::string> out;
  if (f.literals.empty()) out.push_back("empty conjunction");
  for (const auto& lit : f.literals) {
    const auto& ep = lit.atom.pred;
    const PredicateDef* pd = d.find_predicate(ep.base);
    if (!pd) {
      out.push_back("unknown predicate '" + ep.base + "'");
      continue;
    }
    if (ep.modifier != PredModifier::none && pd->arity() != 2) {
      const char* mod = ep.modifier == PredModifier::closure ? "+"
                        : ep.modifier == PredModifier::min   ? "min-"
                                                             : "max-";
      out.push_back(std::string("'") + mod + "' requires arity 2, '" + ep.base + "' has arity " +
                    std::to_string(pd->arity()));
      continue;
    }
    std::size_t want = ep.effective_arity(pd->arity());
    if (lit.atom.terms.size() != want)
      out.push_back("'" + ep.text() + "' expects " + std::to_string(want) + " arguments, got " +
                    std::to_string(lit.atom.terms.size()));
  }
  if (f.free_vars().size() > 1) out.push_back("more than one free variable");
  if (f.quantifier_count() > quantifier_bound)
    out.push_back("quantifier bound exceeded (" + std::to_string(f.quantifier_count()) + " > " +
                  std::to_string(quantifier_bound) + ")");
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

std::set<std::pair<Name, Name>> transitive_closure(const std::set<std::pair<Name, Name>>& r) {
  std::set<std::pair<Name, Name>> out = r;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<Name, Name>> add;
    for (const auto& [a, b] : out)
      for (const auto& [c, d] : out)
        if (b == c && !out.count({a, d})) add.emplace_back(a, d);
    for (auto& p : add) changed |= out.insert(std::move(p)).second;
  }
  return out;
}

namespace {

using Tuple = std::vector<Name>;

struct RelationCache {
  const GroundState& s;
  const ProblemInstance& inst;
  std::map<EnrichedPredicate, std::set<Tuple>> cache;

  const std::set<Tuple>& get(const EnrichedPredicate& ep) {
    auto it = cache.find(ep);
    if (it != cache.end()) return it->second;

    std::set<Tuple> base;
    auto collect = [&](const std::vector<Atom>& atoms, bool require_in_state) {
      for (const Atom& a : atoms) {
        if (a.pred != ep.base) continue;
        if (require_in_state && !s.contains(a)) continue;
        base.insert(a.args);
      }
    };
    switch (ep.enrichment) {
      case GoalEnrichment::none: collect(s.atoms, false); break;
      case GoalEnrichment::goal: collect(inst.goal, false); break;
      case GoalEnrichment::correct: collect(inst.goal, true); break;
    }

    std::set<Tuple> result;
    switch (ep.modifier) {
      case PredModifier::none:
        result = std::move(base);
        break;
      case PredModifier::closure: {
        std::set<std::pair<Name, Name>> pairs;
        for (const Tuple& t : base)
          if (t.size() == 2) pairs.insert({t[0], t[1]});
        for (const auto& [a, b] : transitive_closure(pairs)) result.insert({a, b});
        break;
      }
      case PredModifier::min:
      case PredModifier::max: {
        std::set<Name> participants, with_pred, with_succ;
        for (const Tuple& t : base) {
          if (t.size() != 2) continue;
          participants.insert(t[0]);
          participants.insert(t[1]);
          with_succ.insert(t[0]);
          with_pred.insert(t[1]);
        }
        for (const Name& x : participants) {
          bool extremal = ep.modifier == PredModifier::min ? !with_pred.count(x)
                                                           : !with_succ.count(x);
          if (extremal) result.insert({x});
        }
        break;
      }
    }
    return cache.emplace(ep, std::move(result)).first->second;
  }
};

}  // namespace

long eval_feature(const FeatureExpr& f, const GroundState& s, const ProblemInstance& inst) {
  auto violations = check_wellformed(f, *inst.domain, static_cast<std::size_t>(-1));
  if (!violations.empty()) {
    std::string msg = "ill-formed feature";
    for (const auto& v : violations) msg += "; " + v;
    throw std::invalid_argument(msg);
  }

  RelationCache rc{s, inst, {}};
  std::map<Name, Name> env;

  auto literal_sat = [&](const FeatureLiteral& lit) {
    Tuple args;
    args.reserve(lit.atom.terms.size());
    for (const FTerm& t : lit.atom.terms) {
      if (t.is_var) {
        auto it = env.find(t.name);
        if (it == env.end()) throw std::logic_error("unbound variable at eval: " + t.name);
        args.push_back(it->second);
      } else {
        args.push_back(t.name);
      }
    }
    bool in = rc.get(lit.atom.pred).count(args) > 0;
    return lit.negated ? !in : in;
  };

  std::function<bool(std::size_t)> sat = [&](std::size_t qi) -> bool {
    if (qi == f.exists_vars.size())
      return std::all_of(f.literals.begin(), f.literals.end(), literal_sat);
    const Name& var = f.exists_vars[qi];
    auto saved = env.find(var) != env.end() ? std::optional<Name>(env[var]) : std::nullopt;
    for (const Name& o : inst.universe) {
      env[var] = o;
      if (sat(qi + 1)) {
        if (saved) env[var] = *saved; else env.erase(var);
        return true;
      }
    }
    if (saved) env[var] = *saved; else env.erase(var);
    return false;
  };

  auto fv = f.free_vars();
  if (fv.empty()) return sat(0) ? 1 : 0;
  long count = 0;
  for (const Name& o : inst.universe) {
    env[fv[0]] = o;
    if (sat(0)) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Canonical renaming
// ---------------------------------------------------------------------------

namespace {

std::string canonical_var_name(std::size_t i) {
  static const char* scheme[] = {"x", "y", "z", "u", "v", "w"};
  if (i < 6) return scheme[i];
  return "t" + std::to_string(i - 6);
}

}  // namespace

FeatureExpr canonical_form(const FeatureExpr& f) {
  std::map<Name, std::size_t> index;
  auto assign = [&](const Name& v) {
    if (!index.count(v)) {
      std::size_t i = index.size();
      index[v] = i;
    }
  };
  for (const auto& lit : f.literals)
    for (const auto& t : lit.atom.terms)
      if (t.is_var) assign(t.name);
  for (const auto& v : f.exists_vars) assign(v);  // vacuous binders last

  FeatureExpr out;
  for (const auto& v : f.exists_vars) out.exists_vars.push_back(canonical_var_name(index[v]));
  // a pure exists-chain is order-insensitive; sort binders by scheme index
  std::sort(out.exists_vars.begin(), out.exists_vars.end(),
            [&](const Name& a, const Name& b) {
              auto rank = [](const Name& n) {
                for (std::size_t i = 0; i < 6; ++i)
                  if (n == canonical_var_name(i)) return i;
                return std::size_t(6) + std::stoul(n.substr(1));
              };
              return rank(a) < rank(b);
            });
  out.exists_vars.erase(std::unique(out.exists_vars.begin(), out.exists_vars.end()),
                        out.exists_vars.end());
  out.literals = f.literals;
  for (auto& lit : out.literals)
    for (auto& t : lit.atom.terms)
      if (t.is_var) t.name = canonical_var_name(index[t.name]);
  return out;
}

// ---------------------------------------------------------------------------
// Feature files
// ---------------------------------------------------------------------------

std::vector<WeightedFeature> parse_feature_file(const std::string& text,
                                                const ProblemInstance& inst,
                                                std::size_t quantifier_bound) {
  std::vector<WeightedFeature> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::size_t tab = line.find('\t', b);
    if (tab == std::string::npos)
      throw ParseError("expected 'weight<TAB>feature'", lineno, 1);
    std::string wtext = line.substr(b, tab - b);
    char* end = nullptr;
    double w = std::strtod(wtext.c_str(), &end);
    if (end == wtext.c_str()) throw ParseError("malformed weight '" + wtext + "'", lineno, 1);
    out.push_back({w, parse_feature(line.substr(tab + 1), inst, quantifier_bound)});
  }
  return out;
}

std::string format_feature_file(const std::vector<WeightedFeature>& fs) {
  std::ostringstream os;
  for (const auto& wf : fs) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", wf.weight);
    os << buf << "\t" << print_feature(wf.feature) << "\n";
  }
  return os.str();
}

}  // namespace relavi
