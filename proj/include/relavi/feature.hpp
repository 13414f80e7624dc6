#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relavi/domain.hpp"

namespace relavi {

// ---------------------------------------------------------------------------
// Relational feature language
//
// Concrete syntax:
//   exists x . goal-filed(x) & !filed(x)
//   goes-in+(x,y)   min-goes-in(x)   correct-filed(x)   goal-goes-in+(x,y)
//
// Expressions are prenex: a chain of existential binders around one
// conjunction of literals. A name in term position is a variable when
// bound by an enclosing `exists`; otherwise it is a constant when it
// names a known object, and a free variable when it does not. Features
// have at most one free variable.
// ---------------------------------------------------------------------------

enum class GoalEnrichment { none, goal, correct };
enum class PredModifier { none, closure, min, max };

struct EnrichedPredicate {
  Name base;
  GoalEnrichment enrichment = GoalEnrichment::none;
  PredModifier modifier = PredModifier::none;

  auto operator<=>(const EnrichedPredicate&) const = default;

  /// closure → 2; min/max → 1; otherwise the base predicate's arity.
  std::size_t effective_arity(std::size_t base_arity) const {
    if (modifier == PredModifier::closure) return 2;
    if (modifier == PredModifier::min || modifier == PredModifier::max) return 1;
    return base_arity;
  }

  std::string text() const;
};

struct FTerm {
  bool is_var = false;
  Name name;
  auto operator<=>(const FTerm&) const = default;
};

struct FeatureAtom {
  EnrichedPredicate pred;
  std::vector<FTerm> terms;
  auto operator<=>(const FeatureAtom&) const = default;
};

struct FeatureLiteral {
  FeatureAtom atom;
  bool negated = false;
  auto operator<=>(const FeatureLiteral&) const = default;
};

struct FeatureExpr {
  std::vector<Name> exists_vars;          // outermost binder first
  std::vector<FeatureLiteral> literals;   // the conjunction

  auto operator<=>(const FeatureExpr&) const = default;

  bool empty() const { return literals.empty(); }
  std::size_t quantifier_count() const { return exists_vars.size(); }
  /// Variables that occur in the literals but are not exists-bound.
  std::vector<Name> free_vars() const;
  /// literal count + quantifier count (the beam-search size measure).
  std::size_t size() const { return literals.size() + exists_vars.size(); }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Parses the concrete syntax. `known_constants` tells the parser which
/// bare names denote objects; everything else unbound is a free
/// variable. More than one free variable is a parse error.
FeatureExpr parse_feature(const std::string& text,
                          const std::set<Name>& known_constants = {});

/// Domain-aware parse: resolves constants from the instance's objects
/// and the domain constants, then enforces well-formedness (including
/// the empty-goal restriction on goal-based enrichments).
FeatureExpr parse_feature(const std::string& text, const ProblemInstance& inst,
                          std::size_t quantifier_bound);

std::string print_feature(const FeatureExpr& f);

/// Reports every violation (unknown predicate, effective-arity mismatch,
/// modifier on a non-binary predicate, more than one free variable,
/// quantifier bound exceeded). Empty result = well-formed.
std::vector<std::string> check_wellformed(const FeatureExpr& f, const DomainDef& d,
                                          std::size_t quantifier_bound);

/// Satisfying-binding count of the single free variable over the
/// instance's object universe; 0/1 indicator for closed expressions.
long eval_feature(const FeatureExpr& f, const GroundState& s, const ProblemInstance& inst);

std::set<std::pair<Name, Name>> transitive_closure(const std::set<std::pair<Name, Name>>& r);

/// Canonical bound-variable renaming (first occurrence order). Two
/// alpha-equivalent expressions canonicalize to equal ASTs.
FeatureExpr canonical_form(const FeatureExpr& f);

// Feature files: one `weight <tab> feature-text` per line, '#' comments.
struct WeightedFeature {
  double weight;
  FeatureExpr feature;
};
std::vector<WeightedFeature> parse_feature_file(const std::string& text,
                                                const ProblemInstance& inst,
                                                std::size_t quantifier_bound);
std::string format_feature_file(const std::vector<WeightedFeature>& fs);

}  // namespace relavi
