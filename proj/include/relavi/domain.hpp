#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relavi/errors.hpp"

namespace relavi {

using Name = std::string;

// ---------------------------------------------------------------------------
// Ground atoms and states
// ---------------------------------------------------------------------------

struct Atom {
  Name pred;
  std::vector<Name> args;

  auto operator<=>(const Atom&) const = default;
};

/// "pred(a,b)" / "pred()" for nullary predicates.
std::string to_string(const Atom& a);
Atom parse_atom_text(const std::string& text);

enum class TerminalFlag { none, goal, dead_end };
enum class StateClass { goal, dead_end, live };

/// A finite set of ground atoms, stored sorted and deduplicated.
/// Equality and hashing look at the atoms only; the terminal flag is
/// derived metadata set by whoever classified the state.
struct GroundState {
  std::vector<Atom> atoms;  // canonical: sorted, unique
  TerminalFlag flag = TerminalFlag::none;

  GroundState() = default;
  explicit GroundState(std::vector<Atom> as);

  bool contains(const Atom& a) const;
  bool operator==(const GroundState& o) const { return atoms == o.atoms; }
  bool operator<(const GroundState& o) const { return atoms < o.atoms; }
};

std::size_t state_hash(const GroundState& s);

/// One atom per line, `pred(arg1,...,argN)`, sorted lexicographically.
std::string dump_state(const GroundState& s);
GroundState parse_state_dump(const std::string& text);

// ---------------------------------------------------------------------------
// Schemas (lifted level)
// ---------------------------------------------------------------------------

struct TypedVar {
  Name name;  // "?p"
  Name type;
  auto operator<=>(const TypedVar&) const = default;
};

struct Term {
  bool is_var = false;
  Name text;
  auto operator<=>(const Term&) const = default;
};

struct SchemaAtom {
  Name pred;
  std::vector<Term> terms;
  auto operator<=>(const SchemaAtom&) const = default;
};

struct Formula {
  enum class Kind { atom, neg, conj, disj, forall };
  Kind kind = Kind::conj;
  SchemaAtom atom;                 // kind == atom
  std::vector<Formula> children;   // neg/forall: 1 child; conj/disj: any
  std::vector<TypedVar> vars;      // kind == forall

  bool operator==(const Formula&) const = default;

  static Formula make_true() { return Formula{}; }  // empty conjunction
};

struct Effect {
  enum class Kind { add, del, conj, probabilistic, forall, when };
  Kind kind = Kind::conj;
  SchemaAtom atom;                 // add/del
  std::vector<Effect> children;    // conj: any; probabilistic: branches; forall/when: 1
  std::vector<double> probs;       // probabilistic, parallel to children
  std::vector<TypedVar> vars;      // forall
  Formula condition;               // when

  bool operator==(const Effect&) const = default;
};

struct PredicateDef {
  Name name;
  std::vector<TypedVar> params;
  bool operator==(const PredicateDef&) const = default;
  std::size_t arity() const { return params.size(); }
};

struct ActionSchema {
  Name name;
  std::vector<TypedVar> params;
  Formula precondition;
  Effect effect;
  bool operator==(const ActionSchema&) const = default;
};

struct DomainDef {
  Name name;
  std::vector<Name> requirements;
  std::vector<Name> types;
  std::vector<PredicateDef> predicates;
  std::vector<std::pair<Name, Name>> constants;  // (name, type)
  std::vector<ActionSchema> actions;

  bool operator==(const DomainDef&) const = default;

  const PredicateDef* find_predicate(const Name& n) const;
  const ActionSchema* find_action(const Name& n) const;
};

// ---------------------------------------------------------------------------
// Ground actions and problem instances
// ---------------------------------------------------------------------------

/// One fully expanded outcome: state' = (state \ del) ∪ add.
struct Outcome {
  double prob = 1.0;
  std::vector<Atom> add;
  std::vector<Atom> del;
};

/// An action schema instantiated with a concrete argument tuple. The
/// precondition is fully ground (foralls expanded over the object
/// universe). Effects keep `when` nodes symbolic so conditional effects
/// resolve against the state they are applied in; actions without
/// conditionals cache their outcome list.
struct GroundAction {
  Name schema;
  std::vector<Name> args;
  Formula precondition;  // ground: no vars, no forall
  Effect effect;         // ground except conditions inside `when`
  std::optional<std::vector<Outcome>> static_outcomes;

  std::string name() const;  // "schema(a,b)"
};

struct ProblemInstance {
  Name name;
  std::shared_ptr<const DomainDef> domain;
  std::vector<std::pair<Name, Name>> objects;  // problem objects, typed
  GroundState init;
  std::vector<Atom> goal;  // sorted ground conjunction

  /// Objects plus domain constants, grouped by type; grounding is eager.
  std::map<Name, std::vector<Name>> universe_by_type;
  std::vector<Name> universe;  // all object names, sorted
  std::vector<GroundAction> grounded;  // sorted by (schema, args)

  bool goal_satisfied(const GroundState& s) const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

std::shared_ptr<const DomainDef> parse_domain(const std::string& text);

std::shared_ptr<const ProblemInstance> parse_problem(const std::string& text,
                                                     std::shared_ptr<const DomainDef> domain);

/// Builds a ProblemInstance directly (used by generators and tests);
/// validates atoms and grounds all actions.
std::shared_ptr<const ProblemInstance> make_instance(
    Name name, std::shared_ptr<const DomainDef> domain,
    std::vector<std::pair<Name, Name>> objects, std::vector<Atom> init,
    std::vector<Atom> goal);

bool holds(const Formula& ground_formula, const GroundState& s);

/// All groundings whose precondition holds in s, in lexicographic
/// (schema, args) order. Deterministic across calls.
std::vector<const GroundAction*> applicable_actions(const GroundState& s,
                                                    const ProblemInstance& inst);

/// Full successor distribution; duplicates merged (first-occurrence
/// order), probabilities sum to 1 within 1e-9. Throws std::logic_error
/// if the action is not applicable in s.
std::vector<std::pair<double, GroundState>> outcome_distribution(const GroundState& s,
                                                                 const GroundAction& a);

StateClass classify_state(const GroundState& s, const ProblemInstance& inst);

/// Classified copy with the terminal flag set.
GroundState classified(GroundState s, const ProblemInstance& inst);

std::string print_domain(const DomainDef& d);
std::string print_problem(const ProblemInstance& p);

std::string read_file(const std::string& path);

}  // namespace relavi
