#include "relavi/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "sexpr.hpp"

namespace relavi {

// ---------------------------------------------------------------------------
// Atoms / states
// ---------------------------------------------------------------------------

std::string to_string(const Atom& a) {
  std::string out = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += a.args[i];
  }
  out += ")";
  return out;
}

Atom parse_atom_text(const std::string& text) {
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ParseError("malformed atom '" + text + "', expected pred(arg,...)");
  Atom a;
  a.pred = text.substr(0, open);
  std::string inner = text.substr(open + 1, close - open - 1);
  std::string cur;
  for (char c : inner) {
    if (c == ',') { a.args.push_back(cur); cur.clear(); }
    else if (!std::isspace(static_cast<unsigned char>(c))) cur.push_back(c);
  }
  if (!cur.empty()) a.args.push_back(cur);
  if (a.pred.empty()) throw ParseError("atom with empty predicate name: '" + text + "'");
  return a;
}

GroundState::GroundState(std::vector<Atom> as) : atoms(std::move(as)) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

bool GroundState::contains(const Atom& a) const {
  return std::binary_search(atoms.begin(), atoms.end(), a);
}

std::size_t state_hash(const GroundState& s) {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& str) {
    for (char c : str) { h ^= static_cast<unsigned char>(c); h *= 1099511628211ull; }
    h ^= 0xff; h *= 1099511628211ull;
  };
  for (const Atom& a : s.atoms) {
    mix(a.pred);
    for (const auto& arg : a.args) mix(arg);
  }
  return h;
}

std::string dump_state(const GroundState& s) {
  std::vector<std::string> lines;
  lines.reserve(s.atoms.size());
  for (const Atom& a : s.atoms) lines.push_back(to_string(a));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) { out += l; out += "\n"; }
  return out;
}

GroundState parse_state_dump(const std::string& text) {
  std::vector<Atom> atoms;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string t = line.substr(b, e - b + 1);
    if (t.empty() || t[0] == '#') continue;
    atoms.push_back(parse_atom_text(t));
  }
  return GroundState(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Lookup helpers
// ---------------------------------------------------------------------------

const PredicateDef* DomainDef::find_predicate(const Name& n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const ActionSchema* DomainDef::find_action(const Name& n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

std::string GroundAction::name() const {
  std::string out = schema + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i];
  }
  return out + ")";
}

bool ProblemInstance::goal_satisfied(const GroundState& s) const {
  for (const Atom& g : goal)
    if (!s.contains(g)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Domain parsing
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kSupportedRequirements = {
    ":strips", ":typing", ":disjunctive-preconditions", ":negative-preconditions",
    ":conditional-effects", ":probabilistic-effects", ":universal-preconditions"};

[[noreturn]] void fail(const Sexpr& where, const std::string& msg) {
  throw ParseError(msg, where.line, where.col);
}

std::string expect_atom(const Sexpr& s, const char* what) {
  if (!s.is_atom) fail(s, std::string("expected ") + what);
  return s.text;
}

// "?p - file ?f - folder" or "F0 F1 F2 - folder"; every entry must be typed.
std::vector<TypedVar> parse_typed_list(const Sexpr& list, std::size_t from,
                                       const std::vector<Name>& declared_types) {
  std::vector<TypedVar> out;
  std::vector<std::pair<Name, const Sexpr*>> pending;
  for (std::size_t i = from; i < list.size(); ++i) {
    const Sexpr& it = list.at(i);
    std::string tok = expect_atom(it, "name or '-'");
    if (tok == "-") {
      if (pending.empty()) fail(it, "type separator '-' without names");
      if (i + 1 >= list.size()) fail(it, "missing type after '-'");
      std::string ty = expect_atom(list.at(i + 1), "type name");
      ++i;
      if (!declared_types.empty() &&
          std::find(declared_types.begin(), declared_types.end(), ty) == declared_types.end())
        fail(list.at(i), "undeclared type '" + ty + "'");
      for (auto& [n, where] : pending) out.push_back({n, ty});
      pending.clear();
    } else {
      pending.emplace_back(tok, &it);
    }
  }
  if (!pending.empty()) fail(*pending.front().second, "entry '" + pending.front().first + "' has no type");
  return out;
}

double parse_probability(const Sexpr& s) {
  std::string tok = expect_atom(s, "probability");
  char* end = nullptr;
  double p = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) fail(s, "malformed probability '" + tok + "'");
  if (!(p > 0.0 && p <= 1.0)) fail(s, "probability must be in (0,1], got " + tok);
  return p;
}

struct SchemaScope {
  const DomainDef* domain;
  std::vector<TypedVar> vars;  // params + enclosing forall bindings

  bool is_bound(const Name& v) const {
    return std::any_of(vars.begin(), vars.end(), [&](const TypedVar& tv) { return tv.name == v; });
  }
};

SchemaAtom parse_schema_atom(const Sexpr& s, const SchemaScope& scope) {
  if (!s.is_list() || s.size() == 0 || !s.at(0).is_atom) fail(s, "expected atom (pred args...)");
  SchemaAtom a;
  a.pred = s.at(0).text;
  const PredicateDef* pd = scope.domain->find_predicate(a.pred);
  if (!pd) fail(s.at(0), "undeclared predicate '" + a.pred + "'");
  for (std::size_t i = 1; i < s.size(); ++i) {
    std::string t = expect_atom(s.at(i), "term");
    Term term;
    term.is_var = !t.empty() && t[0] == '?';
    term.text = t;
    if (term.is_var) {
      if (!scope.is_bound(t)) fail(s.at(i), "unbound variable '" + t + "'");
    } else {
      bool known = std::any_of(scope.domain->constants.begin(), scope.domain->constants.end(),
                               [&](const auto& c) { return c.first == t; });
      if (!known) fail(s.at(i), "unknown constant '" + t + "'");
    }
    a.terms.push_back(term);
  }
  if (a.terms.size() != pd->arity())
    fail(s, "predicate '" + a.pred + "' expects " + std::to_string(pd->arity()) +
            " arguments, got " + std::to_string(a.terms.size()));
  return a;
}

Formula parse_formula(const Sexpr& s, SchemaScope& scope) {
  if (!s.is_list() || s.size() == 0) fail(s, "expected formula");
  std::string head = s.at(0).is_atom ? s.at(0).text : "";
  Formula f;
  if (head == "and" || head == "or") {
    f.kind = head == "and" ? Formula::Kind::conj : Formula::Kind::disj;
    for (std::size_t i = 1; i < s.size(); ++i) f.children.push_back(parse_formula(s.at(i), scope));
    return f;
  }
  if (head == "not") {
    if (s.size() != 2) fail(s, "'not' takes one formula");
    f.kind = Formula::Kind::neg;
    f.children.push_back(parse_formula(s.at(1), scope));
    return f;
  }
  if (head == "forall") {
    if (s.size() != 3) fail(s, "'forall' takes (vars) and a body");
    f.kind = Formula::Kind::forall;
    f.vars = parse_typed_list(s.at(1), 0, scope.domain->types);
    std::size_t before = scope.vars.size();
    for (const auto& v : f.vars) scope.vars.push_back(v);
    f.children.push_back(parse_formula(s.at(2), scope));
    scope.vars.resize(before);
    return f;
  }
  if (head == "exists" || head == "imply" || head == "=" || head == "when" ||
      head == "increase" || head == "decrease")
    fail(s, "unsupported construct '" + head + "' in formula");
  f.kind = Formula::Kind::atom;
  f.atom = parse_schema_atom(s, scope);
  return f;
}

Effect parse_effect(const Sexpr& s, SchemaScope& scope) {
  if (!s.is_list() || s.size() == 0) fail(s, "expected effect");
  std::string head = s.at(0).is_atom ? s.at(0).text : "";
  Effect e;
  if (head == "and") {
    e.kind = Effect::Kind::conj;
    for (std::size_t i = 1; i < s.size(); ++i) e.children.push_back(parse_effect(s.at(i), scope));
    return e;
  }
  if (head == "not") {
    if (s.size() != 2) fail(s, "'not' effect takes one atom");
    e.kind = Effect::Kind::del;
    e.atom = parse_schema_atom(s.at(1), scope);
    return e;
  }
  if (head == "probabilistic") {
    e.kind = Effect::Kind::probabilistic;
    if (s.size() % 2 == 0) fail(s, "'probabilistic' takes probability/effect pairs");
    double total = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); i += 2) {
      double p = parse_probability(s.at(i));
      total += p;
      e.probs.push_back(p);
      e.children.push_back(parse_effect(s.at(i + 1), scope));
    }
    if (total > 1.0 + 1e-9) fail(s, "probabilities exceed 1");
    return e;
  }
  if (head == "forall") {
    if (s.size() != 3) fail(s, "'forall' effect takes (vars) and a body");
    e.kind = Effect::Kind::forall;
    e.vars = parse_typed_list(s.at(1), 0, scope.domain->types);
    std::size_t before = scope.vars.size();
    for (const auto& v : e.vars) scope.vars.push_back(v);
    e.children.push_back(parse_effect(s.at(2), scope));
    scope.vars.resize(before);
    return e;
  }
  if (head == "when") {
    if (s.size() != 3) fail(s, "'when' takes a condition and an effect");
    e.kind = Effect::Kind::when;
    e.condition = parse_formula(s.at(1), scope);
    e.children.push_back(parse_effect(s.at(2), scope));
    return e;
  }
  if (head == "increase" || head == "decrease" || head == "assign")
    fail(s, "unsupported construct '" + head + "' in effect");
  e.kind = Effect::Kind::add;
  e.atom = parse_schema_atom(s, scope);
  return e;
}

ActionSchema parse_action(const Sexpr& s, const DomainDef& d) {
  ActionSchema a;
  a.name = expect_atom(s.at(1), "action name");
  a.precondition = Formula::make_true();
  bool has_effect = false;
  std::size_t i = 2;
  SchemaScope scope{&d, {}};
  while (i < s.size()) {
    std::string key = expect_atom(s.at(i), "action section keyword");
    if (i + 1 >= s.size()) fail(s.at(i), "missing value for " + key);
    const Sexpr& val = s.at(i + 1);
    if (key == ":parameters") {
      a.params = parse_typed_list(val, 0, d.types);
      scope.vars = a.params;
    } else if (key == ":precondition") {
      a.precondition = parse_formula(val, scope);
    } else if (key == ":effect") {
      a.effect = parse_effect(val, scope);
      has_effect = true;
    } else {
      fail(s.at(i), "unsupported action section '" + key + "'");
    }
    i += 2;
  }
  if (!has_effect) fail(s, "action '" + a.name + "' has no :effect");
  return a;
}

}  // namespace

std::shared_ptr<const DomainDef> parse_domain(const std::string& text) {
  auto forms = parse_sexprs(text);
  if (forms.empty()) throw ParseError("empty domain text", 1, 1);
  const Sexpr& top = forms.front();
  if (!top.is_list() || top.size() < 2 || !top.at(0).is_atom || top.at(0).text != "define")
    throw ParseError("expected (define (domain ...) ...)", top.line, top.col);
  const Sexpr& head = top.at(1);
  if (!head.is_list() || head.size() != 2 || head.at(0).text != "domain")
    fail(head, "expected (domain name)");

  auto d = std::make_shared<DomainDef>();
  d->name = expect_atom(head.at(1), "domain name");

  for (std::size_t i = 2; i < top.size(); ++i) {
    const Sexpr& sec = top.at(i);
    if (!sec.is_list() || sec.size() == 0 || !sec.at(0).is_atom) fail(sec, "expected domain section");
    std::string key = sec.at(0).text;
    if (key == ":requirements") {
      for (std::size_t j = 1; j < sec.size(); ++j) {
        std::string r = expect_atom(sec.at(j), "requirement");
        if (!kSupportedRequirements.count(r)) fail(sec.at(j), "unsupported requirement '" + r + "'");
        d->requirements.push_back(r);
      }
    } else if (key == ":types") {
      for (std::size_t j = 1; j < sec.size(); ++j) {
        std::string t = expect_atom(sec.at(j), "type name");
        if (t == "-") fail(sec.at(j), "unsupported construct: type hierarchies");
        d->types.push_back(t);
      }
    } else if (key == ":predicates") {
      for (std::size_t j = 1; j < sec.size(); ++j) {
        const Sexpr& p = sec.at(j);
        if (!p.is_list() || p.size() == 0) fail(p, "expected (pred ?v - type ...)");
        PredicateDef pd;
        pd.name = expect_atom(p.at(0), "predicate name");
        pd.params = parse_typed_list(p, 1, d->types);
        if (d->find_predicate(pd.name)) fail(p, "duplicate predicate '" + pd.name + "'");
        d->predicates.push_back(std::move(pd));
      }
    } else if (key == ":constants") {
      for (const auto& tv : parse_typed_list(sec, 1, d->types))
        d->constants.emplace_back(tv.name, tv.type);
    } else if (key == ":action") {
      ActionSchema a = parse_action(sec, *d);
      if (d->find_action(a.name)) fail(sec, "duplicate action '" + a.name + "'");
      d->actions.push_back(std::move(a));
    } else if (key == ":functions" || key == ":rewards") {
      fail(sec, "unsupported construct '" + key + "'");
    } else {
      fail(sec, "unknown domain section '" + key + "'");
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

namespace {

using Binding = std::map<Name, Name>;

Atom substitute(const SchemaAtom& a, const Binding& b) {
  Atom out;
  out.pred = a.pred;
  out.args.reserve(a.terms.size());
  for (const Term& t : a.terms) {
    if (t.is_var) {
      auto it = b.find(t.text);
      if (it == b.end()) throw std::logic_error("unbound variable in grounding: " + t.text);
      out.args.push_back(it->second);
    } else {
      out.args.push_back(t.text);
    }
  }
  return out;
}

SchemaAtom to_ground_schema_atom(const Atom& a) {
  SchemaAtom out;
  out.pred = a.pred;
  for (const auto& arg : a.args) out.terms.push_back({false, arg});
  return out;
}

const std::vector<Name>& objects_of_type(const ProblemInstance& inst, const Name& type) {
  static const std::vector<Name> empty;
  auto it = inst.universe_by_type.find(type);
  return it == inst.universe_by_type.end() ? empty : it->second;
}

Formula ground_formula(const Formula& f, const Binding& b, const ProblemInstance& inst) {
  Formula out;
  switch (f.kind) {
    case Formula::Kind::atom:
      out.kind = Formula::Kind::atom;
      out.atom = to_ground_schema_atom(substitute(f.atom, b));
      return out;
    case Formula::Kind::neg:
      out.kind = Formula::Kind::neg;
      out.children.push_back(ground_formula(f.children[0], b, inst));
      return out;
    case Formula::Kind::conj:
    case Formula::Kind::disj:
      out.kind = f.kind;
      for (const auto& c : f.children) out.children.push_back(ground_formula(c, b, inst));
      return out;
    case Formula::Kind::forall: {
      // expand over the object universe of the bound types
      out.kind = Formula::Kind::conj;
      std::function<void(std::size_t, Binding&)> rec = [&](std::size_t vi, Binding& env) {
        if (vi == f.vars.size()) {
          out.children.push_back(ground_formula(f.children[0], env, inst));
          return;
        }
        for (const Name& o : objects_of_type(inst, f.vars[vi].type)) {
          env[f.vars[vi].name] = o;
          rec(vi + 1, env);
        }
        env.erase(f.vars[vi].name);
      };
      Binding env = b;
      rec(0, env);
      return out;
    }
  }
  return out;
}

Effect ground_effect(const Effect& e, const Binding& b, const ProblemInstance& inst) {
  Effect out;
  switch (e.kind) {
    case Effect::Kind::add:
    case Effect::Kind::del:
      out.kind = e.kind;
      out.atom = to_ground_schema_atom(substitute(e.atom, b));
      return out;
    case Effect::Kind::conj:
      out.kind = Effect::Kind::conj;
      for (const auto& c : e.children) out.children.push_back(ground_effect(c, b, inst));
      return out;
    case Effect::Kind::probabilistic:
      out.kind = Effect::Kind::probabilistic;
      out.probs = e.probs;
      for (const auto& c : e.children) out.children.push_back(ground_effect(c, b, inst));
      return out;
    case Effect::Kind::forall: {
      out.kind = Effect::Kind::conj;
      std::function<void(std::size_t, Binding&)> rec = [&](std::size_t vi, Binding& env) {
        if (vi == e.vars.size()) {
          out.children.push_back(ground_effect(e.children[0], env, inst));
          return;
        }
        for (const Name& o : objects_of_type(inst, e.vars[vi].type)) {
          env[e.vars[vi].name] = o;
          rec(vi + 1, env);
        }
        env.erase(e.vars[vi].name);
      };
      Binding env = b;
      rec(0, env);
      return out;
    }
    case Effect::Kind::when:
      out.kind = Effect::Kind::when;
      out.condition = ground_formula(e.condition, b, inst);
      out.children.push_back(ground_effect(e.children[0], b, inst));
      return out;
  }
  return out;
}

bool has_conditional(const Effect& e) {
  if (e.kind == Effect::Kind::when) return true;
  return std::any_of(e.children.begin(), e.children.end(), has_conditional);
}

void append_scaled(std::vector<Outcome>& dst, const std::vector<Outcome>& src, double scale) {
  for (const Outcome& o : src) {
    Outcome s = o;
    s.prob *= scale;
    dst.push_back(std::move(s));
  }
}

std::vector<Outcome> combine(const std::vector<Outcome>& a, const std::vector<Outcome>& b) {
  std::vector<Outcome> out;
  out.reserve(a.size() * b.size());
  for (const Outcome& x : a)
    for (const Outcome& y : b) {
      Outcome o = x;
      o.prob *= y.prob;
      o.add.insert(o.add.end(), y.add.begin(), y.add.end());
      o.del.insert(o.del.end(), y.del.begin(), y.del.end());
      out.push_back(std::move(o));
    }
  return out;
}

std::vector<Outcome> expand_outcomes(const Effect& e, const GroundState* s) {
  switch (e.kind) {
    case Effect::Kind::add:
      return {Outcome{1.0, {Atom{e.atom.pred, [&] {
                std::vector<Name> as;
                for (const auto& t : e.atom.terms) as.push_back(t.text);
                return as;
              }()}}, {}}};
    case Effect::Kind::del: {
      std::vector<Name> as;
      for (const auto& t : e.atom.terms) as.push_back(t.text);
      return {Outcome{1.0, {}, {Atom{e.atom.pred, as}}}};
    }
    case Effect::Kind::conj: {
      std::vector<Outcome> acc = {Outcome{}};
      for (const auto& c : e.children) acc = combine(acc, expand_outcomes(c, s));
      return acc;
    }
    case Effect::Kind::probabilistic: {
      std::vector<Outcome> out;
      double total = 0.0;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        append_scaled(out, expand_outcomes(e.children[i], s), e.probs[i]);
        total += e.probs[i];
      }
      if (1.0 - total > 1e-12) out.push_back(Outcome{1.0 - total, {}, {}});  // no-op padding
      return out;
    }
    case Effect::Kind::when: {
      if (!s) throw std::logic_error("conditional effect requires a state");
      if (holds(e.condition, *s)) return expand_outcomes(e.children[0], s);
      return {Outcome{}};
    }
    case Effect::Kind::forall:
      throw std::logic_error("forall effect should have been expanded at grounding");
  }
  return {};
}

void ground_instance(ProblemInstance& inst) {
  for (const auto& [n, t] : inst.objects) inst.universe_by_type[t].push_back(n);
  for (const auto& [n, t] : inst.domain->constants) inst.universe_by_type[t].push_back(n);
  for (auto& [t, names] : inst.universe_by_type) {
    std::sort(names.begin(), names.end());
    inst.universe.insert(inst.universe.end(), names.begin(), names.end());
  }
  std::sort(inst.universe.begin(), inst.universe.end());

  for (const ActionSchema& schema : inst.domain->actions) {
    std::function<void(std::size_t, Binding&, std::vector<Name>&)> rec =
        [&](std::size_t pi, Binding& env, std::vector<Name>& args) {
          if (pi == schema.params.size()) {
            GroundAction ga;
            ga.schema = schema.name;
            ga.args = args;
            ga.precondition = ground_formula(schema.precondition, env, inst);
            ga.effect = ground_effect(schema.effect, env, inst);
            if (!has_conditional(ga.effect)) {
              ga.static_outcomes = expand_outcomes(ga.effect, nullptr);
              double total = 0.0;
              for (const Outcome& o : *ga.static_outcomes) total += o.prob;
              if (std::abs(total - 1.0) > 1e-9)
                throw ParseError("outcome probabilities of " + ga.name() +
                                 " sum to " + std::to_string(total));
            }
            inst.grounded.push_back(std::move(ga));
            return;
          }
          for (const Name& o : objects_of_type(inst, schema.params[pi].type)) {
            env[schema.params[pi].name] = o;
            args.push_back(o);
            rec(pi + 1, env, args);
            args.pop_back();
          }
          env.erase(schema.params[pi].name);
        };
    Binding env;
    std::vector<Name> args;
    rec(0, env, args);
  }
  std::sort(inst.grounded.begin(), inst.grounded.end(),
            [](const GroundAction& a, const GroundAction& b) {
              if (a.schema != b.schema) return a.schema < b.schema;
              return a.args < b.args;
            });
}

void validate_ground_atom(const Atom& a, const ProblemInstance& inst, const char* where) {
  const PredicateDef* pd = inst.domain->find_predicate(a.pred);
  if (!pd) throw ParseError(std::string(where) + ": undeclared predicate '" + a.pred + "'");
  if (a.args.size() != pd->arity())
    throw ParseError(std::string(where) + ": predicate '" + a.pred + "' expects " +
                     std::to_string(pd->arity()) + " arguments in " + to_string(a));
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    const auto& objs = objects_of_type(inst, pd->params[i].type);
    if (!std::binary_search(objs.begin(), objs.end(), a.args[i]))
      throw ParseError(std::string(where) + ": '" + a.args[i] + "' is not a declared " +
                       pd->params[i].type + " in " + to_string(a));
  }
}

}  // namespace

std::shared_ptr<const ProblemInstance> make_instance(
    Name name, std::shared_ptr<const DomainDef> domain,
    std::vector<std::pair<Name, Name>> objects, std::vector<Atom> init,
    std::vector<Atom> goal) {
  auto inst = std::make_shared<ProblemInstance>();
  inst->name = std::move(name);
  inst->domain = std::move(domain);
  inst->objects = std::move(objects);
  for (const auto& [n, t] : inst->objects)
    if (std::find(inst->domain->types.begin(), inst->domain->types.end(), t) ==
        inst->domain->types.end())
      throw ParseError("object '" + n + "' has undeclared type '" + t + "'");
  ground_instance(*inst);
  inst->init = GroundState(std::move(init));
  std::sort(goal.begin(), goal.end());
  goal.erase(std::unique(goal.begin(), goal.end()), goal.end());
  inst->goal = std::move(goal);
  for (const Atom& a : inst->init.atoms) validate_ground_atom(a, *inst, "init");
  for (const Atom& a : inst->goal) validate_ground_atom(a, *inst, "goal");
  return inst;
}

std::shared_ptr<const ProblemInstance> parse_problem(const std::string& text,
                                                     std::shared_ptr<const DomainDef> domain) {
  auto forms = parse_sexprs(text);
  if (forms.empty()) throw ParseError("empty problem text", 1, 1);
  const Sexpr& top = forms.front();
  if (!top.is_list() || top.size() < 2 || !top.at(0).is_atom || top.at(0).text != "define")
    throw ParseError("expected (define (problem ...) ...)", top.line, top.col);
  const Sexpr& head = top.at(1);
  if (!head.is_list() || head.size() != 2 || head.at(0).text != "problem")
    fail(head, "expected (problem name)");

  Name pname = expect_atom(head.at(1), "problem name");
  std::vector<std::pair<Name, const Sexpr*>> untyped;
  std::vector<std::pair<Name, Name>> objects;
  std::vector<Atom> init, goal;

  auto parse_ground_atom = [&](const Sexpr& s) -> Atom {
    if (!s.is_list() || s.size() == 0 || !s.at(0).is_atom) fail(s, "expected ground atom");
    Atom a;
    a.pred = s.at(0).text;
    for (std::size_t i = 1; i < s.size(); ++i) {
      std::string t = expect_atom(s.at(i), "object name");
      if (!t.empty() && t[0] == '?') fail(s.at(i), "goal must be ground conjunctive");
      a.args.push_back(t);
    }
    return a;
  };

  for (std::size_t i = 2; i < top.size(); ++i) {
    const Sexpr& sec = top.at(i);
    if (!sec.is_list() || sec.size() == 0 || !sec.at(0).is_atom) fail(sec, "expected problem section");
    std::string key = sec.at(0).text;
    if (key == ":domain") {
      std::string dn = expect_atom(sec.at(1), "domain name");
      if (dn != domain->name)
        fail(sec.at(1), "problem references domain '" + dn + "', loaded '" + domain->name + "'");
    } else if (key == ":objects") {
      // The bundled source declares objects without types; such objects
      // get their type inferred from init/goal predicate slots.
      std::vector<std::pair<Name, const Sexpr*>> pending;
      for (std::size_t j = 1; j < sec.size(); ++j) {
        std::string tok = expect_atom(sec.at(j), "object name or '-'");
        if (tok == "-") {
          if (j + 1 >= sec.size()) fail(sec.at(j), "missing type after '-'");
          std::string ty = expect_atom(sec.at(j + 1), "type name");
          ++j;
          for (auto& [n, w] : pending) objects.emplace_back(n, ty);
          pending.clear();
        } else {
          pending.emplace_back(tok, &sec.at(j));
        }
      }
      untyped.insert(untyped.end(), pending.begin(), pending.end());
    } else if (key == ":init") {
      for (std::size_t j = 1; j < sec.size(); ++j) init.push_back(parse_ground_atom(sec.at(j)));
    } else if (key == ":goal") {
      if (sec.size() != 2) fail(sec, "expected (:goal formula)");
      const Sexpr& g = sec.at(1);
      if (g.is_list() && g.size() > 0 && g.at(0).is_atom && g.at(0).text == "and") {
        for (std::size_t j = 1; j < g.size(); ++j) {
          const Sexpr& c = g.at(j);
          if (c.is_list() && c.size() > 0 && c.at(0).is_atom &&
              (c.at(0).text == "or" || c.at(0).text == "not" || c.at(0).text == "forall" ||
               c.at(0).text == "exists" || c.at(0).text == "and"))
            fail(c, "goal must be ground conjunctive");
          goal.push_back(parse_ground_atom(c));
        }
      } else if (g.is_list() && g.size() > 0 && g.at(0).is_atom &&
                 (g.at(0).text == "or" || g.at(0).text == "not" || g.at(0).text == "forall" ||
                  g.at(0).text == "exists")) {
        fail(g, "goal must be ground conjunctive");
      } else {
        goal.push_back(parse_ground_atom(g));
      }
    } else {
      fail(sec, "unknown problem section '" + key + "'");
    }
  }

  // type inference for untyped objects from their init/goal occurrences
  for (auto& [n, where] : untyped) {
    Name inferred;
    auto scan = [&](const Atom& a) {
      const PredicateDef* pd = domain->find_predicate(a.pred);
      if (!pd || a.args.size() != pd->arity()) return;
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        if (a.args[k] != n) continue;
        if (inferred.empty()) inferred = pd->params[k].type;
        else if (inferred != pd->params[k].type)
          fail(*where, "conflicting types inferred for object '" + n + "'");
      }
    };
    for (const Atom& a : init) scan(a);
    for (const Atom& a : goal) scan(a);
    if (inferred.empty())
      fail(*where, "cannot infer type for untyped object '" + n + "'");
    objects.emplace_back(n, inferred);
  }

  return make_instance(pname, std::move(domain), std::move(objects), std::move(init),
                       std::move(goal));
}

// ---------------------------------------------------------------------------
// Semantics
// ---------------------------------------------------------------------------

bool holds(const Formula& f, const GroundState& s) {
  switch (f.kind) {
    case Formula::Kind::atom: {
      Atom a;
      a.pred = f.atom.pred;
      for (const Term& t : f.atom.terms) a.args.push_back(t.text);
      return s.contains(a);
    }
    case Formula::Kind::neg:
      return !holds(f.children[0], s);
    case Formula::Kind::conj:
      return std::all_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return holds(c, s); });
    case Formula::Kind::disj:
      return std::any_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return holds(c, s); });
    case Formula::Kind::forall:
      throw std::logic_error("forall should have been expanded at grounding");
  }
  return false;
}

std::vector<const GroundAction*> applicable_actions(const GroundState& s,
                                                    const ProblemInstance& inst) {
  std::vector<const GroundAction*> out;
  for (const GroundAction& ga : inst.grounded)
    if (holds(ga.precondition, s)) out.push_back(&ga);
  return out;
}

std::vector<std::pair<double, GroundState>> outcome_distribution(const GroundState& s,
                                                                 const GroundAction& a) {
  if (!holds(a.precondition, s))
    throw std::logic_error("action " + a.name() + " is not applicable");
  const std::vector<Outcome>* outs;
  std::vector<Outcome> dynamic;
  if (a.static_outcomes) {
    outs = &*a.static_outcomes;
  } else {
    dynamic = expand_outcomes(a.effect, &s);
    outs = &dynamic;
  }
  std::vector<std::pair<double, GroundState>> result;
  for (const Outcome& o : *outs) {
    std::vector<Atom> atoms;
    atoms.reserve(s.atoms.size() + o.add.size());
    for (const Atom& x : s.atoms)
      if (std::find(o.del.begin(), o.del.end(), x) == o.del.end()) atoms.push_back(x);
    atoms.insert(atoms.end(), o.add.begin(), o.add.end());
    GroundState succ(std::move(atoms));
    auto it = std::find_if(result.begin(), result.end(),
                           [&](const auto& pr) { return pr.second == succ; });
    if (it == result.end()) result.emplace_back(o.prob, std::move(succ));
    else it->first += o.prob;
  }
  return result;
}

StateClass classify_state(const GroundState& s, const ProblemInstance& inst) {
  if (inst.goal_satisfied(s)) return StateClass::goal;  // goal wins over dead-end
  if (applicable_actions(s, inst).empty()) return StateClass::dead_end;
  return StateClass::live;
}

GroundState classified(GroundState s, const ProblemInstance& inst) {
  switch (classify_state(s, inst)) {
    case StateClass::goal: s.flag = TerminalFlag::goal; break;
    case StateClass::dead_end: s.flag = TerminalFlag::dead_end; break;
    case StateClass::live: s.flag = TerminalFlag::none; break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string format_prob(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

void print_typed_list(std::ostringstream& os, const std::vector<TypedVar>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) os << " ";
    os << vs[i].name << " - " << vs[i].type;
  }
}

void print_schema_atom(std::ostringstream& os, const SchemaAtom& a) {
  os << "(" << a.pred;
  for (const Term& t : a.terms) os << " " << t.text;
  os << ")";
}

void print_formula(std::ostringstream& os, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::atom: print_schema_atom(os, f.atom); return;
    case Formula::Kind::neg:
      os << "(not ";
      print_formula(os, f.children[0]);
      os << ")";
      return;
    case Formula::Kind::conj:
    case Formula::Kind::disj:
      os << (f.kind == Formula::Kind::conj ? "(and" : "(or");
      for (const auto& c : f.children) { os << " "; print_formula(os, c); }
      os << ")";
      return;
    case Formula::Kind::forall:
      os << "(forall (";
      print_typed_list(os, f.vars);
      os << ") ";
      print_formula(os, f.children[0]);
      os << ")";
      return;
  }
}

void print_effect(std::ostringstream& os, const Effect& e) {
  switch (e.kind) {
    case Effect::Kind::add: print_schema_atom(os, e.atom); return;
    case Effect::Kind::del:
      os << "(not ";
      print_schema_atom(os, e.atom);
      os << ")";
      return;
    case Effect::Kind::conj:
      os << "(and";
      for (const auto& c : e.children) { os << " "; print_effect(os, c); }
      os << ")";
      return;
    case Effect::Kind::probabilistic:
      os << "(probabilistic";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        os << " " << format_prob(e.probs[i]) << " ";
        print_effect(os, e.children[i]);
      }
      os << ")";
      return;
    case Effect::Kind::forall:
      os << "(forall (";
      print_typed_list(os, e.vars);
      os << ") ";
      print_effect(os, e.children[0]);
      os << ")";
      return;
    case Effect::Kind::when:
      os << "(when ";
      print_formula(os, e.condition);
      os << " ";
      print_effect(os, e.children[0]);
      os << ")";
      return;
  }
}

}  // namespace

std::string print_domain(const DomainDef& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << " " << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types";
    for (const auto& t : d.types) os << " " << t;
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << " (" << p.name;
    if (!p.params.empty()) {
      os << " ";
      std::ostringstream tmp;
      print_typed_list(tmp, p.params);
      os << tmp.str();
    }
    os << ")";
  }
  os << ")\n";
  if (!d.constants.empty()) {
    os << "  (:constants";
    for (const auto& [n, t] : d.constants) os << " " << n << " - " << t;
    os << ")\n";
  }
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n    :parameters (";
    std::ostringstream tmp;
    print_typed_list(tmp, a.params);
    os << tmp.str() << ")\n    :precondition ";
    print_formula(os, a.precondition);
    os << "\n    :effect ";
    print_effect(os, a.effect);
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const ProblemInstance& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n  (:domain " << p.domain->name << ")\n  (:objects";
  for (const auto& [n, t] : p.objects) os << " " << n << " - " << t;
  os << ")\n";
  if (!p.init.atoms.empty()) {
    os << "  (:init";
    for (const Atom& a : p.init.atoms) {
      os << " (" << a.pred;
      for (const auto& arg : a.args) os << " " << arg;
      os << ")";
    }
    os << ")\n";
  }
  os << "  (:goal (and";
  for (const Atom& a : p.goal) {
    os << " (" << a.pred;
    for (const auto& arg : a.args) os << " " << arg;
    os << ")";
  }
  os << ")))\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace relavi
