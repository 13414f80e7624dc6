#include "relavi/search.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "relavi/errors.hpp"
#include "relavi/trainer.hpp"

namespace relavi {

void SearchConfig::validate() const {
  if (beam_width < 1) throw ConfigError("beam width must be >= 1");
  if (depth_limit < 1) throw ConfigError("depth limit must be >= 1");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
}

std::vector<double> feature_values(const FeatureExpr& f, const std::vector<TrainingExample>& ts) {
  std::vector<double> out;
  out.reserve(ts.size());
  for (const auto& ex : ts)
    out.push_back(static_cast<double>(eval_feature(f, ex.state, *ex.instance)));
  return out;
}

double abs_correlation(const std::vector<double>& xs, const std::vector<TrainingExample>& ts) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    mx += xs[j];
    my += ts[j].target;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double dx = xs[j] - mx, dy = ts[j].target - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;  // constant side: no signal
  return std::fabs(sxy / std::sqrt(sxx * syy));
}

Scorer correlation_scorer(double lambda) {
  return [lambda](const FeatureExpr& f, const std::vector<TrainingExample>& ts) {
    return abs_correlation(feature_values(f, ts), ts) - lambda * static_cast<double>(f.size());
  };
}

// ---------------------------------------------------------------------------
// Grammar neighborhood
// ---------------------------------------------------------------------------

namespace {

std::vector<EnrichedPredicate> enriched_predicates(const DomainDef& d) {
  std::vector<EnrichedPredicate> out;
  for (const PredicateDef& p : d.predicates) {
    for (GoalEnrichment g :
         {GoalEnrichment::none, GoalEnrichment::goal, GoalEnrichment::correct}) {
      out.push_back({p.name, g, PredModifier::none});
      if (p.arity() == 2)
        for (PredModifier m : {PredModifier::closure, PredModifier::min, PredModifier::max})
          out.push_back({p.name, g, m});
    }
  }
  return out;
}

void argument_tuples(const std::vector<Name>& pool, std::size_t arity,
                     std::vector<std::vector<Name>>& out) {
  std::vector<Name> cur(arity);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == arity) {
      out.push_back(cur);
      return;
    }
    for (const Name& n : pool) {
      cur[i] = n;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace

std::vector<FeatureExpr> expand(const FeatureExpr& f, const DomainDef& d, std::size_t q) {
  std::vector<FeatureExpr> out;
  std::set<std::string> seen;
  std::string self = print_feature(canonical_form(f));

  auto emit = [&](FeatureExpr cand) {
    if (cand.free_vars().size() > 1) return;
    if (cand.quantifier_count() > q) return;
    if (!check_wellformed(cand, d, q).empty()) return;
    std::string key = print_feature(canonical_form(cand));
    if (key == self) return;
    if (seen.insert(key).second) out.push_back(std::move(cand));
  };

  // variables usable in a new literal: everything in scope plus one
  // fresh name (candidates introducing two fresh names would have two
  // free variables and are filtered anyway)
  std::vector<Name> vars = f.exists_vars;
  for (const Name& v : f.free_vars()) vars.push_back(v);
  Name fresh = "x";
  for (int i = 0; std::find(vars.begin(), vars.end(), fresh) != vars.end(); ++i)
    fresh = "fv" + std::to_string(i);
  vars.push_back(fresh);

  std::set<Name> constant_names;
  std::vector<Name> pool = vars;
  for (const auto& [n, t] : d.constants) {
    pool.push_back(n);
    constant_names.insert(n);
  }

  for (const EnrichedPredicate& ep : enriched_predicates(d)) {
    const PredicateDef* pd = d.find_predicate(ep.base);
    std::size_t arity = ep.effective_arity(pd->arity());
    std::vector<std::vector<Name>> tuples;
    argument_tuples(pool, arity, tuples);
    for (const auto& tup : tuples) {
      FeatureAtom atom;
      atom.pred = ep;
      for (const Name& n : tup) atom.terms.push_back({constant_names.count(n) == 0, n});
      for (bool neg : {false, true}) {
        FeatureLiteral lit{atom, neg};
        if (std::find(f.literals.begin(), f.literals.end(), lit) != f.literals.end())
          continue;  // appending an identical literal adds nothing
        FeatureExpr cand = f;
        cand.literals.push_back(lit);
        emit(std::move(cand));
      }
    }
  }

  // wrap the free variable in one existential binder
  auto fv = f.free_vars();
  if (fv.size() == 1 && f.quantifier_count() < q) {
    FeatureExpr cand = f;
    cand.exists_vars.insert(cand.exists_vars.begin(), fv[0]);
    emit(std::move(cand));
  }

  return out;
}

// ---------------------------------------------------------------------------
// Beam search
// ---------------------------------------------------------------------------

namespace {

bool candidate_less(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.size != b.size) return a.size < b.size;
  return print_feature(a.feature) < print_feature(b.feature);
}

}  // namespace

ScoredCandidate beam_search(const std::vector<TrainingExample>& training, const DomainDef& d,
                            const SearchConfig& sc, const Scorer& scorer,
                            const BeamLevelSink& sink) {
  sc.validate();
  if (training.empty()) throw ConfigError("beam_search requires a nonempty training set");
  Scorer score = scorer ? scorer : correlation_scorer(sc.lambda);

  std::set<std::string> seen;
  auto score_pool = [&](const std::vector<FeatureExpr>& pool) {
    std::vector<ScoredCandidate> scored;
    scored.reserve(pool.size());
    for (const FeatureExpr& f : pool)
      scored.push_back({f, score(f, training), f.size()});
    std::sort(scored.begin(), scored.end(), candidate_less);
    return scored;
  };

  std::vector<FeatureExpr> pool = expand(FeatureExpr{}, d, sc.quantifier_bound);
  for (const auto& f : pool) seen.insert(print_feature(canonical_form(f)));
  std::vector<ScoredCandidate> level = score_pool(pool);
  if (sink.fn) sink.fn(1, level);

  if (level.empty()) throw ConfigError("feature grammar produced no seed candidates");
  ScoredCandidate best = level.front();

  for (std::size_t depth = 2; depth <= sc.depth_limit; ++depth) {
    if (level.size() > sc.beam_width) level.resize(sc.beam_width);
    std::vector<FeatureExpr> next_pool;
    for (const ScoredCandidate& c : level)
      for (FeatureExpr& f : expand(c.feature, d, sc.quantifier_bound))
        if (seen.insert(print_feature(canonical_form(f))).second)
          next_pool.push_back(std::move(f));
    if (next_pool.empty()) break;
    level = score_pool(next_pool);
    if (sink.fn) sink.fn(depth, level);
    if (candidate_less(level.front(), best)) best = level.front();
  }
  return best;
}

std::vector<TrainingExample> build_feature_training_set(const LinearValueFn& v,
                                                        const InstanceSampler& sampler,
                                                        const SearchConfig& sc,
                                                        const MdpConfig& cfg, Rng& rng) {
  DrawResult r = draw(greedy_policy(v, cfg), sc.feature_training_states, sampler, cfg, rng);
  std::vector<TrainingExample> out;
  out.reserve(r.states.size());
  for (DrawnState& ds : r.states) {
    double target = bellman_update(v, ds.state, *ds.instance, cfg) -
                    value(v, ds.state, *ds.instance, cfg);
    out.push_back({std::move(ds.state), std::move(ds.instance), target});
  }
  return out;
}

}  // namespace relavi
