#pragma once

#include <functional>
#include <vector>

#include "relavi/rollout.hpp"

namespace relavi {

struct SearchConfig {
  std::size_t beam_width = 60;       // W
  std::size_t depth_limit = 5;       // d
  double lambda = 0.03;              // size-regularization coefficient
  std::size_t quantifier_bound = 1;  // q
  std::size_t feature_training_states = 20000;

  void validate() const;
};

struct TrainingExample {
  GroundState state;
  std::shared_ptr<const ProblemInstance> instance;
  double target;  // statewise Bellman error
};

struct ScoredCandidate {
  FeatureExpr feature;
  double score = 0.0;
  std::size_t size = 0;
};

/// Values of a candidate on every training example.
std::vector<double> feature_values(const FeatureExpr& f, const std::vector<TrainingExample>& ts);

/// |Pearson correlation| between the candidate's values and the
/// targets; 0 when either side has zero variance.
double abs_correlation(const std::vector<double>& xs, const std::vector<TrainingExample>& ts);

using Scorer = std::function<double(const FeatureExpr&, const std::vector<TrainingExample>&)>;

/// The default scorer: |corr(f, targets)| − λ·size(f).
Scorer correlation_scorer(double lambda);

/// All single-step grammar extensions of f: append one literal (over
/// every enriched predicate and argument tuple in scope) or wrap the
/// free variable in one existential binder. Results are filtered to
/// ≤ 1 free variable and ≤ q quantifiers, and deduplicated up to
/// bound-variable renaming. The empty expression seeds the search.
std::vector<FeatureExpr> expand(const FeatureExpr& f, const DomainDef& d, std::size_t q);

struct BeamLevelSink {
  std::function<void(std::size_t level, const std::vector<ScoredCandidate>&)> fn;
};

/// Classic beam search over the feature grammar: keep the W best per
/// level, stop at depth d, return the best candidate seen anywhere.
/// Ties break toward smaller size, then lexicographic printed form.
ScoredCandidate beam_search(const std::vector<TrainingExample>& training, const DomainDef& d,
                            const SearchConfig& sc, const Scorer& scorer = {},
                            const BeamLevelSink& sink = {});

/// Draws feature_training_states states under Greedy(v) and pairs each
/// with its statewise Bellman error.
std::vector<TrainingExample> build_feature_training_set(const LinearValueFn& v,
                                                        const InstanceSampler& sampler,
                                                        const SearchConfig& sc,
                                                        const MdpConfig& cfg, Rng& rng);

}  // namespace relavi
