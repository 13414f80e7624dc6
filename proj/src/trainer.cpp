#include "relavi/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "relavi/errors.hpp"

namespace relavi {

void AviConfig::validate() const {
  if (iterations < 1) throw ConfigError("avi iterations must be >= 1");
  if (states_per_draw < 1) throw ConfigError("states per draw must be >= 1");
  if (weight_training_trajectories < 1) throw ConfigError("trajectories per draw must be >= 1");
  if (!(r_scale > 0.0)) throw ConfigError("r_scale must be > 0");
  if (alpha_override && !(*alpha_override > 0.0)) throw ConfigError("alpha must be > 0");
}

double learning_rate(std::size_t k) { return 3.0 / (1.0 + static_cast<double>(k) / 100.0); }

double kappa(double b_avg, double r_scale) {
  return 1.0 / (1.0 + std::exp(-4.0 * (1.0 - std::fabs(b_avg) / r_scale)));
}

std::vector<double> statewise_errors(const LinearValueFn& v, const std::vector<DrawnState>& states,
                                     const MdpConfig& cfg) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const DrawnState& ds : states)
    out.push_back(bellman_update(v, ds.state, *ds.instance, cfg) -
                  value(v, ds.state, *ds.instance, cfg));
  return out;
}

std::vector<double> weight_update_core(const std::vector<double>& weights,
                                       const std::vector<std::vector<double>>& fvals,
                                       const std::vector<double>& errors, double alpha,
                                       double kappa_factor,
                                       const std::map<std::size_t, int>& locked_signs) {
  std::vector<double> out = weights;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    std::size_t n_i = 0;
    double sum = 0.0;
    for (std::size_t j = 0; j < errors.size(); ++j) {
      if (fvals[i][j] == 0.0) continue;
      ++n_i;
      sum += alpha * fvals[i][j] * errors[j];
    }
    if (n_i == 0) continue;  // feature unseen in this batch
    double next = weights[i] + kappa_factor * sum / static_cast<double>(n_i);
    auto lock = locked_signs.find(i);
    if (lock != locked_signs.end() && sign_of(next) != lock->second)
      continue;  // a sign-breaking update is replaced with no change
    out[i] = next;
  }
  return out;
}

namespace {

std::vector<std::vector<double>> feature_matrix(const LinearValueFn& v,
                                                const std::vector<DrawnState>& states) {
  std::vector<std::vector<double>> fvals(v.features.size(),
                                         std::vector<double>(states.size(), 0.0));
  for (std::size_t i = 0; i < v.features.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j)
      fvals[i][j] =
          static_cast<double>(eval_feature(v.features[i], states[j].state, *states[j].instance));
  return fvals;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

LinearValueFn weight_update(const LinearValueFn& v, const std::vector<DrawnState>& states,
                            double alpha, const MdpConfig& cfg, const AviConfig& avi_cfg,
                            const std::map<std::size_t, int>& locked_signs) {
  if (states.empty()) throw ConfigError("weight_update requires a nonempty training set");
  auto errors = statewise_errors(v, states, cfg);
  double k = avi_cfg.scaling_enabled ? kappa(mean(errors), avi_cfg.r_scale) : 1.0;
  LinearValueFn out = v;
  out.weights = weight_update_core(v.weights, feature_matrix(v, states), errors, alpha, k,
                                   locked_signs);
  return out;
}

TrainingSetSource trajectory_source(InstanceSampler sampler, MdpConfig cfg,
                                    std::size_t n_trajectories) {
  return [sampler = std::move(sampler), cfg, n_trajectories](const LinearValueFn& v, Rng& rng) {
    DrawResult r = draw_trajectories(greedy_policy(v, cfg), n_trajectories, sampler, cfg, rng);
    return TrainingDraw{std::move(r.states), r.training_success()};
  };
}

TrainingSetSource fixed_count_source(InstanceSampler sampler, MdpConfig cfg,
                                     std::size_t n_states) {
  return [sampler = std::move(sampler), cfg, n_states](const LinearValueFn& v, Rng& rng) {
    DrawResult r = draw(greedy_policy(v, cfg), n_states, sampler, cfg, rng);
    return TrainingDraw{std::move(r.states), r.training_success()};
  };
}

TrainerState sign_guard(const TrainerState& prev, const TrainerState& next,
                        const PolicyComparator& better) {
  if (!prev.training_success || !next.training_success) return next;
  if (!(*next.training_success < *prev.training_success)) return next;
  if (!better(prev.value_fn, next.value_fn)) return next;

  TrainerState out = next;
  const auto& wp = prev.value_fn.weights;
  const auto& wn = next.value_fn.weights;
  for (std::size_t i = 0; i < wn.size() && i < wp.size(); ++i) {
    if (sign_of(wp[i]) == sign_of(wn[i])) continue;
    LinearValueFn reverted = next.value_fn;  // reverse just this weight
    reverted.weights[i] = wp[i];
    if (better(reverted, next.value_fn)) {
      out.value_fn.weights[i] = wp[i];
      out.locked_signs[i] = sign_of(wp[i]);
    }
  }
  return out;
}

TrainerState avi(const LinearValueFn& v0, const AviConfig& avi_cfg, const MdpConfig& cfg,
                 const TrainingSetSource& source, const PolicyComparator& better,
                 std::uint64_t master_seed, const IterationSink& sink, TrainerState start) {
  avi_cfg.validate();
  if (v0.features.size() != v0.weights.size())
    throw ConfigError("value function has " + std::to_string(v0.features.size()) +
                      " features but " + std::to_string(v0.weights.size()) + " weights");

  TrainerState cur = std::move(start);
  cur.value_fn = v0;
  std::optional<TrainerState> prev;
  if (cur.training_success) {
    // resumed run: reconstruct the predecessor so the guard can fire on
    // the first fresh draw
    prev = cur;
  }

  for (std::size_t k = cur.iteration; k < avi_cfg.iterations; ++k) {
    Rng rng = Rng::stream(master_seed, k);
    TrainingDraw dset = source(cur.value_fn, rng);
    cur.training_success = dset.training_success;

    if (avi_cfg.sign_guard_enabled && prev) cur = sign_guard(*prev, cur, better);

    double alpha = avi_cfg.alpha_override ? *avi_cfg.alpha_override : learning_rate(k);
    auto errors = statewise_errors(cur.value_fn, dset.states, cfg);
    double b_avg = mean(errors);
    double kfac = avi_cfg.scaling_enabled ? kappa(b_avg, avi_cfg.r_scale) : 1.0;

    LinearValueFn updated = cur.value_fn;
    if (!dset.states.empty())
      updated.weights = weight_update_core(cur.value_fn.weights,
                                           feature_matrix(cur.value_fn, dset.states), errors,
                                           alpha, kfac, cur.locked_signs);

    if (sink) {
      IterationRecord rec{k, alpha, b_avg, kfac, *cur.training_success, {}, updated.weights};
      for (const auto& [idx, sgn] : cur.locked_signs) rec.locked.push_back(idx);
      sink(rec);
    }

    prev = cur;
    cur.value_fn = std::move(updated);
    cur.iteration = k + 1;
  }
  return cur;
}

std::string run_log_header() {
  return "# relavi-csv v1\nk,alpha,B_avg,kappa,training_success,locked_indices\n";
}

std::string run_log_row(const IterationRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,", r.k, r.alpha, r.b_avg, r.kappa,
                r.training_success);
  std::string out = buf;
  for (std::size_t i = 0; i < r.locked.size(); ++i) {
    if (i) out += ";";
    out += std::to_string(r.locked[i]);
  }
  out += "\n";
  return out;
}

}  // namespace relavi
