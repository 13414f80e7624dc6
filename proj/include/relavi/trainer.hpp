#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "relavi/rollout.hpp"

namespace relavi {

struct AviConfig {
  std::size_t iterations = 100;                 // T_AVI
  std::size_t states_per_draw = 1000;           // N_AVI (fixed-count mode)
  std::size_t weight_training_trajectories = 30;  // trajectory mode draw size
  double r_scale = 1.0;
  bool scaling_enabled = true;
  bool sign_guard_enabled = true;
  /// When set, overrides the search-then-converge schedule with a fixed
  /// learning rate (used by the tabular value-iteration equivalence).
  std::optional<double> alpha_override;

  void validate() const;
};

struct TrainerState {
  LinearValueFn value_fn;
  std::size_t iteration = 0;
  std::map<std::size_t, int> locked_signs;  // feature index → −1 / 0 / +1
  std::optional<double> training_success;
};

/// α(k) = 3 / (1 + k/100), k = iterations already executed.
double learning_rate(std::size_t k);

/// κ = 1 / (1 + exp(−4·(1 − |B_avg|/r_scale))).
double kappa(double b_avg, double r_scale);

inline int sign_of(double w) { return w > 0.0 ? 1 : (w < 0.0 ? -1 : 0); }

/// e_j = U(V)(s_j) − V(s_j). All states must be live.
std::vector<double> statewise_errors(const LinearValueFn& v, const std::vector<DrawnState>& states,
                                     const MdpConfig& cfg);

/// One weight-update pass: w_i += κ·(1/n_i)·Σ_j α·f_i(s_j)·e_j with
/// n_i = |{j : f_i(s_j) ≠ 0}|; features with n_i = 0 keep their weight.
/// κ = 1 with scaling disabled, else the §-sigmoid of the batch mean
/// error. Locked indices reject any update that would change their sign.
LinearValueFn weight_update(const LinearValueFn& v, const std::vector<DrawnState>& states,
                            double alpha, const MdpConfig& cfg, const AviConfig& avi_cfg,
                            const std::map<std::size_t, int>& locked_signs = {});

/// Core update on a precomputed feature matrix (fvals[i][j] = f_i(s_j)).
std::vector<double> weight_update_core(const std::vector<double>& weights,
                                       const std::vector<std::vector<double>>& fvals,
                                       const std::vector<double>& errors, double alpha,
                                       double kappa_factor,
                                       const std::map<std::size_t, int>& locked_signs);

/// True when policy `a` tests as significantly better than policy `b`.
using PolicyComparator = std::function<bool(const LinearValueFn& a, const LinearValueFn& b)>;

/// Draws one weight-update training set for the current value function
/// and reports the training success rate observed while drawing it.
struct TrainingDraw {
  std::vector<DrawnState> states;
  double training_success = 0.0;
};
using TrainingSetSource = std::function<TrainingDraw(const LinearValueFn&, Rng&)>;

TrainingSetSource trajectory_source(InstanceSampler sampler, MdpConfig cfg,
                                    std::size_t n_trajectories);
TrainingSetSource fixed_count_source(InstanceSampler sampler, MdpConfig cfg, std::size_t n_states);

/// The sign-restriction protocol. Runs after the training set for
/// `next` was drawn: if training success dropped and Greedy(prev) tests
/// significantly better than Greedy(next), each weight whose sign
/// changed is tested with a single-weight reversion; reversions that
/// test significantly better are kept and that index's sign is locked
/// for the rest of the run.
TrainerState sign_guard(const TrainerState& prev, const TrainerState& next,
                        const PolicyComparator& better);

struct IterationRecord {
  std::size_t k;
  double alpha;
  double b_avg;
  double kappa;
  double training_success;
  std::vector<std::size_t> locked;
  std::vector<double> weights;  // post-update snapshot (in-memory only)
};

using IterationSink = std::function<void(const IterationRecord&)>;

/// The AVI loop; returns the final trainer state (weights, locks,
/// iteration counter). Per-iteration randomness comes from streams
/// derived from (master_seed, iteration), so resumed runs continue
/// identically. `start` carries the iteration counter and locked signs
/// when resuming.
TrainerState avi(const LinearValueFn& v0, const AviConfig& avi_cfg, const MdpConfig& cfg,
                 const TrainingSetSource& source, const PolicyComparator& better,
                 std::uint64_t master_seed, const IterationSink& sink = {},
                 TrainerState start = {});

/// CSV header + row formatting for run logs.
std::string run_log_header();
std::string run_log_row(const IterationRecord& r);

}  // namespace relavi
