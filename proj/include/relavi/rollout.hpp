#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relavi/domain.hpp"
#include "relavi/feature.hpp"
#include "relavi/rng.hpp"

namespace relavi {

struct MdpConfig {
  double gamma = 0.95;
  double goal_reward = 1.0;
  double step_reward = 0.0;
  double dead_end_value = 0.0;
  std::size_t max_trajectory_length = 1000;
};

struct LinearValueFn {
  std::vector<FeatureExpr> features;
  std::vector<double> weights;

  std::size_t size() const { return features.size(); }
};

enum class Termination { goal, dead_end, step_cap };
std::string to_string(Termination t);

struct Trajectory {
  std::vector<GroundState> states;
  std::vector<const GroundAction*> actions;  // valid while the instance lives
  Termination termination;
  std::shared_ptr<const ProblemInstance> instance;

  std::size_t length() const { return actions.size(); }
  /// "seed=.. instance=.. termination=.. length=.."
  std::string record(std::uint64_t seed) const;
};

/// Chooses an action for a live state. Pure policies ignore the rng.
using Policy =
    std::function<const GroundAction&(const GroundState&, const ProblemInstance&, Rng&)>;
using PolicyFactory = std::function<Policy()>;
using InstanceSampler = std::function<std::shared_ptr<const ProblemInstance>(Rng&)>;

InstanceSampler constant_sampler(std::shared_ptr<const ProblemInstance> inst);

/// V(s) = Σ_i w_i·f_i(s) on live states; dead ends return
/// dead_end_value, goal states goal_reward/(1−γ) (γ<1) or goal_reward.
double value(const LinearValueFn& v, const GroundState& s, const ProblemInstance& inst,
             const MdpConfig& cfg);

/// One-step lookahead value of a single action:
/// Σ_(p,s') p·(reward + continuation), where a goal successor yields
/// goal_reward and ends the episode, a dead-end successor yields
/// step_reward + dead_end_value, and a live successor
/// step_reward + γ·V(s').
double action_backup(const LinearValueFn& v, const GroundState& s, const GroundAction& a,
                     const ProblemInstance& inst, const MdpConfig& cfg);

/// max over applicable actions of action_backup. Throws
/// std::logic_error when s has no applicable actions.
double bellman_update(const LinearValueFn& v, const GroundState& s, const ProblemInstance& inst,
                      const MdpConfig& cfg);

/// Deterministic argmax; exact ties go to the lexicographically first
/// action. Never consults randomness.
const GroundAction& greedy_action(const LinearValueFn& v, const GroundState& s,
                                  const ProblemInstance& inst, const MdpConfig& cfg);

/// Greedy policy as a reusable closure; decisions are memoized per
/// (instance, state) since the policy is a pure function of them.
Policy greedy_policy(LinearValueFn v, MdpConfig cfg);

/// Uniform-random applicable action (test/baseline policy).
Policy random_policy();

/// Samples a successor by inverse CDF over the deduplicated outcome
/// list in listed order.
GroundState sample_successor(const GroundState& s, const GroundAction& a, Rng& rng);

struct DrawnState {
  GroundState state;
  std::shared_ptr<const ProblemInstance> instance;
};

struct DrawResult {
  std::vector<DrawnState> states;
  std::size_t trajectories_completed = 0;
  std::size_t trajectories_succeeded = 0;

  /// Success over trajectories begun and completed within the draw;
  /// the partial trajectory at the draw boundary is excluded.
  double training_success() const {
    return trajectories_completed == 0
               ? 0.0
               : static_cast<double>(trajectories_succeeded) / trajectories_completed;
  }
};

/// Draws exactly n live states by following the policy; resets to a
/// fresh sampled instance on goal, dead end, or length cap. Terminal
/// states are never appended.
DrawResult draw(const Policy& policy, std::size_t n, const InstanceSampler& sampler,
                const MdpConfig& cfg, Rng& rng);

/// Collects the live states of `n_trajectories` complete trajectories
/// (the AVI weight-update training-set mode).
DrawResult draw_trajectories(const Policy& policy, std::size_t n_trajectories,
                             const InstanceSampler& sampler, const MdpConfig& cfg, Rng& rng);

/// Follows the policy from the instance's initial state until goal,
/// dead end, or the step cap.
Trajectory run_trajectory(const Policy& policy, std::shared_ptr<const ProblemInstance> inst,
                          const MdpConfig& cfg, Rng& rng);

}  // namespace relavi
