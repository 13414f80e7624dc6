#include "relavi/rollout.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace relavi {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::goal: return "goal";
    case Termination::dead_end: return "dead_end";
    case Termination::step_cap: return "step_cap";
  }
  return "?";
}

std::string Trajectory::record(std::uint64_t seed) const {
  return "seed=" + std::to_string(seed) + " instance=" + instance->name +
         " termination=" + to_string(termination) + " length=" + std::to_string(length());
}

InstanceSampler constant_sampler(std::shared_ptr<const ProblemInstance> inst) {
  return [inst](Rng&) { return inst; };
}

double value(const LinearValueFn& v, const GroundState& s, const ProblemInstance& inst,
             const MdpConfig& cfg) {
  switch (classify_state(s, inst)) {
    case StateClass::dead_end:
      return cfg.dead_end_value;
    case StateClass::goal:
      return cfg.gamma < 1.0 ? cfg.goal_reward / (1.0 - cfg.gamma) : cfg.goal_reward;
    case StateClass::live:
      break;
  }
  double out = 0.0;
  for (std::size_t i = 0; i < v.features.size(); ++i)
    out += v.weights[i] * static_cast<double>(eval_feature(v.features[i], s, inst));
  return out;
}

namespace {

double live_value(const LinearValueFn& v, const GroundState& s, const ProblemInstance& inst) {
  double out = 0.0;
  for (std::size_t i = 0; i < v.features.size(); ++i)
    out += v.weights[i] * static_cast<double>(eval_feature(v.features[i], s, inst));
  return out;
}

}  // namespace

double action_backup(const LinearValueFn& v, const GroundState& s, const GroundAction& a,
                     const ProblemInstance& inst, const MdpConfig& cfg) {
  double q = 0.0;
  for (const auto& [p, succ] : outcome_distribution(s, a)) {
    if (inst.goal_satisfied(succ)) {
      q += p * cfg.goal_reward;  // absorbing: no future term
    } else if (applicable_actions(succ, inst).empty()) {
      q += p * (cfg.step_reward + cfg.dead_end_value);
    } else {
      q += p * (cfg.step_reward + cfg.gamma * live_value(v, succ, inst));
    }
  }
  return q;
}

double bellman_update(const LinearValueFn& v, const GroundState& s, const ProblemInstance& inst,
                      const MdpConfig& cfg) {
  auto acts = applicable_actions(s, inst);
  if (acts.empty()) throw std::logic_error("bellman_update on a state with no applicable actions");
  double best = -std::numeric_limits<double>::infinity();
  for (const GroundAction* a : acts) best = std::max(best, action_backup(v, s, *a, inst, cfg));
  return best;
}

const GroundAction& greedy_action(const LinearValueFn& v, const GroundState& s,
                                  const ProblemInstance& inst, const MdpConfig& cfg) {
  auto acts = applicable_actions(s, inst);
  if (acts.empty()) throw std::logic_error("greedy_action on a state with no applicable actions");
  const GroundAction* best = acts.front();
  double best_q = action_backup(v, s, *best, inst, cfg);
  for (std::size_t i = 1; i < acts.size(); ++i) {
    double q = action_backup(v, s, *acts[i], inst, cfg);
    if (q > best_q) {  // ties keep the lexicographically first action
      best_q = q;
      best = acts[i];
    }
  }
  return *best;
}

Policy greedy_policy(LinearValueFn v, MdpConfig cfg) {
  struct Key {
    const ProblemInstance* inst;
    GroundState state;
    bool operator==(const Key& o) const { return inst == o.inst && state == o.state; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return state_hash(k.state) ^ std::hash<const void*>()(k.inst);
    }
  };
  auto cache = std::make_shared<std::unordered_map<Key, const GroundAction*, KeyHash>>();
  return [v = std::move(v), cfg, cache](const GroundState& s, const ProblemInstance& inst,
                                        Rng&) -> const GroundAction& {
    Key key{&inst, s};
    auto it = cache->find(key);
    if (it != cache->end()) return *it->second;
    const GroundAction& a = greedy_action(v, s, inst, cfg);
    cache->emplace(std::move(key), &a);
    return a;
  };
}

Policy random_policy() {
  return [](const GroundState& s, const ProblemInstance& inst, Rng& rng) -> const GroundAction& {
    auto acts = applicable_actions(s, inst);
    if (acts.empty()) throw std::logic_error("random_policy on a state with no applicable actions");
    return *acts[rng.index(acts.size())];
  };
}

GroundState sample_successor(const GroundState& s, const GroundAction& a, Rng& rng) {
  auto dist = outcome_distribution(s, a);
  double u = rng.uniform01();
  double acc = 0.0;
  for (auto& [p, succ] : dist) {
    acc += p;
    if (u < acc) return std::move(succ);
  }
  return std::move(dist.back().second);  // numerical slack at u ≈ 1
}

namespace {

// Fetches a fresh instance whose initial state is live.
std::pair<std::shared_ptr<const ProblemInstance>, GroundState> fresh_start(
    const InstanceSampler& sampler, Rng& rng) {
  for (int tries = 0; tries < 1000; ++tries) {
    auto inst = sampler(rng);
    GroundState s0 = classified(inst->init, *inst);
    if (s0.flag == TerminalFlag::none) return {std::move(inst), std::move(s0)};
  }
  throw std::runtime_error("instance sampler keeps producing terminal initial states");
}

}  // namespace

DrawResult draw(const Policy& policy, std::size_t n, const InstanceSampler& sampler,
                const MdpConfig& cfg, Rng& rng) {
  DrawResult out;
  if (n == 0) return out;
  auto [inst, s] = fresh_start(sampler, rng);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.states.push_back({s, inst});
    ++j;
    const GroundAction& a = policy(s, *inst, rng);
    GroundState succ = classified(sample_successor(s, a, rng), *inst);
    if (succ.flag != TerminalFlag::none || j > cfg.max_trajectory_length) {
      ++out.trajectories_completed;
      if (succ.flag == TerminalFlag::goal) ++out.trajectories_succeeded;
      if (i + 1 < n) {
        auto next = fresh_start(sampler, rng);
        inst = std::move(next.first);
        s = std::move(next.second);
      }
      j = 0;
    } else {
      s = std::move(succ);
    }
  }
  return out;
}

DrawResult draw_trajectories(const Policy& policy, std::size_t n_trajectories,
                             const InstanceSampler& sampler, const MdpConfig& cfg, Rng& rng) {
  DrawResult out;
  for (std::size_t t = 0; t < n_trajectories; ++t) {
    auto inst = sampler(rng);
    Trajectory tr = run_trajectory(policy, inst, cfg, rng);
    for (GroundState& s : tr.states)
      if (s.flag == TerminalFlag::none) out.states.push_back({std::move(s), inst});
    ++out.trajectories_completed;
    if (tr.termination == Termination::goal) ++out.trajectories_succeeded;
  }
  return out;
}

Trajectory run_trajectory(const Policy& policy, std::shared_ptr<const ProblemInstance> inst,
                          const MdpConfig& cfg, Rng& rng) {
  Trajectory tr;
  tr.instance = inst;
  GroundState cur = classified(inst->init, *inst);
  tr.states.push_back(cur);
  while (true) {
    if (cur.flag == TerminalFlag::goal) {
      tr.termination = Termination::goal;
      return tr;
    }
    if (cur.flag == TerminalFlag::dead_end) {
      tr.termination = Termination::dead_end;
      return tr;
    }
    if (tr.actions.size() == cfg.max_trajectory_length) {
      tr.termination = Termination::step_cap;
      return tr;
    }
    const GroundAction& a = policy(cur, *inst, rng);
    tr.actions.push_back(&a);
    cur = classified(sample_successor(cur, a, rng), *inst);
    tr.states.push_back(cur);
  }
}

}  // namespace relavi
