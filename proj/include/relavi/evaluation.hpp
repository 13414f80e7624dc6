#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relavi/rollout.hpp"

namespace relavi {

struct EvalReport {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::vector<std::uint8_t> outcomes;  // per-trial, by trial index
  std::vector<std::uint64_t> seeds;

  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

/// Runs `trials` independent trajectories; success = goal termination.
/// Trial i uses the stream derived from (master_seed, i), so reports
/// are reproducible and trials can run in parallel.
EvalReport success_rate(const PolicyFactory& make_policy, const InstanceSampler& sampler,
                        std::size_t trials, const MdpConfig& cfg, std::uint64_t master_seed,
                        std::size_t jobs = 1);

/// One-sided two-sample test of "r2's success rate is at most 0.9 times
/// r1's": D = 0.9·p̂1 − p̂2, t = D / sqrt(0.81·v̂1 + v̂2) with
/// v̂i = p̂i(1−p̂i)/nᵢ, compared against the upper 0.025 tail of
/// Student's t with Welch-approximated degrees of freedom. When both
/// samples are constant the point estimates decide.
bool tests_significantly_better(const EvalReport& r1, const EvalReport& r2,
                                double ratio = 0.9, double significance = 0.025);

struct CurriculumConfig {
  std::vector<int> levels;  // instance-generator parameter per level
  double promotion_threshold = 0.9;
  std::size_t trials_per_check = 100;

  void validate() const;
};

/// Advances to the next level iff the report meets the threshold and a
/// next level exists. Never demotes.
std::size_t curriculum_step(std::size_t current_level, const EvalReport& report,
                            const CurriculumConfig& cc);

/// CSV rendering: (trial, seed, termination, steps, success).
std::string eval_report_csv(const EvalReport& r, const std::vector<std::string>& terminations,
                            const std::vector<std::size_t>& steps);

/// Convenience: evaluate and capture per-trial details in one pass.
struct DetailedEval {
  EvalReport report;
  std::vector<std::string> terminations;
  std::vector<std::size_t> steps;
};
DetailedEval evaluate_policy(const PolicyFactory& make_policy, const InstanceSampler& sampler,
                             std::size_t trials, const MdpConfig& cfg, std::uint64_t master_seed,
                             std::size_t jobs = 1);

}  // namespace relavi
