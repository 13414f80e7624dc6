#include "relavi/evaluation.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "relavi/errors.hpp"

namespace relavi {

namespace {

struct TrialResult {
  bool success;
  std::string termination;
  std::size_t steps;
  std::uint64_t seed;
};

TrialResult run_trial(const Policy& policy, const InstanceSampler& sampler, const MdpConfig& cfg,
                      std::uint64_t master_seed, std::size_t trial) {
  Rng rng = Rng::stream(master_seed, trial);
  auto inst = sampler(rng);
  Trajectory tr = run_trajectory(policy, inst, cfg, rng);
  return {tr.termination == Termination::goal, to_string(tr.termination), tr.length(),
          master_seed ^ trial};
}

}  // namespace

DetailedEval evaluate_policy(const PolicyFactory& make_policy, const InstanceSampler& sampler,
                             std::size_t trials, const MdpConfig& cfg, std::uint64_t master_seed,
                             std::size_t jobs) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  std::vector<TrialResult> results(trials);
  if (jobs <= 1) {
    Policy policy = make_policy();
    for (std::size_t i = 0; i < trials; ++i)
      results[i] = run_trial(policy, sampler, cfg, master_seed, i);
  } else {
    std::vector<std::thread> workers;
    std::size_t n_workers = std::min(jobs, trials);
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&, w] {
        Policy policy = make_policy();  // per-thread policy (memo not shared)
        for (std::size_t i = w; i < trials; i += n_workers)
          results[i] = run_trial(policy, sampler, cfg, master_seed, i);
      });
    }
    for (auto& t : workers) t.join();
  }

  DetailedEval out;
  out.report.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    out.report.outcomes.push_back(results[i].success ? 1 : 0);
    out.report.seeds.push_back(results[i].seed);
    out.report.successes += results[i].success ? 1 : 0;
    out.terminations.push_back(std::move(results[i].termination));
    out.steps.push_back(results[i].steps);
  }
  return out;
}

EvalReport success_rate(const PolicyFactory& make_policy, const InstanceSampler& sampler,
                        std::size_t trials, const MdpConfig& cfg, std::uint64_t master_seed,
                        std::size_t jobs) {
  return evaluate_policy(make_policy, sampler, trials, cfg, master_seed, jobs).report;
}

bool tests_significantly_better(const EvalReport& r1, const EvalReport& r2, double ratio,
                                double significance) {
  if (r1.trials == 0 || r2.trials == 0)
    throw ConfigError("tests_significantly_better: empty report");
  double n1 = static_cast<double>(r1.trials), n2 = static_cast<double>(r2.trials);
  double p1 = r1.rate(), p2 = r2.rate();
  double d = ratio * p1 - p2;
  double v1 = p1 * (1.0 - p1) / n1;
  double v2 = p2 * (1.0 - p2) / n2;
  double a = ratio * ratio;
  double var = a * v1 + v2;
  if (var == 0.0) return d > 0.0;  // both samples constant

  double t = d / std::sqrt(var);
  // Welch–Satterthwaite; a zero-variance side contributes nothing
  double den = 0.0;
  if (v1 > 0.0 && r1.trials > 1) den += (a * v1) * (a * v1) / (n1 - 1.0);
  if (v2 > 0.0 && r2.trials > 1) den += v2 * v2 / (n2 - 1.0);
  if (den == 0.0) return d > 0.0;
  double df = var * var / den;

  boost::math::students_t dist(df);
  double crit = boost::math::quantile(dist, 1.0 - significance);
  return t > crit;
}

void CurriculumConfig::validate() const {
  if (levels.empty()) throw ConfigError("curriculum needs at least one level");
  if (!(promotion_threshold > 0.0 && promotion_threshold <= 1.0))
    throw ConfigError("promotion threshold must be in (0,1]");
}

std::size_t curriculum_step(std::size_t current_level, const EvalReport& report,
                            const CurriculumConfig& cc) {
  if (current_level + 1 < cc.levels.size() && report.rate() >= cc.promotion_threshold)
    return current_level + 1;
  return current_level;
}

std::string eval_report_csv(const EvalReport& r, const std::vector<std::string>& terminations,
                            const std::vector<std::size_t>& steps) {
  std::ostringstream os;
  os << "# relavi-csv v1\ntrial,seed,termination,steps,success\n";
  for (std::size_t i = 0; i < r.trials; ++i) {
    os << i << "," << r.seeds[i] << "," << terminations[i] << "," << steps[i] << ","
       << int(r.outcomes[i]) << "\n";
  }
  return os.str();
}

}  // namespace relavi
