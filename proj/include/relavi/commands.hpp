#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relavi/evaluation.hpp"
#include "relavi/search.hpp"
#include "relavi/trainer.hpp"

namespace relavi {

// ---------------------------------------------------------------------------
// Run configuration: one structured text file (key = value sections),
// overridable by CLI flags (flags win).
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string domain_path;
  std::string problem_path;   // fixed instance...
  std::string generator;      // ...or named generator ("fileworld") + curriculum levels
  std::string features_path;  // initial weighted feature list
  std::string out_dir = ".";

  MdpConfig mdp;
  AviConfig avi;
  SearchConfig search;
  CurriculumConfig curriculum;

  std::size_t eval_trials = 100;
  std::size_t feature_every = 0;  // grow the feature set every M iterations (0 = never)
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  void validate_for_train() const;
};

RunConfig parse_config_file(const std::string& text);

struct Snapshot {
  std::size_t iteration = 0;
  std::uint64_t seed = 0;
  std::size_t level = 0;
  std::map<std::size_t, int> locked_signs;
  std::optional<double> training_success;
  std::vector<WeightedFeature> features;
};

std::string format_snapshot(const Snapshot& s);
Snapshot parse_snapshot(const std::string& text, const ProblemInstance& inst,
                        std::size_t quantifier_bound);

/// temp-file + rename; a killed run never leaves a truncated artifact.
void write_file_atomic(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// Command workflows (the CLI is a thin wrapper over these)
// ---------------------------------------------------------------------------

struct TrainResult {
  LinearValueFn value_fn;
  std::vector<IterationRecord> log;
  std::map<std::size_t, int> locked_signs;
  std::size_t final_level = 0;
  std::string snapshot_path;
  std::string log_path;
};

TrainResult cmd_train(const RunConfig& cfg, const std::string& resume_snapshot = {});

struct EvalResult {
  EvalReport report;
  std::string report_path;
};

EvalResult cmd_eval(const RunConfig& cfg, const std::string& snapshot_path);

/// Evaluates one feature expression against a state dump; returns the count.
long cmd_feature(const std::string& domain_path, const std::string& problem_path,
                 const std::string& expr_text, const std::string& state_dump_path,
                 std::size_t quantifier_bound);

struct CompareResult {
  EvalReport report_a, report_b;
  bool a_significantly_better = false;
};

CompareResult cmd_compare(const RunConfig& cfg, const std::string& snapshot_a,
                          const std::string& snapshot_b);

struct EnumerateResult {
  ScoredCandidate best;
  std::string csv_path;
};

EnumerateResult cmd_enumerate(const RunConfig& cfg, const std::string& snapshot_path = {});

}  // namespace relavi
