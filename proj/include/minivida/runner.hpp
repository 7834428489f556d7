#pragma once

// Experiment orchestration: run-config parsing, replicate fan-out over a
// worker pool, per-update CSV logs, summaries, and set comparisons.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "minivida/analysis.hpp"
#include "minivida/config.hpp"
#include "minivida/environment.hpp"
#include "minivida/population.hpp"

namespace vida {

inline constexpr const char* kCsvHeader = "# minivida csv 1";

struct RunConfig {
  std::string instruction_set = "Heads";
  std::string environment = "logic-9";
  int width = 60;
  int height = 60;
  int updates = 100000;
  int replicates = 10;
  std::uint64_t base_seed = 1;
  int log_interval = 100;
  int cycles_per_update = 30;
  int workers = 0;  // 0: all hardware threads
  MutationRates mutation;
  VmConfig vm;
  EnvironmentConfig env;  // built from `environment` plus overrides
  std::string out_dir = "out";

  void validate() const;  // throws std::invalid_argument with the field path
};

// Section layout: [run], [world], [isa], [mutation], [environment].
RunConfig run_config_from_file(const ConfigFile& file);

struct ReplicateSummary {
  int replicate = 0;
  std::uint64_t seed = 0;
  std::uint64_t updates = 0;
  int population = 0;
  double log2_mean_fitness = 0.0;
  double task_success = 0.0;
  std::uint64_t total_cycles = 0;
};

struct ExperimentResult {
  std::vector<ReplicateSummary> replicates;
  double wall_seconds = 0.0;       // not written to any file
  std::uint64_t total_cycles = 0;
};

// Runs config.replicates worlds (seed = base_seed + index) under an OpenMP
// worker pool, writing rep-NNN/updates.csv logs plus summary.csv under
// config.out_dir.  Output bytes depend only on (config, seeds).
ExperimentResult run_experiment(const RunConfig& config);

// Reads <dir>/summary.csv back; validates the version header.
struct SummaryFile {
  std::string environment;
  std::string instruction_set;
  std::vector<ReplicateSummary> rows;
};
SummaryFile load_summary(const std::string& dir);

// Medians, bootstrap CIs, rank-sum p (two-sided and one-sided a>b), and
// Holm flags for each metric; written as CSV to `out` and returned.
struct ComparisonRow {
  std::string metric;
  double median_a = 0.0, median_b = 0.0;
  Interval ci_a, ci_b;
  double p_two_sided = 1.0;
  double p_one_sided_a_greater = 1.0;
  bool holm_reject = false;
};
std::vector<ComparisonRow> compare_sets(const SummaryFile& a, const SummaryFile& b,
                                        std::ostream& out);

// One line per executed cycle: cycle, IP, instruction, resolved args,
// registers, active stack top.  Runs without an environment.
void trace_genome(const Genome& genome, const InstructionSetConfig& set,
                  const VmConfig& vm, std::uint64_t steps, std::ostream& out);

}  // namespace vida
