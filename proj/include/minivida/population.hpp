#pragma once

// The toroidal world: merit-proportional stride scheduling, the update
// clock, birth placement, and replacement death.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "minivida/environment.hpp"
#include "minivida/isa.hpp"
#include "minivida/organism.hpp"
#include "minivida/rng.hpp"
#include "minivida/vcpu.hpp"

namespace vida {

struct WorldConfig {
  int width = 60;
  int height = 60;
  int cycles_per_update = 30;  // average per living organism
  MutationRates mutation;
  VmConfig vm;
  std::uint64_t seed = 1;
  std::uint64_t incubation_limit = 100000;  // cycle budget for seeding fitness
};

struct WorldStats {
  int population = 0;
  double mean_merit = 0.0;
  double max_merit = 0.0;
  double mean_fitness = 0.0;
  double log2_mean_fitness = 0.0;
  double mean_gestation = 0.0;
  double mean_genome_length = 0.0;
  double task_success = 0.0;       // population mean of sum(q)/task_count
  std::vector<int> task_counts;    // organisms whose last record has q > 0
};

// Grants whole CPU cycles proportional to merit, carrying fractional credit
// across calls.  merits[i] <= 0 marks an empty cell (no grant, credit
// untouched).  The grand total granted is exactly total_cycles: leftovers go
// to the largest remaining credits (ties to the lower index) and overshoot
// from previously accrued fractions is taken back from the smallest (ties to
// the higher index).
void stride_allocate(std::span<const double> merits, std::int64_t total_cycles,
                     std::vector<double>& credit, std::vector<int>& budget);

class World {
 public:
  World(WorldConfig cfg, InstructionSetConfig set, EnvironmentConfig env_cfg);

  // Places the ancestor at the grid center with merit = genome length and a
  // fitness record from a sandboxed solo run.  Throws std::logic_error on a
  // second call and std::runtime_error if the ancestor cannot replicate.
  void seed_ancestor();
  void seed_genome(const Genome& genome);

  // Executes exactly cycles_per_update * N cycles, distributed over living
  // organisms proportionally to merit; steps environment resources once.
  void run_update();

  WorldStats stats() const;

  int cell_count() const { return cfg_.width * cfg_.height; }
  const Organism* at(int cell) const { return cells_[cell].get(); }
  Environment& environment() { return env_; }
  const Environment& environment() const { return env_; }
  const InstructionSetConfig& instruction_set() const { return set_; }
  const WorldConfig& config() const { return cfg_; }
  int population() const { return population_; }
  std::uint64_t total_cycles() const { return cycles_; }
  std::uint64_t total_births() const { return births_; }
  std::uint64_t update_count() const { return updates_; }

 private:
  void seed_at_center(const Genome& genome);
  void handle_divide(int parent_cell);

  WorldConfig cfg_;
  InstructionSetConfig set_;
  Environment env_;
  Rng world_rng_;  // placement and mutation draws
  Rng env_rng_;    // input lists and mazes
  std::vector<std::unique_ptr<Organism>> cells_;
  std::vector<double> credit_;  // persistent stride remainders, per cell
  std::vector<int> budget_;     // cycles attached to each cell this update
  std::vector<double> merits_;  // scratch for the allocator
  int population_ = 0;
  std::uint64_t cycles_ = 0;
  std::uint64_t births_ = 0;
  std::uint64_t updates_ = 0;
  bool seeded_ = false;
};

}  // namespace vida
