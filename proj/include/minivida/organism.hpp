#pragma once

// Organism lifecycle: allocation/copy/divide with validity gates, divide
// mutations, merit bookkeeping, and the shipped ancestor genomes.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "minivida/isa.hpp"
#include "minivida/rng.hpp"
#include "minivida/vcpu.hpp"

namespace vida {

struct NavState;

struct MutationRates {
  double substitution = 2.5e-3;  // per site, at divide
  double insertion = 5e-4;
  double deletion = 5e-4;
};

// Entry of the per-lifetime output-value lookup table for logic tasks:
// outputting `value` counts for `task` once at least `min_seen` inputs have
// been consumed.
struct TaskTableEntry {
  std::uint32_t value;
  std::uint16_t task;
  std::uint8_t min_seen;
};

struct Organism {
  explicit Organism(Genome genome, int task_count);
  ~Organism();
  Organism(Organism&&) noexcept;
  Organism& operator=(Organism&&) noexcept;

  CpuState cpu;
  Genome birth_genome;  // genome at the start of the current lifetime

  // Scheduling merit: inherited at birth, multiplied by each reward factor
  // mid-lifetime, recomputed from this lifetime's record at every divide.
  double merit = 1.0;
  double fitness = 0.0;  // merit/gestation of the last completed replication
  double life_bonus = 1.0;  // product of reward factors earned this lifetime

  std::uint64_t lifetime_cycles = 0;
  std::uint64_t last_gestation = 0;
  std::uint32_t divides = 0;
  std::uint32_t faults = 0;
  std::uint64_t outputs_total = 0;
  std::uint32_t last_output = 0;

  // Task-quality records: cur accumulates this lifetime, last reports the
  // most recently completed gestation (inherited at birth).
  std::vector<float> cur_q;
  std::vector<float> last_q;
  std::uint64_t done_bits[2] = {0, 0};  // once-per-lifetime gate

  // Environment interaction state for the current lifetime.
  std::array<std::uint32_t, 10> inputs{};
  int input_count = 0;
  std::vector<TaskTableEntry> value_table;
  bool table_built = false;
  std::uint32_t fib_hits = 0;
  std::uint64_t fib_extras = 0;
  std::array<std::uint32_t, 10> sort_outputs{};
  int sort_collected = 0;
  bool sort_scored = false;
  std::unique_ptr<NavState> nav;

  Genome pending_offspring;  // filled when a step reports divided

  bool task_done(int t) const { return done_bits[t >> 6] >> (t & 63) & 1; }
  void mark_task(int t) { done_bits[t >> 6] |= std::uint64_t(1) << (t & 63); }

  std::uint32_t next_input() {
    if (input_count == 0) return 0;
    std::uint32_t v = inputs[cpu.input_cursor % input_count];
    ++cpu.input_cursor;
    return v;
  }
  int inputs_seen() const {
    return static_cast<int>(std::min<std::uint32_t>(cpu.input_cursor, input_count));
  }

  // Clears all per-lifetime state except the genome/memory (called at birth
  // and after a successful divide, before the environment re-seeds inputs).
  void begin_lifetime();
};

// Extends memory to min(2L, max) filling with the configured instruction;
// faults (returns false) when already allocated or at the cap.
bool h_alloc(Organism& org, const VmConfig& vm);

// Copies the instruction under READ to WRITE, records it in the copy
// history, advances both heads; faults before h-alloc.
bool h_copy(Organism& org, const VmConfig& vm);

// Splits memory at [READ, WRITE): the slice becomes the offspring, the
// remainder becomes the parent's next-lifetime genome.  Gates (checked
// before any state change): offspring and remainder lengths within
// [min_ratio, max_ratio] x birth length, offspring non-empty and within the
// genome cap, and at least min_copied_fraction of offspring sites written by
// h-copy.  On success the parent is reset and its merit/fitness recomputed.
std::optional<Genome> h_divide(Organism& org, const VmConfig& vm);

// Substitution, insertion, then deletion passes, each per-site; the result
// is clamped to [1, max_genome] sites.
void apply_divide_mutations(Genome& genome, const MutationRates& rates,
                            const std::vector<Inst>& roster, Rng& rng,
                            std::size_t max_genome);

// Self-replicator of length 100 for any shipped set (three skeleton
// families, picked by the set's copy-detection capabilities).
Genome ancestor_genome(const InstructionSetConfig& set);

// Runs a lone organism without an environment until it divides (or the cycle
// budget runs out); used for seeding fitness and replication tests.
struct IncubationResult {
  bool divided = false;
  Genome offspring;
  std::uint64_t gestation = 0;
};
IncubationResult incubate(const InstructionSetConfig& set, const Genome& genome,
                          const VmConfig& vm, std::uint64_t max_cycles);

}  // namespace vida
