#pragma once

// Task environments: the logic-function families, pattern matching,
// Fibonacci output, sorting, resource-limited logic, and the sign-post
// navigation maze.  The environment owns task detection and reward
// application; organisms carry the per-lifetime interaction state.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "minivida/organism.hpp"
#include "minivida/rng.hpp"

namespace vida {

enum class EnvKind {
  Logic9,
  Logic77,
  Match12,
  Fibonacci32,
  Sort10,
  Limited9,
  Navigation,
};

const std::vector<std::string>& environment_names();
EnvKind env_kind_from_name(std::string_view name);  // throws on unknown
std::string_view env_name(EnvKind kind);

// A boolean function of 1..3 inputs, applied bitwise to 32-bit words.
struct LogicTask {
  std::string name;
  int arity;
  std::uint8_t table;  // truth table: bit m = f(input bits of m)
  int level;           // difficulty tier (1..5) for the named nine, else 0
  double multiplier;   // merit reward factor
};

// The nine one/two-input operations (echo excluded, symmetric duplicates
// merged); with `three_input` the 68 three-input operations are appended,
// each rewarding a doubling.
std::vector<LogicTask> enumerate_logic_tasks(bool three_input);

std::uint32_t eval_logic(const LogicTask& task, std::span<const std::uint32_t> args);

// Quality of an output against one 32-bit target: 2^-(32-correct) when at
// least min_bits bit positions agree, else 0.
double match_quality(std::uint32_t output, std::uint32_t target, int min_bits);

// 2^-(Kendall tau distance to descending order); 0 unless outputs are a
// permutation of inputs.
double sort10_quality(std::span<const std::uint32_t> inputs,
                      std::span<const std::uint32_t> outputs);

struct ResourcePool {
  double concentration = 0.0;
};

// conc <- conc + inflow - outflow*conc (outflow on the pre-inflow value).
void resource_step(ResourcePool& pool, double inflow, double outflow);

// Grants min(requested, cap_fraction*concentration) and deducts it.
double consume(ResourcePool& pool, double requested, double cap_fraction);

// Sign-post maze: a self-avoiding 8-direction path on a toroidal grid; each
// path cell carries one cue (1 left, 2 right, 3 forward, 4 repeat-last;
// 0 marks off-path cells and the final cell).
struct NavState {
  int grid = 0;
  int path_len = 0;                // number of moves on the full path
  std::vector<std::uint8_t> cue;   // grid*grid
  std::vector<std::int16_t> path_pos;  // path index per cell, -1 off path
  int x = 0, y = 0;
  int heading = 0;  // 0=N, clockwise, 45 degrees per step
  int progress = 0; // furthest path index entered in order
};

void generate_maze(NavState& nav, int grid, int path_moves, Rng& rng);

struct EnvironmentConfig {
  EnvKind kind = EnvKind::Logic9;
  // Limited-9 resource dynamics.
  double inflow = 100.0;
  double outflow = 0.01;
  double consume_cap = 0.0025;
  double initial_concentration = 0.0;
  // Match-12.
  std::vector<std::uint32_t> match_targets;
  int match_min_bits = 22;
  // Fibonacci-32.
  int fib_max_hits = 32;
  // Navigation.
  int nav_grid = 51;
  int nav_path = 100;
  double nav_bonus_exp = 5.0;
};

EnvironmentConfig default_environment_config(EnvKind kind);

class Environment {
 public:
  explicit Environment(EnvironmentConfig cfg);

  EnvKind kind() const { return cfg_.kind; }
  const EnvironmentConfig& config() const { return cfg_; }
  int task_count() const { return static_cast<int>(task_names_.size()); }
  const std::string& task_name(int t) const { return task_names_[t]; }
  const std::vector<LogicTask>& logic_tasks() const { return logic_; }
  std::vector<ResourcePool>& pools() { return pools_; }
  const std::vector<ResourcePool>& pools() const { return pools_; }

  // Seeds the organism's lifetime interaction state (inputs, sort list,
  // maze).  Task records are left to the organism's own lifecycle.
  void on_birth(Organism& org, Rng& env_rng) const;

  // Handles one emitted value: task detection, reward application, record
  // updates.  Single-threaded per world.
  void on_output(Organism& org, std::uint32_t value);

  // Applies resource inflow/outflow once; call at the end of each update.
  void end_update();

  std::uint32_t nav_sense(const Organism& org) const;
  void nav_move(Organism& org);
  void nav_rotate(Organism& org, int dir) const;  // -1 left, +1 right

  // Pure detection (no rewards, no once-per-lifetime gating): which logic
  // tasks does `value` satisfy over ordered selections of the given inputs.
  std::vector<std::pair<int, double>> check_output(
      std::span<const std::uint32_t> inputs_seen, std::uint32_t value) const;

 private:
  void ensure_table(Organism& org) const;
  void reward(Organism& org, int task, float q, double factor) const;

  EnvironmentConfig cfg_;
  std::vector<LogicTask> logic_;
  std::vector<ResourcePool> pools_;
  std::vector<std::string> task_names_;
};

}  // namespace vida
