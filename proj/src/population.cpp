#include "minivida/population.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vida {

World::World(WorldConfig cfg, InstructionSetConfig set, EnvironmentConfig env_cfg)
    : cfg_(cfg),
      set_(std::move(set)),
      env_(std::move(env_cfg)),
      world_rng_(cfg.seed, "world"),
      env_rng_(cfg.seed, "env") {
  if (cfg_.width <= 0 || cfg_.height <= 0)
    throw std::invalid_argument("world dimensions must be positive");
  const int n = cell_count();
  cells_.resize(n);
  credit_.assign(n, 0.0);
  budget_.assign(n, 0);
  if (env_.kind() == EnvKind::Navigation)
    set_ = with_navigation_instructions(set_);
}

void World::seed_at_center(const Genome& genome) {
  if (seeded_) throw std::logic_error("world already seeded");
  const IncubationResult inc = incubate(set_, genome, cfg_.vm, cfg_.incubation_limit);
  if (!inc.divided)
    throw std::runtime_error("seed genome failed to replicate within " +
                             std::to_string(cfg_.incubation_limit) + " cycles");

  const int cell = (cfg_.height / 2) * cfg_.width + cfg_.width / 2;
  auto org = std::make_unique<Organism>(genome, env_.task_count());
  org->merit = static_cast<double>(genome.size());
  org->last_gestation = inc.gestation;
  org->fitness = org->merit / static_cast<double>(inc.gestation);
  env_.on_birth(*org, env_rng_);
  cells_[cell] = std::move(org);
  population_ = 1;
  seeded_ = true;
}

void World::seed_ancestor() { seed_at_center(ancestor_genome(set_)); }
void World::seed_genome(const Genome& genome) { seed_at_center(genome); }

void World::handle_divide(int parent_cell) {
  Organism& parent = *cells_[parent_cell];
  Genome child = std::move(parent.pending_offspring);
  parent.pending_offspring = Genome{};

  apply_divide_mutations(child, cfg_.mutation, set_.roster, world_rng_,
                         cfg_.vm.max_genome_size);

  // Uniform draw over the 8 toroidal neighbors; any occupant is replaced.
  const int px = parent_cell % cfg_.width;
  const int py = parent_cell / cfg_.width;
  static constexpr int kNx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int kNy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const int pick = static_cast<int>(world_rng_.below(8));
  const int tx = (px + kNx[pick] + cfg_.width) % cfg_.width;
  const int ty = (py + kNy[pick] + cfg_.height) % cfg_.height;
  const int target = ty * cfg_.width + tx;

  if (!cells_[target]) ++population_;
  auto baby = std::make_unique<Organism>(std::move(child), env_.task_count());
  baby->merit = parent.merit;
  baby->fitness = parent.fitness;
  baby->last_gestation = parent.last_gestation;
  baby->last_q = parent.last_q;
  env_.on_birth(*baby, env_rng_);
  cells_[target] = std::move(baby);
  ++births_;

  // The parent starts a fresh lifetime with a fresh input list.
  env_.on_birth(parent, env_rng_);
}

void stride_allocate(std::span<const double> merits, std::int64_t total_cycles,
                     std::vector<double>& credit, std::vector<int>& budget) {
  const std::size_t n = merits.size();
  double total_merit = 0.0;
  for (double m : merits)
    if (m > 0.0) total_merit += m;
  if (total_merit <= 0.0) return;

  // Each occupant accrues its merit share, whole cycles are granted, and the
  // fractional remainder carries to the next call.
  std::int64_t granted = 0;
  std::vector<int> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(merits[i] > 0.0)) { budget[i] = 0; continue; }
    credit[i] += static_cast<double>(total_cycles) * merits[i] / total_merit;
    double whole = std::floor(credit[i]);
    if (whole < 0) whole = 0;
    budget[i] = static_cast<int>(whole);
    credit[i] -= whole;
    granted += budget[i];
    order.push_back(static_cast<int>(i));
  }
  std::int64_t leftover = total_cycles - granted;
  if (leftover > 0) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (credit[a] != credit[b]) return credit[a] > credit[b];
      return a < b;
    });
    for (std::int64_t k = 0; k < leftover && k < static_cast<std::int64_t>(order.size()); ++k) {
      const int i = order[static_cast<std::size_t>(k)];
      ++budget[i];
      credit[i] -= 1.0;
    }
  } else if (leftover < 0) {
    // Accrued fractions can round the grand total one past the target; the
    // smallest remaining credits give a cycle back.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (credit[a] != credit[b]) return credit[a] < credit[b];
      return a > b;
    });
    for (int i : order) {
      if (leftover == 0) break;
      if (budget[i] == 0) continue;
      --budget[i];
      credit[i] += 1.0;
      ++leftover;
    }
  }
}

void World::run_update() {
  if (!seeded_) throw std::logic_error("world not seeded");
  const int n = cell_count();
  const int live = population_;
  if (live == 0) return;

  merits_.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    if (cells_[i]) merits_[static_cast<std::size_t>(i)] = cells_[i]->merit;
  const std::int64_t total_cycles = static_cast<std::int64_t>(cfg_.cycles_per_update) * live;
  stride_allocate(merits_, total_cycles, credit_, budget_);

  // Budgets stay attached to cells: an organism born into a later cell
  // spends whatever that cell has left this update.
  for (int i = 0; i < n; ++i) {
    while (budget_[i] > 0) {
      --budget_[i];
      if (!cells_[i]) continue;  // replaced from elsewhere; cycle still counts
      ++cycles_;
      if (execute(*cells_[i], set_, cfg_.vm, &env_).divided) handle_divide(i);
    }
  }

  env_.end_update();
  ++updates_;
}

WorldStats World::stats() const {
  WorldStats st;
  const int t = env_.task_count();
  st.task_counts.assign(static_cast<std::size_t>(t), 0);
  double merit_sum = 0.0, fitness_sum = 0.0, gest_sum = 0.0, len_sum = 0.0, q_sum = 0.0;
  for (const auto& cell : cells_) {
    if (!cell) continue;
    ++st.population;
    merit_sum += cell->merit;
    st.max_merit = std::max(st.max_merit, cell->merit);
    fitness_sum += cell->fitness;
    gest_sum += static_cast<double>(cell->last_gestation);
    len_sum += static_cast<double>(cell->birth_genome.size());
    for (int k = 0; k < t; ++k) {
      const float q = cell->last_q[static_cast<std::size_t>(k)];
      if (q > 0.0f) {
        ++st.task_counts[static_cast<std::size_t>(k)];
        q_sum += q;
      }
    }
  }
  if (st.population == 0) return st;
  const double inv = 1.0 / st.population;
  st.mean_merit = merit_sum * inv;
  st.mean_fitness = fitness_sum * inv;
  st.log2_mean_fitness = std::log2(st.mean_fitness);
  st.mean_gestation = gest_sum * inv;
  st.mean_genome_length = len_sum * inv;
  st.task_success = q_sum * inv / t;
  return st;
}

}  // namespace vida
