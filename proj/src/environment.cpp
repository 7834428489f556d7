#include "minivida/environment.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "minivida/organism.hpp"

namespace vida {

namespace {

constexpr std::array<std::uint32_t, 32> kFibonacci = {
    1u,      1u,      2u,      3u,      5u,      8u,      13u,     21u,
    34u,     55u,     89u,     144u,    233u,    377u,    610u,    987u,
    1597u,   2584u,   4181u,   6765u,   10946u,  17711u,  28657u,  46368u,
    75025u,  121393u, 196418u, 317811u, 514229u, 832040u, 1346269u, 2178309u};

// Row m of a truth table assigns bit i of m to argument i.
std::uint8_t permute_rows(std::uint8_t table, const std::array<int, 3>& p) {
  std::uint8_t out = 0;
  for (int m = 0; m < 8; ++m) {
    int src = 0;
    for (int i = 0; i < 3; ++i) src |= ((m >> p[i]) & 1) << i;
    out |= std::uint8_t(((table >> src) & 1) << m);
  }
  return out;
}

bool depends_on_all3(std::uint8_t table) {
  for (int i = 0; i < 3; ++i) {
    bool dep = false;
    for (int m = 0; m < 8; ++m)
      if (((table >> m) & 1) != ((table >> (m ^ (1 << i))) & 1)) { dep = true; break; }
    if (!dep) return false;
  }
  return true;
}

constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

double pool_equilibrium(const EnvironmentConfig& cfg) {
  return cfg.outflow > 0 ? cfg.inflow / cfg.outflow : 0.0;
}

}  // namespace

std::string_view env_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::Logic9: return "logic-9";
    case EnvKind::Logic77: return "logic-77";
    case EnvKind::Match12: return "match-12";
    case EnvKind::Fibonacci32: return "fib-32";
    case EnvKind::Sort10: return "sort-10";
    case EnvKind::Limited9: return "limited-9";
    case EnvKind::Navigation: return "navigation";
  }
  return "?";
}

const std::vector<std::string>& environment_names() {
  static const std::vector<std::string> names = {
      "logic-9", "logic-77", "match-12", "fib-32", "sort-10", "limited-9", "navigation"};
  return names;
}

EnvKind env_kind_from_name(std::string_view name) {
  if (name == "logic-9") return EnvKind::Logic9;
  if (name == "logic-77") return EnvKind::Logic77;
  if (name == "match-12") return EnvKind::Match12;
  if (name == "fib-32" || name == "fibonacci-32") return EnvKind::Fibonacci32;
  if (name == "sort-10") return EnvKind::Sort10;
  if (name == "limited-9") return EnvKind::Limited9;
  if (name == "navigation") return EnvKind::Navigation;
  throw std::invalid_argument("unknown environment: " + std::string(name));
}

std::vector<LogicTask> enumerate_logic_tasks(bool three_input) {
  std::vector<LogicTask> tasks = {
      {"not", 1, 0b01, 1, 2.0},    {"nand", 2, 0b0111, 1, 2.0},
      {"and", 2, 0b1000, 2, 4.0},  {"orn", 2, 0b1011, 2, 4.0},
      {"or", 2, 0b1110, 3, 8.0},   {"andn", 2, 0b0010, 3, 8.0},
      {"nor", 2, 0b0001, 4, 16.0}, {"xor", 2, 0b0110, 4, 16.0},
      {"equ", 2, 0b1001, 5, 32.0}};
  if (!three_input) return tasks;

  // Three-input functions are enumerated as canonical representatives under
  // argument permutation, keeping only those that depend on all three inputs.
  static const std::array<std::array<int, 3>, 6> perms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int t = 0; t < 256; ++t) {
    const auto table = static_cast<std::uint8_t>(t);
    if (!depends_on_all3(table)) continue;
    std::uint8_t canon = table;
    for (const auto& p : perms) canon = std::min(canon, permute_rows(table, p));
    if (canon != table) continue;
    char name[16];
    std::snprintf(name, sizeof name, "3in-0x%02x", t);
    tasks.push_back({name, 3, table, 0, 2.0});
  }
  return tasks;
}

std::uint32_t eval_logic(const LogicTask& task, std::span<const std::uint32_t> args) {
  std::uint32_t out = 0;
  const int rows = 1 << task.arity;
  for (int m = 0; m < rows; ++m) {
    if (!((task.table >> m) & 1)) continue;
    std::uint32_t term = 0xFFFFFFFFu;
    for (int i = 0; i < task.arity; ++i)
      term &= ((m >> i) & 1) ? args[i] : ~args[i];
    out |= term;
  }
  return out;
}

double match_quality(std::uint32_t output, std::uint32_t target, int min_bits) {
  const int correct = 32 - std::popcount(output ^ target);
  if (correct < min_bits) return 0.0;
  return std::exp2(static_cast<double>(correct - 32));
}

double sort10_quality(std::span<const std::uint32_t> inputs,
                      std::span<const std::uint32_t> outputs) {
  if (inputs.size() != outputs.size()) return 0.0;
  std::vector<std::uint32_t> a(inputs.begin(), inputs.end());
  std::vector<std::uint32_t> b(outputs.begin(), outputs.end());
  std::sort(a.begin(), a.end());
  std::vector<std::uint32_t> c(b);
  std::sort(c.begin(), c.end());
  if (a != c) return 0.0;
  int inversions = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (b[i] < b[j]) ++inversions;
  return std::exp2(-static_cast<double>(inversions));
}

void resource_step(ResourcePool& pool, double inflow, double outflow) {
  pool.concentration += inflow - outflow * pool.concentration;
}

double consume(ResourcePool& pool, double requested, double cap_fraction) {
  const double cap = cap_fraction * pool.concentration;
  const double granted = std::max(0.0, std::min(requested, cap));
  pool.concentration -= granted;
  return granted;
}

void generate_maze(NavState& nav, int grid, int path_moves, Rng& rng) {
  const int cells = grid * grid;
  nav.grid = grid;
  nav.path_len = path_moves;
  std::vector<std::uint8_t> dirs(static_cast<std::size_t>(path_moves));

  for (int attempt = 0; attempt < 1000; ++attempt) {
    nav.cue.assign(static_cast<std::size_t>(cells), 0);
    nav.path_pos.assign(static_cast<std::size_t>(cells), -1);
    int x = grid / 2, y = grid / 2;
    int d = static_cast<int>(rng.below(8));
    nav.path_pos[static_cast<std::size_t>(y * grid + x)] = 0;

    bool ok = true;
    for (int step = 0; step < path_moves; ++step) {
      // Turns are limited to 45 degrees per move; the walk restarts when it
      // traps itself.
      const int first = static_cast<int>(rng.below(3)) - 1;
      bool placed = false;
      for (int k = 0; k < 3 && !placed; ++k) {
        const int delta = (first + k + 4) % 3 - 1;
        const int nd = (d + delta + 8) & 7;
        const int nx = (x + kDx[nd] + grid) % grid;
        const int ny = (y + kDy[nd] + grid) % grid;
        if (nav.path_pos[static_cast<std::size_t>(ny * grid + nx)] != -1) continue;
        d = nd;
        x = nx;
        y = ny;
        dirs[static_cast<std::size_t>(step)] = static_cast<std::uint8_t>(nd);
        nav.path_pos[static_cast<std::size_t>(y * grid + x)] =
            static_cast<std::int16_t>(step + 1);
        placed = true;
      }
      if (!placed) { ok = false; break; }
    }
    if (!ok) continue;

    // Cue at path cell i describes the move leaving it: 1 left, 2 right,
    // 3 straight, 4 same cue as the previous cell.  The end cell keeps 0.
    int px = grid / 2, py = grid / 2;
    std::uint8_t prev_raw = 0;
    for (int i = 0; i < path_moves; ++i) {
      const int turn = (dirs[static_cast<std::size_t>(i)] -
                        (i ? dirs[static_cast<std::size_t>(i - 1)] : dirs[0]) + 8) & 7;
      const std::uint8_t raw = (turn == 7) ? 1 : (turn == 1) ? 2 : 3;
      nav.cue[static_cast<std::size_t>(py * grid + px)] =
          (i > 0 && raw == prev_raw) ? 4 : raw;
      prev_raw = raw;
      px = (px + kDx[dirs[static_cast<std::size_t>(i)]] + grid) % grid;
      py = (py + kDy[dirs[static_cast<std::size_t>(i)]] + grid) % grid;
    }

    nav.x = grid / 2;
    nav.y = grid / 2;
    nav.heading = dirs[0];
    nav.progress = 0;
    return;
  }
  throw std::runtime_error("maze generation failed");
}

EnvironmentConfig default_environment_config(EnvKind kind) {
  EnvironmentConfig cfg;
  cfg.kind = kind;
  if (kind == EnvKind::Match12)
    cfg.match_targets = {7u,      23u,      97u,      389u,     1531u,   6229u,
                         24851u,  99991u,   401407u,  1605631u, 6422111u, 25690133u};
  return cfg;
}

Environment::Environment(EnvironmentConfig cfg) : cfg_(std::move(cfg)) {
  switch (cfg_.kind) {
    case EnvKind::Logic9:
    case EnvKind::Limited9:
      logic_ = enumerate_logic_tasks(false);
      break;
    case EnvKind::Logic77:
      logic_ = enumerate_logic_tasks(true);
      break;
    default:
      break;
  }
  if (!logic_.empty()) {
    for (const auto& t : logic_) task_names_.push_back(t.name);
  } else if (cfg_.kind == EnvKind::Match12) {
    if (cfg_.match_targets.size() != 12)
      throw std::invalid_argument("match-12 requires 12 targets");
    for (int i = 1; i <= 12; ++i) task_names_.push_back("match-" + std::to_string(i));
  } else if (cfg_.kind == EnvKind::Fibonacci32) {
    for (int i = 1; i <= 32; ++i) task_names_.push_back("fib-" + std::to_string(i));
  } else if (cfg_.kind == EnvKind::Sort10) {
    task_names_.push_back("sort");
  } else {
    task_names_.push_back("nav");
  }
  if (cfg_.kind == EnvKind::Limited9)
    pools_.assign(logic_.size(), ResourcePool{cfg_.initial_concentration});
}

void Environment::on_birth(Organism& org, Rng& rng) const {
  const int n = (cfg_.kind == EnvKind::Sort10) ? 10 : 3;
  org.input_count = n;
  for (int i = 0; i < n; ++i) {
    for (;;) {
      const std::uint32_t v = rng.next_u32();
      bool dup = false;
      for (int j = 0; j < i; ++j)
        if (org.inputs[static_cast<std::size_t>(j)] == v) { dup = true; break; }
      if (!dup) { org.inputs[static_cast<std::size_t>(i)] = v; break; }
    }
  }
  if (cfg_.kind == EnvKind::Navigation) {
    org.nav = std::make_unique<NavState>();
    generate_maze(*org.nav, cfg_.nav_grid, cfg_.nav_path, rng);
  }
}

void Environment::ensure_table(Organism& org) const {
  if (org.table_built) return;
  org.table_built = true;
  org.value_table.clear();
  const int n = org.input_count;
  std::uint32_t args[3];
  for (std::size_t t = 0; t < logic_.size(); ++t) {
    const LogicTask& task = logic_[t];
    auto add = [&](int min_seen) {
      org.value_table.push_back(
          {eval_logic(task, std::span<const std::uint32_t>(args, task.arity)),
           static_cast<std::uint16_t>(t), static_cast<std::uint8_t>(min_seen)});
    };
    if (task.arity == 1) {
      for (int a = 0; a < n; ++a) {
        args[0] = org.inputs[static_cast<std::size_t>(a)];
        add(a + 1);
      }
    } else if (task.arity == 2) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          args[0] = org.inputs[static_cast<std::size_t>(a)];
          args[1] = org.inputs[static_cast<std::size_t>(b)];
          add(std::max(a, b) + 1);
        }
    } else {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            if (a == b || a == c || b == c) continue;
            args[0] = org.inputs[static_cast<std::size_t>(a)];
            args[1] = org.inputs[static_cast<std::size_t>(b)];
            args[2] = org.inputs[static_cast<std::size_t>(c)];
            add(std::max({a, b, c}) + 1);
          }
    }
  }
  std::sort(org.value_table.begin(), org.value_table.end(),
            [](const TaskTableEntry& a, const TaskTableEntry& b) {
              if (a.value != b.value) return a.value < b.value;
              if (a.task != b.task) return a.task < b.task;
              return a.min_seen < b.min_seen;
            });
  org.value_table.erase(
      std::unique(org.value_table.begin(), org.value_table.end(),
                  [](const TaskTableEntry& a, const TaskTableEntry& b) {
                    return a.value == b.value && a.task == b.task;
                  }),
      org.value_table.end());
}

void Environment::reward(Organism& org, int task, float q, double factor) const {
  if (factor > 0.0 && factor != 1.0) {
    org.life_bonus *= factor;
    org.merit *= factor;
  }
  if (task >= 0 && task < static_cast<int>(org.cur_q.size()))
    org.cur_q[static_cast<std::size_t>(task)] =
        std::max(org.cur_q[static_cast<std::size_t>(task)], q);
}

void Environment::on_output(Organism& org, std::uint32_t value) {
  switch (cfg_.kind) {
    case EnvKind::Logic9:
    case EnvKind::Logic77:
    case EnvKind::Limited9: {
      ensure_table(org);
      const TaskTableEntry key{value, 0, 0};
      auto lo = std::lower_bound(org.value_table.begin(), org.value_table.end(), key,
                                 [](const TaskTableEntry& a, const TaskTableEntry& b) {
                                   return a.value < b.value;
                                 });
      const int seen = org.inputs_seen();
      for (; lo != org.value_table.end() && lo->value == value; ++lo) {
        if (lo->min_seen > seen) continue;
        const int task = lo->task;
        if (cfg_.kind == EnvKind::Limited9) {
          const double granted =
              consume(pools_[static_cast<std::size_t>(task)], 1e30, cfg_.consume_cap);
          if (granted <= 0.0) continue;
          const double eq = pool_equilibrium(cfg_);
          const double full = cfg_.consume_cap * eq;  // grant at equilibrium
          const double frac = full > 0 ? granted / full : 0.0;
          const double factor =
              std::exp2(frac * std::log2(logic_[static_cast<std::size_t>(task)].multiplier) / 10.0);
          reward(org, task, static_cast<float>(std::min(frac, 1.0)), factor);
        } else {
          if (org.task_done(task)) continue;
          org.mark_task(task);
          reward(org, task, 1.0f, logic_[static_cast<std::size_t>(task)].multiplier);
        }
      }
      break;
    }
    case EnvKind::Match12: {
      int best = 0;
      int best_dist = 33;
      for (std::size_t i = 0; i < cfg_.match_targets.size(); ++i) {
        const int dist = std::popcount(value ^ cfg_.match_targets[i]);
        if (dist < best_dist) { best_dist = dist; best = static_cast<int>(i); }
      }
      if (org.task_done(best)) break;
      const double q = match_quality(value, cfg_.match_targets[static_cast<std::size_t>(best)],
                                     cfg_.match_min_bits);
      if (q <= 0.0) break;
      org.mark_task(best);
      // Match bonuses accumulate additively: merit at divide is
      // length * (1 + sum of match qualities).
      const double next_bonus = org.life_bonus + q;
      reward(org, best, static_cast<float>(q), next_bonus / org.life_bonus);
      break;
    }
    case EnvKind::Fibonacci32: {
      if (static_cast<int>(org.fib_hits) < cfg_.fib_max_hits) {
        if (value == kFibonacci[static_cast<std::size_t>(org.fib_hits)]) {
          const int task = static_cast<int>(org.fib_hits);
          ++org.fib_hits;
          org.mark_task(task);
          reward(org, task, 1.0f, 2.0);
        }
      } else {
        // Output beyond the completed sequence drags the divide bonus down
        // without touching the live merit.
        ++org.fib_extras;
        org.life_bonus *= std::exp2(-0.5);
      }
      break;
    }
    case EnvKind::Sort10: {
      if (org.sort_scored || org.sort_collected >= 10) break;
      org.sort_outputs[org.sort_collected++] = value;
      if (org.sort_collected == 10) {
        org.sort_scored = true;
        const double q = sort10_quality(
            std::span<const std::uint32_t>(org.inputs.data(), 10),
            std::span<const std::uint32_t>(org.sort_outputs.data(), 10));
        if (q > 0.0) {
          org.mark_task(0);
          reward(org, 0, static_cast<float>(q), std::exp2(q));
        }
      }
      break;
    }
    case EnvKind::Navigation:
      break;
  }
}

void Environment::end_update() {
  for (auto& pool : pools_) resource_step(pool, cfg_.inflow, cfg_.outflow);
}

std::uint32_t Environment::nav_sense(const Organism& org) const {
  if (!org.nav) return 0;
  const NavState& nav = *org.nav;
  return nav.cue[static_cast<std::size_t>(nav.y * nav.grid + nav.x)];
}

void Environment::nav_rotate(Organism& org, int dir) const {
  if (!org.nav) return;
  org.nav->heading = (org.nav->heading + dir + 8) & 7;
}

void Environment::nav_move(Organism& org) {
  if (!org.nav) return;
  NavState& nav = *org.nav;
  nav.x = (nav.x + kDx[nav.heading] + nav.grid) % nav.grid;
  nav.y = (nav.y + kDy[nav.heading] + nav.grid) % nav.grid;
  const std::int16_t pos = nav.path_pos[static_cast<std::size_t>(nav.y * nav.grid + nav.x)];
  if (pos == nav.progress + 1) {
    const double q_old = static_cast<double>(nav.progress) / nav.path_len;
    ++nav.progress;
    const double q_new = static_cast<double>(nav.progress) / nav.path_len;
    reward(org, 0, static_cast<float>(q_new),
           std::exp2(cfg_.nav_bonus_exp * (q_new - q_old)));
  }
}

std::vector<std::pair<int, double>> Environment::check_output(
    std::span<const std::uint32_t> inputs_seen, std::uint32_t value) const {
  std::vector<std::pair<int, double>> out;
  if (!logic_.empty()) {
    const int n = static_cast<int>(inputs_seen.size());
    std::uint32_t args[3];
    for (std::size_t t = 0; t < logic_.size(); ++t) {
      const LogicTask& task = logic_[t];
      bool hit = false;
      if (task.arity == 1) {
        for (int a = 0; a < n && !hit; ++a) {
          args[0] = inputs_seen[static_cast<std::size_t>(a)];
          hit = eval_logic(task, {args, 1}) == value;
        }
      } else if (task.arity == 2) {
        for (int a = 0; a < n && !hit; ++a)
          for (int b = 0; b < n && !hit; ++b) {
            if (a == b) continue;
            args[0] = inputs_seen[static_cast<std::size_t>(a)];
            args[1] = inputs_seen[static_cast<std::size_t>(b)];
            hit = eval_logic(task, {args, 2}) == value;
          }
      } else {
        for (int a = 0; a < n && !hit; ++a)
          for (int b = 0; b < n && !hit; ++b)
            for (int c = 0; c < n && !hit; ++c) {
              if (a == b || a == c || b == c) continue;
              args[0] = inputs_seen[static_cast<std::size_t>(a)];
              args[1] = inputs_seen[static_cast<std::size_t>(b)];
              args[2] = inputs_seen[static_cast<std::size_t>(c)];
              hit = eval_logic(task, {args, 3}) == value;
            }
      }
      if (hit) out.emplace_back(static_cast<int>(t), 1.0);
    }
  } else if (cfg_.kind == EnvKind::Match12) {
    int best = 0;
    int best_dist = 33;
    for (std::size_t i = 0; i < cfg_.match_targets.size(); ++i) {
      const int dist = std::popcount(value ^ cfg_.match_targets[i]);
      if (dist < best_dist) { best_dist = dist; best = static_cast<int>(i); }
    }
    const double q = match_quality(value, cfg_.match_targets[static_cast<std::size_t>(best)],
                                   cfg_.match_min_bits);
    if (q > 0.0) out.emplace_back(best, q);
  }
  return out;
}

}  // namespace vida
