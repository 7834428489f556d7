#include "minivida/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "minivida/genome_io.hpp"

namespace vida {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string rep_dir_name(int replicate) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "rep-%03d", replicate);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

void write_log_row(std::string& out, const World& world) {
  const WorldStats st = world.stats();
  out += std::to_string(world.update_count());
  out += ',';
  out += std::to_string(st.population);
  out += ',';
  out += fmt(st.mean_merit);
  out += ',';
  out += fmt(st.log2_mean_fitness);
  out += ',';
  out += fmt(st.task_success);
  for (int c : st.task_counts) {
    out += ',';
    out += std::to_string(c);
  }
  for (const auto& pool : world.environment().pools()) {
    out += ',';
    out += fmt(pool.concentration);
  }
  out += '\n';
}

ReplicateSummary run_one_replicate(const RunConfig& cfg, const InstructionSetConfig& set,
                                   int replicate) {
  WorldConfig wc;
  wc.width = cfg.width;
  wc.height = cfg.height;
  wc.cycles_per_update = cfg.cycles_per_update;
  wc.mutation = cfg.mutation;
  wc.vm = cfg.vm;
  wc.seed = cfg.base_seed + static_cast<std::uint64_t>(replicate);

  World world(wc, set, cfg.env);
  world.seed_ancestor();

  std::string log;
  log += kCsvHeader;
  log += '\n';
  log += "update,population,mean_merit,log2_mean_fitness,task_success";
  for (int t = 0; t < world.environment().task_count(); ++t) {
    log += ",task_";
    log += world.environment().task_name(t);
  }
  for (std::size_t p = 0; p < world.environment().pools().size(); ++p) {
    log += ",res_";
    log += world.environment().task_name(static_cast<int>(p));
  }
  log += '\n';
  write_log_row(log, world);

  for (int u = 1; u <= cfg.updates; ++u) {
    world.run_update();
    if (u % cfg.log_interval == 0 || u == cfg.updates) write_log_row(log, world);
  }

  const fs::path dir = fs::path(cfg.out_dir) / rep_dir_name(replicate);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "updates.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "updates.csv").string());
    out << log;
  }

  const WorldStats st = world.stats();
  ReplicateSummary sum;
  sum.replicate = replicate;
  sum.seed = wc.seed;
  sum.updates = world.update_count();
  sum.population = st.population;
  sum.log2_mean_fitness = st.log2_mean_fitness;
  sum.task_success = st.task_success;
  sum.total_cycles = world.total_cycles();
  return sum;
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](const char* field, auto v) {
    if (v <= 0)
      throw std::invalid_argument(std::string("run config: ") + field + " must be positive");
  };
  positive("world.width", width);
  positive("world.height", height);
  positive("run.replicates", replicates);
  positive("run.log_interval", log_interval);
  positive("world.cycles_per_update", cycles_per_update);
  if (updates < 0) throw std::invalid_argument("run config: run.updates must be >= 0");
  if (workers < 0) throw std::invalid_argument("run config: run.workers must be >= 0");
  auto rate = [](const char* field, double r) {
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument(std::string("run config: ") + field + " must be in [0,1]");
  };
  rate("mutation.substitution", mutation.substitution);
  rate("mutation.insertion", mutation.insertion);
  rate("mutation.deletion", mutation.deletion);
  if (out_dir.empty()) throw std::invalid_argument("run config: run.out_dir must be set");
}

RunConfig run_config_from_file(const ConfigFile& file) {
  RunConfig cfg;
  cfg.instruction_set = file.get("isa", "instruction_set", cfg.instruction_set);
  cfg.environment = file.get("environment", "name", cfg.environment);
  cfg.width = static_cast<int>(file.get_int("world", "width", cfg.width));
  cfg.height = static_cast<int>(file.get_int("world", "height", cfg.height));
  cfg.cycles_per_update =
      static_cast<int>(file.get_int("world", "cycles_per_update", cfg.cycles_per_update));
  cfg.updates = static_cast<int>(file.get_int("run", "updates", cfg.updates));
  cfg.replicates = static_cast<int>(file.get_int("run", "replicates", cfg.replicates));
  cfg.base_seed = file.get_u64("run", "seed", cfg.base_seed);
  cfg.log_interval = static_cast<int>(file.get_int("run", "log_interval", cfg.log_interval));
  cfg.workers = static_cast<int>(file.get_int("run", "workers", cfg.workers));
  cfg.out_dir = file.get("run", "out_dir", cfg.out_dir);
  cfg.mutation.substitution =
      file.get_double("mutation", "substitution", cfg.mutation.substitution);
  cfg.mutation.insertion = file.get_double("mutation", "insertion", cfg.mutation.insertion);
  cfg.mutation.deletion = file.get_double("mutation", "deletion", cfg.mutation.deletion);
  cfg.vm.max_genome_size = file.get_u64("world", "max_genome_size", cfg.vm.max_genome_size);

  cfg.env = default_environment_config(env_kind_from_name(cfg.environment));
  cfg.env.inflow = file.get_double("environment", "inflow", cfg.env.inflow);
  cfg.env.outflow = file.get_double("environment", "outflow", cfg.env.outflow);
  cfg.env.consume_cap = file.get_double("environment", "consume_cap", cfg.env.consume_cap);
  cfg.env.initial_concentration =
      file.get_double("environment", "initial_concentration", cfg.env.initial_concentration);
  if (file.has("environment", "match_targets"))
    cfg.env.match_targets = file.get_u32_list("environment", "match_targets");
  cfg.env.match_min_bits =
      static_cast<int>(file.get_int("environment", "match_min_bits", cfg.env.match_min_bits));
  cfg.env.fib_max_hits =
      static_cast<int>(file.get_int("environment", "fib_max_hits", cfg.env.fib_max_hits));
  cfg.env.nav_grid = static_cast<int>(file.get_int("environment", "nav_grid", cfg.env.nav_grid));
  cfg.env.nav_path = static_cast<int>(file.get_int("environment", "nav_path", cfg.env.nav_path));
  cfg.env.nav_bonus_exp =
      file.get_double("environment", "nav_bonus_exp", cfg.env.nav_bonus_exp);
  return cfg;
}

ExperimentResult run_experiment(const RunConfig& config) {
  config.validate();
  const InstructionSetConfig set = resolve_instruction_set(config.instruction_set);
  fs::create_directories(config.out_dir);

  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.replicates.resize(static_cast<std::size_t>(config.replicates));
  std::vector<std::string> errors(static_cast<std::size_t>(config.replicates));

#ifdef _OPENMP
  const int threads = config.workers > 0 ? config.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
  for (int r = 0; r < config.replicates; ++r) {
    try {
      result.replicates[static_cast<std::size_t>(r)] = run_one_replicate(config, set, r);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(r)] = e.what();
    }
  }
  for (int r = 0; r < config.replicates; ++r)
    if (!errors[static_cast<std::size_t>(r)].empty())
      throw std::runtime_error("replicate " + std::to_string(r) + ": " +
                               errors[static_cast<std::size_t>(r)]);

  std::string sum;
  sum += kCsvHeader;
  sum += '\n';
  sum += "environment,instruction_set,replicate,seed,updates,population,"
         "log2_mean_fitness,task_success,total_cycles\n";
  for (const auto& row : result.replicates) {
    sum += config.environment;
    sum += ',';
    sum += config.instruction_set;
    sum += ',';
    sum += std::to_string(row.replicate);
    sum += ',';
    sum += std::to_string(row.seed);
    sum += ',';
    sum += std::to_string(row.updates);
    sum += ',';
    sum += std::to_string(row.population);
    sum += ',';
    sum += fmt(row.log2_mean_fitness);
    sum += ',';
    sum += fmt(row.task_success);
    sum += ',';
    sum += std::to_string(row.total_cycles);
    sum += '\n';
    result.total_cycles += row.total_cycles;
  }
  {
    std::ofstream out(fs::path(config.out_dir) / "summary.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary.csv under " + config.out_dir);
    out << sum;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SummaryFile load_summary(const std::string& dir) {
  const fs::path path = fs::path(dir) / "summary.csv";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error(path.string() + ": missing version header");
  if (!std::getline(in, line))
    throw std::runtime_error(path.string() + ": missing column header");
  const auto cols = split_csv(line);
  const std::vector<std::string> expect = {
      "environment", "instruction_set", "replicate", "seed", "updates",
      "population", "log2_mean_fitness", "task_success", "total_cycles"};
  if (cols != expect) throw std::runtime_error(path.string() + ": unexpected columns");

  SummaryFile out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != expect.size())
      throw std::runtime_error(path.string() + ": malformed row: " + line);
    if (out.rows.empty()) {
      out.environment = f[0];
      out.instruction_set = f[1];
    }
    ReplicateSummary row;
    row.replicate = std::stoi(f[2]);
    row.seed = std::stoull(f[3]);
    row.updates = std::stoull(f[4]);
    row.population = std::stoi(f[5]);
    row.log2_mean_fitness = std::stod(f[6]);
    row.task_success = std::stod(f[7]);
    row.total_cycles = std::stoull(f[8]);
    out.rows.push_back(row);
  }
  if (out.rows.empty()) throw std::runtime_error(path.string() + ": no replicate rows");
  return out;
}

std::vector<ComparisonRow> compare_sets(const SummaryFile& a, const SummaryFile& b,
                                        std::ostream& out) {
  if (a.environment != b.environment)
    throw std::invalid_argument("mismatched environments: " + a.environment + " vs " +
                                b.environment);

  struct Metric {
    const char* name;
    double ReplicateSummary::*field;
  };
  const Metric metrics[] = {{"log2_mean_fitness", &ReplicateSummary::log2_mean_fitness},
                            {"task_success", &ReplicateSummary::task_success}};

  std::vector<ComparisonRow> rows;
  std::vector<double> two_sided;
  for (const Metric& m : metrics) {
    std::vector<double> xa, xb;
    for (const auto& r : a.rows) xa.push_back(r.*(m.field));
    for (const auto& r : b.rows) xb.push_back(r.*(m.field));

    ComparisonRow row;
    row.metric = m.name;
    row.median_a = median(xa);
    row.median_b = median(xb);
    Rng rng_a(0x6d696e6976696461ull, std::string("compare:") + m.name + ":a");
    Rng rng_b(0x6d696e6976696461ull, std::string("compare:") + m.name + ":b");
    row.ci_a = bootstrap_ci_median(xa, 10000, rng_a);
    row.ci_b = bootstrap_ci_median(xb, 10000, rng_b);
    row.p_two_sided = rank_sum(xa, xb, Tail::TwoSided).p;
    row.p_one_sided_a_greater = rank_sum(xa, xb, Tail::AGreater).p;
    two_sided.push_back(row.p_two_sided);
    rows.push_back(row);
  }
  const auto flags = holm_reject(two_sided, 0.05);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].holm_reject = flags[i] != 0;

  out << kCsvHeader << '\n';
  out << "metric,median_a,median_b,ci_a_lo,ci_a_hi,ci_b_lo,ci_b_hi,"
         "p_two_sided,p_one_sided_a_greater,holm_reject\n";
  for (const auto& r : rows) {
    out << r.metric << ',' << fmt(r.median_a) << ',' << fmt(r.median_b) << ','
        << fmt(r.ci_a.lo) << ',' << fmt(r.ci_a.hi) << ',' << fmt(r.ci_b.lo) << ','
        << fmt(r.ci_b.hi) << ',' << fmt(r.p_two_sided) << ','
        << fmt(r.p_one_sided_a_greater) << ',' << (r.holm_reject ? 1 : 0) << '\n';
  }
  return rows;
}

void trace_genome(const Genome& genome, const InstructionSetConfig& set,
                  const VmConfig& vm, std::uint64_t steps, std::ostream& out) {
  Organism org(genome, 0);
  out << kCsvHeader << '\n';
  out << "cycle,ip,instruction,args,registers,stack_top\n";
  for (std::uint64_t c = 0; c < steps; ++c) {
    const std::uint32_t ip = org.cpu.heads[kIp];
    const DecodedInst d = decode_at(org.cpu, set, vm, ip);
    out << c << ',' << ip << ',' << name_of(d.op) << ',';
    if (d.reg_count > 0) {
      for (int i = 0; i < d.reg_count; ++i) {
        if (i) out << ';';
        out << static_cast<char>('A' + d.regs[static_cast<std::size_t>(i)]);
      }
    } else if (d.has_head) {
      static const char* kHeadNames[4] = {"IP", "READ", "WRITE", "FLOW"};
      if (d.head < 4) out << kHeadNames[d.head];
      else out << 'H' << int(d.head);
    } else {
      for (std::size_t i = 0; i < d.label.size(); ++i) {
        if (i) out << ';';
        out << static_cast<char>('A' + nop_index(d.label[i]));
      }
    }
    out << ',';
    for (int i = 0; i < set.register_count; ++i) {
      if (i) out << ';';
      out << org.cpu.regs[static_cast<std::size_t>(i)];
    }
    out << ',' << org.cpu.stacks[org.cpu.active_stack].peek() << '\n';
    execute(org, set, vm, nullptr);
  }
}

}  // namespace vida
