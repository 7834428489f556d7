// Command-line front end: run experiments, compare result trees, trace a
// genome, and dump shipped ancestors / set definitions.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "minivida/genome_io.hpp"
#include "minivida/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, int replicates, long long seed,
            const std::string& out_dir, const std::string& set_name, int workers) {
  vida::RunConfig cfg = vida::run_config_from_file(vida::ConfigFile::parse_file(config_path));
  if (replicates > 0) cfg.replicates = replicates;
  if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!set_name.empty()) cfg.instruction_set = set_name;
  if (workers >= 0) cfg.workers = workers;

  const vida::ExperimentResult res = vida::run_experiment(cfg);
  double success_sum = 0.0;
  for (const auto& r : res.replicates) success_sum += r.task_success;
  std::printf("%d replicate(s) of %s/%s -> %s\n", cfg.replicates,
              cfg.environment.c_str(), cfg.instruction_set.c_str(), cfg.out_dir.c_str());
  std::printf("total cycles: %llu (%.3g cycles/s), mean task success %.4f\n",
              static_cast<unsigned long long>(res.total_cycles),
              res.wall_seconds > 0 ? static_cast<double>(res.total_cycles) / res.wall_seconds
                                   : 0.0,
              success_sum / static_cast<double>(res.replicates.size()));
  return 0;
}

int cmd_compare(const std::string& a_dir, const std::string& b_dir,
                const std::string& out_path) {
  const vida::SummaryFile a = vida::load_summary(a_dir);
  const vida::SummaryFile b = vida::load_summary(b_dir);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
    return 1;
  }
  const auto rows = vida::compare_sets(a, b, out);
  std::printf("environment %s: %s (a) vs %s (b), n=%zu/%zu\n", a.environment.c_str(),
              a.instruction_set.c_str(), b.instruction_set.c_str(), a.rows.size(),
              b.rows.size());
  for (const auto& r : rows)
    std::printf("  %-18s median %.4f vs %.4f  p=%.4g (one-sided a>b %.4g)%s\n",
                r.metric.c_str(), r.median_a, r.median_b, r.p_two_sided,
                r.p_one_sided_a_greater, r.holm_reject ? "  [significant]" : "");
  return 0;
}

int cmd_trace(const std::string& genome_path, const std::string& set_name,
              std::uint64_t steps, const std::string& out_path) {
  const vida::Genome genome = vida::load_genome_file(genome_path);
  const vida::InstructionSetConfig set = vida::resolve_instruction_set(set_name);
  const vida::VmConfig vm;
  if (out_path.empty()) {
    vida::trace_genome(genome, set, vm, steps, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
      return 1;
    }
    vida::trace_genome(genome, set, vm, steps, out);
  }
  return 0;
}

int cmd_ancestor(const std::string& set_name, const std::string& out_path) {
  const vida::InstructionSetConfig set = vida::resolve_instruction_set(set_name);
  const vida::Genome genome = vida::ancestor_genome(set);
  const vida::IncubationResult inc = vida::incubate(set, genome, vida::VmConfig{}, 100000);
  if (!out_path.empty()) vida::save_genome_file(out_path, genome);
  else
    for (vida::Inst i : genome) std::printf("%s\n", std::string(vida::name_of(i)).c_str());
  std::fprintf(stderr, "set %s: length %zu, gestation %llu, replicates: %s\n",
               set.name.c_str(), genome.size(),
               static_cast<unsigned long long>(inc.gestation),
               inc.divided && inc.offspring == genome ? "exact" : "NO");
  return 0;
}

int cmd_inspect(const std::string& set_name) {
  if (set_name.empty()) {
    for (const auto& name : vida::instruction_set_names()) {
      const auto set = vida::build_instruction_set(name);
      std::printf("%-18s %2zu instructions, %2d nops, %2d registers, %2d heads, %s\n",
                  name.c_str(), set.roster.size(), set.nop_count, set.register_count,
                  set.head_count,
                  set.arg_mode == vida::ArgMode::SingleNop ? "single-nop" : "fully-associative");
    }
    return 0;
  }
  const auto set = vida::resolve_instruction_set(set_name);
  std::printf("@name %s\n@arg-mode %s\n", set.name.c_str(),
              set.arg_mode == vida::ArgMode::SingleNop ? "single-nop" : "fully-associative");
  for (vida::Inst i : set.roster) std::printf("%s\n", std::string(vida::name_of(i)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minivida: digital evolution experiments over configurable virtual CPUs"};
  app.require_subcommand(1);

  std::string config_path, out_dir, set_name;
  int replicates = 0, workers = -1;
  long long seed = -1;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--replicates", replicates, "override replicate count");
  run->add_option("--seed", seed, "override base seed");
  run->add_option("--out", out_dir, "override output directory");
  run->add_option("--set", set_name, "override instruction set (name or file)");
  run->add_option("--workers", workers, "worker threads (0 = all)");

  std::string a_dir, b_dir, cmp_out;
  auto* compare = app.add_subcommand("compare", "compare two experiment output trees");
  compare->add_option("--a", a_dir, "first output directory")->required();
  compare->add_option("--b", b_dir, "second output directory")->required();
  compare->add_option("--out", cmp_out, "comparison CSV path")->required();

  std::string genome_path, trace_out;
  std::uint64_t steps = 1000;
  auto* trace = app.add_subcommand("trace", "single-organism step trace");
  trace->add_option("--genome", genome_path, "genome file")->required();
  trace->add_option("--set", set_name, "instruction set (name or file)")->required();
  trace->add_option("--steps", steps, "cycles to execute");
  trace->add_option("--out", trace_out, "trace CSV path (default stdout)");

  std::string anc_out;
  auto* ancestor = app.add_subcommand("ancestor", "emit the shipped ancestor for a set");
  ancestor->add_option("--set", set_name, "instruction set (name or file)")->required();
  ancestor->add_option("--out", anc_out, "genome file path (default stdout)");

  auto* inspect = app.add_subcommand("inspect", "describe a set (or list all)");
  inspect->add_option("--set", set_name, "instruction set (name or file)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, replicates, seed, out_dir, set_name, workers);
    if (compare->parsed()) return cmd_compare(a_dir, b_dir, cmp_out);
    if (trace->parsed()) return cmd_trace(genome_path, set_name, steps, trace_out);
    if (ancestor->parsed()) return cmd_ancestor(set_name, anc_out);
    if (inspect->parsed()) return cmd_inspect(set_name);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
