// Throughput benchmark: replicate fan-out with 1 worker (serial reference)
// vs. all hardware threads, plus raw single-organism interpreter speed.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "minivida/runner.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

vida::RunConfig bench_config(const char* out_dir) {
  vida::RunConfig cfg;
  cfg.instruction_set = "Heads";
  cfg.environment = "logic-9";
  cfg.width = 30;
  cfg.height = 30;
  cfg.updates = 300;
  cfg.replicates = 4;
  cfg.base_seed = 424242;
  cfg.log_interval = 100;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  // Raw interpreter speed: one self-replicator running solo.
  {
    const auto set = vida::build_instruction_set("Heads");
    const vida::Genome genome = vida::ancestor_genome(set);
    const vida::VmConfig vm;
    const std::uint64_t cycles = quick ? 2'000'000 : 20'000'000;
    vida::Organism org(genome, 0);
    const auto t0 = Clock::now();
    for (std::uint64_t c = 0; c < cycles; ++c) vida::execute(org, set, vm, nullptr);
    const double dt = seconds_since(t0);
    std::printf("interpreter: %llu cycles in %.3f s -> %.3g cycles/s\n",
                static_cast<unsigned long long>(cycles), dt,
                static_cast<double>(cycles) / dt);
  }

  // Replicate fan-out: serial reference vs. parallel workers.
  const std::filesystem::path tmp = std::filesystem::temp_directory_path() / "minivida-bench";
  vida::RunConfig cfg = bench_config((tmp / "serial").string().c_str());
  if (quick) cfg.updates = 100;

  cfg.workers = 1;
  auto t0 = Clock::now();
  const vida::ExperimentResult serial = vida::run_experiment(cfg);
  const double serial_s = seconds_since(t0);

#ifdef _OPENMP
  const int hw = omp_get_max_threads();
#else
  const int hw = 1;
#endif
  cfg.workers = hw;
  cfg.out_dir = (tmp / "parallel").string();
  t0 = Clock::now();
  const vida::ExperimentResult parallel = vida::run_experiment(cfg);
  const double parallel_s = seconds_since(t0);

  std::printf("replicates=%d updates=%d: serial %.3f s (%.3g cycles/s), "
              "%d workers %.3f s (%.3g cycles/s), speedup %.2fx\n",
              cfg.replicates, cfg.updates, serial_s,
              static_cast<double>(serial.total_cycles) / serial_s, hw, parallel_s,
              static_cast<double>(parallel.total_cycles) / parallel_s,
              serial_s / parallel_s);

  std::error_code ec;
  std::filesystem::remove_all(tmp, ec);
  return 0;
}
