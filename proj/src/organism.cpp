#include "minivida/organism.hpp"

#include <algorithm>
#include <stdexcept>

#include "minivida/environment.hpp"

namespace vida {

Organism::Organism(Genome genome, int task_count)
    : birth_genome(std::move(genome)),
      cur_q(static_cast<std::size_t>(task_count), 0.0f),
      last_q(static_cast<std::size_t>(task_count), 0.0f) {
  if (birth_genome.empty()) throw std::invalid_argument("empty genome");
  cpu.memory = birth_genome;
  cpu.copied.assign(cpu.memory.size(), 0);
}

Organism::~Organism() = default;
Organism::Organism(Organism&&) noexcept = default;
Organism& Organism::operator=(Organism&&) noexcept = default;

void Organism::begin_lifetime() {
  lifetime_cycles = 0;
  life_bonus = 1.0;
  done_bits[0] = done_bits[1] = 0;
  std::fill(cur_q.begin(), cur_q.end(), 0.0f);
  value_table.clear();
  table_built = false;
  fib_hits = 0;
  fib_extras = 0;
  sort_collected = 0;
  sort_scored = false;
  nav.reset();
  cpu.clear_lifetime_state();
}

bool h_alloc(Organism& org, const VmConfig& vm) {
  CpuState& cpu = org.cpu;
  if (cpu.allocated) return false;
  const std::size_t len = cpu.memory.size();
  const std::size_t target = std::min<std::size_t>(2 * len, vm.max_genome_size);
  if (target <= len) return false;
  cpu.memory.resize(target, vm.alloc_fill);
  cpu.copied.resize(target, 0);
  cpu.allocated = true;
  return true;
}

bool h_copy(Organism& org, const VmConfig& vm) {
  (void)vm;
  CpuState& cpu = org.cpu;
  if (!cpu.allocated) return false;
  const std::size_t len = cpu.memory.size();
  const std::uint32_t r = cpu.heads[kRead];
  const std::uint32_t w = cpu.heads[kWrite];
  const Inst v = cpu.memory[r];
  cpu.memory[w] = v;
  cpu.copied[w] = 1;
  cpu.push_history(v);
  cpu.heads[kRead] = (r + 1 == len) ? 0 : r + 1;
  cpu.heads[kWrite] = (w + 1 == len) ? 0 : w + 1;
  return true;
}

std::optional<Genome> h_divide(Organism& org, const VmConfig& vm) {
  CpuState& cpu = org.cpu;
  const std::size_t len = cpu.memory.size();
  const std::uint32_t r = cpu.heads[kRead];
  const std::uint32_t w = cpu.heads[kWrite];

  // Offspring is [read, write); parent keeps [write, read).  All gates are
  // checked before any state changes so a failed divide is a pure fault.
  const std::size_t child_len = (std::size_t(w) + len - r) % len;
  if (child_len == 0) return std::nullopt;
  const std::size_t parent_len = len - child_len;

  const double birth = static_cast<double>(org.birth_genome.size());
  auto ratio_ok = [&](std::size_t l) {
    const double d = static_cast<double>(l);
    return d >= vm.divide_min_ratio * birth && d <= vm.divide_max_ratio * birth;
  };
  if (!ratio_ok(child_len) || !ratio_ok(parent_len)) return std::nullopt;

  std::size_t copied_count = 0;
  for (std::size_t i = 0; i < child_len; ++i)
    copied_count += cpu.copied[(r + i) % len];
  if (static_cast<double>(copied_count) < vm.min_copied_fraction * static_cast<double>(child_len))
    return std::nullopt;

  Genome child(child_len);
  for (std::size_t i = 0; i < child_len; ++i) child[i] = cpu.memory[(r + i) % len];
  Genome remainder(parent_len);
  for (std::size_t i = 0; i < parent_len; ++i) remainder[i] = cpu.memory[(w + i) % len];

  const double gestation = static_cast<double>(std::max<std::uint64_t>(org.lifetime_cycles, 1));
  // Penalties can push the bonus arbitrarily low; a positive floor keeps
  // scheduler weights well-defined.
  const double new_merit = std::max(birth * org.life_bonus, 1e-12);
  org.merit = new_merit;
  org.fitness = new_merit / gestation;
  org.last_gestation = org.lifetime_cycles;
  ++org.divides;
  org.last_q = org.cur_q;

  org.birth_genome = std::move(remainder);
  cpu.memory = org.birth_genome;
  org.begin_lifetime();
  return child;
}

void apply_divide_mutations(Genome& genome, const MutationRates& rates,
                            const std::vector<Inst>& roster, Rng& rng,
                            std::size_t max_genome_size) {
  if (rates.substitution > 0 && !roster.empty()) {
    std::uint64_t i = rng.geometric_gap(rates.substitution);
    while (i < genome.size()) {
      genome[i] = roster[rng.below(static_cast<std::uint64_t>(roster.size()))];
      i += 1 + rng.geometric_gap(rates.substitution);
    }
  }

  if (rates.insertion > 0 && !roster.empty()) {
    // An insertion lands after the site it was drawn for.
    std::vector<std::pair<std::size_t, Inst>> inserts;
    std::uint64_t i = rng.geometric_gap(rates.insertion);
    while (i < genome.size()) {
      inserts.emplace_back(i, roster[rng.below(static_cast<std::uint64_t>(roster.size()))]);
      i += 1 + rng.geometric_gap(rates.insertion);
    }
    if (!inserts.empty()) {
      Genome next;
      next.reserve(genome.size() + inserts.size());
      std::size_t k = 0;
      for (std::size_t j = 0; j < genome.size(); ++j) {
        next.push_back(genome[j]);
        while (k < inserts.size() && inserts[k].first == j) next.push_back(inserts[k++].second);
      }
      genome = std::move(next);
    }
  }

  if (rates.deletion > 0) {
    std::vector<std::size_t> marks;
    std::uint64_t i = rng.geometric_gap(rates.deletion);
    while (i < genome.size()) {
      marks.push_back(i);
      i += 1 + rng.geometric_gap(rates.deletion);
    }
    if (marks.size() == genome.size() && !marks.empty()) marks.pop_back();
    if (!marks.empty()) {
      Genome next;
      next.reserve(genome.size() - marks.size());
      std::size_t k = 0;
      for (std::size_t j = 0; j < genome.size(); ++j) {
        if (k < marks.size() && marks[k] == j) { ++k; continue; }
        next.push_back(genome[j]);
      }
      genome = std::move(next);
    }
  }

  if (genome.size() > max_genome_size) genome.resize(max_genome_size);
}

Genome ancestor_genome(const InstructionSetConfig& set) {
  constexpr std::size_t kLength = 100;
  const bool seq_comp =
      set.in_roster(Inst::IfCopiedSeqComp) && set.in_roster(Inst::SearchSeqCompS);
  const bool lbl_comp =
      set.in_roster(Inst::IfCopiedLblComp) && set.in_roster(Inst::SearchLblCompS);
  const bool lbl_direct =
      set.in_roster(Inst::IfCopiedLblDirect) && set.in_roster(Inst::SearchLblDirectS);

  Genome g;
  g.reserve(kLength);
  auto fill_to = [&](std::size_t upto) { g.resize(upto, Inst::NopC); };

  // Complement matching advances each query nop one step in the set's nop
  // cycle, so the query that resolves to the trailing [A,B] pair is
  // [nop_{n-1}, nop-A] for a set with n nops ([C,A] only when n == 3).
  const Inst q1 = nop_of(set.nop_count - 1);
  const Inst q2 = Inst::NopA;

  if (seq_comp) {
    g = {Inst::HAlloc, Inst::SearchSeqCompS, q1, q2, Inst::MovHead, Inst::NopC};
    fill_to(kLength - 9);
    const Inst tail[] = {Inst::SearchSeqCompS, Inst::HCopy, Inst::IfCopiedSeqComp,
                         q1, q2, Inst::HDivide,
                         Inst::MovHead, Inst::NopA, Inst::NopB};
    g.insert(g.end(), std::begin(tail), std::end(tail));
  } else if (lbl_comp) {
    g = {Inst::HAlloc, Inst::SearchLblCompS, q1, q2, Inst::MovHead, Inst::NopC};
    fill_to(kLength - 10);
    const Inst tail[] = {Inst::SearchLblCompS, Inst::HCopy, Inst::IfCopiedLblComp,
                         q1, q2, Inst::HDivide,
                         Inst::MovHead, Inst::Label, Inst::NopA, Inst::NopB};
    g.insert(g.end(), std::begin(tail), std::end(tail));
  } else if (lbl_direct) {
    g = {Inst::HAlloc, Inst::SearchLblDirectS, Inst::NopA, Inst::NopB,
         Inst::MovHead, Inst::NopC};
    fill_to(kLength - 10);
    const Inst tail[] = {Inst::SearchLblDirectS, Inst::HCopy, Inst::IfCopiedLblDirect,
                         Inst::NopA, Inst::NopB, Inst::HDivide,
                         Inst::MovHead, Inst::Label, Inst::NopA, Inst::NopB};
    g.insert(g.end(), std::begin(tail), std::end(tail));
  } else {
    throw std::invalid_argument("instruction set " + set.name +
                                " lacks a copy-loop search/if-copied pair");
  }

  for (Inst i : g)
    if (!set.in_roster(i))
      throw std::logic_error("ancestor uses instruction outside set " + set.name);
  return g;
}

IncubationResult incubate(const InstructionSetConfig& set, const Genome& genome,
                          const VmConfig& vm, std::uint64_t max_cycles) {
  IncubationResult out;
  Organism org(genome, 0);
  for (std::uint64_t c = 0; c < max_cycles; ++c) {
    if (execute(org, set, vm, nullptr).divided) {
      out.divided = true;
      out.offspring = std::move(org.pending_offspring);
      out.gestation = org.last_gestation;
      return out;
    }
  }
  return out;
}

}  // namespace vida
