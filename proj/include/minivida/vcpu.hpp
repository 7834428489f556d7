#pragma once

// Virtual CPU state and the single-cycle interpreter.  Every instruction
// costs exactly one cycle; nops consumed as arguments are skipped by the
// instruction-pointer advance, not executed.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "minivida/isa.hpp"

namespace vida {

struct Organism;
struct Environment;

inline constexpr int kMaxRegisters = 16;
inline constexpr int kMaxHeads = 16;
inline constexpr int kStackDepth = 10;
inline constexpr int kHistoryDepth = 16;  // > max label + its label-prefix slot

enum HeadId : std::uint8_t { kIp = 0, kRead = 1, kWrite = 2, kFlow = 3 };

// Fixed-depth stack: pushing onto a full stack discards the bottom entry,
// popping an empty one yields 0.
struct Stack {
  std::array<std::int32_t, kStackDepth> slot{};
  std::uint8_t top = kStackDepth - 1;
  std::uint8_t depth = 0;

  void push(std::int32_t x) {
    top = static_cast<std::uint8_t>((top + 1) % kStackDepth);
    slot[top] = x;
    if (depth < kStackDepth) ++depth;
  }
  std::int32_t pop() {
    if (depth == 0) return 0;
    std::int32_t x = slot[top];
    top = static_cast<std::uint8_t>((top + kStackDepth - 1) % kStackDepth);
    --depth;
    return x;
  }
  std::int32_t peek() const { return depth ? slot[top] : 0; }
};

struct VmConfig {
  std::size_t max_genome_size = kDefaultMaxGenomeSize;
  int max_label_size = kMaxLabelSize;
  double divide_min_ratio = 0.5;   // offspring/remainder vs. birth length
  double divide_max_ratio = 2.0;
  double min_copied_fraction = 0.5;
  Inst alloc_fill = Inst::NopA;
  bool jmp_head_flow_default = false;  // Table-literal variant, off by default
};

struct CpuState {
  std::array<std::int32_t, kMaxRegisters> regs{};
  std::array<std::uint32_t, kMaxHeads> heads{};
  Stack stacks[2];
  std::uint8_t active_stack = 0;
  std::vector<Inst> memory;
  std::vector<std::uint8_t> copied;  // per-site: written by h-copy
  std::array<Inst, kHistoryDepth> copy_history{};
  std::uint8_t history_len = 0;   // saturates at kHistoryDepth
  std::uint8_t history_next = 0;  // ring write slot
  std::uint32_t input_cursor = 0;
  bool allocated = false;

  std::size_t size() const { return memory.size(); }
  std::uint32_t wrap(std::uint64_t p) const {
    return static_cast<std::uint32_t>(p % memory.size());
  }
  void push_history(Inst i) {
    copy_history[history_next] = i;
    history_next = static_cast<std::uint8_t>((history_next + 1) % kHistoryDepth);
    if (history_len < kHistoryDepth) ++history_len;
  }
  // k = 1 is the most recently copied instruction.
  Inst history_back(int k) const {
    return copy_history[(history_next + kHistoryDepth - k) % kHistoryDepth];
  }
  void clear_lifetime_state() {
    regs.fill(0);
    heads.fill(0);
    stacks[0] = Stack{};
    stacks[1] = Stack{};
    active_stack = 0;
    history_len = 0;
    history_next = 0;
    input_cursor = 0;
    allocated = false;
    copied.assign(memory.size(), 0);
  }
};

// --- argument resolution (exposed for tests and tracing) -------------------

// Operand registers for an instruction with the given default tuple.  The
// first nop rebases the whole tuple (wrapping within the base trio for
// nop-A..C, within the full register file for higher nops); in
// fully-associative mode later nops override later slots positionally.
std::array<std::uint8_t, 3> resolve_args(std::span<const std::uint8_t> default_tuple,
                                         std::span<const Inst> nops, ArgMode mode,
                                         int register_count);

std::uint8_t resolve_head(std::span<const Inst> nops, std::uint8_t default_head,
                          int head_count);

// Constant encoded by a nop run: starts at 1; nop-B/C/D shift left by 1/2/3,
// nop-A toggles the sign bit, anything else is ignored.
std::int32_t ifx_constant(std::span<const Inst> nops);

// Number of trailing nops the instruction consumes given the run available.
int consumed_nops(Inst inst, int run_len, ArgMode mode, int max_label);

// True when the tail of the copy history matches the pattern under the given
// matching rule; lbl scope additionally requires the entry before the run to
// be the label instruction.  Empty patterns never match.
bool if_copied(const CpuState& cpu, std::span<const Inst> pattern, int nop_count,
               MatchMode match, bool lbl_scope);

// Static decode of the instruction at `pos` (defaults applied, nop run
// resolved); drives the trace output and never mutates state.
struct DecodedInst {
  Inst op = Inst::NopA;
  int consumed = 0;                    // trailing nops skipped by the advance
  std::array<std::uint8_t, 3> regs{};  // resolved register slots
  int reg_count = 0;                   // 0 when the op takes no registers
  std::uint8_t head = 0;
  bool has_head = false;
  std::vector<Inst> label;  // the consumed run, for label-argument ops
};
DecodedInst decode_at(const CpuState& cpu, const InstructionSetConfig& set,
                      const VmConfig& vm, std::uint32_t pos);

struct StepResult {
  bool divided = false;
};

// Executes one cycle.  `env` may be null (tracing/incubation without task
// rewards); inputs then come from the organism's stored input list.
StepResult execute(Organism& org, const InstructionSetConfig& set,
                   const VmConfig& vm, Environment* env);

}  // namespace vida
