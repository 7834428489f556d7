#pragma once

// Instruction identities, instruction-set composition, and label machinery.
// A genome is a circular sequence of instructions drawn from one set's
// roster; labels are runs of nop instructions read off the genome and
// matched either directly or through the cyclic complement
// (nop-A -> nop-B -> ... -> nop-A).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vida {

enum class Inst : std::uint8_t {
  // Nops first so is_nop() is a single compare. Registers/heads beyond the
  // first three exist only in the wider register-series sets.
  NopA = 0, NopB, NopC, NopD, NopE, NopF, NopG, NopH,
  NopI, NopJ, NopK, NopL, NopM, NopN, NopO, NopP,

  Add, Sub, Inc, Dec, Nand, ShiftL, ShiftR,
  IfNEqu, IfLess,
  IfCopiedSeqComp, IfCopiedSeqDirect, IfCopiedLblComp, IfCopiedLblDirect,
  SearchSeqCompS, SearchSeqDirectS, SearchSeqDirectF, SearchSeqDirectB,
  SearchLblCompS, SearchLblDirectS, SearchLblDirectF, SearchLblDirectB,
  MovHead, JmpHead, GetHead, SetFlow,
  HAlloc, HCopy, HDivide,
  Push, Pop, SwapStk, Swap,
  IO, Input, Output,
  Label,
  Goto, GotoIfNEqu, GotoIfLess,
  IfNot0, IfEqu0, IfGtr0, IfLess0, IfGtrX, IfEquX,
  MovHeadIfNEqu, MovHeadIfLess,
  SgMove, SgRotateL, SgRotateR, SgSense,

  Count
};

inline constexpr std::size_t kInstCount = static_cast<std::size_t>(Inst::Count);
inline constexpr int kMaxNops = 16;
inline constexpr int kMaxLabelSize = 10;
inline constexpr std::size_t kDefaultMaxGenomeSize = 2048;

constexpr bool is_nop(Inst i) { return static_cast<std::uint8_t>(i) < kMaxNops; }
constexpr int nop_index(Inst i) { return static_cast<int>(i); }
constexpr Inst nop_of(int idx) { return static_cast<Inst>(idx); }

// How an instruction consumes trailing nops.
enum class ArgKind : std::uint8_t {
  None,    // consumes nothing
  Reg1,    // one nop selects the register
  Head1,   // one nop selects the head
  Reg2,    // two operand slots (default BX, CX)
  Reg3,    // three operand slots (default BX, BX, CX)
  LabelArg // reads the full trailing nop run (all argument modes)
};

struct InstTraits {
  ArgKind args;
  std::uint8_t default_slot;  // first operand register, or head id for Head1
};

const InstTraits& traits(Inst i);
std::string_view name_of(Inst i);

// Parses a canonical name or an accepted alias (h-search, if-copied).
std::optional<Inst> inst_from_name(std::string_view name);

enum class ArgMode : std::uint8_t { SingleNop, FullyAssociative };
enum class MatchMode : std::uint8_t { Complement, Direct };
enum class SearchDir : std::uint8_t { FromStart, Forward, Backward };

using Genome = std::vector<Inst>;

struct InstructionSetConfig {
  std::string name;
  std::vector<Inst> roster;          // ascending by enum value
  std::array<bool, kInstCount> contains{};
  int nop_count = 3;
  int register_count = 3;
  int head_count = 4;
  ArgMode arg_mode = ArgMode::FullyAssociative;
  bool has_label = false;

  bool in_roster(Inst i) const { return contains[static_cast<std::size_t>(i)]; }
};

// All shipped set names, in presentation order.
const std::vector<std::string>& instruction_set_names();
bool is_instruction_set_name(std::string_view name);

// Throws std::invalid_argument on an unknown name.
InstructionSetConfig build_instruction_set(std::string_view name);

// Custom roster (deduplicated, sorted); throws when no nops are present.
InstructionSetConfig build_instruction_set(std::string_view name,
                                           std::vector<Inst> roster, ArgMode mode);

// Navigation runs add the sign-post instructions to whatever set is active.
InstructionSetConfig with_navigation_instructions(InstructionSetConfig set);

// Reads the nop run starting at `start` (circularly), capped at
// min(max_len, code length) so an all-nop genome terminates.
std::vector<Inst> read_nop_sequence(std::span<const Inst> code, std::size_t start,
                                    std::size_t max_len = kMaxLabelSize);

// Each nop advances one step around the nop cycle of the active set.
std::vector<Inst> cyclic_complement(std::span<const Inst> pattern, int nop_count);

struct LabelHit {
  bool found = false;
  std::size_t start = 0;  // first position of the matched run
  std::size_t end = 0;    // position just past the run (mod length)
};

// Scans `code` for the pattern (complemented first under Complement
// matching).  `exclude_start` suppresses the searching instruction's own
// trailing label so a label never matches itself; pass npos when calling
// outside an interpreter context.
LabelHit find_label(std::span<const Inst> code, std::span<const Inst> pattern,
                    int nop_count, std::size_t origin, SearchDir dir,
                    MatchMode match, bool require_label_prefix,
                    std::size_t exclude_start = SIZE_MAX);

}  // namespace vida
