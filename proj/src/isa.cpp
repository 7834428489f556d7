#include "minivida/isa.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace vida {

namespace {

constexpr std::uint8_t kRegB = 1;
constexpr std::uint8_t kRegC = 2;
constexpr std::uint8_t kHeadIp = 0;

struct NamedInst {
  std::string_view name;
  InstTraits tr;
};

// Indexed by Inst value.
constexpr NamedInst kInstTable[kInstCount] = {
    {"nop-A", {ArgKind::None, 0}}, {"nop-B", {ArgKind::None, 0}},
    {"nop-C", {ArgKind::None, 0}}, {"nop-D", {ArgKind::None, 0}},
    {"nop-E", {ArgKind::None, 0}}, {"nop-F", {ArgKind::None, 0}},
    {"nop-G", {ArgKind::None, 0}}, {"nop-H", {ArgKind::None, 0}},
    {"nop-I", {ArgKind::None, 0}}, {"nop-J", {ArgKind::None, 0}},
    {"nop-K", {ArgKind::None, 0}}, {"nop-L", {ArgKind::None, 0}},
    {"nop-M", {ArgKind::None, 0}}, {"nop-N", {ArgKind::None, 0}},
    {"nop-O", {ArgKind::None, 0}}, {"nop-P", {ArgKind::None, 0}},

    {"add", {ArgKind::Reg3, kRegB}},
    {"sub", {ArgKind::Reg3, kRegB}},
    {"inc", {ArgKind::Reg1, kRegB}},
    {"dec", {ArgKind::Reg1, kRegB}},
    {"nand", {ArgKind::Reg3, kRegB}},
    {"shift-l", {ArgKind::Reg1, kRegB}},
    {"shift-r", {ArgKind::Reg1, kRegB}},
    {"if-n-equ", {ArgKind::Reg2, kRegB}},
    {"if-less", {ArgKind::Reg2, kRegB}},
    {"if-copied-seq-comp", {ArgKind::LabelArg, 0}},
    {"if-copied-seq-direct", {ArgKind::LabelArg, 0}},
    {"if-copied-lbl-comp", {ArgKind::LabelArg, 0}},
    {"if-copied-lbl-direct", {ArgKind::LabelArg, 0}},
    {"search-seq-comp-s", {ArgKind::LabelArg, 0}},
    {"search-seq-direct-s", {ArgKind::LabelArg, 0}},
    {"search-seq-direct-f", {ArgKind::LabelArg, 0}},
    {"search-seq-direct-b", {ArgKind::LabelArg, 0}},
    {"search-lbl-comp-s", {ArgKind::LabelArg, 0}},
    {"search-lbl-direct-s", {ArgKind::LabelArg, 0}},
    {"search-lbl-direct-f", {ArgKind::LabelArg, 0}},
    {"search-lbl-direct-b", {ArgKind::LabelArg, 0}},
    {"mov-head", {ArgKind::Head1, kHeadIp}},
    {"jmp-head", {ArgKind::Head1, kHeadIp}},
    {"get-head", {ArgKind::Head1, kHeadIp}},
    {"set-flow", {ArgKind::Reg1, kRegC}},
    {"h-alloc", {ArgKind::None, 0}},
    {"h-copy", {ArgKind::None, 0}},
    {"h-divide", {ArgKind::None, 0}},
    {"push", {ArgKind::Reg1, kRegB}},
    {"pop", {ArgKind::Reg1, kRegB}},
    {"swap-stk", {ArgKind::None, 0}},
    {"swap", {ArgKind::Reg2, kRegB}},
    {"IO", {ArgKind::Reg1, kRegB}},
    {"input", {ArgKind::Reg1, kRegB}},
    {"output", {ArgKind::Reg1, kRegB}},
    {"label", {ArgKind::None, 0}},
    {"goto", {ArgKind::LabelArg, 0}},
    {"goto-if-n-equ", {ArgKind::LabelArg, 0}},
    {"goto-if-less", {ArgKind::LabelArg, 0}},
    {"if-not-0", {ArgKind::Reg1, kRegB}},
    {"if-equ-0", {ArgKind::Reg1, kRegB}},
    {"if-gtr-0", {ArgKind::Reg1, kRegB}},
    {"if-less-0", {ArgKind::Reg1, kRegB}},
    {"if-gtr-x", {ArgKind::LabelArg, 0}},
    {"if-equ-x", {ArgKind::LabelArg, 0}},
    {"mov-head-if-n-equ", {ArgKind::Head1, kHeadIp}},
    {"mov-head-if-less", {ArgKind::Head1, kHeadIp}},
    {"sg-move", {ArgKind::None, 0}},
    {"sg-rotate-l", {ArgKind::None, 0}},
    {"sg-rotate-r", {ArgKind::None, 0}},
    {"sg-sense", {ArgKind::Reg1, kRegB}},
};

const std::map<std::string_view, Inst>& name_lookup() {
  static const std::map<std::string_view, Inst> m = [] {
    std::map<std::string_view, Inst> t;
    for (std::size_t i = 0; i < kInstCount; ++i)
      t.emplace(kInstTable[i].name, static_cast<Inst>(i));
    // Aliases in common use for the default-set variants.
    t.emplace("h-search", Inst::SearchSeqCompS);
    t.emplace("if-copied", Inst::IfCopiedSeqComp);
    t.emplace("io", Inst::IO);
    return t;
  }();
  return m;
}

using InstList = std::vector<Inst>;

const InstList kHeadsRoster = {
    Inst::NopA, Inst::NopB, Inst::NopC,
    Inst::Add, Inst::Sub, Inst::Inc, Inst::Dec, Inst::Nand,
    Inst::ShiftL, Inst::ShiftR,
    Inst::IfNEqu, Inst::IfLess, Inst::IfCopiedSeqComp,
    Inst::SearchSeqCompS,
    Inst::MovHead, Inst::JmpHead, Inst::GetHead, Inst::SetFlow,
    Inst::HAlloc, Inst::HCopy, Inst::HDivide,
    Inst::Push, Inst::Pop, Inst::SwapStk, Inst::Swap,
    Inst::IO,
};

InstList operator+(InstList a, const InstList& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

InstList operator-(InstList a, const InstList& b) {
  std::erase_if(a, [&](Inst i) {
    return std::find(b.begin(), b.end(), i) != b.end();
  });
  return a;
}

InstList extra_nops(int register_count) {
  InstList out;
  for (int i = 3; i < register_count; ++i) out.push_back(nop_of(i));
  return out;
}

// Label-series sets extend the six-register roster, drop set-flow, and swap
// the copy-detection/search pair for the variants named in the set.
const InstList kLabelBase =
    (kHeadsRoster + extra_nops(6)) -
    InstList{Inst::IfCopiedSeqComp, Inst::SearchSeqCompS, Inst::SetFlow};

const InstList kIf0Group = {Inst::IfNot0, Inst::IfEqu0, Inst::IfGtr0, Inst::IfLess0};
const InstList kIfXGroup = {Inst::IfGtrX, Inst::IfEquX};
const InstList kMvHGroup = {Inst::MovHeadIfNEqu, Inst::MovHeadIfLess};

InstList roster_for(std::string_view name) {
  auto reg_series = [](int n) { return kHeadsRoster + extra_nops(n); };
  const InstList label_seq_direct =
      kLabelBase + InstList{Inst::Label, Inst::IfCopiedLblDirect, Inst::IfCopiedSeqDirect,
                            Inst::SearchLblDirectS, Inst::SearchSeqDirectS};
  const InstList split_io =
      (label_seq_direct - InstList{Inst::IO}) + InstList{Inst::Input, Inst::Output};
  const InstList search_directional =
      split_io + InstList{Inst::SearchLblDirectF, Inst::SearchLblDirectB,
                          Inst::SearchSeqDirectF, Inst::SearchSeqDirectB};

  if (name == "Heads" || name == "FA") return kHeadsRoster;
  if (name == "R4") return reg_series(4);
  if (name == "R5") return reg_series(5);
  if (name == "R6") return reg_series(6);
  if (name == "R7") return reg_series(7);
  if (name == "R8") return reg_series(8);
  if (name == "R12") return reg_series(12);
  if (name == "R16") return reg_series(16);
  if (name == "Label")
    return kLabelBase + InstList{Inst::Label, Inst::IfCopiedLblComp, Inst::SearchLblCompS};
  if (name == "Label-Direct")
    return kLabelBase + InstList{Inst::Label, Inst::IfCopiedLblDirect, Inst::SearchLblDirectS};
  if (name == "Label-Both")
    return kLabelBase + InstList{Inst::Label, Inst::IfCopiedLblComp, Inst::IfCopiedLblDirect,
                                 Inst::SearchLblCompS, Inst::SearchLblDirectS};
  if (name == "Label-Seq")
    return kLabelBase + InstList{Inst::Label, Inst::IfCopiedLblComp, Inst::IfCopiedSeqComp,
                                 Inst::SearchLblCompS, Inst::SearchSeqCompS};
  if (name == "Label-Seq-Direct") return label_seq_direct;
  if (name == "Label-Direct-Seq")
    return kLabelBase + InstList{Inst::Label, Inst::IfCopiedLblDirect, Inst::IfCopiedSeqComp,
                                 Inst::SearchLblDirectS, Inst::SearchSeqCompS};
  if (name == "Label-Seq-Both")
    return kLabelBase + InstList{Inst::Label, Inst::IfCopiedLblComp, Inst::IfCopiedLblDirect,
                                 Inst::IfCopiedSeqComp, Inst::IfCopiedSeqDirect,
                                 Inst::SearchLblCompS, Inst::SearchLblDirectS,
                                 Inst::SearchSeqCompS, Inst::SearchSeqDirectS};
  if (name == "Split-IO") return split_io;
  if (name == "Search-Directional") return search_directional;
  if (name == "Search-Goto") return search_directional + InstList{Inst::Goto};
  if (name == "Search-GotoIf")
    return search_directional + InstList{Inst::Goto, Inst::GotoIfNEqu, Inst::GotoIfLess};
  if (name == "Flow-If0") return search_directional + kIf0Group;
  if (name == "Flow-IfX") return search_directional + kIfXGroup;
  if (name == "Flow-MvH") return search_directional + kMvHGroup;
  // Built as named: If0 + MovHead.  (The source table marks If0+IfX for this
  // row, contradicting its own name; the name wins here.)
  if (name == "Flow-If0-MvH") return search_directional + kIf0Group + kMvHGroup;
  if (name == "Flow-IfX-MvH" || name == "Heads-EX")
    return search_directional + kIfXGroup + kMvHGroup;
  if (name == "Flow-If0-IfX-MvH")
    return search_directional + kIf0Group + kIfXGroup + kMvHGroup;
  throw std::invalid_argument("unknown instruction set: " + std::string(name));
}

}  // namespace

const InstTraits& traits(Inst i) { return kInstTable[static_cast<std::size_t>(i)].tr; }

std::string_view name_of(Inst i) { return kInstTable[static_cast<std::size_t>(i)].name; }

std::optional<Inst> inst_from_name(std::string_view name) {
  auto it = name_lookup().find(name);
  if (it == name_lookup().end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& instruction_set_names() {
  static const std::vector<std::string> names = {
      "Heads", "FA",
      "R4", "R5", "R6", "R7", "R8", "R12", "R16",
      "Label", "Label-Direct", "Label-Both", "Label-Seq", "Label-Seq-Direct",
      "Label-Direct-Seq", "Label-Seq-Both",
      "Split-IO",
      "Search-Directional", "Search-Goto", "Search-GotoIf",
      "Flow-If0", "Flow-IfX", "Flow-MvH", "Flow-If0-MvH", "Flow-IfX-MvH",
      "Flow-If0-IfX-MvH",
      "Heads-EX",
  };
  return names;
}

bool is_instruction_set_name(std::string_view name) {
  const auto& names = instruction_set_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

InstructionSetConfig build_instruction_set(std::string_view name,
                                           std::vector<Inst> roster, ArgMode mode) {
  InstructionSetConfig set;
  set.name = std::string(name);
  std::sort(roster.begin(), roster.end());
  roster.erase(std::unique(roster.begin(), roster.end()), roster.end());
  set.roster = std::move(roster);
  set.nop_count = 0;
  for (Inst i : set.roster) {
    set.contains[static_cast<std::size_t>(i)] = true;
    if (is_nop(i)) ++set.nop_count;
  }
  if (set.nop_count == 0)
    throw std::invalid_argument("instruction set " + set.name + " has no nops");
  set.register_count = set.nop_count;
  set.head_count = std::max(4, set.nop_count);
  set.arg_mode = mode;
  set.has_label = set.in_roster(Inst::Label);
  return set;
}

InstructionSetConfig build_instruction_set(std::string_view name) {
  return build_instruction_set(
      name, roster_for(name),
      name == "Heads" ? ArgMode::SingleNop : ArgMode::FullyAssociative);
}

InstructionSetConfig with_navigation_instructions(InstructionSetConfig set) {
  for (Inst i : {Inst::SgMove, Inst::SgRotateL, Inst::SgRotateR, Inst::SgSense}) {
    if (!set.in_roster(i)) {
      set.roster.push_back(i);
      set.contains[static_cast<std::size_t>(i)] = true;
    }
  }
  std::sort(set.roster.begin(), set.roster.end());
  return set;
}

std::vector<Inst> read_nop_sequence(std::span<const Inst> code, std::size_t start,
                                    std::size_t max_len) {
  std::vector<Inst> out;
  const std::size_t limit = std::min(max_len, code.size());
  std::size_t p = start;
  while (out.size() < limit && is_nop(code[p])) {
    out.push_back(code[p]);
    p = (p + 1) % code.size();
  }
  return out;
}

std::vector<Inst> cyclic_complement(std::span<const Inst> pattern, int nop_count) {
  std::vector<Inst> out;
  out.reserve(pattern.size());
  for (Inst i : pattern) out.push_back(nop_of((nop_index(i) + 1) % nop_count));
  return out;
}

LabelHit find_label(std::span<const Inst> code, std::span<const Inst> pattern,
                    int nop_count, std::size_t origin, SearchDir dir,
                    MatchMode match, bool require_label_prefix,
                    std::size_t exclude_start) {
  const std::size_t len = code.size();
  if (pattern.empty() || pattern.size() > len) return {};

  std::vector<Inst> target(pattern.begin(), pattern.end());
  if (match == MatchMode::Complement) target = cyclic_complement(target, nop_count);

  auto matches_at = [&](std::size_t s) {
    if (s == exclude_start) return false;
    for (std::size_t i = 0; i < target.size(); ++i)
      if (code[(s + i) % len] != target[i]) return false;
    if (require_label_prefix && code[(s + len - 1) % len] != Inst::Label) return false;
    return true;
  };

  for (std::size_t k = 0; k < len; ++k) {
    std::size_t s;
    switch (dir) {
      case SearchDir::FromStart: s = k; break;
      case SearchDir::Forward:   s = (origin + 1 + k) % len; break;
      default:                   s = (origin + len - 1 - (k % len)) % len; break;
    }
    if (matches_at(s))
      return {true, s, (s + target.size()) % len};
  }
  return {};
}

}  // namespace vida
