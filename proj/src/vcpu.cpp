#include "minivida/vcpu.hpp"

#include <algorithm>

#include "minivida/environment.hpp"
#include "minivida/organism.hpp"

namespace vida {

namespace {
constexpr std::uint8_t kRegBX = 1;
constexpr std::uint8_t kRegCX = 2;
}  // namespace

std::array<std::uint8_t, 3> resolve_args(std::span<const std::uint8_t> default_tuple,
                                         std::span<const Inst> nops, ArgMode mode,
                                         int register_count) {
  std::array<std::uint8_t, 3> out{};
  const int n = static_cast<int>(default_tuple.size());
  for (int i = 0; i < n; ++i) out[i] = default_tuple[i];
  if (nops.empty()) return out;

  // The first nop rebases the whole default tuple.  Rebasing wraps within
  // the base trio for nop-A..C so genomes without higher nops behave the
  // same under every register width; higher nops wrap within the full file.
  const int first = nop_index(nops[0]);
  const int m = (first < 3) ? 3 : register_count;
  const int delta = first - static_cast<int>(default_tuple[0]);
  for (int i = 0; i < n; ++i)
    out[i] = static_cast<std::uint8_t>((default_tuple[i] + delta + 2 * m) % m);

  if (mode == ArgMode::FullyAssociative) {
    const int k = std::min<int>(static_cast<int>(nops.size()), n);
    for (int j = 1; j < k; ++j)
      out[j] = static_cast<std::uint8_t>(nop_index(nops[j]) % register_count);
  }
  return out;
}

std::uint8_t resolve_head(std::span<const Inst> nops, std::uint8_t default_head,
                          int head_count) {
  if (nops.empty()) return default_head;
  return static_cast<std::uint8_t>(nop_index(nops[0]) % head_count);
}

std::int32_t ifx_constant(std::span<const Inst> nops) {
  std::uint32_t v = 1;
  for (Inst i : nops) {
    switch (i) {
      case Inst::NopA: v ^= 0x80000000u; break;
      case Inst::NopB: v <<= 1; break;
      case Inst::NopC: v <<= 2; break;
      case Inst::NopD: v <<= 3; break;
      default: break;
    }
  }
  return static_cast<std::int32_t>(v);
}

int consumed_nops(Inst inst, int run_len, ArgMode mode, int max_label) {
  switch (traits(inst).args) {
    case ArgKind::None: return 0;
    case ArgKind::Reg1:
    case ArgKind::Head1: return std::min(run_len, 1);
    case ArgKind::Reg2: return std::min(run_len, mode == ArgMode::FullyAssociative ? 2 : 1);
    case ArgKind::Reg3: return std::min(run_len, mode == ArgMode::FullyAssociative ? 3 : 1);
    case ArgKind::LabelArg: return std::min(run_len, max_label);
  }
  return 0;
}

bool if_copied(const CpuState& cpu, std::span<const Inst> pattern, int nop_count,
               MatchMode match, bool lbl_scope) {
  if (pattern.empty()) return false;
  std::vector<Inst> target(pattern.begin(), pattern.end());
  if (match == MatchMode::Complement) target = cyclic_complement(target, nop_count);
  const int k = static_cast<int>(target.size());
  if (cpu.history_len < k + (lbl_scope ? 1 : 0)) return false;
  for (int i = 0; i < k; ++i)
    if (cpu.history_back(k - i) != target[i]) return false;
  if (lbl_scope && cpu.history_back(k + 1) != Inst::Label) return false;
  return true;
}

DecodedInst decode_at(const CpuState& cpu, const InstructionSetConfig& set,
                      const VmConfig& vm, std::uint32_t pos) {
  DecodedInst d;
  const std::size_t len = cpu.memory.size();
  d.op = cpu.memory[pos];
  const ArgKind kind = traits(d.op).args;

  int cap = 0;
  switch (kind) {
    case ArgKind::None: break;
    case ArgKind::Reg1:
    case ArgKind::Head1: cap = 1; break;
    case ArgKind::Reg2: cap = set.arg_mode == ArgMode::FullyAssociative ? 2 : 1; break;
    case ArgKind::Reg3: cap = set.arg_mode == ArgMode::FullyAssociative ? 3 : 1; break;
    case ArgKind::LabelArg: cap = vm.max_label_size; break;
  }
  std::vector<Inst> nops;
  std::size_t p = pos;
  const int limit = static_cast<int>(std::min<std::size_t>(cap, len));
  while (static_cast<int>(nops.size()) < limit) {
    p = (p + 1 == len) ? 0 : p + 1;
    if (!is_nop(cpu.memory[p])) break;
    nops.push_back(cpu.memory[p]);
  }
  d.consumed = static_cast<int>(nops.size());

  const std::uint8_t def = traits(d.op).default_slot;
  switch (kind) {
    case ArgKind::None: break;
    case ArgKind::Reg1: {
      d.reg_count = 1;
      d.regs[0] = nops.empty() ? def
                               : static_cast<std::uint8_t>(nop_index(nops[0]) % set.register_count);
      break;
    }
    case ArgKind::Head1: {
      d.has_head = true;
      d.head = resolve_head(nops, def, set.head_count);
      break;
    }
    case ArgKind::Reg2: {
      d.reg_count = 2;
      const std::uint8_t dt[2] = {kRegBX, kRegCX};
      const auto a = resolve_args({dt, 2}, nops, set.arg_mode, set.register_count);
      d.regs = a;
      break;
    }
    case ArgKind::Reg3: {
      d.reg_count = 3;
      const std::uint8_t dt[3] = {kRegBX, kRegBX, kRegCX};
      d.regs = resolve_args({dt, 3}, nops, set.arg_mode, set.register_count);
      break;
    }
    case ArgKind::LabelArg: d.label = std::move(nops); break;
  }
  // jmp-head moves a head but defaults differently from the other head ops.
  if (d.op == Inst::JmpHead && vm.jmp_head_flow_default && d.consumed == 0)
    d.head = kFlow;
  return d;
}

StepResult execute(Organism& org, const InstructionSetConfig& set,
                   const VmConfig& vm, Environment* env) {
  CpuState& cpu = org.cpu;
  const std::size_t len = cpu.memory.size();
  const std::uint32_t ip = cpu.heads[kIp];
  const Inst op = cpu.memory[ip];
  ++org.lifetime_cycles;

  StepResult result;

  auto cap_for = [&](Inst i) -> int {
    switch (traits(i).args) {
      case ArgKind::None: return 0;
      case ArgKind::Reg1:
      case ArgKind::Head1: return 1;
      case ArgKind::Reg2: return set.arg_mode == ArgMode::FullyAssociative ? 2 : 1;
      case ArgKind::Reg3: return set.arg_mode == ArgMode::FullyAssociative ? 3 : 1;
      case ArgKind::LabelArg: return vm.max_label_size;
    }
    return 0;
  };

  // Trailing nop run of the executing instruction, capped at what it can
  // consume; consumed nops are skipped by the IP advance.
  Inst nop_buf[kMaxLabelSize];
  int run = 0;
  {
    const int limit = std::min<std::size_t>(cap_for(op), len);
    std::size_t p = ip;
    while (run < limit) {
      p = (p + 1 == len) ? 0 : p + 1;
      const Inst x = cpu.memory[p];
      if (!is_nop(x)) break;
      nop_buf[run++] = x;
    }
  }
  const std::span<const Inst> nops(nop_buf, static_cast<std::size_t>(run));

  std::uint32_t next_ip = cpu.wrap(std::uint64_t(ip) + 1 + run);
  bool ip_set = false;
  std::uint32_t ip_target = 0;

  auto reg = [&](int i) -> std::int32_t& { return cpu.regs[i]; };
  auto r1 = [&](std::uint8_t def) -> int {
    return run ? nop_index(nop_buf[0]) % set.register_count : def;
  };
  auto r2 = [&]() {
    static constexpr std::uint8_t d[2] = {kRegBX, kRegCX};
    return resolve_args(std::span<const std::uint8_t>(d, 2), nops, set.arg_mode,
                        set.register_count);
  };
  auto r3 = [&]() {
    static constexpr std::uint8_t d[3] = {kRegBX, kRegBX, kRegCX};
    return resolve_args(std::span<const std::uint8_t>(d, 3), nops, set.arg_mode,
                        set.register_count);
  };
  auto head1 = [&](std::uint8_t def) {
    return run ? std::uint8_t(nop_index(nop_buf[0]) % set.head_count) : def;
  };

  // A false conditional skips the next instruction together with the nops it
  // would consume, as one unit.
  auto skip_next = [&]() {
    const std::uint32_t t = next_ip;
    const Inst skipped = cpu.memory[t];
    const int limit = std::min<std::size_t>(cap_for(skipped), len);
    int n = 0;
    std::size_t p = t;
    while (n < limit) {
      p = (p + 1 == len) ? 0 : p + 1;
      if (!is_nop(cpu.memory[p])) break;
      ++n;
    }
    next_ip = cpu.wrap(std::uint64_t(t) + 1 + n);
  };

  auto move_head_to_flow = [&](std::uint8_t h) {
    if (h == kIp) {
      ip_set = true;
      ip_target = cpu.heads[kFlow];
    } else {
      cpu.heads[h] = cpu.heads[kFlow];
    }
  };

  auto do_search = [&](SearchDir dir, MatchMode match, bool req_label) {
    const LabelHit hit =
        nops.empty() ? LabelHit{}
                     : find_label(cpu.memory, nops, set.nop_count, ip, dir, match,
                                  req_label, cpu.wrap(ip + 1));
    if (hit.found) {
      cpu.heads[kFlow] = static_cast<std::uint32_t>(hit.end);
      reg(kRegBX) = static_cast<std::int32_t>(nops.size());
      reg(kRegCX) = static_cast<std::int32_t>((hit.start + len - ip) % len);
    } else {
      // Fallback: flow lands on the next instruction the IP will execute.
      cpu.heads[kFlow] = next_ip;
      reg(kRegBX) = 0;
      reg(kRegCX) = 0;
    }
  };

  auto do_goto = [&](bool cond) {
    if (!cond || nops.empty()) return;
    const LabelHit hit = find_label(cpu.memory, nops, set.nop_count, ip,
                                    SearchDir::FromStart, MatchMode::Direct, true,
                                    cpu.wrap(ip + 1));
    if (hit.found) {
      ip_set = true;
      ip_target = static_cast<std::uint32_t>(hit.end);
    }
  };

  auto u = [](std::int32_t v) { return static_cast<std::uint32_t>(v); };
  auto s = [](std::uint32_t v) { return static_cast<std::int32_t>(v); };

  switch (op) {
    case Inst::Add: { auto a = r3(); reg(a[0]) = s(u(reg(a[1])) + u(reg(a[2]))); break; }
    case Inst::Sub: { auto a = r3(); reg(a[0]) = s(u(reg(a[1])) - u(reg(a[2]))); break; }
    case Inst::Nand: { auto a = r3(); reg(a[0]) = ~(reg(a[1]) & reg(a[2])); break; }
    case Inst::Inc: { auto& r = reg(r1(kRegBX)); r = s(u(r) + 1); break; }
    case Inst::Dec: { auto& r = reg(r1(kRegBX)); r = s(u(r) - 1); break; }
    case Inst::ShiftL: { auto& r = reg(r1(kRegBX)); r = s(u(r) << 1); break; }
    case Inst::ShiftR: { auto& r = reg(r1(kRegBX)); r = s(u(r) >> 1); break; }

    case Inst::IfNEqu: { auto a = r2(); if (!(reg(a[0]) != reg(a[1]))) skip_next(); break; }
    case Inst::IfLess: { auto a = r2(); if (!(reg(a[0]) < reg(a[1]))) skip_next(); break; }

    case Inst::IfCopiedSeqComp:
      if (!if_copied(cpu, nops, set.nop_count, MatchMode::Complement, false)) skip_next();
      break;
    case Inst::IfCopiedSeqDirect:
      if (!if_copied(cpu, nops, set.nop_count, MatchMode::Direct, false)) skip_next();
      break;
    case Inst::IfCopiedLblComp:
      if (!if_copied(cpu, nops, set.nop_count, MatchMode::Complement, true)) skip_next();
      break;
    case Inst::IfCopiedLblDirect:
      if (!if_copied(cpu, nops, set.nop_count, MatchMode::Direct, true)) skip_next();
      break;

    case Inst::SearchSeqCompS: do_search(SearchDir::FromStart, MatchMode::Complement, false); break;
    case Inst::SearchSeqDirectS: do_search(SearchDir::FromStart, MatchMode::Direct, false); break;
    case Inst::SearchSeqDirectF: do_search(SearchDir::Forward, MatchMode::Direct, false); break;
    case Inst::SearchSeqDirectB: do_search(SearchDir::Backward, MatchMode::Direct, false); break;
    case Inst::SearchLblCompS: do_search(SearchDir::FromStart, MatchMode::Complement, true); break;
    case Inst::SearchLblDirectS: do_search(SearchDir::FromStart, MatchMode::Direct, true); break;
    case Inst::SearchLblDirectF: do_search(SearchDir::Forward, MatchMode::Direct, true); break;
    case Inst::SearchLblDirectB: do_search(SearchDir::Backward, MatchMode::Direct, true); break;

    case Inst::MovHead: move_head_to_flow(head1(kIp)); break;

    case Inst::JmpHead: {
      const std::uint8_t h = head1(vm.jmp_head_flow_default ? kFlow : kIp);
      const std::int64_t off = reg(kRegCX);
      if (h == kIp) {
        // The IP offset composes with the normal advance: off == 0 is a
        // plain step forward, never a self-loop.
        const std::int64_t base = std::int64_t(ip) + 1 + run + off;
        ip_set = true;
        ip_target = static_cast<std::uint32_t>(((base % std::int64_t(len)) + len) % len);
      } else {
        const std::int64_t base = std::int64_t(cpu.heads[h]) + off;
        cpu.heads[h] = static_cast<std::uint32_t>(((base % std::int64_t(len)) + len) % len);
      }
      break;
    }

    case Inst::GetHead: reg(kRegCX) = s(cpu.heads[head1(kIp)]); break;

    case Inst::SetFlow: {
      const std::int64_t v = reg(r1(kRegCX));
      cpu.heads[kFlow] = static_cast<std::uint32_t>(((v % std::int64_t(len)) + len) % len);
      break;
    }

    case Inst::HAlloc: if (!h_alloc(org, vm)) ++org.faults; break;
    case Inst::HCopy: if (!h_copy(org, vm)) ++org.faults; break;
    case Inst::HDivide: {
      if (auto child = h_divide(org, vm)) {
        org.pending_offspring = std::move(*child);
        result.divided = true;
        return result;  // parent heads already reset to 0
      }
      ++org.faults;
      break;
    }

    case Inst::Push: cpu.stacks[cpu.active_stack].push(reg(r1(kRegBX))); break;
    case Inst::Pop: reg(r1(kRegBX)) = cpu.stacks[cpu.active_stack].pop(); break;
    case Inst::SwapStk: cpu.active_stack ^= 1; break;
    case Inst::Swap: { auto a = r2(); std::swap(reg(a[0]), reg(a[1])); break; }

    case Inst::IO: {
      auto& r = reg(r1(kRegBX));
      const std::uint32_t v = u(r);
      ++org.outputs_total;
      org.last_output = v;
      if (env) env->on_output(org, v);
      r = s(org.next_input());
      break;
    }
    case Inst::Input: { reg(r1(kRegBX)) = s(org.next_input()); break; }
    case Inst::Output: {
      const std::uint32_t v = u(reg(r1(kRegBX)));
      ++org.outputs_total;
      org.last_output = v;
      if (env) env->on_output(org, v);
      break;
    }

    case Inst::Goto: do_goto(true); break;
    case Inst::GotoIfNEqu: do_goto(reg(kRegBX) != reg(kRegCX)); break;
    case Inst::GotoIfLess: do_goto(reg(kRegBX) < reg(kRegCX)); break;

    case Inst::IfNot0: if (!(reg(r1(kRegBX)) != 0)) skip_next(); break;
    case Inst::IfEqu0: if (!(reg(r1(kRegBX)) == 0)) skip_next(); break;
    case Inst::IfGtr0: if (!(reg(r1(kRegBX)) > 0)) skip_next(); break;
    case Inst::IfLess0: if (!(reg(r1(kRegBX)) < 0)) skip_next(); break;
    case Inst::IfGtrX: if (!(reg(kRegBX) > ifx_constant(nops))) skip_next(); break;
    case Inst::IfEquX: if (!(reg(kRegBX) == ifx_constant(nops))) skip_next(); break;

    case Inst::MovHeadIfNEqu:
      if (reg(kRegBX) != reg(kRegCX)) move_head_to_flow(head1(kIp));
      break;
    case Inst::MovHeadIfLess:
      if (reg(kRegBX) < reg(kRegCX)) move_head_to_flow(head1(kIp));
      break;

    case Inst::SgMove: if (env) env->nav_move(org); break;
    case Inst::SgRotateL: if (env) env->nav_rotate(org, -1); break;
    case Inst::SgRotateR: if (env) env->nav_rotate(org, 1); break;
    case Inst::SgSense: {
      auto& r = reg(r1(kRegBX));
      r = env ? s(env->nav_sense(org)) : 0;
      break;
    }

    default:
      if (!is_nop(op) && op != Inst::Label) ++org.faults;
      break;
  }

  cpu.heads[kIp] = ip_set ? cpu.wrap(ip_target) : next_ip;
  return result;
}

}  // namespace vida
