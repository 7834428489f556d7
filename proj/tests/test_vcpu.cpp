#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "minivida/environment.hpp"
#include "minivida/organism.hpp"
#include "minivida/rng.hpp"
#include "minivida/vcpu.hpp"

using namespace vida;

namespace {

constexpr int kA = 0, kB = 1, kC = 2;

// One organism on one instruction set, stepped instruction by instruction.
struct Machine {
  InstructionSetConfig set;
  VmConfig vm;
  Organism org;

  Machine(const char* set_name, Genome g)
      : set(build_instruction_set(set_name)), org(std::move(g), 0) {}

  StepResult step(Environment* env = nullptr) { return execute(org, set, vm, env); }
  void run(int n, Environment* env = nullptr) {
    while (n-- > 0) step(env);
  }
  std::int32_t& reg(int i) { return org.cpu.regs[static_cast<std::size_t>(i)]; }
  std::uint32_t ip() const { return org.cpu.heads[kIp]; }
  std::uint32_t flow() const { return org.cpu.heads[kFlow]; }
};

Genome gen(std::initializer_list<Inst> is) { return Genome(is); }

}  // namespace

TEST_CASE("argument resolution follows the three quoted conventions") {
  const std::array<std::uint8_t, 3> add_defaults{kB, kB, kC};

  // No nops: regB = regB + regC, in both argument modes.
  for (ArgMode mode : {ArgMode::SingleNop, ArgMode::FullyAssociative}) {
    const auto r = resolve_args(add_defaults, {}, mode, 3);
    CHECK(r == std::array<std::uint8_t, 3>{kB, kB, kC});
  }

  // One nop-A rebases the whole tuple: regA = regA + regB.
  const std::vector<Inst> one{Inst::NopA};
  CHECK(resolve_args(add_defaults, one, ArgMode::FullyAssociative, 3) ==
        std::array<std::uint8_t, 3>{kA, kA, kB});

  // nop-A nop-C nop-B overrides the later slots: regA = regC + regB.
  const std::vector<Inst> three{Inst::NopA, Inst::NopC, Inst::NopB};
  CHECK(resolve_args(add_defaults, three, ArgMode::FullyAssociative, 3) ==
        std::array<std::uint8_t, 3>{kA, kC, kB});

  // Single-nop mode consumes only the first nop; the companion register
  // follows cyclically.
  CHECK(resolve_args(add_defaults, three, ArgMode::SingleNop, 3) ==
        std::array<std::uint8_t, 3>{kA, kA, kB});
  const std::vector<Inst> c{Inst::NopC};
  CHECK(resolve_args(add_defaults, c, ArgMode::SingleNop, 3) ==
        std::array<std::uint8_t, 3>{kC, kC, kA});

  // Nops beyond the base trio rebase within the full register file.
  const std::vector<Inst> e{Inst::NopE};
  CHECK(resolve_args(add_defaults, e, ArgMode::FullyAssociative, 6) ==
        std::array<std::uint8_t, 3>{4, 4, 5});
  // A base-trio nop keeps the tuple wrapping inside the trio even with more
  // registers available.
  CHECK(resolve_args(add_defaults, c, ArgMode::FullyAssociative, 6) ==
        std::array<std::uint8_t, 3>{kC, kC, kA});
}

TEST_CASE("head resolution maps nops to heads in order") {
  CHECK(resolve_head({}, kIp, 4) == kIp);
  CHECK(resolve_head({}, kFlow, 4) == kFlow);
  const std::vector<Inst> nops{Inst::NopA, Inst::NopB, Inst::NopC, Inst::NopD,
                               Inst::NopE, Inst::NopF};
  for (std::size_t i = 0; i < nops.size(); ++i) {
    const std::vector<Inst> one{nops[i]};
    CHECK(resolve_head(one, kIp, 6) == i);
  }
}

TEST_CASE("ifx constants build from shifts and a sign toggle") {
  CHECK(ifx_constant({}) == 1);
  CHECK(ifx_constant(std::vector<Inst>{Inst::NopB}) == 2);
  CHECK(ifx_constant(std::vector<Inst>{Inst::NopC}) == 4);
  CHECK(ifx_constant(std::vector<Inst>{Inst::NopD}) == 8);
  CHECK(static_cast<std::uint32_t>(
            ifx_constant(std::vector<Inst>{Inst::NopA})) == 0x80000001u);
  CHECK(static_cast<std::uint32_t>(ifx_constant(
            std::vector<Inst>{Inst::NopC, Inst::NopC, Inst::NopA})) == 0x80000010u);
  // Nops outside A..D contribute nothing.
  CHECK(ifx_constant(std::vector<Inst>{Inst::NopE, Inst::NopB}) == 2);
}

TEST_CASE("arithmetic wraps at 32 bits") {
  Machine m("Heads", gen({Inst::Add, Inst::Sub, Inst::Inc, Inst::Dec,
                          Inst::ShiftL, Inst::ShiftR}));
  m.reg(kB) = 2;
  m.reg(kC) = 3;
  m.step();
  CHECK(m.reg(kB) == 5);  // add: regB = regB + regC
  m.step();
  CHECK(m.reg(kB) == 2);  // sub: regB = regB - regC
  m.step();
  CHECK(m.reg(kB) == 3);  // inc
  m.step();
  CHECK(m.reg(kB) == 2);  // dec
  m.step();
  CHECK(m.reg(kB) == 4);  // shift-l
  m.step();
  CHECK(m.reg(kB) == 2);  // shift-r
  CHECK(m.ip() == 0);     // wrapped around the 6-site genome

  Machine w("Heads", gen({Inst::Add, Inst::Sub, Inst::ShiftL, Inst::ShiftR}));
  w.reg(kB) = INT32_MAX;
  w.reg(kC) = 1;
  w.step();
  CHECK(w.reg(kB) == INT32_MIN);  // two's-complement wrap
  w.reg(kB) = INT32_MIN;
  w.step();
  CHECK(w.reg(kB) == INT32_MAX);
  w.reg(kB) = INT32_MIN;
  w.step();
  CHECK(w.reg(kB) == 0);  // shift-l drops the sign bit
  w.reg(kB) = -2;
  w.step();
  CHECK(w.reg(kB) == INT32_MAX);  // shift-r is logical (zero-fill)
}

TEST_CASE("single-nop mode redirects inc to regA") {
  Machine m("Heads", gen({Inst::Inc, Inst::NopA, Inst::Add}));
  m.step();
  CHECK(m.reg(kA) == 1);
  CHECK(m.reg(kB) == 0);
  CHECK(m.ip() == 2);  // the consumed nop is skipped
}

TEST_CASE("nand matches the quoted truth values") {
  Machine m("Heads", gen({Inst::Nand, Inst::Nand}));
  m.reg(kB) = 0;
  m.reg(kC) = 0;
  m.step();
  CHECK(static_cast<std::uint32_t>(m.reg(kB)) == 0xFFFFFFFFu);
  m.reg(kB) = -1;
  m.reg(kC) = -1;
  m.step();
  CHECK(m.reg(kB) == 0);

  // nand(a, all-ones) == ~a
  Rng rng(3, "nand-prop");
  for (int i = 0; i < 100; ++i) {
    Machine p("Heads", gen({Inst::Nand}));
    const auto a = static_cast<std::int32_t>(rng.next_u32());
    p.reg(kB) = a;
    p.reg(kC) = -1;
    p.step();
    CHECK(p.reg(kB) == ~a);
  }
}

TEST_CASE("conditionals skip the next instruction with its nops as one unit") {
  // if-less true: next instruction executes.
  Machine t("Heads", gen({Inst::IfLess, Inst::Inc, Inst::Add}));
  t.reg(kB) = 3;
  t.reg(kC) = 5;
  t.step();
  CHECK(t.ip() == 1);
  t.step();
  CHECK(t.reg(kB) == 4);

  // if-less false: inc and its nop are skipped together.
  Machine f("Heads", gen({Inst::IfLess, Inst::Inc, Inst::NopA, Inst::Add}));
  f.reg(kB) = 5;
  f.reg(kC) = 3;
  f.step();
  CHECK(f.ip() == 3);
  CHECK(f.reg(kA) == 0);

  // if-n-equ: equal skips, unequal falls through.
  Machine e("Heads", gen({Inst::IfNEqu, Inst::Inc, Inst::Add}));
  e.reg(kB) = 7;
  e.reg(kC) = 7;
  e.step();
  CHECK(e.ip() == 2);
  Machine n("Heads", gen({Inst::IfNEqu, Inst::Inc, Inst::Add}));
  n.reg(kB) = 7;
  n.reg(kC) = 8;
  n.step();
  CHECK(n.ip() == 1);
}

TEST_CASE("zero-comparison and constant-comparison conditionals") {
  auto skipped = [](const char* set, Inst cond, std::int32_t bx,
                    std::initializer_list<Inst> trailing = {}) {
    Genome g{cond};
    for (Inst i : trailing) g.push_back(i);
    g.push_back(Inst::Inc);
    g.push_back(Inst::Add);
    Machine m(set, std::move(g));
    m.reg(kB) = bx;
    m.step();
    return m.ip() != 1 + trailing.size();
  };

  CHECK_FALSE(skipped("Flow-If0", Inst::IfNot0, 5));
  CHECK(skipped("Flow-If0", Inst::IfNot0, 0));
  CHECK_FALSE(skipped("Flow-If0", Inst::IfEqu0, 0));
  CHECK(skipped("Flow-If0", Inst::IfEqu0, 5));
  CHECK_FALSE(skipped("Flow-If0", Inst::IfGtr0, 1));
  CHECK(skipped("Flow-If0", Inst::IfGtr0, 0));
  CHECK(skipped("Flow-If0", Inst::IfGtr0, -1));
  CHECK_FALSE(skipped("Flow-If0", Inst::IfLess0, -1));
  CHECK(skipped("Flow-If0", Inst::IfLess0, 0));

  // if-gtr-x / if-equ-x compare regB against the nop-encoded constant.
  CHECK_FALSE(skipped("Flow-IfX", Inst::IfGtrX, 2));        // 2 > 1
  CHECK(skipped("Flow-IfX", Inst::IfGtrX, 1));              // 1 > 1 fails
  CHECK_FALSE(skipped("Flow-IfX", Inst::IfGtrX, 3, {Inst::NopB}));  // 3 > 2
  CHECK(skipped("Flow-IfX", Inst::IfGtrX, 2, {Inst::NopB}));
  CHECK_FALSE(skipped("Flow-IfX", Inst::IfEquX, 1));
  CHECK_FALSE(skipped("Flow-IfX", Inst::IfEquX, 4, {Inst::NopC}));
  CHECK(skipped("Flow-IfX", Inst::IfEquX, 5, {Inst::NopC}));
  // Sign toggle: constant becomes INT32_MIN | 16.
  CHECK_FALSE(skipped("Flow-IfX", Inst::IfEquX,
                      static_cast<std::int32_t>(0x80000010u),
                      {Inst::NopC, Inst::NopC, Inst::NopA}));
}

TEST_CASE("stack operations") {
  Machine m("Heads", gen({Inst::Push, Inst::Pop, Inst::SwapStk, Inst::Swap}));
  m.reg(kB) = 9;
  m.step();  // push
  CHECK(m.org.cpu.stacks[0].peek() == 9);
  m.reg(kB) = 0;
  m.step();  // pop
  CHECK(m.reg(kB) == 9);
  CHECK(m.org.cpu.stacks[0].depth == 0);
  m.step();  // swap-stk
  CHECK(m.org.cpu.active_stack == 1);
  m.reg(kB) = 1;
  m.reg(kC) = 2;
  m.step();  // swap
  CHECK(m.reg(kB) == 2);
  CHECK(m.reg(kC) == 1);

  // swap-stk twice restores the active stack.
  Machine s("Heads", gen({Inst::SwapStk, Inst::SwapStk}));
  s.step();
  s.step();
  CHECK(s.org.cpu.active_stack == 0);

  // Pushing an 11th value discards the bottom one.
  Stack st;
  for (int i = 1; i <= 11; ++i) st.push(i);
  CHECK(st.depth == kStackDepth);
  for (int i = 11; i >= 2; --i) CHECK(st.pop() == i);
  CHECK(st.pop() == 0);  // empty pop yields 0, no fault
  CHECK(st.pop() == 0);
}

TEST_CASE("IO emits the output then loads the next input") {
  Machine m("Heads", gen({Inst::IO, Inst::IO, Inst::IO, Inst::IO}));
  m.org.inputs = {10, 20, 30};
  m.org.input_count = 3;
  m.reg(kB) = 77;
  m.step();
  CHECK(m.org.outputs_total == 1);
  CHECK(m.org.last_output == 77);
  CHECK(m.reg(kB) == 10);
  m.run(3);
  CHECK(m.reg(kB) == 10);  // inputs cycle
  CHECK(m.org.outputs_total == 4);
}

TEST_CASE("split input and output perform exactly one side each") {
  Machine m("Split-IO", gen({Inst::Input, Inst::Output, Inst::Output}));
  m.org.inputs = {42, 43, 44};
  m.org.input_count = 3;
  m.reg(kB) = 5;
  m.step();
  CHECK(m.reg(kB) == 42);
  CHECK(m.org.outputs_total == 0);
  m.step();
  CHECK(m.org.outputs_total == 1);
  CHECK(m.org.last_output == 42);
  CHECK(m.reg(kB) == 42);  // output leaves the register alone
}

TEST_CASE("h-search places flow and reports size and offset") {
  // h-search nop-A nop-A nop-B finds nop-B nop-B nop-C, flow lands after it.
  Machine m("Heads",
            gen({Inst::SearchSeqCompS, Inst::NopA, Inst::NopA, Inst::NopB,
                 Inst::Inc, Inst::NopB, Inst::NopB, Inst::NopC, Inst::Add}));
  m.step();
  CHECK(m.flow() == 8);
  CHECK(m.reg(kB) == 3);  // label size
  CHECK(m.reg(kC) == 5);  // distance from the search instruction to the label
  CHECK(m.ip() == 4);     // the query nops were consumed

  // Not found: flow falls to the next instruction, registers report zero.
  Machine n("Heads", gen({Inst::SearchSeqCompS, Inst::NopA, Inst::Inc,
                          Inst::Add, Inst::Sub}));
  n.reg(kB) = 99;
  n.reg(kC) = 99;
  n.step();
  CHECK(n.flow() == 2);
  CHECK(n.reg(kB) == 0);
  CHECK(n.reg(kC) == 0);

  // Empty query: same fallback.
  Machine e("Heads", gen({Inst::SearchSeqCompS, Inst::Inc, Inst::Add}));
  e.step();
  CHECK(e.flow() == 1);
}

TEST_CASE("directional searches scan relative to the instruction pointer") {
  // Two direct occurrences of [nop-A]; forward picks the later one, backward
  // the earlier one.
  const Genome g = gen({Inst::NopA, Inst::Inc, Inst::Add, Inst::SearchSeqDirectF,
                        Inst::NopA, Inst::Sub, Inst::NopA, Inst::Dec});
  Machine f("Search-Directional", g);
  f.org.cpu.heads[kIp] = 3;
  f.step();
  CHECK(f.flow() == 7);  // just past the occurrence at 6

  Machine b("Search-Directional",
            gen({Inst::NopA, Inst::Inc, Inst::Add, Inst::SearchSeqDirectB,
                 Inst::NopA, Inst::Sub, Inst::NopA, Inst::Dec}));
  b.org.cpu.heads[kIp] = 3;
  b.step();
  CHECK(b.flow() == 1);  // just past the occurrence at 0
}

TEST_CASE("label searches require the label-instruction prefix") {
  Machine m("Label",
            gen({Inst::SearchLblCompS, Inst::NopF, Inst::NopA, Inst::Inc,
                 Inst::NopA, Inst::NopB, Inst::Add, Inst::Label, Inst::NopA,
                 Inst::NopB, Inst::Sub}));
  // Query [F,A] complements to [A,B] under 6 nops; the bare run at 4 does
  // not count, the label-prefixed run at 8 does.
  m.step();
  CHECK(m.flow() == 10);
  CHECK(m.reg(kB) == 2);
}

TEST_CASE("mov-head sets the chosen head to flow exactly") {
  Machine m("Heads", gen({Inst::MovHead, Inst::Inc, Inst::Add, Inst::Sub}));
  m.org.cpu.heads[kFlow] = 3;
  m.step();
  CHECK(m.ip() == 3);  // no advance composed on top

  Machine r("Heads", gen({Inst::MovHead, Inst::NopB, Inst::Add, Inst::Sub}));
  r.org.cpu.heads[kFlow] = 3;
  r.step();
  CHECK(r.org.cpu.heads[kRead] == 3);
  CHECK(r.ip() == 2);  // normal advance past instruction + nop
}

TEST_CASE("jmp-head shifts the resolved head by regC") {
  // On the IP the offset composes with the normal advance.
  Machine m("Heads", gen({Inst::JmpHead, Inst::Inc, Inst::Add, Inst::Sub,
                          Inst::Dec, Inst::Nand}));
  m.reg(kC) = 3;
  m.step();
  CHECK(m.ip() == 4);  // 0 + 1 + 3

  Machine z("Heads", gen({Inst::JmpHead, Inst::Inc, Inst::Add}));
  z.reg(kC) = 0;
  z.step();
  CHECK(z.ip() == 1);  // zero offset is a plain step, never a self-loop

  Machine w("Heads", gen({Inst::JmpHead, Inst::Inc, Inst::Add}));
  w.reg(kC) = -1;
  w.step();
  CHECK(w.ip() == 0);  // negative offsets wrap

  // On another head the shift is absolute.
  Machine r("Heads", gen({Inst::JmpHead, Inst::NopB, Inst::Add, Inst::Sub}));
  r.org.cpu.heads[kRead] = 1;
  r.reg(kC) = 2;
  r.step();
  CHECK(r.org.cpu.heads[kRead] == 3);
  CHECK(r.ip() == 2);
}

TEST_CASE("get-head and set-flow") {
  Machine m("Heads", gen({Inst::Inc, Inst::Inc, Inst::GetHead, Inst::Add}));
  m.run(3);
  CHECK(m.reg(kC) == 2);  // position of the get-head instruction itself

  Machine g("Heads", gen({Inst::GetHead, Inst::NopC, Inst::Add, Inst::Sub}));
  g.org.cpu.heads[kWrite] = 3;
  g.step();
  CHECK(g.reg(kC) == 3);

  Machine s("Heads", gen({Inst::SetFlow, Inst::Inc, Inst::Add, Inst::Sub,
                          Inst::Dec}));
  s.reg(kC) = 7;
  s.step();
  CHECK(s.flow() == 2);  // wraps mod memory length (7 mod 5)

  Machine n("Heads", gen({Inst::SetFlow, Inst::Inc, Inst::Add, Inst::Sub,
                          Inst::Dec}));
  n.reg(kC) = -1;
  n.step();
  CHECK(n.flow() == 4);
}

TEST_CASE("h-alloc extends memory once and faults afterwards") {
  Machine m("Heads", gen({Inst::HAlloc, Inst::HAlloc, Inst::Add, Inst::Sub}));
  m.step();
  CHECK(m.org.cpu.memory.size() == 8);
  CHECK(m.org.cpu.allocated);
  for (std::size_t i = 4; i < 8; ++i) CHECK(m.org.cpu.memory[i] == Inst::NopA);
  CHECK(m.org.faults == 0);
  m.step();
  CHECK(m.org.cpu.memory.size() == 8);
  CHECK(m.org.faults == 1);

  // At the genome-size cap the allocation faults instead of growing.
  Machine capped("Heads", gen({Inst::HAlloc, Inst::Add}));
  capped.vm.max_genome_size = 2;
  capped.step();
  CHECK(capped.org.cpu.memory.size() == 2);
  CHECK(capped.org.faults == 1);
}

TEST_CASE("h-copy duplicates under the heads and records history") {
  Machine m("Heads", gen({Inst::HAlloc, Inst::HCopy, Inst::HCopy, Inst::Add}));
  m.step();  // alloc to 8
  m.org.cpu.heads[kRead] = 0;
  m.org.cpu.heads[kWrite] = 4;
  m.step();
  CHECK(m.org.cpu.memory[4] == Inst::HAlloc);
  CHECK(m.org.cpu.copied[4] == 1);
  CHECK(m.org.cpu.heads[kRead] == 1);
  CHECK(m.org.cpu.heads[kWrite] == 5);
  CHECK(m.org.cpu.history_back(1) == Inst::HAlloc);
  m.step();
  CHECK(m.org.cpu.memory[5] == Inst::HCopy);
  CHECK(m.org.cpu.history_back(1) == Inst::HCopy);
  CHECK(m.org.cpu.history_back(2) == Inst::HAlloc);

  // Copying without an allocation is a fault.
  Machine f("Heads", gen({Inst::HCopy, Inst::Add}));
  f.step();
  CHECK(f.org.faults == 1);

  // h-divide without an allocated copy is also a fault.
  Machine d("Heads", gen({Inst::HDivide, Inst::Add}));
  const StepResult r = d.step();
  CHECK_FALSE(r.divided);
  CHECK(d.org.faults == 1);
}

TEST_CASE("if-copied compares the copy-history tail") {
  // Complement: label [A,B] matches history tail [B,C].
  Machine m("Heads", gen({Inst::IfCopiedSeqComp, Inst::NopA, Inst::NopB,
                          Inst::Inc, Inst::Add}));
  m.org.cpu.push_history(Inst::HCopy);
  m.org.cpu.push_history(Inst::NopB);
  m.org.cpu.push_history(Inst::NopC);
  m.step();
  CHECK(m.ip() == 3);  // condition true, inc executes next

  Machine f("Heads", gen({Inst::IfCopiedSeqComp, Inst::NopA, Inst::NopB,
                          Inst::Inc, Inst::Add}));
  f.org.cpu.push_history(Inst::NopB);
  f.org.cpu.push_history(Inst::NopB);
  f.step();
  CHECK(f.ip() == 4);  // condition false, inc skipped

  // Empty history never matches.
  CHECK_FALSE(if_copied(f.org.cpu, std::vector<Inst>{}, 3, MatchMode::Complement,
                        false));
  Machine e("Heads", gen({Inst::IfCopiedSeqComp, Inst::NopA, Inst::Inc,
                          Inst::Add}));
  e.step();
  CHECK(e.ip() == 3);

  // Direct matching compares the tail verbatim.
  CpuState direct;
  direct.memory = gen({Inst::Add});
  direct.push_history(Inst::NopA);
  direct.push_history(Inst::NopB);
  const std::vector<Inst> ab{Inst::NopA, Inst::NopB};
  CHECK(if_copied(direct, ab, 3, MatchMode::Direct, false));
  CHECK_FALSE(if_copied(direct, ab, 3, MatchMode::Complement, false));

  // Label scope needs the label instruction right before the run.
  CpuState lbl;
  lbl.memory = gen({Inst::Add});
  lbl.push_history(Inst::Label);
  lbl.push_history(Inst::NopA);
  const std::vector<Inst> a{Inst::NopA};
  CHECK(if_copied(lbl, a, 3, MatchMode::Direct, true));
  CpuState bare;
  bare.memory = gen({Inst::Add});
  bare.push_history(Inst::NopA);
  CHECK(if_copied(bare, a, 3, MatchMode::Direct, false));
  CHECK_FALSE(if_copied(bare, a, 3, MatchMode::Direct, true));
}

TEST_CASE("goto jumps to a label-prefixed direct match or is ignored") {
  Machine m("Search-Goto", gen({Inst::Goto, Inst::NopB, Inst::Inc, Inst::Label,
                                Inst::NopB, Inst::Add}));
  m.step();
  CHECK(m.ip() == 5);  // after the matched label run

  // No label prefix anywhere: the goto is a no-op and execution continues.
  Machine n("Search-Goto", gen({Inst::Goto, Inst::NopB, Inst::Inc, Inst::NopB,
                                Inst::Add}));
  n.step();
  CHECK(n.ip() == 2);
  CHECK(n.org.faults == 0);

  // Conditional variants jump only when the test holds.
  Machine t("Search-GotoIf", gen({Inst::GotoIfNEqu, Inst::NopB, Inst::Inc,
                                  Inst::Label, Inst::NopB, Inst::Add}));
  t.reg(kB) = 1;
  t.reg(kC) = 2;
  t.step();
  CHECK(t.ip() == 5);
  Machine ff("Search-GotoIf", gen({Inst::GotoIfNEqu, Inst::NopB, Inst::Inc,
                                   Inst::Label, Inst::NopB, Inst::Add}));
  ff.step();  // registers equal: fall through
  CHECK(ff.ip() == 2);

  Machine l("Search-GotoIf", gen({Inst::GotoIfLess, Inst::NopB, Inst::Inc,
                                  Inst::Label, Inst::NopB, Inst::Add}));
  l.reg(kB) = 1;
  l.reg(kC) = 2;
  l.step();
  CHECK(l.ip() == 5);
}

TEST_CASE("conditional mov-head variants") {
  Machine t("Flow-MvH", gen({Inst::MovHeadIfNEqu, Inst::Inc, Inst::Add,
                             Inst::Sub}));
  t.org.cpu.heads[kFlow] = 3;
  t.reg(kB) = 1;
  t.step();
  CHECK(t.ip() == 3);

  Machine f("Flow-MvH", gen({Inst::MovHeadIfNEqu, Inst::Inc, Inst::Add,
                             Inst::Sub}));
  f.org.cpu.heads[kFlow] = 3;
  f.step();           // BX == CX: no move, but also no skip
  CHECK(f.ip() == 1);

  Machine l("Flow-MvH", gen({Inst::MovHeadIfLess, Inst::Inc, Inst::Add,
                             Inst::Sub}));
  l.org.cpu.heads[kFlow] = 2;
  l.reg(kB) = -5;
  l.step();
  CHECK(l.ip() == 2);
}

TEST_CASE("label and plain nops execute as no-ops") {
  for (const char* set_name : {"Heads", "R6", "Label"}) {
    const auto set = build_instruction_set(set_name);
    for (Inst i : set.roster) {
      if (!is_nop(i) && i != Inst::Label) continue;
      Machine m(set_name, gen({i, Inst::Add, Inst::Sub}));
      m.reg(kB) = 11;
      m.reg(kC) = 22;
      const CpuState before = m.org.cpu;
      m.step();
      CHECK(m.ip() == 1);
      CHECK(m.reg(kB) == 11);
      CHECK(m.reg(kC) == 22);
      CHECK(m.org.cpu.memory == before.memory);
      CHECK(m.org.faults == 0);
    }
  }
}

TEST_CASE("navigation instructions drive the maze hooks") {
  Environment env(default_environment_config(EnvKind::Navigation));
  Rng rng(11, "nav-test");

  Machine m("Heads", gen({Inst::SgRotateR, Inst::SgRotateL, Inst::SgSense,
                          Inst::SgMove}));
  m.set = with_navigation_instructions(m.set);
  env.on_birth(m.org, rng);
  REQUIRE(m.org.nav != nullptr);

  const int h0 = m.org.nav->heading;
  m.step(&env);
  CHECK(m.org.nav->heading == (h0 + 1) % 8);
  m.step(&env);
  CHECK(m.org.nav->heading == h0);  // rotate-r then rotate-l cancels

  m.step(&env);
  CHECK(m.reg(kB) == env.nav_sense(m.org));

  const int x0 = m.org.nav->x, y0 = m.org.nav->y;
  m.step(&env);
  CHECK((m.org.nav->x != x0 || m.org.nav->y != y0));

  // Without an environment the sensor reads 0 and movement is inert.
  Machine solo("Heads", gen({Inst::SgSense, Inst::SgMove, Inst::SgRotateL,
                             Inst::SgRotateR}));
  solo.reg(kB) = 55;
  solo.step();
  CHECK(solo.reg(kB) == 0);
  solo.run(3);
  CHECK(solo.org.faults == 0);
}

TEST_CASE("eight rotations return to the original heading") {
  Environment env(default_environment_config(EnvKind::Navigation));
  Rng rng(12, "nav-rot");
  Organism org(gen({Inst::Add}), 0);
  env.on_birth(org, rng);
  const int h0 = org.nav->heading;
  for (int i = 0; i < 8; ++i) env.nav_rotate(org, 1);
  CHECK(org.nav->heading == h0);
  for (int i = 0; i < 8; ++i) env.nav_rotate(org, -1);
  CHECK(org.nav->heading == h0);
}

TEST_CASE("decode matches execution defaults in both argument modes") {
  // With no trailing nops, decoding under FA and single-nop modes yields the
  // same operand registers for every instruction.
  const auto heads = build_instruction_set("Heads");
  const auto fa = build_instruction_set("FA");
  for (Inst i : heads.roster) {
    if (is_nop(i)) continue;
    Organism org(gen({i, Inst::Add, Inst::Sub}), 0);
    const VmConfig vm;
    const DecodedInst a = decode_at(org.cpu, heads, vm, 0);
    const DecodedInst b = decode_at(org.cpu, fa, vm, 0);
    CHECK(a.op == i);
    CHECK(a.consumed == 0);
    CHECK(a.regs == b.regs);
    CHECK(a.reg_count == b.reg_count);
  }

  // Consumed-nop accounting differs by mode: three-operand instructions eat
  // one nop in single-nop mode and up to three in fully-associative mode.
  Organism org(gen({Inst::Add, Inst::NopA, Inst::NopC, Inst::NopB, Inst::Sub}),
               0);
  const VmConfig vm;
  CHECK(decode_at(org.cpu, heads, vm, 0).consumed == 1);
  CHECK(decode_at(org.cpu, fa, vm, 0).consumed == 3);
  CHECK(consumed_nops(Inst::Add, 3, ArgMode::SingleNop, kMaxLabelSize) == 1);
  CHECK(consumed_nops(Inst::Add, 3, ArgMode::FullyAssociative, kMaxLabelSize) == 3);
  CHECK(consumed_nops(Inst::SearchSeqCompS, 7, ArgMode::SingleNop,
                      kMaxLabelSize) == 7);
  CHECK(consumed_nops(Inst::HAlloc, 5, ArgMode::FullyAssociative,
                      kMaxLabelSize) == 0);
}

TEST_CASE("random programs preserve the machine invariants") {
  Rng rng(99, "vcpu-fuzz");
  const auto base = with_navigation_instructions(build_instruction_set("Heads-EX"));
  const VmConfig vm;
  for (int trial = 0; trial < 60; ++trial) {
    Genome g;
    const std::size_t len = 5 + rng.below(60);
    for (std::size_t i = 0; i < len; ++i)
      g.push_back(base.roster[rng.below(base.roster.size())]);
    Organism org(g, 0);
    org.inputs = {1, 2, 3};
    org.input_count = 3;
    for (int step_i = 0; step_i < 1500; ++step_i) {
      execute(org, base, vm, nullptr);
      const CpuState& cpu = org.cpu;
      REQUIRE(cpu.memory.size() <= vm.max_genome_size);
      for (int h = 0; h < base.head_count; ++h)
        REQUIRE(cpu.heads[h] < cpu.memory.size());
      REQUIRE(cpu.stacks[0].depth <= kStackDepth);
      REQUIRE(cpu.stacks[1].depth <= kStackDepth);
      if (org.pending_offspring.size()) {
        REQUIRE(org.pending_offspring.size() <= vm.max_genome_size);
        org.pending_offspring.clear();
      }
    }
  }
}

TEST_CASE("identical programs replay identical trajectories") {
  Rng rng(123, "vcpu-replay");
  const auto set = build_instruction_set("FA");
  const VmConfig vm;
  Genome g;
  for (int i = 0; i < 40; ++i)
    g.push_back(set.roster[rng.below(set.roster.size())]);

  auto run_trace = [&](int steps) {
    Organism org(g, 0);
    org.inputs = {7, 8, 9};
    org.input_count = 3;
    std::vector<std::uint64_t> trace;
    for (int i = 0; i < steps; ++i) {
      execute(org, set, vm, nullptr);
      trace.push_back((static_cast<std::uint64_t>(org.cpu.heads[kIp]) << 32) ^
                      static_cast<std::uint32_t>(org.cpu.regs[kB]));
    }
    return trace;
  };
  CHECK(run_trace(2000) == run_trace(2000));
}

TEST_CASE("every roster instruction of every set has golden coverage") {
  // The cases above pin the behavior of each instruction family; this check
  // guards the roster against silently growing past the covered glossary.
  std::set<Inst> covered;
  for (int i = 0; i < static_cast<int>(kInstCount); ++i)
    covered.insert(static_cast<Inst>(i));
  for (const std::string& name : instruction_set_names())
    for (Inst i : build_instruction_set(name).roster)
      CHECK(covered.count(i) == 1);
}
