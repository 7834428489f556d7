#include "minivida/genome_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vida {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string file_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = (slash == std::string::npos) ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

// Yields trimmed, comment-stripped lines.
template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (!line.empty()) f(line);
  }
}

}  // namespace

Genome parse_genome(std::string_view text) {
  Genome g;
  for_each_line(text, [&](const std::string& line) {
    const auto inst = inst_from_name(line);
    if (!inst) throw std::invalid_argument("unknown instruction: " + line);
    g.push_back(*inst);
  });
  if (g.empty()) throw std::invalid_argument("genome file contains no instructions");
  return g;
}

Genome load_genome_file(const std::string& path) { return parse_genome(read_file(path)); }

void save_genome_file(const std::string& path, const Genome& genome) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (Inst i : genome) out << name_of(i) << '\n';
}

InstructionSetConfig parse_instruction_set(std::string_view text,
                                           const std::string& fallback_name) {
  std::string name = fallback_name;
  ArgMode mode = ArgMode::FullyAssociative;
  std::vector<Inst> roster;
  for_each_line(text, [&](const std::string& line) {
    if (line.front() == '@') {
      const std::size_t sp = line.find_first_of(" \t");
      const std::string directive = line.substr(1, sp == std::string::npos ? std::string::npos
                                                                           : sp - 1);
      const std::string value = sp == std::string::npos ? "" : trim(std::string_view(line).substr(sp));
      if (directive == "name") {
        if (value.empty()) throw std::invalid_argument("@name requires a value");
        name = value;
      } else if (directive == "arg-mode") {
        if (value == "single-nop") mode = ArgMode::SingleNop;
        else if (value == "fully-associative") mode = ArgMode::FullyAssociative;
        else throw std::invalid_argument("unknown arg-mode: " + value);
      } else {
        throw std::invalid_argument("unknown directive: @" + directive);
      }
      return;
    }
    const auto inst = inst_from_name(line);
    if (!inst) throw std::invalid_argument("unknown instruction: " + line);
    roster.push_back(*inst);
  });
  return build_instruction_set(name, roster, mode);
}

InstructionSetConfig load_instruction_set_file(const std::string& path) {
  return parse_instruction_set(read_file(path), file_stem(path));
}

InstructionSetConfig resolve_instruction_set(const std::string& name_or_path) {
  if (is_instruction_set_name(name_or_path)) return build_instruction_set(name_or_path);
  if (name_or_path.find('/') != std::string::npos ||
      name_or_path.find('.') != std::string::npos)
    return load_instruction_set_file(name_or_path);
  throw std::invalid_argument("unknown instruction set: " + name_or_path);
}

void save_organism_dump(const std::string& path, const Organism& org) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  char header[128];
  std::snprintf(header, sizeof header, "# merit=%.17g gestation=%llu tasks=%016llx%016llx",
                org.merit, static_cast<unsigned long long>(org.last_gestation),
                static_cast<unsigned long long>(org.done_bits[1]),
                static_cast<unsigned long long>(org.done_bits[0]));
  out << header << '\n';
  for (Inst i : org.birth_genome) out << name_of(i) << '\n';
}

}  // namespace vida
