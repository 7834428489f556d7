#pragma once

// Plain-text artifacts: genome files and instruction-set definition files
// are one instruction name per line with '#' comments; organism dumps add a
// one-line record header.

#include <string>

#include "minivida/isa.hpp"
#include "minivida/organism.hpp"

namespace vida {

Genome parse_genome(std::string_view text);  // throws on unknown names
Genome load_genome_file(const std::string& path);
void save_genome_file(const std::string& path, const Genome& genome);

// Set files may carry "@name" and "@arg-mode single-nop|fully-associative"
// directives; the name falls back to the file stem.
InstructionSetConfig parse_instruction_set(std::string_view text,
                                           const std::string& fallback_name);
InstructionSetConfig load_instruction_set_file(const std::string& path);

// Accepts a shipped set name or a path to a set definition file.
InstructionSetConfig resolve_instruction_set(const std::string& name_or_path);

// "# merit=<m> gestation=<g> tasks=<hex>" followed by the genome.
void save_organism_dump(const std::string& path, const Organism& org);

}  // namespace vida
