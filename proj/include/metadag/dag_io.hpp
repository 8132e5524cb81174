#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "metadag/dag.hpp"

namespace metadag {

/// Parses the line-based DAG format (`vertex`, `edge`, `inorder`, `outorder`,
/// `#` comments). File ids become vertex and edge names. Throws `ParseError`.
/// Structural invariants (loops, cycles) are left to `validate_dag`.
Dag parse_dag(std::string_view text);

/// Inverse of `parse_dag`. Order lines are written only where they differ from
/// the edge declaration order.
std::string print_dag(const Dag& g);

/// Whole file as a string; throws `Error` when unreadable.
std::string read_text_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Whitespace tokenizer shared by the text formats. Drops everything after `#`.
std::vector<std::string> split_tokens(std::string_view line);

}  // namespace metadag
