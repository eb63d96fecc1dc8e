#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contactk::cli {

/// A value together with where it came from, for error messages.
struct Located {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;  // 1-based column of the first character of `text`
};

struct SimulateBlock {
  double h = 0.0;
  double T = 0.0;
  std::vector<std::pair<std::string, double>> initial;  // coordinate -> value, file order
};

struct ModelFile {
  std::string source;  // path or label used in messages
  std::string name;
  std::vector<std::string> coordinates;
  std::vector<std::pair<std::string, double>> parameters;
  Located lagrangian;
  std::optional<Located> hamiltonian;
  std::vector<Located> primaries;
  std::optional<SimulateBlock> simulate;
};

/// Line-oriented `key = value` format with [parameters] and [simulate]
/// sections and `#` comments. Throws InputError.
ModelFile parse_model_file(std::string_view text, const std::string& source);

/// Reads and parses a file. Throws InputError.
ModelFile load_model_file(const std::string& path);

/// "source:line:column: message".
std::string located_message(const std::string& source, std::size_t line, std::size_t column, const std::string& message);

}  // namespace contactk::cli
