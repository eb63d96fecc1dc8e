#include "contactk/error.hpp"

namespace contactk {

namespace {

std::string syntax_message(std::size_t position, const std::vector<std::string>& expected,
                           const std::string& detail) {
  std::string msg = "syntax error at position " + std::to_string(position);
  if (!detail.empty()) msg += ": " + detail;
  if (!expected.empty()) {
    msg += " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ")";
  }
  return msg;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& detail)
    : Error(syntax_message(position, expected, detail)), position_(position), expected_(std::move(expected)) {}

UnknownSymbol::UnknownSymbol(std::string identifier, std::size_t position)
    : Error("unknown symbol '" + identifier + "' at position " + std::to_string(position)),
      identifier_(std::move(identifier)),
      position_(position) {}

}  // namespace contactk
