#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "contactk/symexpr/expr.hpp"

namespace contactk::sym {

/// Names available to the parser. Frozen once a model is loaded.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(const std::vector<Symbol>& symbols);

  /// Throws Error on a duplicate or reserved name.
  void add(const Symbol& symbol);
  const Symbol* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<Symbol> symbols() const;

 private:
  std::map<std::string, Symbol, std::less<>> symbols_;
};

bool is_reserved_name(std::string_view name);

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-'|'+') factor | base ('^' ['-'|'+'] integer)?
///   base   := number | identifier | '(' expr ')' | func '(' expr ')'
/// Throws SyntaxError or UnknownSymbol.
Expr parse(std::string_view text, const SymbolTable& table);

}  // namespace contactk::sym
