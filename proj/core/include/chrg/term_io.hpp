#pragma once

#include <string>
#include <string_view>
#include <unordered_map>

#include "chrg/errors.hpp"
#include "chrg/term.hpp"

namespace chrg {

// Maps variable names to variables within one clause / one read.
using VarScope = std::unordered_map<std::string, Term>;

// Parses a complete term; trailing input other than an optional final '.'
// is an error. Variables with equal names in one scope are the same variable;
// '_' is a fresh variable at each occurrence.
Term read_term(std::string_view src);
Term read_term(std::string_view src, VarScope& scope);

std::string print_term(const Term& t);

// True if `name` prints bare (unquoted) as an atom.
bool plain_atom_name(std::string_view name);

// Quotes and escapes an atom name for printing.
std::string quote_atom(std::string_view name);

}  // namespace chrg
