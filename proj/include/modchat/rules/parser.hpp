#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "modchat/rules/term.hpp"

namespace modchat::rules {

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t line, std::size_t column, std::string token, const std::string& message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    /// The offending token as it appeared in the source ("<eof>" at end of input).
    const std::string& token() const { return token_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string token_;
};

/// Parses a rule program:
///
///   clause  := literal ( ":-" literal ("," literal)* )? "."
///   literal := "!" | symbol "(" termlist? ")" guard?
///   guard   := "[" literal ("," literal)* "]"
///   term    := symbol | number | "string" | Variable
///            | symbol "(" termlist ")" | "{" symbol "->" term ("," ...)* "}"
///
/// `%` starts a comment that runs to the end of the line.
Rulebase parse_rulebase(std::string_view source, std::string name = {});

/// Parses a single goal such as `illCountry(C)` (a trailing `.` is optional).
Literal parse_literal(std::string_view source);

Term parse_term(std::string_view source);

} // namespace modchat::rules
