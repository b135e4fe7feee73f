#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "relplan/core/error.hpp"

namespace relplan {

struct SourceSpan {
    int line = 1;
    int column = 1;
};

/// Parse failure with a location in the input text and, when known, a hint
/// about what was expected there.
struct ParseError : Error {
    ParseError(std::string message, SourceSpan where, std::string expected_hint = "")
        : Error(std::move(message) + " at line " + std::to_string(where.line) + ", column " +
                std::to_string(where.column) +
                (expected_hint.empty() ? "" : " (expected " + expected_hint + ")")),
          span(where), expected(std::move(expected_hint)) {}

    SourceSpan span;
    std::string expected;
};

/// One node of an s-expression document. Atoms are canonicalized to lower
/// case (identifiers in this dialect are case-insensitive).
struct Sexpr {
    enum class Kind { Atom, List };
    Kind kind = Kind::Atom;
    std::string atom;
    std::vector<Sexpr> items;
    SourceSpan span;

    bool is_atom(std::string_view s) const { return kind == Kind::Atom && atom == s; }
    bool head_is(std::string_view s) const {
        return kind == Kind::List && !items.empty() && items.front().is_atom(s);
    }
};

/// Parse all top-level forms. Comments run from ';' to end of line.
/// Unbalanced parentheses and stray ')' raise ParseError.
std::vector<Sexpr> parse_sexprs(std::string_view text);

/// Parse exactly one top-level form.
Sexpr parse_sexpr(std::string_view text);

} // namespace relplan
