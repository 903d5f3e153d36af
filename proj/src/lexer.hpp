#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cwc/surface.hpp"

namespace cwc::detail {

enum class Tok {
    Ident,
    Int,
    Real,
    Var,
    Empty,      // \e
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Pipe,
    Semi,
    Comma,
    Star,
    Plus,
    Minus,
    Underscore,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

[[nodiscard]] std::string_view token_name(Tok t);

/// Splits `text` into tokens. Lexical errors are appended to `diags` and the
/// offending character is skipped; the result always ends with Tok::End.
/// `//` starts a comment that runs to the end of the line.
[[nodiscard]] std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diags);

} // namespace cwc::detail
