#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "normcase/dsl/ast.hpp"

namespace normcase::dsl::detail {

enum class Tok {
    Ident,
    Int,
    DateLit,
    String,
    LParen,
    RParen,
    Comma,
    Colon,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    End,
    Invalid,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Location loc;
};

/// Tokenizes the whole input. Invalid input yields Tok::Invalid tokens whose
/// text carries the error message; the caller turns them into diagnostics.
std::vector<Token> tokenize(std::string_view src);

/// Words that start clauses/declarations or are operators; never fact names.
bool is_reserved(std::string_view word);

}  // namespace normcase::dsl::detail
