#include "lexer.hpp"

#include <array>
#include <cctype>

namespace normcase::dsl::detail {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return is_alpha(c) || is_digit(c) || c == '_'; }

constexpr std::array kReserved = {
    "fact",       "act",     "duty",     "actor",   "recipient", "conditioned",     "creates",
    "terminates", "imposes", "holder",   "claimant", "violated", "deadline",        "source",
    "and",        "or",      "not",      "true",    "false",     "unknown",         "deadline-passed",
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.loc = {line_, col_};
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (is_alpha(c)) {
                t.kind = Tok::Ident;
                t.text = read_ident();
            } else if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
                read_number(t);
            } else if (c == '"') {
                read_string(t);
            } else {
                read_punct(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                return;
            }
        }
    }

    std::string read_ident() {
        std::string s;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (is_word(c)) {
                s += c;
                advance();
            } else if (c == '-' && pos_ + 1 < src_.size() && is_word(src_[pos_ + 1])) {
                s += c;
                advance();
            } else {
                break;
            }
        }
        return s;
    }

    void read_number(Token& t) {
        std::string s;
        if (src_[pos_] == '-') {
            s += '-';
            advance();
        }
        while (pos_ < src_.size() && is_digit(src_[pos_])) {
            s += src_[pos_];
            advance();
        }
        // dddd-dd-dd is a date literal
        if (s.size() == 4 && s[0] != '-' && pos_ + 1 < src_.size() && src_[pos_] == '-' &&
            is_digit(src_[pos_ + 1])) {
            std::string rest;
            while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '-')) {
                rest += src_[pos_];
                advance();
            }
            t.text = s + rest;
            if (Date::parse(t.text)) {
                t.kind = Tok::DateLit;
            } else {
                t.kind = Tok::Invalid;
                t.text = "invalid date literal '" + t.text + "'";
            }
            return;
        }
        if (pos_ < src_.size() && is_alpha(src_[pos_])) {
            while (pos_ < src_.size() && is_word(src_[pos_])) {
                s += src_[pos_];
                advance();
            }
            t.kind = Tok::Invalid;
            t.text = "malformed number '" + s + "'";
            return;
        }
        if (s.size() > 18) {
            t.kind = Tok::Invalid;
            t.text = "integer literal out of range";
            return;
        }
        t.kind = Tok::Int;
        t.text = s;
    }

    void read_string(Token& t) {
        advance();  // opening quote
        std::string s;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') {
                t.kind = Tok::Invalid;
                t.text = "unterminated string literal";
                return;
            }
            char c = src_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size()) continue;
                char e = src_[pos_];
                s += (e == 'n') ? '\n' : e;
                advance();
                continue;
            }
            s += c;
            advance();
        }
        t.kind = Tok::String;
        t.text = std::move(s);
    }

    void read_punct(Token& t) {
        char c = src_[pos_];
        char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
        auto one = [&](Tok k) {
            t.kind = k;
            t.text = std::string(1, c);
            advance();
        };
        auto two = [&](Tok k) {
            t.kind = k;
            t.text = std::string{c, n};
            advance();
            advance();
        };
        switch (c) {
            case '(': return one(Tok::LParen);
            case ')': return one(Tok::RParen);
            case ',': return one(Tok::Comma);
            case ':': return one(Tok::Colon);
            case '=': return one(Tok::Eq);
            case '!':
                if (n == '=') return two(Tok::Ne);
                break;
            case '<':
                if (n == '=') return two(Tok::Le);
                return one(Tok::Lt);
            case '>':
                if (n == '=') return two(Tok::Ge);
                return one(Tok::Gt);
            default: break;
        }
        t.kind = Tok::Invalid;
        unsigned char uc = static_cast<unsigned char>(c);
        t.text = uc >= 0x20 && uc < 0x7f ? std::string("unexpected character '") + c + "'"
                                          : std::string("unexpected byte in input");
        advance();
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src) { return Lexer(src).run(); }

bool is_reserved(std::string_view word) {
    for (const char* k : kReserved)
        if (word == k) return true;
    return false;
}

}  // namespace normcase::dsl::detail
