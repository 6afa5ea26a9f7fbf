#pragma once

// Recursive-descent parser for the .pef formula syntax:
//
//   formula := "exists" ident ("," ident)* "." formula | disj
//   disj    := conj ("or" conj)*
//   conj    := atom ("and" atom)*
//   atom    := term "=" term | "(" formula ")" | "true"
//   term    := term "+" factor | term "-" factor | factor
//   factor  := factor "*" unary | unary
//   unary   := "-" unary | primary
//   primary := integer-literal | ident | "(" term ")"
//
// "#" starts a comment running to the end of the line.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "formula.hpp"

namespace ghostring {

namespace detail {

struct Token {
    enum class Kind { Ident, Number, Symbol, End };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
        } else if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
        } else if (alpha(c)) {
            std::size_t j = i;
            while (j < src.size() && (alpha(src[j]) || digit(src[j]) || src[j] == '_')) ++j;
            while (j < src.size() && src[j] == '\'') ++j;
            out.push_back({Token::Kind::Ident, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (digit(c)) {
            std::size_t j = i;
            while (j < src.size() && digit(src[j])) ++j;
            out.push_back({Token::Kind::Number, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (c == '!' || c == '~') {
            throw ParseError("negation not allowed", line, col);
        } else if (std::string_view("+-*=(),.").find(c) != std::string_view::npos) {
            out.push_back({Token::Kind::Symbol, std::string(1, c), line, col});
            advance(1);
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
    }
    out.push_back({Token::Kind::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    Formula parse_document() {
        Formula f = formula();
        if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "' after formula");
        return f;
    }

    Term parse_term_document() {
        Term t = term();
        if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "' after term");
        return t;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool is_sym(const char* s, std::size_t ahead = 0) const {
        const auto& t = peek(ahead);
        return t.kind == Token::Kind::Symbol && t.text == s;
    }
    bool is_word(const char* s) const {
        return peek().kind == Token::Kind::Ident && peek().text == s;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, peek().line, peek().column);
    }

    void expect(const char* sym) {
        if (!is_sym(sym)) {
            std::string got = peek().kind == Token::Kind::End ? "end of input" : "'" + peek().text + "'";
            fail(std::string("expected '") + sym + "', got " + got);
        }
        take();
    }

    void reject_forbidden() const {
        if (is_word("not")) fail("negation not allowed");
        if (is_word("forall")) fail("forall not allowed");
    }

    Formula formula() {
        reject_forbidden();
        if (is_word("exists")) {
            const Token start = take();
            std::vector<std::string> vars;
            do {
                if (!vars.empty()) take();
                const Token& t = peek();
                if (t.kind != Token::Kind::Ident || is_keyword(t.text)) fail("expected variable name after 'exists'");
                vars.push_back(take().text);
            } while (is_sym(","));
            expect(".");
            Formula body = formula();
            try {
                return Formula::exists(std::move(vars), body);
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                throw ParseError(e.what(), start.line, start.column);
            }
        }
        return disjunction();
    }

    Formula disjunction() {
        std::vector<Formula> parts{conjunction()};
        while (is_word("or")) {
            take();
            parts.push_back(conjunction());
        }
        return Formula::disj(std::move(parts));
    }

    Formula conjunction() {
        std::vector<Formula> parts{atom()};
        while (is_word("and")) {
            take();
            parts.push_back(atom());
        }
        return Formula::conj(std::move(parts));
    }

    // "(" is ambiguous between a parenthesised formula and a parenthesised
    // term; try the formula reading first and fall back to the term.
    Formula atom() {
        reject_forbidden();
        if (is_word("true")) {
            take();
            return Formula::truth();
        }
        if (is_word("exists")) fail("quantifier must be parenthesised here");
        if (is_sym("(")) {
            std::size_t save = pos_;
            take();
            std::optional<ParseError> formula_error;
            std::size_t formula_reach = 0;
            try {
                Formula inner = formula();
                if (is_sym(")")) {
                    take();
                    if (!is_sym("=") && !is_sym("+") && !is_sym("-") && !is_sym("*")) return inner;
                }
            } catch (const ParseError& e) {
                if (e.message() == "negation not allowed" || e.message() == "forall not allowed") throw;
                formula_error = e;
                formula_reach = pos_;
            }
            pos_ = save;
            try {
                return equation();
            } catch (const ParseError&) {
                // Report whichever reading got further into the input.
                if (formula_error && formula_reach > pos_) throw *formula_error;
                throw;
            }
        }
        return equation();
    }

    Formula equation() {
        Term lhs = term();
        if (!is_sym("=")) {
            if (is_word("not") || is_word("forall")) reject_forbidden();
            std::string got = peek().kind == Token::Kind::End ? "end of input" : "'" + peek().text + "'";
            fail("expected '=', got " + got);
        }
        take();
        Term rhs = term();
        return Formula::eq(lhs, rhs);
    }

    Term term() {
        Term t = factor();
        while (is_sym("+") || is_sym("-")) {
            bool minus = take().text == "-";
            Term r = factor();
            t = minus ? Term::sub(t, r) : Term::add(t, r);
        }
        return t;
    }

    Term factor() {
        Term t = unary();
        while (is_sym("*")) {
            take();
            t = Term::mul(t, unary());
        }
        return t;
    }

    Term unary() {
        if (is_sym("-")) {
            take();
            return Term::neg(unary());
        }
        return primary();
    }

    Term primary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Number) {
            Token tok = take();
            try {
                return Term::literal(Int(tok.text, 10));
            } catch (const Error& e) {
                throw ParseError(e.what(), tok.line, tok.column);
            }
        }
        if (t.kind == Token::Kind::Ident) {
            if (t.text == "not") fail("negation not allowed");
            if (t.text == "forall") fail("forall not allowed");
            if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'");
            return Term::var(take().text);
        }
        if (is_sym("(")) {
            take();
            Term inner = term();
            expect(")");
            return inner;
        }
        std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        fail("expected a term, got " + got);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::Parser(text).parse_document(); }

inline Term parse_term(std::string_view text) { return detail::Parser(text).parse_term_document(); }

} // namespace ghostring
