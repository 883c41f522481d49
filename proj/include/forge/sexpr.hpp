#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

// One node of a game description tree. Atoms are symbols (identifier tokens,
// possibly ending in ':' for named arguments), quoted strings, or integers.
// A Call is a parenthesised list whose head is always a symbol; a Seq is a
// brace-delimited ordered list with no head.
class SExpr {
public:
    enum class Kind : uint8_t { Symbol, String, Int, Call, Seq };

    SExpr() : kind_(Kind::Symbol) {}

    static SExpr symbol(std::string token) {
        SExpr e(Kind::Symbol);
        e.token_ = std::move(token);
        return e;
    }

    static SExpr string(std::string value) {
        SExpr e(Kind::String);
        e.token_ = std::move(value);
        return e;
    }

    static SExpr integer(int64_t value) {
        SExpr e(Kind::Int);
        e.int_ = value;
        return e;
    }

    static SExpr call(std::vector<SExpr> children) {
        SExpr e(Kind::Call);
        e.children_ = std::move(children);
        return e;
    }

    static SExpr seq(std::vector<SExpr> children) {
        SExpr e(Kind::Seq);
        e.children_ = std::move(children);
        return e;
    }

    Kind kind() const { return kind_; }
    bool is_atom() const { return kind_ == Kind::Symbol || kind_ == Kind::String || kind_ == Kind::Int; }
    bool is_symbol() const { return kind_ == Kind::Symbol; }
    bool is_string() const { return kind_ == Kind::String; }
    bool is_int() const { return kind_ == Kind::Int; }
    bool is_call() const { return kind_ == Kind::Call; }
    bool is_seq() const { return kind_ == Kind::Seq; }

    // Symbol token or string contents.
    const std::string& token() const { return token_; }
    int64_t int_value() const { return int_; }

    const std::vector<SExpr>& children() const { return children_; }
    std::vector<SExpr>& children() { return children_; }
    size_t size() const { return children_.size(); }
    const SExpr& operator[](size_t i) const { return children_[i]; }

    // Head symbol of a Call; empty string for anything else.
    const std::string& head() const {
        static const std::string empty;
        if (kind_ != Kind::Call || children_.empty() || !children_[0].is_symbol()) return empty;
        return children_[0].token();
    }

    bool is_call_to(std::string_view name) const { return kind_ == Kind::Call && head() == name; }

    // Arguments of a Call (everything after the head).
    size_t arg_count() const { return children_.empty() ? 0 : children_.size() - 1; }
    const SExpr& arg(size_t i) const { return children_[i + 1]; }

    bool is_symbol_token(std::string_view tok) const { return is_symbol() && token_ == tok; }

    friend bool operator==(const SExpr& a, const SExpr& b) {
        if (a.kind_ != b.kind_) return false;
        switch (a.kind_) {
            case Kind::Symbol:
            case Kind::String:
                return a.token_ == b.token_;
            case Kind::Int:
                return a.int_ == b.int_;
            case Kind::Call:
            case Kind::Seq:
                return a.children_ == b.children_;
        }
        return false;
    }
    friend bool operator!=(const SExpr& a, const SExpr& b) { return !(a == b); }

private:
    explicit SExpr(Kind kind) : kind_(kind) {}

    Kind kind_;
    int64_t int_ = 0;
    std::string token_;
    std::vector<SExpr> children_;
};

namespace detail {

class SExprParser {
public:
    explicit SExprParser(std::string_view text) : text_(text) {}

    SExpr parse_single() {
        skip_blank();
        if (at_end()) throw SyntaxError("expected an expression, found end of input", pos_);
        SExpr e = parse_expr();
        skip_blank();
        if (!at_end()) throw SyntaxError("trailing content after expression", pos_);
        return e;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void skip_blank() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (!at_end() && peek() != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    SExpr parse_expr() {
        char c = peek();
        if (c == '(') return parse_call();
        if (c == '{') return parse_seq();
        if (c == ')' || c == '}') throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
        if (c == '"') return parse_string();
        return parse_atom();
    }

    SExpr parse_call() {
        const size_t open = pos_;
        ++pos_;  // consume '('
        skip_blank();
        if (at_end()) throw SyntaxError("unbalanced parenthesis", open);
        if (peek() == ')') throw SyntaxError("empty list", pos_);
        std::vector<SExpr> kids;
        kids.push_back(parse_expr());
        if (!kids.front().is_symbol())
            throw SyntaxError("list head must be a keyword", open + 1);
        for (;;) {
            skip_blank();
            if (at_end()) throw SyntaxError("unbalanced parenthesis", open);
            if (peek() == ')') {
                ++pos_;
                return SExpr::call(std::move(kids));
            }
            kids.push_back(parse_expr());
        }
    }

    SExpr parse_seq() {
        const size_t open = pos_;
        ++pos_;  // consume '{'
        std::vector<SExpr> kids;
        for (;;) {
            skip_blank();
            if (at_end()) throw SyntaxError("unbalanced brace", open);
            if (peek() == '}') {
                ++pos_;
                return SExpr::seq(std::move(kids));
            }
            kids.push_back(parse_expr());
        }
    }

    SExpr parse_string() {
        const size_t open = pos_;
        ++pos_;  // consume '"'
        std::string out;
        while (!at_end()) {
            char c = text_[pos_++];
            if (c == '"') return SExpr::string(std::move(out));
            if (c == '\n') break;
            out.push_back(c);
        }
        throw SyntaxError("unterminated string", open);
    }

    SExpr parse_atom() {
        const size_t start = pos_;
        std::string tok;
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '(' || c == ')' ||
                c == '{' || c == '}' || c == '"') {
                break;
            }
            ++pos_;
            tok.push_back(c);
            if (c == ':') break;  // named-argument marker ends the token
        }
        if (tok.empty()) throw SyntaxError("expected a token", start);
        if (is_integer(tok)) return SExpr::integer(std::stoll(tok));
        return SExpr::symbol(std::move(tok));
    }

    static bool is_integer(const std::string& tok) {
        size_t i = (tok[0] == '-') ? 1 : 0;
        if (i == tok.size()) return false;
        for (; i < tok.size(); ++i) {
            if (tok[i] < '0' || tok[i] > '9') return false;
        }
        return true;
    }

    std::string_view text_;
    size_t pos_ = 0;
};

inline void print_sexpr(const SExpr& e, std::string& out) {
    switch (e.kind()) {
        case SExpr::Kind::Symbol:
            out += e.token();
            return;
        case SExpr::Kind::String:
            out += '"';
            out += e.token();
            out += '"';
            return;
        case SExpr::Kind::Int:
            out += std::to_string(e.int_value());
            return;
        case SExpr::Kind::Call:
        case SExpr::Kind::Seq: {
            out += (e.kind() == SExpr::Kind::Call) ? '(' : '{';
            const auto& kids = e.children();
            for (size_t i = 0; i < kids.size(); ++i) {
                if (i > 0) {
                    // Glue named arguments to their value: "if:(...)".
                    const SExpr& prev = kids[i - 1];
                    bool glued = prev.is_symbol() && !prev.token().empty() && prev.token().back() == ':';
                    if (!glued) out += ' ';
                }
                print_sexpr(kids[i], out);
            }
            out += (e.kind() == SExpr::Kind::Call) ? ')' : '}';
            return;
        }
    }
}

}  // namespace detail

// Parses exactly one expression; comments ('//' to end of line) and
// whitespace are free. Throws SyntaxError with the offending byte offset.
inline SExpr parse_sexpr(std::string_view text) {
    return detail::SExprParser(text).parse_single();
}

// Compact single-line rendering. Re-parsing the output yields a tree
// structurally identical to the input.
inline std::string to_text(const SExpr& e) {
    std::string out;
    detail::print_sexpr(e, out);
    return out;
}

}  // namespace forge
