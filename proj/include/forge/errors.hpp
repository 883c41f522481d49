#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forge {

// Malformed game text. Carries the byte offset of the offending token.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::string message, size_t offset)
        : std::runtime_error(std::move(message) + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

// A keyword outside the supported ludeme vocabulary.
class UnknownLudeme : public std::runtime_error {
public:
    explicit UnknownLudeme(const std::string& keyword)
        : std::runtime_error("unknown ludeme: " + keyword), keyword_(keyword) {}

    const std::string& keyword() const { return keyword_; }

private:
    std::string keyword_;
};

// Structurally valid text that violates a game-description constraint
// (two play rules, zero players, empty board, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& message)
        : std::runtime_error("invalid game description: " + message) {}
};

// A rule AST referenced something that does not exist at evaluation time
// (an undefined region, direction, or piece).
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& message)
        : std::runtime_error("rule evaluation error: " + message) {}
};

// Move application inconsistent with the board (occupied destination for an
// Add, missing piece at the source, applying to a finished game).
class IllegalMoveError : public std::runtime_error {
public:
    explicit IllegalMoveError(const std::string& message)
        : std::runtime_error("illegal move: " + message) {}
};

// An ongoing state with no legal moves that the end rules failed to resolve.
// Signals a bug in a game description, not in the caller.
class DeadEnd : public std::runtime_error {
public:
    explicit DeadEnd(const std::string& message)
        : std::runtime_error("dead end: " + message) {}
};

// Invalid argument to a policy computation (tau <= 0, empty score list).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& message)
        : std::runtime_error(message) {}
};

// A rejection left numerically zero probability mass behind; the caller
// should recompute the distribution from scratch over the survivors.
class DegenerateDistribution : public std::runtime_error {
public:
    explicit DegenerateDistribution(const std::string& message)
        : std::runtime_error(message) {}
};

// Bad benchmark configuration, e.g. requesting a playout strategy for a game
// whose description does not support it.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message)
        : std::runtime_error(message) {}
};

}  // namespace forge
