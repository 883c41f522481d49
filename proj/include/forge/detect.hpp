#pragma once

#include <optional>
#include <string>

#include "forge/description.hpp"
#include "forge/sexpr.hpp"

namespace forge {

// Which playout implementation a game's rules admit. Matching is purely
// syntactic: a template with wildcard slots is compared against the play
// rule, and anything that fits no template falls back to Standard.
struct PlayoutStrategy {
    enum class Tag : uint8_t { Standard, AddToEmpty, Filter, NoRepetition };

    Tag tag = Tag::Standard;
    bool swap = false;  // AddToEmpty games may carry the swap meta-rule
    int pattern = 0;    // Filter template 1..3

    // Captured wildcard subtrees of the matched filter template:
    //   pattern 1: (play (do A ifAfterwards:(B)))
    //   pattern 2: (play (if A B (do C ifAfterwards:(D))))
    //   pattern 3: (play (or (do A ifAfterwards:(B)) (move Pass)))
    std::optional<SExpr> rule_a, rule_b, rule_c, rule_d;

    bool is_optimised() const { return tag != Tag::Standard; }

    std::string to_string() const {
        switch (tag) {
            case Tag::Standard: return "Standard";
            case Tag::AddToEmpty: return swap ? "AddToEmpty+swap" : "AddToEmpty";
            case Tag::Filter: return "Filter" + std::to_string(pattern);
            case Tag::NoRepetition: return "NoRepetition";
        }
        return "Standard";
    }

    static std::optional<Tag> tag_from_string(const std::string& s) {
        if (s == "Standard") return Tag::Standard;
        if (s == "AddToEmpty" || s == "AddToEmpty+swap") return Tag::AddToEmpty;
        if (s.rfind("Filter", 0) == 0) return Tag::Filter;
        if (s == "NoRepetition") return Tag::NoRepetition;
        return std::nullopt;
    }
};

namespace detail {

// (do A ifAfterwards:(B)) with A and B free.
inline bool match_do_template(const SExpr& e, std::optional<SExpr>& a, std::optional<SExpr>& b) {
    if (!e.is_call_to("do") || e.arg_count() != 3) return false;
    if (!e.arg(1).is_symbol_token("ifAfterwards:")) return false;
    a = e.arg(0);
    b = e.arg(2);
    return true;
}

inline const SExpr& add_to_empty_template() {
    static const SExpr t = parse_sexpr("(move Add (to (sites Empty)))");
    return t;
}

inline const SExpr& pass_template() {
    static const SExpr t = parse_sexpr("(move Pass)");
    return t;
}

}  // namespace detail

// Infers the optimised playout strategy for a description, trying
// AddToEmpty, then the three filter templates, then NoRepetition, with
// Standard as the universal fallback. Deterministic and purely syntactic.
inline PlayoutStrategy detect(const GameDescription& desc) {
    PlayoutStrategy strategy;
    const SExpr& play_body = desc.play_rule.arg(0);

    if (play_body == detail::add_to_empty_template()) {
        strategy.tag = PlayoutStrategy::Tag::AddToEmpty;
        strategy.swap = desc.has_meta("swap");
        return strategy;
    }

    if (detail::match_do_template(play_body, strategy.rule_a, strategy.rule_b)) {
        strategy.tag = PlayoutStrategy::Tag::Filter;
        strategy.pattern = 1;
        return strategy;
    }
    if (play_body.is_call_to("if") && play_body.arg_count() == 3 &&
        detail::match_do_template(play_body.arg(2), strategy.rule_c, strategy.rule_d)) {
        strategy.tag = PlayoutStrategy::Tag::Filter;
        strategy.pattern = 2;
        strategy.rule_a = play_body.arg(0);
        strategy.rule_b = play_body.arg(1);
        return strategy;
    }
    if (play_body.is_call_to("or") && play_body.arg_count() == 2 &&
        play_body.arg(1) == detail::pass_template() &&
        detail::match_do_template(play_body.arg(0), strategy.rule_a, strategy.rule_b)) {
        strategy.tag = PlayoutStrategy::Tag::Filter;
        strategy.pattern = 3;
        return strategy;
    }

    strategy.rule_a.reset();
    strategy.rule_b.reset();
    if (desc.has_meta("noRepeat")) {
        strategy.tag = PlayoutStrategy::Tag::NoRepetition;
        return strategy;
    }

    strategy.tag = PlayoutStrategy::Tag::Standard;
    return strategy;
}

}  // namespace forge
