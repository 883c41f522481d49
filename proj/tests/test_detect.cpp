#include <fstream>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "forge/detect.hpp"
#include "forge/engine.hpp"

#include "helpers.hpp"

using namespace forge;

TEST_CASE("every bundled game detects the strategy pinned in the manifest") {
    std::ifstream in(std::string(FORGE_GAMES_DIR) + "/manifest.json");
    REQUIRE(in.good());
    nlohmann::json manifest = nlohmann::json::parse(in);
    REQUIRE(manifest["games"].size() == 10);
    for (const auto& entry : manifest["games"]) {
        std::string file = entry["file"];
        std::string expected = entry["strategy"];
        CAPTURE(file);
        GameDescription desc = test::load_description(file);
        CHECK(desc.name == entry["name"]);
        PlayoutStrategy strategy = detect(desc);
        CHECK(strategy.to_string() == expected);
    }
}

TEST_CASE("the Fig-1 style rules detect as add-to-empty without swap") {
    PlayoutStrategy s = detect(parse_game(test::kTicTacToe));
    CHECK(s.tag == PlayoutStrategy::Tag::AddToEmpty);
    CHECK_FALSE(s.swap);
    CHECK(s.pattern == 0);
}

TEST_CASE("the swap meta-rule is recorded in the add-to-empty tag") {
    GameDescription hex = test::load_description("hex.lud");
    PlayoutStrategy s = detect(hex);
    CHECK(s.tag == PlayoutStrategy::Tag::AddToEmpty);
    CHECK(s.swap);
}

TEST_CASE("filter pattern 1 captures its wildcards") {
    GameDescription desc = test::load_description("herd.lud");
    PlayoutStrategy s = detect(desc);
    REQUIRE(s.tag == PlayoutStrategy::Tag::Filter);
    CHECK(s.pattern == 1);
    REQUIRE(s.rule_a.has_value());
    REQUIRE(s.rule_b.has_value());
    CHECK(*s.rule_a == parse_sexpr("(forEach Piece)"));
    CHECK(*s.rule_b == parse_sexpr("(is Group)"));
}

TEST_CASE("filter pattern 2 captures condition, both branches and postcondition") {
    GameDescription desc = test::load_description("pawn-duel.lud");
    PlayoutStrategy s = detect(desc);
    REQUIRE(s.tag == PlayoutStrategy::Tag::Filter);
    CHECK(s.pattern == 2);
    REQUIRE(s.rule_a.has_value());
    CHECK(*s.rule_a == parse_sexpr("(is Prev Mover)"));
    REQUIRE(s.rule_b.has_value());
    CHECK(s.rule_b->is_call_to("move"));
    CHECK(s.rule_b->arg(0).is_symbol_token("Promote"));
    REQUIRE(s.rule_c.has_value());
    CHECK(*s.rule_c == parse_sexpr("(forEach Piece)"));
    REQUIRE(s.rule_d.has_value());
    CHECK(s.rule_d->is_call_to("not"));
}

TEST_CASE("filter pattern 3 requires the exact or-with-pass skeleton") {
    GameDescription desc = test::load_description("go-lite.lud");
    PlayoutStrategy s = detect(desc);
    REQUIRE(s.tag == PlayoutStrategy::Tag::Filter);
    CHECK(s.pattern == 3);
    REQUIRE(s.rule_a.has_value());
    CHECK(s.rule_a->is_call_to("move"));  // the Add rule with its capture clause
    REQUIRE(s.rule_b.has_value());
    CHECK(s.rule_b->is_call_to(">"));
}

TEST_CASE("no-repetition applies when noRepeat is present and no filter matches") {
    GameDescription desc = test::load_description("corner-dash.lud");
    PlayoutStrategy s = detect(desc);
    CHECK(s.tag == PlayoutStrategy::Tag::NoRepetition);
}

TEST_CASE("plain movement rules fall back to Standard") {
    GameDescription desc = test::load_description("skirmish.lud");
    CHECK(detect(desc).tag == PlayoutStrategy::Tag::Standard);
}

TEST_CASE("precedence: filter beats noRepeat when both apply") {
    // go-lite carries (noRepeat) yet detects as Filter pattern 3; repetition
    // is folded into its postcondition checks instead.
    GameDescription desc = test::load_description("go-lite.lud");
    REQUIRE(desc.has_meta("noRepeat"));
    CHECK(detect(desc).tag == PlayoutStrategy::Tag::Filter);
}

TEST_CASE("precedence: add-to-empty beats noRepeat when both apply") {
    // Pieces only accumulate in add-to-empty games, so positions cannot
    // repeat and the add-to-empty implementation remains exact.
    GameDescription desc = parse_game(R"((game "X" (players 2)
        (equipment {(board (square 3)) (piece "P" Each)})
        (rules (meta (noRepeat)) (play (move Add (to (sites Empty)))))))");
    PlayoutStrategy s = detect(desc);
    CHECK(s.tag == PlayoutStrategy::Tag::AddToEmpty);
}

TEST_CASE("anything outside the template skeleton falls back to Standard") {
    // pass before the do-block: wrong order
    GameDescription reversed = parse_game(R"((game "X" (players 2)
        (equipment {(board (square 3)) (piece "P" Each)})
        (rules (play (or (move Pass)
                         (do (move Add (to (sites Empty))) ifAfterwards:(is Full)))))))");
    CHECK(detect(reversed).tag == PlayoutStrategy::Tag::Standard);

    // an extra alternative inside the or
    GameDescription extra = parse_game(R"((game "X" (players 2)
        (equipment {(board (square 3)) (piece "P" Each)})
        (rules (play (or (do (move Add (to (sites Empty))) ifAfterwards:(is Full))
                         (move Pass)
                         (move Pass))))))");
    CHECK(detect(extra).tag == PlayoutStrategy::Tag::Standard);

    // add-to-empty with a consequence attached is not the bare template
    GameDescription decorated = parse_game(R"((game "X" (players 2)
        (equipment {(board (square 3)) (piece "P" Each)})
        (rules (play (move Add (to (sites Empty)) (then (capture Surround)))))))");
    CHECK(detect(decorated).tag == PlayoutStrategy::Tag::Standard);
}

TEST_CASE("wildcard slots accept arbitrary rules") {
    GameDescription desc = parse_game(R"((game "X" (players 2)
        (equipment {(board (square 4))
            (piece "P" Each (move Step (directions All) (to if:(is Empty (to)))))})
        (rules (play (do (forEach Piece)
                         ifAfterwards:(and (is Group) (not (is Full))))))))");
    PlayoutStrategy s = detect(desc);
    REQUIRE(s.tag == PlayoutStrategy::Tag::Filter);
    CHECK(s.pattern == 1);
}

TEST_CASE("detection is deterministic and stable under print/parse") {
    for (const char* f : {"tic-tac-toe.lud", "go-lite.lud", "corner-dash.lud", "havannah.lud"}) {
        GameDescription desc = test::load_description(f);
        PlayoutStrategy first = detect(desc);
        PlayoutStrategy second = detect(desc);
        CHECK(first.to_string() == second.to_string());
        GameDescription reparsed = parse_game(print_game(desc));
        CHECK(detect(reparsed).to_string() == first.to_string());
    }
}

TEST_CASE("strategy tags round-trip through their string form") {
    CHECK(PlayoutStrategy::tag_from_string("Standard") == PlayoutStrategy::Tag::Standard);
    CHECK(PlayoutStrategy::tag_from_string("AddToEmpty") == PlayoutStrategy::Tag::AddToEmpty);
    CHECK(PlayoutStrategy::tag_from_string("AddToEmpty+swap") == PlayoutStrategy::Tag::AddToEmpty);
    CHECK(PlayoutStrategy::tag_from_string("Filter3") == PlayoutStrategy::Tag::Filter);
    CHECK(PlayoutStrategy::tag_from_string("NoRepetition") == PlayoutStrategy::Tag::NoRepetition);
    CHECK_FALSE(PlayoutStrategy::tag_from_string("Quantum").has_value());
}
