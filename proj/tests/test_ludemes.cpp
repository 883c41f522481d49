#include <algorithm>
#include <map>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "forge/engine.hpp"

#include "helpers.hpp"

using namespace forge;

namespace {

std::string board_string(int sites, const std::map<int, int>& cells) {
    std::string s(sites, '0');
    for (auto [site, code] : cells) s[site] = "0123456789abcdef"[code];
    return s;
}

std::string fixture(int sites, const std::map<int, int>& cells, int mover, int prev = 0,
                    int last_to = -1) {
    return "mover=" + std::to_string(mover) + " prev=" + std::to_string(prev) +
           " moves=4 passes=0 swapped=0 last_to=" + std::to_string(last_to) +
           " last_from=-1 board=" + board_string(sites, cells);
}

bool has_add_at(const std::vector<Move>& moves, int to) {
    return std::any_of(moves.begin(), moves.end(), [&](const Move& m) {
        return m.kind == MoveKind::Add && m.to == to;
    });
}

Move the_add_at(const std::vector<Move>& moves, int to) {
    for (const Move& m : moves)
        if (m.kind == MoveKind::Add && m.to == to) return m;
    FAIL("no Add at " << to);
    return {};
}

}  // namespace

TEST_CASE("tic-tac-toe generates one Add per empty site") {
    Game game = Game::load(test::kTicTacToe);
    GameState s = game.initial_state();
    auto moves = game.generate(s);
    REQUIRE(moves.size() == 9);
    std::set<int> sites;
    for (const Move& m : moves) {
        CHECK(m.kind == MoveKind::Add);
        CHECK(m.mover == 1);
        sites.insert(m.to);
    }
    CHECK(sites.size() == 9);
    CHECK(game.generate_unchecked(s).size() == 9);
    for (const Move& m : moves) CHECK(game.check_postconditions(s, m));
}

TEST_CASE("go-lite: a single-point eye owned by the opponent is suicide") {
    Game game = Game::load(test::read_game_text("go-lite.lud"));
    // Opponent stones on (0,1) and (1,0) make (0,0) a one-point eye for P2.
    // Playing there leaves the placed chain with zero liberties (hand check:
    // both neighbours of site 0 are enemy stones that keep other liberties,
    // so nothing is captured).
    GameState s = game.deserialize(fixture(25, {{1, 2}, {5, 2}}, 1));

    auto unchecked = game.generate_unchecked(s);
    auto exact = game.generate(s);
    CHECK(has_add_at(unchecked, 0));
    CHECK_FALSE(has_add_at(exact, 0));
    CHECK_FALSE(game.check_postconditions(s, the_add_at(unchecked, 0)));

    SECTION("every exact move is also a maybe-legal move") {
        for (const Move& m : exact)
            CHECK(std::find(unchecked.begin(), unchecked.end(), m) != unchecked.end());
    }
}

TEST_CASE("go-lite: capturing restores liberties, so the eye fill is legal") {
    Game game = Game::load(test::read_game_text("go-lite.lud"));
    // P2 chain {1, 5, 6} has its last liberty at site 0; P1 stones wall it in.
    // P1 playing 0 captures the chain first and is therefore legal.
    GameState s = game.deserialize(
        fixture(25, {{1, 2}, {5, 2}, {6, 2}, {2, 1}, {7, 1}, {11, 1}, {10, 1}}, 1));
    Move fill = the_add_at(game.generate_unchecked(s), 0);
    CHECK(game.check_postconditions(s, fill));
    GameState t = game.apply(s, fill);
    CHECK(t.empty_at(1));
    CHECK(t.empty_at(5));
    CHECK(t.empty_at(6));
    CHECK(t.piece_id_at(0) == 0);
    CHECK(t.hash == game.recompute_hash(t));
}

TEST_CASE("pattern-3 games always generate exactly one Pass") {
    Game game = Game::load(test::read_game_text("go-lite.lud"));
    GameState s = game.initial_state();
    auto moves = game.generate(s);
    CHECK(moves.size() == 26);  // 25 placements + pass
    CHECK(std::count_if(moves.begin(), moves.end(),
                        [](const Move& m) { return m.kind == MoveKind::Pass; }) == 1);
    // mid-game state too
    GameState mid = game.deserialize(fixture(25, {{1, 2}, {5, 2}, {12, 1}}, 2));
    auto mid_moves = game.generate(mid);
    CHECK(std::count_if(mid_moves.begin(), mid_moves.end(),
                        [](const Move& m) { return m.kind == MoveKind::Pass; }) == 1);
}

TEST_CASE("go-lite: two passes trigger area scoring") {
    Game game = Game::load(test::read_game_text("go-lite.lud"));
    auto pass_for = [](int mover) {
        Move m;
        m.kind = MoveKind::Pass;
        m.mover = static_cast<uint8_t>(mover);
        return m;
    };
    SECTION("stones plus exclusive territory decide the winner") {
        GameState s = game.deserialize(fixture(25, {{0, 1}, {1, 1}}, 1));
        s = game.apply(s, pass_for(1));
        CHECK_FALSE(s.is_terminal());
        s = game.apply(s, pass_for(2));
        REQUIRE(s.is_terminal());
        CHECK(s.outcome.utility(1) == 1.0);  // 2 stones + 23 territory vs 0
        CHECK(s.outcome.utility(2) == -1.0);
    }
    SECTION("an empty board scores as a draw") {
        GameState s = game.initial_state();
        s = game.apply(s, pass_for(1));
        s = game.apply(s, pass_for(2));
        REQUIRE(s.is_terminal());
        CHECK(s.outcome.is_draw());
    }
    SECTION("shared empty regions count for neither player") {
        // One stone each: the open region touches both, so score is 1 - 1.
        GameState s = game.deserialize(fixture(25, {{0, 1}, {24, 2}}, 1));
        s = game.apply(s, pass_for(1));
        s = game.apply(s, pass_for(2));
        REQUIRE(s.is_terminal());
        CHECK(s.outcome.is_draw());
    }
}

TEST_CASE("eval_end on tic-tac-toe") {
    Game game = Game::load(test::kTicTacToe);
    SECTION("initial state has no outcome") {
        CHECK_FALSE(game.eval_end(game.initial_state()).has_value());
    }
    SECTION("three crosses in a row wins for the mover who placed them") {
        GameState s = game.initial_state();
        for (int site : {3, 0, 4, 1, 8, 2}) {  // P2 completes the top row
            REQUIRE_FALSE(s.is_terminal());
            s = game.apply(s, the_add_at(game.legal_moves(s), site));
        }
        REQUIRE(s.is_terminal());
        CHECK(s.outcome.utility(2) == 1.0);
        CHECK(s.outcome.utility(1) == -1.0);
        CHECK(game.eval_end(s).has_value());
        CHECK(*game.eval_end(s) == s.outcome);
    }
}

// Exhaustive 3x3 oracle, independent of the engine: enumerate all 5-disc /
// 4-cross full boards and count those without a three-in-a-row for either
// side. Any such filling is reachable (lines only ever grow), so these are
// exactly the drawn final boards.
TEST_CASE("a full board with no line is a draw; 16 such boards exist") {
    static const int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                     {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
    auto has_line = [&](const std::array<int, 9>& b, int who) {
        for (const auto& line : kLines)
            if (b[line[0]] == who && b[line[1]] == who && b[line[2]] == who) return true;
        return false;
    };
    std::vector<std::array<int, 9>> drawn;
    for (int c0 = 0; c0 < 6; ++c0)
        for (int c1 = c0 + 1; c1 < 7; ++c1)
            for (int c2 = c1 + 1; c2 < 8; ++c2)
                for (int c3 = c2 + 1; c3 < 9; ++c3) {
                    std::array<int, 9> b;
                    b.fill(1);
                    b[c0] = b[c1] = b[c2] = b[c3] = 2;
                    if (!has_line(b, 1) && !has_line(b, 2)) drawn.push_back(b);
                }
    CHECK(drawn.size() == 16);

    // realize drawn boards through the engine and check the draw outcome
    Game game = Game::load(test::kTicTacToe);
    for (const auto& board : {drawn.front(), drawn.back()}) {
        std::vector<int> p1_sites, p2_sites;
        for (int i = 0; i < 9; ++i) (board[i] == 1 ? p1_sites : p2_sites).push_back(i);
        GameState s = game.initial_state();
        for (size_t k = 0; k < 9; ++k) {
            int site = (k % 2 == 0) ? p1_sites[k / 2] : p2_sites[k / 2];
            REQUIRE_FALSE(s.is_terminal());
            s = game.apply(s, the_add_at(game.legal_moves(s), site));
        }
        CHECK_FALSE(s.is_terminal());  // no end rule covers the full board...
        auto outcome = game.eval_end(s);
        REQUIRE(outcome.has_value());  // ...so the no-moves draw fires
        CHECK(outcome->is_draw());
        CHECK(game.legal_moves(s).empty());
    }
}

TEST_CASE("pawn duel: threat postcondition filters hanging moves") {
    Game game = Game::load(test::read_game_text("pawn-duel.lud"));
    // codes: 1 = P1 pawn, 2 = P2 pawn, 3 = P1 general, 4 = P2 general
    SECTION("a pawn cannot step into a defended square") {
        // P1 pawn on 7 (row 1, col 2); P2 pawn on 18 (row 3, col 3) attacks 12.
        GameState s = game.deserialize(fixture(25, {{7, 1}, {18, 2}}, 1));
        auto unchecked = game.generate_unchecked(s);
        auto exact = game.generate(s);
        auto fwd = std::find_if(unchecked.begin(), unchecked.end(), [](const Move& m) {
            return m.from == 7 && m.to == 12;
        });
        REQUIRE(fwd != unchecked.end());
        CHECK_FALSE(game.check_postconditions(s, *fwd));
        CHECK(std::none_of(exact.begin(), exact.end(),
                           [](const Move& m) { return m.from == 7 && m.to == 12; }));
    }
    SECTION("initial pawn pushes are all safe") {
        GameState s = game.initial_state();
        auto moves = game.legal_moves(s);
        CHECK(moves.size() == 5);
        for (const Move& m : moves) {
            CHECK(m.kind == MoveKind::Step);
            CHECK(m.to == m.from + 5);  // forward for player 1
        }
    }
    SECTION("reaching the far rank promotes via an extra move of the same player") {
        GameState s = game.deserialize(fixture(25, {{15, 1}, {2, 2}}, 1));
        auto moves = game.legal_moves(s);
        auto push = std::find_if(moves.begin(), moves.end(), [](const Move& m) {
            return m.from == 15 && m.to == 20;
        });
        REQUIRE(push != moves.end());
        GameState t = game.apply(s, *push);
        CHECK(t.mover == 1);  // the mover goes again
        CHECK(t.prev_mover == 1);
        auto promo = game.legal_moves(t);
        REQUIRE(promo.size() == 1);
        CHECK(promo[0].kind == MoveKind::Promote);
        CHECK(promo[0].to == 20);
        GameState u = game.apply(t, promo[0]);
        CHECK(game.piece(u.piece_id_at(20)).name == "General");
        CHECK(game.owner_of(u.piece_id_at(20)) == 1);
        CHECK(u.mover == 2);
    }
    SECTION("capturing the last enemy piece ends the game") {
        // P1 pawn on 6 captures the lone P2 pawn on 12 diagonally.
        GameState s = game.deserialize(fixture(25, {{6, 1}, {12, 2}}, 1));
        auto moves = game.legal_moves(s);
        auto cap = std::find_if(moves.begin(), moves.end(), [](const Move& m) {
            return m.from == 6 && m.to == 12;
        });
        REQUIRE(cap != moves.end());
        GameState t = game.apply(s, *cap);
        REQUIRE(t.is_terminal());
        CHECK(t.outcome.utility(1) == 1.0);
    }
}

TEST_CASE("herd: the group postcondition keeps the flock together") {
    Game game = Game::load(test::read_game_text("herd.lud"));
    GameState s = game.initial_state();
    auto unchecked = game.generate_unchecked(s);
    auto exact = game.generate(s);
    // moving the sheep at 4 to 8 strands it from {0, 1}
    auto stray = std::find_if(unchecked.begin(), unchecked.end(), [](const Move& m) {
        return m.from == 4 && m.to == 8;
    });
    REQUIRE(stray != unchecked.end());
    CHECK_FALSE(game.check_postconditions(s, *stray));
    CHECK(std::none_of(exact.begin(), exact.end(),
                       [](const Move& m) { return m.from == 4 && m.to == 8; }));
    // moving it to 5 keeps the herd connected
    auto good = std::find_if(unchecked.begin(), unchecked.end(), [](const Move& m) {
        return m.from == 4 && m.to == 5;
    });
    REQUIRE(good != unchecked.end());
    CHECK(game.check_postconditions(s, *good));
    CHECK(exact.size() < unchecked.size());
}

TEST_CASE("yavalath: four in a row wins even though it contains a three") {
    Game game = Game::load(test::read_game_text("yavalath.lud"));
    const Board& board = game.board();
    // a straight run of sites along direction 0, starting from the centre
    std::vector<int> line;
    int centre = -1;
    for (int site = 0; site < board.site_count(); ++site)
        if (board.centre_distance(site) == 0) centre = site;
    REQUIRE(centre >= 0);
    int cur = centre;
    for (int k = 0; k < 4 && cur >= 0; ++k) {
        line.push_back(cur);
        cur = board.step(cur, 0);
    }
    REQUIRE(line.size() == 4);
    // three corner cells for player 2 (corners are never adjacent)
    std::vector<int> corners;
    for (int site = 0; site < board.site_count() && corners.size() < 3; ++site)
        if (board.corner_bits(site)) corners.push_back(site);
    REQUIRE(corners.size() == 3);

    SECTION("gap-filled four fires the win rule first") {
        GameState s = game.initial_state();
        s = game.apply(s, the_add_at(game.legal_moves(s), line[0]));
        s = game.apply(s, the_add_at(game.legal_moves(s), corners[0]));
        s = game.apply(s, the_add_at(game.legal_moves(s), line[1]));
        s = game.apply(s, the_add_at(game.legal_moves(s), corners[1]));
        s = game.apply(s, the_add_at(game.legal_moves(s), line[3]));
        s = game.apply(s, the_add_at(game.legal_moves(s), corners[2]));
        REQUIRE_FALSE(s.is_terminal());
        s = game.apply(s, the_add_at(game.legal_moves(s), line[2]));  // fills the gap
        REQUIRE(s.is_terminal());
        CHECK(s.outcome.utility(1) == 1.0);
    }
    SECTION("a bare three loses") {
        GameState s = game.initial_state();
        s = game.apply(s, the_add_at(game.legal_moves(s), line[0]));
        s = game.apply(s, the_add_at(game.legal_moves(s), corners[0]));
        s = game.apply(s, the_add_at(game.legal_moves(s), line[1]));
        s = game.apply(s, the_add_at(game.legal_moves(s), corners[1]));
        REQUIRE_FALSE(s.is_terminal());
        s = game.apply(s, the_add_at(game.legal_moves(s), line[2]));
        REQUIRE(s.is_terminal());
        CHECK(s.outcome.utility(1) == -1.0);
        CHECK(s.outcome.utility(2) == 1.0);
    }
}

TEST_CASE("hex: connecting your two sides wins") {
    Game game = Game::load(test::read_game_text("hex.lud"));
    GameState s = game.initial_state();
    // P1 builds column 0 (rows 0..4); P2 answers inside row 1
    int p1[] = {0, 5, 10, 15, 20};
    int p2[] = {6, 7, 8, 9};
    for (int k = 0; k < 4; ++k) {
        s = game.apply(s, the_add_at(game.legal_moves(s), p1[k]));
        REQUIRE_FALSE(s.is_terminal());
        s = game.apply(s, the_add_at(game.legal_moves(s), p2[k]));
        REQUIRE_FALSE(s.is_terminal());
    }
    s = game.apply(s, the_add_at(game.legal_moves(s), p1[4]));
    REQUIRE(s.is_terminal());
    CHECK(s.outcome.utility(1) == 1.0);
}

namespace {

// axial coordinates in the same row-major order Board::hex_hex enumerates
std::map<std::pair<int, int>, int> hexhex_index(int base) {
    std::map<std::pair<int, int>, int> index;
    int m = base - 1, next = 0;
    for (int r = -m; r <= m; ++r)
        for (int q = -m; q <= m; ++q)
            if (std::abs(q + r) <= m) index[{q, r}] = next++;
    return index;
}

}  // namespace

TEST_CASE("havannah win shapes") {
    Game game = Game::load(test::read_game_text("havannah.lud"));
    auto idx = hexhex_index(4);
    REQUIRE(static_cast<int>(idx.size()) == game.board().site_count());

    auto eval_with_stones = [&](const std::vector<std::pair<int, int>>& stones,
                                std::pair<int, int> last) {
        std::map<int, int> cells;
        for (auto qr : stones) cells[idx.at(qr)] = 1;
        GameState s =
            game.deserialize(fixture(37, cells, 2, /*prev=*/1, /*last_to=*/idx.at(last)));
        return game.eval_end(s);
    };

    SECTION("bridge: a chain joining two corners") {
        std::vector<std::pair<int, int>> path = {{3, 0}, {2, 1}, {1, 2}, {0, 3}};
        auto outcome = eval_with_stones(path, {1, 2});
        REQUIRE(outcome.has_value());
        CHECK(outcome->utility(1) == 1.0);
        // dropping one corner breaks it
        std::vector<std::pair<int, int>> partial = {{3, 0}, {2, 1}, {1, 2}};
        CHECK_FALSE(eval_with_stones(partial, {1, 2}).has_value());
    }
    SECTION("fork: a chain touching three edges") {
        std::vector<std::pair<int, int>> fork = {{0, 0},  {1, 0},  {2, 0},  {3, -1}, {0, 1},
                                                 {0, 2},  {-1, 3}, {-1, 0}, {-2, 0}, {-2, -1}};
        auto outcome = eval_with_stones(fork, {0, 0});
        REQUIRE(outcome.has_value());
        CHECK(outcome->utility(1) == 1.0);
    }
    SECTION("ring: six stones around a cell, empty or not") {
        std::vector<std::pair<int, int>> ring = {{1, 0}, {0, 1}, {-1, 1},
                                                 {-1, 0}, {0, -1}, {1, -1}};
        auto outcome = eval_with_stones(ring, {1, 0});
        REQUIRE(outcome.has_value());
        CHECK(outcome->utility(1) == 1.0);

        // filled centre still counts as a ring
        auto filled = ring;
        filled.push_back({0, 0});
        CHECK(eval_with_stones(filled, {1, 0}).has_value());

        // five stones do not make a ring
        std::vector<std::pair<int, int>> open(ring.begin(), ring.end() - 1);
        CHECK_FALSE(eval_with_stones(open, {1, 0}).has_value());
    }
}

TEST_CASE("generate is a subset of generate_unchecked on random reachable states") {
    const char* files[] = {"tic-tac-toe.lud", "gomoku.lud",    "hex.lud",
                           "havannah.lud",    "yavalath.lud",  "go-lite.lud",
                           "pawn-duel.lud",   "herd.lud",      "corner-dash.lud",
                           "skirmish.lud"};
    Rng rng(2718281828);
    for (const char* f : files) {
        CAPTURE(f);
        Game game = Game::load(test::read_game_text(f));
        for (int trial = 0; trial < 60; ++trial) {
            GameState s = game.initial_state();
            uint64_t depth = rng.next_below(25);
            for (uint64_t d = 0; d < depth && !s.is_terminal(); ++d) {
                auto moves = game.legal_moves(s);
                if (moves.empty()) break;
                s = game.apply(s, moves[rng.next_below(moves.size())]);
            }
            if (s.is_terminal()) continue;
            auto unchecked = game.generate_unchecked(s);
            auto exact = game.generate(s);
            REQUIRE(exact.size() <= unchecked.size());
            for (const Move& m : exact) {
                REQUIRE(std::find(unchecked.begin(), unchecked.end(), m) != unchecked.end());
            }
            // no duplicates by value
            for (size_t i = 0; i < unchecked.size(); ++i)
                for (size_t j = i + 1; j < unchecked.size(); ++j)
                    REQUIRE(unchecked[i] != unchecked[j]);
            // keystone: membership in generate is exactly the ifAfterwards check
            if (!game.no_repeat()) {
                for (const Move& m : unchecked) {
                    bool in_exact = std::find(exact.begin(), exact.end(), m) != exact.end();
                    REQUIRE(in_exact == game.check_postconditions(s, m));
                }
            }
        }
    }
}

TEST_CASE("rules referencing undefined regions fail at load") {
    CHECK_THROWS_AS(Game::load(R"((game "X" (players 2)
        (equipment {(board (square 3)) (piece "P" Each)})
        (rules (play (move Add (to (sites "Nowhere" Mover)))))))"),
                    EvalError);
}

TEST_CASE("slide moves travel along empty rays and stop at blockers") {
    Game game = Game::load(R"((game "Sliders" (players 2)
        (equipment {(board (square 4))
            (piece "Rook" Each (move Slide (directions Orthogonal) (to if:(not (is Friend (to))))))})
        (rules (start {(place "Rook" P1 (sites {0})) (place "Rook" P2 (sites {3}))})
               (play (forEach Piece)))))");
    GameState s = game.initial_state();
    auto moves = game.legal_moves(s);
    // rook on 0: east over 1, 2 then a capture on 3; north over 4, 8, 12
    std::set<int> targets;
    for (const Move& m : moves) {
        CHECK(m.from == 0);
        targets.insert(m.to);
    }
    CHECK(targets == std::set<int>({1, 2, 3, 4, 8, 12}));
}
