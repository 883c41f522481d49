#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "forge/engine.hpp"

namespace forge::test {

inline std::string read_game_text(const std::string& filename) {
    std::ifstream in(std::string(FORGE_GAMES_DIR) + "/" + filename);
    if (!in) throw std::runtime_error("missing corpus file " + filename);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline GameDescription load_description(const std::string& filename) {
    return parse_game(read_game_text(filename));
}

// The tic-tac-toe rules appear inline in several suites.
inline const char* kTicTacToe = R"((game "Tic-Tac-Toe"
    (players 2)
    (equipment {
        (board (square 3))
        (piece "Disc" P1)
        (piece "Cross" P2)
    })
    (rules
        (play (move Add (to (sites Empty))))
        (end (if (is Line 3) (result Mover Win)))
    )
))";

}  // namespace forge::test
