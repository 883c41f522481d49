#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace forge {

class Game;

inline constexpr int kMaxSites = 128;
inline constexpr int kMaxPlayers = 4;

enum class MoveKind : uint8_t { Add, Step, Pass, Swap, Promote };

// A typed action. Slides produce Step moves (same dynamics: a piece travels
// from one site to another, capturing whatever it lands on).
struct Move {
    MoveKind kind = MoveKind::Pass;
    uint8_t mover = 0;
    uint8_t piece = 0;      // piece id placed (Add), moved (Step), or promoted to
    uint8_t post_idx = 0xFF;   // postcondition attached by the generator, 0xFF = none
    uint8_t then_idx = 0xFF;   // consequence attached by the generator, 0xFF = none
    int16_t from = -1;
    int16_t to = -1;

    friend bool operator==(const Move& a, const Move& b) {
        return a.kind == b.kind && a.mover == b.mover && a.piece == b.piece &&
               a.from == b.from && a.to == b.to;
    }
    friend bool operator!=(const Move& a, const Move& b) { return !(a == b); }
};

// Per-player utilities: win = 1, loss = -1, draw = 0.
struct Outcome {
    std::array<int8_t, kMaxPlayers> utilities = {0, 0, 0, 0};
    uint8_t player_count = 0;

    static Outcome draw(int players) {
        Outcome o;
        o.player_count = static_cast<uint8_t>(players);
        return o;
    }

    static Outcome win_for(int winner, int players) {
        Outcome o;
        o.player_count = static_cast<uint8_t>(players);
        for (int p = 1; p <= players; ++p) o.utilities[p - 1] = (p == winner) ? 1 : -1;
        return o;
    }

    static Outcome loss_for(int loser, int players) {
        Outcome o;
        o.player_count = static_cast<uint8_t>(players);
        for (int p = 1; p <= players; ++p) o.utilities[p - 1] = (p == loser) ? -1 : 1;
        return o;
    }

    double utility(int player) const { return utilities[player - 1]; }
    bool is_draw() const {
        for (int p = 0; p < player_count; ++p)
            if (utilities[p] != 0) return false;
        return true;
    }

    friend bool operator==(const Outcome& a, const Outcome& b) {
        return a.player_count == b.player_count && a.utilities == b.utilities;
    }
};

// Value-type game state. Board cells hold 0 for empty or 1 + piece id, where
// the piece id indexes the game's expanded (type, owner) piece table. States
// reference their game but own all mutable data, so copies are independent.
struct GameState {
    const Game* game = nullptr;
    std::array<uint8_t, kMaxSites> board = {};
    std::array<uint8_t, kMaxPlayers + 1> piece_counts = {};  // indexed by owner
    uint64_t hash = 0;
    std::vector<uint64_t> hash_history;  // every position seen, current included;
                                         // maintained only under (noRepeat)
    uint16_t move_number = 0;
    int16_t last_to = -1;
    int16_t last_from = -1;
    uint8_t mover = 1;
    uint8_t prev_mover = 0;  // 0 until a move has been made
    uint8_t consecutive_passes = 0;
    bool swapped = false;
    bool terminated = false;
    Outcome outcome;

    bool is_terminal() const { return terminated; }

    int piece_id_at(int site) const { return static_cast<int>(board[site]) - 1; }
    bool empty_at(int site) const { return board[site] == 0; }
};

}  // namespace forge
