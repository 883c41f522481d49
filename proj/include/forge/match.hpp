#pragma once

#include <functional>
#include <string>

#include "forge/engine.hpp"
#include "forge/mcts.hpp"
#include "forge/playout.hpp"
#include "forge/rng.hpp"

namespace forge {

// A move-choosing agent. Receives the exact legal move list so that every
// agent plays from the same contract.
using Agent = std::function<Move(const Game&, const GameState&, const std::vector<Move>&, Rng&)>;

inline Agent random_agent() {
    return [](const Game&, const GameState&, const std::vector<Move>& moves, Rng& rng) {
        return moves[rng.next_below(moves.size())];
    };
}

inline Agent mcts_agent(int iterations, PlayoutFn playout_fn, double exploration = 1.41421356237309505) {
    return [iterations, playout_fn = std::move(playout_fn), exploration](
               const Game& game, const GameState& state, const std::vector<Move>&, Rng& rng) {
        SearchConfig cfg;
        cfg.iterations = iterations;
        cfg.exploration = exploration;
        cfg.rng_seed = rng.next_u64();
        return search(game, state, cfg, playout_fn);
    };
}

struct MatchResult {
    int games = 0;
    int wins_a = 0;
    int wins_b = 0;
    int draws = 0;  // includes move-cap truncations

    double win_rate_a() const { return games ? static_cast<double>(wins_a) / games : 0.0; }
};

// Plays n games between two agents, alternating who takes player 1, and
// tallies results from agent A's perspective.
inline MatchResult play_match(const Game& game, const Agent& agent_a, const Agent& agent_b,
                              int n_games, uint64_t seed, int max_moves = 0) {
    MatchResult result;
    result.games = n_games;
    const int cap = max_moves > 0 ? max_moves : 50 * game.board().site_count();
    for (int g = 0; g < n_games; ++g) {
        Rng rng(Rng::derive(seed, static_cast<uint64_t>(g)));
        const int a_player = (g % 2) + 1;
        GameState state = game.initial_state();
        int moves_played = 0;
        while (!state.is_terminal() && moves_played < cap) {
            std::vector<Move> moves = game.legal_moves(state);
            if (moves.empty()) {
                game.resolve_no_moves(state);
                break;
            }
            const Agent& agent = (state.mover == a_player) ? agent_a : agent_b;
            Move m = agent(game, state, moves, rng);
            game.apply_in_place(state, m);
            ++moves_played;
        }
        if (!state.is_terminal()) {
            ++result.draws;
        } else if (state.outcome.utility(a_player) > 0) {
            ++result.wins_a;
        } else if (state.outcome.utility(a_player) < 0) {
            ++result.wins_b;
        } else {
            ++result.draws;
        }
    }
    return result;
}

}  // namespace forge
