#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "forge/engine.hpp"
#include "forge/playout.hpp"
#include "forge/rng.hpp"

namespace forge {

// Playout evaluator injected into the search, so that agents differing only
// in their playout implementation can be compared like for like.
using PlayoutFn = std::function<PlayoutResult(GameState, Rng&)>;

inline PlayoutFn make_playout_fn(const Game& game, const PlayoutStrategy& strategy,
                                 PolicySpec policy = PolicySpec::uniform(), int max_moves = 0) {
    return [&game, strategy, policy = std::move(policy), max_moves](GameState state,
                                                                    Rng& rng) -> PlayoutResult {
        PlayoutConfig cfg;
        cfg.rng_seed = rng.next_u64();
        cfg.policy = policy;
        cfg.max_moves = max_moves;
        return run_playout(game, strategy, std::move(state), cfg);
    };
}

struct SearchConfig {
    int iterations = 1000;
    double exploration = 1.41421356237309505;  // sqrt(2)
    uint64_t rng_seed = 1;
    bool shadow_check = false;  // re-validate tree moves against legal_moves
};

namespace detail {

struct SearchNode {
    GameState state;
    std::vector<Move> untried;
    std::vector<Move> child_moves;
    std::vector<std::unique_ptr<SearchNode>> children;
    int visits = 0;
    std::array<double, kMaxPlayers> value_sum = {0.0, 0.0, 0.0, 0.0};

    explicit SearchNode(const Game& game, GameState s) : state(std::move(s)) {
        if (!state.is_terminal()) {
            untried = game.legal_moves(state);
            if (untried.empty()) game.resolve_no_moves(state);
        }
    }
};

inline size_t select_ucb(const SearchNode& node, double c) {
    const int mover = node.state.mover;
    size_t best = 0;
    double best_score = -1e300;
    const double log_n = std::log(static_cast<double>(node.visits));
    for (size_t i = 0; i < node.children.size(); ++i) {
        const SearchNode& child = *node.children[i];
        double exploit = child.value_sum[mover - 1] / child.visits;
        double score = exploit + c * std::sqrt(log_n / child.visits);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

}  // namespace detail

// UCT: selection by UCB1, one expansion per iteration, playout through the
// injected function, backpropagation of per-player utilities. The tree phase
// always works from exact legal move lists. Returns the most-visited root
// move, ties broken by the lowest index in the root's move list.
inline Move search(const Game& game, const GameState& root_state, const SearchConfig& cfg,
                   const PlayoutFn& playout_fn) {
    if (root_state.is_terminal()) throw std::logic_error("search needs an ongoing state");
    if (cfg.iterations < 1) throw std::logic_error("search needs at least one iteration");
    Rng rng(cfg.rng_seed);
    detail::SearchNode root(game, root_state);
    if (root.untried.empty()) throw std::logic_error("search needs a state with legal moves");
    const std::vector<Move> root_moves = root.untried;  // original order, for tie-breaking

    std::vector<detail::SearchNode*> path;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        path.clear();
        detail::SearchNode* node = &root;
        path.push_back(node);

        while (!node->state.is_terminal() && node->untried.empty() && !node->children.empty()) {
            node = node->children[detail::select_ucb(*node, cfg.exploration)].get();
            path.push_back(node);
        }

        if (!node->state.is_terminal() && !node->untried.empty()) {
            size_t pick = rng.next_below(node->untried.size());
            Move m = node->untried[pick];
            node->untried[pick] = node->untried.back();
            node->untried.pop_back();
            if (cfg.shadow_check) {
                auto exact = game.legal_moves(node->state);
                if (std::find(exact.begin(), exact.end(), m) == exact.end())
                    throw std::logic_error("tree phase produced a move outside legal_moves");
            }
            auto child = std::make_unique<detail::SearchNode>(game, game.apply(node->state, m));
            node->child_moves.push_back(m);
            node->children.push_back(std::move(child));
            node = node->children.back().get();
            path.push_back(node);
        }

        std::array<double, kMaxPlayers> utilities = {0.0, 0.0, 0.0, 0.0};
        if (node->state.is_terminal()) {
            for (int p = 1; p <= game.player_count(); ++p)
                utilities[p - 1] = node->state.outcome.utility(p);
        } else {
            PlayoutResult result = playout_fn(node->state, rng);
            if (result.outcome) {
                for (int p = 1; p <= game.player_count(); ++p)
                    utilities[p - 1] = result.outcome->utility(p);
            }
            // truncated playouts score as a draw
        }
        for (detail::SearchNode* n : path) {
            ++n->visits;
            for (int p = 0; p < game.player_count(); ++p) n->value_sum[p] += utilities[p];
        }
    }

    // most visited root child; ties resolved by the lowest root-move index
    int best_visits = -1;
    size_t best_rank = root_moves.size();
    Move best = root_moves.front();
    for (size_t i = 0; i < root.children.size(); ++i) {
        int v = root.children[i]->visits;
        size_t rank = std::find(root_moves.begin(), root_moves.end(), root.child_moves[i]) -
                      root_moves.begin();
        if (v > best_visits || (v == best_visits && rank < best_rank)) {
            best_visits = v;
            best_rank = rank;
            best = root.child_moves[i];
        }
    }
    return best;
}

}  // namespace forge
