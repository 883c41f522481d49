#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "forge/detect.hpp"
#include "forge/engine.hpp"
#include "forge/policy.hpp"
#include "forge/rng.hpp"

namespace forge {

struct PlayoutConfig {
    int max_moves = 0;     // 0 = 50 x site count
    uint64_t rng_seed = 1;
    PolicySpec policy;     // uniform by default

    // Test instrumentation. The observer sees, for every step, the state,
    // the candidate list offered to the policy, and the move applied.
    // shadow_check re-validates every applied move against the exact legal
    // move list and counts violations (slow; test use only).
    std::function<void(const GameState&, const std::vector<Move>&, const Move&)> observer;
    bool shadow_check = false;
};

struct PlayoutResult {
    GameState final_state;
    std::optional<Outcome> outcome;  // empty iff truncated
    bool truncated = false;
    int length = 0;
    long rejections = 0;          // candidates rejected by postcondition checks
    long shadow_violations = 0;   // applied moves missing from legal_moves (shadow mode)
    std::optional<Move> first_move;
};

namespace detail {

inline int playout_cap(const Game& game, const PlayoutConfig& cfg) {
    return cfg.max_moves > 0 ? cfg.max_moves : 50 * game.board().site_count();
}

inline void note_step(const Game& game, const GameState& s, const std::vector<Move>& candidates,
                      const Move& chosen, const PlayoutConfig& cfg, PlayoutResult& result) {
    if (cfg.observer) cfg.observer(s, candidates, chosen);
    if (cfg.shadow_check) {
        auto exact = game.legal_moves(s);
        if (std::find(exact.begin(), exact.end(), chosen) == exact.end())
            ++result.shadow_violations;
    }
    if (result.length == 0) result.first_move = chosen;
}

inline bool finish_if_over(const Game& game, GameState& s, int cap, PlayoutResult& result) {
    if (s.terminated) {
        result.outcome = s.outcome;
        return true;
    }
    if (result.length >= cap) {
        result.truncated = true;
        return true;
    }
    return false;
}

}  // namespace detail

// Alg. 1: recompute the exact legal move list every step, sample, apply.
inline PlayoutResult standard_playout(const Game& game, GameState state, const PlayoutConfig& cfg) {
    PlayoutResult result;
    Rng rng(cfg.rng_seed);
    const int cap = detail::playout_cap(game, cfg);
    while (!detail::finish_if_over(game, state, cap, result)) {
        std::vector<Move> moves = game.legal_moves(state);
        if (moves.empty()) {
            game.resolve_no_moves(state);
            result.outcome = state.outcome;
            break;
        }
        size_t idx;
        if (cfg.policy.kind == PolicySpec::Kind::Uniform) {
            idx = rng.next_below(moves.size());
        } else {
            PolicySampler sampler(state, moves, cfg.policy, rng);
            idx = sampler.draw();
        }
        Move chosen = moves[idx];
        detail::note_step(game, state, moves, chosen, cfg, result);
        game.apply_in_place(state, chosen);
        ++result.length;
    }
    result.final_state = std::move(state);
    return result;
}

// Add-to-empty games: the legal move list is built once and shrinks by
// exactly one per move (swap-and-pop), with the swap option injected for the
// second player's first turn only.
inline PlayoutResult add_to_empty_playout(const Game& game, GameState state,
                                          const PlayoutConfig& cfg) {
    PlayoutResult result;
    Rng rng(cfg.rng_seed);
    const int cap = detail::playout_cap(game, cfg);

    std::vector<Move> list;
    list.reserve(game.board().site_count());
    for (int site = 0; site < game.board().site_count(); ++site) {
        if (!state.empty_at(site)) continue;
        Move m;
        m.kind = MoveKind::Add;
        m.to = static_cast<int16_t>(site);
        list.push_back(m);
    }

    std::vector<Move> step_moves;  // scratch for the swap turn / instrumented runs
    while (!detail::finish_if_over(game, state, cap, result)) {
        const bool swap_now = game.swap_available(state);
        const size_t count = list.size() + (swap_now ? 1 : 0);
        if (count == 0) {
            game.resolve_no_moves(state);
            result.outcome = state.outcome;
            break;
        }

        size_t idx;
        if (cfg.policy.kind == PolicySpec::Kind::Uniform && !cfg.observer) {
            idx = rng.next_below(count);
        } else {
            step_moves = list;
            if (swap_now) step_moves.push_back(Game::swap_move());
            for (Move& m : step_moves) m.mover = state.mover;
            if (cfg.policy.kind == PolicySpec::Kind::Uniform) {
                idx = rng.next_below(count);
            } else {
                PolicySampler sampler(state, step_moves, cfg.policy, rng);
                idx = sampler.draw();
            }
        }

        Move chosen;
        if (swap_now && idx == list.size()) {
            chosen = Game::swap_move();
        } else {
            chosen = list[idx];
            chosen.mover = state.mover;
            chosen.piece = static_cast<uint8_t>(game.first_piece_of(state.mover));
        }
        if (cfg.observer || cfg.shadow_check) {
            if (step_moves.empty() || step_moves.size() != count) {
                step_moves = list;
                if (swap_now) step_moves.push_back(Game::swap_move());
                for (Move& m : step_moves) m.mover = state.mover;
            }
            detail::note_step(game, state, step_moves, chosen, cfg, result);
        } else if (result.length == 0) {
            result.first_move = chosen;
        }
        game.apply_in_place(state, chosen);
        if (chosen.kind == MoveKind::Add) {
            list[idx] = list.back();
            list.pop_back();
        }
        ++result.length;
        step_moves.clear();
    }
    result.final_state = std::move(state);
    return result;
}

namespace detail {

// Alg. 2: generate candidates without postconditions, sample, and check the
// postcondition only for the sampled move; rejected candidates are removed
// and the policy distribution repaired before resampling.
inline PlayoutResult rejection_playout(const Game& game, GameState state,
                                       const PlayoutConfig& cfg) {
    PlayoutResult result;
    Rng rng(cfg.rng_seed);
    const int cap = playout_cap(game, cfg);
    std::vector<Move> candidates;
    while (!finish_if_over(game, state, cap, result)) {
        candidates = game.generate_unchecked(state);
        if (game.swap_available(state)) candidates.push_back(Game::swap_move());
        PolicySampler sampler(state, candidates, cfg.policy, rng);
        bool accepted = false;
        Move chosen;
        while (!candidates.empty()) {
            size_t idx = sampler.draw();
            chosen = candidates[idx];
            if (game.check_postconditions(state, chosen)) {
                accepted = true;
                break;
            }
            ++result.rejections;
            sampler.reject(idx);
        }
        if (!accepted) {
            // every maybe-legal move failed: the state has no legal moves
            game.resolve_no_moves(state);
            result.outcome = state.outcome;
            break;
        }
        note_step(game, state, candidates, chosen, cfg, result);
        game.apply_in_place(state, chosen);
        ++result.length;
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace detail

// Filter games (ifAfterwards: postconditions): rejection sampling over the
// unchecked candidate list.
inline PlayoutResult filter_playout(const Game& game, GameState state, const PlayoutConfig& cfg) {
    return detail::rejection_playout(game, std::move(state), cfg);
}

// (noRepeat) games: identical control flow with "successor not seen before"
// as the postcondition.
inline PlayoutResult no_repetition_playout(const Game& game, GameState state,
                                           const PlayoutConfig& cfg) {
    return detail::rejection_playout(game, std::move(state), cfg);
}

inline PlayoutResult run_playout(const Game& game, const PlayoutStrategy& strategy,
                                 GameState state, const PlayoutConfig& cfg) {
    switch (strategy.tag) {
        case PlayoutStrategy::Tag::Standard:
            return standard_playout(game, std::move(state), cfg);
        case PlayoutStrategy::Tag::AddToEmpty:
            return add_to_empty_playout(game, std::move(state), cfg);
        case PlayoutStrategy::Tag::Filter:
            return filter_playout(game, std::move(state), cfg);
        case PlayoutStrategy::Tag::NoRepetition:
            return no_repetition_playout(game, std::move(state), cfg);
    }
    return standard_playout(game, std::move(state), cfg);
}

}  // namespace forge
