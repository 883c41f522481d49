#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <vector>

#include "forge/engine.hpp"
#include "forge/errors.hpp"
#include "forge/rng.hpp"
#include "forge/state.hpp"

namespace forge {

// Deterministic move score Q(m). Inside add-to-empty playouts the moves
// handed to a scorer may carry an unset mover; use state.mover instead.
using MoveScorer = std::function<double(const GameState&, const Move&)>;

inline MoveScorer zero_scorer() {
    return [](const GameState&, const Move&) { return 0.0; };
}

// Prefers central destinations: score is the negated distance of the
// destination from the board centre (0 for moves without a destination).
inline MoveScorer centrality_scorer() {
    return [](const GameState& s, const Move& m) {
        if (m.to < 0) return 0.0;
        return -s.game->board().centre_distance(m.to);
    };
}

inline uint64_t move_table_key(const Move& m) {
    return (static_cast<uint64_t>(m.kind) << 32) |
           (static_cast<uint64_t>(static_cast<uint16_t>(m.from)) << 16) |
           static_cast<uint64_t>(static_cast<uint16_t>(m.to));
}

// Fixture scorer for tests: looks moves up by (kind, from, to).
inline MoveScorer table_scorer(std::unordered_map<uint64_t, double> table, double fallback = 0.0) {
    return [table = std::move(table), fallback](const GameState&, const Move& m) {
        auto it = table.find(move_table_key(m));
        return it == table.end() ? fallback : it->second;
    };
}

struct PolicySpec {
    enum class Kind : uint8_t { Uniform, EpsilonGreedy, Boltzmann };

    Kind kind = Kind::Uniform;
    double epsilon = 0.0;  // EpsilonGreedy
    double tau = 1.0;      // Boltzmann
    MoveScorer scorer;

    static PolicySpec uniform() { return {}; }

    static PolicySpec epsilon_greedy(double epsilon, MoveScorer scorer) {
        if (epsilon < 0.0 || epsilon > 1.0) throw DomainError("epsilon must be in [0, 1]");
        PolicySpec p;
        p.kind = Kind::EpsilonGreedy;
        p.epsilon = epsilon;
        p.scorer = std::move(scorer);
        return p;
    }

    static PolicySpec boltzmann(double tau, MoveScorer scorer) {
        if (!(tau > 0.0)) throw DomainError("temperature must be positive");
        PolicySpec p;
        p.kind = Kind::Boltzmann;
        p.tau = tau;
        p.scorer = std::move(scorer);
        return p;
    }
};

// Candidate moves with their selection probabilities. The candidate set may
// still contain not-yet-rejected illegal moves during filter playouts.
struct MoveDistribution {
    std::vector<Move> moves;
    std::vector<double> probs;

    bool valid(double tolerance = 1e-9) const {
        if (moves.size() != probs.size() || probs.empty()) return false;
        double sum = 0.0;
        for (double p : probs) {
            if (p < 0.0) return false;
            sum += p;
        }
        return std::abs(sum - 1.0) <= tolerance;
    }
};

// p_i = exp(Q_i / tau) / sum_j exp(Q_j / tau), computed with max-subtraction
// so large scores cannot overflow.
inline std::vector<double> boltzmann(const std::vector<double>& scores, double tau) {
    if (scores.empty()) throw DomainError("boltzmann needs at least one score");
    if (!(tau > 0.0)) throw DomainError("temperature must be positive");
    double mx = *std::max_element(scores.begin(), scores.end());
    std::vector<double> probs(scores.size());
    double sum = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        probs[i] = std::exp((scores[i] - mx) / tau);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

// Inverse-CDF draw over the stored order.
inline size_t sample_index(const std::vector<double>& probs, Rng& rng) {
    double r = rng.next_double();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (r < acc) return i;
    }
    return probs.size() - 1;  // guard against floating-point shortfall
}

inline size_t sample(const MoveDistribution& dist, Rng& rng) {
    return sample_index(dist.probs, rng);
}

// Removes the rejected entry and multiplies every survivor by
// 1 / (1 - p_rejected); pairwise ratios of the survivors are unchanged.
// Throws DegenerateDistribution when numerically no mass would remain, in
// which case the caller recomputes the distribution over the survivors.
inline MoveDistribution renormalize_after_rejection(MoveDistribution dist, size_t rejected) {
    if (dist.probs.size() < 2) throw DomainError("cannot reject from a distribution of one");
    double p = dist.probs[rejected];
    if (p >= 1.0 - 1e-12)
        throw DegenerateDistribution("rejected move held all the probability mass");
    double scale = 1.0 / (1.0 - p);
    dist.moves.erase(dist.moves.begin() + rejected);
    dist.probs.erase(dist.probs.begin() + rejected);
    for (double& q : dist.probs) q *= scale;
    return dist;
}

// With probability epsilon pick uniformly, otherwise pick the best-scoring
// move, breaking ties uniformly.
inline size_t epsilon_greedy_select(const GameState& state, const std::vector<Move>& moves,
                                    double epsilon, const MoveScorer& scorer, Rng& rng) {
    if (moves.empty()) throw DomainError("no moves to select from");
    if (rng.next_double() < epsilon) return rng.next_below(moves.size());
    size_t pick = 0;
    double best = scorer(state, moves[0]);
    size_t ties = 1;
    for (size_t i = 1; i < moves.size(); ++i) {
        double q = scorer(state, moves[i]);
        if (q > best) {
            best = q;
            pick = i;
            ties = 1;
        } else if (q == best) {
            ++ties;
            if (rng.next_below(ties) == 0) pick = i;
        }
    }
    return pick;
}

// Per-step selection state for a playout. The sampler owns the policy view
// of one candidate list: it draws indexes and, when the playout rejects a
// candidate, removes it and repairs the distribution incrementally (Eq. 2
// style for Boltzmann; the epsilon-greedy explore/exploit coin is flipped
// once per step, so rejections re-select within the same mode).
class PolicySampler {
public:
    PolicySampler(const GameState& state, std::vector<Move>& moves, const PolicySpec& policy,
                  Rng& rng)
        : state_(state), moves_(moves), policy_(policy), rng_(rng) {
        switch (policy_.kind) {
            case PolicySpec::Kind::Uniform:
                break;
            case PolicySpec::Kind::EpsilonGreedy:
                greedy_ = rng_.next_double() >= policy_.epsilon;
                if (greedy_) compute_scores();
                break;
            case PolicySpec::Kind::Boltzmann:
                compute_scores();
                probs_ = boltzmann(scores_, policy_.tau);
                break;
        }
    }

    size_t size() const { return moves_.size(); }

    size_t draw() {
        switch (policy_.kind) {
            case PolicySpec::Kind::Uniform:
                return rng_.next_below(moves_.size());
            case PolicySpec::Kind::EpsilonGreedy: {
                if (!greedy_) return rng_.next_below(moves_.size());
                size_t pick = 0;
                double best = scores_[0];
                size_t ties = 1;
                for (size_t i = 1; i < scores_.size(); ++i) {
                    if (scores_[i] > best) {
                        best = scores_[i];
                        pick = i;
                        ties = 1;
                    } else if (scores_[i] == best) {
                        ++ties;
                        if (rng_.next_below(ties) == 0) pick = i;
                    }
                }
                return pick;
            }
            case PolicySpec::Kind::Boltzmann:
                return sample_index(probs_, rng_);
        }
        return 0;
    }

    // Removes a rejected candidate from the working list.
    void reject(size_t idx) {
        moves_.erase(moves_.begin() + idx);
        if (!scores_.empty()) scores_.erase(scores_.begin() + idx);
        if (policy_.kind != PolicySpec::Kind::Boltzmann) return;
        double p = probs_[idx];
        ++renormalizations_;
        // Incremental Eq. 2 update, falling back to a from-scratch Eq. 1
        // recomputation when the 1/(1-p) rescale would amplify the rounding
        // error of p beyond ~1e-10, or every 32 updates to bound drift.
        if (p >= 1.0 - 1e-6 || renormalizations_ % 32 == 0) {
            probs_ = boltzmann(scores_, policy_.tau);
            return;
        }
        probs_.erase(probs_.begin() + idx);
        double scale = 1.0 / (1.0 - p);
        for (double& q : probs_) q *= scale;
    }

private:
    void compute_scores() {
        scores_.resize(moves_.size());
        for (size_t i = 0; i < moves_.size(); ++i) scores_[i] = policy_.scorer(state_, moves_[i]);
    }

    const GameState& state_;
    std::vector<Move>& moves_;
    const PolicySpec& policy_;
    Rng& rng_;
    bool greedy_ = false;
    std::vector<double> scores_;
    std::vector<double> probs_;
    int renormalizations_ = 0;
};

}  // namespace forge
