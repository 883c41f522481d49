#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

// Board geometry: site adjacency, line axes, sides and corners. Sites are
// dense indices; geometry tables are precomputed once per game.
//
// Square n     : n*n sites, row-major, 8 neighbour directions.
// Hex rhombus n: n*n sites (axial rows), 6 directions; P1 owns rows 0 and
//                n-1, P2 owns columns 0 and n-1 (Hex-style side pairs).
// Hex hex b    : hexagon of side b (3b(b-1)+1 sites), 6 directions, with the
//                6 corners and 6 corner-free edges exposed for Havannah-style
//                conditions.
class Board {
public:
    enum class Topology : uint8_t { Square, HexRhombus, HexHex };

    static constexpr int kMaxDirs = 8;

    static Board square(int n) {
        if (n < 1) throw ValidationError("square board size must be >= 1");
        Board b;
        b.topology_ = Topology::Square;
        b.size_ = n;
        b.site_count_ = n * n;
        b.dir_count_ = 8;
        // N, NE, E, SE, S, SW, W, NW with row 0 nearest player 1.
        static constexpr int dr[8] = {1, 1, 0, -1, -1, -1, 0, 1};
        static constexpr int dc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
        b.steps_.assign(static_cast<size_t>(b.site_count_) * 8, -1);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                int s = r * n + c;
                for (int d = 0; d < 8; ++d) {
                    int rr = r + dr[d], cc = c + dc[d];
                    if (rr >= 0 && rr < n && cc >= 0 && cc < n)
                        b.steps_[s * 8 + d] = static_cast<int16_t>(rr * n + cc);
                }
            }
        }
        b.line_axes_ = {{0, 4}, {2, 6}, {1, 5}, {3, 7}};
        b.orthogonal_dirs_ = {0, 2, 4, 6};
        b.diagonal_dirs_ = {1, 3, 5, 7};
        b.all_dirs_ = {0, 1, 2, 3, 4, 5, 6, 7};
        // Forward / forward-left / forward-right per player (player 1 heads
        // towards higher rows).
        b.forward_ = {0, 4};
        b.forward_left_ = {7, 3};
        b.forward_right_ = {1, 5};
        b.init_centre_distance([&](int s) {
            double r = s / n, c = s % n, m = (n - 1) / 2.0;
            return std::hypot(r - m, c - m);
        });
        return b;
    }

    static Board hex_rhombus(int n) {
        if (n < 1) throw ValidationError("hex board size must be >= 1");
        Board b;
        b.topology_ = Topology::HexRhombus;
        b.size_ = n;
        b.site_count_ = n * n;
        b.dir_count_ = 6;
        static constexpr int dr[6] = {0, 1, 1, 0, -1, -1};
        static constexpr int dc[6] = {1, 0, -1, -1, 0, 1};
        b.steps_.assign(static_cast<size_t>(b.site_count_) * 8, -1);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                int s = r * n + c;
                for (int d = 0; d < 6; ++d) {
                    int rr = r + dr[d], cc = c + dc[d];
                    if (rr >= 0 && rr < n && cc >= 0 && cc < n)
                        b.steps_[s * 8 + d] = static_cast<int16_t>(rr * n + cc);
                }
            }
        }
        b.line_axes_ = {{0, 3}, {1, 4}, {2, 5}};
        b.all_dirs_ = {0, 1, 2, 3, 4, 5};
        b.orthogonal_dirs_ = b.all_dirs_;
        // Side pairs for connection goals: player 1 bits 0/1 = rows 0/n-1,
        // player 2 bits 0/1 = columns 0/n-1.
        b.player_sides_.assign(static_cast<size_t>(b.site_count_) * 2, 0);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                int s = r * n + c;
                uint8_t p1 = 0, p2 = 0;
                if (r == 0) p1 |= 1;
                if (r == n - 1) p1 |= 2;
                if (c == 0) p2 |= 1;
                if (c == n - 1) p2 |= 2;
                b.player_sides_[s * 2 + 0] = p1;
                b.player_sides_[s * 2 + 1] = p2;
            }
        }
        b.init_centre_distance([&](int s) {
            // axial -> cube distance from the centre cell
            double q = s % n - (n - 1) / 2.0, r = s / n - (n - 1) / 2.0;
            return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2.0;
        });
        return b;
    }

    static Board hex_hex(int base) {
        if (base < 2) throw ValidationError("hexagonal board side must be >= 2");
        Board b;
        b.topology_ = Topology::HexHex;
        b.size_ = base;
        const int m = base - 1;
        std::vector<std::pair<int, int>> cells;  // axial (q, r)
        for (int r = -m; r <= m; ++r) {
            for (int q = -m; q <= m; ++q) {
                if (std::abs(q + r) <= m) cells.emplace_back(q, r);
            }
        }
        b.site_count_ = static_cast<int>(cells.size());
        b.dir_count_ = 6;
        b.axial_ = cells;
        auto index_of = [&](int q, int r) -> int {
            for (size_t i = 0; i < cells.size(); ++i)
                if (cells[i].first == q && cells[i].second == r) return static_cast<int>(i);
            return -1;
        };
        static constexpr int dq[6] = {1, 0, -1, -1, 0, 1};
        static constexpr int dr6[6] = {0, 1, 1, 0, -1, -1};
        b.steps_.assign(static_cast<size_t>(b.site_count_) * 8, -1);
        for (int s = 0; s < b.site_count_; ++s) {
            auto [q, r] = cells[s];
            for (int d = 0; d < 6; ++d) {
                int t = index_of(q + dq[d], r + dr6[d]);
                if (t >= 0) b.steps_[s * 8 + d] = static_cast<int16_t>(t);
            }
        }
        b.line_axes_ = {{0, 3}, {1, 4}, {2, 5}};
        b.all_dirs_ = {0, 1, 2, 3, 4, 5};
        b.orthogonal_dirs_ = b.all_dirs_;
        // Corner cells have two of (q, r, -q-r) at +-m; edge cells exactly one.
        b.side_mask_.assign(b.site_count_, 0);
        b.corner_mask_.assign(b.site_count_, 0);
        for (int s = 0; s < b.site_count_; ++s) {
            auto [q, r] = cells[s];
            int t = -q - r;
            int extremes = (std::abs(q) == m) + (std::abs(r) == m) + (std::abs(t) == m);
            if (extremes >= 2) {
                static constexpr std::pair<int, int> kCorners[6] = {
                    {1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
                for (int k = 0; k < 6; ++k) {
                    if (q == kCorners[k].first * m && r == kCorners[k].second * m)
                        b.corner_mask_[s] = static_cast<uint8_t>(1 << k);
                }
            } else if (extremes == 1) {
                uint8_t mask = 0;
                if (q == m) mask |= 1 << 0;
                if (r == m) mask |= 1 << 1;
                if (t == m) mask |= 1 << 2;
                if (q == -m) mask |= 1 << 3;
                if (r == -m) mask |= 1 << 4;
                if (t == -m) mask |= 1 << 5;
                b.side_mask_[s] = mask;
            }
        }
        b.init_centre_distance([&](int s) {
            auto [q, r] = cells[s];
            return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2.0;
        });
        return b;
    }

    Topology topology() const { return topology_; }
    int size() const { return size_; }
    int site_count() const { return site_count_; }
    int dir_count() const { return dir_count_; }

    // Destination of one step from `site` along direction `dir`, or -1.
    int step(int site, int dir) const { return steps_[site * 8 + dir]; }

    const std::vector<std::pair<int, int>>& line_axes() const { return line_axes_; }
    const std::vector<int>& all_dirs() const { return all_dirs_; }
    const std::vector<int>& orthogonal_dirs() const { return orthogonal_dirs_; }
    const std::vector<int>& diagonal_dirs() const {
        if (diagonal_dirs_.empty()) throw EvalError("this topology has no diagonal directions");
        return diagonal_dirs_;
    }

    int forward_dir(int player) const { return oriented(forward_, player); }
    int forward_left_dir(int player) const { return oriented(forward_left_, player); }
    int forward_right_dir(int player) const { return oriented(forward_right_, player); }

    // Hex-rhombus connection goals: bits for the two sides of `player`.
    uint8_t player_side_bits(int site, int player) const {
        if (player_sides_.empty()) throw EvalError("this topology has no per-player sides");
        return player_sides_[site * 2 + (player - 1)];
    }

    // Hexagonal boards: 6-bit edge membership (corners excluded) and corners.
    uint8_t side_bits(int site) const {
        if (side_mask_.empty()) throw EvalError("this topology has no edge sides");
        return side_mask_[site];
    }
    uint8_t corner_bits(int site) const {
        if (corner_mask_.empty()) throw EvalError("this topology has no corners");
        return corner_mask_[site];
    }

    bool on_border(int site) const {
        for (int d = 0; d < dir_count_; ++d)
            if (step(site, d) < 0) return true;
        return false;
    }

    double centre_distance(int site) const { return centre_distance_[site]; }

    std::string site_name(int site) const {
        if (topology_ == Topology::HexHex) {
            auto [q, r] = axial_[site];
            return std::to_string(q) + "," + std::to_string(r);
        }
        return std::to_string(site / size_) + "," + std::to_string(site % size_);
    }

private:
    Board() = default;

    int oriented(const std::array<int, 2>& pair, int player) const {
        if (topology_ != Topology::Square)
            throw EvalError("forward directions are defined for square boards only");
        if (player < 1 || player > 2) throw EvalError("forward direction needs player 1 or 2");
        return pair[player - 1];
    }

    template <typename F>
    void init_centre_distance(F&& dist) {
        centre_distance_.resize(site_count_);
        for (int s = 0; s < site_count_; ++s) centre_distance_[s] = dist(s);
    }

    Topology topology_ = Topology::Square;
    int size_ = 0;
    int site_count_ = 0;
    int dir_count_ = 0;
    std::vector<int16_t> steps_;
    std::vector<std::pair<int, int>> line_axes_;
    std::vector<int> all_dirs_;
    std::vector<int> orthogonal_dirs_;
    std::vector<int> diagonal_dirs_;
    std::array<int, 2> forward_ = {-1, -1};
    std::array<int, 2> forward_left_ = {-1, -1};
    std::array<int, 2> forward_right_ = {-1, -1};
    std::vector<uint8_t> player_sides_;
    std::vector<uint8_t> side_mask_;
    std::vector<uint8_t> corner_mask_;
    std::vector<double> centre_distance_;
    std::vector<std::pair<int, int>> axial_;
};

}  // namespace forge
