#pragma once

#include <algorithm>
#include <bit>
#include <bitset>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/board.hpp"
#include "forge/description.hpp"
#include "forge/errors.hpp"
#include "forge/rng.hpp"
#include "forge/rules.hpp"
#include "forge/sexpr.hpp"
#include "forge/state.hpp"

namespace forge {

// A compiled game: board tables, zobrist keys, typed rule trees. Games are
// immutable once built; states keep a pointer to their game, so a Game must
// outlive its states and is pinned in memory (no copy, no move).
class Game {
public:
    struct PieceInfo {
        std::string name;
        int type = 0;   // index among distinct piece names
        int owner = 0;  // 1-based player
    };

    explicit Game(GameDescription description)
        : desc_(std::move(description)), board_(desc_.board.build()) {
        build_piece_tables();
        build_regions();
        build_zobrist();
        no_repeat_ = desc_.has_meta("noRepeat");
        swap_rule_ = desc_.has_meta("swap");
        if (swap_rule_ && desc_.player_count != 2)
            throw ValidationError("the swap rule needs exactly two players");
        for (const auto& meta : desc_.meta_rules) {
            if (!meta.is_call_to("noRepeat") && !meta.is_call_to("swap"))
                throw UnknownLudeme(meta.head());
        }
        play_rule_ = compile_move_rule(desc_.play_rule.arg(0));
        for (const auto& def : desc_.piece_defs) {
            piece_move_rules_.emplace_back(
                def.move_rule ? std::optional<MoveGen>(compile_move_rule(*def.move_rule))
                              : std::nullopt);
        }
        for (const auto& rule : desc_.end_rules)
            end_rules_.push_back({compile_condition(rule.condition), compile_result(rule.result)});
    }

    Game(const Game&) = delete;
    Game& operator=(const Game&) = delete;

    static Game load(std::string_view text) { return Game(parse_game(text)); }

    const GameDescription& description() const { return desc_; }
    const Board& board() const { return board_; }
    const std::string& name() const { return desc_.name; }
    int player_count() const { return desc_.player_count; }
    bool no_repeat() const { return no_repeat_; }
    bool swap_rule() const { return swap_rule_; }

    int piece_count() const { return static_cast<int>(pieces_.size()); }
    const PieceInfo& piece(int id) const { return pieces_[id]; }
    int piece_id(const std::string& name, int owner) const {
        for (size_t i = 0; i < pieces_.size(); ++i)
            if (pieces_[i].owner == owner && pieces_[i].name == name) return static_cast<int>(i);
        return -1;
    }
    int owner_of(int piece_id) const { return pieces_[piece_id].owner; }

    int next_player(int p) const { return p % desc_.player_count + 1; }
    int prev_player(int p) const { return (p + desc_.player_count - 2) % desc_.player_count + 1; }

    // ------------------------------------------------------------------
    // State lifecycle
    // ------------------------------------------------------------------

    GameState initial_state() const {
        GameState s;
        s.game = this;
        s.mover = 1;
        for (const auto& placement : desc_.placements) {
            int id = piece_id(placement.piece, placement.owner);
            for (int site : placement.sites) {
                if (!s.empty_at(site))
                    throw ValidationError("two pieces start on site " + std::to_string(site));
                set_cell(s, site, static_cast<uint8_t>(id + 1));
            }
        }
        s.hash ^= mover_key(1) ^ pass_key(0);
        if (no_repeat_) s.hash_history.push_back(s.hash);
        return s;
    }

    GameState apply(const GameState& s, const Move& m) const {
        GameState t = s;
        apply_in_place(t, m);
        return t;
    }

    // Mutating fast path for playout loops that own their state.
    void apply_in_place(GameState& s, const Move& m) const { apply_impl(s, m, false); }

    // Exact legal moves: generator output plus swap injection, filtered by
    // the full postcondition check (ifAfterwards: and repetition).
    std::vector<Move> legal_moves(const GameState& s) const {
        std::vector<Move> out = generate_unchecked(s);
        if (swap_available(s)) out.push_back(swap_move());
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [&](const Move& m) { return !check_move(s, m, true); }),
                  out.end());
        return out;
    }

    // Generator output with ifAfterwards: filtering applied (but not the
    // noRepeat meta-rule, which belongs to legal_moves).
    std::vector<Move> generate(const GameState& s) const {
        std::vector<Move> out = generate_unchecked(s);
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [&](const Move& m) { return !check_move(s, m, false); }),
                  out.end());
        return out;
    }

    // Generator output ignoring every postcondition; a superset of generate().
    std::vector<Move> generate_unchecked(const GameState& s) const {
        std::vector<Move> out;
        walk_moves(s, s.mover, [&](const Move& m) {
            out.push_back(m);
            return false;
        });
        return out;
    }

    // True iff applying m satisfies the ifAfterwards: condition attached to
    // its generator and, under (noRepeat), does not recreate a position
    // already in the state's history.
    bool check_postconditions(const GameState& s, const Move& m) const {
        return check_move(s, m, true);
    }

    bool has_any_legal_move(const GameState& s) const {
        if (s.terminated) return false;
        if (swap_available(s)) return true;
        return walk_moves(s, s.mover, [&](const Move& m) { return check_move(s, m, true); });
    }

    // Outcome if an end condition fires on this state; also yields a draw
    // when no legal move exists and no end rule covers the position.
    std::optional<Outcome> eval_end(const GameState& s) const {
        if (s.terminated) return s.outcome;
        if (auto fired = eval_end_rules(s)) return fired;
        if (!has_any_legal_move(s)) return Outcome::draw(desc_.player_count);
        return std::nullopt;
    }

    // Terminates an ongoing state that has no legal moves: an end rule if one
    // fires, otherwise a draw.
    void resolve_no_moves(GameState& s) const {
        auto fired = eval_end_rules(s);
        s.outcome = fired ? *fired : Outcome::draw(desc_.player_count);
        s.terminated = true;
    }

    bool swap_available(const GameState& s) const {
        return swap_rule_ && !s.terminated && s.move_number == 1 && s.mover == 2;
    }

    static Move swap_move() {
        Move m;
        m.kind = MoveKind::Swap;
        m.mover = 2;
        return m;
    }

    uint64_t recompute_hash(const GameState& s) const {
        uint64_t h = 0;
        for (int site = 0; site < board_.site_count(); ++site)
            if (s.board[site]) h ^= piece_key(site, s.board[site]);
        h ^= mover_key(s.mover) ^ pass_key(s.consecutive_passes);
        return h;
    }

    // ------------------------------------------------------------------
    // Fixture serialization: board cells as hex digits plus the scalar
    // fields needed to resume play. History restarts at the current hash.
    // ------------------------------------------------------------------

    std::string serialize(const GameState& s) const {
        std::ostringstream os;
        os << "mover=" << int(s.mover) << " prev=" << int(s.prev_mover)
           << " moves=" << s.move_number << " passes=" << int(s.consecutive_passes)
           << " swapped=" << int(s.swapped) << " last_to=" << s.last_to
           << " last_from=" << s.last_from << " board=";
        for (int site = 0; site < board_.site_count(); ++site)
            os << "0123456789abcdef"[s.board[site] & 0xF];
        return os.str();
    }

    GameState deserialize(const std::string& text) const {
        GameState s;
        s.game = this;
        std::istringstream is(text);
        std::string field;
        std::string board_str;
        auto value_of = [](const std::string& f, const char* key) -> std::optional<std::string> {
            std::string prefix = std::string(key) + "=";
            if (f.rfind(prefix, 0) == 0) return f.substr(prefix.size());
            return std::nullopt;
        };
        while (is >> field) {
            if (auto v = value_of(field, "mover")) s.mover = static_cast<uint8_t>(std::stoi(*v));
            else if (auto v = value_of(field, "prev")) s.prev_mover = static_cast<uint8_t>(std::stoi(*v));
            else if (auto v = value_of(field, "moves")) s.move_number = static_cast<uint16_t>(std::stoi(*v));
            else if (auto v = value_of(field, "passes")) s.consecutive_passes = static_cast<uint8_t>(std::stoi(*v));
            else if (auto v = value_of(field, "swapped")) s.swapped = (*v == "1");
            else if (auto v = value_of(field, "last_to")) s.last_to = static_cast<int16_t>(std::stoi(*v));
            else if (auto v = value_of(field, "last_from")) s.last_from = static_cast<int16_t>(std::stoi(*v));
            else if (auto v = value_of(field, "board")) board_str = *v;
        }
        if (static_cast<int>(board_str.size()) != board_.site_count())
            throw ValidationError("serialized board has the wrong number of sites");
        for (int site = 0; site < board_.site_count(); ++site) {
            char c = board_str[site];
            int code = (c >= 'a') ? (c - 'a' + 10) : (c - '0');
            if (code > piece_count())
                throw ValidationError("serialized board references an unknown piece");
            s.board[site] = static_cast<uint8_t>(code);
            if (code) ++s.piece_counts[pieces_[code - 1].owner];
        }
        s.hash = recompute_hash(s);
        if (no_repeat_) s.hash_history.push_back(s.hash);
        return s;
    }

    // ------------------------------------------------------------------
    // Internal evaluation machinery (public for the playout and test code
    // that drives generation with callbacks).
    // ------------------------------------------------------------------

    struct WalkCtx {
        int mover = 0;
        int from = -1;
        uint8_t post = 0xFF;
    };

    // Streams the generator's moves (postconditions ignored) into cb;
    // cb returning true aborts the walk. Returns true if aborted.
    template <typename F>
    bool walk_moves(const GameState& s, int mover, F&& cb) const {
        WalkCtx ctx;
        ctx.mover = mover;
        return walk_gen(play_rule_, s, ctx, cb);
    }

    // Postcondition check with or without the repetition component.
    bool check_move(const GameState& s, const Move& m, bool with_repeat) const {
        if (m.kind == MoveKind::Swap) return true;
        bool repeat = with_repeat && no_repeat_ && m.kind != MoveKind::Pass;
        if (m.post_idx == 0xFF && !repeat) return true;
        GameState succ = clone_for_check(s);
        apply_impl(succ, m, true);
        if (m.post_idx != 0xFF) {
            EvalCtx ctx{m.mover, -1};
            if (!eval_condition(postconditions_[m.post_idx], succ, ctx)) return false;
        }
        if (repeat) {
            for (uint64_t h : s.hash_history)
                if (h == succ.hash) return false;
        }
        return true;
    }

    int first_piece_of(int player) const { return first_piece_of_[player]; }

private:
    struct EvalCtx {
        int mover = 0;
        int to_site = -1;
    };

    // ---------------- compile ----------------

    void build_piece_tables() {
        first_piece_of_.assign(kMaxPlayers + 1, -1);
        std::vector<std::string> type_names;
        for (const auto& def : desc_.piece_defs) {
            PieceInfo info;
            info.name = def.name;
            info.owner = def.owner;
            auto it = std::find(type_names.begin(), type_names.end(), def.name);
            if (it == type_names.end()) {
                type_names.push_back(def.name);
                info.type = static_cast<int>(type_names.size()) - 1;
            } else {
                info.type = static_cast<int>(it - type_names.begin());
            }
            if (first_piece_of_[def.owner] < 0)
                first_piece_of_[def.owner] = static_cast<int>(pieces_.size());
            pieces_.push_back(info);
        }
        if (piece_count() + 1 > 16)
            throw ValidationError("too many piece/owner combinations (max 15)");
        type_names_ = std::move(type_names);
    }

    void build_regions() {
        for (const auto& region : desc_.regions)
            regions_[region.name + "#" + std::to_string(region.owner)] = region.sites;
    }

    void build_zobrist() {
        uint64_t seed = 1469598103934665603ULL;  // FNV offset basis
        for (char c : desc_.name) seed = (seed ^ static_cast<uint8_t>(c)) * 1099511628211ULL;
        Rng rng(seed);
        int codes = piece_count() + 1;
        zobrist_.resize(static_cast<size_t>(board_.site_count()) * codes);
        for (auto& k : zobrist_) k = rng.next_u64();
        mover_keys_.resize(desc_.player_count + 1);
        for (auto& k : mover_keys_) k = rng.next_u64();
        pass_keys_.resize(desc_.player_count + 1);
        for (auto& k : pass_keys_) k = rng.next_u64();
    }

    PlayerSel compile_player(const SExpr& e) const {
        if (e.is_symbol()) {
            const std::string& t = e.token();
            if (t == "Mover") return PlayerSel::Mover;
            if (t == "Next") return PlayerSel::Next;
            if (t == "Prev") return PlayerSel::Prev;
            if (t == "P1") return PlayerSel::P1;
            if (t == "P2") return PlayerSel::P2;
            if (t == "P3") return PlayerSel::P3;
            if (t == "P4") return PlayerSel::P4;
        }
        throw ValidationError("expected a player selector, got " + to_text(e));
    }

    SiteRef compile_site_ref(const SExpr& e) const {
        if (e.is_call_to("last") && e.arg_count() == 1) {
            if (e.arg(0).is_symbol_token("To")) return SiteRef::LastTo;
            if (e.arg(0).is_symbol_token("From")) return SiteRef::LastFrom;
        }
        if (e.is_call_to("to") && e.arg_count() == 0) return SiteRef::ContextTo;
        throw ValidationError("expected a site reference, got " + to_text(e));
    }

    RegionExpr compile_region(const SExpr& e) const {
        RegionExpr r;
        if (e.is_call_to("sites")) {
            if (e.arg_count() == 1 && e.arg(0).is_symbol_token("Empty")) {
                r.kind = RegionExpr::Kind::Empty;
                return r;
            }
            if (e.arg_count() == 2 && e.arg(0).is_string()) {
                r.kind = RegionExpr::Kind::Named;
                r.name = e.arg(0).token();
                r.owner = compile_player(e.arg(1));
                validate_named_region(r);
                return r;
            }
            if (e.arg_count() == 1 && e.arg(0).is_seq()) {
                r.kind = RegionExpr::Kind::Literal;
                r.sites = detail::parse_site_list(e, board_.site_count());
                return r;
            }
        }
        if (e.is_seq()) {
            r.kind = RegionExpr::Kind::Literal;
            r.sites = detail::parse_site_list(e, board_.site_count());
            return r;
        }
        throw ValidationError("expected a region, got " + to_text(e));
    }

    void validate_named_region(const RegionExpr& r) const {
        for (int p = 1; p <= desc_.player_count; ++p) {
            bool concrete = (r.owner == PlayerSel::P1 && p != 1) ||
                            (r.owner == PlayerSel::P2 && p != 2) ||
                            (r.owner == PlayerSel::P3 && p != 3) ||
                            (r.owner == PlayerSel::P4 && p != 4);
            if (concrete) continue;
            if (!regions_.count(r.name + "#" + std::to_string(p)))
                throw EvalError("undefined region \"" + r.name + "\" for player " + std::to_string(p));
        }
    }

    IntExpr compile_int(const SExpr& e) const {
        IntExpr x;
        if (e.is_int()) {
            x.kind = IntExpr::Kind::Literal;
            x.literal = e.int_value();
            return x;
        }
        if (e.is_call_to("count") && e.arg_count() >= 1 && e.arg(0).is_symbol_token("Pieces")) {
            x.kind = IntExpr::Kind::CountPieces;
            x.player = (e.arg_count() == 2) ? compile_player(e.arg(1)) : PlayerSel::Mover;
            return x;
        }
        if (e.is_call_to("liberties") && e.arg_count() == 1) {
            x.kind = IntExpr::Kind::Liberties;
            x.site = compile_site_ref(e.arg(0));
            return x;
        }
        throw ValidationError("expected an integer expression, got " + to_text(e));
    }

    Condition compile_condition(const SExpr& e) const {
        Condition c;
        if (!e.is_call()) throw ValidationError("expected a condition, got " + to_text(e));
        const std::string& h = e.head();
        auto compile_children = [&](Condition::Kind kind) {
            c.kind = kind;
            if (e.arg_count() == 1 && e.arg(0).is_seq()) {
                for (const auto& k : e.arg(0).children()) c.children.push_back(compile_condition(k));
            } else {
                for (size_t i = 0; i < e.arg_count(); ++i) c.children.push_back(compile_condition(e.arg(i)));
            }
            if (c.children.empty()) throw ValidationError(h + " needs at least one condition");
        };
        if (h == "and") { compile_children(Condition::Kind::And); return c; }
        if (h == "or") { compile_children(Condition::Kind::Or); return c; }
        if (h == "not") {
            compile_children(Condition::Kind::Not);
            if (c.children.size() != 1) throw ValidationError("not takes exactly one condition");
            return c;
        }
        if (h == "=" || h == "<" || h == ">") {
            if (e.arg_count() != 2) throw ValidationError("comparisons take two arguments");
            c.kind = Condition::Kind::Compare;
            c.cmp = (h == "=") ? Condition::Cmp::Eq : (h == "<") ? Condition::Cmp::Lt : Condition::Cmp::Gt;
            c.lhs = compile_int(e.arg(0));
            c.rhs = compile_int(e.arg(1));
            return c;
        }
        if (h == "all") {
            if (e.arg_count() == 1 && e.arg(0).is_symbol_token("Passed")) {
                c.kind = Condition::Kind::AllPassed;
                return c;
            }
            throw ValidationError("unsupported (all ...) form: " + to_text(e));
        }
        if (h == "is") {
            if (e.arg_count() < 1 || !e.arg(0).is_symbol())
                throw ValidationError("(is ...) needs a keyword");
            const std::string& what = e.arg(0).token();
            if (what == "Line" && e.arg_count() == 2 && e.arg(1).is_int()) {
                c.kind = Condition::Kind::IsLine;
                c.line_length = static_cast<int>(e.arg(1).int_value());
                if (c.line_length < 1) throw ValidationError("line length must be positive");
                return c;
            }
            if (what == "Connected") {
                if (e.arg_count() == 2 && e.arg(1).is_symbol_token("Sides") &&
                    board_.topology() == Board::Topology::HexRhombus) {
                    c.kind = Condition::Kind::IsConnectedSides;
                    return c;
                }
                if (e.arg_count() == 3 && e.arg(1).is_int() &&
                    board_.topology() == Board::Topology::HexHex) {
                    c.kind = Condition::Kind::IsConnectedCount;
                    c.connect_count = static_cast<int>(e.arg(1).int_value());
                    if (e.arg(2).is_symbol_token("Sides")) c.corners = false;
                    else if (e.arg(2).is_symbol_token("Corners")) c.corners = true;
                    else throw ValidationError("(is Connected n ...) needs Sides or Corners");
                    return c;
                }
                throw EvalError("(is Connected ...) is not defined for this board");
            }
            if (what == "Loop" && e.arg_count() == 1) {
                if (board_.topology() != Board::Topology::HexHex)
                    throw EvalError("(is Loop) is only defined for hexagonal boards");
                c.kind = Condition::Kind::IsLoop;
                return c;
            }
            if (what == "Full" && e.arg_count() == 1) { c.kind = Condition::Kind::IsFull; return c; }
            if (what == "Group" && e.arg_count() == 1) { c.kind = Condition::Kind::IsGroup; return c; }
            if (what == "Repeat" && e.arg_count() == 1) { c.kind = Condition::Kind::IsRepeat; return c; }
            if (what == "Prev" && e.arg_count() == 2 && e.arg(1).is_symbol_token("Mover")) {
                c.kind = Condition::Kind::IsPrevMover;
                return c;
            }
            if (what == "Threatened" && e.arg_count() == 2) {
                c.kind = Condition::Kind::IsThreatened;
                c.site = compile_site_ref(e.arg(1));
                return c;
            }
            if (what == "In" && e.arg_count() == 3) {
                c.kind = Condition::Kind::IsIn;
                c.site = compile_site_ref(e.arg(1));
                c.region = compile_region(e.arg(2));
                return c;
            }
            if (what == "Empty" && e.arg_count() == 2) {
                c.kind = Condition::Kind::IsEmptyAt;
                c.site = compile_site_ref(e.arg(1));
                return c;
            }
            if (what == "Friend" && e.arg_count() == 2) {
                c.kind = Condition::Kind::IsFriendAt;
                c.site = compile_site_ref(e.arg(1));
                return c;
            }
            if (what == "Enemy" && e.arg_count() == 2) {
                c.kind = Condition::Kind::IsEnemyAt;
                c.site = compile_site_ref(e.arg(1));
                return c;
            }
            throw UnknownLudeme(what);
        }
        throw UnknownLudeme(h);
    }

    std::vector<DirToken> compile_dirs(const SExpr& e) const {
        auto one = [](const SExpr& d) -> DirToken {
            if (d.is_symbol()) {
                const std::string& t = d.token();
                if (t == "All") return DirToken::All;
                if (t == "Orthogonal") return DirToken::Orthogonal;
                if (t == "Diagonal") return DirToken::Diagonal;
                if (t == "Forward") return DirToken::Forward;
                if (t == "FL") return DirToken::ForwardLeft;
                if (t == "FR") return DirToken::ForwardRight;
            }
            throw ValidationError("unknown direction " + to_text(d));
        };
        std::vector<DirToken> out;
        if (e.is_symbol()) {
            out.push_back(one(e));
        } else if (e.is_call_to("directions") && e.arg_count() == 1) {
            if (e.arg(0).is_seq()) {
                for (const auto& d : e.arg(0).children()) out.push_back(one(d));
            } else {
                out.push_back(one(e.arg(0)));
            }
        } else {
            throw ValidationError("expected directions, got " + to_text(e));
        }
        if (out.empty()) throw ValidationError("empty direction list");
        return out;
    }

    ToFilter compile_to_filter(const SExpr& cond) const {
        if (cond.is_call_to("is") && cond.arg_count() == 2 && cond.arg(1).is_call_to("to")) {
            if (cond.arg(0).is_symbol_token("Empty")) return ToFilter::Empty;
            if (cond.arg(0).is_symbol_token("Enemy")) return ToFilter::Enemy;
        }
        if (cond.is_call_to("not") && cond.arg_count() == 1) {
            const SExpr& inner = cond.arg(0);
            if (inner.is_call_to("is") && inner.arg_count() == 2 &&
                inner.arg(0).is_symbol_token("Friend") && inner.arg(1).is_call_to("to"))
                return ToFilter::EmptyOrEnemy;
        }
        throw ValidationError("unsupported destination filter: " + to_text(cond));
    }

    uint8_t intern_consequence(const SExpr& then_form) {
        if (then_form.arg_count() != 1)
            throw ValidationError("(then ...) takes exactly one consequence");
        const SExpr& body = then_form.arg(0);
        Consequence cons;
        if (body.is_call_to("capture") && body.arg_count() == 1 &&
            body.arg(0).is_symbol_token("Surround")) {
            cons.kind = Consequence::Kind::CaptureSurround;
        } else if (body.is_call_to("moveAgain") && body.arg_count() == 0) {
            cons.kind = Consequence::Kind::MoveAgainIf;
            cons.condition.kind = Condition::Kind::And;  // empty conjunction: always true
        } else if (body.is_call_to("if") && body.arg_count() == 2 &&
                   body.arg(1).is_call_to("moveAgain")) {
            cons.kind = Consequence::Kind::MoveAgainIf;
            cons.condition = compile_condition(body.arg(0));
        } else {
            throw ValidationError("unsupported consequence: " + to_text(body));
        }
        consequences_.push_back(std::move(cons));
        if (consequences_.size() > 0xFE) throw ValidationError("too many consequences");
        return static_cast<uint8_t>(consequences_.size() - 1);
    }

    MoveGen compile_move_rule(const SExpr& e) {
        if (!e.is_call()) throw ValidationError("expected a move rule, got " + to_text(e));
        const std::string& h = e.head();
        MoveGen g;
        if (h == "move") {
            if (e.arg_count() < 1 || !e.arg(0).is_symbol())
                throw ValidationError("(move ...) needs a move kind");
            const std::string& kind = e.arg(0).token();
            size_t i = 1;
            if (kind == "Add") {
                g.kind = MoveGen::Kind::Add;
                if (i >= e.arg_count() || !e.arg(i).is_call_to("to"))
                    throw ValidationError("(move Add ...) needs (to <region>)");
                const SExpr& to = e.arg(i++);
                if (to.arg_count() != 1) throw ValidationError("(to ...) needs one region");
                g.to_region = compile_region(to.arg(0));
            } else if (kind == "Step" || kind == "Slide") {
                g.kind = (kind == "Step") ? MoveGen::Kind::Step : MoveGen::Kind::Slide;
                bool saw_to = false;
                for (; i < e.arg_count(); ++i) {
                    const SExpr& a = e.arg(i);
                    if (a.is_call_to("then")) break;
                    if (a.is_call_to("to")) {
                        saw_to = true;
                        // (to) or (to if:(...))
                        if (a.arg_count() == 0) {
                            g.to_filter = ToFilter::Empty;
                        } else if (a.arg_count() == 2 && a.arg(0).is_symbol_token("if:")) {
                            g.to_filter = compile_to_filter(a.arg(1));
                        } else {
                            throw ValidationError("unsupported (to ...) form: " + to_text(a));
                        }
                    } else {
                        g.dirs = compile_dirs(a);
                    }
                }
                if (g.dirs.empty()) g.dirs.push_back(DirToken::All);
                if (!saw_to) g.to_filter = ToFilter::Empty;
            } else if (kind == "Pass") {
                g.kind = MoveGen::Kind::Pass;
            } else if (kind == "Promote") {
                g.kind = MoveGen::Kind::Promote;
                if (i >= e.arg_count() || !e.arg(i).is_call_to("to"))
                    throw ValidationError("(move Promote ...) needs (to (last To)) and piece names");
                const SExpr& to = e.arg(i++);
                if (to.arg_count() != 1 || compile_site_ref(to.arg(0)) != SiteRef::LastTo)
                    throw ValidationError("promotion destination must be (last To)");
                if (i >= e.arg_count() || !e.arg(i).is_seq())
                    throw ValidationError("(move Promote ...) needs a {\"Piece\" ...} list");
                for (const auto& name : e.arg(i).children()) {
                    if (!name.is_string()) throw ValidationError("promotion pieces must be quoted names");
                    auto it = std::find(type_names_.begin(), type_names_.end(), name.token());
                    if (it == type_names_.end())
                        throw EvalError("promotion references undeclared piece " + name.token());
                    g.promote_types.push_back(static_cast<int>(it - type_names_.begin()));
                }
                if (g.promote_types.empty()) throw ValidationError("empty promotion list");
                ++i;
            } else {
                throw UnknownLudeme(kind);
            }
            // optional trailing (then ...)
            for (; i < e.arg_count(); ++i) {
                if (e.arg(i).is_call_to("then")) {
                    g.then_idx = intern_consequence(e.arg(i));
                } else if (g.kind == MoveGen::Kind::Step || g.kind == MoveGen::Kind::Slide) {
                    continue;  // already consumed by the scan above
                } else {
                    throw ValidationError("unexpected argument in (move ...): " + to_text(e.arg(i)));
                }
            }
            return g;
        }
        if (h == "do") {
            // (do <rule> ifAfterwards:(<condition>))
            if (e.arg_count() != 3 || !e.arg(1).is_symbol_token("ifAfterwards:"))
                throw ValidationError("(do ...) must be (do <rule> ifAfterwards:(<condition>))");
            g.kind = MoveGen::Kind::Do;
            postconditions_.push_back(compile_condition(e.arg(2)));
            if (postconditions_.size() > 0xFE) throw ValidationError("too many postconditions");
            g.post_idx = static_cast<uint8_t>(postconditions_.size() - 1);
            g.children.push_back(compile_move_rule(e.arg(0)));
            return g;
        }
        if (h == "or") {
            g.kind = MoveGen::Kind::Or;
            if (e.arg_count() == 1 && e.arg(0).is_seq()) {
                for (const auto& k : e.arg(0).children()) g.children.push_back(compile_move_rule(k));
            } else {
                for (size_t i = 0; i < e.arg_count(); ++i) g.children.push_back(compile_move_rule(e.arg(i)));
            }
            if (g.children.size() < 2) throw ValidationError("(or ...) needs at least two rules");
            return g;
        }
        if (h == "if") {
            if (e.arg_count() < 2 || e.arg_count() > 3)
                throw ValidationError("(if <condition> <rule> [<rule>]) expected");
            g.kind = MoveGen::Kind::If;
            g.condition = compile_condition(e.arg(0));
            g.children.push_back(compile_move_rule(e.arg(1)));
            if (e.arg_count() == 3) g.children.push_back(compile_move_rule(e.arg(2)));
            return g;
        }
        if (h == "forEach") {
            if (e.arg_count() != 1 || !e.arg(0).is_symbol_token("Piece"))
                throw ValidationError("only (forEach Piece) is supported");
            g.kind = MoveGen::Kind::ForEachPiece;
            return g;
        }
        throw UnknownLudeme(h);
    }

    ResultKind compile_result(const SExpr& e) const {
        if (e.is_call_to("result")) {
            if (e.arg_count() == 2 && e.arg(0).is_symbol_token("Mover")) {
                if (e.arg(1).is_symbol_token("Win")) return ResultKind::MoverWin;
                if (e.arg(1).is_symbol_token("Loss")) return ResultKind::MoverLoss;
                if (e.arg(1).is_symbol_token("Draw")) return ResultKind::Draw;
            }
            if (e.arg_count() == 1 && e.arg(0).is_call_to("byScore")) return ResultKind::ByScore;
        }
        throw ValidationError("unsupported result: " + to_text(e));
    }

    // ---------------- move generation ----------------

    template <typename F>
    bool walk_gen(const MoveGen& g, const GameState& s, WalkCtx ctx, F&& cb) const {
        switch (g.kind) {
            case MoveGen::Kind::Add: {
                Move m;
                m.kind = MoveKind::Add;
                m.mover = static_cast<uint8_t>(ctx.mover);
                m.piece = static_cast<uint8_t>(first_piece_of_[ctx.mover]);
                m.post_idx = ctx.post;
                m.then_idx = g.then_idx;
                if (g.to_region.kind == RegionExpr::Kind::Empty) {
                    for (int site = 0; site < board_.site_count(); ++site) {
                        if (!s.empty_at(site)) continue;
                        m.to = static_cast<int16_t>(site);
                        if (cb(m)) return true;
                    }
                } else {
                    for (int site : region_sites(g.to_region, ctx.mover)) {
                        if (!s.empty_at(site)) continue;
                        m.to = static_cast<int16_t>(site);
                        if (cb(m)) return true;
                    }
                }
                return false;
            }
            case MoveGen::Kind::Step: {
                if (ctx.from < 0) throw EvalError("Step moves need a piece context (forEach Piece)");
                int dirs[Board::kMaxDirs];
                int n = resolve_dirs(g.dirs, ctx.mover, dirs);
                Move m;
                m.kind = MoveKind::Step;
                m.mover = static_cast<uint8_t>(ctx.mover);
                m.piece = static_cast<uint8_t>(s.piece_id_at(ctx.from));
                m.post_idx = ctx.post;
                m.then_idx = g.then_idx;
                m.from = static_cast<int16_t>(ctx.from);
                for (int i = 0; i < n; ++i) {
                    int to = board_.step(ctx.from, dirs[i]);
                    if (to < 0 || !to_filter_ok(s, to, ctx.mover, g.to_filter)) continue;
                    m.to = static_cast<int16_t>(to);
                    if (cb(m)) return true;
                }
                return false;
            }
            case MoveGen::Kind::Slide: {
                if (ctx.from < 0) throw EvalError("Slide moves need a piece context (forEach Piece)");
                int dirs[Board::kMaxDirs];
                int n = resolve_dirs(g.dirs, ctx.mover, dirs);
                Move m;
                m.kind = MoveKind::Step;
                m.mover = static_cast<uint8_t>(ctx.mover);
                m.piece = static_cast<uint8_t>(s.piece_id_at(ctx.from));
                m.post_idx = ctx.post;
                m.then_idx = g.then_idx;
                m.from = static_cast<int16_t>(ctx.from);
                for (int i = 0; i < n; ++i) {
                    int to = board_.step(ctx.from, dirs[i]);
                    while (to >= 0 && s.empty_at(to)) {
                        m.to = static_cast<int16_t>(to);
                        if (cb(m)) return true;
                        to = board_.step(to, dirs[i]);
                    }
                    if (to >= 0 && g.to_filter == ToFilter::EmptyOrEnemy &&
                        owner_at(s, to) != ctx.mover) {
                        m.to = static_cast<int16_t>(to);
                        if (cb(m)) return true;
                    }
                }
                return false;
            }
            case MoveGen::Kind::Pass: {
                Move m;
                m.kind = MoveKind::Pass;
                m.mover = static_cast<uint8_t>(ctx.mover);
                m.post_idx = ctx.post;
                m.then_idx = g.then_idx;
                return cb(m);
            }
            case MoveGen::Kind::Promote: {
                if (s.last_to < 0) return false;
                if (owner_at(s, s.last_to) != ctx.mover) return false;
                Move m;
                m.kind = MoveKind::Promote;
                m.mover = static_cast<uint8_t>(ctx.mover);
                m.post_idx = ctx.post;
                m.then_idx = g.then_idx;
                m.to = s.last_to;
                int current = s.piece_id_at(s.last_to);
                for (int type : g.promote_types) {
                    int id = piece_of_type(type, ctx.mover);
                    if (id < 0)
                        throw EvalError("player " + std::to_string(ctx.mover) +
                                        " has no piece of promoted type");
                    if (id == current) continue;
                    m.piece = static_cast<uint8_t>(id);
                    if (cb(m)) return true;
                }
                return false;
            }
            case MoveGen::Kind::ForEachPiece: {
                for (int site = 0; site < board_.site_count(); ++site) {
                    int id = s.piece_id_at(site);
                    if (id < 0 || pieces_[id].owner != ctx.mover) continue;
                    const auto& rule = piece_move_rules_[id];
                    if (!rule) throw EvalError("piece " + pieces_[id].name + " has no move rule");
                    WalkCtx inner = ctx;
                    inner.from = site;
                    if (walk_gen(*rule, s, inner, cb)) return true;
                }
                return false;
            }
            case MoveGen::Kind::Or: {
                for (const auto& child : g.children)
                    if (walk_gen(child, s, ctx, cb)) return true;
                return false;
            }
            case MoveGen::Kind::If: {
                EvalCtx ec{ctx.mover, -1};
                if (eval_condition(g.condition, s, ec)) return walk_gen(g.children[0], s, ctx, cb);
                if (g.children.size() > 1) return walk_gen(g.children[1], s, ctx, cb);
                return false;
            }
            case MoveGen::Kind::Do: {
                WalkCtx inner = ctx;
                inner.post = g.post_idx;
                return walk_gen(g.children[0], s, inner, cb);
            }
        }
        return false;
    }

    bool to_filter_ok(const GameState& s, int to, int mover, ToFilter f) const {
        switch (f) {
            case ToFilter::Empty: return s.empty_at(to);
            case ToFilter::Enemy: return !s.empty_at(to) && owner_at(s, to) != mover;
            case ToFilter::EmptyOrEnemy: return s.empty_at(to) || owner_at(s, to) != mover;
        }
        return false;
    }

    int resolve_dirs(const std::vector<DirToken>& tokens, int mover, int out[Board::kMaxDirs]) const {
        int n = 0;
        auto push_all = [&](const std::vector<int>& dirs) {
            for (int d : dirs) out[n++] = d;
        };
        for (DirToken t : tokens) {
            switch (t) {
                case DirToken::All: push_all(board_.all_dirs()); break;
                case DirToken::Orthogonal: push_all(board_.orthogonal_dirs()); break;
                case DirToken::Diagonal: push_all(board_.diagonal_dirs()); break;
                case DirToken::Forward: out[n++] = board_.forward_dir(mover); break;
                case DirToken::ForwardLeft: out[n++] = board_.forward_left_dir(mover); break;
                case DirToken::ForwardRight: out[n++] = board_.forward_right_dir(mover); break;
            }
        }
        return n;
    }

    int piece_of_type(int type, int owner) const {
        for (size_t i = 0; i < pieces_.size(); ++i)
            if (pieces_[i].type == type && pieces_[i].owner == owner) return static_cast<int>(i);
        return -1;
    }

    const std::vector<int>& region_sites(const RegionExpr& r, int mover) const {
        if (r.kind == RegionExpr::Kind::Literal) return r.sites;
        int player = resolve_player(r.owner, mover);
        auto it = regions_.find(r.name + "#" + std::to_string(player));
        if (it == regions_.end())
            throw EvalError("undefined region \"" + r.name + "\" for player " + std::to_string(player));
        return it->second;
    }

    int resolve_player(PlayerSel sel, int mover) const {
        switch (sel) {
            case PlayerSel::Mover: return mover;
            case PlayerSel::Next: return next_player(mover);
            case PlayerSel::Prev: return prev_player(mover);
            case PlayerSel::P1: return 1;
            case PlayerSel::P2: return 2;
            case PlayerSel::P3: return 3;
            case PlayerSel::P4: return 4;
        }
        return mover;
    }

    int owner_at(const GameState& s, int site) const {
        int id = s.piece_id_at(site);
        return id < 0 ? 0 : pieces_[id].owner;
    }

    // ---------------- condition evaluation ----------------

    bool eval_condition(const Condition& c, const GameState& s, const EvalCtx& ctx) const {
        switch (c.kind) {
            case Condition::Kind::And:
                for (const auto& k : c.children)
                    if (!eval_condition(k, s, ctx)) return false;
                return true;
            case Condition::Kind::Or:
                for (const auto& k : c.children)
                    if (eval_condition(k, s, ctx)) return true;
                return false;
            case Condition::Kind::Not:
                return !eval_condition(c.children[0], s, ctx);
            case Condition::Kind::IsLine:
                return is_line(s, ctx.mover, c.line_length);
            case Condition::Kind::IsConnectedSides:
                return is_connected_sides(s, ctx.mover);
            case Condition::Kind::IsConnectedCount:
                return is_connected_count(s, ctx.mover, c.connect_count, c.corners);
            case Condition::Kind::IsLoop:
                return is_loop(s, ctx.mover);
            case Condition::Kind::IsFull: {
                for (int site = 0; site < board_.site_count(); ++site)
                    if (s.empty_at(site)) return false;
                return true;
            }
            case Condition::Kind::IsThreatened: {
                int target = resolve_site(c.site, s, ctx);
                if (target < 0) return false;
                return is_threatened(s, target, ctx.mover);
            }
            case Condition::Kind::IsGroup:
                return is_single_group(s, ctx.mover);
            case Condition::Kind::IsRepeat: {
                if (s.hash_history.size() < 2) return false;
                for (size_t i = 0; i + 1 < s.hash_history.size(); ++i)
                    if (s.hash_history[i] == s.hash) return true;
                return false;
            }
            case Condition::Kind::IsPrevMover:
                return s.prev_mover != 0 && s.prev_mover == ctx.mover;
            case Condition::Kind::IsIn: {
                int site = resolve_site(c.site, s, ctx);
                if (site < 0) return false;
                const auto& sites = region_sites(c.region, ctx.mover);
                return std::find(sites.begin(), sites.end(), site) != sites.end();
            }
            case Condition::Kind::AllPassed:
                return s.consecutive_passes >= desc_.player_count;
            case Condition::Kind::Compare: {
                int64_t a = eval_int(c.lhs, s, ctx);
                int64_t b = eval_int(c.rhs, s, ctx);
                switch (c.cmp) {
                    case Condition::Cmp::Eq: return a == b;
                    case Condition::Cmp::Lt: return a < b;
                    case Condition::Cmp::Gt: return a > b;
                }
                return false;
            }
            case Condition::Kind::IsEmptyAt: {
                int site = resolve_site(c.site, s, ctx);
                return site >= 0 && s.empty_at(site);
            }
            case Condition::Kind::IsFriendAt: {
                int site = resolve_site(c.site, s, ctx);
                return site >= 0 && owner_at(s, site) == ctx.mover;
            }
            case Condition::Kind::IsEnemyAt: {
                int site = resolve_site(c.site, s, ctx);
                return site >= 0 && !s.empty_at(site) && owner_at(s, site) != ctx.mover;
            }
        }
        return false;
    }

    int resolve_site(SiteRef ref, const GameState& s, const EvalCtx& ctx) const {
        switch (ref) {
            case SiteRef::LastTo: return s.last_to;
            case SiteRef::LastFrom: return s.last_from;
            case SiteRef::ContextTo: return ctx.to_site;
        }
        return -1;
    }

    int64_t eval_int(const IntExpr& x, const GameState& s, const EvalCtx& ctx) const {
        switch (x.kind) {
            case IntExpr::Kind::Literal:
                return x.literal;
            case IntExpr::Kind::CountPieces:
                return s.piece_counts[resolve_player(x.player, ctx.mover)];
            case IntExpr::Kind::Liberties: {
                int site = resolve_site(x.site, s, ctx);
                if (site < 0 || s.empty_at(site)) return 0;
                return group_liberties(s, site);
            }
        }
        return 0;
    }

    bool is_line(const GameState& s, int mover, int length) const {
        int site = s.last_to;
        if (site < 0 || owner_at(s, site) != mover) return false;
        for (auto [d1, d2] : board_.line_axes()) {
            int run = 1;
            for (int t = board_.step(site, d1); t >= 0 && owner_at(s, t) == mover;
                 t = board_.step(t, d1))
                ++run;
            for (int t = board_.step(site, d2); t >= 0 && owner_at(s, t) == mover;
                 t = board_.step(t, d2))
                ++run;
            if (run >= length) return true;
        }
        return false;
    }

    bool is_connected_sides(const GameState& s, int mover) const {
        if (s.piece_counts[mover] < board_.size()) return false;  // cannot span yet
        if (s.last_to < 0 || owner_at(s, s.last_to) != mover) return false;
        std::bitset<kMaxSites> seen;
        int16_t stack[kMaxSites];
        int top = 0;
        stack[top++] = s.last_to;
        seen[s.last_to] = true;
        uint8_t sides = 0;
        while (top > 0) {
            int site = stack[--top];
            sides |= board_.player_side_bits(site, mover);
            if (sides == 3) return true;
            for (int d = 0; d < board_.dir_count(); ++d) {
                int t = board_.step(site, d);
                if (t >= 0 && !seen[t] && owner_at(s, t) == mover) {
                    seen[t] = true;
                    stack[top++] = static_cast<int16_t>(t);
                }
            }
        }
        return false;
    }

    bool is_connected_count(const GameState& s, int mover, int count, bool corners) const {
        // a chain joining two corners spans at least a full edge
        int minimum = corners ? board_.size() : count;
        if (s.piece_counts[mover] < minimum) return false;
        if (s.last_to < 0 || owner_at(s, s.last_to) != mover) return false;
        std::bitset<kMaxSites> seen;
        int16_t stack[kMaxSites];
        int top = 0;
        stack[top++] = s.last_to;
        seen[s.last_to] = true;
        uint8_t mask = 0;
        while (top > 0) {
            int site = stack[--top];
            mask |= corners ? board_.corner_bits(site) : board_.side_bits(site);
            for (int d = 0; d < board_.dir_count(); ++d) {
                int t = board_.step(site, d);
                if (t >= 0 && !seen[t] && owner_at(s, t) == mover) {
                    seen[t] = true;
                    stack[top++] = static_cast<int16_t>(t);
                }
            }
        }
        return std::popcount(static_cast<unsigned>(mask)) >= count;
    }

    // A loop exists when some cell cannot reach the border without crossing
    // the mover's stones. Flood the non-mover cells from the border once,
    // then look for (a) unreached non-mover cells, (b) interior mover stones
    // none of whose neighbours were reached.
    bool is_loop(const GameState& s, int mover) const {
        if (s.piece_counts[mover] < 6) return false;  // the smallest ring has 6 stones
        std::bitset<kMaxSites> reached;
        int16_t stack[kMaxSites];
        int top = 0;
        const int n = board_.site_count();
        for (int site = 0; site < n; ++site) {
            if (owner_at(s, site) != mover && board_.on_border(site)) {
                reached[site] = true;
                stack[top++] = static_cast<int16_t>(site);
            }
        }
        while (top > 0) {
            int site = stack[--top];
            for (int d = 0; d < board_.dir_count(); ++d) {
                int t = board_.step(site, d);
                if (t >= 0 && !reached[t] && owner_at(s, t) != mover) {
                    reached[t] = true;
                    stack[top++] = static_cast<int16_t>(t);
                }
            }
        }
        for (int site = 0; site < n; ++site) {
            if (owner_at(s, site) != mover) {
                if (!reached[site]) return true;
            } else if (!board_.on_border(site)) {
                bool open = false;
                for (int d = 0; d < board_.dir_count() && !open; ++d) {
                    int t = board_.step(site, d);
                    open = (t >= 0 && reached[t]);
                }
                if (!open) return true;
            }
        }
        return false;
    }

    bool is_threatened(const GameState& s, int target, int mover) const {
        int attacker = next_player(mover);
        return walk_moves(s, attacker, [&](const Move& m) {
            return m.kind == MoveKind::Step && m.to == target;
        });
    }

    bool is_single_group(const GameState& s, int mover) const {
        int first = -1, total = 0;
        for (int site = 0; site < board_.site_count(); ++site) {
            if (owner_at(s, site) == mover) {
                if (first < 0) first = site;
                ++total;
            }
        }
        if (total <= 1) return true;
        std::bitset<kMaxSites> seen;
        int16_t stack[kMaxSites];
        int top = 0;
        stack[top++] = static_cast<int16_t>(first);
        seen[first] = true;
        int visited = 1;
        while (top > 0) {
            int site = stack[--top];
            for (int d = 0; d < board_.dir_count(); ++d) {
                int t = board_.step(site, d);
                if (t >= 0 && !seen[t] && owner_at(s, t) == mover) {
                    seen[t] = true;
                    stack[top++] = static_cast<int16_t>(t);
                    ++visited;
                }
            }
        }
        return visited == total;
    }

    // Distinct empty sites orthogonally adjacent to the owner-chain at site.
    int group_liberties(const GameState& s, int site) const {
        int owner = owner_at(s, site);
        std::bitset<kMaxSites> seen, liberty;
        int16_t stack[kMaxSites];
        int top = 0;
        stack[top++] = static_cast<int16_t>(site);
        seen[site] = true;
        int libs = 0;
        while (top > 0) {
            int cur = stack[--top];
            for (int d : board_.orthogonal_dirs()) {
                int t = board_.step(cur, d);
                if (t < 0) continue;
                if (s.empty_at(t)) {
                    if (!liberty[t]) {
                        liberty[t] = true;
                        ++libs;
                    }
                } else if (!seen[t] && owner_at(s, t) == owner) {
                    seen[t] = true;
                    stack[top++] = static_cast<int16_t>(t);
                }
            }
        }
        return libs;
    }

    // ---------------- state transition ----------------

    uint64_t piece_key(int site, uint8_t code) const {
        return zobrist_[static_cast<size_t>(site) * (piece_count() + 1) + code];
    }
    uint64_t mover_key(int mover) const { return mover_keys_[mover]; }
    uint64_t pass_key(int passes) const {
        return pass_keys_[std::min<int>(passes, desc_.player_count)];
    }

    void set_cell(GameState& s, int site, uint8_t code) const {
        if (s.board[site]) {
            s.hash ^= piece_key(site, s.board[site]);
            --s.piece_counts[pieces_[s.board[site] - 1].owner];
        }
        if (code) {
            s.hash ^= piece_key(site, code);
            ++s.piece_counts[pieces_[code - 1].owner];
        }
        s.board[site] = code;
    }

    GameState clone_for_check(const GameState& s) const {
        GameState t;
        t.game = s.game;
        t.board = s.board;
        t.piece_counts = s.piece_counts;
        t.hash = s.hash;
        t.move_number = s.move_number;
        t.last_to = s.last_to;
        t.last_from = s.last_from;
        t.mover = s.mover;
        t.prev_mover = s.prev_mover;
        t.consecutive_passes = s.consecutive_passes;
        t.swapped = s.swapped;
        return t;
    }

    void apply_impl(GameState& s, const Move& m, bool check_mode) const {
        if (s.terminated) throw IllegalMoveError("the game is over");
        const int n = board_.site_count();
        s.hash ^= mover_key(s.mover) ^ pass_key(s.consecutive_passes);
        switch (m.kind) {
            case MoveKind::Add: {
                if (m.to < 0 || m.to >= n) throw IllegalMoveError("Add outside the board");
                if (!s.empty_at(m.to)) throw IllegalMoveError("Add to an occupied site");
                set_cell(s, m.to, static_cast<uint8_t>(m.piece + 1));
                break;
            }
            case MoveKind::Step: {
                if (m.from < 0 || m.from >= n || m.to < 0 || m.to >= n)
                    throw IllegalMoveError("Step outside the board");
                int id = s.piece_id_at(m.from);
                if (id < 0 || pieces_[id].owner != m.mover)
                    throw IllegalMoveError("no piece of the mover at the source");
                if (!s.empty_at(m.to) && owner_at(s, m.to) == m.mover)
                    throw IllegalMoveError("cannot capture a friendly piece");
                set_cell(s, m.to, 0);
                set_cell(s, m.to, static_cast<uint8_t>(id + 1));
                set_cell(s, m.from, 0);
                break;
            }
            case MoveKind::Pass:
                break;
            case MoveKind::Swap: {
                if (!swap_rule_ || s.move_number != 1)
                    throw IllegalMoveError("swap is only available on the second player's first turn");
                for (int site = 0; site < n; ++site) {
                    int id = s.piece_id_at(site);
                    if (id < 0) continue;
                    int flipped = piece_of_type(pieces_[id].type, 3 - pieces_[id].owner);
                    if (flipped < 0) throw EvalError("swap needs each piece type owned by both players");
                    set_cell(s, site, static_cast<uint8_t>(flipped + 1));
                }
                s.swapped = true;
                break;
            }
            case MoveKind::Promote: {
                if (m.to < 0 || m.to >= n) throw IllegalMoveError("Promote outside the board");
                if (owner_at(s, m.to) != m.mover)
                    throw IllegalMoveError("promotion site does not hold the mover's piece");
                set_cell(s, m.to, static_cast<uint8_t>(m.piece + 1));
                break;
            }
        }
        s.last_to = m.to;
        s.last_from = m.from;

        bool again = false;
        if (m.then_idx != 0xFF) {
            const Consequence& cons = consequences_[m.then_idx];
            if (cons.kind == Consequence::Kind::CaptureSurround) {
                apply_surround_captures(s, m);
            } else {
                EvalCtx ctx{m.mover, -1};
                again = eval_condition(cons.condition, s, ctx);
            }
        }

        s.prev_mover = m.mover;
        s.mover = again ? m.mover : static_cast<uint8_t>(next_player(m.mover));
        s.consecutive_passes =
            (m.kind == MoveKind::Pass) ? static_cast<uint8_t>(s.consecutive_passes + 1) : 0;
        ++s.move_number;
        s.hash ^= mover_key(s.mover) ^ pass_key(s.consecutive_passes);

        if (check_mode) return;

        if (no_repeat_) s.hash_history.push_back(s.hash);
        if (auto fired = eval_end_rules(s)) {
            s.outcome = *fired;
            s.terminated = true;
        }
    }

    // Removes enemy chains left without liberties by the move just applied.
    void apply_surround_captures(GameState& s, const Move& m) const {
        if (m.to < 0) return;
        std::bitset<kMaxSites> handled;
        for (int d : board_.orthogonal_dirs()) {
            int t = board_.step(m.to, d);
            if (t < 0 || s.empty_at(t) || handled[t]) continue;
            if (owner_at(s, t) == m.mover) continue;
            // collect the chain, counting liberties
            std::bitset<kMaxSites> seen;
            int16_t chain[kMaxSites];
            int16_t stack[kMaxSites];
            int top = 0, count = 0;
            bool alive = false;
            stack[top++] = static_cast<int16_t>(t);
            seen[t] = true;
            int owner = owner_at(s, t);
            while (top > 0) {
                int cur = stack[--top];
                chain[count++] = static_cast<int16_t>(cur);
                for (int dd : board_.orthogonal_dirs()) {
                    int u = board_.step(cur, dd);
                    if (u < 0) continue;
                    if (s.empty_at(u)) {
                        alive = true;
                    } else if (!seen[u] && owner_at(s, u) == owner) {
                        seen[u] = true;
                        stack[top++] = static_cast<int16_t>(u);
                    }
                }
            }
            for (int i = 0; i < count; ++i) handled[chain[i]] = true;
            if (!alive) {
                for (int i = 0; i < count; ++i) set_cell(s, chain[i], 0);
            }
        }
    }

    std::optional<Outcome> eval_end_rules(const GameState& s) const {
        if (end_rules_.empty()) return std::nullopt;
        EvalCtx ctx{s.prev_mover != 0 ? s.prev_mover : s.mover, -1};
        for (const auto& rule : end_rules_) {
            if (!eval_condition(rule.condition, s, ctx)) continue;
            switch (rule.result) {
                case ResultKind::MoverWin:
                    return Outcome::win_for(ctx.mover, desc_.player_count);
                case ResultKind::MoverLoss:
                    return Outcome::loss_for(ctx.mover, desc_.player_count);
                case ResultKind::Draw:
                    return Outcome::draw(desc_.player_count);
                case ResultKind::ByScore:
                    return score_outcome(s);
            }
        }
        return std::nullopt;
    }

    // Area scoring: stones plus empty regions bordering exactly one player.
    Outcome score_outcome(const GameState& s) const {
        const int n = board_.site_count();
        int score[kMaxPlayers + 1] = {0};
        std::bitset<kMaxSites> seen;
        for (int site = 0; site < n; ++site) {
            int owner = owner_at(s, site);
            if (owner > 0) {
                ++score[owner];
            } else if (!seen[site]) {
                int16_t stack[kMaxSites];
                int top = 0, count = 0;
                stack[top++] = static_cast<int16_t>(site);
                seen[site] = true;
                int border_owner = 0;  // 0 unknown, -1 mixed
                while (top > 0) {
                    int cur = stack[--top];
                    ++count;
                    for (int d : board_.orthogonal_dirs()) {
                        int t = board_.step(cur, d);
                        if (t < 0) continue;
                        int o = owner_at(s, t);
                        if (o == 0) {
                            if (!seen[t]) {
                                seen[t] = true;
                                stack[top++] = static_cast<int16_t>(t);
                            }
                        } else if (border_owner == 0) {
                            border_owner = o;
                        } else if (border_owner != o) {
                            border_owner = -1;
                        }
                    }
                }
                if (border_owner > 0) score[border_owner] += count;
            }
        }
        int max_score = 0;
        for (int p = 1; p <= desc_.player_count; ++p) max_score = std::max(max_score, score[p]);
        int winners = 0, winner = 0;
        for (int p = 1; p <= desc_.player_count; ++p) {
            if (score[p] == max_score) {
                ++winners;
                winner = p;
            }
        }
        if (winners != 1) return Outcome::draw(desc_.player_count);
        return Outcome::win_for(winner, desc_.player_count);
    }

    GameDescription desc_;
    Board board_;
    std::vector<PieceInfo> pieces_;
    std::vector<std::string> type_names_;
    std::vector<int> first_piece_of_;
    std::unordered_map<std::string, std::vector<int>> regions_;
    std::vector<uint64_t> zobrist_;
    std::vector<uint64_t> mover_keys_;
    std::vector<uint64_t> pass_keys_;
    MoveGen play_rule_;
    std::vector<std::optional<MoveGen>> piece_move_rules_;
    std::vector<Condition> postconditions_;
    std::vector<Consequence> consequences_;
    std::vector<CompiledEndRule> end_rules_;
    bool no_repeat_ = false;
    bool swap_rule_ = false;
};

// Free-function entry points mirroring the engine's operation names.
inline GameState initial_state(const Game& g) { return g.initial_state(); }
inline GameState apply(const GameState& s, const Move& m) { return s.game->apply(s, m); }
inline GameState copy(const GameState& s) { return s; }
inline std::vector<Move> legal_moves(const GameState& s) { return s.game->legal_moves(s); }
inline std::vector<Move> generate(const GameState& s) { return s.game->generate(s); }
inline std::vector<Move> generate_unchecked(const GameState& s) {
    return s.game->generate_unchecked(s);
}
inline bool check_postconditions(const GameState& s, const Move& m) {
    return s.game->check_postconditions(s, m);
}
inline std::optional<Outcome> eval_end(const GameState& s) { return s.game->eval_end(s); }

}  // namespace forge
