#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "forge/board.hpp"
#include "forge/errors.hpp"
#include "forge/sexpr.hpp"

namespace forge {

struct BoardSpec {
    Board::Topology topology = Board::Topology::Square;
    int size = 0;

    int site_count() const {
        switch (topology) {
            case Board::Topology::Square:
            case Board::Topology::HexRhombus:
                return size * size;
            case Board::Topology::HexHex:
                return 3 * size * (size - 1) + 1;
        }
        return 0;
    }

    Board build() const {
        switch (topology) {
            case Board::Topology::Square: return Board::square(size);
            case Board::Topology::HexRhombus: return Board::hex_rhombus(size);
            case Board::Topology::HexHex: return Board::hex_hex(size);
        }
        throw ValidationError("unknown board topology");
    }
};

// One piece definition after expanding `Each` to every player. The optional
// move rule is what `(forEach Piece)` evaluates for pieces of this type.
struct PieceDef {
    std::string name;
    int owner = 0;
    std::optional<SExpr> move_rule;
};

struct Placement {
    std::string piece;
    int owner = 0;
    std::vector<int> sites;
};

// Named per-player site set, e.g. goal cells or promotion ranks.
struct RegionDef {
    std::string name;
    int owner = 0;
    std::vector<int> sites;
};

struct EndRule {
    SExpr condition;
    SExpr result;
};

struct GameDescription {
    std::string name;
    int player_count = 0;
    BoardSpec board;
    std::vector<PieceDef> piece_defs;
    SExpr play_rule;  // the full (play ...) form
    std::vector<EndRule> end_rules;
    std::vector<SExpr> meta_rules;
    std::vector<Placement> placements;
    std::vector<RegionDef> regions;
    SExpr ast;  // the (game ...) form the description was built from

    bool has_meta(std::string_view name) const {
        for (const auto& m : meta_rules)
            if (m.is_call_to(name)) return true;
        return false;
    }
};

namespace detail {

// Every symbol the language knows. Detection relies on unknown rules failing
// loudly, so any symbol outside this set is an UnknownLudeme.
inline const std::unordered_set<std::string>& ludeme_vocabulary() {
    static const std::unordered_set<std::string> vocab = {
        // structure
        "game", "players", "equipment", "board", "square", "hex", "Rhombus",
        "piece", "regions", "rules", "meta", "start", "place", "play", "end",
        // move generators
        "move", "Add", "Step", "Slide", "Pass", "Promote", "to", "from",
        "directions", "forEach", "Piece", "do", "or", "if", "and", "not",
        "ifAfterwards:", "if:",
        // consequences
        "then", "capture", "Surround", "moveAgain",
        // directions and site/region vocabulary
        "All", "Orthogonal", "Diagonal", "Forward", "FL", "FR",
        "sites", "Empty", "last", "To", "From",
        // players
        "Mover", "Next", "Prev", "Each", "P1", "P2", "P3", "P4",
        // conditions
        "is", "Line", "Connected", "Full", "Threatened", "Repeat", "Loop",
        "Group", "In", "Friend", "Enemy", "Sides", "Corners",
        "all", "Passed", "=", "<", ">", "count", "Pieces", "liberties",
        // results
        "result", "Win", "Loss", "Draw", "byScore",
        // meta rules
        "noRepeat", "swap",
    };
    return vocab;
}

inline void check_vocabulary(const SExpr& e) {
    if (e.is_symbol()) {
        if (!ludeme_vocabulary().count(e.token())) throw UnknownLudeme(e.token());
        return;
    }
    if (e.is_call() || e.is_seq()) {
        for (const auto& child : e.children()) check_vocabulary(child);
    }
}

inline int parse_player_token(const SExpr& e, int player_count, bool allow_each) {
    if (e.is_symbol()) {
        const std::string& t = e.token();
        if (allow_each && t == "Each") return 0;
        if (t.size() == 2 && t[0] == 'P' && t[1] >= '1' && t[1] <= '9') {
            int p = t[1] - '0';
            if (p > player_count) throw ValidationError("player " + t + " exceeds player count");
            return p;
        }
    }
    throw ValidationError("expected a player (P1..P" + std::to_string(player_count) +
                          (allow_each ? " or Each)" : ")"));
}

inline std::vector<int> parse_site_list(const SExpr& e, int site_count) {
    // Accepts (sites {0 1 2}) or a bare {0 1 2}.
    const SExpr* seq = &e;
    if (e.is_call_to("sites") && e.arg_count() == 1 && e.arg(0).is_seq()) seq = &e.arg(0);
    if (!seq->is_seq()) throw ValidationError("expected a site list {s0 s1 ...}");
    std::vector<int> out;
    for (const auto& c : seq->children()) {
        if (!c.is_int()) throw ValidationError("site lists must contain integers");
        int s = static_cast<int>(c.int_value());
        if (s < 0 || s >= site_count)
            throw ValidationError("site " + std::to_string(s) + " is off the board");
        out.push_back(s);
    }
    return out;
}

inline BoardSpec parse_board_spec(const SExpr& e) {
    if (!e.is_call_to("board") || e.arg_count() != 1 || !e.arg(0).is_call())
        throw ValidationError("equipment needs exactly one (board ...) form");
    const SExpr& shape = e.arg(0);
    BoardSpec spec;
    if (shape.is_call_to("square") && shape.arg_count() == 1 && shape.arg(0).is_int()) {
        spec.topology = Board::Topology::Square;
        spec.size = static_cast<int>(shape.arg(0).int_value());
    } else if (shape.is_call_to("hex") && shape.arg_count() == 1 && shape.arg(0).is_int()) {
        spec.topology = Board::Topology::HexHex;
        spec.size = static_cast<int>(shape.arg(0).int_value());
    } else if (shape.is_call_to("hex") && shape.arg_count() == 2 &&
               shape.arg(0).is_symbol_token("Rhombus") && shape.arg(1).is_int()) {
        spec.topology = Board::Topology::HexRhombus;
        spec.size = static_cast<int>(shape.arg(1).int_value());
    } else {
        throw ValidationError("unsupported board shape: " + to_text(shape));
    }
    if (spec.size < 1 || spec.site_count() < 1) throw ValidationError("board has no sites");
    if (spec.site_count() > 128) throw ValidationError("board exceeds the 128-site limit");
    return spec;
}

}  // namespace detail

// Parses one game description. Throws SyntaxError for malformed text,
// UnknownLudeme for keywords outside the vocabulary, and ValidationError for
// structural violations.
inline GameDescription parse_game(std::string_view text) {
    GameDescription desc;
    desc.ast = parse_sexpr(text);
    const SExpr& root = desc.ast;
    if (!root.is_call_to("game")) throw ValidationError("top-level form must be (game ...)");
    detail::check_vocabulary(root);
    if (root.arg_count() < 1 || !root.arg(0).is_string())
        throw ValidationError("game needs a quoted name");
    desc.name = root.arg(0).token();
    if (desc.name.empty()) throw ValidationError("game name must not be empty");

    const SExpr* equipment = nullptr;
    const SExpr* rules = nullptr;
    for (size_t i = 1; i < root.arg_count(); ++i) {
        const SExpr& part = root.arg(i);
        if (part.is_call_to("players")) {
            if (desc.player_count != 0) throw ValidationError("duplicate (players ...) form");
            if (part.arg_count() != 1 || !part.arg(0).is_int())
                throw ValidationError("(players ...) needs an integer");
            desc.player_count = static_cast<int>(part.arg(0).int_value());
        } else if (part.is_call_to("equipment")) {
            if (equipment) throw ValidationError("duplicate (equipment ...) form");
            equipment = &part;
        } else if (part.is_call_to("rules")) {
            if (rules) throw ValidationError("duplicate (rules ...) form");
            rules = &part;
        } else {
            throw ValidationError("unexpected form in (game ...): " + to_text(part));
        }
    }
    if (desc.player_count < 1) throw ValidationError("a game needs at least one player");
    if (desc.player_count > 4) throw ValidationError("at most 4 players are supported");
    if (!equipment) throw ValidationError("missing (equipment ...) form");
    if (!rules) throw ValidationError("missing (rules ...) form");

    // equipment: board, pieces, optional named regions
    bool have_board = false;
    const SExpr& equip_list = (equipment->arg_count() == 1 && equipment->arg(0).is_seq())
                                  ? equipment->arg(0)
                                  : *equipment;
    size_t first = (&equip_list == equipment) ? 1 : 0;
    for (size_t i = first; i < equip_list.children().size(); ++i) {
        const SExpr& item = equip_list.children()[i];
        if (item.is_call_to("board")) {
            if (have_board) throw ValidationError("duplicate (board ...) form");
            desc.board = detail::parse_board_spec(item);
            have_board = true;
        } else if (item.is_call_to("piece")) {
            if (item.arg_count() < 2 || !item.arg(0).is_string())
                throw ValidationError("(piece ...) needs a name and an owner");
            std::string name = item.arg(0).token();
            int owner = detail::parse_player_token(item.arg(1), desc.player_count, true);
            std::optional<SExpr> move_rule;
            if (item.arg_count() >= 3) {
                if (item.arg_count() > 3) throw ValidationError("(piece ...) takes at most 3 arguments");
                move_rule = item.arg(2);
            }
            auto add_def = [&](int player) {
                desc.piece_defs.push_back({name, player, move_rule});
            };
            if (owner == 0) {
                for (int p = 1; p <= desc.player_count; ++p) add_def(p);
            } else {
                add_def(owner);
            }
        } else if (item.is_call_to("regions")) {
            if (item.arg_count() != 3 || !item.arg(0).is_string())
                throw ValidationError("(regions ...) needs a name, an owner, and sites");
            RegionDef region;
            region.name = item.arg(0).token();
            region.owner = detail::parse_player_token(item.arg(1), desc.player_count, false);
            region.sites = detail::parse_site_list(item.arg(2), desc.board.site_count());
            desc.regions.push_back(std::move(region));
        } else {
            throw ValidationError("unexpected equipment item: " + to_text(item));
        }
    }
    if (!have_board) throw ValidationError("equipment is missing a board");
    if (desc.piece_defs.empty()) throw ValidationError("equipment defines no pieces");

    // rules: optional meta/start, exactly one play, optional end
    bool have_play = false;
    for (size_t i = 0; i < rules->arg_count(); ++i) {
        const SExpr& item = rules->arg(i);
        if (item.is_call_to("meta")) {
            for (size_t k = 0; k < item.arg_count(); ++k) {
                if (!item.arg(k).is_call()) throw ValidationError("meta rules must be lists");
                desc.meta_rules.push_back(item.arg(k));
            }
        } else if (item.is_call_to("start")) {
            const SExpr& body = (item.arg_count() == 1 && item.arg(0).is_seq()) ? item.arg(0) : item;
            size_t begin = (&body == &item) ? 1 : 0;
            for (size_t k = begin; k < body.children().size(); ++k) {
                const SExpr& pl = body.children()[k];
                if (!pl.is_call_to("place") || pl.arg_count() != 3 || !pl.arg(0).is_string())
                    throw ValidationError("start rules must be (place \"Piece\" Pn (sites {...}))");
                Placement placement;
                placement.piece = pl.arg(0).token();
                placement.owner = detail::parse_player_token(pl.arg(1), desc.player_count, false);
                placement.sites = detail::parse_site_list(pl.arg(2), desc.board.site_count());
                desc.placements.push_back(std::move(placement));
            }
        } else if (item.is_call_to("play")) {
            if (have_play) throw ValidationError("a game may declare only one play rule");
            if (item.arg_count() != 1 || !item.arg(0).is_call())
                throw ValidationError("(play ...) needs exactly one move rule");
            desc.play_rule = item;
            have_play = true;
        } else if (item.is_call_to("end")) {
            const SExpr& body = (item.arg_count() == 1 && item.arg(0).is_seq()) ? item.arg(0) : item;
            size_t begin = (&body == &item) ? 1 : 0;
            for (size_t k = begin; k < body.children().size(); ++k) {
                const SExpr& rule = body.children()[k];
                if (!rule.is_call_to("if") || rule.arg_count() != 2 || !rule.arg(1).is_call_to("result"))
                    throw ValidationError("end rules must be (if <condition> (result ...))");
                desc.end_rules.push_back({rule.arg(0), rule.arg(1)});
            }
        } else {
            throw ValidationError("unexpected form in (rules ...): " + to_text(item));
        }
    }
    if (!have_play) throw ValidationError("missing play rule");

    // Placements must reference declared pieces of the right owner.
    for (const auto& placement : desc.placements) {
        bool found = false;
        for (const auto& def : desc.piece_defs)
            found |= (def.name == placement.piece && def.owner == placement.owner);
        if (!found)
            throw ValidationError("placement references undeclared piece " + placement.piece +
                                  " for player " + std::to_string(placement.owner));
    }
    return desc;
}

// Renders a description back to game text. The output re-parses to a
// structurally identical description.
inline std::string print_game(const GameDescription& desc) {
    return to_text(desc.ast);
}

}  // namespace forge
