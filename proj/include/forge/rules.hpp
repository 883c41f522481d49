#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace forge {

// Compiled rule trees. The S-expression rules of a description are translated
// once, at game compile time, into these typed nodes; evaluation never touches
// strings.

enum class PlayerSel : uint8_t { Mover, Next, Prev, P1, P2, P3, P4 };

enum class SiteRef : uint8_t { LastTo, LastFrom, ContextTo };

enum class DirToken : uint8_t { All, Orthogonal, Diagonal, Forward, ForwardLeft, ForwardRight };

struct RegionExpr {
    enum class Kind : uint8_t { Empty, Named, Literal };
    Kind kind = Kind::Empty;
    std::string name;          // Named
    PlayerSel owner = PlayerSel::Mover;  // Named
    std::vector<int> sites;    // Literal
};

struct IntExpr {
    enum class Kind : uint8_t { Literal, CountPieces, Liberties };
    Kind kind = Kind::Literal;
    int64_t literal = 0;
    PlayerSel player = PlayerSel::Mover;  // CountPieces
    SiteRef site = SiteRef::LastTo;       // Liberties
};

struct Condition {
    enum class Kind : uint8_t {
        And,
        Or,
        Not,
        IsLine,            // run of the context mover's pieces through last_to
        IsConnectedSides,  // hex rhombus: group joins the mover's two sides
        IsConnectedCount,  // hexagonal: group touches >= count sides / corners
        IsLoop,            // hexagonal: mover's stones enclose at least one cell
        IsFull,
        IsThreatened,      // site attackable by the context mover's opponent
        IsGroup,           // all of the mover's pieces form one group
        IsRepeat,          // current position hash occurred earlier in history
        IsPrevMover,
        IsIn,
        AllPassed,
        Compare,           // =, <, > over integer expressions
        IsEmptyAt,         // site filters used by (to if:(...))
        IsFriendAt,
        IsEnemyAt,
    };
    enum class Cmp : uint8_t { Eq, Lt, Gt };

    Kind kind = Kind::IsFull;
    int line_length = 0;       // IsLine
    int connect_count = 0;     // IsConnectedCount
    bool corners = false;      // IsConnectedCount: corners instead of sides
    SiteRef site = SiteRef::LastTo;  // IsThreatened / IsIn / site filters
    RegionExpr region;         // IsIn
    Cmp cmp = Cmp::Eq;         // Compare
    IntExpr lhs, rhs;          // Compare
    std::vector<Condition> children;  // And / Or / Not
};

struct Consequence {
    enum class Kind : uint8_t { CaptureSurround, MoveAgainIf };
    Kind kind = Kind::CaptureSurround;
    Condition condition;  // MoveAgainIf
};

// Destination filter for Step/Slide generators, from (to if:(...)).
enum class ToFilter : uint8_t { Empty, Enemy, EmptyOrEnemy };

struct MoveGen {
    enum class Kind : uint8_t { Add, Step, Slide, Pass, Promote, ForEachPiece, Or, If, Do };
    Kind kind = Kind::Pass;
    RegionExpr to_region;              // Add
    std::vector<DirToken> dirs;        // Step / Slide
    ToFilter to_filter = ToFilter::Empty;
    std::vector<int> promote_types;    // Promote: piece type ids offered
    uint8_t post_idx = 0xFF;           // postcondition this subtree is wrapped in
    uint8_t then_idx = 0xFF;           // consequence attached to generated moves
    Condition condition;               // If
    std::vector<MoveGen> children;     // Or branches / If then-else / Do body
};

enum class ResultKind : uint8_t { MoverWin, MoverLoss, Draw, ByScore };

struct CompiledEndRule {
    Condition condition;
    ResultKind result = ResultKind::Draw;
};

}  // namespace forge
