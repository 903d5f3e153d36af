#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cwc/pattern.hpp"

namespace cwc {

struct SourcePos {
    int line = 1;
    int col = 1;
};

struct Diagnostic {
    enum class Severity { Error, Warning };

    Severity severity = Severity::Error;
    SourcePos pos;
    std::string message;

    [[nodiscard]] bool is_error() const { return severity == Severity::Error; }
    /// `line:col: error: message`
    [[nodiscard]] std::string str() const;
};

[[nodiscard]] bool has_errors(const std::vector<Diagnostic>& diags);

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, const std::string& message);
    [[nodiscard]] SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

// ---------------------------------------------------------------------------
// Coordinate sets

struct CoordSingle {
    Coordinate at;
};
struct CoordRect {
    Coordinate from;
    Coordinate to;
};
struct CoordRow {
    int row = 1;
};
struct CoordCol {
    int col = 1;
};
struct CoordWhole {};

using CoordItem = std::variant<CoordSingle, CoordRect, CoordRow, CoordCol, CoordWhole>;

/// Union of its items.
struct CoordSetExpr {
    std::vector<CoordItem> items;
};

// ---------------------------------------------------------------------------
// Directions

/// Declaration order is the fixed expansion order.
enum class Direction : std::uint8_t { N, S, E, W, NW, NE, SW, SE };

inline constexpr Direction kAllDirections[] = {Direction::N,  Direction::S,  Direction::E,  Direction::W,
                                               Direction::NW, Direction::NE, Direction::SW, Direction::SE};

[[nodiscard]] std::string_view direction_name(Direction d);

class DirectionSet {
public:
    DirectionSet() = default;

    void insert(Direction d) { mask_ |= bit(d); }
    [[nodiscard]] bool contains(Direction d) const { return (mask_ & bit(d)) != 0; }
    [[nodiscard]] bool empty() const { return mask_ == 0; }
    [[nodiscard]] std::size_t size() const;
    /// Members in the fixed order N, S, E, W, NW, NE, SW, SE.
    [[nodiscard]] std::vector<Direction> members() const;

    static DirectionSet orthogonal();
    static DirectionSet diagonal();
    static DirectionSet all();

    friend bool operator==(const DirectionSet&, const DirectionSet&) = default;

private:
    static constexpr std::uint8_t bit(Direction d) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d)); }
    std::uint8_t mask_ = 0;
};

// ---------------------------------------------------------------------------
// Declarations

/// `nse {L} P [k] O ;`
struct NseDecl {
    SourcePos pos;
    Label label;
    Pattern pattern;
    double rate = 0.0;
    OpenTerm result;
};

/// `se <coords>? {L} P [k] ({L'})? O ;`
struct SeDecl {
    SourcePos pos;
    std::optional<CoordSetExpr> coords;
    Label label;
    Pattern pattern;
    double rate = 0.0;
    std::optional<Label> new_label;
    OpenTerm result;
};

/// `sme <coords>? [dirs] {L1} P1 {L2} P2 [k] ({L1'})? O1 ({L2'} | _) O2 ;`
struct SmeDecl {
    SourcePos pos;
    std::optional<CoordSetExpr> coords;
    DirectionSet dirs;
    Label label1;
    Pattern pattern1;
    Label label2;
    Pattern pattern2;
    double rate = 0.0;
    std::optional<Label> new_label1;
    OpenTerm result1;
    std::optional<Label> new_label2;
    OpenTerm result2;
};

using RuleDecl = std::variant<NseDecl, SeDecl, SmeDecl>;

/// `cell <coords> {L} T ;`
struct CellDecl {
    SourcePos pos;
    CoordSetExpr coords;
    Label label;
    Term content;
};

/// `monitor NAME (<coords>)? ({L})? P ;`
struct MonitorDecl {
    SourcePos pos;
    std::string name;
    std::optional<CoordSetExpr> coords;
    std::optional<Label> label;
    Pattern pattern;
};

struct SurfaceModel {
    std::string name;
    int rows = 0;
    int cols = 0;
    SourcePos grid_pos;
    std::vector<RuleDecl> rules;
    std::vector<CellDecl> cells;
    std::vector<MonitorDecl> monitors;
};

// ---------------------------------------------------------------------------
// Parsing and rendering

struct ParseResult {
    std::optional<SurfaceModel> model;   ///< set iff there are no errors
    std::vector<Diagnostic> diagnostics;
};

[[nodiscard]] ParseResult parse_model(std::string_view text);

/// Single-fragment parsers; throw ParseError.
[[nodiscard]] CoordSetExpr parse_coord_expr(std::string_view text);
[[nodiscard]] Term parse_term(std::string_view text);
[[nodiscard]] Pattern parse_pattern(std::string_view text);
[[nodiscard]] OpenTerm parse_open_term(std::string_view text);

[[nodiscard]] std::string render_coord_expr(const CoordSetExpr& e);
[[nodiscard]] std::string render_directions(const DirectionSet& d);
[[nodiscard]] std::string render_model(const SurfaceModel& m);

} // namespace cwc
