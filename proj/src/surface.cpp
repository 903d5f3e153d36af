#include "cwc/surface.hpp"

#include <bit>

namespace cwc {

std::string_view direction_name(Direction d)
{
    switch (d) {
    case Direction::N: return "N";
    case Direction::S: return "S";
    case Direction::E: return "E";
    case Direction::W: return "W";
    case Direction::NW: return "NW";
    case Direction::NE: return "NE";
    case Direction::SW: return "SW";
    case Direction::SE: return "SE";
    }
    return "?";
}

std::size_t DirectionSet::size() const
{
    return static_cast<std::size_t>(std::popcount(mask_));
}

std::vector<Direction> DirectionSet::members() const
{
    std::vector<Direction> out;
    for (auto d : kAllDirections) {
        if (contains(d)) out.push_back(d);
    }
    return out;
}

DirectionSet DirectionSet::orthogonal()
{
    DirectionSet s;
    for (auto d : {Direction::N, Direction::S, Direction::E, Direction::W}) s.insert(d);
    return s;
}

DirectionSet DirectionSet::diagonal()
{
    DirectionSet s;
    for (auto d : {Direction::NW, Direction::NE, Direction::SW, Direction::SE}) s.insert(d);
    return s;
}

DirectionSet DirectionSet::all()
{
    DirectionSet s;
    for (auto d : kAllDirections) s.insert(d);
    return s;
}

namespace {

struct ItemRenderer {
    std::string operator()(const CoordSingle& s) const { return render_coordinate(s.at); }
    std::string operator()(const CoordRect& r) const
    {
        return "rect[" + render_coordinate(r.from) + " " + render_coordinate(r.to) + "]";
    }
    std::string operator()(const CoordRow& r) const { return "row[" + std::to_string(r.row) + "]"; }
    std::string operator()(const CoordCol& c) const { return "col[" + std::to_string(c.col) + "]"; }
    std::string operator()(const CoordWhole&) const { return "*"; }
};

std::string label_text(const Label& l)
{
    return "{" + l.name + "}";
}

std::string coords_text(const std::optional<CoordSetExpr>& e)
{
    return e ? "<" + render_coord_expr(*e) + "> " : std::string{};
}

struct DeclRenderer {
    std::string operator()(const NseDecl& d) const
    {
        return "nse " + label_text(d.label) + " " + render_pattern(d.pattern) + " [" + format_real(d.rate) + "] "
            + render_open_term(d.result) + " ;";
    }

    std::string operator()(const SeDecl& d) const
    {
        std::string out = "se " + coords_text(d.coords) + label_text(d.label) + " " + render_pattern(d.pattern) + " ["
            + format_real(d.rate) + "] ";
        if (d.new_label) out += label_text(*d.new_label) + " ";
        return out + render_open_term(d.result) + " ;";
    }

    std::string operator()(const SmeDecl& d) const
    {
        std::string out = "sme " + coords_text(d.coords) + "[" + render_directions(d.dirs) + "] " + label_text(d.label1)
            + " " + render_pattern(d.pattern1) + " " + label_text(d.label2) + " " + render_pattern(d.pattern2) + " ["
            + format_real(d.rate) + "] ";
        if (d.new_label1) out += label_text(*d.new_label1) + " ";
        out += render_open_term(d.result1) + " ";
        out += d.new_label2 ? label_text(*d.new_label2) : std::string("_");
        return out + " " + render_open_term(d.result2) + " ;";
    }
};

} // namespace

std::string render_coord_expr(const CoordSetExpr& e)
{
    std::string out;
    for (const auto& item : e.items) {
        if (!out.empty()) out += ' ';
        out += std::visit(ItemRenderer{}, item);
    }
    return out;
}

std::string render_directions(const DirectionSet& d)
{
    std::string out;
    for (auto x : d.members()) {
        if (!out.empty()) out += ' ';
        out += direction_name(x);
    }
    return out;
}

std::string render_model(const SurfaceModel& m)
{
    std::string out = "model " + m.name + " ;\n";
    out += "grid " + std::to_string(m.rows) + " , " + std::to_string(m.cols) + " ;\n";
    for (const auto& r : m.rules) out += std::visit(DeclRenderer{}, r) + "\n";
    for (const auto& c : m.cells) {
        out += "cell <" + render_coord_expr(c.coords) + "> " + label_text(c.label) + " " + render_term(c.content) + " ;\n";
    }
    for (const auto& mon : m.monitors) {
        out += "monitor " + mon.name + " " + coords_text(mon.coords);
        if (mon.label) out += label_text(*mon.label) + " ";
        out += render_pattern(mon.pattern) + " ;\n";
    }
    return out;
}

} // namespace cwc
