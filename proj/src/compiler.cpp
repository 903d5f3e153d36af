#include "cwc/compiler.hpp"

#include <cmath>
#include <map>
#include <set>

namespace cwc {

namespace {

std::string summarize(const std::vector<Diagnostic>& diags)
{
    std::string out = "model does not validate";
    for (const auto& d : diags) {
        if (d.is_error()) {
            out += ": " + d.str();
            break;
        }
    }
    return out;
}

std::string dims_text(GridDims dims)
{
    return std::to_string(dims.rows) + "x" + std::to_string(dims.cols);
}

} // namespace

CompileError::CompileError(std::vector<Diagnostic> diags) : std::runtime_error(summarize(diags)), diags_(std::move(diags))
{
}

std::vector<Coordinate> eval_coords(const CoordSetExpr& e, GridDims dims)
{
    std::set<Coordinate> out;
    auto require = [&](Coordinate c) {
        if (!dims.contains(c)) {
            throw std::out_of_range("coordinate " + render_coordinate(c) + " is outside the " + dims_text(dims) + " grid");
        }
    };
    auto add_rect = [&](Coordinate from, Coordinate to) {
        for (int r = from.row; r <= to.row; ++r) {
            for (int c = from.col; c <= to.col; ++c) out.insert({r, c});
        }
    };
    for (const auto& item : e.items) {
        if (const auto* s = std::get_if<CoordSingle>(&item)) {
            require(s->at);
            out.insert(s->at);
        } else if (const auto* rect = std::get_if<CoordRect>(&item)) {
            require(rect->from);
            require(rect->to);
            if (rect->from.row > rect->to.row || rect->from.col > rect->to.col) {
                throw std::out_of_range("rect[" + render_coordinate(rect->from) + " " + render_coordinate(rect->to)
                                        + "] has its corners in the wrong order");
            }
            add_rect(rect->from, rect->to);
        } else if (const auto* row = std::get_if<CoordRow>(&item)) {
            if (row->row < 1 || row->row > dims.rows) {
                throw std::out_of_range("row " + std::to_string(row->row) + " is outside the " + dims_text(dims) + " grid");
            }
            add_rect({row->row, 1}, {row->row, dims.cols});
        } else if (const auto* col = std::get_if<CoordCol>(&item)) {
            if (col->col < 1 || col->col > dims.cols) {
                throw std::out_of_range("column " + std::to_string(col->col) + " is outside the " + dims_text(dims) + " grid");
            }
            add_rect({1, col->col}, {dims.rows, col->col});
        } else {
            add_rect({1, 1}, {dims.rows, dims.cols});
        }
    }
    return {out.begin(), out.end()};
}

std::optional<Coordinate> shift(Coordinate c, Direction d, GridDims dims)
{
    int dr = 0;
    int dc = 0;
    switch (d) {
    case Direction::N: dr = -1; break;
    case Direction::S: dr = 1; break;
    case Direction::E: dc = 1; break;
    case Direction::W: dc = -1; break;
    case Direction::NW: dr = -1; dc = -1; break;
    case Direction::NE: dr = -1; dc = 1; break;
    case Direction::SW: dr = 1; dc = -1; break;
    case Direction::SE: dr = 1; dc = 1; break;
    }
    const Coordinate n{c.row + dr, c.col + dc};
    if (!dims.contains(n)) return std::nullopt;
    return n;
}

std::vector<Label> spatial_labels(const SurfaceModel& m)
{
    std::vector<Label> out;
    auto note = [&](const Label& l) {
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    };
    for (const auto& r : m.rules) {
        if (const auto* se = std::get_if<SeDecl>(&r)) {
            note(se->label);
            if (se->new_label) note(*se->new_label);
        } else if (const auto* sme = std::get_if<SmeDecl>(&r)) {
            note(sme->label1);
            note(sme->label2);
            if (sme->new_label1) note(*sme->new_label1);
            if (sme->new_label2) note(*sme->new_label2);
        }
    }
    for (const auto& c : m.cells) note(c.label);
    return out;
}

namespace {

Pattern merged(const Pattern& a, const Pattern& b)
{
    Pattern p = a;
    p.atoms.add(b.atoms);
    p.compartments.add(b.compartments);
    return p;
}

OpenTerm merged(const OpenTerm& a, const OpenTerm& b)
{
    OpenTerm o = a;
    o.atoms.add(b.atoms);
    o.compartments.add(b.compartments);
    o.vars.add(b.vars);
    return o;
}

class Validator {
public:
    explicit Validator(const SurfaceModel& m) : m_(m), dims_{m.rows, m.cols} {}

    std::vector<Diagnostic> run()
    {
        if (m_.rows < 1 || m_.cols < 1) {
            error(m_.grid_pos, "grid dimensions must be positive, got " + dims_text(dims_));
            return std::move(diags_);
        }
        for (const auto& r : m_.rules) std::visit([this](const auto& d) { check(d); }, r);
        check_cells();
        for (const auto& mon : m_.monitors) check(mon);
        return std::move(diags_);
    }

private:
    void error(SourcePos at, std::string msg) { diags_.push_back({Diagnostic::Severity::Error, at, std::move(msg)}); }
    void warning(SourcePos at, std::string msg) { diags_.push_back({Diagnostic::Severity::Warning, at, std::move(msg)}); }

    std::vector<Coordinate> coords(const std::optional<CoordSetExpr>& e, SourcePos at)
    {
        if (!e) return eval_coords(CoordSetExpr{{CoordWhole{}}}, dims_);
        try {
            return eval_coords(*e, dims_);
        } catch (const std::out_of_range& ex) {
            error(at, ex.what());
            return {};
        }
    }

    void check_rule(SourcePos at, const Pattern& p, const OpenTerm& o, double rate)
    {
        for (auto& msg : check_linear(p)) error(at, msg);
        for (auto& msg : check_rule_vars(p, o)) error(at, msg);
        if (!(rate >= 0.0) || !std::isfinite(rate)) error(at, "rate must be a nonnegative finite number");
    }

    void spatial_label(SourcePos at, const Label& l)
    {
        if (l.is_top()) error(at, "label 'top' is reserved for the root compartment");
    }

    void check(const NseDecl& d) { check_rule(d.pos, d.pattern, d.result, d.rate); }

    void check(const SeDecl& d)
    {
        coords(d.coords, d.pos);
        spatial_label(d.pos, d.label);
        if (d.new_label) spatial_label(d.pos, *d.new_label);
        check_rule(d.pos, d.pattern, d.result, d.rate);
    }

    void check(const SmeDecl& d)
    {
        coords(d.coords, d.pos);
        if (d.dirs.empty()) error(d.pos, "a movement rule needs at least one direction");
        spatial_label(d.pos, d.label1);
        spatial_label(d.pos, d.label2);
        if (d.new_label1) spatial_label(d.pos, *d.new_label1);
        if (d.new_label2) spatial_label(d.pos, *d.new_label2);
        check_rule(d.pos, merged(d.pattern1, d.pattern2), merged(d.result1, d.result2), d.rate);
    }

    void check(const MonitorDecl& d)
    {
        if (d.coords) coords(d.coords, d.pos);
        if (d.label) spatial_label(d.pos, *d.label);
        for (auto& msg : check_linear(d.pattern)) error(d.pos, msg);
        if (!pattern_vars(d.pattern).empty()) {
            warning(d.pos, "monitor '" + d.name + "' has variables in its pattern; it counts every match");
        }
    }

    void check_cells()
    {
        std::map<Coordinate, SourcePos> covered;
        for (const auto& c : m_.cells) {
            spatial_label(c.pos, c.label);
            if (mentions_coordinate(c.content)) error(c.pos, "cell contents may not carry coordinates");
            for (const auto& xy : coords(c.coords, c.pos)) {
                auto [it, fresh] = covered.emplace(xy, c.pos);
                if (!fresh) {
                    error(c.pos, "coordinate " + render_coordinate(xy) + " is already covered by the cell declaration at line "
                                     + std::to_string(it->second.line));
                }
            }
        }
        std::vector<Coordinate> gaps;
        for (int r = 1; r <= m_.rows; ++r) {
            for (int c = 1; c <= m_.cols; ++c) {
                if (!covered.contains({r, c})) gaps.push_back({r, c});
            }
        }
        if (!gaps.empty()) {
            std::string msg = "grid cells not covered by any cell declaration:";
            for (std::size_t i = 0; i < gaps.size() && i < 8; ++i) msg += " " + render_coordinate(gaps[i]);
            if (gaps.size() > 8) msg += " ... (" + std::to_string(gaps.size()) + " in total)";
            error(m_.grid_pos, msg);
        }
    }

    const SurfaceModel& m_;
    GridDims dims_;
    std::vector<Diagnostic> diags_;
};

CompartmentPattern cell_pattern(int slot, Coordinate at, const Label& label, const Pattern& content)
{
    CompartmentPattern p;
    p.label = label;
    p.wrap.coord = at;
    p.wrap_var = Var{kCellWrapVar[slot]};
    p.content = content;
    p.content_var = Var{kCellContentVar[slot]};
    return p;
}

OpenCompartment cell_result(int slot, Coordinate at, const Label& label, const OpenTerm& content)
{
    OpenCompartment o;
    o.label = label;
    o.wrap.coord = at;
    o.wrap_vars.add(Var{kCellWrapVar[slot]});
    o.content = content;
    o.content.vars.add(Var{kCellContentVar[slot]});
    return o;
}

class Expander {
public:
    Expander(const SurfaceModel& m, CompiledModel& out) : m_(m), out_(out), dims_{m.rows, m.cols} {}

    void operator()(const NseDecl& d) { out_.rules.push_back(RewriteRule{d.label, d.pattern, d.result, d.rate}); }

    void operator()(const SeDecl& d)
    {
        const Label& after = d.new_label ? *d.new_label : d.label;
        for (const auto& c : region(d.coords)) {
            RewriteRule r;
            r.label = Label::top();
            r.rate = d.rate;
            r.pattern.compartments.add(cell_pattern(0, c, d.label, d.pattern));
            r.result.compartments.add(cell_result(0, c, after, d.result));
            out_.rules.push_back(std::move(r));
        }
    }

    void operator()(const SmeDecl& d)
    {
        const Label& after1 = d.new_label1 ? *d.new_label1 : d.label1;
        const Label& after2 = d.new_label2 ? *d.new_label2 : d.label2;
        for (const auto& c : region(d.coords)) {
            for (auto dir : d.dirs.members()) {
                const auto n = shift(c, dir, dims_);
                if (!n) continue;
                RewriteRule r;
                r.label = Label::top();
                r.rate = d.rate;
                r.pattern.compartments.add(cell_pattern(0, c, d.label1, d.pattern1));
                r.pattern.compartments.add(cell_pattern(1, *n, d.label2, d.pattern2));
                r.result.compartments.add(cell_result(0, c, after1, d.result1));
                r.result.compartments.add(cell_result(1, *n, after2, d.result2));
                out_.rules.push_back(std::move(r));
            }
        }
    }

    void monitors()
    {
        const auto labels = spatial_labels(m_);
        for (const auto& d : m_.monitors) {
            if (!d.coords) {
                out_.monitors.push_back(Monitor{d.name, std::nullopt, d.label, d.pattern});
                continue;
            }
            for (const auto& c : eval_coords(*d.coords, dims_)) {
                const std::string base = d.name + "@" + render_coordinate(c);
                if (d.label) {
                    out_.monitors.push_back(Monitor{base, c, d.label, d.pattern});
                } else {
                    for (const auto& l : labels) out_.monitors.push_back(Monitor{base + ":" + l.name, c, l, d.pattern});
                }
            }
        }
    }

private:
    std::vector<Coordinate> region(const std::optional<CoordSetExpr>& e) const
    {
        return eval_coords(e ? *e : CoordSetExpr{{CoordWhole{}}}, dims_);
    }

    const SurfaceModel& m_;
    CompiledModel& out_;
    GridDims dims_;
};

} // namespace

std::vector<Diagnostic> validate(const SurfaceModel& m)
{
    return Validator(m).run();
}

CompiledModel compile(const SurfaceModel& m)
{
    auto diags = validate(m);
    if (has_errors(diags)) throw CompileError(std::move(diags));

    CompiledModel out;
    out.name = m.name;
    out.dims = GridDims{m.rows, m.cols};
    for (const auto& cell : m.cells) {
        for (const auto& c : eval_coords(cell.coords, out.dims)) {
            Compartment comp;
            comp.label = cell.label;
            comp.wrap.coord = c;
            comp.content = cell.content;
            out.initial.compartments.add(comp);
        }
    }
    Expander expand(m, out);
    for (const auto& r : m.rules) std::visit(expand, r);
    expand.monitors();
    return out;
}

std::string emit_ground_model(const CompiledModel& m)
{
    std::string out = "cwc-ground v1\n";
    out += "model " + m.name + "\n";
    out += "grid " + std::to_string(m.dims.rows) + "," + std::to_string(m.dims.cols) + "\n";
    out += "initial " + render_term(m.initial) + "\n";
    for (const auto& r : m.rules) out += "rule " + render_rule(r) + "\n";
    for (const auto& mon : m.monitors) {
        out += "monitor " + mon.name + " <" + (mon.cell ? render_coordinate(*mon.cell) : std::string("*")) + "> {"
            + (mon.label ? mon.label->name : std::string("*")) + "} " + render_pattern(mon.pattern) + "\n";
    }
    return out;
}

} // namespace cwc
