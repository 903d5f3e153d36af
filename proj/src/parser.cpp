#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "cwc/surface.hpp"
#include "lexer.hpp"

namespace cwc {

using detail::Tok;
using detail::Token;

std::string Diagnostic::str() const
{
    return std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": "
        + (severity == Severity::Error ? "error: " : "warning: ") + message;
}

bool has_errors(const std::vector<Diagnostic>& diags)
{
    for (const auto& d : diags) {
        if (d.is_error()) return true;
    }
    return false;
}

ParseError::ParseError(SourcePos pos, const std::string& message)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + message), pos_(pos)
{
}

namespace {

bool is_wrap_var_name(const std::string& name)
{
    return !name.empty() && std::islower(static_cast<unsigned char>(name[0]));
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    // -- token plumbing ------------------------------------------------------

    [[nodiscard]] const Token& peek(std::size_t k = 0) const
    {
        const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
        return toks_[i];
    }

    Token take()
    {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    bool accept(Tok k)
    {
        if (peek().kind != k) return false;
        take();
        return true;
    }

    Token expect(Tok k, std::string_view context = {})
    {
        if (peek().kind != k) {
            std::string msg = "expected " + std::string(detail::token_name(k));
            if (!context.empty()) msg += " " + std::string(context);
            msg += ", found " + describe(peek());
            // a missing terminator belongs to the line it should end
            fail(k == Tok::Semi ? just_after_previous() : peek().pos, msg);
        }
        return take();
    }

    [[nodiscard]] SourcePos just_after_previous() const
    {
        if (pos_ == 0) return peek().pos;
        const Token& prev = toks_[pos_ - 1];
        return SourcePos{prev.pos.line, prev.pos.col + static_cast<int>(prev.text.size())};
    }

    [[noreturn]] static void fail(SourcePos at, const std::string& msg) { throw ParseError(at, msg); }

    static std::string describe(const Token& t)
    {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }

    /// Skips to just after the next ';'.
    void synchronize()
    {
        while (peek().kind != Tok::End) {
            if (take().kind == Tok::Semi) return;
        }
    }

    void expect_end()
    {
        if (peek().kind != Tok::End) fail(peek().pos, "unexpected " + describe(peek()));
    }

    // -- literals -------------------------------------------------------------

    int integer(const Token& t)
    {
        int v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail(t.pos, "integer out of range: " + t.text);
        return v;
    }

    std::uint64_t repetition()
    {
        const Token t = expect(Tok::Int);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{}) fail(t.pos, "repetition count out of range: " + t.text);
        if (v == 0) fail(t.pos, "repetition count must be positive");
        return v;
    }

    Coordinate coordinate()
    {
        const Token r = expect(Tok::Int, "(coordinate row)");
        expect(Tok::Comma, "between row and column");
        const Token c = expect(Tok::Int, "(coordinate column)");
        return Coordinate{integer(r), integer(c)};
    }

    double rate()
    {
        expect(Tok::LBracket, "before the rate");
        if (peek().kind == Tok::Minus) fail(peek().pos, "rates must be nonnegative");
        const Token t = peek();
        if (t.kind != Tok::Int && t.kind != Tok::Real) fail(t.pos, "expected a rate, found " + describe(t));
        take();
        const double v = std::strtod(t.text.c_str(), nullptr);
        if (!std::isfinite(v)) fail(t.pos, "rate out of range: " + t.text);
        expect(Tok::RBracket, "after the rate");
        return v;
    }

    Label label(bool allow_top)
    {
        expect(Tok::LBrace, "before a label");
        const Token t = expect(Tok::Ident, "(label)");
        if (!allow_top && t.text == Label::kTopName) {
            fail(t.pos, "label 'top' is reserved for the root compartment");
        }
        expect(Tok::RBrace, "after a label");
        return Label{t.text};
    }

    // -- coordinate sets and directions --------------------------------------

    [[nodiscard]] bool coord_item_ahead() const
    {
        const Token& t = peek();
        if (t.kind == Tok::Int || t.kind == Tok::Star) return true;
        if (t.kind == Tok::LBracket) return peek(1).kind == Tok::Star;
        return t.kind == Tok::Ident && (t.text == "rect" || t.text == "row" || t.text == "col");
    }

    CoordSetExpr coord_set()
    {
        CoordSetExpr e;
        while (coord_item_ahead()) {
            const Token& t = peek();
            if (t.kind == Tok::Int) {
                e.items.emplace_back(CoordSingle{coordinate()});
            } else if (t.kind == Tok::Star) {
                take();
                e.items.emplace_back(CoordWhole{});
            } else if (t.kind == Tok::LBracket) {
                take();
                expect(Tok::Star);
                expect(Tok::RBracket);
                e.items.emplace_back(CoordWhole{});
            } else {
                const std::string kw = take().text;
                expect(Tok::LBracket, "after '" + kw + "'");
                if (kw == "rect") {
                    const Coordinate a = coordinate();
                    const Coordinate b = coordinate();
                    e.items.emplace_back(CoordRect{a, b});
                } else if (kw == "row") {
                    e.items.emplace_back(CoordRow{integer(expect(Tok::Int, "(row index)"))});
                } else {
                    e.items.emplace_back(CoordCol{integer(expect(Tok::Int, "(column index)"))});
                }
                expect(Tok::RBracket, "closing '" + kw + "'");
            }
        }
        if (e.items.empty()) fail(peek().pos, "expected a coordinate set, found " + describe(peek()));
        return e;
    }

    DirectionSet directions()
    {
        DirectionSet d;
        const SourcePos at = peek().pos;
        for (;;) {
            const Token& t = peek();
            if (t.kind == Tok::Comma) {
                take();
                continue;
            }
            if (t.kind == Tok::Plus) {
                take();
                for (auto x : DirectionSet::orthogonal().members()) d.insert(x);
            } else if (t.kind == Tok::Star) {
                take();
                for (auto x : DirectionSet::all().members()) d.insert(x);
            } else if (t.kind == Tok::Ident) {
                if (t.text == "x") {
                    for (auto x : DirectionSet::diagonal().members()) d.insert(x);
                } else {
                    bool known = false;
                    for (auto x : kAllDirections) {
                        if (direction_name(x) == t.text) {
                            d.insert(x);
                            known = true;
                        }
                    }
                    if (!known) fail(t.pos, "unknown direction '" + t.text + "'");
                }
                take();
            } else {
                break;
            }
        }
        if (d.empty()) fail(at, "expected at least one direction");
        return d;
    }

    // -- terms -----------------------------------------------------------------

    struct WrapItems {
        Wrap wrap;
        std::vector<Token> vars;
    };

    WrapItems wrap_items()
    {
        WrapItems w;
        for (;;) {
            const Token& t = peek();
            if (t.kind == Tok::Empty) {
                take();
            } else if (t.kind == Tok::Int && peek(1).kind == Tok::Comma) {
                const SourcePos at = t.pos;
                const Coordinate c = coordinate();
                if (w.wrap.coord) fail(at, "a wrap carries at most one coordinate");
                w.wrap.coord = c;
            } else if (t.kind == Tok::Int || t.kind == Tok::Ident || t.kind == Tok::Var) {
                const std::uint64_t n = t.kind == Tok::Int ? repetition() : 1;
                const Token item = take();
                if (item.kind == Tok::Ident) {
                    w.wrap.atoms.add(Atom{item.text}, n);
                } else if (item.kind == Tok::Var) {
                    if (!is_wrap_var_name(item.text)) {
                        fail(item.pos, "content variable $" + item.text + " cannot appear in a wrap");
                    }
                    for (std::uint64_t i = 0; i < n; ++i) w.vars.push_back(item);
                } else {
                    fail(item.pos, "expected an atom after the repetition count, found " + describe(item));
                }
            } else {
                break;
            }
        }
        return w;
    }

    Term ground_items()
    {
        Term t;
        for (;;) {
            const Token& tk = peek();
            if (tk.kind == Tok::Empty) {
                take();
                continue;
            }
            std::uint64_t n = 1;
            const bool counted = tk.kind == Tok::Int;
            if (counted) {
                if (peek(1).kind == Tok::Comma) fail(tk.pos, "coordinates may only appear in a compartment wrap");
                n = repetition();
            }
            const Token& s = peek();
            if (s.kind == Tok::Ident) {
                t.atoms.add(Atom{take().text}, n);
            } else if (s.kind == Tok::LParen) {
                t.compartments.add(ground_compartment(), n);
            } else if (s.kind == Tok::Var) {
                fail(s.pos, "variables are not allowed in a ground term");
            } else {
                if (counted) fail(s.pos, "expected a term after the repetition count, found " + describe(s));
                break;
            }
        }
        return t;
    }

    Compartment ground_compartment()
    {
        expect(Tok::LParen);
        Compartment c;
        c.label = label(false);
        WrapItems w = wrap_items();
        if (!w.vars.empty()) fail(w.vars.front().pos, "variables are not allowed in a ground term");
        c.wrap = std::move(w.wrap);
        expect(Tok::Pipe, "between wrap and content");
        c.content = ground_items();
        expect(Tok::RParen, "closing the compartment");
        return c;
    }

    /// Pattern items at one level; `content_var` is null at the top level.
    Pattern pattern_items(std::optional<Var>* content_var)
    {
        Pattern p;
        for (;;) {
            const Token& tk = peek();
            if (tk.kind == Tok::Empty) {
                take();
                continue;
            }
            if (tk.kind == Tok::Var) {
                const Token v = take();
                if (content_var == nullptr) {
                    fail(v.pos, "the top-level remainder variable is implicit; remove $" + v.text);
                }
                if (is_wrap_var_name(v.text)) fail(v.pos, "wrap variable $" + v.text + " cannot appear in a content");
                if (*content_var) fail(v.pos, "a compartment content takes exactly one content variable");
                *content_var = Var{v.text};
                continue;
            }
            std::uint64_t n = 1;
            const bool counted = tk.kind == Tok::Int;
            if (counted) {
                if (peek(1).kind == Tok::Comma) fail(tk.pos, "coordinates may only appear in a compartment wrap");
                n = repetition();
            }
            const Token& s = peek();
            if (s.kind == Tok::Ident) {
                p.atoms.add(Atom{take().text}, n);
            } else if (s.kind == Tok::LParen) {
                p.compartments.add(compartment_pattern(), n);
            } else {
                if (counted) fail(s.pos, "expected a pattern after the repetition count, found " + describe(s));
                break;
            }
        }
        return p;
    }

    CompartmentPattern compartment_pattern()
    {
        const SourcePos at = expect(Tok::LParen).pos;
        CompartmentPattern c;
        c.label = label(false);
        WrapItems w = wrap_items();
        if (w.vars.size() != 1) fail(at, "a compartment pattern takes exactly one wrap variable");
        c.wrap = std::move(w.wrap);
        c.wrap_var = Var{w.vars.front().text};
        expect(Tok::Pipe, "between wrap and content");
        std::optional<Var> cv;
        c.content = pattern_items(&cv);
        if (!cv) fail(peek().pos, "a compartment pattern takes exactly one content variable");
        c.content_var = *cv;
        expect(Tok::RParen, "closing the compartment pattern");
        return c;
    }

    Pattern top_pattern()
    {
        const SourcePos at = peek().pos;
        Pattern p = pattern_items(nullptr);
        if (auto problems = check_linear(p); !problems.empty()) fail(at, problems.front());
        return p;
    }

    OpenTerm open_items()
    {
        OpenTerm o;
        for (;;) {
            const Token& tk = peek();
            if (tk.kind == Tok::Empty) {
                take();
                continue;
            }
            std::uint64_t n = 1;
            const bool counted = tk.kind == Tok::Int;
            if (counted) {
                if (peek(1).kind == Tok::Comma) fail(tk.pos, "coordinates may only appear in a compartment wrap");
                n = repetition();
            }
            const Token& s = peek();
            if (s.kind == Tok::Ident) {
                o.atoms.add(Atom{take().text}, n);
            } else if (s.kind == Tok::LParen) {
                o.compartments.add(open_compartment(), n);
            } else if (s.kind == Tok::Var) {
                const Token v = take();
                if (is_wrap_var_name(v.text)) fail(v.pos, "wrap variable $" + v.text + " cannot appear in a content");
                o.vars.add(Var{v.text}, n);
            } else {
                if (counted) fail(s.pos, "expected an open term after the repetition count, found " + describe(s));
                break;
            }
        }
        return o;
    }

    OpenCompartment open_compartment()
    {
        expect(Tok::LParen);
        OpenCompartment c;
        c.label = label(false);
        WrapItems w = wrap_items();
        c.wrap = std::move(w.wrap);
        for (const auto& v : w.vars) c.wrap_vars.add(Var{v.text});
        expect(Tok::Pipe, "between wrap and content");
        c.content = open_items();
        expect(Tok::RParen, "closing the compartment");
        return c;
    }

    // -- declarations --------------------------------------------------------

    ParseResult model(std::vector<Diagnostic> diags)
    {
        enum class Phase { Start, Named, Sized, Rules, Cells, Monitors };
        Phase phase = Phase::Start;
        bool seen_model = false;
        bool seen_grid = false;
        SurfaceModel m;

        auto order_error = [&](SourcePos at, const std::string& msg) {
            diags.push_back({Diagnostic::Severity::Error, at, msg});
        };

        while (peek().kind != Tok::End) {
            const Token start = peek();
            try {
                if (start.kind != Tok::Ident) fail(start.pos, "expected a declaration, found " + describe(start));
                const std::string& kw = start.text;
                if (kw == "model") {
                    take();
                    if (seen_model) order_error(start.pos, "duplicate 'model' declaration");
                    else if (phase != Phase::Start) order_error(start.pos, "'model' must be the first declaration");
                    m.name = expect(Tok::Ident, "(model name)").text;
                    expect(Tok::Semi, "after the model declaration");
                    seen_model = true;
                    phase = std::max(phase, Phase::Named);
                } else if (kw == "grid") {
                    take();
                    if (seen_grid) order_error(start.pos, "duplicate 'grid' declaration");
                    else if (phase != Phase::Named) order_error(start.pos, "'grid' must directly follow 'model'");
                    m.grid_pos = start.pos;
                    m.rows = integer(expect(Tok::Int, "(grid rows)"));
                    expect(Tok::Comma, "between grid rows and columns");
                    m.cols = integer(expect(Tok::Int, "(grid columns)"));
                    expect(Tok::Semi, "after the grid declaration");
                    seen_grid = true;
                    phase = std::max(phase, Phase::Sized);
                } else if (kw == "nse" || kw == "se" || kw == "sme") {
                    take();
                    if (phase < Phase::Sized) order_error(start.pos, "rules must follow the 'model' and 'grid' declarations");
                    else if (phase > Phase::Rules) order_error(start.pos, "rules must precede cell and monitor declarations");
                    if (kw == "nse") m.rules.emplace_back(nse(start.pos));
                    else if (kw == "se") m.rules.emplace_back(se(start.pos));
                    else m.rules.emplace_back(sme(start.pos));
                    phase = std::max(phase, Phase::Rules);
                } else if (kw == "cell") {
                    take();
                    if (phase < Phase::Sized) order_error(start.pos, "cells must follow the 'model' and 'grid' declarations");
                    else if (phase > Phase::Cells) order_error(start.pos, "cells must precede monitor declarations");
                    m.cells.push_back(cell(start.pos));
                    phase = std::max(phase, Phase::Cells);
                } else if (kw == "monitor") {
                    take();
                    if (phase < Phase::Sized) order_error(start.pos, "monitors must follow the 'model' and 'grid' declarations");
                    m.monitors.push_back(monitor(start.pos));
                    phase = Phase::Monitors;
                } else {
                    fail(start.pos, "unknown declaration '" + kw + "'");
                }
            } catch (const ParseError& e) {
                std::string msg = e.what();
                msg = msg.substr(msg.find(": ") + 2);
                diags.push_back({Diagnostic::Severity::Error, e.pos(), msg});
                synchronize();
            }
        }
        if (!seen_model) diags.push_back({Diagnostic::Severity::Error, peek().pos, "missing 'model' declaration"});
        if (!seen_grid) diags.push_back({Diagnostic::Severity::Error, peek().pos, "missing 'grid' declaration"});

        ParseResult r;
        r.diagnostics = std::move(diags);
        if (!has_errors(r.diagnostics)) r.model = std::move(m);
        return r;
    }

    NseDecl nse(SourcePos at)
    {
        NseDecl d;
        d.pos = at;
        d.label = label(true);
        d.pattern = top_pattern();
        d.rate = rate();
        d.result = open_items();
        expect(Tok::Semi, "after the rule");
        return d;
    }

    SeDecl se(SourcePos at)
    {
        SeDecl d;
        d.pos = at;
        if (accept(Tok::Lt)) {
            d.coords = coord_set();
            expect(Tok::Gt, "closing the coordinate set");
        }
        d.label = label(false);
        d.pattern = top_pattern();
        d.rate = rate();
        if (peek().kind == Tok::LBrace) d.new_label = label(false);
        d.result = open_items();
        expect(Tok::Semi, "after the rule");
        return d;
    }

    SmeDecl sme(SourcePos at)
    {
        SmeDecl d;
        d.pos = at;
        if (accept(Tok::Lt)) {
            d.coords = coord_set();
            expect(Tok::Gt, "closing the coordinate set");
        }
        expect(Tok::LBracket, "before the directions");
        d.dirs = directions();
        expect(Tok::RBracket, "after the directions");
        d.label1 = label(false);
        d.pattern1 = top_pattern();
        d.label2 = label(false);
        d.pattern2 = top_pattern();
        d.rate = rate();
        if (peek().kind == Tok::LBrace) d.new_label1 = label(false);
        d.result1 = open_items();
        if (peek().kind == Tok::LBrace) {
            d.new_label2 = label(false);
        } else {
            expect(Tok::Underscore, "(or a label) between the two results");
        }
        d.result2 = open_items();
        expect(Tok::Semi, "after the rule");
        return d;
    }

    CellDecl cell(SourcePos at)
    {
        CellDecl d;
        d.pos = at;
        expect(Tok::Lt, "before the cell coordinates");
        d.coords = coord_set();
        expect(Tok::Gt, "closing the coordinate set");
        d.label = label(false);
        d.content = ground_items();
        expect(Tok::Semi, "after the cell declaration");
        return d;
    }

    MonitorDecl monitor(SourcePos at)
    {
        MonitorDecl d;
        d.pos = at;
        d.name = expect(Tok::Ident, "(monitor name)").text;
        if (accept(Tok::Lt)) {
            d.coords = coord_set();
            expect(Tok::Gt, "closing the coordinate set");
        }
        if (peek().kind == Tok::LBrace) d.label = label(false);
        d.pattern = top_pattern();
        expect(Tok::Semi, "after the monitor declaration");
        return d;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

template <class F>
auto parse_fragment(std::string_view text, F&& body)
{
    std::vector<Diagnostic> diags;
    Parser p(detail::tokenize(text, diags));
    if (!diags.empty()) throw ParseError(diags.front().pos, diags.front().message);
    auto v = body(p);
    p.expect_end();
    return v;
}

} // namespace

ParseResult parse_model(std::string_view text)
{
    std::vector<Diagnostic> diags;
    auto toks = detail::tokenize(text, diags);
    auto r = Parser(std::move(toks)).model(std::move(diags));
    std::stable_sort(r.diagnostics.begin(), r.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::pair(a.pos.line, a.pos.col) < std::pair(b.pos.line, b.pos.col);
    });
    return r;
}

CoordSetExpr parse_coord_expr(std::string_view text)
{
    return parse_fragment(text, [](Parser& p) { return p.coord_set(); });
}

Term parse_term(std::string_view text)
{
    return parse_fragment(text, [](Parser& p) { return p.ground_items(); });
}

Pattern parse_pattern(std::string_view text)
{
    return parse_fragment(text, [](Parser& p) { return p.top_pattern(); });
}

OpenTerm parse_open_term(std::string_view text)
{
    return parse_fragment(text, [](Parser& p) { return p.open_items(); });
}

} // namespace cwc
