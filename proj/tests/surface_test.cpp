#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "cwc/surface.hpp"

using namespace cwc;

namespace {

std::string slurp(const std::string& name)
{
    std::ifstream in(std::string(CWC_MODELS_DIR) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Diagnostic> errors_of(std::string_view text)
{
    auto r = parse_model(text);
    CHECK_FALSE(r.model.has_value());
    return r.diagnostics;
}

} // namespace

TEST_CASE("coordinate expressions")
{
    const auto e = parse_coord_expr("6,6 rect[1,1 3,2] col[5]");
    REQUIRE(e.items.size() == 3);
    CHECK(std::get<CoordSingle>(e.items[0]).at == Coordinate{6, 6});
    CHECK(std::get<CoordRect>(e.items[1]).from == Coordinate{1, 1});
    CHECK(std::get<CoordRect>(e.items[1]).to == Coordinate{3, 2});
    CHECK(std::get<CoordCol>(e.items[2]).col == 5);
    CHECK(std::holds_alternative<CoordWhole>(parse_coord_expr("*").items.at(0)));
    CHECK(std::holds_alternative<CoordWhole>(parse_coord_expr("[*]").items.at(0)));
    CHECK(std::get<CoordRow>(parse_coord_expr("row[2]").items.at(0)).row == 2);
    CHECK_THROWS_AS((void)parse_coord_expr("rect[1,1]"), ParseError);
    CHECK_THROWS_AS((void)parse_coord_expr("col[]"), ParseError);
    CHECK_THROWS_AS((void)parse_coord_expr(""), ParseError);
    CHECK(render_coord_expr(e) == "6,6 rect[1,1 3,2] col[5]");
}

TEST_CASE("terms, patterns and open terms")
{
    const Term t = parse_term("2 a b ({l} c d | e f)");
    CHECK(t.atoms.count(Atom{"a"}) == 2);
    CHECK(t.atoms.count(Atom{"b"}) == 1);
    CHECK(t.compartments.size() == 1);
    CHECK(parse_term("\\e").empty());

    const Pattern p = parse_pattern("({l1} a $x | $X)");
    REQUIRE(p.compartments.size() == 1);
    CHECK(p.compartments[0].value.wrap_var.name == "x");
    CHECK(p.compartments[0].value.content_var.name == "X");
    CHECK(render_pattern(p) == "({l1} a $x | $X)");

    const OpenTerm o = parse_open_term("a ({l} $x b | $X c) $Y");
    CHECK(o.vars.size() == 1);
    CHECK(render_open_term(o) == "a ({l} b $x | c $X) $Y");
}

TEST_CASE("fragment errors")
{
    CHECK_THROWS_AS((void)parse_term("a $X"), ParseError);
    CHECK_THROWS_AS((void)parse_term("({l} $x | a)"), ParseError);
    CHECK_THROWS_AS((void)parse_pattern("({l} $x | $X) ({m} $x | $Y)"), ParseError);
    CHECK_THROWS_AS((void)parse_pattern("a $X"), ParseError);
    CHECK_THROWS_AS((void)parse_pattern("({l} a | $X)"), ParseError);
    CHECK_THROWS_AS((void)parse_pattern("({l} $x $y | $X)"), ParseError);
    CHECK_THROWS_AS((void)parse_pattern("({l} $X | $Y)"), ParseError);
    CHECK_THROWS_AS((void)parse_term("0 a"), ParseError);
    CHECK_THROWS_AS((void)parse_term("({l} a b)"), ParseError);
    CHECK_THROWS_AS((void)parse_term("1,1"), ParseError);
}

TEST_CASE("bundled models parse")
{
    for (const char* name : {"am_calospora.cwc", "am_glomus.cwc", "river.cwc"}) {
        const auto r = parse_model(slurp(name));
        CHECK_MESSAGE(r.diagnostics.empty(), name);
        CHECK(r.model.has_value());
    }
    const auto am = parse_model(slurp("am_calospora.cwc"));
    REQUIRE(am.model);
    CHECK(am.model->name == "am_calospora");
    CHECK(am.model->rows == 1);
    CHECK(am.model->cols == 13);
    CHECK(am.model->rules.size() == 9);
    CHECK(am.model->cells.size() == 2);
}

TEST_CASE("minimal model")
{
    const auto r = parse_model("model M ; grid 10 , 10 ;");
    REQUIRE(r.model);
    CHECK(r.diagnostics.empty());
    CHECK(r.model->rows == 10);
    CHECK(r.model->cols == 10);
    CHECK(r.model->rules.empty());
}

TEST_CASE("declaration forms")
{
    const auto r = parse_model(R"(model m ;
grid 3 , 3 ;
nse {cell} a b [0.5] c ;
nse {top} x [1e-3] \e ;
se {soil} Tip [2] 2 Tip ;
se <1,1> {soil} Root [4] {root} Root Hyp ;
sme <row[1]> [E, W] {soil} Tip {soil} \e [1.5] Hyp _ Tip ;
sme [+] {a} x {b} \e [1] {c} \e {d} x ;
sme <2,2> [x] {a} x {b} \e [1] \e {d} x ;
cell <*> {soil} \e ;
monitor tips <1,1> {soil} Tip ;
monitor all Tip ;
monitor some {soil} 2 Tip ;
)");
    REQUIRE(r.model);
    const auto& m = *r.model;
    REQUIRE(m.rules.size() == 7);
    CHECK(std::get<NseDecl>(m.rules[1]).label.is_top());
    CHECK(std::get<NseDecl>(m.rules[1]).rate == 1e-3);
    CHECK_FALSE(std::get<SeDecl>(m.rules[2]).coords.has_value());
    CHECK(std::get<SeDecl>(m.rules[3]).new_label == Label{"root"});
    const auto& move = std::get<SmeDecl>(m.rules[4]);
    CHECK(move.dirs.size() == 2);
    CHECK(move.dirs.contains(Direction::E));
    CHECK_FALSE(move.new_label2.has_value());
    CHECK(std::get<SmeDecl>(m.rules[5]).dirs == DirectionSet::orthogonal());
    CHECK(std::get<SmeDecl>(m.rules[5]).new_label1 == Label{"c"});
    CHECK(std::get<SmeDecl>(m.rules[6]).dirs == DirectionSet::diagonal());
    CHECK(m.monitors.size() == 3);
    CHECK_FALSE(m.monitors[1].coords.has_value());
    CHECK_FALSE(m.monitors[1].label.has_value());
    CHECK(m.monitors[2].label == Label{"soil"});
}

TEST_CASE("render reparses to the same model")
{
    for (const char* name : {"am_calospora.cwc", "am_glomus.cwc", "river.cwc"}) {
        const auto r = parse_model(slurp(name));
        REQUIRE(r.model);
        const std::string once = render_model(*r.model);
        const auto again = parse_model(once);
        REQUIRE_MESSAGE(again.model, once);
        CHECK(render_model(*again.model) == once);
    }
}

TEST_CASE("missing semicolon names the line")
{
    const auto d = errors_of("model M ;\ngrid 2 , 2 ;\ncell <*> {soil} a\n");
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].is_error());
    CHECK(d[0].pos.line == 3);
}

TEST_CASE("section order and duplicates")
{
    CHECK_FALSE(errors_of("grid 2 , 2 ; model M ;").empty());
    CHECK_FALSE(errors_of("model M ; model N ; grid 2 , 2 ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 2 , 2 ; grid 2 , 2 ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; cell <*> {s} \\e ; se {s} a [1] b ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; monitor m a ; cell <*> {s} \\e ;").empty());
    CHECK_FALSE(errors_of("model M ;").empty());
    CHECK_FALSE(errors_of("").empty());
}

TEST_CASE("rule syntax errors")
{
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; nse {l} a [-1] b ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; nse {l} a $X [1] b ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; nse {l} a [1] ({c} | b ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; nse {l} ({c} $y | $Y) ({d} $z | $Y) [1] \\e ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 2 ; sme [E] {s} a {s} \\e [1] \\e a ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 2 ; sme [Q] {s} a {s} \\e [1] \\e _ a ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; cell <*> {s} a $X ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; cell {s} a ;").empty());
    CHECK_FALSE(errors_of("model M ; grid 1 , 1 ; nse {l} a [1] b ; nse {l} ? [1] b ;").empty());
}

TEST_CASE("errors are collected past the first one")
{
    const auto d = errors_of("model M ;\ngrid 2 , 2 ;\nnse {l} a [-1] b ;\nnse {l} a [1] ? ;\n");
    REQUIRE(d.size() >= 2);
    CHECK(d[0].pos.line == 3);
    CHECK(d[1].pos.line == 4);
    CHECK(d[0].str().rfind("3:", 0) == 0);
}

TEST_CASE("fuzzed input never crashes and always carries positions")
{
    const std::string seed_text = slurp("river.cwc") + slurp("am_calospora.cwc");
    const std::string alphabet = "{}()[]<>|;,*+-_$\\e 0123456789abcXYZ\n.#";
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        std::string text = seed_text;
        const int edits = 1 + static_cast<int>(rng() % 6);
        for (int k = 0; k < edits; ++k) {
            const std::size_t at = rng() % text.size();
            switch (rng() % 3) {
            case 0: text[at] = alphabet[rng() % alphabet.size()]; break;
            case 1: text.erase(at, 1 + rng() % 4); break;
            default: text.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
            }
        }
        if (i % 5 == 0) text.resize(rng() % (text.size() + 1));
        const auto r = parse_model(text);
        CHECK(r.model.has_value() != has_errors(r.diagnostics));
        for (const auto& d : r.diagnostics) {
            CHECK(d.pos.line >= 1);
            CHECK(d.pos.col >= 1);
        }
    }
}
