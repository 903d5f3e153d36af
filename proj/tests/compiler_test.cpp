#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "cwc/compiler.hpp"
#include "cwc/matcher.hpp"

using namespace cwc;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SurfaceModel model(std::string_view text)
{
    auto r = parse_model(text);
    for (const auto& d : r.diagnostics) MESSAGE(d.str());
    REQUIRE(r.model);
    return *r.model;
}

bool has_error_at(const std::vector<Diagnostic>& ds, int line, const std::string& needle)
{
    for (const auto& d : ds) {
        if (d.is_error() && d.pos.line == line && d.message.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::set<Coordinate> as_set(const std::vector<Coordinate>& v)
{
    return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("coordinate set evaluation")
{
    const auto got = eval_coords(parse_coord_expr("6,6 rect[1,1 3,2] col[5]"), {6, 6});
    std::set<Coordinate> expected{{6, 6}};
    for (int r = 1; r <= 3; ++r) {
        for (int c = 1; c <= 2; ++c) expected.insert({r, c});
    }
    for (int r = 1; r <= 6; ++r) expected.insert({r, 5});
    CHECK(got.size() == 13);
    CHECK(as_set(got) == expected);
    CHECK(std::is_sorted(got.begin(), got.end()));

    const auto row = eval_coords(parse_coord_expr("row[2]"), {3, 4});
    CHECK(row == std::vector<Coordinate>{{2, 1}, {2, 2}, {2, 3}, {2, 4}});
    CHECK(eval_coords(parse_coord_expr("*"), {2, 2}).size() == 4);
    CHECK(eval_coords(parse_coord_expr("1,1 1,1 rect[1,1 1,2]"), {2, 2}).size() == 2);
    CHECK(eval_coords(parse_coord_expr("col[2]"), {3, 2}) == std::vector<Coordinate>{{1, 2}, {2, 2}, {3, 2}});

    CHECK_THROWS_AS((void)eval_coords(parse_coord_expr("0,5"), {6, 6}), std::out_of_range);
    CHECK_THROWS_AS((void)eval_coords(parse_coord_expr("rect[3,3 1,1]"), {6, 6}), std::out_of_range);
    CHECK_THROWS_AS((void)eval_coords(parse_coord_expr("row[7]"), {6, 6}), std::out_of_range);
    CHECK_THROWS_AS((void)eval_coords(parse_coord_expr("col[0]"), {6, 6}), std::out_of_range);
}

TEST_CASE("union is monotone and idempotent")
{
    const GridDims g{5, 5};
    const auto a = as_set(eval_coords(parse_coord_expr("rect[1,1 2,3]"), g));
    const auto b = as_set(eval_coords(parse_coord_expr("col[3] 5,5"), g));
    const auto ab = as_set(eval_coords(parse_coord_expr("rect[1,1 2,3] col[3] 5,5"), g));
    std::set<Coordinate> u = a;
    u.insert(b.begin(), b.end());
    CHECK(ab == u);
    CHECK(eval_coords(parse_coord_expr("row[1] row[1]"), g) == eval_coords(parse_coord_expr("row[1]"), g));
}

TEST_CASE("shift")
{
    const GridDims g{3, 3};
    CHECK(shift({1, 1}, Direction::E, g) == Coordinate{1, 2});
    CHECK_FALSE(shift({1, 3}, Direction::N, g));
    CHECK(shift({2, 2}, Direction::SE, {10, 10}) == Coordinate{3, 3});
    CHECK(shift({2, 2}, Direction::N, g) == Coordinate{1, 2});
    CHECK(shift({2, 2}, Direction::S, g) == Coordinate{3, 2});
    CHECK(shift({2, 2}, Direction::W, g) == Coordinate{2, 1});
    CHECK(shift({2, 2}, Direction::NW, g) == Coordinate{1, 1});
    CHECK(shift({2, 2}, Direction::NE, g) == Coordinate{1, 3});
    CHECK(shift({2, 2}, Direction::SW, g) == Coordinate{3, 1});
    CHECK_FALSE(shift({3, 3}, Direction::SE, g));
    CHECK_FALSE(shift({1, 1}, Direction::W, g));
}

TEST_CASE("rule count laws")
{
    const auto am = compile(model(slurp(std::string(CWC_MODELS_DIR) + "/am_calospora.cwc")));
    std::size_t moves = 0;
    for (const auto& r : am.rules) {
        if (r.pattern.compartments.size() == 2) ++moves;
    }
    CHECK(moves == 24);
    CHECK(am.initial.compartments.size() == 13);

    const auto tips = compile(model("model m ; grid 1 , 13 ; sme [*] {soil} Tip {soil} \\e [1] Hyp _ Tip ; cell <*> {soil} \\e ;"));
    CHECK(tips.rules.size() == 24);
    const auto diag = compile(model("model m ; grid 3 , 3 ; sme [*] {s} a {s} \\e [1] \\e _ a ; cell <*> {s} \\e ;"));
    // corners 3, edges 5, centre 8
    CHECK(diag.rules.size() == 4 * 3 + 4 * 5 + 8);

    const auto src = compile(model(slurp(std::string(CWC_SOURCE_DIR) + "/tests/golden/nitrate_source.cwc")));
    CHECK(src.rules.size() == 4);
    CHECK(src.initial.compartments.size() == 100);
    CHECK(count_compartments(src.initial, Label{"soil"}) == 60);
    CHECK(count_compartments(src.initial, Label{"water"}) == 40);
    std::uint64_t left = 0;
    for (const auto& e : src.initial.compartments) {
        if (e.value.label == Label{"soil"} && e.value.wrap.coord->col <= 3) left += e.count;
    }
    CHECK(left == 30);
}

TEST_CASE("spatial event expansion")
{
    const auto m = compile(model("model m ; grid 2 , 2 ; se <1,2> {soil} a [3] {mud} b ; cell <*> {soil} a ;"));
    REQUIRE(m.rules.size() == 1);
    const RewriteRule& r = m.rules[0];
    CHECK(r.label.is_top());
    CHECK(r.rate == 3.0);
    CHECK(render_rule(r) == "{top} ({soil} 1,2 $_x | a $_X) [3] ({mud} 1,2 $_x | b $_X)");
}

TEST_CASE("movement expansion order and shape")
{
    const auto m = compile(model("model m ; grid 2 , 2 ; sme <1,1> [* ] {s} a {t} b [1] c {u} d ; cell <*> {s} \\e ;"));
    REQUIRE(m.rules.size() == 3);
    // S, E, SE in the fixed direction order
    CHECK(render_rule(m.rules[0]) == "{top} ({s} 1,1 $_x | a $_X) ({t} 2,1 $_y | b $_Y) [1] ({s} 1,1 $_x | c $_X) ({u} 2,1 $_y | d $_Y)");
    CHECK(render_rule(m.rules[1]).find("({t} 1,2 $_y") != std::string::npos);
    CHECK(render_rule(m.rules[2]).find("({t} 2,2 $_y") != std::string::npos);
}

TEST_CASE("compiled rules only mention grid coordinates")
{
    const auto m = compile(model(slurp(std::string(CWC_MODELS_DIR) + "/river.cwc")));
    for (const auto& r : m.rules) {
        for (const auto& e : r.pattern.compartments) {
            if (e.value.wrap.coord) CHECK(m.dims.contains(*e.value.wrap.coord));
        }
    }
    CHECK(m.initial.compartments.size() == 100);
}

TEST_CASE("bundled models validate cleanly")
{
    for (const char* name : {"am_calospora.cwc", "am_glomus.cwc"}) {
        CHECK(validate(model(slurp(std::string(CWC_MODELS_DIR) + "/" + name))).empty());
    }
    CHECK_FALSE(has_errors(validate(model(slurp(std::string(CWC_MODELS_DIR) + "/river.cwc")))));
}

TEST_CASE("validation errors")
{
    auto overlap = validate(model("model m ;\ngrid 2 , 2 ;\ncell <*> {s} \\e ;\ncell <1,1> {s} a ;\n"));
    CHECK(has_error_at(overlap, 4, "already covered"));

    auto gap = validate(model("model m ;\ngrid 2 , 2 ;\ncell <row[1]> {s} \\e ;\n"));
    CHECK(has_error_at(gap, 2, "2,1 2,2"));

    auto bounds = validate(model("model m ;\ngrid 6 , 6 ;\nse <0,5> {s} a [1] b ;\ncell <*> {s} \\e ;\n"));
    CHECK(has_error_at(bounds, 3, "0,5"));

    auto inverted = validate(model("model m ;\ngrid 6 , 6 ;\nse <rect[3,3 1,1]> {s} a [1] b ;\ncell <*> {s} \\e ;\n"));
    CHECK(has_error_at(inverted, 3, "rect"));

    auto reserved = model("model m ;\ngrid 1 , 1 ;\ncell <*> {s} \\e ;\n");
    reserved.cells[0].label = Label::top();
    CHECK(has_error_at(validate(reserved), 3, "reserved"));

    auto nested = validate(model("model m ;\ngrid 1 , 2 ;\ncell <1,1> {s} ({l} 1,2 | \\e) ;\ncell <1,2> {s} \\e ;\n"));
    CHECK(has_error_at(nested, 3, "coordinate"));

    CHECK_THROWS_AS((void)compile(model("model m ; grid 2 , 2 ; cell <1,1> {s} \\e ;")), CompileError);
    try {
        (void)compile(model("model m ; grid 2 , 2 ; cell <1,1> {s} \\e ;"));
    } catch (const CompileError& e) {
        CHECK(has_errors(e.diagnostics()));
    }
}

TEST_CASE("programmatic models are checked for rule variables and rates")
{
    SurfaceModel m = model("model m ; grid 1 , 2 ; sme [E] {s} ({c} $x | $X) {s} \\e [1] \\e _ ({c} $x | $X) ; cell <*> {s} \\e ;");
    CHECK(validate(m).empty());
    auto& move = std::get<SmeDecl>(m.rules[0]);
    // the same variable on both sides of a movement breaks linearity
    move.pattern2 = parse_pattern("({c} $x | $Y)");
    CHECK(has_errors(validate(m)));
    move.pattern2 = Pattern{};
    move.result2 = parse_open_term("$Z");
    CHECK(has_errors(validate(m)));
    move.result2 = OpenTerm{};
    CHECK(validate(m).empty());
    move.rate = -1.0;
    CHECK(has_errors(validate(m)));
    move.rate = 1.0;
    move.dirs = DirectionSet{};
    CHECK(has_errors(validate(m)));
}

TEST_CASE("movement can carry a compartment across cells")
{
    const auto m = compile(model("model m ; grid 1 , 2 ; sme [E] {s} ({c} $x | $X) {s} \\e [1] \\e _ ({c} $x | $X) ; cell <1,1> {s} ({c} w | q) ; cell <1,2> {s} \\e ;"));
    REQUIRE(m.rules.size() == 1);
    const auto sites = collect_sites(m.rules, m.initial);
    REQUIRE(sites.size() == 1);
    const Match hit = match_at(m.rules[0].pattern, m.initial, 0);
    CHECK(apply_rewrite(m.initial, m.rules[0], {}, hit) == parse_term("({s} 1,1 | \\e) ({s} 1,2 | ({c} w | q))"));
}

TEST_CASE("monitor expansion")
{
    const auto m = compile(model(R"(model m ;
grid 1 , 3 ;
se <1,1> {soil} a [1] b ;
cell <1,1 1,2> {soil} Hyp ;
cell <1,3> {water} \e ;
monitor hyp <row[1]> {soil} Hyp ;
monitor any <1,2> Hyp ;
monitor avg {soil} Hyp ;
monitor all Hyp ;
)"));
    std::vector<std::string> names;
    for (const auto& mon : m.monitors) names.push_back(mon.name);
    CHECK(names == std::vector<std::string>{"hyp@1,1", "hyp@1,2", "hyp@1,3", "any@1,2:soil", "any@1,2:water", "avg", "all"});
    CHECK(m.monitors[5].label == Label{"soil"});
    CHECK_FALSE(m.monitors[5].cell.has_value());
    CHECK_FALSE(m.monitors[6].label.has_value());
}

TEST_CASE("monitor patterns with variables only warn")
{
    const auto ds = validate(model("model m ; grid 1 , 1 ; cell <*> {s} \\e ; monitor p ({c} $x | $X) ;"));
    REQUIRE(ds.size() == 1);
    CHECK_FALSE(ds[0].is_error());
}

TEST_CASE("ground emission")
{
    const auto m = compile(model(slurp(std::string(CWC_SOURCE_DIR) + "/tests/golden/nitrate_source.cwc")));
    const std::string text = emit_ground_model(m);
    CHECK(text == slurp(std::string(CWC_SOURCE_DIR) + "/tests/golden/nitrate_source.ground"));
    CHECK(emit_ground_model(m) == text);
    std::size_t rules = 0;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("rule ", 0) == 0) {
            ++rules;
            CHECK(line.find("1,") != std::string::npos);
        }
    }
    CHECK(rules == 4);

    const auto empty = compile(model("model e ; grid 1 , 1 ; cell <*> {s} a ;"));
    CHECK(emit_ground_model(empty) == "cwc-ground v1\nmodel e\ngrid 1,1\ninitial ({s} 1,1 | a)\n");
}
