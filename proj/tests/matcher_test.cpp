#include "doctest.h"

#include <set>

#include "cwc/matcher.hpp"
#include "cwc/surface.hpp"
#include "oracle.hpp"

using namespace cwc;

namespace {

RewriteRule rule(const std::string& label, const std::string& p, double k, const std::string& o)
{
    return RewriteRule{Label{label}, parse_pattern(p), parse_open_term(o), k};
}

// The pattern read as an open term: what sigma(p) rebuilds.
OpenTerm as_open(const Pattern& p)
{
    OpenTerm o;
    o.atoms = p.atoms;
    for (const auto& e : p.compartments) {
        OpenCompartment c;
        c.label = e.value.label;
        c.wrap = e.value.wrap;
        c.wrap_vars.add(e.value.wrap_var);
        c.content = as_open(e.value.content);
        c.content.vars.add(e.value.content_var);
        o.compartments.add(c, e.count);
    }
    return o;
}

Term minus(Term t, const Term& u)
{
    for (const auto& e : u.atoms) t.atoms.remove(e.value, e.count);
    for (const auto& e : u.compartments) t.compartments.remove(e.value, e.count);
    return t;
}

} // namespace

TEST_CASE("counting anchors")
{
    CHECK(count_matches(parse_pattern("a b"), parse_term("a a b b")) == 4);
    CHECK(enumerate_matches(parse_pattern("a b"), parse_term("a a b b")).size() == 4);
    CHECK(count_matches(parse_pattern("a"), Term{}) == 0);
    CHECK(count_matches(parse_pattern("2 Tip"), parse_term("5 Tip")) == 10);
    CHECK(count_matches(Pattern{}, parse_term("a b")) == 1);
    CHECK(count_matches(Pattern{}, Term{}) == 1);
}

TEST_CASE("compartment pattern binds wrap and content remainders")
{
    const auto ms = enumerate_matches(parse_pattern("({l1} a $x | $X)"), parse_term("({l1} a b | c)"));
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].subst.wraps.at("x") == Wrap{parse_term("b").atoms, std::nullopt});
    CHECK(ms[0].subst.contents.at("X") == parse_term("c"));
}

TEST_CASE("a wrap variable absorbs an unmatched coordinate")
{
    const auto ms = enumerate_matches(parse_pattern("({soil} $x | Tip $X)"), parse_term("({soil} 1,3 | 2 Tip)"));
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].subst.wraps.at("x").coord == Coordinate{1, 3});
    CHECK(count_matches(parse_pattern("({soil} 1,2 $x | Tip $X)"), parse_term("({soil} 1,3 | 2 Tip)")) == 0);
    CHECK(count_matches(parse_pattern("({soil} 1,3 $x | Tip $X)"), parse_term("({soil} 1,3 | 2 Tip)")) == 2);
}

TEST_CASE("identical compartment patterns are counted as combinations")
{
    // two slots over three identical occurrences: C(3,2)
    CHECK(count_matches(parse_pattern("({l} $x | $X) ({l} $y | $Y)"), parse_term("3 ({l} | a)")) == 3);
    // one slot needs an a, the other anything: ordered pairs minus nothing
    CHECK(count_matches(parse_pattern("({l} $x | a $X) ({l} $y | $Y)"), parse_term("({l} | a) ({l} | b)")) == 1);
}

TEST_CASE("non-linear patterns are rejected")
{
    Pattern p = parse_pattern("({l} $x | $X)");
    CompartmentPattern dup = p.compartments[0].value;
    dup.label = Label{"m"};
    p.compartments.add(dup);
    CHECK_THROWS_AS((void)count_matches(p, parse_term("({l} | a) ({m} | a)")), MatchError);
    CHECK_THROWS_AS((void)enumerate_matches(p, Term{}), MatchError);
}

TEST_CASE("count equals brute-force occurrence enumeration")
{
    oracle::TermGen gen(99);
    int nonzero = 0;
    for (int i = 0; i < 400; ++i) {
        const Term t = gen.term(10, 3, i % 2 == 0);
        const Term skel = gen.chance(0.8) ? gen.sub(t) : gen.term(4, 2);
        const Pattern p = oracle::to_pattern(skel);
        const std::uint64_t expected = oracle::brute_count(skel, t);
        const std::uint64_t got = count_matches(p, t);
        CHECK_MESSAGE(got == expected, render_pattern(p), " in ", render_term(t));
        if (got > 0) ++nonzero;
    }
    CHECK(nonzero > 200);
}

TEST_CASE("enumeration agrees with count and indexed access")
{
    oracle::TermGen gen(5);
    for (int i = 0; i < 150; ++i) {
        const Term t = gen.term(8, 3, true);
        const Pattern p = oracle::to_pattern(gen.sub(t));
        const auto all = enumerate_matches(p, t);
        REQUIRE(all.size() == count_matches(p, t));
        for (std::size_t k = 0; k < all.size(); ++k) CHECK(match_at(p, t, k) == all[k]);
        for (std::size_t a = 0; a < all.size(); ++a) {
            for (std::size_t b = a + 1; b < all.size(); ++b) CHECK_FALSE(all[a] == all[b]);
        }
        CHECK(enumerate_matches(p, t) == all);
    }
}

TEST_CASE("atom-only patterns follow the binomial law")
{
    oracle::TermGen gen(11);
    for (int i = 0; i < 200; ++i) {
        Term t;
        Pattern p;
        for (const char* a : {"a", "b", "c"}) {
            const auto n = static_cast<std::uint64_t>(gen.pick(7));
            const auto m = static_cast<std::uint64_t>(gen.pick(4));
            if (n) t.atoms.add(Atom{a}, n);
            if (m) p.atoms.add(Atom{a}, m);
        }
        std::uint64_t law = 1;
        for (const auto& e : p.atoms) law *= binomial(multiplicity(t, e.value), e.count);
        CHECK(count_matches(p, t) == law);
        CHECK(enumerate_matches(p, t).size() == law);
    }
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(2, 3) == 0);
    CHECK(binomial(64, 32) == 1832624140942590534ull);
    CHECK_THROWS_AS((void)binomial(200, 100), std::overflow_error);
}

TEST_CASE("instantiate")
{
    Substitution s;
    s.wraps["x"] = Wrap{};
    s.contents["X"] = parse_term("d");
    CHECK(instantiate(parse_open_term("({l2} a $x | $X)"), s) == parse_term("({l2} a | d)"));
    CHECK(instantiate(parse_open_term("c"), s) == parse_term("c"));
    Substitution ab;
    ab.contents["X"] = parse_term("a b");
    CHECK(instantiate(parse_open_term("$X"), ab) == parse_term("a b"));
    CHECK_THROWS_AS((void)instantiate(parse_open_term("$Y"), ab), MatchError);
}

TEST_CASE("collect_sites")
{
    const std::vector<RewriteRule> rules{rule("l", "a b", 1.0, "c")};
    const auto sites = collect_sites(rules, parse_term("({l} | a b) ({l} | a b)"));
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].count == 1);
    CHECK(sites[1].count == 1);
    CHECK(sites[0].path != sites[1].path);

    const std::vector<RewriteRule> root{rule("top", "a", 1.0, "\\e")};
    const auto at_root = collect_sites(root, parse_term("3 a"));
    REQUIRE(at_root.size() == 1);
    CHECK(at_root[0].path.empty());
    CHECK(at_root[0].count == 3);

    CHECK(collect_sites(rules, parse_term("({m} | a b)")).empty());

    // nested sites are visited in pre-order
    const auto nested = collect_sites(rules, parse_term("({l} | a b ({l} | a b))"));
    REQUIRE(nested.size() == 2);
    CHECK(nested[0].path.size() == 1);
    CHECK(nested[1].path.size() == 2);
}

TEST_CASE("apply_rewrite")
{
    const RewriteRule r = rule("l", "a b", 2.0, "c");
    const Term sys = parse_term("({l} | a a b b)");
    const auto sites = collect_sites(std::span(&r, 1), sys);
    REQUIRE(sites.size() == 1);
    const Match m = match_at(r.pattern, content_at(sys, sites[0].path), 3);
    CHECK(apply_rewrite(sys, r, sites[0].path, m) == parse_term("({l} | a b c)"));

    const RewriteRule relabel = rule("l", "({l1} a $x | $X)", 1.0, "({l2} a $x | $X)");
    const Term nested = parse_term("({l} | ({l1} a w | q r))");
    const auto s2 = collect_sites(std::span(&relabel, 1), nested);
    REQUIRE(s2.size() == 1);
    const Match m2 = match_at(relabel.pattern, content_at(nested, s2[0].path), 0);
    CHECK(apply_rewrite(nested, relabel, s2[0].path, m2) == parse_term("({l} | ({l2} a w | q r))"));

    const RewriteRule same = rule("top", "a ({l} $x | $X)", 1.0, "a ({l} $x | $X)");
    const Term t = parse_term("a b ({l} k | z)");
    const Match m3 = match_at(same.pattern, t, 0);
    CHECK(terms_equal(apply_rewrite(t, same, {}, m3), t));

    // stale match
    CHECK_THROWS_AS((void)apply_rewrite(parse_term("({l} | a)"), r, sites[0].path, m), MatchError);
}

TEST_CASE("rewrites are local to the site")
{
    oracle::TermGen gen(31);
    int applied = 0;
    for (int i = 0; i < 300; ++i) {
        const Term sys = gen.term(8, 3, true);
        const Pattern p = oracle::to_pattern(gen.sub(sys));
        OpenTerm o = as_open(p);
        o.atoms.add(Atom{"z"});
        const RewriteRule r{Label::top(), p, o, 1.0};
        const std::uint64_t n = count_matches(p, sys);
        if (n == 0) continue;
        const Match m = match_at(p, sys, static_cast<std::uint64_t>(gen.pick(static_cast<int>(std::min<std::uint64_t>(n, 1000)))));
        const Term consumed = instantiate(as_open(p), m.subst);
        const Term after = apply_rewrite(sys, r, {}, m);
        Term expected = minus(sys, consumed);
        expected.add(instantiate(o, m.subst));
        CHECK(after == expected);
        ++applied;
    }
    CHECK(applied > 150);
}

TEST_CASE("rewrites inside nested sites leave the outside untouched")
{
    const RewriteRule r = rule("m", "a", 1.0, "b");
    const Term sys = parse_term("x ({l} q | y ({m} | a a)) ({l} q | y ({m} | a a))");
    const auto sites = collect_sites(std::span(&r, 1), sys);
    REQUIRE(sites.size() == 2);
    const Match m = match_at(r.pattern, content_at(sys, sites[1].path), 1);
    CHECK(apply_rewrite(sys, r, sites[1].path, m) == parse_term("x ({l} q | y ({m} | a a)) ({l} q | y ({m} | a b))"));
}
