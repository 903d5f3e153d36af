#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cwc/term.hpp"

namespace cwc {

/// Wrap variables bind atom multisets (plus a coordinate if one is left on
/// the wrap); content variables bind terms. The sort is fixed by position.
struct Var {
    std::string name;

    friend auto operator<=>(const Var&, const Var&) = default;
    friend bool operator==(const Var&, const Var&) = default;
};

enum class VarSort { Wrap, Content };

struct CompartmentPattern;

/// Left-hand side of a rule. The top level has an implicit remainder
/// variable that is never written and never bound in a Substitution.
struct Pattern {
    Multiset<Atom> atoms;
    Multiset<CompartmentPattern> compartments;

    [[nodiscard]] bool empty() const { return atoms.empty() && compartments.empty(); }

    friend std::strong_ordering operator<=>(const Pattern& a, const Pattern& b);
    friend bool operator==(const Pattern& a, const Pattern& b);
};

/// `({label} wrap $x | content $X)`: `wrap` holds the atoms (and optional
/// coordinate) that must be present; the wrap variable takes the rest.
struct CompartmentPattern {
    Label label;
    Wrap wrap;
    Var wrap_var;
    Pattern content;
    Var content_var;

    friend std::strong_ordering operator<=>(const CompartmentPattern& a, const CompartmentPattern& b);
    friend bool operator==(const CompartmentPattern& a, const CompartmentPattern& b);
};

/// Structural order that ignores variable names. Patterns equal under this
/// order are interchangeable slots for counting purposes.
[[nodiscard]] std::strong_ordering shape_compare(const CompartmentPattern& a, const CompartmentPattern& b);
[[nodiscard]] std::strong_ordering shape_compare(const Pattern& a, const Pattern& b);

struct OpenCompartment;

/// Right-hand side of a rule.
struct OpenTerm {
    Multiset<Atom> atoms;
    Multiset<OpenCompartment> compartments;
    Multiset<Var> vars;

    [[nodiscard]] bool empty() const { return atoms.empty() && compartments.empty() && vars.empty(); }

    friend std::strong_ordering operator<=>(const OpenTerm& a, const OpenTerm& b);
    friend bool operator==(const OpenTerm& a, const OpenTerm& b);
};

struct OpenCompartment {
    Label label;
    Wrap wrap;
    Multiset<Var> wrap_vars;
    OpenTerm content;

    friend std::strong_ordering operator<=>(const OpenCompartment& a, const OpenCompartment& b);
    friend bool operator==(const OpenCompartment& a, const OpenCompartment& b);
};

struct Substitution {
    std::map<std::string, Wrap> wraps;
    std::map<std::string, Term> contents;

    friend bool operator==(const Substitution&, const Substitution&) = default;
};

/// Ground stochastic rule `label: pattern [rate] result`.
struct RewriteRule {
    Label label;
    Pattern pattern;
    OpenTerm result;
    double rate = 0.0;
};

struct VarOccurrence {
    std::string name;
    VarSort sort;
};

/// Variables in traversal order, with repetitions.
[[nodiscard]] std::vector<VarOccurrence> pattern_vars(const Pattern& p);
[[nodiscard]] std::vector<VarOccurrence> open_term_vars(const OpenTerm& o);

/// Linearity: every variable name occurs once in the pattern.
/// Returns human-readable problems; empty means linear.
[[nodiscard]] std::vector<std::string> check_linear(const Pattern& p);

/// Every variable of the result occurs in the pattern with the same sort.
[[nodiscard]] std::vector<std::string> check_rule_vars(const Pattern& p, const OpenTerm& o);

/// True if any compartment nested in the term carries a coordinate.
[[nodiscard]] bool mentions_coordinate(const Term& t);

[[nodiscard]] std::string render_pattern(const Pattern& p);
[[nodiscard]] std::string render_open_term(const OpenTerm& o);
[[nodiscard]] std::string render_rule(const RewriteRule& r);

/// Shortest decimal that parses back to the same double.
[[nodiscard]] std::string format_real(double v);

} // namespace cwc
