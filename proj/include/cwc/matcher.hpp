#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cwc/pattern.hpp"

namespace cwc {

/// Selected occurrences of one atom species, as ascending copy indices.
struct AtomPick {
    Atom atom;
    std::vector<std::uint64_t> copies;

    friend bool operator==(const AtomPick&, const AtomPick&) = default;
};

struct CompartmentPick;

/// One way of matching a pattern against a content multiset. Two matches
/// differ iff they consume different occurrences or bind nested variables
/// differently. `subst` holds the bindings of every variable of the pattern,
/// nested ones included; the implicit top-level remainder is not bound.
struct Match {
    std::vector<AtomPick> atoms;
    std::vector<CompartmentPick> compartments;
    Substitution subst;

    friend bool operator==(const Match& a, const Match& b);
};

struct CompartmentPick {
    std::size_t entry = 0;    ///< index into content.compartments
    std::uint64_t copy = 0;   ///< which of the identical copies
    std::vector<AtomPick> wrap;
    Match content;

    friend bool operator==(const CompartmentPick&, const CompartmentPick&) = default;
};

class MatchError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// All matches of `p` against `content` in canonical order.
/// Throws MatchError if `p` is not linear.
[[nodiscard]] std::vector<Match> enumerate_matches(const Pattern& p, const Term& content);

/// Number of matches; equals enumerate_matches(p, content).size() without
/// materialising them. Throws MatchError if `p` is not linear, and
/// std::overflow_error if the count does not fit in 64 bits.
[[nodiscard]] std::uint64_t count_matches(const Pattern& p, const Term& content);

/// The index-th match of the canonical enumeration, computed directly.
[[nodiscard]] Match match_at(const Pattern& p, const Term& content, std::uint64_t index);

/// Ground instance of an open term. Throws MatchError on an unbound variable
/// or when a wrap would receive two coordinates.
[[nodiscard]] Term instantiate(const OpenTerm& o, const Substitution& sigma);

/// Step into the `copy`-th copy of compartment entry `entry`.
struct PathStep {
    std::size_t entry = 0;
    std::uint64_t copy = 0;

    friend auto operator<=>(const PathStep&, const PathStep&) = default;
    friend bool operator==(const PathStep&, const PathStep&) = default;
};

/// Compartment path from the root; empty means the root (label `top`).
using SitePath = std::vector<PathStep>;

struct Site {
    std::size_t rule = 0;
    SitePath path;
    std::uint64_t count = 0;
};

/// Every (rule, compartment occurrence) pair with a positive match count,
/// ordered by rule index then pre-order over the system. Rules are assumed
/// validated (linear); `system` is the content of the root compartment.
[[nodiscard]] std::vector<Site> collect_sites(std::span<const RewriteRule> rules, const Term& system);

/// Content of the compartment occurrence addressed by `path`.
[[nodiscard]] const Term& content_at(const Term& system, const SitePath& path);

/// Removes the occurrences consumed by `m` at `path` and adds
/// instantiate(rule.result, m.subst). Throws MatchError on a stale match.
[[nodiscard]] Term apply_rewrite(const Term& system, const RewriteRule& rule, const SitePath& path, const Match& m);
void apply_rewrite_in_place(Term& system, const RewriteRule& rule, const SitePath& path, const Match& m);

namespace detail {
// Unchecked variants for already validated patterns.
std::uint64_t count_matches(const Pattern& p, const Term& content);
Match match_at(const Pattern& p, const Term& content, std::uint64_t index);
} // namespace detail

/// Binomial coefficient; throws std::overflow_error beyond 64 bits.
[[nodiscard]] std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

} // namespace cwc
