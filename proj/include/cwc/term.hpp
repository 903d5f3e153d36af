#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cwc/multiset.hpp"

namespace cwc {

struct Atom {
    std::string name;

    friend auto operator<=>(const Atom&, const Atom&) = default;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Compartment type. The root of every system carries the reserved label
/// `top`; spatial labels are ordinary names that happen to sit on compartments
/// carrying a coordinate.
struct Label {
    std::string name;

    [[nodiscard]] bool is_top() const { return name == kTopName; }
    static Label top() { return Label{std::string(kTopName)}; }

    static constexpr std::string_view kTopName = "top";

    friend auto operator<=>(const Label&, const Label&) = default;
    friend bool operator==(const Label&, const Label&) = default;
};

/// Grid position, 1-based.
struct Coordinate {
    int row = 1;
    int col = 1;

    friend auto operator<=>(const Coordinate&, const Coordinate&) = default;
    friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

/// Membrane of a compartment: a multiset of atoms plus at most one coordinate.
struct Wrap {
    Multiset<Atom> atoms;
    std::optional<Coordinate> coord;

    [[nodiscard]] bool empty() const { return atoms.empty() && !coord; }

    friend auto operator<=>(const Wrap&, const Wrap&) = default;
    friend bool operator==(const Wrap&, const Wrap&) = default;
};

struct Compartment;

/// A CWC term: a multiset of simple terms. Atoms and compartments are held in
/// two canonical multisets; in the total order on simple terms every atom
/// precedes every compartment.
struct Term {
    Multiset<Atom> atoms;
    Multiset<Compartment> compartments;

    [[nodiscard]] bool empty() const { return atoms.empty() && compartments.empty(); }
    /// Total number of top-level occurrences (atoms and compartments).
    [[nodiscard]] std::uint64_t size() const;

    void add(const Term& other);

    friend std::strong_ordering operator<=>(const Term& a, const Term& b);
    friend bool operator==(const Term& a, const Term& b);
};

struct Compartment {
    Label label;
    Wrap wrap;
    Term content;

    friend std::strong_ordering operator<=>(const Compartment& a, const Compartment& b);
    friend bool operator==(const Compartment& a, const Compartment& b);
};

[[nodiscard]] std::uint64_t multiplicity(const Term& t, const Atom& a);
[[nodiscard]] std::uint64_t multiplicity(const Term& t, const Compartment& c);

/// Order-insensitive structural equality at every nesting level.
[[nodiscard]] bool terms_equal(const Term& a, const Term& b);

/// Canonical text: `\e` for the empty term, `n x` for repetitions,
/// `({label} wrap | content)` for compartments, coordinates as `r,c`.
[[nodiscard]] std::string render_term(const Term& t);
[[nodiscard]] std::string render_wrap(const Wrap& w);
[[nodiscard]] std::string render_coordinate(const Coordinate& c);

/// Locates the spatial compartment at `c` among the top-level compartments of
/// `system`; returns nullptr if none.
[[nodiscard]] const Compartment* find_cell(const Term& system, const Coordinate& c);

/// Counts `label`-compartments at any depth (the root is not included).
[[nodiscard]] std::uint64_t count_compartments(const Term& t, const Label& label);

} // namespace cwc
