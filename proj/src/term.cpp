#include "cwc/term.hpp"

namespace cwc {

std::strong_ordering operator<=>(const Term& a, const Term& b)
{
    if (auto c = a.atoms <=> b.atoms; c != 0) return c;
    return a.compartments <=> b.compartments;
}

bool operator==(const Term& a, const Term& b)
{
    return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Compartment& a, const Compartment& b)
{
    // Label and coordinate first: they are cheap and usually decide.
    if (auto c = a.label <=> b.label; c != 0) return c;
    if (auto c = a.wrap.coord <=> b.wrap.coord; c != 0) return c;
    if (auto c = a.wrap.atoms <=> b.wrap.atoms; c != 0) return c;
    return a.content <=> b.content;
}

bool operator==(const Compartment& a, const Compartment& b)
{
    return (a <=> b) == 0;
}

std::uint64_t Term::size() const
{
    return atoms.size() + compartments.size();
}

void Term::add(const Term& other)
{
    atoms.add(other.atoms);
    compartments.add(other.compartments);
}

std::uint64_t multiplicity(const Term& t, const Atom& a)
{
    return t.atoms.count(a);
}

std::uint64_t multiplicity(const Term& t, const Compartment& c)
{
    return t.compartments.count(c);
}

bool terms_equal(const Term& a, const Term& b)
{
    return a == b;
}

std::string render_coordinate(const Coordinate& c)
{
    return std::to_string(c.row) + "," + std::to_string(c.col);
}

namespace {

void append_repeated(std::string& out, std::uint64_t count, const std::string& item)
{
    if (!out.empty()) out += ' ';
    if (count != 1) {
        out += std::to_string(count);
        out += ' ';
    }
    out += item;
}

std::string render_atoms(const Multiset<Atom>& atoms)
{
    std::string out;
    for (const auto& e : atoms) append_repeated(out, e.count, e.value.name);
    return out;
}

std::string render_compartment(const Compartment& c)
{
    std::string out = "({" + c.label.name + "}";
    if (!c.wrap.empty()) out += " " + render_wrap(c.wrap);
    out += " | " + render_term(c.content) + ")";
    return out;
}

} // namespace

std::string render_wrap(const Wrap& w)
{
    std::string out;
    if (w.coord) out = render_coordinate(*w.coord);
    const std::string atoms = render_atoms(w.atoms);
    if (!atoms.empty()) {
        if (!out.empty()) out += ' ';
        out += atoms;
    }
    return out.empty() ? "\\e" : out;
}

std::string render_term(const Term& t)
{
    if (t.empty()) return "\\e";
    std::string out = render_atoms(t.atoms);
    for (const auto& e : t.compartments) append_repeated(out, e.count, render_compartment(e.value));
    return out;
}

const Compartment* find_cell(const Term& system, const Coordinate& c)
{
    for (const auto& e : system.compartments) {
        if (e.value.wrap.coord == c) return &e.value;
    }
    return nullptr;
}

std::uint64_t count_compartments(const Term& t, const Label& label)
{
    std::uint64_t n = 0;
    for (const auto& e : t.compartments) {
        if (e.value.label == label) n += e.count;
        n += e.count * count_compartments(e.value.content, label);
    }
    return n;
}

} // namespace cwc
