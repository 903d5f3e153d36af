#include "cwc/pattern.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace cwc {

namespace {

struct ShapeRun {
    const CompartmentPattern* pattern;
    std::uint64_t count;
};

std::vector<ShapeRun> shape_runs(const Pattern& p)
{
    std::vector<ShapeRun> runs;
    for (const auto& e : p.compartments) {
        if (!runs.empty() && shape_compare(*runs.back().pattern, e.value) == 0) {
            runs.back().count += e.count;
        } else {
            runs.push_back({&e.value, e.count});
        }
    }
    return runs;
}

} // namespace

std::strong_ordering shape_compare(const CompartmentPattern& a, const CompartmentPattern& b)
{
    if (auto c = a.label <=> b.label; c != 0) return c;
    if (auto c = a.wrap <=> b.wrap; c != 0) return c;
    return shape_compare(a.content, b.content);
}

std::strong_ordering shape_compare(const Pattern& a, const Pattern& b)
{
    if (auto c = a.atoms <=> b.atoms; c != 0) return c;
    const auto ra = shape_runs(a);
    const auto rb = shape_runs(b);
    const std::size_t n = std::min(ra.size(), rb.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = shape_compare(*ra[i].pattern, *rb[i].pattern); c != 0) return c;
        if (auto c = ra[i].count <=> rb[i].count; c != 0) return c;
    }
    return ra.size() <=> rb.size();
}

std::strong_ordering operator<=>(const CompartmentPattern& a, const CompartmentPattern& b)
{
    if (auto c = shape_compare(a, b); c != 0) return c;
    if (auto c = a.wrap_var <=> b.wrap_var; c != 0) return c;
    if (auto c = a.content_var <=> b.content_var; c != 0) return c;
    return a.content <=> b.content;
}

bool operator==(const CompartmentPattern& a, const CompartmentPattern& b)
{
    return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Pattern& a, const Pattern& b)
{
    if (auto c = a.atoms <=> b.atoms; c != 0) return c;
    return a.compartments <=> b.compartments;
}

bool operator==(const Pattern& a, const Pattern& b)
{
    return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const OpenTerm& a, const OpenTerm& b)
{
    if (auto c = a.atoms <=> b.atoms; c != 0) return c;
    if (auto c = a.compartments <=> b.compartments; c != 0) return c;
    return a.vars <=> b.vars;
}

bool operator==(const OpenTerm& a, const OpenTerm& b)
{
    return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const OpenCompartment& a, const OpenCompartment& b)
{
    if (auto c = a.label <=> b.label; c != 0) return c;
    if (auto c = a.wrap <=> b.wrap; c != 0) return c;
    if (auto c = a.wrap_vars <=> b.wrap_vars; c != 0) return c;
    return a.content <=> b.content;
}

bool operator==(const OpenCompartment& a, const OpenCompartment& b)
{
    return (a <=> b) == 0;
}

namespace {

void collect_vars(const Pattern& p, std::vector<VarOccurrence>& out)
{
    for (const auto& e : p.compartments) {
        for (std::uint64_t i = 0; i < e.count; ++i) {
            out.push_back({e.value.wrap_var.name, VarSort::Wrap});
            collect_vars(e.value.content, out);
            out.push_back({e.value.content_var.name, VarSort::Content});
        }
    }
}

void collect_vars(const OpenTerm& o, std::vector<VarOccurrence>& out)
{
    for (const auto& e : o.compartments) {
        for (std::uint64_t i = 0; i < e.count; ++i) {
            for (const auto& v : e.value.wrap_vars) {
                for (std::uint64_t k = 0; k < v.count; ++k) out.push_back({v.value.name, VarSort::Wrap});
            }
            collect_vars(e.value.content, out);
        }
    }
    for (const auto& v : o.vars) {
        for (std::uint64_t k = 0; k < v.count; ++k) out.push_back({v.value.name, VarSort::Content});
    }
}

} // namespace

std::vector<VarOccurrence> pattern_vars(const Pattern& p)
{
    std::vector<VarOccurrence> out;
    collect_vars(p, out);
    return out;
}

std::vector<VarOccurrence> open_term_vars(const OpenTerm& o)
{
    std::vector<VarOccurrence> out;
    collect_vars(o, out);
    return out;
}

std::vector<std::string> check_linear(const Pattern& p)
{
    std::vector<std::string> problems;
    std::set<std::string> seen;
    for (const auto& v : pattern_vars(p)) {
        if (!seen.insert(v.name).second) {
            problems.push_back("variable $" + v.name + " occurs more than once in the pattern");
        }
    }
    return problems;
}

std::vector<std::string> check_rule_vars(const Pattern& p, const OpenTerm& o)
{
    std::map<std::string, VarSort> bound;
    for (const auto& v : pattern_vars(p)) bound.emplace(v.name, v.sort);
    std::vector<std::string> problems;
    for (const auto& v : open_term_vars(o)) {
        auto it = bound.find(v.name);
        if (it == bound.end()) {
            problems.push_back("variable $" + v.name + " in the result does not occur in the pattern");
        } else if (it->second != v.sort) {
            problems.push_back("variable $" + v.name + " is used as both a wrap and a content variable");
        }
    }
    return problems;
}

bool mentions_coordinate(const Term& t)
{
    for (const auto& e : t.compartments) {
        if (e.value.wrap.coord || mentions_coordinate(e.value.content)) return true;
    }
    return false;
}

namespace {

void append_item(std::string& out, std::uint64_t count, const std::string& item)
{
    if (!out.empty()) out += ' ';
    if (count != 1) {
        out += std::to_string(count);
        out += ' ';
    }
    out += item;
}

std::string wrap_items(const Wrap& w)
{
    return w.empty() ? std::string{} : render_wrap(w);
}

std::string join_nonempty(std::string a, const std::string& b)
{
    if (b.empty()) return a;
    if (!a.empty()) a += ' ';
    return a + b;
}

std::string pattern_items(const Pattern& p);

std::string render_compartment_pattern(const CompartmentPattern& c)
{
    std::string wrap = join_nonempty(wrap_items(c.wrap), "$" + c.wrap_var.name);
    std::string content = join_nonempty(pattern_items(c.content), "$" + c.content_var.name);
    return "({" + c.label.name + "} " + wrap + " | " + content + ")";
}

std::string pattern_items(const Pattern& p)
{
    std::string out;
    for (const auto& e : p.atoms) append_item(out, e.count, e.value.name);
    for (const auto& e : p.compartments) append_item(out, e.count, render_compartment_pattern(e.value));
    return out;
}

std::string open_items(const OpenTerm& o);

std::string render_open_compartment(const OpenCompartment& c)
{
    std::string wrap = wrap_items(c.wrap);
    for (const auto& v : c.wrap_vars) append_item(wrap, v.count, "$" + v.value.name);
    std::string content = open_items(c.content);
    std::string out = "({" + c.label.name + "}";
    if (!wrap.empty()) out += " " + wrap;
    return out + " | " + (content.empty() ? "\\e" : content) + ")";
}

std::string open_items(const OpenTerm& o)
{
    std::string out;
    for (const auto& e : o.atoms) append_item(out, e.count, e.value.name);
    for (const auto& e : o.compartments) append_item(out, e.count, render_open_compartment(e.value));
    for (const auto& v : o.vars) append_item(out, v.count, "$" + v.value.name);
    return out;
}

} // namespace

std::string render_pattern(const Pattern& p)
{
    std::string out = pattern_items(p);
    return out.empty() ? "\\e" : out;
}

std::string render_open_term(const OpenTerm& o)
{
    std::string out = open_items(o);
    return out.empty() ? "\\e" : out;
}

std::string format_real(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

std::string render_rule(const RewriteRule& r)
{
    return "{" + r.label.name + "} " + render_pattern(r.pattern) + " [" + format_real(r.rate) + "] "
        + render_open_term(r.result);
}

} // namespace cwc
