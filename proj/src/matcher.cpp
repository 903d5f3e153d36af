#include "cwc/matcher.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>

namespace cwc {

using u64 = std::uint64_t;

namespace {

u64 checked_mul(u64 a, u64 b)
{
    const unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    if (r > std::numeric_limits<u64>::max()) throw std::overflow_error("match count exceeds 64 bits");
    return static_cast<u64>(r);
}

u64 checked_add(u64 a, u64 b)
{
    if (a > std::numeric_limits<u64>::max() - b) throw std::overflow_error("match count exceeds 64 bits");
    return a + b;
}

u64 checked_pow(u64 base, u64 exp)
{
    u64 r = 1;
    for (u64 i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

} // namespace

u64 binomial(u64 n, u64 k)
{
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (u64 i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<u64>::max()) throw std::overflow_error("binomial exceeds 64 bits");
    }
    return static_cast<u64>(r);
}

bool operator==(const Match& a, const Match& b)
{
    return a.atoms == b.atoms && a.compartments == b.compartments && a.subst == b.subst;
}

namespace {

// ---------------------------------------------------------------------------
// k-subsets of {0..n-1} in lexicographic order

std::vector<u64> unrank_subset(u64 n, u64 k, u64 rank)
{
    std::vector<u64> out;
    out.reserve(k);
    u64 v = 0;
    for (u64 i = 0; i < k; ++i) {
        for (;; ++v) {
            const u64 rest = binomial(n - v - 1, k - i - 1);
            if (rank < rest) break;
            rank -= rest;
        }
        out.push_back(v++);
    }
    return out;
}

void for_each_subset(u64 n, u64 k, const std::function<void(const std::vector<u64>&)>& fn)
{
    std::vector<u64> cur;
    std::function<void(u64)> rec = [&](u64 from) {
        if (cur.size() == k) {
            fn(cur);
            return;
        }
        const u64 left = k - cur.size();
        for (u64 v = from; v + left <= n; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

// ---------------------------------------------------------------------------
// Atom selections. Species in canonical order, the first one most significant.

struct AtomDemand {
    const Atom* atom;
    u64 need;
    u64 have;
};

std::optional<std::vector<AtomDemand>> atom_demands(const Multiset<Atom>& required, const Multiset<Atom>& available)
{
    std::vector<AtomDemand> out;
    out.reserve(required.distinct());
    for (const auto& e : required) {
        const u64 have = available.count(e.value);
        if (have < e.count) return std::nullopt;
        out.push_back({&e.value, e.count, have});
    }
    return out;
}

u64 count_atoms(const Multiset<Atom>& required, const Multiset<Atom>& available)
{
    u64 total = 1;
    for (const auto& e : required) {
        const u64 have = available.count(e.value);
        if (have < e.count) return 0;
        total = checked_mul(total, binomial(have, e.count));
    }
    return total;
}

std::vector<AtomPick> atoms_at(const std::vector<AtomDemand>& demands, u64 rank)
{
    std::vector<u64> radix(demands.size());
    for (std::size_t i = 0; i < demands.size(); ++i) radix[i] = binomial(demands[i].have, demands[i].need);
    std::vector<AtomPick> out(demands.size());
    for (std::size_t i = demands.size(); i-- > 0;) {
        const u64 digit = rank % radix[i];
        rank /= radix[i];
        out[i] = AtomPick{*demands[i].atom, unrank_subset(demands[i].have, demands[i].need, digit)};
    }
    return out;
}

void for_each_atoms(const std::vector<AtomDemand>& demands, const std::function<void(const std::vector<AtomPick>&)>& fn)
{
    std::vector<AtomPick> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == demands.size()) {
            fn(cur);
            return;
        }
        for_each_subset(demands[i].have, demands[i].need, [&](const std::vector<u64>& s) {
            cur.push_back(AtomPick{*demands[i].atom, s});
            rec(i + 1);
            cur.pop_back();
        });
    };
    rec(0);
}

// ---------------------------------------------------------------------------
// Single compartment pattern against a single compartment.

u64 count_impl(const Pattern& p, const Term& content);
Match match_at_impl(const Pattern& p, const Term& content, u64 index);
void enumerate_impl(const Pattern& p, const Term& content, const std::function<void(Match&&)>& fn);

bool header_matches(const CompartmentPattern& p, const Compartment& c)
{
    if (p.label != c.label) return false;
    if (p.wrap.coord && p.wrap.coord != c.wrap.coord) return false;
    return true;
}

u64 inner_count(const CompartmentPattern& p, const Compartment& c)
{
    if (!header_matches(p, c)) return 0;
    const u64 wrap = count_atoms(p.wrap.atoms, c.wrap.atoms);
    if (wrap == 0) return 0;
    return checked_mul(wrap, count_impl(p.content, c.content));
}

Term remainder(const Term& content, const Match& m)
{
    Term rest = content;
    for (const auto& a : m.atoms) rest.atoms.remove(a.atom, a.copies.size());
    for (const auto& cp : m.compartments) rest.compartments.remove(content.compartments[cp.entry].value, 1);
    return rest;
}

CompartmentPick make_pick(std::size_t entry, u64 copy, std::vector<AtomPick> wrap, Match content)
{
    CompartmentPick pick;
    pick.entry = entry;
    pick.copy = copy;
    pick.wrap = std::move(wrap);
    pick.content = std::move(content);
    return pick;
}

void bind_pick(Substitution& sigma, const CompartmentPattern& p, const Compartment& c, const CompartmentPick& pick)
{
    Wrap left;
    left.atoms = c.wrap.atoms;
    for (const auto& a : pick.wrap) left.atoms.remove(a.atom, a.copies.size());
    if (!p.wrap.coord) left.coord = c.wrap.coord;
    sigma.wraps[p.wrap_var.name] = std::move(left);
    sigma.contents[p.content_var.name] = remainder(c.content, pick.content);
    for (const auto& [k, v] : pick.content.subst.wraps) sigma.wraps[k] = v;
    for (const auto& [k, v] : pick.content.subst.contents) sigma.contents[k] = v;
}

CompartmentPick inner_at(const CompartmentPattern& p, const Compartment& c, std::size_t entry, u64 copy, u64 index)
{
    const u64 content_count = count_impl(p.content, c.content);
    auto demands = atom_demands(p.wrap.atoms, c.wrap.atoms);
    if (!demands || content_count == 0) throw MatchError("match index out of range");
    auto wrap = atoms_at(*demands, index / content_count);
    return make_pick(entry, copy, std::move(wrap), match_at_impl(p.content, c.content, index % content_count));
}

void inner_enumerate(const CompartmentPattern& p, const Compartment& c, std::size_t entry, u64 copy,
                     const std::function<void(CompartmentPick&&)>& fn)
{
    if (!header_matches(p, c)) return;
    auto demands = atom_demands(p.wrap.atoms, c.wrap.atoms);
    if (!demands) return;
    for_each_atoms(*demands, [&](const std::vector<AtomPick>& wrap) {
        enumerate_impl(p.content, c.content, [&](Match&& inner) { fn(make_pick(entry, copy, wrap, std::move(inner))); });
    });
}

// ---------------------------------------------------------------------------
// Compartment part: slots grouped by shape; a group's slots take strictly
// increasing occurrences (entry, copy), so swapping interchangeable slots is
// never counted twice.

constexpr std::size_t kNoEntry = std::numeric_limits<std::size_t>::max();

class SlotPlan {
public:
    SlotPlan(const Pattern& p, const Term& content) : content_(content)
    {
        for (const auto& e : p.compartments) {
            if (groups_.empty() || shape_compare(*groups_.back().front(), e.value) != 0) groups_.emplace_back();
            for (u64 i = 0; i < e.count; ++i) groups_.back().push_back(&e.value);
        }
        const std::size_t n = content.compartments.distinct();
        weight_.assign(groups_.size(), std::vector<u64>(n, 0));
        cand_.resize(groups_.size());
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            for (std::size_t e = 0; e < n; ++e) {
                const u64 w = inner_count(*groups_[g].front(), content.compartments[e].value);
                weight_[g][e] = w;
                if (w > 0) cand_[g].push_back(e);
            }
        }
    }

    [[nodiscard]] u64 total() const
    {
        if (groups_.empty()) return 1;
        auto avail = initial_avail();
        return fill(0, groups_[0].size(), 0, kNoEntry, 0, avail);
    }

    [[nodiscard]] std::vector<CompartmentPick> at(u64 rank) const
    {
        std::vector<CompartmentPick> picks;
        auto avail = initial_avail();
        std::vector<std::pair<std::size_t, u64>> used;
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            const u64 m = groups_[g].size();
            std::optional<std::pair<std::size_t, u64>> prev;
            for (u64 s = 0; s < m; ++s) {
                bool found = false;
                for (std::size_t ci = 0; ci < cand_[g].size() && !found; ++ci) {
                    const std::size_t e = cand_[g][ci];
                    if (prev && e < prev->first) continue;
                    const u64 first_copy = (prev && prev->first == e) ? prev->second + 1 : 0;
                    for (u64 c = first_copy; c < content_.compartments[e].count; ++c) {
                        if (is_used(used, e, c)) continue;
                        used.emplace_back(e, c);
                        --avail[e];
                        const u64 after = fill(g, m - s - 1, ci, e, free_after(used, e, c), avail);
                        const u64 block = checked_mul(weight_[g][e], after);
                        if (rank < block) {
                            const u64 inner = rank / after;
                            rank %= after;
                            picks.push_back(inner_at(*groups_[g][s], content_.compartments[e].value, e, c, inner));
                            prev = std::make_pair(e, c);
                            found = true;
                            break;
                        }
                        rank -= block;
                        used.pop_back();
                        ++avail[e];
                    }
                }
                if (!found) throw MatchError("match index out of range");
            }
        }
        return picks;
    }

    void enumerate(const std::function<void(const std::vector<CompartmentPick>&)>& fn) const
    {
        std::vector<CompartmentPick> picks;
        std::vector<std::pair<std::size_t, u64>> used;
        std::function<void(std::size_t, u64, std::optional<std::pair<std::size_t, u64>>)> rec =
            [&](std::size_t g, u64 s, std::optional<std::pair<std::size_t, u64>> prev) {
                if (g == groups_.size()) {
                    fn(picks);
                    return;
                }
                if (s == groups_[g].size()) {
                    rec(g + 1, 0, std::nullopt);
                    return;
                }
                for (std::size_t e : cand_[g]) {
                    if (prev && e < prev->first) continue;
                    const u64 first_copy = (prev && prev->first == e) ? prev->second + 1 : 0;
                    for (u64 c = first_copy; c < content_.compartments[e].count; ++c) {
                        if (is_used(used, e, c)) continue;
                        used.emplace_back(e, c);
                        inner_enumerate(*groups_[g][s], content_.compartments[e].value, e, c, [&](CompartmentPick&& pick) {
                            picks.push_back(std::move(pick));
                            rec(g, s + 1, std::make_pair(e, c));
                            picks.pop_back();
                        });
                        used.pop_back();
                    }
                }
            };
        rec(0, 0, std::nullopt);
    }

    [[nodiscard]] const CompartmentPattern& slot_pattern(std::size_t flat) const
    {
        for (const auto& g : groups_) {
            if (flat < g.size()) return *g[flat];
            flat -= g.size();
        }
        throw MatchError("slot out of range");
    }

private:
    [[nodiscard]] std::vector<u64> initial_avail() const
    {
        std::vector<u64> avail;
        avail.reserve(content_.compartments.distinct());
        for (const auto& e : content_.compartments) avail.push_back(e.count);
        return avail;
    }

    static bool is_used(const std::vector<std::pair<std::size_t, u64>>& used, std::size_t e, u64 c)
    {
        return std::find(used.begin(), used.end(), std::make_pair(e, c)) != used.end();
    }

    [[nodiscard]] u64 free_after(const std::vector<std::pair<std::size_t, u64>>& used, std::size_t e, u64 c) const
    {
        u64 n = content_.compartments[e].count - c - 1;
        for (const auto& [ue, uc] : used) {
            if (ue == e && uc > c) --n;
        }
        return n;
    }

    // Ways to fill `need` more slots of group g from candidates ci.. (entry
    // `bound` offers only `bound_free` copies), then every later group.
    u64 fill(std::size_t g, u64 need, std::size_t ci, std::size_t bound, u64 bound_free, std::vector<u64>& avail) const
    {
        if (need == 0) {
            if (g + 1 == groups_.size()) return 1;
            return fill(g + 1, groups_[g + 1].size(), 0, kNoEntry, 0, avail);
        }
        const auto& cs = cand_[g];
        if (ci >= cs.size()) return 0;
        const std::size_t e = cs[ci];
        const u64 window = (e == bound) ? bound_free : avail[e];
        const u64 w = weight_[g][e];
        u64 total = 0;
        for (u64 k = 0; k <= std::min(need, window); ++k) {
            avail[e] -= k;
            const u64 sub = fill(g, need - k, ci + 1, bound, bound_free, avail);
            avail[e] += k;
            if (sub == 0) continue;
            total = checked_add(total, checked_mul(checked_mul(binomial(window, k), checked_pow(w, k)), sub));
        }
        return total;
    }

    const Term& content_;
    std::vector<std::vector<const CompartmentPattern*>> groups_;
    std::vector<std::vector<u64>> weight_;
    std::vector<std::vector<std::size_t>> cand_;
};

Match assemble(const Term& content, std::vector<AtomPick> atoms, std::vector<CompartmentPick> picks,
               const SlotPlan& plan)
{
    Match m;
    m.atoms = std::move(atoms);
    for (std::size_t i = 0; i < picks.size(); ++i) {
        bind_pick(m.subst, plan.slot_pattern(i), content.compartments[picks[i].entry].value, picks[i]);
    }
    m.compartments = std::move(picks);
    return m;
}

u64 count_impl(const Pattern& p, const Term& content)
{
    const u64 atoms = count_atoms(p.atoms, content.atoms);
    if (atoms == 0) return 0;
    if (p.compartments.empty()) return atoms;
    if (content.compartments.empty()) return 0;
    return checked_mul(atoms, SlotPlan(p, content).total());
}

Match match_at_impl(const Pattern& p, const Term& content, u64 index)
{
    auto demands = atom_demands(p.atoms, content.atoms);
    if (!demands) throw MatchError("match index out of range");
    SlotPlan plan(p, content);
    const u64 slots = plan.total();
    const u64 total = checked_mul(count_atoms(p.atoms, content.atoms), slots);
    if (index >= total) throw MatchError("match index out of range");
    auto atoms = atoms_at(*demands, index / slots);
    return assemble(content, std::move(atoms), plan.at(index % slots), plan);
}

void enumerate_impl(const Pattern& p, const Term& content, const std::function<void(Match&&)>& fn)
{
    auto demands = atom_demands(p.atoms, content.atoms);
    if (!demands) return;
    SlotPlan plan(p, content);
    for_each_atoms(*demands, [&](const std::vector<AtomPick>& atoms) {
        plan.enumerate([&](const std::vector<CompartmentPick>& picks) { fn(assemble(content, atoms, picks, plan)); });
    });
}

void require_linear(const Pattern& p)
{
    auto problems = check_linear(p);
    if (!problems.empty()) throw MatchError(problems.front());
}

} // namespace

namespace detail {

u64 count_matches(const Pattern& p, const Term& content)
{
    return count_impl(p, content);
}

Match match_at(const Pattern& p, const Term& content, u64 index)
{
    return match_at_impl(p, content, index);
}

} // namespace detail

std::vector<Match> enumerate_matches(const Pattern& p, const Term& content)
{
    require_linear(p);
    std::vector<Match> out;
    enumerate_impl(p, content, [&](Match&& m) { out.push_back(std::move(m)); });
    return out;
}

u64 count_matches(const Pattern& p, const Term& content)
{
    require_linear(p);
    return count_impl(p, content);
}

Match match_at(const Pattern& p, const Term& content, u64 index)
{
    require_linear(p);
    return match_at_impl(p, content, index);
}

Term instantiate(const OpenTerm& o, const Substitution& sigma)
{
    Term t;
    t.atoms = o.atoms;
    for (const auto& e : o.compartments) {
        const OpenCompartment& oc = e.value;
        Compartment c;
        c.label = oc.label;
        c.wrap = oc.wrap;
        for (const auto& v : oc.wrap_vars) {
            auto it = sigma.wraps.find(v.value.name);
            if (it == sigma.wraps.end()) throw MatchError("unbound wrap variable $" + v.value.name);
            for (u64 k = 0; k < v.count; ++k) {
                c.wrap.atoms.add(it->second.atoms);
                if (it->second.coord) {
                    if (c.wrap.coord) throw MatchError("wrap would carry two coordinates");
                    c.wrap.coord = it->second.coord;
                }
            }
        }
        c.content = instantiate(oc.content, sigma);
        t.compartments.add(c, e.count);
    }
    for (const auto& v : o.vars) {
        auto it = sigma.contents.find(v.value.name);
        if (it == sigma.contents.end()) throw MatchError("unbound content variable $" + v.value.name);
        for (u64 k = 0; k < v.count; ++k) t.add(it->second);
    }
    return t;
}

namespace {

void visit_sites(const RewriteRule& rule, std::size_t index, const Term& content, SitePath& path, std::vector<Site>& out)
{
    for (std::size_t e = 0; e < content.compartments.distinct(); ++e) {
        const auto& entry = content.compartments[e];
        const u64 n = entry.value.label == rule.label ? count_impl(rule.pattern, entry.value.content) : 0;
        for (u64 c = 0; c < entry.count; ++c) {
            path.push_back({e, c});
            if (n > 0) out.push_back(Site{index, path, n});
            visit_sites(rule, index, entry.value.content, path, out);
            path.pop_back();
        }
    }
}

} // namespace

std::vector<Site> collect_sites(std::span<const RewriteRule> rules, const Term& system)
{
    std::vector<Site> out;
    SitePath path;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const RewriteRule& rule = rules[r];
        if (rule.label.is_top()) {
            const u64 n = count_impl(rule.pattern, system);
            if (n > 0) out.push_back(Site{r, {}, n});
        }
        visit_sites(rule, r, system, path, out);
    }
    return out;
}

const Term& content_at(const Term& system, const SitePath& path)
{
    const Term* t = &system;
    for (const auto& step : path) {
        if (step.entry >= t->compartments.distinct() || step.copy >= t->compartments[step.entry].count) {
            throw MatchError("site path does not exist");
        }
        t = &t->compartments[step.entry].value.content;
    }
    return *t;
}

namespace {

void rewrite_here(Term& content, const RewriteRule& rule, const Match& m)
{
    for (const auto& a : m.atoms) {
        const u64 have = content.atoms.count(a.atom);
        for (u64 c : a.copies) {
            if (c >= have) throw MatchError("stale match: atom occurrence absent");
        }
        content.atoms.remove(a.atom, a.copies.size());
    }
    std::vector<Compartment> consumed;
    consumed.reserve(m.compartments.size());
    for (const auto& cp : m.compartments) {
        if (cp.entry >= content.compartments.distinct() || cp.copy >= content.compartments[cp.entry].count) {
            throw MatchError("stale match: compartment occurrence absent");
        }
        consumed.push_back(content.compartments[cp.entry].value);
    }
    try {
        for (const auto& c : consumed) content.compartments.remove(c, 1);
    } catch (const std::logic_error&) {
        throw MatchError("stale match: compartment occurrence absent");
    }
    content.add(instantiate(rule.result, m.subst));
}

void rewrite_at(Term& content, const RewriteRule& rule, const SitePath& path, std::size_t depth, const Match& m)
{
    if (depth == path.size()) {
        rewrite_here(content, rule, m);
        return;
    }
    const PathStep step = path[depth];
    if (step.entry >= content.compartments.distinct() || step.copy >= content.compartments[step.entry].count) {
        throw MatchError("site path does not exist");
    }
    Compartment c = content.compartments[step.entry].value;
    content.compartments.remove(c, 1);
    rewrite_at(c.content, rule, path, depth + 1, m);
    content.compartments.add(c, 1);
}

} // namespace

void apply_rewrite_in_place(Term& system, const RewriteRule& rule, const SitePath& path, const Match& m)
{
    rewrite_at(system, rule, path, 0, m);
}

Term apply_rewrite(const Term& system, const RewriteRule& rule, const SitePath& path, const Match& m)
{
    Term out = system;
    apply_rewrite_in_place(out, rule, path, m);
    return out;
}

} // namespace cwc
