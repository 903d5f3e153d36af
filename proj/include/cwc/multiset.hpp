#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cwc {

/// Canonical multiset: a sorted sequence of (value, multiplicity) pairs with
/// every multiplicity >= 1. Two multisets holding the same elements always
/// have identical entry sequences, so equality and ordering are structural.
///
/// T must provide a strong three-way comparison. T may be incomplete at the
/// point where Multiset<T> is named as a member (recursive terms rely on it).
template <class T>
class Multiset {
public:
    struct Entry {
        T value;
        std::uint64_t count;
    };

    Multiset() = default;

    void add(const T& value, std::uint64_t n = 1)
    {
        if (n == 0) return;
        auto it = lower(value);
        if (it != entries_.end() && (it->value <=> value) == 0) {
            it->count += n;
        } else {
            entries_.insert(it, Entry{value, n});
        }
    }

    void add(const Multiset& other)
    {
        for (const auto& e : other.entries_) add(e.value, e.count);
    }

    /// Removes n occurrences; throws if fewer are present.
    void remove(const T& value, std::uint64_t n = 1)
    {
        if (n == 0) return;
        auto it = lower(value);
        if (it == entries_.end() || (it->value <=> value) != 0 || it->count < n) {
            throw std::logic_error("multiset: removing absent occurrences");
        }
        it->count -= n;
        if (it->count == 0) entries_.erase(it);
    }

    [[nodiscard]] std::uint64_t count(const T& value) const
    {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), value,
                                   [](const Entry& e, const T& v) { return (e.value <=> v) < 0; });
        if (it != entries_.end() && (it->value <=> value) == 0) return it->count;
        return 0;
    }

    /// Total number of occurrences.
    [[nodiscard]] std::uint64_t size() const
    {
        std::uint64_t n = 0;
        for (const auto& e : entries_) n += e.count;
        return n;
    }

    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] std::size_t distinct() const { return entries_.size(); }
    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
    [[nodiscard]] const Entry& operator[](std::size_t i) const { return entries_[i]; }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    /// True iff every occurrence of *this also occurs in other.
    [[nodiscard]] bool included_in(const Multiset& other) const
    {
        for (const auto& e : entries_) {
            if (other.count(e.value) < e.count) return false;
        }
        return true;
    }

    friend bool operator==(const Multiset& a, const Multiset& b)
    {
        return (a <=> b) == 0;
    }

    friend std::strong_ordering operator<=>(const Multiset& a, const Multiset& b)
    {
        const std::size_t n = std::min(a.entries_.size(), b.entries_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (auto c = a.entries_[i].value <=> b.entries_[i].value; c != 0) return c;
            if (auto c = a.entries_[i].count <=> b.entries_[i].count; c != 0) return c;
        }
        return a.entries_.size() <=> b.entries_.size();
    }

private:
    auto lower(const T& value)
    {
        return std::lower_bound(entries_.begin(), entries_.end(), value,
                                [](const Entry& e, const T& v) { return (e.value <=> v) < 0; });
    }

    std::vector<Entry> entries_;
};

} // namespace cwc
