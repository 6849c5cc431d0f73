#pragma once

#include "constraint.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace ecidpda {

// Clock valuations are relaxed: every clock independently takes a value in
// [0, inf) or is undefined. Over that model the truth of the atoms on one
// clock only depends on which region (point or open interval between the
// bounds in use) the value falls in, so a finite set of representatives
// decides satisfiability exactly.

enum class Exclusivity { provably_exclusive, possibly_overlapping };

namespace detail {

// Representative values for one clock; nullopt stands for "undefined".
inline std::vector<std::optional<Rational>> region_representatives(std::vector<Rational> bounds)
{
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    std::vector<std::optional<Rational>> reps{std::nullopt, Rational(0)};
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        reps.emplace_back(bounds[i]);
        if (i + 1 < bounds.size())
            reps.emplace_back((bounds[i] + bounds[i + 1]) / 2);
    }
    if (!bounds.empty()) {
        reps.emplace_back(bounds.back() + 1);
        if (bounds.front() > 0)
            reps.emplace_back(bounds.front() / 2);
    }
    return reps;
}

struct ClockGroup {
    std::vector<std::size_t> atom_indices;      // into the universe
    std::vector<std::uint64_t> achievable;      // distinct truth patterns, as masks over the universe
};

inline std::vector<ClockGroup> group_by_clock(const AtomUniverse& universe)
{
    std::map<Clock, ClockGroup> groups;
    for (std::size_t k = 0; k < universe.size(); ++k)
        groups[universe[k].clock].atom_indices.push_back(k);

    std::vector<ClockGroup> out;
    for (auto& [clock, group] : groups) {
        std::vector<Rational> bounds;
        for (auto k : group.atom_indices)
            bounds.push_back(universe[k].bound);
        for (const auto& value : region_representatives(bounds)) {
            std::uint64_t mask = 0;
            for (auto k : group.atom_indices)
                if (universe[k].holds(value))
                    mask |= std::uint64_t{1} << k;
            if (std::find(group.achievable.begin(), group.achievable.end(), mask) == group.achievable.end())
                group.achievable.push_back(mask);
        }
        out.push_back(std::move(group));
    }
    return out;
}

inline bool search_regions(const std::vector<ClockGroup>& groups, std::size_t at, std::uint64_t mask,
                           const CompiledGuard& guard)
{
    if (at == groups.size())
        return guard.evaluate_mask(mask);
    for (auto pattern : groups[at].achievable)
        if (search_regions(groups, at + 1, mask | pattern, guard))
            return true;
    return false;
}

// Literals of a pure conjunction of (possibly negated) atoms, or nullopt.
inline bool collect_literals(const Constraint& phi, std::vector<std::pair<AtomicConstraint, bool>>& out)
{
    switch (phi.kind()) {
    case Constraint::Kind::atom:
        out.emplace_back(phi.atomic(), true);
        return true;
    case Constraint::Kind::negation:
        if (phi.operand().kind() != Constraint::Kind::atom)
            return false;
        out.emplace_back(phi.operand().atomic(), false);
        return true;
    case Constraint::Kind::conjunction:
        return collect_literals(phi.lhs(), out) && collect_literals(phi.rhs(), out);
    case Constraint::Kind::truth:
        return true;
    default:
        return false;
    }
}

} // namespace detail

/// Whether some relaxed clock valuation satisfies phi.
inline bool relaxed_satisfiable(const Constraint& phi)
{
    const AtomUniverse universe(atoms(phi));
    if (universe.size() > 64)
        throw std::length_error("too many atoms for the relaxed satisfiability check");
    const CompiledGuard guard(phi, universe);
    return detail::search_regions(detail::group_by_clock(universe), 0, 0, guard);
}

/// Whether the assignment `mask` over `universe` is realizable by some relaxed
/// valuation. Atoms on different clocks never constrain each other.
inline bool relaxed_consistent(const AtomUniverse& universe, std::uint64_t mask)
{
    for (const auto& group : detail::group_by_clock(universe)) {
        std::uint64_t own = 0;
        for (auto k : group.atom_indices)
            own |= std::uint64_t{1} << k;
        const std::uint64_t wanted = mask & own;
        if (std::find(group.achievable.begin(), group.achievable.end(), wanted) == group.achievable.end())
            return false;
    }
    return true;
}

/// Sound check that phi and psi cannot hold at the same position of the same
/// string. Conjunctions of literals with a complementary pair are settled
/// syntactically; everything else goes through region enumeration.
inline Exclusivity mutually_exclusive(const Constraint& phi, const Constraint& psi)
{
    std::vector<std::pair<AtomicConstraint, bool>> literals;
    if (detail::collect_literals(phi, literals) && detail::collect_literals(psi, literals)) {
        std::sort(literals.begin(), literals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); });
        for (std::size_t i = 0; i + 1 < literals.size(); ++i)
            if (literals[i].first == literals[i + 1].first && literals[i].second != literals[i + 1].second)
                return Exclusivity::provably_exclusive;
    }
    return relaxed_satisfiable(Constraint::conj(phi, psi)) ? Exclusivity::possibly_overlapping
                                                           : Exclusivity::provably_exclusive;
}

} // namespace ecidpda
