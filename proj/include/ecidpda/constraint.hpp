#pragma once

#include "timed_string.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ecidpda {

enum class Comparison { at_most, at_least }; // C <= tau, C >= tau

/// Atomic clock constraint `clock op bound`, compared structurally.
struct AtomicConstraint {
    Clock clock;
    Comparison op = Comparison::at_most;
    Rational bound;

    bool holds(const std::optional<Rational>& value) const
    {
        if (!value)
            return false;
        return op == Comparison::at_most ? *value <= bound : *value >= bound;
    }

    friend bool operator==(const AtomicConstraint& a, const AtomicConstraint& b)
    {
        return a.clock == b.clock && a.op == b.op && a.bound == b.bound;
    }

    // Canonical order: clock kind, symbol, operator, bound.
    friend bool operator<(const AtomicConstraint& a, const AtomicConstraint& b)
    {
        if (a.clock != b.clock)
            return a.clock < b.clock;
        if (a.op != b.op)
            return a.op < b.op;
        return a.bound < b.bound;
    }
};

inline AtomicConstraint make_atom(Clock clock, Comparison op, Rational bound)
{
    if (bound < 0)
        throw std::invalid_argument("constraint bounds must be nonnegative");
    return {std::move(clock), op, std::move(bound)};
}

/// Boolean clock constraint. Immutable tree with shared subterms.
class Constraint {
public:
    enum class Kind { atom, conjunction, disjunction, negation, truth, falsity };

    Constraint() : Constraint(top()) {}

    static Constraint top();
    static Constraint bottom();
    static Constraint atom(AtomicConstraint a);
    static Constraint conj(Constraint lhs, Constraint rhs);
    static Constraint disj(Constraint lhs, Constraint rhs);
    static Constraint negate(Constraint operand);

    Kind kind() const noexcept;
    const AtomicConstraint& atomic() const;
    const Constraint& lhs() const;
    const Constraint& rhs() const;
    const Constraint& operand() const { return lhs(); }

    // Identity of the shared node; equal ids imply structural equality.
    const void* id() const noexcept { return node_.get(); }

    friend bool operator==(const Constraint& a, const Constraint& b);

private:
    struct Node;
    explicit Constraint(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Constraint::Node {
    Kind kind;
    AtomicConstraint atom;
    std::optional<Constraint> left;
    std::optional<Constraint> right;
};

inline Constraint Constraint::top()
{
    static const Constraint t(std::make_shared<const Node>(Node{Kind::truth, {}, {}, {}}));
    return t;
}

inline Constraint Constraint::bottom()
{
    static const Constraint f(std::make_shared<const Node>(Node{Kind::falsity, {}, {}, {}}));
    return f;
}

inline Constraint Constraint::atom(AtomicConstraint a)
{
    if (a.bound < 0)
        throw std::invalid_argument("constraint bounds must be nonnegative");
    return Constraint(std::make_shared<const Node>(Node{Kind::atom, std::move(a), {}, {}}));
}

inline Constraint Constraint::conj(Constraint lhs, Constraint rhs)
{
    return Constraint(std::make_shared<const Node>(Node{Kind::conjunction, {}, std::move(lhs), std::move(rhs)}));
}

inline Constraint Constraint::disj(Constraint lhs, Constraint rhs)
{
    return Constraint(std::make_shared<const Node>(Node{Kind::disjunction, {}, std::move(lhs), std::move(rhs)}));
}

inline Constraint Constraint::negate(Constraint operand)
{
    return Constraint(std::make_shared<const Node>(Node{Kind::negation, {}, std::move(operand), {}}));
}

inline Constraint::Kind Constraint::kind() const noexcept { return node_->kind; }

inline const AtomicConstraint& Constraint::atomic() const
{
    if (node_->kind != Kind::atom)
        throw std::logic_error("constraint is not atomic");
    return node_->atom;
}

inline const Constraint& Constraint::lhs() const
{
    if (!node_->left)
        throw std::logic_error("constraint has no operand");
    return *node_->left;
}

inline const Constraint& Constraint::rhs() const
{
    if (!node_->right)
        throw std::logic_error("constraint has no right operand");
    return *node_->right;
}

inline bool operator==(const Constraint& a, const Constraint& b)
{
    if (a.node_ == b.node_)
        return true;
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case Constraint::Kind::atom:
        return a.atomic() == b.atomic();
    case Constraint::Kind::conjunction:
    case Constraint::Kind::disjunction:
        return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Constraint::Kind::negation:
        return a.operand() == b.operand();
    case Constraint::Kind::truth:
    case Constraint::Kind::falsity:
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Evaluation on timed strings

inline bool eval(const Constraint& phi, const TimedString& w, std::size_t i)
{
    switch (phi.kind()) {
    case Constraint::Kind::atom: {
        const auto& a = phi.atomic();
        return a.holds(clock_value(w, i, a.clock));
    }
    case Constraint::Kind::conjunction:
        return eval(phi.lhs(), w, i) && eval(phi.rhs(), w, i);
    case Constraint::Kind::disjunction:
        return eval(phi.lhs(), w, i) || eval(phi.rhs(), w, i);
    case Constraint::Kind::negation:
        return !eval(phi.operand(), w, i);
    case Constraint::Kind::truth:
        return true;
    case Constraint::Kind::falsity:
        return false;
    }
    return false;
}

inline bool eval(const AtomicConstraint& a, const TimedString& w, std::size_t i)
{
    return a.holds(clock_value(w, i, a.clock));
}

enum class Relation { le, ge, eq, lt, gt };

/// Expands `clock rel bound` into the two primitive atoms.
inline Constraint desugar(Relation rel, const Clock& clock, const Rational& bound)
{
    const auto le = Constraint::atom(make_atom(clock, Comparison::at_most, bound));
    const auto ge = Constraint::atom(make_atom(clock, Comparison::at_least, bound));
    switch (rel) {
    case Relation::le:
        return le;
    case Relation::ge:
        return ge;
    case Relation::eq:
        return Constraint::conj(le, ge);
    case Relation::lt:
        return Constraint::conj(le, Constraint::negate(ge));
    case Relation::gt:
        return Constraint::conj(ge, Constraint::negate(le));
    }
    throw std::invalid_argument("unknown relation");
}

namespace detail {

inline void collect_atoms(const Constraint& phi, std::vector<AtomicConstraint>& out,
                          std::unordered_set<const void*>& seen)
{
    if (!seen.insert(phi.id()).second)
        return;
    switch (phi.kind()) {
    case Constraint::Kind::atom:
        out.push_back(phi.atomic());
        break;
    case Constraint::Kind::conjunction:
    case Constraint::Kind::disjunction:
        collect_atoms(phi.lhs(), out, seen);
        collect_atoms(phi.rhs(), out, seen);
        break;
    case Constraint::Kind::negation:
        collect_atoms(phi.operand(), out, seen);
        break;
    default:
        break;
    }
}

inline void sort_unique(std::vector<AtomicConstraint>& atoms)
{
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

} // namespace detail

/// Atom leaves of phi in canonical order, duplicates removed.
inline std::vector<AtomicConstraint> atoms(const Constraint& phi)
{
    std::vector<AtomicConstraint> out;
    std::unordered_set<const void*> seen;
    detail::collect_atoms(phi, out, seen);
    detail::sort_unique(out);
    return out;
}

/// Canonically ordered finite set of atomic constraints (the universe Psi).
class AtomUniverse {
public:
    AtomUniverse() = default;
    explicit AtomUniverse(std::vector<AtomicConstraint> atoms) : atoms_(std::move(atoms))
    {
        detail::sort_unique(atoms_);
    }

    template <class Range>
    static AtomUniverse of_constraints(const Range& constraints)
    {
        std::vector<AtomicConstraint> all;
        std::unordered_set<const void*> seen;
        for (const Constraint& c : constraints)
            detail::collect_atoms(c, all, seen);
        return AtomUniverse(std::move(all));
    }

    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }
    const AtomicConstraint& operator[](std::size_t i) const { return atoms_.at(i); }
    const std::vector<AtomicConstraint>& atoms() const noexcept { return atoms_; }
    auto begin() const noexcept { return atoms_.begin(); }
    auto end() const noexcept { return atoms_.end(); }

    std::optional<std::size_t> index_of(const AtomicConstraint& a) const
    {
        const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
        if (it == atoms_.end() || !(*it == a))
            return std::nullopt;
        return static_cast<std::size_t>(it - atoms_.begin());
    }

    bool contains(const AtomicConstraint& a) const { return index_of(a).has_value(); }

    friend bool operator==(const AtomUniverse& a, const AtomUniverse& b) { return a.atoms_ == b.atoms_; }

private:
    std::vector<AtomicConstraint> atoms_;
};

/// A truth assignment: the members S of a universe Psi assumed true.
struct AtomSet {
    AtomUniverse universe;
    std::vector<bool> members; // indexed like universe

    AtomSet() = default;
    explicit AtomSet(AtomUniverse u) : universe(std::move(u)), members(universe.size(), false) {}

    AtomSet(AtomUniverse u, const std::vector<AtomicConstraint>& true_atoms) : AtomSet(std::move(u))
    {
        for (const auto& a : true_atoms) {
            const auto idx = universe.index_of(a);
            if (!idx)
                throw std::invalid_argument("assignment member outside the universe");
            members[*idx] = true;
        }
    }

    static AtomSet from_mask(AtomUniverse u, std::uint64_t mask)
    {
        AtomSet s(std::move(u));
        for (std::size_t i = 0; i < s.universe.size(); ++i)
            s.members[i] = ((mask >> i) & 1U) != 0;
        return s;
    }

    bool contains(const AtomicConstraint& a) const
    {
        const auto idx = universe.index_of(a);
        return idx && members[*idx];
    }

    friend bool operator==(const AtomSet&, const AtomSet&) = default;
};

/// The assignment realized on w at position i: S = {A in Psi : A true at (w,i)}.
inline AtomSet truths_at(const AtomUniverse& universe, const TimedString& w, std::size_t i)
{
    AtomSet s(universe);
    for (std::size_t k = 0; k < universe.size(); ++k)
        s.members[k] = eval(universe[k], w, i);
    return s;
}

namespace detail {

inline bool eval_assignment(const Constraint& phi, const AtomSet& s)
{
    switch (phi.kind()) {
    case Constraint::Kind::atom: {
        const auto idx = s.universe.index_of(phi.atomic());
        if (!idx)
            throw std::invalid_argument("constraint mentions an atom outside the assignment universe");
        return s.members[*idx];
    }
    case Constraint::Kind::conjunction: {
        const bool l = eval_assignment(phi.lhs(), s);
        const bool r = eval_assignment(phi.rhs(), s);
        return l && r;
    }
    case Constraint::Kind::disjunction: {
        const bool l = eval_assignment(phi.lhs(), s);
        const bool r = eval_assignment(phi.rhs(), s);
        return l || r;
    }
    case Constraint::Kind::negation:
        return !eval_assignment(phi.operand(), s);
    case Constraint::Kind::truth:
        return true;
    case Constraint::Kind::falsity:
        return false;
    }
    return false;
}

} // namespace detail

/// Truth of phi when each atom is replaced by its membership in the assignment.
/// Throws std::invalid_argument if phi mentions an atom outside the universe.
inline bool eval_under(const Constraint& phi, const AtomSet& assignment)
{
    return detail::eval_assignment(phi, assignment);
}

/// Conjunction asserting that exactly the atoms selected by `mask` hold.
inline Constraint xi(const AtomUniverse& universe, std::uint64_t mask)
{
    if (universe.size() < 64 && (mask >> universe.size()) != 0)
        throw std::invalid_argument("assignment selects atoms outside the universe");
    std::optional<Constraint> out;
    for (std::size_t i = 0; i < universe.size(); ++i) {
        auto literal = Constraint::atom(universe[i]);
        if (((mask >> i) & 1U) == 0)
            literal = Constraint::negate(literal);
        out = out ? Constraint::conj(*out, literal) : literal;
    }
    return out ? *out : Constraint::top();
}

inline Constraint xi(const AtomSet& s)
{
    std::optional<Constraint> out;
    for (std::size_t i = 0; i < s.universe.size(); ++i) {
        auto literal = Constraint::atom(s.universe[i]);
        if (!s.members[i])
            literal = Constraint::negate(literal);
        out = out ? Constraint::conj(*out, literal) : literal;
    }
    return out ? *out : Constraint::top();
}

/// A constraint flattened against a fixed universe so that it can be
/// evaluated from per-atom truth values without touching the AST.
class CompiledGuard {
public:
    CompiledGuard() : nodes_{{Constraint::Kind::truth, 0, 0, 0}} {}

    CompiledGuard(const Constraint& phi, const AtomUniverse& universe)
    {
        std::unordered_map<const void*, std::uint32_t> memo;
        compile(phi, universe, memo);
    }

    // `truth(k)` reports whether atom k of the universe holds.
    template <class Truth>
    bool evaluate(Truth&& truth) const
    {
        return run(static_cast<std::uint32_t>(nodes_.size() - 1), truth);
    }

    bool evaluate_mask(std::uint64_t mask) const
    {
        return evaluate([mask](std::size_t k) { return ((mask >> k) & 1U) != 0; });
    }

    bool is_trivially_true() const noexcept
    {
        return nodes_.size() == 1 && nodes_.front().kind == Constraint::Kind::truth;
    }

private:
    struct Op {
        Constraint::Kind kind;
        std::uint32_t a; // atom index or left child
        std::uint32_t b; // right child
        std::uint32_t pad;
    };

    std::uint32_t compile(const Constraint& phi, const AtomUniverse& universe,
                          std::unordered_map<const void*, std::uint32_t>& memo)
    {
        if (auto it = memo.find(phi.id()); it != memo.end())
            return it->second;
        Op op{phi.kind(), 0, 0, 0};
        switch (phi.kind()) {
        case Constraint::Kind::atom: {
            const auto idx = universe.index_of(phi.atomic());
            if (!idx)
                throw std::invalid_argument("guard atom missing from universe");
            op.a = static_cast<std::uint32_t>(*idx);
            break;
        }
        case Constraint::Kind::conjunction:
        case Constraint::Kind::disjunction:
            op.a = compile(phi.lhs(), universe, memo);
            op.b = compile(phi.rhs(), universe, memo);
            break;
        case Constraint::Kind::negation:
            op.a = compile(phi.operand(), universe, memo);
            break;
        default:
            break;
        }
        nodes_.push_back(op);
        const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
        memo.emplace(phi.id(), id);
        return id;
    }

    template <class Truth>
    bool run(std::uint32_t at, Truth& truth) const
    {
        const Op& op = nodes_[at];
        switch (op.kind) {
        case Constraint::Kind::atom:
            return truth(op.a);
        case Constraint::Kind::conjunction:
            return run(op.a, truth) && run(op.b, truth);
        case Constraint::Kind::disjunction:
            return run(op.a, truth) || run(op.b, truth);
        case Constraint::Kind::negation:
            return !run(op.a, truth);
        case Constraint::Kind::truth:
            return true;
        case Constraint::Kind::falsity:
            return false;
        }
        return false;
    }

    std::vector<Op> nodes_;
};

/// True when no atom of phi mentions the stack prediction clock.
inline bool free_of_stack_prediction(const Constraint& phi)
{
    for (const auto& a : atoms(phi))
        if (a.clock.kind == ClockKind::stack_prediction)
            return false;
    return true;
}

} // namespace ecidpda
