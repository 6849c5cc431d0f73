#pragma once

#include "automaton.hpp"
#include "exclusivity.hpp"
#include "guard_syntax.hpp"
#include "pair_set.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ecidpda {

enum class Construction {
    untimed,             // pair sets, stack symbols (<, P); all guards must be `true`
    direct,              // pair sets, stack symbols (P, <, S)
    no_stack_prediction, // (P, R) states, stack symbols (P, R, <, S); output never reads stackpred
};

inline const char* construction_name(Construction c)
{
    switch (c) {
    case Construction::untimed:
        return "untimed";
    case Construction::direct:
        return "direct";
    case Construction::no_stack_prediction:
        return "nostackpred";
    }
    return "?";
}

inline std::optional<Construction> parse_construction(std::string_view name)
{
    if (name == "untimed")
        return Construction::untimed;
    if (name == "direct")
        return Construction::direct;
    if (name == "nostackpred")
        return Construction::no_stack_prediction;
    return std::nullopt;
}

struct DeterminizeOptions {
    // Skip truth assignments no clock valuation can produce (per-clock check).
    bool prune_unsatisfiable = true;
    std::size_t max_states = 1'000'000;
    std::size_t max_rules = 40'000'000;
};

struct DeterminizedState {
    PairSet pairs;
    StateSet survivors; // empty universe except for no_stack_prediction
};

struct DeterminizedStackSymbol {
    PairSet context;
    StateSet survivors;
    std::size_t bracket = 0; // alphabet index of the left bracket
    std::uint64_t truths = 0; // mask over Determinization::universe
};

/// Output of a determinization together with the meaning of every state
/// and stack symbol.
struct Determinization {
    Construction construction;
    Ecidpda automaton;
    std::vector<DeterminizedState> states;            // aligned with automaton.states()
    std::vector<DeterminizedStackSymbol> stack_symbols; // aligned with automaton.stack_symbols()
    AtomUniverse universe;                              // atoms the output guards range over
    std::vector<std::uint64_t> assignments;             // truth assignments S actually enumerated
    std::size_t source_states = 0;
    std::size_t source_atoms = 0;
};

namespace detail {

struct BState {
    PairSet pairs;
    StateSet survivors;
    friend bool operator==(const BState&, const BState&) = default;
};

struct BStack {
    PairSet context;
    StateSet survivors;
    std::size_t bracket = 0;
    std::uint64_t truths = 0;
    friend bool operator==(const BStack&, const BStack&) = default;
};

struct BStateHash {
    std::size_t operator()(const BState& s) const noexcept { return s.pairs.hash() * 31 + s.survivors.hash(); }
};

struct BStackHash {
    std::size_t operator()(const BStack& s) const noexcept
    {
        return ((s.context.hash() * 31 + s.survivors.hash()) * 131 + s.bracket) * 1000003 + s.truths;
    }
};

class SubsetConstruction {
public:
    SubsetConstruction(const Ecidpda& source, Construction mode, const DeterminizeOptions& options)
        : src_(source), mode_(mode), options_(options), n_(source.state_count())
    {
        if (mode_ == Construction::untimed && !all_guards_true(src_))
            throw std::invalid_argument("untimed determinization requires every guard to be 'true'");
        setup_universes();
        setup_assignments();
        precompute_moves();
    }

    Determinization run()
    {
        BState init{PairSet(n_), improved() ? StateSet(n_) : StateSet()};
        for (auto q : src_.initial()) {
            init.pairs.insert(q, q);
            if (improved())
                init.survivors.insert(q);
        }
        const auto start = intern_state(init);
        add(0, start);
        while (!work_.empty()) {
            const auto [ctx, x] = work_.front();
            work_.pop_front();
            process(ctx, x);
        }
        return finish();
    }

private:
    bool improved() const { return mode_ == Construction::no_stack_prediction; }

    // ---- universes and assignments -------------------------------------------------

    void setup_universes()
    {
        std::vector<AtomicConstraint> all = src_.atoms().atoms();
        if (improved()) {
            // Stack prediction truth at a matched call is recovered from the
            // stack history clock at its return, so the mirrored atoms join Psi.
            for (const auto& a : src_.atoms())
                if (a.clock.kind == ClockKind::stack_prediction)
                    all.push_back({Clock::stack_history(), a.op, a.bound});
        }
        full_ = AtomUniverse(std::move(all));
        if (full_.size() > 62)
            throw std::length_error("too many atomic constraints");

        std::vector<AtomicConstraint> psi;
        if (mode_ != Construction::untimed)
            for (const auto& a : full_)
                if (!(improved() && a.clock.kind == ClockKind::stack_prediction))
                    psi.push_back(a);
        psi_ = AtomUniverse(std::move(psi));
        if (psi_.size() > 20)
            throw std::length_error("too many atomic constraints to enumerate truth assignments");

        for (std::size_t k = 0; k < psi_.size(); ++k)
            psi_to_full_.push_back(*full_.index_of(psi_[k]));
        if (improved())
            for (std::size_t u = 0; u < full_.size(); ++u)
                if (full_[u].clock.kind == ClockKind::stack_prediction) {
                    const AtomicConstraint mirror{Clock::stack_history(), full_[u].op, full_[u].bound};
                    predictions_.emplace_back(u, *psi_.index_of(mirror));
                }

        guards_.reserve(src_.rules().size());
        std::unordered_map<std::size_t, std::size_t> by_guard;
        for (std::size_t r = 0; r < src_.rules().size(); ++r) {
            auto [it, fresh] = by_guard.emplace(src_.guard_id(r), compiled_.size());
            if (fresh)
                compiled_.emplace_back(src_.rules()[r].guard, full_);
            guards_.push_back(it->second);
        }
    }

    void setup_assignments()
    {
        const std::uint64_t total = std::uint64_t{1} << psi_.size();
        for (std::uint64_t s = 0; s < total; ++s)
            if (!options_.prune_unsatisfiable || relaxed_consistent(psi_, s))
                masks_.push_back(s);
        for (auto s : masks_)
            xi_.push_back(xi(psi_, s));

        internal_masks_ = masks_at(Site::internal);
        call_masks_ = masks_at(Site::call);
        matched_masks_ = masks_at(Site::matched_return);
        bottom_masks_ = masks_at(Site::bottom_return);
    }

    enum class Site { internal, call, matched_return, bottom_return };

    // Stack history is defined exactly at matched right brackets, stack
    // prediction only at left brackets (when matched).
    static bool may_be_undefined(ClockKind kind, Site site)
    {
        return !(kind == ClockKind::stack_history && site == Site::matched_return);
    }
    static bool may_be_defined(ClockKind kind, Site site)
    {
        switch (kind) {
        case ClockKind::stack_history:
            return site == Site::matched_return;
        case ClockKind::stack_prediction:
            return site == Site::call;
        default:
            return true;
        }
    }

    // Indices of the assignments some string realizes at a position of the
    // given kind. Defined clock values are always positive.
    std::vector<std::size_t> masks_at(Site site) const
    {
        std::vector<std::size_t> out;
        if (!options_.prune_unsatisfiable) {
            for (std::size_t si = 0; si < masks_.size(); ++si)
                out.push_back(si);
            return out;
        }
        std::map<Clock, std::vector<std::size_t>> groups;
        for (std::size_t k = 0; k < psi_.size(); ++k)
            groups[psi_[k].clock].push_back(k);
        std::vector<std::pair<std::uint64_t, std::vector<std::uint64_t>>> patterns; // (own bits, achievable)
        for (const auto& [clock, members] : groups) {
            std::vector<Rational> bounds;
            std::uint64_t own = 0;
            for (auto k : members) {
                bounds.push_back(psi_[k].bound);
                own |= std::uint64_t{1} << k;
            }
            std::vector<std::uint64_t> achievable;
            for (const auto& value : detail::region_representatives(bounds)) {
                if (value ? (*value <= 0 || !may_be_defined(clock.kind, site)) : !may_be_undefined(clock.kind, site))
                    continue;
                std::uint64_t m = 0;
                for (auto k : members)
                    if (psi_[k].holds(value))
                        m |= std::uint64_t{1} << k;
                achievable.push_back(m);
            }
            patterns.emplace_back(own, std::move(achievable));
        }
        for (std::size_t si = 0; si < masks_.size(); ++si) {
            bool ok = true;
            for (const auto& [own, achievable] : patterns)
                ok = ok && std::find(achievable.begin(), achievable.end(), masks_[si] & own) != achievable.end();
            if (ok)
                out.push_back(si);
        }
        return out;
    }

    // Psi assignment -> assignment over the full universe, stack predictions false.
    std::uint64_t expand(std::uint64_t s) const
    {
        std::uint64_t out = 0;
        for (std::size_t k = 0; k < psi_to_full_.size(); ++k)
            if ((s >> k) & 1U)
                out |= std::uint64_t{1} << psi_to_full_[k];
        return out;
    }

    // Stack prediction atoms that held at the matching call, read off the
    // stack history atoms true at the return.
    std::uint64_t recovered_predictions(std::uint64_t return_truths) const
    {
        std::uint64_t out = 0;
        for (const auto& [u, mirror] : predictions_)
            if ((return_truths >> mirror) & 1U)
                out |= std::uint64_t{1} << u;
        return out;
    }

    bool enabled(std::size_t rule, std::uint64_t full_mask) const
    {
        return compiled_[guards_[rule]].evaluate_mask(full_mask);
    }

    // ---- source moves ---------------------------------------------------------------

    void precompute_moves()
    {
        const auto& alphabet = src_.alphabet();
        const std::size_t stacks = src_.stack_count() + 1;
        internal_.assign(alphabet.size(), {});
        returns_.assign(alphabet.size(), {});
        for (std::size_t sym = 0; sym < alphabet.size(); ++sym) {
            const auto kind = alphabet.kind(sym);
            if (kind == SymbolKind::internal) {
                internal_[sym].assign(masks_.size(), std::vector<StateSet>(n_, StateSet(n_)));
                for (std::size_t si = 0; si < masks_.size(); ++si) {
                    const auto full = expand(masks_[si]);
                    for (StateId q = 0; q < n_; ++q)
                        for (auto r : src_.rules_from(q, sym))
                            if (enabled(r, full))
                                internal_[sym][si][q].insert(src_.rules()[r].to);
                }
            } else if (kind == SymbolKind::ret) {
                returns_[sym].assign(masks_.size(), std::vector<StateSet>(n_ * stacks, StateSet(n_)));
                for (std::size_t si = 0; si < masks_.size(); ++si) {
                    const auto full = expand(masks_[si]);
                    for (StateId q = 0; q < n_; ++q)
                        for (std::size_t pop = 0; pop < stacks; ++pop) {
                            const std::optional<StackId> popped =
                                pop == 0 ? std::nullopt : std::optional<StackId>(pop - 1);
                            for (auto r : src_.returns_from(q, sym, popped))
                                if (enabled(r, full))
                                    returns_[sym][si][q * stacks + pop].insert(src_.rules()[r].to);
                        }
                }
            }
        }
    }

    const StateSet& return_successors(std::size_t sym, std::size_t si, StateId q, std::optional<StackId> pop) const
    {
        const std::size_t stacks = src_.stack_count() + 1;
        return returns_[sym][si][q * stacks + (pop ? *pop + 1 : 0)];
    }

    using CallMoves = std::vector<std::vector<std::pair<StateId, StackId>>>; // per source state

    // Call moves enabled under an assignment over the full universe.
    const CallMoves& call_moves(std::size_t sym, std::uint64_t full_mask)
    {
        const CallKey key{sym, full_mask};
        auto it = call_cache_.find(key);
        if (it != call_cache_.end())
            return it->second;
        CallMoves moves(n_);
        for (StateId q = 0; q < n_; ++q)
            for (auto r : src_.rules_from(q, sym))
                if (enabled(r, full_mask))
                    moves[q].emplace_back(src_.rules()[r].to, *src_.rules()[r].stack);
        return call_cache_.emplace(key, std::move(moves)).first->second;
    }

    // ---- transition functions of the deterministic automaton -----------------------

    PairSet advance(const PairSet& p, const std::vector<StateSet>& succ) const
    {
        PairSet out(n_);
        p.for_each([&](StateId a, StateId q) { succ[q].for_each([&](StateId t) { out.insert(a, t); }); });
        return out;
    }

    StateSet advance(const StateSet& s, const std::vector<StateSet>& succ) const
    {
        StateSet out(n_);
        s.for_each([&](StateId q) { out |= succ[q]; });
        return out;
    }

    // For every source state q in `from`: the states reached by a call on
    // `call_sym` from q (enabled under `call_mask`), a nested segment
    // summarized by `inner`, and a return on `ret_sym` under assignment `si`.
    const std::vector<StateSet>& through_bracket(const StateSet& from, const PairSet& inner, std::size_t call_sym,
                                                 std::uint64_t call_mask, std::size_t ret_sym, std::size_t si)
    {
        const CallMoves& moves = call_moves(call_sym, call_mask);
        reach_.assign(n_, StateSet(n_));
        inner.for_each([&](StateId a, StateId q) { reach_[a].insert(q); });
        ends_.assign(n_, StateSet(n_));
        from.for_each([&](StateId q) {
            for (const auto& [target, pushed] : moves[q])
                reach_[target].for_each([&](StateId t) { ends_[q] |= return_successors(ret_sym, si, t, pushed); });
        });
        return ends_;
    }

    BState internal_target(const BState& x, std::size_t sym, std::size_t si) const
    {
        const auto& succ = internal_[sym][si];
        return {advance(x.pairs, succ), improved() ? advance(x.survivors, succ) : StateSet()};
    }

    std::pair<BStack, BState> call_target(const BState& x, std::size_t sym, std::size_t si)
    {
        const auto full = expand(masks_[si]);
        const CallMoves& moves = call_moves(sym, full);
        BStack gamma{x.pairs, x.survivors, sym, mode_ == Construction::untimed ? 0 : masks_[si]};
        if (!improved()) {
            StateSet started(n_);
            x.pairs.second_components().for_each([&](StateId q) {
                for (const auto& [t, s] : moves[q])
                    started.insert(t);
            });
            return {gamma, BState{PairSet::diagonal(started), StateSet()}};
        }
        StateSet survivors(n_);
        x.survivors.for_each([&](StateId r) {
            for (const auto& [t, s] : moves[r])
                survivors.insert(t);
        });
        return {gamma, BState{PairSet::diagonal(StateSet::all(n_)), survivors}};
    }

    BState matched_return_target(const BState& inner, const BStack& gamma, std::size_t sym, std::size_t si)
    {
        std::uint64_t call_mask = expand(gamma.truths);
        if (improved())
            call_mask |= recovered_predictions(masks_[si]);

        StateSet from = gamma.context.second_components();
        if (improved())
            from |= gamma.survivors;
        const auto& ends = through_bracket(from, inner.pairs, gamma.bracket, call_mask, sym, si);

        BState out{PairSet(n_), improved() ? StateSet(n_) : StateSet()};
        gamma.context.for_each([&](StateId p, StateId q) { ends[q].for_each([&](StateId t) { out.pairs.insert(p, t); }); });
        if (improved())
            gamma.survivors.for_each([&](StateId r) { out.survivors |= ends[r]; });
        return out;
    }

    BState bottom_return_target(const BState& x, std::size_t sym, std::size_t si) const
    {
        switch (mode_) {
        case Construction::untimed: {
            PairSet out(n_);
            x.pairs.for_each([&](StateId p, StateId q) {
                return_successors(sym, si, q, std::nullopt).for_each([&](StateId t) { out.insert(p, t); });
            });
            return {out, StateSet()};
        }
        case Construction::direct: {
            StateSet started(n_);
            x.pairs.second_components().for_each(
                [&](StateId q) { started |= return_successors(sym, si, q, std::nullopt); });
            return {PairSet::diagonal(started), StateSet()};
        }
        case Construction::no_stack_prediction: {
            StateSet survivors(n_);
            x.survivors.for_each([&](StateId r) { survivors |= return_successors(sym, si, r, std::nullopt); });
            return {PairSet::diagonal(StateSet::all(n_)), survivors};
        }
        }
        return {};
    }

    // ---- lazy exploration over (level, state) --------------------------------------

    std::uint32_t intern_state(const BState& s)
    {
        auto [it, fresh] = state_ids_.emplace(s, static_cast<std::uint32_t>(states_.size()));
        if (fresh) {
            if (states_.size() >= options_.max_states)
                throw std::length_error("determinization exceeded the state limit");
            states_.push_back(s);
            local_.emplace_back();
            bottom_.emplace_back();
        }
        return it->second;
    }

    std::uint32_t intern_stack(const BStack& g, const BState& target)
    {
        auto [it, fresh] = stack_ids_.emplace(g, static_cast<std::uint32_t>(stacks_.size()));
        if (fresh) {
            stacks_.push_back(g);
            const auto start = intern_state(target);
            stack_target_.push_back(start);
            auto [level, opened] = level_of_start_.emplace(start, static_cast<std::uint32_t>(members_.size()));
            if (opened) {
                members_.emplace_back();
                stacks_of_level_.emplace_back();
            }
            stack_level_.push_back(level->second);
            stacks_of_level_[level->second].push_back(it->second);
            callers_.emplace_back();
        }
        return it->second;
    }

    void add(std::uint32_t ctx, std::uint32_t x)
    {
        const std::uint64_t key = (static_cast<std::uint64_t>(ctx) << 32) | x;
        if (!member_set_.insert(key).second)
            return;
        members_[ctx].push_back(x);
        work_.emplace_back(ctx, x);
    }

    void emit(RuleKind kind, std::uint32_t from, std::size_t sym, std::size_t si, std::uint32_t to,
              std::optional<StackId> stack)
    {
        if (rules_.size() >= options_.max_rules)
            throw std::length_error("determinization exceeded the transition limit");
        rules_.push_back({kind, from, sym, xi_[si], to, stack});
    }

    struct Local {
        bool expanded = false;
        std::vector<std::uint32_t> internal_targets;
        std::vector<std::uint32_t> pushed;
    };

    void expand_local(std::uint32_t x)
    {
        if (local_[x].expanded)
            return;
        local_[x].expanded = true;
        const auto& alphabet = src_.alphabet();
        std::vector<std::uint32_t> targets;
        std::vector<std::uint32_t> pushed;
        for (std::size_t sym = 0; sym < alphabet.size(); ++sym) {
            const auto kind = alphabet.kind(sym);
            if (kind == SymbolKind::ret)
                continue;
            for (auto si : kind == SymbolKind::internal ? internal_masks_ : call_masks_) {
                if (kind == SymbolKind::internal) {
                    const auto to = intern_state(internal_target(states_[x], sym, si));
                    emit(RuleKind::internal, x, sym, si, to, std::nullopt);
                    targets.push_back(to);
                } else {
                    auto [gamma, target] = call_target(states_[x], sym, si);
                    const auto g = intern_stack(gamma, target);
                    emit(RuleKind::call, x, sym, si, stack_target_[g], g);
                    pushed.push_back(g);
                }
            }
        }
        local_[x].internal_targets = std::move(targets);
        local_[x].pushed = std::move(pushed);
    }

    const std::vector<std::uint32_t>& bottom_targets(std::uint32_t x)
    {
        auto& slot = bottom_[x];
        if (slot)
            return *slot;
        std::vector<std::uint32_t> out;
        const auto& alphabet = src_.alphabet();
        for (std::size_t sym = 0; sym < alphabet.size(); ++sym) {
            if (alphabet.kind(sym) != SymbolKind::ret)
                continue;
            for (auto si : bottom_masks_) {
                const auto to = intern_state(bottom_return_target(states_[x], sym, si));
                emit(RuleKind::ret, x, sym, si, to, std::nullopt);
                out.push_back(to);
            }
        }
        bottom_[x] = std::move(out);
        return *bottom_[x];
    }

    const std::vector<std::uint32_t>& return_targets(std::uint32_t x, std::uint32_t g)
    {
        const std::uint64_t key = (static_cast<std::uint64_t>(x) << 32) | g;
        if (auto it = matched_.find(key); it != matched_.end())
            return it->second;
        std::vector<std::uint32_t> out;
        const auto& alphabet = src_.alphabet();
        for (std::size_t sym = 0; sym < alphabet.size(); ++sym) {
            if (alphabet.kind(sym) != SymbolKind::ret)
                continue;
            for (auto si : matched_masks_) {
                const auto to = intern_state(matched_return_target(states_[x], stacks_[g], sym, si));
                emit(RuleKind::ret, x, sym, si, to, g);
                out.push_back(to);
            }
        }
        return matched_.emplace(key, std::move(out)).first->second;
    }

    void process(std::uint32_t ctx, std::uint32_t x)
    {
        expand_local(x);
        const auto internal_targets = local_[x].internal_targets;
        const auto pushed = local_[x].pushed;
        for (auto y : internal_targets)
            add(ctx, y);
        for (auto g : pushed) {
            const auto level = stack_level_[g];
            const std::uint64_t key = (static_cast<std::uint64_t>(g) << 32) | ctx;
            if (caller_set_.insert(key).second) {
                callers_[g].push_back(ctx);
                for (std::size_t i = 0; i < members_[level].size(); ++i)
                    for (auto t : return_targets(members_[level][i], g))
                        add(ctx, t);
            }
            add(level, stack_target_[g]);
        }
        if (ctx == 0) {
            for (auto t : bottom_targets(x))
                add(0, t);
            return;
        }
        for (std::size_t j = 0; j < stacks_of_level_[ctx].size(); ++j) {
            const auto g = stacks_of_level_[ctx][j];
            const auto& targets = return_targets(x, g);
            for (std::size_t i = 0; i < callers_[g].size(); ++i)
                for (auto t : targets)
                    add(callers_[g][i], t);
        }
    }

    // ---- output -------------------------------------------------------------------

    std::string truths_text(std::uint64_t mask) const
    {
        std::string out = "S{";
        bool first = true;
        for (std::size_t k = 0; k < psi_.size(); ++k) {
            if (((mask >> k) & 1U) == 0)
                continue;
            if (!first)
                out += ',';
            first = false;
            out += to_string(psi_[k]);
        }
        return out + '}';
    }

    Determinization finish()
    {
        const auto& names = src_.states();
        std::vector<std::string> state_names;
        std::vector<StateId> accepting;
        StateSet final_states(n_);
        for (auto q : src_.accepting())
            final_states.insert(q);

        Determinization out{mode_, build_placeholder(), {}, {}, psi_, masks_, n_, src_.atoms().size()};
        for (std::size_t i = 0; i < states_.size(); ++i) {
            const auto& s = states_[i];
            std::string name = format_pair_set(s.pairs, names);
            bool accept = false;
            if (improved()) {
                name += '|' + format_state_set(s.survivors, names);
                accept = s.survivors.intersects(final_states);
            } else {
                accept = s.pairs.second_components().intersects(final_states);
            }
            state_names.push_back(std::move(name));
            if (accept)
                accepting.push_back(i);
            out.states.push_back({s.pairs, s.survivors});
        }

        std::vector<std::string> stack_names;
        for (const auto& g : stacks_) {
            const std::string& bracket = src_.alphabet().symbol(g.bracket);
            std::string name = "K{";
            if (mode_ == Construction::untimed) {
                name += bracket + ';' + format_pair_set(g.context, names);
            } else {
                name += format_pair_set(g.context, names) + ';';
                if (improved())
                    name += format_state_set(g.survivors, names) + ';';
                name += bracket + ';' + truths_text(g.truths);
            }
            stack_names.push_back(name + '}');
            out.stack_symbols.push_back({g.context, g.survivors, g.bracket, g.truths});
        }

        out.automaton = Ecidpda(src_.alphabet(), std::move(state_names), {0}, std::move(accepting),
                                std::move(stack_names), std::move(rules_));
        return out;
    }

    Ecidpda build_placeholder() const
    {
        return Ecidpda(src_.alphabet(), {"_"}, {0}, {}, {}, {});
    }

    const Ecidpda& src_;
    Construction mode_;
    DeterminizeOptions options_;
    std::size_t n_;

    AtomUniverse full_;
    AtomUniverse psi_;
    std::vector<std::size_t> psi_to_full_;
    std::vector<std::pair<std::size_t, std::size_t>> predictions_; // (full index, mirror psi index)
    std::vector<CompiledGuard> compiled_;
    std::vector<std::size_t> guards_;
    std::vector<std::uint64_t> masks_;
    std::vector<Constraint> xi_;
    std::vector<std::size_t> internal_masks_, call_masks_, matched_masks_, bottom_masks_;

    std::vector<std::vector<std::vector<StateSet>>> internal_; // [sym][si][q]
    std::vector<std::vector<std::vector<StateSet>>> returns_;  // [sym][si][q * (stacks+1) + pop]
    struct CallKey {
        std::size_t symbol;
        std::uint64_t mask;
        friend bool operator==(const CallKey&, const CallKey&) = default;
    };
    struct CallKeyHash {
        std::size_t operator()(const CallKey& k) const noexcept { return k.mask * 0x9e3779b97f4a7c15ULL + k.symbol; }
    };
    std::unordered_map<CallKey, CallMoves, CallKeyHash> call_cache_;
    std::vector<StateSet> reach_, ends_; // scratch for through_bracket

    std::vector<BState> states_;
    std::unordered_map<BState, std::uint32_t, BStateHash> state_ids_;
    std::vector<BStack> stacks_;
    std::unordered_map<BStack, std::uint32_t, BStackHash> stack_ids_;
    std::vector<std::uint32_t> stack_target_;

    // Level 0 is the bottom of the stack; every other level is identified by
    // the state a call enters, since what is reachable before the matching
    // return depends on that state alone.
    std::vector<std::vector<std::uint32_t>> members_{1};
    std::vector<std::vector<std::uint32_t>> stacks_of_level_{1};
    std::unordered_map<std::uint32_t, std::uint32_t> level_of_start_;
    std::vector<std::uint32_t> stack_level_;
    std::unordered_set<std::uint64_t> member_set_;
    std::vector<std::vector<std::uint32_t>> callers_;
    std::unordered_set<std::uint64_t> caller_set_;
    std::vector<Local> local_;
    std::vector<std::optional<std::vector<std::uint32_t>>> bottom_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> matched_;

    std::deque<std::pair<std::uint32_t, std::uint32_t>> work_;
    std::vector<Rule> rules_;
};

} // namespace detail

/// Determinization of an automaton whose guards are all `true`: states are
/// sets of pairs (state before the current well-nested segment, current state).
inline Determinization determinize_untimed(const Ecidpda& a, const DeterminizeOptions& options = {})
{
    return detail::SubsetConstruction(a, Construction::untimed, options).run();
}

/// Direct event-clock determinization: the same pair-set states, with the
/// truth values of all atoms at each left bracket kept on the stack.
inline Determinization determinize_direct(const Ecidpda& a, const DeterminizeOptions& options = {})
{
    return detail::SubsetConstruction(a, Construction::direct, options).run();
}

/// Determinization whose output never reads the stack prediction clock.
/// States carry, next to the pair set, the survivors R computed under the
/// assumption that every pending left bracket stays unmatched.
inline Determinization determinize_no_stack_prediction(const Ecidpda& a, const DeterminizeOptions& options = {})
{
    return detail::SubsetConstruction(a, Construction::no_stack_prediction, options).run();
}

inline Determinization determinize(const Ecidpda& a, Construction mode, const DeterminizeOptions& options = {})
{
    return detail::SubsetConstruction(a, mode, options).run();
}

// ---------------------------------------------------------------------------
// Size bounds

/// count <= factor * 2^exponent, without overflow.
inline bool within_bound(std::size_t count, std::size_t exponent, std::size_t factor = 1)
{
    if (exponent >= 60)
        return true;
    const long double bound = static_cast<long double>(factor) * static_cast<long double>(std::uint64_t{1} << exponent);
    return static_cast<long double>(count) <= bound;
}

struct SizeBoundCheck {
    std::size_t state_exponent = 0; // states <= 2^e
    std::size_t stack_exponent = 0; // stack symbols <= |calls| * 2^e
    bool states_ok = true;
    bool stack_ok = true;
    bool ok() const noexcept { return states_ok && stack_ok; }
};

/// Upper bounds on the output: 2^{n^2} states (times 2^n with survivors),
/// and |calls| * 2^{n^2 + k} stack symbols (times 2^n with survivors),
/// where k counts the atoms the output guards range over.
inline SizeBoundCheck check_size_bounds(const Determinization& d)
{
    const std::size_t n = d.source_states;
    const std::size_t k = d.universe.size();
    SizeBoundCheck c;
    c.state_exponent = n * n + (d.construction == Construction::no_stack_prediction ? n : 0);
    c.stack_exponent = c.state_exponent + k;
    const std::size_t calls = d.automaton.alphabet().calls().size();
    c.states_ok = within_bound(d.automaton.state_count(), c.state_exponent);
    c.stack_ok = within_bound(d.automaton.stack_count(), c.stack_exponent, calls);
    return c;
}

} // namespace ecidpda
