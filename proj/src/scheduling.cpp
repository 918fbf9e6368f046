#include "rsld/scheduling.hpp"

#include "rsld/errors.hpp"

namespace rsld {

const PriorityAtom& select_atom(const PriorityGoal& g) {
    if (g.empty()) throw EmptyGoal("cannot select from an empty goal");
    return g.at(0);
}

std::size_t StackQueueSplit::split_of(const Clause& c) const {
    switch (kind) {
    case Kind::AllStack: return c.body.size();
    case Kind::AllQueue: return 0;
    case Kind::PerClause: return c.stack_split;
    }
    return c.body.size();
}

std::vector<Rational> priorities_in_interval(std::size_t count,
                                             const std::optional<Rational>& low,
                                             const std::optional<Rational>& high) {
    std::vector<Rational> out;
    out.reserve(count);
    std::optional<Rational> lo = low;
    for (std::size_t i = 0; i < count; ++i) {
        Rational p = fresh_between(lo, high);
        lo = p;
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

// Stack part: descending fresh_between calls below min(K), assigned from the
// last stack atom backwards so body order is preserved.
std::vector<Rational> stack_priorities(std::size_t count,
                                       const std::optional<Rational>& below) {
    std::vector<Rational> out(count);
    std::optional<Rational> hi = below;
    for (std::size_t i = count; i-- > 0;) {
        out[i] = fresh_between(std::nullopt, hi);
        hi = out[i];
    }
    return out;
}

std::vector<Rational> queue_priorities(std::size_t count,
                                       const std::optional<Rational>& above) {
    std::vector<Rational> out;
    out.reserve(count);
    std::optional<Rational> lo = above;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(fresh_between(lo, std::nullopt));
        lo = out.back();
    }
    return out;
}

} // namespace

PositioningPolicy make_stack_queue_rule(StackQueueSplit split) {
    return [split](const PositioningContext& ctx) {
        const std::size_t body = ctx.clause.body.size();
        const std::size_t s = split.split_of(ctx.clause);
        std::optional<Rational> min_k, max_k;
        if (!ctx.remainder.empty()) {
            min_k = ctx.remainder.min_priority();
            max_k = ctx.remainder.max_priority();
        }
        std::vector<Rational> out = stack_priorities(s, min_k);
        std::optional<Rational> queue_floor = max_k;
        if (ctx.remainder.empty() && s > 0) queue_floor = out.back();
        for (Rational& p : queue_priorities(body - s, queue_floor)) {
            out.push_back(std::move(p));
        }
        return out;
    };
}

PositioningPolicy make_center_insert_rule() {
    return [](const PositioningContext& ctx) {
        const PriorityGoal& k = ctx.remainder;
        const std::size_t mid = k.size() / 2;
        std::optional<Rational> lo, hi;
        if (mid > 0) lo = k.at(mid - 1).priority;
        if (mid < k.size()) hi = k.at(mid).priority;
        return priorities_in_interval(ctx.clause.body.size(), lo, hi);
    };
}

PositioningPolicy make_pred_special_rule(std::string special_pred) {
    PositioningPolicy stack = make_stack_queue_rule({StackQueueSplit::Kind::AllStack});
    return [special_pred = std::move(special_pred),
            stack = std::move(stack)](const PositioningContext& ctx) {
        if (ctx.selected.atom.predicate != special_pred || ctx.remainder.empty()) {
            return stack(ctx);
        }
        std::optional<Rational> lo = ctx.remainder.at(0).priority;
        std::optional<Rational> hi;
        if (ctx.remainder.size() > 1) hi = ctx.remainder.at(1).priority;
        return priorities_in_interval(ctx.clause.body.size(), lo, hi);
    };
}

ListSelectionRule make_odd_even_selection() {
    return [](const std::vector<Atom>& goal) -> std::size_t {
        if (goal.empty()) throw EmptyGoal("cannot select from an empty goal");
        return goal.size() % 2 == 1 ? 0 : goal.size() - 1;
    };
}

ListSelectionRule make_leftmost_selection() {
    return [](const std::vector<Atom>& goal) -> std::size_t {
        if (goal.empty()) throw EmptyGoal("cannot select from an empty goal");
        return 0;
    };
}

} // namespace rsld
