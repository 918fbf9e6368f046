#pragma once

#include "rsld/priority.hpp"
#include "rsld/term.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rsld {

/// Everything a positioning decision may look at: the old resolvent minus the
/// selected atom, the selected atom itself, and the applied clause (whose
/// stack/queue split and body order it may use). Policies are pure.
struct PositioningContext {
    const PriorityGoal& remainder; // K: old resolvent minus the selected atom
    const PriorityAtom& selected;
    const Clause& clause; // body gives count and order of incoming atoms
};

/// Returns one fresh priority per clause-body atom, in body order, all
/// distinct from the priorities of K.
using PositioningPolicy = std::function<std::vector<Rational>(const PositioningContext&)>;

/// Pure selection over goals-as-lists: index of the atom to rewrite.
using ListSelectionRule = std::function<std::size_t(const std::vector<Atom>&)>;

/// The minimum-priority atom (optimum = minimum). Throws EmptyGoal.
const PriorityAtom& select_atom(const PriorityGoal& g);

/// Whole-program stack/queue splits: either each clause's own split, or a
/// uniform override (all-stack / all-queue).
struct StackQueueSplit {
    enum class Kind { PerClause, AllStack, AllQueue };
    Kind kind = Kind::PerClause;

    std::size_t split_of(const Clause& c) const;
};

/// Stack-queue shape: stack-part atoms land below min(K) in body order, queue-part
/// atoms above max(K).
PositioningPolicy make_stack_queue_rule(StackQueueSplit split);

/// New atoms go contiguously after the first floor(#K / 2) old atoms: at the
/// centre for even #K, immediately before the centre for odd #K.
PositioningPolicy make_center_insert_rule();

/// All-stack, except that rewriting an atom of `special_pred` places the new
/// atoms immediately after the first remaining old atom.
PositioningPolicy make_pred_special_rule(std::string special_pred);

/// First atom when the goal length is odd, last when even. List mode only.
ListSelectionRule make_odd_even_selection();

/// Always index 0; the classical stack (leftmost) selection on lists.
ListSelectionRule make_leftmost_selection();

/// Ascending priorities inside the open interval (low, high); either bound
/// may be absent.
std::vector<Rational> priorities_in_interval(std::size_t count,
                                             const std::optional<Rational>& low,
                                             const std::optional<Rational>& high);

} // namespace rsld
