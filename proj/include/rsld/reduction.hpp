#pragma once

#include "rsld/priority.hpp"
#include "rsld/term.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace rsld {

/// Witness of one goal reduction G >>^tau N: the substitution, the kept /
/// eliminated partition keyed by eliminating atom, and (priority mode) the
/// advancement of each eliminating atom.
struct ReductionCertificate {
    struct Elimination {
        PriorityAtom eliminator;             // as it occurs in G (priority p_j)
        std::vector<PriorityAtom> eliminated; // A_j, original priorities
        Rational new_priority;                // r_j; equals p_j without advancement
    };

    Substitution tau;
    PriorityGoal kept; // N, with advanced priorities when advancement is on
    std::vector<Elimination> eliminations;
    bool advancement = true;

    bool is_identity() const { return eliminations.empty(); }
};

struct ReductionOptions {
    /// Eliminating-atom advancement: each eliminating atom moves to the least priority
    /// among itself and its eliminated set. Off keeps every surviving atom at its own priority.
    bool advancement = true;
    /// Minimum-length search over kept sublists; bounded to goals of length
    /// <= 12, greedy otherwise.
    bool exhaustive = false;
};

/// Reduces a p-goal up to the protected variable set X.
std::pair<PriorityGoal, ReductionCertificate>
reduce_priority_goal(const PriorityGoal& g, const VariableSet& x,
                     const ReductionOptions& options = {});

/// List-mode reduction: the goal is its own list order, kept atoms
/// keep their positions.
std::pair<std::vector<Atom>, ReductionCertificate>
reduce_list_goal(const std::vector<Atom>& g, const VariableSet& x,
                 bool exhaustive = false);

/// Direct check of the definitional conditions; the oracle for property tests.
/// Independent of how the certificate was produced.
bool verify_reduction(const PriorityGoal& g, const PriorityGoal& n,
                      const ReductionCertificate& cert, const VariableSet& x);

} // namespace rsld
