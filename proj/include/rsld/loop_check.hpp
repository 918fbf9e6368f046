#pragma once

#include "rsld/engine.hpp"

#include <optional>

namespace rsld {

struct LoopCheckOptions {
    bool priority_mode = false; // include the shifting in the witness
    bool goals_only = false;    // EVG_L: drop resultant condition (i)
};

/// Equality-variant check between two resultants: one renaming tau with
/// G_o...theta_{j-1} = G_o...theta_{i-1}·tau and N_j =_L N_i·tau, decided by
/// joint canonical numbering over the concatenated pair. In priority mode the
/// order-preserving priority map is returned as well (its existence is
/// implied by the list equality).
std::optional<PruneWitness> resultant_equivalent(const Resultant& rs_i,
                                                 const Resultant& rs_j,
                                                 const LoopCheckOptions& options);

/// Scans all i < j over the record's resultants; first witness in
/// lexicographic (j, i) order.
std::optional<PruneWitness> check_prune(const DerivationRecord& d,
                                        const LoopCheckOptions& options);

} // namespace rsld
