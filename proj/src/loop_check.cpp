#include "rsld/loop_check.hpp"

namespace rsld {

std::optional<PruneWitness> resultant_equivalent(const Resultant& rs_i,
                                                 const Resultant& rs_j,
                                                 const LoopCheckOptions& options) {
    // One tau must satisfy both conditions, so the pair is canonicalized
    // jointly: variance of the concatenated lists.
    std::vector<Atom> lhs, rhs;
    if (!options.goals_only) {
        lhs = rs_i.instance.atom_list();
        rhs = rs_j.instance.atom_list();
    }
    for (const Atom& a : rs_i.reduced.atom_list()) lhs.push_back(a);
    for (const Atom& a : rs_j.reduced.atom_list()) rhs.push_back(a);
    auto tau = variant_of(lhs, rhs);
    if (!tau) return std::nullopt;

    PruneWitness witness;
    witness.tau = *tau;
    if (options.priority_mode) {
        auto shift = find_shifting(rs_i.reduced.apply(tau->substitution()), rs_j.reduced);
        if (!shift) return std::nullopt; // unreachable: list equality implies it
        witness.shift = *shift;
    }
    return witness;
}

std::optional<PruneWitness> check_prune(const DerivationRecord& d,
                                        const LoopCheckOptions& options) {
    const std::size_t resultants = d.entries.size();
    for (std::size_t j = 1; j < resultants; ++j) {
        Resultant rs_j = d.resultant_at(j);
        for (std::size_t i = 0; i < j; ++i) {
            if (auto witness = resultant_equivalent(d.resultant_at(i), rs_j, options)) {
                witness->i = i;
                witness->j = j;
                return witness;
            }
        }
    }
    return std::nullopt;
}

} // namespace rsld
