#include "rsld/reduction.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <map>

namespace rsld {

namespace {

constexpr std::size_t kExhaustiveLimit = 12;

struct Partition {
    PriorityGoal kept;
    std::vector<ReductionCertificate::Elimination> eliminations;
};

// Rebuilds the kept / eliminated partition that `tau` induces on `g`:
// kept atoms are the tau-untouched ones (first copy of each duplicate),
// every other atom must map into a kept one.
std::optional<Partition> partition_for(const PriorityGoal& g, const Substitution& tau,
                                       bool advancement) {
    std::vector<PriorityAtom> kept;
    std::map<Atom, std::size_t> first_copy; // kept atom value -> eliminations slot
    std::vector<ReductionCertificate::Elimination> elims;
    std::vector<const PriorityAtom*> dropped;

    for (const PriorityAtom& a : g.atoms()) {
        if (tau.apply(a.atom) != a.atom) {
            dropped.push_back(&a);
            continue;
        }
        auto it = first_copy.find(a.atom);
        if (it == first_copy.end()) {
            first_copy.emplace(a.atom, elims.size());
            elims.push_back({a, {}, a.priority});
            kept.push_back(a);
        } else {
            elims[it->second].eliminated.push_back(a); // later duplicate copy
        }
    }
    for (const PriorityAtom* a : dropped) {
        auto it = first_copy.find(tau.apply(a->atom));
        if (it == first_copy.end()) return std::nullopt; // image not kept
        elims[it->second].eliminated.push_back(*a);
    }

    Partition out;
    std::vector<PriorityAtom> final_atoms;
    std::vector<ReductionCertificate::Elimination> used;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        ReductionCertificate::Elimination& e = elims[i];
        if (!e.eliminated.empty()) {
            if (advancement) {
                for (const PriorityAtom& b : e.eliminated) {
                    e.new_priority = std::min(e.new_priority, b.priority);
                }
            }
            kept[i].priority = e.new_priority;
            used.push_back(e);
        }
        final_atoms.push_back(kept[i]);
    }
    out.kept = PriorityGoal(std::move(final_atoms));
    out.eliminations = std::move(used);
    return out;
}

bool identity_on(const Substitution& tau, const VariableSet& x) {
    return std::none_of(x.begin(), x.end(),
                        [&](const std::string& v) { return tau.binds(v); });
}

std::pair<PriorityGoal, ReductionCertificate>
certify(Substitution tau, Partition partition, bool advancement) {
    ReductionCertificate cert;
    cert.tau = std::move(tau);
    cert.kept = partition.kept;
    cert.eliminations = std::move(partition.eliminations);
    cert.advancement = advancement;
    return {cert.kept, std::move(cert)};
}

std::pair<PriorityGoal, ReductionCertificate>
reduce_greedy(const PriorityGoal& g, const VariableSet& x, bool advancement) {
    Substitution tau;
    PriorityGoal kept = g;
    Partition current{g, {}};

    bool improved = true;
    while (improved) {
        improved = false;
        // Per-scan indexes for the cheap necessary-condition filters below.
        std::set<Atom> kept_values;
        std::multimap<std::string, std::size_t> atoms_of_var;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            kept_values.insert(kept.at(i).atom);
            for (const std::string& v : kept.at(i).atom.variables()) {
                atoms_of_var.emplace(v, i);
            }
        }
        auto touches = [](const Atom& atom, const std::string& v) {
            for (const Term& arg : atom.args) {
                if (arg.contains_variable(v)) return true;
            }
            return false;
        };
        // Candidates latest-first: when either of two atoms could eliminate
        // the other, the later one goes.
        for (std::size_t bi = kept.size(); bi-- > 0 && !improved;) {
            const PriorityAtom& b = kept.at(bi);
            for (std::size_t ai = 0; ai < kept.size() && !improved; ++ai) {
                if (ai == bi) continue;
                const PriorityAtom& a = kept.at(ai);
                auto theta = match_atom(b.atom, a.atom, x);
                if (!theta) continue;
                bool rejected = false;
                for (const auto& [v, value] : theta->bindings()) {
                    // The eliminating atom must survive untouched, and every
                    // kept atom the matcher moves must land on a kept value.
                    if (touches(a.atom, v)) {
                        rejected = true;
                        break;
                    }
                    auto [lo, hi] = atoms_of_var.equal_range(v);
                    for (auto it = lo; it != hi && !rejected; ++it) {
                        if (it->second == bi) continue;
                        rejected = !kept_values.count(theta->apply(kept.at(it->second).atom));
                    }
                    if (rejected) break;
                }
                if (rejected) continue;
                Substitution tau2 = tau.compose(*theta);
                if (!identity_on(tau2, x)) continue;
                auto candidate = partition_for(g, tau2, advancement);
                if (!candidate || candidate->kept.size() >= current.kept.size()) continue;
                tau = std::move(tau2);
                current = std::move(*candidate);
                kept = current.kept;
                improved = true;
            }
        }
    }
    return certify(std::move(tau), std::move(current), advancement);
}

// Backtracking search for a tau mapping every dropped atom onto some kept one
// while leaving var(kept) and X untouched.
bool assign_dropped(const std::vector<const PriorityAtom*>& dropped, std::size_t at,
                    const std::vector<const PriorityAtom*>& kept,
                    const VariableSet& frozen, Substitution& tau) {
    if (at == dropped.size()) return true;
    for (const PriorityAtom* target : kept) {
        if (auto extended = match_atom(dropped[at]->atom, target->atom, frozen, tau)) {
            Substitution saved = std::move(tau);
            tau = std::move(*extended);
            if (assign_dropped(dropped, at + 1, kept, frozen, tau)) return true;
            tau = std::move(saved);
        }
    }
    return false;
}

std::pair<PriorityGoal, ReductionCertificate>
reduce_exhaustive(const PriorityGoal& g, const VariableSet& x, bool advancement) {
    const std::size_t n = g.size();
    assert(n <= kExhaustiveLimit);
    // Kept-subset masks by ascending size: the first valid one is minimal.
    std::vector<std::uint32_t> masks;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        return std::popcount(a) < std::popcount(b);
    });
    for (std::uint32_t mask : masks) {
        std::vector<const PriorityAtom*> kept, dropped;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) kept.push_back(&g.at(i));
            else dropped.push_back(&g.at(i));
        }
        VariableSet frozen = x;
        for (const PriorityAtom* a : kept) a->atom.collect_variables(frozen);
        Substitution tau;
        if (!assign_dropped(dropped, 0, kept, frozen, tau)) continue;
        auto partition = partition_for(g, tau, advancement);
        if (!partition) continue;
        if (partition->kept.size() > kept.size()) continue;
        return certify(std::move(tau), std::move(*partition), advancement);
    }
    // The full mask is always valid, so this point is unreachable.
    assert(false);
    return certify({}, Partition{g, {}}, advancement);
}

} // namespace

std::pair<PriorityGoal, ReductionCertificate>
reduce_priority_goal(const PriorityGoal& g, const VariableSet& x,
                     const ReductionOptions& options) {
    if (options.exhaustive && g.size() <= kExhaustiveLimit) {
        return reduce_exhaustive(g, x, options.advancement);
    }
    return reduce_greedy(g, x, options.advancement);
}

std::pair<std::vector<Atom>, ReductionCertificate>
reduce_list_goal(const std::vector<Atom>& g, const VariableSet& x, bool exhaustive) {
    ReductionOptions options;
    options.advancement = false;
    options.exhaustive = exhaustive;
    auto [kept, cert] = reduce_priority_goal(goal_from_atoms(g), x, options);
    return {kept.atom_list(), std::move(cert)};
}

bool verify_reduction(const PriorityGoal& g, const PriorityGoal& n,
                      const ReductionCertificate& cert, const VariableSet& x) {
    if (n != cert.kept) return false;

    // Index G by tag; the kept and eliminated atoms must partition G exactly.
    std::map<LineageTag, const PriorityAtom*> in_g;
    for (const PriorityAtom& a : g.atoms()) {
        if (!in_g.emplace(a.tag, &a).second) return false;
    }
    std::map<LineageTag, const ReductionCertificate::Elimination*> eliminator_of;
    std::set<LineageTag> accounted;

    for (const auto& e : cert.eliminations) {
        auto it = in_g.find(e.eliminator.tag);
        if (it == in_g.end() || it->second->atom != e.eliminator.atom ||
            it->second->priority != e.eliminator.priority) {
            return false;
        }
        if (!eliminator_of.emplace(e.eliminator.tag, &e).second) return false;
        Rational least = e.eliminator.priority;
        for (const PriorityAtom& b : e.eliminated) {
            auto bit = in_g.find(b.tag);
            if (bit == in_g.end() || bit->second->atom != b.atom ||
                bit->second->priority != b.priority) {
                return false;
            }
            if (!accounted.insert(b.tag).second) return false;
            // ii) every dropped atom maps onto its designated eliminator.
            if (cert.tau.apply(b.atom) != e.eliminator.atom) return false;
            least = std::min(least, b.priority);
        }
        // Advancement target: the least priority among the eliminator and its
        // group; without advancement the eliminator keeps its own priority.
        Rational expected = cert.advancement ? least : e.eliminator.priority;
        if (e.new_priority != expected) return false;
    }

    // i) N ⊆ G up to advancement: every kept atom is a G atom (same tag and
    // value), at its original priority unless it is an advanced eliminator.
    VariableSet protected_vars = x;
    for (const PriorityAtom& a : n.atoms()) {
        auto it = in_g.find(a.tag);
        if (it == in_g.end()) return false;
        if (accounted.count(a.tag)) return false; // both kept and eliminated
        if (it->second->atom != a.atom) return false;
        auto el = eliminator_of.find(a.tag);
        Rational expected =
            el != eliminator_of.end() ? el->second->new_priority : it->second->priority;
        if (a.priority != expected) return false;
        a.atom.collect_variables(protected_vars);
    }
    if (n.size() + accounted.size() != g.size()) return false;
    for (const PriorityAtom& a : g.atoms()) {
        if (!accounted.count(a.tag) && !n.find_tag(a.tag)) return false;
    }

    // iii) tau fixes var(N) and X.
    for (const std::string& v : protected_vars) {
        if (cert.tau.binds(v)) return false;
    }
    return true;
}

} // namespace rsld
