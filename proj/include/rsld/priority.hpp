#pragma once

#include "rsld/rational.hpp"
#include "rsld/term.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace rsld {

/// Identity of an atom within one derivation: either an initial-goal position
/// (step == kInitial) or (step index, clause-body position) of the step that
/// introduced it.
struct LineageTag {
    static constexpr std::int64_t kInitial = -1;

    std::int64_t step = kInitial;
    std::int64_t pos = 0;

    bool is_initial() const { return step == kInitial; }

    bool operator==(const LineageTag&) const = default;
    std::strong_ordering operator<=>(const LineageTag&) const = default;
};

struct PriorityAtom {
    Atom atom;
    Rational priority;
    LineageTag tag;

    bool operator==(const PriorityAtom& o) const {
        return atom == o.atom && priority == o.priority && tag == o.tag;
    }
};

/// A shifting: a strictly increasing injective map on rationals, represented
/// extensionally on a finite support. Applying it outside the support throws.
class Shifting {
public:
    Shifting() = default;
    /// Throws EngineError when the map is not strictly increasing.
    explicit Shifting(std::map<Rational, Rational> map);

    static Shifting identity_on(const std::vector<Rational>& support);

    const std::map<Rational, Rational>& map() const { return map_; }
    bool empty() const { return map_.empty(); }

    Rational apply(const Rational& p) const;
    /// Composition: apply *this, then `then`. Both must cover the chain.
    Shifting compose(const Shifting& then) const;
    Shifting inverse() const;

    bool operator==(const Shifting&) const = default;

private:
    std::map<Rational, Rational> map_;
};

/// A p-goal: a finite set of priority atoms with pairwise distinct priorities,
/// iterated in ascending priority order.
class PriorityGoal {
public:
    PriorityGoal() = default;
    /// Throws PriorityClash on duplicate priorities.
    explicit PriorityGoal(std::vector<PriorityAtom> atoms);

    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    const PriorityAtom& at(std::size_t i) const { return atoms_[i]; }
    const std::vector<PriorityAtom>& atoms() const { return atoms_; }

    const Rational& min_priority() const;
    const Rational& max_priority() const;
    bool has_priority(const Rational& p) const;
    const PriorityAtom* find_tag(const LineageTag& tag) const;

    /// The plain atom sequence in ascending priority order.
    std::vector<Atom> atom_list() const;
    std::vector<Rational> priorities() const;
    VariableSet variables() const;

    PriorityGoal without_index(std::size_t i) const;
    PriorityGoal restricted_to_tags(const std::set<LineageTag>& tags) const;

    PriorityGoal apply(const Substitution& s) const;
    PriorityGoal apply(const Shifting& shift) const;

    bool operator==(const PriorityGoal&) const = default;

private:
    std::vector<PriorityAtom> atoms_; // ascending priority
};

/// Merging F + G: union with all priorities kept; PriorityClash on overlap.
PriorityGoal merge(const PriorityGoal& f, const PriorityGoal& g);

/// True when every priority of F is below every priority of G (F ⊣ G).
bool strictly_below(const PriorityGoal& f, const PriorityGoal& g);

/// Concatenation F | G: merge restricted to F ⊣ G; OrderViolation otherwise.
PriorityGoal concat(const PriorityGoal& f, const PriorityGoal& g);

/// The position-wise priority map pi with F·pi = G, when the two goals carry
/// identical atom sequences in ascending priority order.
std::optional<Shifting> find_shifting(const PriorityGoal& f, const PriorityGoal& g);

/// p-variance: (tau, pi) with F·tau·pi = G for a renaming tau and shifting pi.
std::optional<std::pair<Renaming, Shifting>> p_variant_of(const PriorityGoal& f,
                                                          const PriorityGoal& g);

/// Builds a goal from atoms in textual order with priorities 1..k; entries may
/// override with an explicit priority.
PriorityGoal goal_from_atoms(const std::vector<Atom>& atoms);
PriorityGoal goal_from_tagged(const std::vector<std::pair<Atom, std::optional<Rational>>>& entries);

std::string to_string(const PriorityAtom& a);
std::string to_string(const PriorityGoal& g);
std::string to_string(const Shifting& s);

} // namespace rsld
