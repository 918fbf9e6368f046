#include "rsld/priority.hpp"

#include "rsld/errors.hpp"

#include <algorithm>

namespace rsld {

Shifting::Shifting(std::map<Rational, Rational> map) : map_(std::move(map)) {
    const Rational* prev = nullptr;
    for (const auto& [from, to] : map_) {
        if (prev && !(*prev < to)) {
            throw EngineError("shifting is not strictly increasing");
        }
        prev = &to;
    }
}

Shifting Shifting::identity_on(const std::vector<Rational>& support) {
    std::map<Rational, Rational> map;
    for (const Rational& p : support) map.emplace(p, p);
    return Shifting(std::move(map));
}

Rational Shifting::apply(const Rational& p) const {
    auto it = map_.find(p);
    if (it == map_.end()) {
        throw ShiftingSupportError("priority " + to_string(p) +
                                   " outside shifting support");
    }
    return it->second;
}

Shifting Shifting::compose(const Shifting& then) const {
    std::map<Rational, Rational> map;
    for (const auto& [from, mid] : map_) map.emplace(from, then.apply(mid));
    return Shifting(std::move(map));
}

Shifting Shifting::inverse() const {
    std::map<Rational, Rational> map;
    for (const auto& [from, to] : map_) map.emplace(to, from);
    return Shifting(std::move(map));
}

PriorityGoal::PriorityGoal(std::vector<PriorityAtom> atoms) : atoms_(std::move(atoms)) {
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const PriorityAtom& a, const PriorityAtom& b) {
                         return a.priority < b.priority;
                     });
    for (std::size_t i = 1; i < atoms_.size(); ++i) {
        if (atoms_[i - 1].priority == atoms_[i].priority) {
            throw PriorityClash("duplicate priority " + to_string(atoms_[i].priority));
        }
    }
}

const Rational& PriorityGoal::min_priority() const {
    if (empty()) throw EmptyGoal("min_priority of empty goal");
    return atoms_.front().priority;
}

const Rational& PriorityGoal::max_priority() const {
    if (empty()) throw EmptyGoal("max_priority of empty goal");
    return atoms_.back().priority;
}

bool PriorityGoal::has_priority(const Rational& p) const {
    return std::any_of(atoms_.begin(), atoms_.end(),
                       [&](const PriorityAtom& a) { return a.priority == p; });
}

const PriorityAtom* PriorityGoal::find_tag(const LineageTag& tag) const {
    for (const PriorityAtom& a : atoms_) {
        if (a.tag == tag) return &a;
    }
    return nullptr;
}

std::vector<Atom> PriorityGoal::atom_list() const {
    std::vector<Atom> out;
    out.reserve(atoms_.size());
    for (const PriorityAtom& a : atoms_) out.push_back(a.atom);
    return out;
}

std::vector<Rational> PriorityGoal::priorities() const {
    std::vector<Rational> out;
    out.reserve(atoms_.size());
    for (const PriorityAtom& a : atoms_) out.push_back(a.priority);
    return out;
}

VariableSet PriorityGoal::variables() const {
    VariableSet out;
    for (const PriorityAtom& a : atoms_) a.atom.collect_variables(out);
    return out;
}

PriorityGoal PriorityGoal::without_index(std::size_t i) const {
    std::vector<PriorityAtom> atoms = atoms_;
    atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(i));
    PriorityGoal out;
    out.atoms_ = std::move(atoms);
    return out;
}

PriorityGoal PriorityGoal::restricted_to_tags(const std::set<LineageTag>& tags) const {
    PriorityGoal out;
    for (const PriorityAtom& a : atoms_) {
        if (tags.count(a.tag)) out.atoms_.push_back(a);
    }
    return out;
}

PriorityGoal PriorityGoal::apply(const Substitution& s) const {
    PriorityGoal out;
    out.atoms_.reserve(atoms_.size());
    for (const PriorityAtom& a : atoms_) {
        out.atoms_.push_back({s.apply(a.atom), a.priority, a.tag});
    }
    return out;
}

PriorityGoal PriorityGoal::apply(const Shifting& shift) const {
    std::vector<PriorityAtom> atoms;
    atoms.reserve(atoms_.size());
    for (const PriorityAtom& a : atoms_) {
        atoms.push_back({a.atom, shift.apply(a.priority), a.tag});
    }
    return PriorityGoal(std::move(atoms));
}

PriorityGoal merge(const PriorityGoal& f, const PriorityGoal& g) {
    std::vector<PriorityAtom> atoms = f.atoms();
    for (const PriorityAtom& a : g.atoms()) {
        if (f.has_priority(a.priority)) {
            throw PriorityClash("priority " + to_string(a.priority) +
                                " present in both goals");
        }
        atoms.push_back(a);
    }
    return PriorityGoal(std::move(atoms));
}

bool strictly_below(const PriorityGoal& f, const PriorityGoal& g) {
    if (f.empty() || g.empty()) return true;
    return f.max_priority() < g.min_priority();
}

PriorityGoal concat(const PriorityGoal& f, const PriorityGoal& g) {
    if (!strictly_below(f, g)) {
        throw OrderViolation("left goal is not entirely below the right one");
    }
    return merge(f, g);
}

std::optional<Shifting> find_shifting(const PriorityGoal& f, const PriorityGoal& g) {
    if (f.size() != g.size()) return std::nullopt;
    std::map<Rational, Rational> map;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.at(i).atom != g.at(i).atom) return std::nullopt;
        map.emplace(f.at(i).priority, g.at(i).priority);
    }
    // Position-wise over two ascending sequences, hence strictly increasing;
    // any such finite map extends to an increasing bijection of the rationals.
    return Shifting(std::move(map));
}

std::optional<std::pair<Renaming, Shifting>> p_variant_of(const PriorityGoal& f,
                                                          const PriorityGoal& g) {
    if (f.size() != g.size()) return std::nullopt;
    std::vector<Atom> fl = f.atom_list();
    std::vector<Atom> gl = g.atom_list();
    auto tau = variant_of(fl, gl);
    if (!tau) return std::nullopt;
    auto pi = find_shifting(f.apply(tau->substitution()), g);
    if (!pi) return std::nullopt;
    return std::make_pair(*tau, *pi);
}

PriorityGoal goal_from_atoms(const std::vector<Atom>& atoms) {
    std::vector<std::pair<Atom, std::optional<Rational>>> entries;
    entries.reserve(atoms.size());
    for (const Atom& a : atoms) entries.emplace_back(a, std::nullopt);
    return goal_from_tagged(entries);
}

PriorityGoal goal_from_tagged(
    const std::vector<std::pair<Atom, std::optional<Rational>>>& entries) {
    std::vector<PriorityAtom> atoms;
    atoms.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Rational p = entries[i].second ? *entries[i].second : Rational(i + 1);
        atoms.push_back({entries[i].first, std::move(p),
                         LineageTag{LineageTag::kInitial, static_cast<std::int64_t>(i)}});
    }
    return PriorityGoal(std::move(atoms));
}

std::string to_string(const PriorityAtom& a) {
    return to_string(a.atom) + "[" + to_string(a.priority) + "]";
}

std::string to_string(const PriorityGoal& g) {
    std::string out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) out += ", ";
        out += to_string(g.at(i));
    }
    return out;
}

std::string to_string(const Shifting& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [from, to] : s.map()) {
        if (!first) out += ", ";
        first = false;
        out += to_string(from) + "->" + to_string(to);
    }
    return out + "}";
}

} // namespace rsld
