#pragma once

#include "rsld/errors.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rsld {

using VariableSet = std::set<std::string>;

/// First-order terms: a variable leaf or a compound f(t1,...,tk).
/// Constants are 0-ary compounds. Values are immutable after construction.
class Term {
public:
    static Term variable(std::string name);
    static Term compound(std::string functor, std::vector<Term> args = {});
    /// Classifies an identifier the way the text syntax does: u..z followed
    /// only by digits, or an uppercase/underscore start, names a variable.
    static bool is_variable_name(const std::string& name);

    bool is_variable() const { return variable_; }
    bool is_compound() const { return !variable_; }
    const std::string& name() const { return name_; }
    const std::vector<Term>& args() const { return args_; }

    void collect_variables(VariableSet& out) const;
    bool contains_variable(const std::string& name) const;

    /// Structural order: variables before compounds, then name, then args.
    int compare(const Term& other) const;
    bool operator==(const Term& o) const { return compare(o) == 0; }
    bool operator!=(const Term& o) const { return compare(o) != 0; }
    bool operator<(const Term& o) const { return compare(o) < 0; }

private:
    Term(bool variable, std::string name, std::vector<Term> args)
        : variable_(variable), name_(std::move(name)), args_(std::move(args)) {}

    bool variable_;
    std::string name_;
    std::vector<Term> args_;
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    void collect_variables(VariableSet& out) const;
    VariableSet variables() const;

    int compare(const Atom& other) const;
    bool operator==(const Atom& o) const { return compare(o) == 0; }
    bool operator!=(const Atom& o) const { return compare(o) != 0; }
    bool operator<(const Atom& o) const { return compare(o) < 0; }
};

/// A finite variable -> term map applied simultaneously. No x -> x binding
/// is ever stored.
class Substitution {
public:
    static Substitution identity() { return {}; }

    void bind(const std::string& var, Term value);
    const Term* lookup(const std::string& var) const;
    bool binds(const std::string& var) const { return lookup(var) != nullptr; }
    bool empty() const { return bindings_.empty(); }
    std::size_t size() const { return bindings_.size(); }

    Term apply(const Term& t) const;
    Atom apply(const Atom& a) const;
    std::vector<Atom> apply(const std::vector<Atom>& goal) const;

    /// Composition: applying the result equals applying *this, then `then`.
    Substitution compose(const Substitution& then) const;

    /// Domain plus all variables of the range.
    VariableSet variables() const;
    VariableSet domain() const;

    /// True when every binding is variable -> variable and the map is injective.
    bool is_renaming() const;

    /// A renaming *for* an expression over `vars`: injective onto variables
    /// that do not collide with the untouched part of `vars`.
    bool is_renaming_for(const VariableSet& vars) const;

    /// Eθθ = Eθ over the substitution's own variables.
    bool is_idempotent() const;

    const std::map<std::string, Term>& bindings() const { return bindings_; }

    bool operator==(const Substitution&) const = default;

private:
    std::map<std::string, Term> bindings_;
};

/// An injective variable -> variable substitution; invertible on its domain.
class Renaming {
public:
    Renaming() = default;
    /// Throws EngineError unless `sub` is a renaming.
    explicit Renaming(Substitution sub);

    const Substitution& substitution() const { return sub_; }
    Renaming inverse() const;
    bool empty() const { return sub_.empty(); }

    Term apply(const Term& t) const { return sub_.apply(t); }
    Atom apply(const Atom& a) const { return sub_.apply(a); }

    bool operator==(const Renaming&) const = default;

private:
    Substitution sub_;
};

/// A definite clause. The body carries the stack/queue split of stack-queue
/// scheduling: atoms before `stack_split` are the stack part, the rest the
/// queue part. List-mode execution ignores the split.
struct Clause {
    Atom head;
    std::vector<Atom> body;
    std::size_t stack_split = 0; // in [0, body.size()]
    std::string id;

    VariableSet variables() const;
    std::vector<Atom> stack_part() const;
    std::vector<Atom> queue_part() const;
};

VariableSet variables_of(std::span<const Atom> goal);

/// Most general unifier of two atoms: idempotent, relevant, deterministic
/// (variable-variable ties bound lexicographically smaller -> larger).
/// Empty result on predicate/arity clash, functor clash, or occurs-check hit.
std::optional<Substitution> mgu(const Atom& a, const Atom& b, bool occurs_check = true);
std::optional<Substitution> mgu_terms(const Term& a, const Term& b, bool occurs_check = true);

/// Fresh-variable source for one derivation: names v1, v2, ... from a counter
/// that never resets, skipping anything in the avoid set.
class FreshVarGen {
public:
    std::string fresh(const VariableSet& avoid);
    std::uint64_t next_index() const { return next_; }

private:
    std::uint64_t next_ = 1;
};

/// Renames every variable of `c` to a fresh one disjoint from `avoid`.
std::pair<Clause, Renaming> rename_apart(const Clause& c, const VariableSet& avoid,
                                         FreshVarGen& gen);

/// Variance of goals-as-lists: a renaming tau with F·tau positionally equal
/// to G, found by joint canonical numbering.
std::optional<Renaming> variant_of(std::span<const Atom> f, std::span<const Atom> g);

/// One-way matching: extends `seed` to lambda with pattern·lambda == target,
/// never binding a variable in `frozen`.
std::optional<Substitution> match_atom(const Atom& pattern, const Atom& target,
                                       const VariableSet& frozen,
                                       Substitution seed = {});

/// List subsumption by an instance: lambda with G·lambda an order-preserving
/// sublist of F. Plain backtracking over embeddings.
std::optional<Substitution> subsumes_as_list(std::span<const Atom> g,
                                             std::span<const Atom> f);

/// True when `sub` is an order-preserving sublist of `full` (element equality).
template <typename T>
bool is_sublist(const std::vector<T>& sub, const std::vector<T>& full) {
    std::size_t at = 0;
    for (const T& x : sub) {
        while (at < full.size() && !(full[at] == x)) ++at;
        if (at == full.size()) return false;
        ++at;
    }
    return true;
}

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(std::span<const Atom> goal);
std::string to_string(const Substitution& s);
std::string to_string(const Clause& c);

} // namespace rsld
