#include "rsld/term.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <deque>
#include <sstream>

namespace rsld {

Term Term::variable(std::string name) {
    assert(!name.empty());
    return Term(true, std::move(name), {});
}

Term Term::compound(std::string functor, std::vector<Term> args) {
    assert(!functor.empty());
    return Term(false, std::move(functor), std::move(args));
}

bool Term::is_variable_name(const std::string& name) {
    if (name.empty()) return false;
    char c = name[0];
    if (c == '_' || std::isupper(static_cast<unsigned char>(c))) return true;
    if (c >= 'u' && c <= 'z') {
        return std::all_of(name.begin() + 1, name.end(),
                           [](unsigned char d) { return std::isdigit(d); });
    }
    return false;
}

void Term::collect_variables(VariableSet& out) const {
    if (variable_) {
        out.insert(name_);
        return;
    }
    for (const Term& t : args_) t.collect_variables(out);
}

bool Term::contains_variable(const std::string& name) const {
    if (variable_) return name_ == name;
    return std::any_of(args_.begin(), args_.end(),
                       [&](const Term& t) { return t.contains_variable(name); });
}

int Term::compare(const Term& other) const {
    if (variable_ != other.variable_) return variable_ ? -1 : 1;
    if (int c = name_.compare(other.name_)) return c < 0 ? -1 : 1;
    if (args_.size() != other.args_.size()) return args_.size() < other.args_.size() ? -1 : 1;
    for (std::size_t i = 0; i < args_.size(); ++i) {
        if (int c = args_[i].compare(other.args_[i])) return c;
    }
    return 0;
}

int Atom::compare(const Atom& other) const {
    if (int c = predicate.compare(other.predicate)) return c < 0 ? -1 : 1;
    if (args.size() != other.args.size()) return args.size() < other.args.size() ? -1 : 1;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (int c = args[i].compare(other.args[i])) return c;
    }
    return 0;
}

void Atom::collect_variables(VariableSet& out) const {
    for (const Term& t : args) t.collect_variables(out);
}

VariableSet Atom::variables() const {
    VariableSet out;
    collect_variables(out);
    return out;
}

void Substitution::bind(const std::string& var, Term value) {
    if (value.is_variable() && value.name() == var) {
        bindings_.erase(var);
        return;
    }
    bindings_.insert_or_assign(var, std::move(value));
}

const Term* Substitution::lookup(const std::string& var) const {
    auto it = bindings_.find(var);
    return it == bindings_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
    if (t.is_variable()) {
        const Term* bound = lookup(t.name());
        return bound ? *bound : t;
    }
    if (t.args().empty()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const Term& a : t.args()) args.push_back(apply(a));
    return Term::compound(t.name(), std::move(args));
}

Atom Substitution::apply(const Atom& a) const {
    std::vector<Term> args;
    args.reserve(a.args.size());
    for (const Term& t : a.args) args.push_back(apply(t));
    return Atom{a.predicate, std::move(args)};
}

std::vector<Atom> Substitution::apply(const std::vector<Atom>& goal) const {
    std::vector<Atom> out;
    out.reserve(goal.size());
    for (const Atom& a : goal) out.push_back(apply(a));
    return out;
}

Substitution Substitution::compose(const Substitution& then) const {
    Substitution out;
    for (const auto& [var, value] : bindings_) out.bind(var, then.apply(value));
    for (const auto& [var, value] : then.bindings_) {
        if (!binds(var)) out.bind(var, value);
    }
    return out;
}

VariableSet Substitution::variables() const {
    VariableSet out;
    for (const auto& [var, value] : bindings_) {
        out.insert(var);
        value.collect_variables(out);
    }
    return out;
}

VariableSet Substitution::domain() const {
    VariableSet out;
    for (const auto& [var, value] : bindings_) out.insert(var);
    return out;
}

bool Substitution::is_renaming() const {
    std::set<std::string> range;
    for (const auto& [var, value] : bindings_) {
        if (!value.is_variable()) return false;
        if (!range.insert(value.name()).second) return false;
    }
    return true;
}

bool Substitution::is_renaming_for(const VariableSet& vars) const {
    if (!is_renaming()) return false;
    for (const auto& [var, value] : bindings_) {
        if (!vars.count(var)) continue;
        if (vars.count(value.name()) && !binds(value.name())) return false;
    }
    return true;
}

bool Substitution::is_idempotent() const {
    for (const auto& [var, value] : bindings_) {
        if (apply(value) != value) return false;
    }
    return true;
}

Renaming::Renaming(Substitution sub) : sub_(std::move(sub)) {
    if (!sub_.is_renaming()) throw EngineError("substitution is not a renaming");
}

Renaming Renaming::inverse() const {
    Substitution inv;
    for (const auto& [var, value] : sub_.bindings()) {
        inv.bind(value.name(), Term::variable(var));
    }
    return Renaming(std::move(inv));
}

VariableSet Clause::variables() const {
    VariableSet out = head.variables();
    for (const Atom& a : body) a.collect_variables(out);
    return out;
}

std::vector<Atom> Clause::stack_part() const {
    return {body.begin(), body.begin() + static_cast<std::ptrdiff_t>(stack_split)};
}

std::vector<Atom> Clause::queue_part() const {
    return {body.begin() + static_cast<std::ptrdiff_t>(stack_split), body.end()};
}

VariableSet variables_of(std::span<const Atom> goal) {
    VariableSet out;
    for (const Atom& a : goal) a.collect_variables(out);
    return out;
}

namespace {

// Martelli-Montanari style solved-form computation over an equation queue.
std::optional<Substitution> solve(std::deque<std::pair<Term, Term>> equations,
                                  bool occurs_check) {
    Substitution solution;
    auto substitute_pending = [&](const std::string& var, const Term& value) {
        Substitution single;
        single.bind(var, value);
        for (auto& [lhs, rhs] : equations) {
            lhs = single.apply(lhs);
            rhs = single.apply(rhs);
        }
        // Keep the accumulated solution in solved (idempotent) form.
        Substitution updated;
        for (const auto& [v, t] : solution.bindings()) updated.bind(v, single.apply(t));
        updated.bind(var, value);
        solution = std::move(updated);
    };

    while (!equations.empty()) {
        auto [lhs, rhs] = equations.front();
        equations.pop_front();
        if (lhs == rhs) continue;
        if (lhs.is_variable() && rhs.is_variable()) {
            // Deterministic orientation: the lexicographically smaller name
            // is bound, so goal variables like x survive fresh v-names.
            if (lhs.name() < rhs.name()) {
                substitute_pending(lhs.name(), rhs);
            } else {
                substitute_pending(rhs.name(), lhs);
            }
            continue;
        }
        if (rhs.is_variable()) std::swap(lhs, rhs);
        if (lhs.is_variable()) {
            if (occurs_check && rhs.contains_variable(lhs.name())) return std::nullopt;
            substitute_pending(lhs.name(), rhs);
            continue;
        }
        if (lhs.name() != rhs.name() || lhs.args().size() != rhs.args().size()) {
            return std::nullopt;
        }
        for (std::size_t i = 0; i < lhs.args().size(); ++i) {
            equations.emplace_back(lhs.args()[i], rhs.args()[i]);
        }
    }
    return solution;
}

} // namespace

std::optional<Substitution> mgu(const Atom& a, const Atom& b, bool occurs_check) {
    if (a.predicate != b.predicate || a.args.size() != b.args.size()) return std::nullopt;
    std::deque<std::pair<Term, Term>> equations;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        equations.emplace_back(a.args[i], b.args[i]);
    }
    return solve(std::move(equations), occurs_check);
}

std::optional<Substitution> mgu_terms(const Term& a, const Term& b, bool occurs_check) {
    return solve({{a, b}}, occurs_check);
}

std::string FreshVarGen::fresh(const VariableSet& avoid) {
    for (;;) {
        std::string name = "v" + std::to_string(next_++);
        if (!avoid.count(name)) return name;
    }
}

std::pair<Clause, Renaming> rename_apart(const Clause& c, const VariableSet& avoid,
                                         FreshVarGen& gen) {
    Substitution xi;
    for (const std::string& var : c.variables()) {
        xi.bind(var, Term::variable(gen.fresh(avoid)));
    }
    Renaming renaming(xi);
    Clause renamed = c;
    renamed.head = xi.apply(renamed.head);
    for (Atom& a : renamed.body) a = xi.apply(a);
    return {std::move(renamed), std::move(renaming)};
}

namespace {

// Canonical numbering of variables in order of first occurrence.
struct Canonicalizer {
    std::map<std::string, std::size_t> index;
    std::vector<std::string> order;

    std::size_t number(const std::string& var) {
        auto [it, inserted] = index.emplace(var, order.size());
        if (inserted) order.push_back(var);
        return it->second;
    }

    Term canonical(const Term& t) {
        if (t.is_variable()) {
            return Term::variable("#" + std::to_string(number(t.name())));
        }
        std::vector<Term> args;
        args.reserve(t.args().size());
        for (const Term& a : t.args()) args.push_back(canonical(a));
        return Term::compound(t.name(), std::move(args));
    }

    Atom canonical(const Atom& a) {
        std::vector<Term> args;
        args.reserve(a.args.size());
        for (const Term& t : a.args) args.push_back(canonical(t));
        return Atom{a.predicate, std::move(args)};
    }
};

} // namespace

std::optional<Renaming> variant_of(std::span<const Atom> f, std::span<const Atom> g) {
    if (f.size() != g.size()) return std::nullopt;
    Canonicalizer cf, cg;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (cf.canonical(f[i]) != cg.canonical(g[i])) return std::nullopt;
    }
    if (cf.order.size() != cg.order.size()) return std::nullopt;
    Substitution tau;
    for (std::size_t i = 0; i < cf.order.size(); ++i) {
        tau.bind(cf.order[i], Term::variable(cg.order[i]));
    }
    return Renaming(std::move(tau));
}

namespace {

bool match_terms(const Term& pattern, const Term& target, const VariableSet& frozen,
                 Substitution& lambda) {
    if (pattern.is_variable()) {
        if (const Term* bound = lambda.lookup(pattern.name())) return *bound == target;
        if (pattern == target) return true;
        if (frozen.count(pattern.name())) return false;
        lambda.bind(pattern.name(), target);
        return true;
    }
    if (target.is_variable()) return false;
    if (pattern.name() != target.name() || pattern.args().size() != target.args().size()) {
        return false;
    }
    for (std::size_t i = 0; i < pattern.args().size(); ++i) {
        if (!match_terms(pattern.args()[i], target.args()[i], frozen, lambda)) return false;
    }
    return true;
}

} // namespace

std::optional<Substitution> match_atom(const Atom& pattern, const Atom& target,
                                       const VariableSet& frozen, Substitution seed) {
    if (pattern.predicate != target.predicate || pattern.args.size() != target.args.size()) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        if (!match_terms(pattern.args[i], target.args[i], frozen, seed)) return std::nullopt;
    }
    return seed;
}

namespace {

bool embed(std::span<const Atom> g, std::span<const Atom> f, std::size_t gi, std::size_t fi,
           Substitution& lambda) {
    if (gi == g.size()) return true;
    for (std::size_t j = fi; j < f.size(); ++j) {
        Substitution saved = lambda;
        if (auto extended = match_atom(g[gi], f[j], {}, lambda)) {
            lambda = *extended;
            if (embed(g, f, gi + 1, j + 1, lambda)) return true;
        }
        lambda = saved;
    }
    return false;
}

} // namespace

std::optional<Substitution> subsumes_as_list(std::span<const Atom> g,
                                             std::span<const Atom> f) {
    Substitution lambda;
    if (embed(g, f, 0, 0, lambda)) return lambda;
    return std::nullopt;
}

std::string to_string(const Term& t) {
    std::string out = t.name();
    if (t.is_compound() && !t.args().empty()) {
        out += "(";
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            if (i) out += ",";
            out += to_string(t.args()[i]);
        }
        out += ")";
    }
    return out;
}

std::string to_string(const Atom& a) {
    return to_string(Term::compound(a.predicate, a.args));
}

std::string to_string(std::span<const Atom> goal) {
    std::string out;
    for (std::size_t i = 0; i < goal.size(); ++i) {
        if (i) out += ", ";
        out += to_string(goal[i]);
    }
    return out;
}

std::string to_string(const Substitution& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [var, value] : s.bindings()) {
        if (!first) out += ", ";
        first = false;
        out += var + "/" + to_string(value);
    }
    return out + "}";
}

std::string to_string(const Clause& c) {
    std::string out = to_string(c.head);
    if (c.body.empty()) return out + ".";
    out += " <- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
        if (i) out += (i == c.stack_split) ? " | " : ", ";
        else if (c.stack_split == 0) out += "| ";
        out += to_string(c.body[i]);
    }
    return out + ".";
}

} // namespace rsld
