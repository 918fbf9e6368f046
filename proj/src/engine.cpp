#include "rsld/engine.hpp"

#include "rsld/errors.hpp"
#include "rsld/loop_check.hpp"

#include <algorithm>
#include <cassert>

namespace rsld {

std::string to_string(Mode m) {
    switch (m) {
    case Mode::Sld: return "sld";
    case Mode::Rsld: return "rsld";
    case Mode::Psld: return "psld";
    case Mode::Prsld: return "prsld";
    }
    return "?";
}

std::optional<Mode> mode_named(const std::string& name) {
    if (name == "sld") return Mode::Sld;
    if (name == "rsld") return Mode::Rsld;
    if (name == "psld") return Mode::Psld;
    if (name == "prsld") return Mode::Prsld;
    return std::nullopt;
}

std::string to_string(DerivationStatus s) {
    switch (s) {
    case DerivationStatus::Refuted: return "refuted";
    case DerivationStatus::Failed: return "failed";
    case DerivationStatus::BoundExceeded: return "bound_exceeded";
    case DerivationStatus::Pruned: return "pruned";
    }
    return "?";
}

std::optional<std::size_t> Rule::sq_split_of(const Clause& c) const {
    switch (kind) {
    case Kind::Stack: return c.body.size();
    case Kind::Queue: return 0;
    case Kind::Sq: return c.stack_split;
    default: return std::nullopt;
    }
}

Rule Rule::stack() {
    Rule r;
    r.kind = Kind::Stack;
    r.policy = make_stack_queue_rule({StackQueueSplit::Kind::AllStack});
    r.selection = make_leftmost_selection();
    return r;
}

Rule Rule::queue() {
    Rule r;
    r.kind = Kind::Queue;
    r.policy = make_stack_queue_rule({StackQueueSplit::Kind::AllQueue});
    return r;
}

Rule Rule::sq() {
    Rule r;
    r.kind = Kind::Sq;
    r.policy = make_stack_queue_rule({StackQueueSplit::Kind::PerClause});
    return r;
}

Rule Rule::center() {
    Rule r;
    r.kind = Kind::Center;
    r.policy = make_center_insert_rule();
    return r;
}

Rule Rule::pred_special(std::string predicate) {
    Rule r;
    r.kind = Kind::PredSpecial;
    r.special_pred = predicate;
    r.policy = make_pred_special_rule(std::move(predicate));
    return r;
}

Rule Rule::odd_even() {
    Rule r;
    r.kind = Kind::OddEven;
    r.selection = make_odd_even_selection();
    return r;
}

std::optional<Rule> Rule::named(const std::string& name) {
    if (name == "stack") return stack();
    if (name == "queue") return queue();
    if (name == "sq") return sq();
    if (name == "center") return center();
    if (name == "odd-even") return odd_even();
    constexpr const char* prefix = "pred-special:";
    if (name.rfind(prefix, 0) == 0 && name.size() > std::string(prefix).size()) {
        return pred_special(name.substr(std::string(prefix).size()));
    }
    return std::nullopt;
}

std::string Rule::name() const {
    switch (kind) {
    case Kind::Stack: return "stack";
    case Kind::Queue: return "queue";
    case Kind::Sq: return "sq";
    case Kind::Center: return "center";
    case Kind::PredSpecial: return "pred-special:" + special_pred;
    case Kind::OddEven: return "odd-even";
    }
    return "?";
}

std::size_t DerivationRecord::num_steps() const {
    std::size_t n = 0;
    for (const DerivationEntry& e : entries) {
        if (e.step) ++n;
    }
    return n;
}

Resultant DerivationRecord::resultant_at(std::size_t h) const {
    if (h >= entries.size()) {
        throw IndexOutOfRange("resultant index " + std::to_string(h) +
                              " beyond derivation of " + std::to_string(entries.size()) +
                              " resultants");
    }
    return Resultant{entries[h].reduced, initial.apply(entries[h].accumulated)};
}

const PriorityGoal& DerivationRecord::reduced_resolvent(std::size_t j) const {
    if (j >= entries.size()) throw IndexOutOfRange("no reduced resolvent " + std::to_string(j));
    return entries[j].reduced;
}

const PriorityGoal& DerivationRecord::final_goal() const {
    if (entries.empty()) return initial;
    return entries.back().reduced;
}

namespace {

// Shared step core: rename the clause apart, unify, position the body atoms
// at the given priorities, instantiate. R = (K + B·xi·pi)·theta.
std::optional<StepRecord> make_step(const PriorityGoal& g, std::size_t selected_index,
                                    const Clause& c, std::size_t clause_index,
                                    const VariableSet& avoid, FreshVarGen& gen,
                                    std::int64_t step_index, bool occurs_check,
                                    const PositioningPolicy* policy) {
    const PriorityAtom& selected = g.at(selected_index);
    VariableSet avoid_all = avoid;
    for (const std::string& v : g.variables()) avoid_all.insert(v);

    auto [renamed, xi] = rename_apart(c, avoid_all, gen);
#ifndef NDEBUG
    for (const std::string& v : renamed.variables()) assert(!avoid_all.count(v));
#endif
    auto theta = mgu(selected.atom, renamed.head, occurs_check);
    if (!theta) return std::nullopt;

    PriorityGoal k = g.without_index(selected_index);
    std::vector<Rational> priorities;
    if (policy) {
        priorities = (*policy)({k, selected, renamed});
    } else {
        // In-place splice: the body lands where the selected atom stood.
        std::optional<Rational> lo, hi;
        if (selected_index > 0) lo = g.at(selected_index - 1).priority;
        if (selected_index + 1 < g.size()) hi = g.at(selected_index + 1).priority;
        priorities = priorities_in_interval(renamed.body.size(), lo, hi);
    }
    assert(priorities.size() == renamed.body.size());

    std::vector<PriorityAtom> atoms = k.atoms();
    for (std::size_t m = 0; m < renamed.body.size(); ++m) {
        atoms.push_back({renamed.body[m], priorities[m],
                         LineageTag{step_index, static_cast<std::int64_t>(m)}});
    }
    PriorityGoal resolvent = PriorityGoal(std::move(atoms)).apply(*theta);

    StepRecord record;
    record.clause_index = clause_index;
    record.clause_id = c.id;
    record.selected_index = selected_index;
    record.selected = selected;
    record.renaming = xi;
    record.unifier = *theta;
    record.new_priorities = std::move(priorities);
    record.resolvent = std::move(resolvent);
    return record;
}

} // namespace

std::optional<StepRecord> p_derivation_step(const PriorityGoal& g, const Clause& c,
                                            std::size_t clause_index,
                                            const PositioningPolicy& policy,
                                            const VariableSet& avoid, FreshVarGen& gen,
                                            std::int64_t step_index, bool occurs_check) {
    if (g.empty()) throw EmptyGoal("cannot step from an empty goal");
    return make_step(g, 0, c, clause_index, avoid, gen, step_index, occurs_check, &policy);
}

std::optional<StepRecord> list_derivation_step(const PriorityGoal& g,
                                               std::size_t selected_index, const Clause& c,
                                               std::size_t clause_index,
                                               const VariableSet& avoid, FreshVarGen& gen,
                                               std::int64_t step_index, bool occurs_check) {
    if (g.empty()) throw EmptyGoal("cannot step from an empty goal");
    if (selected_index >= g.size()) throw IndexOutOfRange("selected atom out of range");
    return make_step(g, selected_index, c, clause_index, avoid, gen, step_index,
                     occurs_check, nullptr);
}

namespace {

ReductionCertificate identity_certificate(const PriorityGoal& g) {
    ReductionCertificate cert;
    cert.kept = g;
    cert.advancement = false;
    return cert;
}

struct Driver {
    const Program& program;
    const Rule& rule;
    const DeriveOptions& options;
    DerivationRecord record;
    VariableSet avoid;
    FreshVarGen gen;
    Substitution accumulated;
    PriorityGoal goal;

    Driver(const Program& p, const PriorityGoal& g0, const Rule& r,
           const DeriveOptions& opts)
        : program(p), rule(r), options(opts) {
        record.program = p;
        record.initial = g0;
        record.mode = opts.mode;
        avoid = g0.variables();
        goal = g0;
    }

    // Reduces the current goal, records the entry, and applies the loop
    // check. Returns false when the derivation is finished.
    bool open_entry() {
        DerivationEntry entry;
        entry.goal = goal;
        entry.accumulated = accumulated;
        VariableSet protected_vars = record.initial.apply(accumulated).variables();
        if (mode_reduces(options.mode)) {
            ReductionOptions ropts;
            ropts.advancement = options.mode == Mode::Prsld && options.advancement;
            auto [reduced, cert] = reduce_priority_goal(goal, protected_vars, ropts);
            entry.reduced = reduced;
            entry.reduction = std::move(cert);
        } else {
            entry.reduced = goal;
            entry.reduction = identity_certificate(goal);
        }
        record.entries.push_back(std::move(entry));

        if (options.loop_check != DeriveOptions::LoopCheck::Off) {
            LoopCheckOptions lc;
            lc.priority_mode = !is_list_mode(options.mode);
            lc.goals_only = options.loop_check == DeriveOptions::LoopCheck::Evgl;
            const std::size_t j = record.entries.size() - 1;
            Resultant rs_j = record.resultant_at(j);
            for (std::size_t i = 0; i < j; ++i) {
                if (auto witness = resultant_equivalent(record.resultant_at(i), rs_j, lc)) {
                    witness->i = i;
                    witness->j = j;
                    record.prune = std::move(witness);
                    record.status = DerivationStatus::Pruned;
                    return false;
                }
            }
        }
        if (record.entries.back().reduced.empty()) {
            record.status = DerivationStatus::Refuted;
            return false;
        }
        if (record.entries.size() > options.max_steps) {
            record.status = DerivationStatus::BoundExceeded;
            return false;
        }
        return true;
    }

    std::size_t select(const PriorityGoal& n, std::optional<std::size_t> override_index) {
        if (override_index) {
            if (*override_index >= n.size()) throw IndexOutOfRange("selection out of range");
            return *override_index;
        }
        if (is_list_mode(options.mode)) return rule.selection(n.atom_list());
        return 0; // minimum priority
    }

    bool apply(std::size_t selected_index, std::size_t clause_index) {
        const PriorityGoal& n = record.entries.back().reduced;
        const Clause& c = program.clauses[clause_index];
        std::optional<StepRecord> step;
        auto step_index = static_cast<std::int64_t>(record.entries.size() - 1);
        if (is_list_mode(options.mode)) {
            step = list_derivation_step(n, selected_index, c, clause_index, avoid, gen,
                                        step_index, options.occurs_check);
        } else {
            step = p_derivation_step(n, c, clause_index, rule.policy, avoid, gen,
                                     step_index, options.occurs_check);
        }
        if (!step) return false;
        for (const auto& [var, value] : step->renaming.substitution().bindings()) {
            avoid.insert(value.name());
        }
        accumulated = accumulated.compose(step->unifier);
        goal = step->resolvent;
        record.entries.back().step = std::move(step);
        return true;
    }
};

} // namespace

DerivationRecord derive(const Program& p, const PriorityGoal& g0, const Rule& rule,
                        const DeriveOptions& options) {
    Driver driver(p, g0, rule, options);
    while (driver.open_entry()) {
        std::size_t selected = driver.select(driver.record.entries.back().reduced, {});
        bool stepped = false;
        for (std::size_t ci = 0; ci < p.clauses.size() && !stepped; ++ci) {
            stepped = driver.apply(selected, ci);
        }
        if (!stepped) {
            driver.record.status = DerivationStatus::Failed;
            break;
        }
    }
    return std::move(driver.record);
}

DerivationRecord derive_with_choices(const Program& p, const PriorityGoal& g0,
                                     const Rule& rule, const DeriveOptions& options,
                                     const std::vector<std::size_t>& clause_choices,
                                     const std::vector<std::size_t>& selections) {
    Driver driver(p, g0, rule, options);
    std::size_t at = 0;
    while (driver.open_entry()) {
        if (at == clause_choices.size()) {
            // Template consumed: report the state of the final resolvent.
            driver.record.status = driver.record.entries.back().reduced.empty()
                                       ? DerivationStatus::Refuted
                                       : DerivationStatus::BoundExceeded;
            break;
        }
        std::optional<std::size_t> override_index;
        if (at < selections.size()) override_index = selections[at];
        std::size_t selected =
            driver.select(driver.record.entries.back().reduced, override_index);
        if (!driver.apply(selected, clause_choices[at])) {
            driver.record.status = DerivationStatus::Failed;
            break;
        }
        ++at;
    }
    return std::move(driver.record);
}

namespace {

struct TreeBuilder {
    const Program& program;
    const Rule& rule;
    const TreeOptions& options;

    std::unique_ptr<TreeNode> expand(const PriorityGoal& goal, std::size_t depth,
                                     VariableSet avoid, FreshVarGen gen,
                                     Substitution accumulated,
                                     std::vector<Resultant> history,
                                     const PriorityGoal& initial) {
        auto node = std::make_unique<TreeNode>();
        node->goal = goal;
        if (mode_reduces(options.mode)) {
            ReductionOptions ropts;
            ropts.advancement = options.mode == Mode::Prsld && options.advancement;
            VariableSet protected_vars = initial.apply(accumulated).variables();
            node->reduced = reduce_priority_goal(goal, protected_vars, ropts).first;
        } else {
            node->reduced = goal;
        }

        Resultant rs{node->reduced, initial.apply(accumulated)};
        if (options.loop_check != DeriveOptions::LoopCheck::Off) {
            LoopCheckOptions lc;
            lc.priority_mode = !is_list_mode(options.mode);
            lc.goals_only = options.loop_check == DeriveOptions::LoopCheck::Evgl;
            for (std::size_t i = 0; i < history.size(); ++i) {
                if (auto witness = resultant_equivalent(history[i], rs, lc)) {
                    witness->i = i;
                    witness->j = history.size();
                    node->prune = std::move(witness);
                    node->kind = TreeNode::Kind::Pruned;
                    return node;
                }
            }
        }
        history.push_back(rs);

        if (node->reduced.empty()) {
            node->kind = TreeNode::Kind::Refuted;
            return node;
        }

        std::vector<std::size_t> selections;
        if (is_list_mode(options.mode) && options.all_rules) {
            for (std::size_t i = 0; i < node->reduced.size(); ++i) selections.push_back(i);
        } else if (is_list_mode(options.mode)) {
            selections.push_back(rule.selection(node->reduced.atom_list()));
        } else {
            selections.push_back(0);
        }

        bool any_step = false;
        for (std::size_t sel : selections) {
            for (std::size_t ci = 0; ci < program.clauses.size(); ++ci) {
                // Branch-local fresh variables: each child extends its
                // parent's counter independently.
                FreshVarGen child_gen = gen;
                auto step_index = static_cast<std::int64_t>(history.size() - 1);
                std::optional<StepRecord> step;
                if (is_list_mode(options.mode)) {
                    step = list_derivation_step(node->reduced, sel, program.clauses[ci], ci,
                                                avoid, child_gen, step_index,
                                                options.occurs_check);
                } else {
                    step = p_derivation_step(node->reduced, program.clauses[ci], ci,
                                             rule.policy, avoid, child_gen, step_index,
                                             options.occurs_check);
                }
                if (!step) continue;
                any_step = true;
                if (depth == options.depth) continue; // child stays unexplored
                VariableSet child_avoid = avoid;
                for (const auto& [var, value] : step->renaming.substitution().bindings()) {
                    child_avoid.insert(value.name());
                }
                auto child = expand(step->resolvent, depth + 1, std::move(child_avoid),
                                    child_gen, accumulated.compose(step->unifier), history,
                                    initial);
                node->children.push_back(
                    {ci, program.clauses[ci].id, sel, std::move(child)});
            }
        }
        if (!any_step) node->kind = TreeNode::Kind::Failed;
        else if (depth == options.depth) node->kind = TreeNode::Kind::Truncated;
        return node;
    }
};

void walk(const TreeNode& node, const auto& visit) {
    visit(node);
    for (const auto& edge : node.children) walk(*edge.child, visit);
}

} // namespace

DerivationTree build_tree(const Program& p, const PriorityGoal& g0, const Rule& rule,
                          const TreeOptions& options) {
    TreeBuilder builder{p, rule, options};
    DerivationTree tree;
    tree.root = builder.expand(g0, 0, g0.variables(), FreshVarGen{}, Substitution{}, {},
                               g0);
    return tree;
}

bool DerivationTree::fully_explored() const {
    bool ok = true;
    walk(*root, [&](const TreeNode& n) {
        if (n.kind == TreeNode::Kind::Truncated) ok = false;
    });
    return ok;
}

bool DerivationTree::all_leaves_failed() const {
    bool ok = true;
    walk(*root, [&](const TreeNode& n) {
        if (n.children.empty() && n.kind != TreeNode::Kind::Failed) ok = false;
    });
    return ok;
}

std::size_t DerivationTree::max_depth() const {
    std::size_t best = 0;
    auto visit = [&](const TreeNode& n, std::size_t depth, auto&& self) -> void {
        best = std::max(best, depth);
        for (const auto& edge : n.children) self(*edge.child, depth + 1, self);
    };
    visit(*root, 0, visit);
    return best;
}

std::size_t DerivationTree::node_count() const {
    std::size_t count = 0;
    walk(*root, [&](const TreeNode&) { ++count; });
    return count;
}

std::set<LineageTag> lineage_closure(const DerivationRecord& d, std::size_t index,
                                     const std::set<LineageTag>& f) {
    if (index >= d.entries.size()) throw IndexOutOfRange("no resolvent at that index");
    const PriorityGoal& at = d.entries[index].reduced;
    for (const LineageTag& tag : f) {
        if (!at.find_tag(tag)) {
            throw UnknownTag("tag not present in the designated resolvent");
        }
    }
    std::set<LineageTag> closure = f;
    for (std::size_t j = index; j < d.entries.size(); ++j) {
        const auto& step = d.entries[j].step;
        if (!step) break;
        if (closure.count(step->selected.tag)) {
            for (std::size_t m = 0; m < step->new_priorities.size(); ++m) {
                closure.insert(LineageTag{static_cast<std::int64_t>(j),
                                          static_cast<std::int64_t>(m)});
            }
        }
    }
    return closure;
}

std::vector<std::size_t> sub_template(const DerivationRecord& d, std::size_t index,
                                      const std::set<LineageTag>& f) {
    std::set<LineageTag> closure = lineage_closure(d, index, f);
    std::vector<std::size_t> steps;
    for (std::size_t j = index; j < d.entries.size(); ++j) {
        const auto& step = d.entries[j].step;
        if (!step) break;
        if (closure.count(step->selected.tag)) steps.push_back(j);
    }
    return steps;
}

PriorityGoal sub_resolvent(const DerivationRecord& d, std::size_t index,
                           const std::set<LineageTag>& f) {
    std::set<LineageTag> closure = lineage_closure(d, index, f);
    return d.final_goal().restricted_to_tags(closure);
}

namespace {

bool a_preq_walk(const DerivationRecord& d, const std::set<LineageTag>& a,
                 const StackQueueSplit& split, std::set<LineageTag>& stacked) {
    stacked = a;
    for (const DerivationEntry& entry : d.entries) {
        if (!entry.step) break;
        const StepRecord& step = *entry.step;
        if (!stacked.count(step.selected.tag)) return false;
        const Clause& c = d.program.clauses[step.clause_index];
        std::size_t s = split.split_of(c);
        auto j = static_cast<std::int64_t>(&entry - d.entries.data());
        for (std::size_t m = 0; m < s; ++m) {
            stacked.insert(LineageTag{j, static_cast<std::int64_t>(m)});
        }
    }
    return true;
}

} // namespace

bool is_a_preq(const DerivationRecord& d, const std::set<LineageTag>& a,
               const StackQueueSplit& split) {
    std::set<LineageTag> stacked;
    return a_preq_walk(d, a, split, stacked);
}

bool is_a_queued(const DerivationRecord& d, const std::set<LineageTag>& a,
                 const StackQueueSplit& split) {
    std::set<LineageTag> stacked;
    if (!a_preq_walk(d, a, split, stacked)) return false;
    for (const PriorityAtom& atom : d.final_goal().atoms()) {
        if (stacked.count(atom.tag)) return false;
    }
    return true;
}

} // namespace rsld
