#pragma once

#include "rsld/parser.hpp"
#include "rsld/priority.hpp"
#include "rsld/reduction.hpp"
#include "rsld/scheduling.hpp"
#include "rsld/term.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rsld {

enum class Mode { Sld, Rsld, Psld, Prsld };

inline bool is_list_mode(Mode m) { return m == Mode::Sld || m == Mode::Rsld; }
inline bool mode_reduces(Mode m) { return m == Mode::Rsld || m == Mode::Prsld; }
std::string to_string(Mode m);
std::optional<Mode> mode_named(const std::string& name);

/// A named execution rule: a positioning policy for priority modes and/or a
/// selection rule for list modes. `stack` doubles as the leftmost list rule.
struct Rule {
    enum class Kind { Stack, Queue, Sq, Center, PredSpecial, OddEven };

    Kind kind = Kind::Stack;
    std::string special_pred;
    PositioningPolicy policy;     // set for priority-mode rules
    ListSelectionRule selection;  // set for list-mode rules

    bool usable_in_list_mode() const { return static_cast<bool>(selection); }
    bool usable_in_priority_mode() const { return static_cast<bool>(policy); }
    /// The stack/queue split this rule gives a clause, when it is a stack-queue rule.
    std::optional<std::size_t> sq_split_of(const Clause& c) const;

    static Rule stack();
    static Rule queue();
    static Rule sq();
    static Rule center();
    static Rule pred_special(std::string predicate);
    static Rule odd_even();
    /// CLI names: stack | queue | sq | center | pred-special:<p> | odd-even.
    static std::optional<Rule> named(const std::string& name);
    std::string name() const;
};

/// One priority derivation step N_j -> G_{j+1}.
struct StepRecord {
    std::size_t clause_index = 0;
    std::string clause_id;
    std::size_t selected_index = 0; // position in the reduced resolvent
    PriorityAtom selected;
    Renaming renaming;                    // xi, standardisation apart
    Substitution unifier;                 // theta
    std::vector<Rational> new_priorities; // per body atom, body order
    PriorityGoal resolvent;
};

/// Reduced resultant Rs_h = [N_h, G_o theta_o ... theta_{h-1}].
struct Resultant {
    PriorityGoal reduced;
    PriorityGoal instance;
};

enum class DerivationStatus { Refuted, Failed, BoundExceeded, Pruned };
std::string to_string(DerivationStatus s);

struct PruneWitness {
    std::size_t i = 0;
    std::size_t j = 0;
    Renaming tau;
    std::optional<Shifting> shift; // priority mode only
};

/// One G_j >>^{alpha_j} N_j -> G_{j+1} stage. The last entry of a record has
/// no step.
struct DerivationEntry {
    PriorityGoal goal;              // G_j
    Substitution accumulated;       // theta_0 ... theta_{j-1}
    ReductionCertificate reduction; // identity when reduction is off
    PriorityGoal reduced;           // N_j
    std::optional<StepRecord> step;
};

struct DerivationRecord {
    Program program;
    PriorityGoal initial;
    Mode mode = Mode::Prsld;
    std::vector<DerivationEntry> entries;
    DerivationStatus status = DerivationStatus::Failed;
    std::optional<PruneWitness> prune;

    std::size_t num_steps() const;
    /// Throws IndexOutOfRange for h > num_steps().
    Resultant resultant_at(std::size_t h) const;
    const PriorityGoal& reduced_resolvent(std::size_t j) const;
    const PriorityGoal& final_goal() const;
};

struct DeriveOptions {
    Mode mode = Mode::Prsld;
    std::size_t max_steps = 1000;
    bool advancement = true; // eliminating-atom advancement in prsld mode
    enum class LoopCheck { Off, Evrl, Evgl };
    LoopCheck loop_check = LoopCheck::Off;
    bool occurs_check = true;
};

/// A single priority derivation step via `policy`, or failure when the mgu
/// does not exist. `avoid` must cover every variable the renaming has to miss.
std::optional<StepRecord> p_derivation_step(const PriorityGoal& g, const Clause& c,
                                            std::size_t clause_index,
                                            const PositioningPolicy& policy,
                                            const VariableSet& avoid, FreshVarGen& gen,
                                            std::int64_t step_index,
                                            bool occurs_check = true);

/// Classical in-place SLD step on the list reading of `g`.
std::optional<StepRecord> list_derivation_step(const PriorityGoal& g,
                                               std::size_t selected_index, const Clause& c,
                                               std::size_t clause_index,
                                               const VariableSet& avoid, FreshVarGen& gen,
                                               std::int64_t step_index,
                                               bool occurs_check = true);

/// Single-branch driver: reduce (when the mode asks for it), then step with
/// the first applicable clause in program order. No backtracking.
DerivationRecord derive(const Program& p, const PriorityGoal& g0, const Rule& rule,
                        const DeriveOptions& options);

/// Template-driven variant: clause choices are prescribed; an inapplicable
/// choice ends the record as Failed. `selections` overrides atom selection
/// (list mode and replays only).
DerivationRecord derive_with_choices(const Program& p, const PriorityGoal& g0,
                                     const Rule& rule, const DeriveOptions& options,
                                     const std::vector<std::size_t>& clause_choices,
                                     const std::vector<std::size_t>& selections = {});

struct TreeOptions {
    Mode mode = Mode::Psld;
    std::size_t depth = 8;
    bool advancement = true;
    DeriveOptions::LoopCheck loop_check = DeriveOptions::LoopCheck::Off;
    /// List mode only: branch over every atom selection as well as every
    /// clause (the S-tree).
    bool all_rules = false;
    bool occurs_check = true;
};

struct TreeNode {
    enum class Kind { Inner, Refuted, Failed, Truncated, Pruned };

    PriorityGoal goal;
    PriorityGoal reduced;
    Kind kind = Kind::Inner;
    std::optional<PruneWitness> prune;

    struct Edge {
        std::size_t clause_index;
        std::string clause_id;
        std::size_t selected_index;
        std::unique_ptr<TreeNode> child;
    };
    std::vector<Edge> children;
};

struct DerivationTree {
    std::unique_ptr<TreeNode> root;

    bool fully_explored() const; // no Truncated node anywhere
    bool all_leaves_failed() const;
    std::size_t max_depth() const;
    std::size_t node_count() const;
};

/// Breadth-complete tree over all clause choices (and all selections when
/// asked for the S-tree), loop check pruning per the tree semantics.
DerivationTree build_tree(const Program& p, const PriorityGoal& g0, const Rule& rule,
                          const TreeOptions& options);

/// Sub-template H/F: indices of the derivation steps applied to
/// atoms of F or their descendants, from entry `index` on. Tags must occur in
/// that entry's reduced resolvent.
std::vector<std::size_t> sub_template(const DerivationRecord& d, std::size_t index,
                                      const std::set<LineageTag>& f);

/// Sub-resolvent of F in the final resolvent of `d`.
PriorityGoal sub_resolvent(const DerivationRecord& d, std::size_t index,
                           const std::set<LineageTag>& f);

/// The lineage closure of F: F's tags plus all descendants along `d`.
std::set<LineageTag> lineage_closure(const DerivationRecord& d, std::size_t index,
                                     const std::set<LineageTag>& f);

/// A-preq recognition: every rewritten atom roots in A via
/// stack-allocated descent, with stack parts given by `split`.
bool is_a_preq(const DerivationRecord& d, const std::set<LineageTag>& a,
               const StackQueueSplit& split);

/// A-queued: A-preq with the stacked part of A exhausted.
bool is_a_queued(const DerivationRecord& d, const std::set<LineageTag>& a,
                 const StackQueueSplit& split);

} // namespace rsld
