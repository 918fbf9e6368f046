#pragma once

#include "rsld/engine.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rsld::lab {

/// Desk-scale vocabulary for random instances; all paper counterexamples live
/// inside this fragment and exhaustive oracles stay tractable.
struct GeneratorLimits {
    std::size_t predicates = 4;
    std::size_t max_arity = 2;
    std::size_t constants = 3;
    std::size_t variables = 4;
    std::size_t max_goal_len = 5;
    std::size_t max_body_len = 3;
    bool function_free = true;
};

/// Deterministic per-trial randomness: state is seeded from (seed, trial) so
/// reports replay identically regardless of execution order.
class InstanceGen {
public:
    InstanceGen(std::uint64_t seed, std::uint64_t trial, GeneratorLimits limits = {});

    std::mt19937_64& rng() { return rng_; }
    const GeneratorLimits& limits() const { return limits_; }

    std::size_t pick(std::size_t bound); // uniform in [0, bound)
    bool chance(double p);

    Term random_term(bool allow_fresh_vars = true);
    Atom random_atom();
    Atom most_general_atom(const std::string& predicate, std::size_t arity);
    PriorityGoal random_goal(std::size_t min_len = 1);
    Clause random_clause();
    /// A clause whose head unifies with `target` (most general head on demand).
    Clause random_clause_for(const Atom& target);
    Program random_program(std::size_t clauses);
    Substitution random_substitution(const VariableSet& vars);
    Renaming random_renaming(const VariableSet& vars);
    /// Sorted distinct priorities, one per element of `count`.
    std::vector<Rational> random_priorities(std::size_t count);
    Rational random_priority();

private:
    std::mt19937_64 rng_;
    GeneratorLimits limits_;
    std::string predicate_name(std::size_t i) const;
};

struct CheckFailure {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::string description; // serialized instance, replayable from the seed
};

struct CheckReport {
    std::string name;
    std::size_t trials = 0;
    std::size_t vacuous = 0; // premise unsatisfiable / no witness derivation
    std::vector<CheckFailure> failures;

    bool passed() const { return failures.empty(); }
    std::string verdict() const { return passed() ? "pass" : "fail"; }
};

/// A base derivation step Ds1 from a|K and a specialised step Ds2 from
/// a·lambda·sigma | (K·lambda·sigma + X), applying the same clause.
/// Context atoms carry tags with step == kContextStep.
struct LoweringInstance {
    static constexpr std::int64_t kContextStep = -2;

    PriorityGoal base_goal;        // a|K
    Clause clause;                 // un-renamed, shared by both steps
    StepRecord base_step;          // Ds1
    Substitution lambda;
    Shifting sigma;                // on the priorities of a|K
    PriorityGoal context;          // X
    PriorityGoal specialised_goal; // a·lambda·sigma | (K·lambda·sigma + X)
    StepRecord specialised_step;   // Ds2
};

/// Builds both steps through `rule`; empty when the clause fails to apply on
/// either side. Throws InvalidInstance if the pieces do not form a
/// specialisation.
std::optional<LoweringInstance> make_lowering_instance(const PriorityGoal& base,
                                                       const Clause& clause,
                                                       const Rule& rule,
                                                       const Substitution& lambda,
                                                       const Shifting& sigma,
                                                       const PriorityGoal& context);

/// Congruent-lowering decision via origin interleaving: order both resolvents by
/// priority, restrict to old-K / new-B atoms, compare the tag sequences.
bool is_congruent_lowering(const LoweringInstance& inst);

/// Independent oracle: enumerates every atom-respecting bijection between the
/// two priority supports and looks for a strictly increasing one.
bool is_congruent_lowering_bruteforce(const LoweringInstance& inst);

/// A lowering instance with arbitrary placements on both sides, independent
/// of any policy; feeds the decision-vs-oracle comparison.
LoweringInstance random_manual_lowering_instance(InstanceGen& gen);

/// The random policy-built instance the independence trials use; empty when
/// the clause fails to apply even unspecialised.
std::optional<LoweringInstance> random_independence_instance(InstanceGen& gen,
                                                             const Rule& rule);

/// Outcome of one lowering-lemma instance.
enum class LoweringOutcome { Pass, Fail, NoWitnessDerivation };

/// Searches (bounded) for a derivation from G·gamma·tau + X whose
/// sub-template over the G part equals `template_choices`, then matches the
/// sub-resolvent against Q·sigma·rho.
LoweringOutcome run_lowering_instance(const Program& p, const Rule& rule,
                                      const PriorityGoal& g, const Substitution& gamma,
                                      const Shifting& tau, const PriorityGoal& context,
                                      const std::vector<std::size_t>& template_choices,
                                      std::string* detail = nullptr);

// Trial drivers behind the `check` CLI subcommand. A report lists failures;
// whether failures are the expected outcome (center-insert, pred-special)
// is the caller's judgement.
CheckReport check_spec_independence(const Rule& rule, std::size_t trials,
                                    std::uint64_t seed);
CheckReport check_lowering_lemma(const Rule& rule, std::size_t trials, std::uint64_t seed);
CheckReport check_lifting_lemma(const Rule& rule, std::size_t trials, std::uint64_t seed);
CheckReport check_determinism(const Rule& rule, std::size_t trials, std::uint64_t seed);
CheckReport check_duplication(const Rule& rule, std::size_t trials, std::uint64_t seed);
CheckReport check_embedding(const Rule& rule, std::size_t trials, std::uint64_t seed);

/// One duplication-theorem instance: every derivation from `base` up to
/// `depth` must have a qualifying counterpart from `duplicated` (template
/// superlist, final resolvent at least as long).
struct DuplicationInstanceResult {
    std::size_t derivations = 0;
    std::size_t unmatched = 0;
    bool budget_exhausted = false;
};
DuplicationInstanceResult run_duplication_instance(const Program& p, const Rule& rule,
                                                   const PriorityGoal& base,
                                                   const PriorityGoal& duplicated,
                                                   std::size_t depth,
                                                   std::size_t node_budget = 1000000);

/// List-mode embedding replay: rebuilds the redundant SLD derivation and
/// asserts N_j·tau_j ⊆_L G'_j at every step. Empty result on success,
/// otherwise the failing step.
std::optional<std::string> replay_list_embedding(const DerivationRecord& d);

/// Priority-mode embedding search: a pure p-SLD derivation via the same policy
/// whose template is a superlist of d's and whose final resolvent is at least
/// as long as d's. Node-budgeted iterative deepening.
struct EmbeddingSearchResult {
    bool found = false;
    bool budget_exhausted = false;
    std::vector<std::size_t> template_choices;
};
EmbeddingSearchResult search_priority_embedding(const DerivationRecord& d,
                                                const Rule& rule,
                                                std::size_t node_budget = 1000000);

/// Single-step lifting: a clause applicable to a·gamma·tau|G applies to a|F
/// with fresh variables avoiding any fixed finite set.
CheckReport check_single_step_lifting(const Rule& rule, std::size_t trials,
                                      std::uint64_t seed);

/// Resolvent-instance property: on lowering pairs, a delta with K·tau·mu'' = K·mu'·delta
/// and B·xi''·mu'' = B·xi'·mu'·delta, a renaming when tau is.
CheckReport check_resolvent_instance_property(const Rule& rule, std::size_t trials,
                                              std::uint64_t seed);

/// Template replay under instantiation: G·theta·phi replays the template of a derivation from G.
CheckReport check_template_replays_under_instance(const Rule& rule, std::size_t trials,
                                                  std::uint64_t seed);

/// Preq-type determinism: an A-preq derivation replays from A·lambda·shift|Y with
/// sub-resolvents related by a renaming and a shifting.
CheckReport check_preq_determinism(const Rule& rule, std::size_t trials,
                                   std::uint64_t seed);

/// Random derivation prefix with reduction, random applicable choices;
/// used to seed embedding checks.
DerivationRecord random_reduced_prefix(InstanceGen& gen, const Program& p,
                                       const PriorityGoal& g0, const Rule& rule,
                                       Mode mode, std::size_t max_len);

} // namespace rsld::lab
