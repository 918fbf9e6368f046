#include "rsld/property_lab.hpp"

#include "rsld/errors.hpp"
#include "rsld/parser.hpp"
#include "rsld/reduction.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <sstream>

namespace rsld::lab {

namespace {

const char* kPredicateNames[] = {"p", "q", "r", "s"};
const char* kConstantNames[] = {"a", "b", "d"};
const char* kVariableNames[] = {"x", "y", "z", "w"};

DeriveOptions psld_options(std::size_t max_steps = 64) {
    DeriveOptions o;
    o.mode = Mode::Psld;
    o.max_steps = max_steps;
    return o;
}

} // namespace

InstanceGen::InstanceGen(std::uint64_t seed, std::uint64_t trial, GeneratorLimits limits)
    : limits_(limits) {
    std::seed_seq sseq{seed, trial, std::uint64_t{0x9e3779b97f4a7c15}};
    rng_ = std::mt19937_64(sseq);
}

std::size_t InstanceGen::pick(std::size_t bound) {
    assert(bound > 0);
    return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng_);
}

bool InstanceGen::chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
}

std::string InstanceGen::predicate_name(std::size_t i) const { return kPredicateNames[i]; }

Term InstanceGen::random_term(bool allow_fresh_vars) {
    if (!limits_.function_free && chance(0.15)) {
        return Term::compound("f", {random_term(allow_fresh_vars)});
    }
    if (chance(0.5)) {
        return Term::variable(kVariableNames[pick(std::min<std::size_t>(
            limits_.variables, std::size(kVariableNames)))]);
    }
    return Term::compound(kConstantNames[pick(std::min<std::size_t>(
        limits_.constants, std::size(kConstantNames)))]);
}

Atom InstanceGen::random_atom() {
    std::size_t i = pick(std::min<std::size_t>(limits_.predicates, std::size(kPredicateNames)));
    std::size_t arity = i % (limits_.max_arity + 1);
    std::vector<Term> args;
    for (std::size_t k = 0; k < arity; ++k) args.push_back(random_term());
    return Atom{predicate_name(i), std::move(args)};
}

Atom InstanceGen::most_general_atom(const std::string& predicate, std::size_t arity) {
    std::vector<Term> args;
    for (std::size_t k = 0; k < arity; ++k) {
        args.push_back(Term::variable("z" + std::to_string(k + 1)));
    }
    return Atom{predicate, std::move(args)};
}

Rational InstanceGen::random_priority() {
    int numerator = static_cast<int>(pick(33)) - 16;
    int denominator = 1 << pick(3);
    return Rational(numerator, denominator);
}

std::vector<Rational> InstanceGen::random_priorities(std::size_t count) {
    std::set<Rational> out;
    while (out.size() < count) out.insert(random_priority());
    return {out.begin(), out.end()};
}

PriorityGoal InstanceGen::random_goal(std::size_t min_len) {
    std::size_t len = min_len + pick(limits_.max_goal_len - min_len + 1);
    std::vector<Rational> priorities = random_priorities(len);
    std::vector<PriorityAtom> atoms;
    for (std::size_t i = 0; i < len; ++i) {
        atoms.push_back({random_atom(), priorities[i],
                         LineageTag{LineageTag::kInitial, static_cast<std::int64_t>(i)}});
    }
    return PriorityGoal(std::move(atoms));
}

Clause InstanceGen::random_clause() {
    Clause c;
    c.head = random_atom();
    std::size_t len = pick(limits_.max_body_len + 1);
    for (std::size_t i = 0; i < len; ++i) c.body.push_back(random_atom());
    c.stack_split = pick(len + 1);
    return c;
}

Clause InstanceGen::random_clause_for(const Atom& target) {
    Clause c = random_clause();
    if (chance(0.5)) {
        c.head = Atom{target.predicate, {}};
        for (std::size_t k = 0; k < target.args.size(); ++k) c.head.args.push_back(random_term());
    } else {
        c.head = most_general_atom(target.predicate, target.args.size());
    }
    if (!mgu(target, c.head)) c.head = most_general_atom(target.predicate, target.args.size());
    return c;
}

Program InstanceGen::random_program(std::size_t clauses) {
    Program p;
    for (std::size_t i = 0; i < clauses; ++i) {
        Clause c = random_clause();
        c.id = "c" + std::to_string(i + 1);
        p.clauses.push_back(std::move(c));
    }
    return p;
}

Substitution InstanceGen::random_substitution(const VariableSet& vars) {
    Substitution s;
    for (const std::string& v : vars) {
        if (chance(0.4)) s.bind(v, random_term());
    }
    return s;
}

Renaming InstanceGen::random_renaming(const VariableSet& vars) {
    Substitution s;
    std::size_t i = 0;
    for (const std::string& v : vars) {
        s.bind(v, Term::variable("y" + std::to_string(900 + i++)));
    }
    return Renaming(std::move(s));
}

// ---------------------------------------------------------------------------
// Congruent lowering

namespace {

std::set<LineageTag> goal_tags(const PriorityGoal& g) {
    std::set<LineageTag> out;
    for (const PriorityAtom& a : g.atoms()) out.insert(a.tag);
    return out;
}

struct InterleaveLabel {
    bool from_k;
    LineageTag tag; // K: the goal tag; B: (step, body position)

    bool operator==(const InterleaveLabel&) const = default;
};

// The K / B tag sequence of a resolvent in priority order, context dropped.
std::vector<InterleaveLabel> interleaving(const PriorityGoal& resolvent,
                                          const std::set<LineageTag>& k_tags,
                                          const std::set<LineageTag>& context_tags) {
    std::vector<InterleaveLabel> out;
    for (const PriorityAtom& a : resolvent.atoms()) {
        if (context_tags.count(a.tag)) continue;
        out.push_back({k_tags.count(a.tag) > 0, a.tag});
    }
    return out;
}

void validate_instance(const LoweringInstance& inst) {
    if (inst.base_goal.empty()) throw InvalidInstance("base goal is empty");
    if (inst.base_step.selected.tag != inst.base_goal.at(0).tag) {
        throw InvalidInstance("base step does not rewrite the optimum atom");
    }
    if (inst.base_step.new_priorities.size() != inst.clause.body.size() ||
        inst.specialised_step.new_priorities.size() != inst.clause.body.size()) {
        throw InvalidInstance("steps do not apply the recorded clause");
    }
    // A placement is a shifting of the body p-goal: body order is preserved.
    for (const auto* step : {&inst.base_step, &inst.specialised_step}) {
        for (std::size_t m = 1; m < step->new_priorities.size(); ++m) {
            if (!(step->new_priorities[m - 1] < step->new_priorities[m])) {
                throw InvalidInstance("body placement is not order-preserving");
            }
        }
    }
    // Specialised goal = a·lambda·sigma | (K·lambda·sigma + X), tag for tag.
    std::size_t matched = 0;
    for (const PriorityAtom& a : inst.base_goal.atoms()) {
        const PriorityAtom* image = inst.specialised_goal.find_tag(a.tag);
        if (!image) throw InvalidInstance("base atom missing from specialised goal");
        if (image->atom != inst.lambda.apply(a.atom)) {
            throw InvalidInstance("specialised atom is not the lambda instance");
        }
        if (image->priority != inst.sigma.apply(a.priority)) {
            throw InvalidInstance("specialised priority is not the sigma shift");
        }
        ++matched;
    }
    if (matched + inst.context.size() != inst.specialised_goal.size()) {
        throw InvalidInstance("specialised goal does not decompose into instance + context");
    }
    for (const PriorityAtom& x : inst.context.atoms()) {
        const PriorityAtom* there = inst.specialised_goal.find_tag(x.tag);
        if (!there || there->atom != x.atom || there->priority != x.priority) {
            throw InvalidInstance("context atom missing from specialised goal");
        }
    }
    if (inst.specialised_step.selected.tag != inst.base_goal.at(0).tag) {
        throw InvalidInstance("specialised step does not rewrite the instance of a");
    }
}

} // namespace

bool is_congruent_lowering(const LoweringInstance& inst) {
    validate_instance(inst);
    std::set<LineageTag> k_tags = goal_tags(inst.base_goal);
    k_tags.erase(inst.base_goal.at(0).tag);
    std::set<LineageTag> context_tags = goal_tags(inst.context);

    auto lhs = interleaving(inst.base_step.resolvent, k_tags, {});
    auto rhs = interleaving(inst.specialised_step.resolvent, k_tags, context_tags);
    return lhs == rhs;
}

namespace {

struct SupportPair {
    std::string key; // atom value, per the congruent-lowering K / B equalities
    Rational priority;
};

// All key-respecting bijections between the two supports, searched for a
// strictly increasing one.
bool increasing_bijection_exists(std::vector<SupportPair> from, std::vector<SupportPair> to) {
    if (from.size() != to.size()) return false;
    std::sort(from.begin(), from.end(),
              [](const SupportPair& a, const SupportPair& b) { return a.priority < b.priority; });
    std::vector<bool> used(to.size(), false);
    // from is scanned in ascending priority, so the image sequence must be
    // chosen ascending as well.
    auto search = [&](auto&& self, std::size_t i, const Rational* floor) -> bool {
        if (i == from.size()) return true;
        for (std::size_t j = 0; j < to.size(); ++j) {
            if (used[j] || to[j].key != from[i].key) continue;
            if (floor && !(*floor < to[j].priority)) continue;
            used[j] = true;
            if (self(self, i + 1, &to[j].priority)) return true;
            used[j] = false;
        }
        return false;
    };
    return search(search, 0, nullptr);
}

} // namespace

bool is_congruent_lowering_bruteforce(const LoweringInstance& inst) {
    validate_instance(inst);
    std::vector<SupportPair> from, to;
    // K side: the shifting must map K (base priorities) onto K·sigma, atom
    // value for atom value.
    for (std::size_t i = 1; i < inst.base_goal.size(); ++i) {
        const PriorityAtom& a = inst.base_goal.at(i);
        from.push_back({"K:" + to_string(a.atom), a.priority});
        to.push_back({"K:" + to_string(a.atom), inst.sigma.apply(a.priority)});
    }
    // B side: clause-body atoms under the two placements.
    for (std::size_t m = 0; m < inst.clause.body.size(); ++m) {
        std::string key = "B:" + to_string(inst.clause.body[m]);
        from.push_back({key, inst.base_step.new_priorities[m]});
        to.push_back({key, inst.specialised_step.new_priorities[m]});
    }
    return increasing_bijection_exists(std::move(from), std::move(to));
}

LoweringInstance random_manual_lowering_instance(InstanceGen& gen) {
    LoweringInstance inst;
    inst.base_goal = gen.random_goal(1);
    inst.clause = gen.random_clause();
    inst.clause.id = "m1";

    // sigma: order-preserving re-prioritisation of the base support.
    std::vector<Rational> shifted = gen.random_priorities(inst.base_goal.size());
    std::map<Rational, Rational> sig;
    for (std::size_t i = 0; i < inst.base_goal.size(); ++i) {
        sig.emplace(inst.base_goal.at(i).priority, shifted[i]);
    }
    inst.sigma = Shifting{std::move(sig)};
    inst.lambda = gen.random_substitution(inst.base_goal.variables());

    std::set<Rational> taken(shifted.begin(), shifted.end());
    std::vector<PriorityAtom> context;
    std::size_t xlen = gen.pick(3);
    while (context.size() < xlen) {
        // strictly above the selected atom's new priority
        Rational p = shifted[0] + Rational(1 + static_cast<int>(gen.pick(16)),
                                           1 << gen.pick(3));
        if (taken.count(p)) continue;
        taken.insert(p);
        context.push_back({gen.random_atom(), p,
                           LineageTag{LoweringInstance::kContextStep,
                                      static_cast<std::int64_t>(context.size())}});
    }
    inst.context = PriorityGoal(context);

    std::vector<PriorityAtom> specialised;
    for (const PriorityAtom& a : inst.base_goal.atoms()) {
        specialised.push_back(
            {inst.lambda.apply(a.atom), inst.sigma.apply(a.priority), a.tag});
    }
    for (const PriorityAtom& x : inst.context.atoms()) specialised.push_back(x);
    inst.specialised_goal = PriorityGoal(std::move(specialised));

    // Arbitrary placements: the body lands at random fresh priorities on
    // each side, unconstrained by any policy. Placement is still a shifting
    // of the body, so body-internal order is preserved.
    auto manual_step = [&](const PriorityGoal& start) {
        StepRecord step;
        step.clause_id = inst.clause.id;
        step.selected_index = 0;
        step.selected = start.at(0);
        std::vector<PriorityAtom> atoms(start.atoms().begin() + 1, start.atoms().end());
        std::set<Rational> used;
        for (const PriorityAtom& a : atoms) used.insert(a.priority);
        std::set<Rational> placed;
        while (placed.size() < inst.clause.body.size()) {
            Rational p = gen.random_priority();
            while (used.count(p)) p = p + Rational(1, 64);
            used.insert(p);
            placed.insert(p);
        }
        std::size_t m = 0;
        for (const Rational& p : placed) {
            step.new_priorities.push_back(p);
            atoms.push_back({inst.clause.body[m], p,
                             LineageTag{0, static_cast<std::int64_t>(m)}});
            ++m;
        }
        step.resolvent = PriorityGoal(std::move(atoms));
        return step;
    };
    inst.base_step = manual_step(inst.base_goal);
    inst.specialised_step = manual_step(inst.specialised_goal);
    return inst;
}

std::optional<LoweringInstance> make_lowering_instance(const PriorityGoal& base,
                                                       const Clause& clause,
                                                       const Rule& rule,
                                                       const Substitution& lambda,
                                                       const Shifting& sigma,
                                                       const PriorityGoal& context) {
    if (base.empty()) throw InvalidInstance("base goal is empty");
    LoweringInstance inst;
    inst.base_goal = base;
    inst.clause = clause;
    inst.lambda = lambda;
    inst.sigma = sigma;
    inst.context = context;

    std::vector<PriorityAtom> specialised;
    for (const PriorityAtom& a : base.atoms()) {
        specialised.push_back({lambda.apply(a.atom), sigma.apply(a.priority), a.tag});
    }
    for (const PriorityAtom& x : context.atoms()) specialised.push_back(x);
    try {
        inst.specialised_goal = PriorityGoal(std::move(specialised));
    } catch (const PriorityClash&) {
        throw InvalidInstance("context priorities collide with the shifted instance");
    }
    if (inst.specialised_goal.at(0).tag != base.at(0).tag) {
        throw InvalidInstance("a context atom outranks the rewritten atom");
    }

    FreshVarGen gen1, gen2;
    auto ds1 = p_derivation_step(base, clause, 0, rule.policy, {}, gen1, 0);
    if (!ds1) return std::nullopt;
    auto ds2 = p_derivation_step(inst.specialised_goal, clause, 0, rule.policy, {}, gen2, 0);
    if (!ds2) return std::nullopt;
    inst.base_step = std::move(*ds1);
    inst.specialised_step = std::move(*ds2);
    return inst;
}

// ---------------------------------------------------------------------------
// Fixed paper instances

namespace {

PriorityGoal tag_context(const std::vector<std::pair<Atom, Rational>>& atoms) {
    std::vector<PriorityAtom> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        out.push_back({atoms[i].first, atoms[i].second,
                       LineageTag{LoweringInstance::kContextStep,
                                  static_cast<std::int64_t>(i)}});
    }
    return PriorityGoal(std::move(out));
}

// The center-insert counterexample: G = s[1],p(a)[2] specialised to
// s[1],p(a)[1.5],r[2] with X = r[2]; clause s <- p(b).
std::optional<LoweringInstance> fixed_center_instance(const Rule& rule) {
    PriorityGoal base = goal_from_tagged(
        {{Atom{"s", {}}, Rational(1)}, {Atom{"p", {Term::compound("a")}}, Rational(2)}});
    Clause c;
    c.head = Atom{"s", {}};
    c.body = {Atom{"p", {Term::compound("b")}}};
    c.stack_split = 1;
    c.id = "c2";
    Shifting sigma({{Rational(1), Rational(1)}, {Rational(2), Rational(3, 2)}});
    PriorityGoal context = tag_context({{Atom{"r", {}}, Rational(2)}});
    return make_lowering_instance(base, c, rule, {}, sigma, context);
}

// A context atom slotted between the selected atom and the old resolvent;
// separates after-first-old placement from plain stacking.
std::optional<LoweringInstance> fixed_front_context_instance(const Rule& rule) {
    std::string pred = rule.kind == Rule::Kind::PredSpecial ? rule.special_pred : "s";
    PriorityGoal base = goal_from_tagged(
        {{Atom{pred, {Term::variable("x")}}, Rational(1)}, {Atom{"q", {}}, Rational(2)}});
    Clause c;
    c.head = Atom{pred, {Term::variable("y")}};
    c.body = {Atom{"r", {Term::variable("y")}}};
    c.stack_split = 1;
    c.id = "cx";
    Shifting sigma = Shifting::identity_on({Rational(1), Rational(2)});
    PriorityGoal context = tag_context({{Atom{"p", {}}, Rational(3, 2)}});
    return make_lowering_instance(base, c, rule, {}, sigma, context);
}

std::string describe(const LoweringInstance& inst) {
    std::ostringstream out;
    out << "base " << to_string(inst.base_goal) << " --" << to_string(inst.clause)
        << "--> " << to_string(inst.base_step.resolvent) << " ; specialised "
        << to_string(inst.specialised_goal) << " --> "
        << to_string(inst.specialised_step.resolvent) << " ; lambda "
        << to_string(inst.lambda) << " sigma " << to_string(inst.sigma) << " X {"
        << to_string(inst.context) << "}";
    return out.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Specialisation independence

namespace {

std::optional<LoweringInstance> random_lowering_instance(InstanceGen& gen,
                                                         const Rule& rule) {
    PriorityGoal base = gen.random_goal(1);
    const Atom& selected = base.at(0).atom;
    Clause clause = gen.random_clause_for(selected);
    clause.id = "g1";

    Substitution lambda = gen.random_substitution(base.variables());
    // Order-preserving re-prioritisation of the base support.
    std::vector<Rational> fresh = gen.random_priorities(base.size());
    std::map<Rational, Rational> sig;
    for (std::size_t i = 0; i < base.size(); ++i) sig.emplace(base.at(i).priority, fresh[i]);
    Shifting sigma{std::move(sig)};

    // Context atoms strictly above the selected atom's new priority and clear
    // of the shifted support.
    std::size_t xlen = gen.pick(3);
    std::vector<std::pair<Atom, Rational>> context;
    std::set<Rational> taken(fresh.begin(), fresh.end());
    const Rational floor = fresh[0];
    while (context.size() < xlen) {
        Rational p =
            floor + Rational(1 + static_cast<int>(gen.pick(16)), 1 << gen.pick(3));
        if (taken.count(p)) continue;
        taken.insert(p);
        context.emplace_back(gen.random_atom(), p);
    }

    auto attempt = [&](const Substitution& l) {
        return make_lowering_instance(base, clause, rule, l, sigma, tag_context(context));
    };
    if (auto inst = attempt(lambda)) return inst;
    return attempt(Substitution{}); // lambda killed the mgu; retry unspecialised
}

} // namespace

std::optional<LoweringInstance> random_independence_instance(InstanceGen& gen,
                                                             const Rule& rule) {
    return random_lowering_instance(gen, rule);
}

namespace {

void run_fixed_independence_instances(const Rule& rule, std::uint64_t seed,
                                      CheckReport& report) {
    for (auto maker : {fixed_center_instance, fixed_front_context_instance}) {
        if (auto inst = maker(rule)) {
            ++report.trials;
            if (!is_congruent_lowering(*inst)) {
                report.failures.push_back({seed, 0, describe(*inst)});
            }
        }
    }
}

} // namespace

CheckReport check_spec_independence(const Rule& rule, std::size_t trials,
                                    std::uint64_t seed) {
    CheckReport report;
    report.name = "spec-independence(" + rule.name() + ")";
    run_fixed_independence_instances(rule, seed, report);
    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        auto inst = random_lowering_instance(gen, rule);
        ++report.trials;
        if (!inst) {
            ++report.vacuous;
            continue;
        }
        if (!is_congruent_lowering(*inst)) {
            report.failures.push_back({seed, t, describe(*inst)});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Lowering lemma

namespace {

struct LoweringSearch {
    const Program& program;
    const Rule& rule;
    const std::vector<std::size_t>& wanted; // E as clause indices
    std::set<LineageTag> g_tags;
    std::size_t max_extra_steps = 8;
    std::size_t budget = 20000;

    std::optional<DerivationRecord> found;

    bool extend(const PriorityGoal& start, std::vector<std::size_t> choices,
                std::size_t consumed) {
        if (budget == 0) return false;
        --budget;
        DerivationRecord rec =
            derive_with_choices(program, start, rule, psld_options(), choices);
        if (rec.num_steps() < choices.size()) return false; // choice inapplicable
        if (consumed == wanted.size()) {
            found = std::move(rec);
            return true;
        }
        const PriorityGoal& n = rec.final_goal();
        if (n.empty()) return false;
        if (choices.size() >= wanted.size() + max_extra_steps) return false;
        std::set<LineageTag> closure = lineage_closure(rec, 0, g_tags);
        const PriorityAtom& selected = n.at(0);
        if (closure.count(selected.tag)) {
            // Derivation position owned by the G part: the next clause of E
            // is forced.
            choices.push_back(wanted[consumed]);
            return extend(start, std::move(choices), consumed + 1);
        }
        for (std::size_t ci = 0; ci < program.clauses.size(); ++ci) {
            std::vector<std::size_t> next = choices;
            next.push_back(ci);
            if (extend(start, std::move(next), consumed)) return true;
        }
        return false;
    }
};

} // namespace

LoweringOutcome run_lowering_instance(const Program& p, const Rule& rule,
                                      const PriorityGoal& g, const Substitution& gamma,
                                      const Shifting& tau, const PriorityGoal& context,
                                      const std::vector<std::size_t>& template_choices,
                                      std::string* detail) {
    DerivationRecord base = derive_with_choices(p, g, rule, psld_options(), template_choices);
    if (base.num_steps() < template_choices.size()) {
        if (detail) *detail = "base derivation does not exist";
        return LoweringOutcome::NoWitnessDerivation;
    }
    const PriorityGoal& q = base.final_goal();

    std::vector<PriorityAtom> specialised;
    for (const PriorityAtom& a : g.atoms()) {
        specialised.push_back({gamma.apply(a.atom), tau.apply(a.priority), a.tag});
    }
    for (const PriorityAtom& x : context.atoms()) specialised.push_back(x);
    PriorityGoal start(std::move(specialised));

    LoweringSearch search{p, rule, template_choices, goal_tags(g), 8, 20000, {}};
    if (!search.extend(start, {}, 0) || !search.found) {
        if (detail) *detail = "no witness derivation within bounds";
        return LoweringOutcome::NoWitnessDerivation;
    }
    PriorityGoal sub = sub_resolvent(*search.found, 0, goal_tags(g));
    if (sub.size() != q.size()) {
        if (detail) {
            *detail = "sub-resolvent " + to_string(sub) + " vs " + to_string(q);
        }
        return LoweringOutcome::Fail;
    }
    // R/(G·gamma·tau) = Q·sigma·rho: pointwise instance match in priority
    // order; the shifting then exists by construction.
    Substitution sigma;
    for (std::size_t i = 0; i < q.size(); ++i) {
        auto extended = match_atom(q.at(i).atom, sub.at(i).atom, {}, sigma);
        if (!extended) {
            if (detail) {
                *detail = "no instance map: " + to_string(q) + " vs " + to_string(sub);
            }
            return LoweringOutcome::Fail;
        }
        sigma = *extended;
    }
    return LoweringOutcome::Pass;
}

namespace {

// The fixed center-insert lowering-lemma instance.
struct CenterLemmaInstance {
    Program program;
    PriorityGoal goal;
    Shifting tau;
    PriorityGoal context;
    std::vector<std::size_t> template_choices;
};

CenterLemmaInstance fixed_lowering_lemma_instance() {
    CenterLemmaInstance inst;
    inst.program = parse_program("p(x) <- q(x).\n"
                                 "s <- p(b).\n");
    inst.goal = goal_from_tagged(
        {{Atom{"s", {}}, Rational(1)}, {Atom{"p", {Term::compound("a")}}, Rational(2)}});
    inst.tau = Shifting({{Rational(1), Rational(1)}, {Rational(2), Rational(3, 2)}});
    inst.context = tag_context({{Atom{"r", {}}, Rational(2)}});
    inst.template_choices = {1, 0}; // s <- p(b), then p(x) <- q(x)
    return inst;
}

} // namespace

CheckReport check_lowering_lemma(const Rule& rule, std::size_t trials, std::uint64_t seed) {
    CheckReport report;
    report.name = "lowering-lemma(" + rule.name() + ")";

    CenterLemmaInstance fixed = fixed_lowering_lemma_instance();
    std::string detail;
    ++report.trials;
    if (run_lowering_instance(fixed.program, rule, fixed.goal, {}, fixed.tau, fixed.context,
                              fixed.template_choices, &detail) != LoweringOutcome::Pass) {
        report.failures.push_back({seed, 0, "fixed instance: " + detail});
    }

    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        Program p = gen.random_program(3);
        PriorityGoal g = gen.random_goal(1);
        DerivationRecord base =
            random_reduced_prefix(gen, p, g, rule, Mode::Psld, 1 + gen.pick(3));
        std::vector<std::size_t> choices;
        for (const DerivationEntry& e : base.entries) {
            if (e.step) choices.push_back(e.step->clause_index);
        }
        ++report.trials;
        if (choices.empty()) {
            ++report.vacuous;
            continue;
        }

        Substitution gamma = gen.chance(0.5)
                                 ? gen.random_renaming(g.variables()).substitution()
                                 : gen.random_substitution(g.variables());
        std::vector<Rational> fresh = gen.random_priorities(g.size());
        std::map<Rational, Rational> tmap;
        for (std::size_t i = 0; i < g.size(); ++i) tmap.emplace(g.at(i).priority, fresh[i]);
        Shifting tau{std::move(tmap)};

        std::set<Rational> taken(fresh.begin(), fresh.end());
        std::vector<std::pair<Atom, Rational>> context;
        std::size_t xlen = gen.pick(3);
        while (context.size() < xlen) {
            Rational pr = gen.random_priority();
            if (taken.count(pr)) continue;
            taken.insert(pr);
            context.emplace_back(gen.random_atom(), pr);
        }

        std::string why;
        switch (run_lowering_instance(p, rule, g, gamma, tau, tag_context(context), choices,
                                      &why)) {
        case LoweringOutcome::Pass: break;
        case LoweringOutcome::NoWitnessDerivation: ++report.vacuous; break;
        case LoweringOutcome::Fail:
            report.failures.push_back({seed, t, why});
            break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Lifting lemma

namespace {

struct LiftingInstance {
    Program program;
    PriorityGoal general; // G
    PriorityGoal start;   // X + G·gamma·tau
    std::set<LineageTag> g_tags;
};

LiftingInstance fixed_lifting_instance() {
    LiftingInstance inst;
    inst.program = parse_program("p <- p, r, r.\n"
                                 "r <-.\n");
    inst.general = goal_from_tagged({{Atom{"p", {}}, Rational(1)},
                                     {Atom{"s", {}}, Rational(2)},
                                     {Atom{"s", {}}, Rational(3)}});
    std::vector<PriorityAtom> start;
    start.push_back({Atom{"p", {}}, Rational(11, 10), inst.general.at(0).tag});
    start.push_back({Atom{"s", {}}, Rational(2), inst.general.at(1).tag});
    start.push_back({Atom{"s", {}}, Rational(5, 2), inst.general.at(2).tag});
    PriorityGoal context = tag_context(
        {{Atom{"r", {}}, Rational(3, 2)}, {Atom{"r", {}}, Rational(8, 5)}});
    for (const PriorityAtom& x : context.atoms()) start.push_back(x);
    inst.start = PriorityGoal(std::move(start));
    inst.g_tags = goal_tags(inst.general);
    return inst;
}

// Lifted replay: extract D / (G gamma tau) and rerun it from G via the rule.
std::optional<std::string> run_lifting_instance(const LiftingInstance& inst,
                                                const Rule& rule,
                                                const DerivationRecord& specialised) {
    std::vector<std::size_t> sub_steps = sub_template(specialised, 0, inst.g_tags);
    std::vector<std::size_t> choices;
    for (std::size_t j : sub_steps) {
        choices.push_back(specialised.entries[j].step->clause_index);
    }
    DerivationRecord lifted =
        derive_with_choices(inst.program, inst.general, rule, psld_options(), choices);
    if (lifted.num_steps() < choices.size()) {
        return "lifted template fails at step " + std::to_string(lifted.num_steps() + 1) +
               " of " + std::to_string(choices.size());
    }
    return std::nullopt;
}

} // namespace

CheckReport check_lifting_lemma(const Rule& rule, std::size_t trials, std::uint64_t seed) {
    CheckReport report;
    report.name = "lifting-lemma(" + rule.name() + ")";

    {
        LiftingInstance fixed = fixed_lifting_instance();
        DeriveOptions opts = psld_options(4);
        DerivationRecord specialised = derive(fixed.program, fixed.start, rule, opts);
        ++report.trials;
        if (auto why = run_lifting_instance(fixed, rule, specialised)) {
            report.failures.push_back({seed, 0, "fixed instance: " + *why});
        }
    }

    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        LiftingInstance inst;
        inst.program = gen.random_program(3);
        inst.general = gen.random_goal(1);
        inst.g_tags = goal_tags(inst.general);

        Substitution gamma = gen.chance(0.5)
                                 ? gen.random_renaming(inst.general.variables()).substitution()
                                 : gen.random_substitution(inst.general.variables());
        std::vector<Rational> fresh = gen.random_priorities(inst.general.size());
        std::vector<PriorityAtom> start;
        std::set<Rational> taken;
        for (std::size_t i = 0; i < inst.general.size(); ++i) {
            start.push_back({gamma.apply(inst.general.at(i).atom), fresh[i],
                             inst.general.at(i).tag});
            taken.insert(fresh[i]);
        }
        std::size_t xlen = gen.pick(3);
        std::size_t made = 0;
        while (made < xlen) {
            Rational pr = gen.random_priority();
            if (taken.count(pr)) continue;
            taken.insert(pr);
            start.push_back({gen.random_atom(), pr,
                             LineageTag{LoweringInstance::kContextStep,
                                        static_cast<std::int64_t>(made)}});
            ++made;
        }
        inst.start = PriorityGoal(std::move(start));

        DerivationRecord specialised =
            random_reduced_prefix(gen, inst.program, inst.start, rule, Mode::Psld,
                                  1 + gen.pick(4));
        ++report.trials;
        if (specialised.num_steps() == 0) {
            ++report.vacuous;
            continue;
        }
        if (auto why = run_lifting_instance(inst, rule, specialised)) {
            report.failures.push_back({seed, t, *why});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Determinism lemma and derivation combination

CheckReport check_determinism(const Rule& rule, std::size_t trials, std::uint64_t seed) {
    CheckReport report;
    report.name = "determinism(" + rule.name() + ")";
    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        Program p = gen.random_program(3);
        PriorityGoal g = gen.random_goal(1);

        DerivationRecord base =
            random_reduced_prefix(gen, p, g, rule, Mode::Psld, 1 + gen.pick(4));
        std::vector<std::size_t> choices;
        for (const DerivationEntry& e : base.entries) {
            if (e.step) choices.push_back(e.step->clause_index);
        }
        ++report.trials;
        if (choices.empty()) {
            ++report.vacuous;
            continue;
        }

        // p-variant of the initial goal: fresh names, re-shifted priorities.
        Renaming lambda = gen.random_renaming(g.variables());
        std::vector<Rational> fresh = gen.random_priorities(g.size());
        std::vector<PriorityAtom> variant_atoms;
        for (std::size_t i = 0; i < g.size(); ++i) {
            variant_atoms.push_back({lambda.apply(g.at(i).atom), fresh[i], g.at(i).tag});
        }
        PriorityGoal variant(std::move(variant_atoms));

        DerivationRecord replay = derive_with_choices(p, variant, rule, psld_options(), choices);
        if (replay.num_steps() < choices.size()) {
            report.failures.push_back(
                {seed, t, "template not replayable from a p-variant"});
            continue;
        }
        if (!p_variant_of(replay.final_goal(), base.final_goal())) {
            report.failures.push_back(
                {seed, t,
                 "resolvents not p-variants: " + to_string(base.final_goal()) + " vs " +
                     to_string(replay.final_goal())});
            continue;
        }

        // Combination: re-running the tail from the midpoint resolvent as a
        // fresh derivation yields a p-variant of the direct run.
        std::size_t cut = choices.size() / 2;
        if (cut > 0 && cut < choices.size()) {
            std::vector<std::size_t> head(choices.begin(), choices.begin() + cut);
            std::vector<std::size_t> tail(choices.begin() + cut, choices.end());
            DerivationRecord first = derive_with_choices(p, g, rule, psld_options(), head);
            DerivationRecord second =
                derive_with_choices(p, first.final_goal(), rule, psld_options(), tail);
            if (second.num_steps() < tail.size() ||
                !p_variant_of(base.final_goal(), second.final_goal())) {
                report.failures.push_back({seed, t, "combination property violated"});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Duplication tolerance

namespace {

struct DuplicationSearch {
    const Program& program;
    const Rule& rule;
    const std::vector<std::size_t>& wanted; // X
    std::size_t need_size = 0;              // #Q
    std::size_t depth_cap = 0;
    std::size_t budget = 200000;

    bool dfs(const PriorityGoal& goal, VariableSet avoid, FreshVarGen gen,
             std::size_t depth, std::size_t matched) {
        if (budget == 0) return false;
        --budget;
        if (matched == wanted.size() && goal.size() >= need_size) return true;
        if (depth == depth_cap || goal.empty()) return false;
        // Not enough depth left to consume the rest of the template.
        if (wanted.size() - matched > depth_cap - depth) return false;
        // The next wanted clause first: witnesses mostly follow the template.
        std::vector<std::size_t> order;
        if (matched < wanted.size()) order.push_back(wanted[matched]);
        for (std::size_t ci = 0; ci < program.clauses.size(); ++ci) {
            if (matched < wanted.size() && wanted[matched] == ci) continue;
            order.push_back(ci);
        }
        for (std::size_t ci : order) {
            FreshVarGen child_gen = gen;
            auto step = p_derivation_step(goal, program.clauses[ci], ci, rule.policy,
                                          avoid, child_gen,
                                          static_cast<std::int64_t>(depth));
            if (!step) continue;
            VariableSet child_avoid = avoid;
            for (const auto& [var, value] : step->renaming.substitution().bindings()) {
                child_avoid.insert(value.name());
            }
            std::size_t next = matched;
            if (matched < wanted.size() && wanted[matched] == ci) ++next;
            if (dfs(step->resolvent, std::move(child_avoid), child_gen, depth + 1, next)) {
                return true;
            }
        }
        return false;
    }
};

// Every derivation (prefix) from `goal` up to `depth`: template and final size.
void enumerate_derivations(const Program& p, const Rule& rule, const PriorityGoal& goal,
                           VariableSet avoid, FreshVarGen gen, std::size_t depth,
                           std::vector<std::size_t>& current,
                           const std::function<void(const std::vector<std::size_t>&,
                                                    const PriorityGoal&)>& visit) {
    visit(current, goal);
    if (depth == 0 || goal.empty()) return;
    for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
        FreshVarGen child_gen = gen;
        auto step = p_derivation_step(goal, p.clauses[ci], ci, rule.policy, avoid, child_gen,
                                      static_cast<std::int64_t>(current.size()));
        if (!step) continue;
        VariableSet child_avoid = avoid;
        for (const auto& [var, value] : step->renaming.substitution().bindings()) {
            child_avoid.insert(value.name());
        }
        current.push_back(ci);
        enumerate_derivations(p, rule, step->resolvent, std::move(child_avoid), child_gen,
                              depth - 1, current, visit);
        current.pop_back();
    }
}

} // namespace

DuplicationInstanceResult run_duplication_instance(const Program& p, const Rule& rule,
                                                   const PriorityGoal& base,
                                                   const PriorityGoal& duplicated,
                                                   std::size_t depth,
                                                   std::size_t node_budget) {
    DuplicationInstanceResult result;
    std::vector<std::size_t> current;
    enumerate_derivations(
        p, rule, base, base.variables(), FreshVarGen{}, depth, current,
        [&](const std::vector<std::size_t>& x, const PriorityGoal& q) {
            ++result.derivations;
            DuplicationSearch search{p, rule, x, q.size(), 2 * depth + 2, node_budget};
            if (!search.dfs(duplicated, duplicated.variables(), FreshVarGen{}, 0, 0)) {
                ++result.unmatched;
                if (search.budget == 0) result.budget_exhausted = true;
            }
        });
    return result;
}

CheckReport check_duplication(const Rule& rule, std::size_t trials, std::uint64_t seed) {
    CheckReport report;
    report.name = "duplication(" + rule.name() + ")";
    const std::size_t depth = 4;

    for (std::uint64_t t = 1; t <= trials; ++t) {
        // Ground function-free programs keep both enumerations exact.
        InstanceGen ground_gen(seed ^ 0x5bd1e995, t);
        Program p;
        for (std::size_t i = 0; i < 3; ++i) {
            Clause c;
            c.head = Atom{kPredicateNames[ground_gen.pick(3)], {}};
            std::size_t len = ground_gen.pick(3);
            for (std::size_t k = 0; k < len; ++k) {
                c.body.push_back(Atom{kPredicateNames[ground_gen.pick(3)], {}});
            }
            c.stack_split = ground_gen.pick(len + 1);
            c.id = "c" + std::to_string(i + 1);
            p.clauses.push_back(std::move(c));
        }

        // A|B|C|D with B nonempty; duplicate B after C.
        std::size_t lens[4] = {ground_gen.pick(2), 1 + ground_gen.pick(2),
                               ground_gen.pick(2), ground_gen.pick(2)};
        std::vector<PriorityAtom> base_atoms, dup_atoms;
        int next_priority = 1;
        std::int64_t tag = 0;
        std::vector<PriorityAtom> b_segment;
        for (std::size_t seg = 0; seg < 4; ++seg) {
            for (std::size_t i = 0; i < lens[seg]; ++i) {
                PriorityAtom a{Atom{kPredicateNames[ground_gen.pick(3)], {}},
                               Rational(next_priority++),
                               LineageTag{LineageTag::kInitial, tag++}};
                base_atoms.push_back(a);
                dup_atoms.push_back(a);
                if (seg == 1) b_segment.push_back(a);
            }
            if (seg == 2) {
                for (const PriorityAtom& b : b_segment) {
                    dup_atoms.push_back({b.atom, Rational(next_priority++),
                                         LineageTag{LineageTag::kInitial, tag++}});
                }
            }
        }
        PriorityGoal base_goal(base_atoms);
        PriorityGoal dup_goal(dup_atoms);

        ++report.trials;
        DuplicationInstanceResult result =
            run_duplication_instance(p, rule, base_goal, dup_goal, depth);
        if (result.unmatched > 0) {
            report.failures.push_back(
                {seed, t,
                 std::to_string(result.unmatched) + " of " +
                     std::to_string(result.derivations) +
                     " derivations have no qualifying duplicate from " +
                     to_string(dup_goal)});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Embedding checks

DerivationRecord random_reduced_prefix(InstanceGen& gen, const Program& p,
                                       const PriorityGoal& g0, const Rule& rule,
                                       Mode mode, std::size_t max_len) {
    DeriveOptions opts;
    opts.mode = mode;
    opts.max_steps = max_len + 4;
    std::vector<std::size_t> choices;
    std::vector<std::size_t> selections;
    DerivationRecord rec = derive_with_choices(p, g0, rule, opts, choices, selections);
    while (choices.size() < max_len && rec.status == DerivationStatus::BoundExceeded) {
        const PriorityGoal& n = rec.final_goal();
        std::vector<std::pair<std::size_t, std::size_t>> options;
        for (std::size_t sel = 0; sel < (is_list_mode(mode) ? n.size() : 1); ++sel) {
            for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) options.emplace_back(sel, ci);
        }
        std::shuffle(options.begin(), options.end(), gen.rng());
        bool extended = false;
        for (auto [sel, ci] : options) {
            std::vector<std::size_t> c2 = choices;
            std::vector<std::size_t> s2 = selections;
            c2.push_back(ci);
            if (is_list_mode(mode)) s2.push_back(sel);
            DerivationRecord rec2 = derive_with_choices(p, g0, rule, opts, c2, s2);
            if (rec2.num_steps() == c2.size()) {
                choices = std::move(c2);
                selections = std::move(s2);
                rec = std::move(rec2);
                extended = true;
                break;
            }
        }
        if (!extended) break;
    }
    return rec;
}

std::optional<std::string> replay_list_embedding(const DerivationRecord& d) {
    PriorityGoal shadow = d.initial; // G'_j, rebuilt without reductions
    FreshVarGen gen;
    VariableSet avoid = d.initial.variables();

    for (std::size_t j = 0; j < d.entries.size(); ++j) {
        const DerivationEntry& entry = d.entries[j];
        const PriorityGoal& n = entry.reduced;
        // N_j tau_j ⊆_L G'_j: the tag subsequence must be a variant, order
        // preserved.
        std::vector<Atom> embedded;
        std::size_t sel_shadow = shadow.size();
        for (const PriorityAtom& a : shadow.atoms()) {
            if (n.find_tag(a.tag)) embedded.push_back(a.atom);
        }
        if (embedded.size() != n.size()) {
            return "step " + std::to_string(j) + ": reduced resolvent not embedded";
        }
        std::vector<Atom> n_list = n.atom_list();
        if (!variant_of(n_list, embedded)) {
            return "step " + std::to_string(j) + ": embedded sublist is not a variant";
        }
        if (!entry.step) break;

        for (std::size_t i = 0; i < shadow.size(); ++i) {
            if (shadow.at(i).tag == entry.step->selected.tag) {
                sel_shadow = i;
                break;
            }
        }
        if (sel_shadow == shadow.size()) {
            return "step " + std::to_string(j) + ": selected atom lost in the replay";
        }
        const Clause& clause = d.program.clauses[entry.step->clause_index];
        auto step = list_derivation_step(shadow, sel_shadow, clause,
                                         entry.step->clause_index, avoid, gen,
                                         static_cast<std::int64_t>(j));
        if (!step) {
            return "step " + std::to_string(j) + ": clause inapplicable in the replay";
        }
        for (const auto& [var, value] : step->renaming.substitution().bindings()) {
            avoid.insert(value.name());
        }
        shadow = step->resolvent;
    }
    return std::nullopt;
}

EmbeddingSearchResult search_priority_embedding(const DerivationRecord& d,
                                                const Rule& rule,
                                                std::size_t node_budget) {
    std::vector<std::size_t> wanted;
    for (const DerivationEntry& e : d.entries) {
        if (e.step) wanted.push_back(e.step->clause_index);
    }
    EmbeddingSearchResult result;
    DuplicationSearch search{d.program, rule, wanted, d.final_goal().size(),
                             2 * wanted.size() + 6, node_budget};
    result.found = search.dfs(d.initial, d.initial.variables(), FreshVarGen{}, 0, 0);
    result.budget_exhausted = !result.found && search.budget == 0;
    return result;
}

namespace {

Program sample_program(std::size_t index) {
    switch (index % 3) {
    case 0: return parse_program("p <- q(x) | p.\nq(a) <-.\n");
    case 1: return parse_program("p <- q | p.\nq <-.\n");
    default: return parse_program("q(x,y) <- q(y,x) | r.\nr <-.\n");
    }
}

PriorityGoal sample_goal(std::size_t index, InstanceGen& gen) {
    std::vector<Rational> pr = gen.random_priorities(2);
    switch (index % 3) {
    case 0:
        return PriorityGoal({{Atom{"p", {}}, pr[0], {LineageTag::kInitial, 0}},
                             {Atom{"q", {Term::compound("a")}}, pr[1],
                              {LineageTag::kInitial, 1}}});
    case 1:
        return PriorityGoal({{Atom{"p", {}}, pr[0], {LineageTag::kInitial, 0}},
                             {Atom{"q", {}}, pr[1], {LineageTag::kInitial, 1}}});
    default:
        return PriorityGoal({{Atom{"q", {Term::variable("x"), Term::variable("y")}}, pr[0],
                              {LineageTag::kInitial, 0}},
                             {Atom{"r", {}}, pr[1], {LineageTag::kInitial, 1}}});
    }
}

} // namespace

CheckReport check_embedding(const Rule& rule, std::size_t trials, std::uint64_t seed) {
    CheckReport report;
    report.name = "embedding(" + rule.name() + ")";
    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        Program p = sample_program(t);
        PriorityGoal g0 = sample_goal(t, gen);
        ++report.trials;

        // List-mode constructive replay of an RSLD prefix.
        std::vector<Atom> list_atoms = g0.atom_list();
        DerivationRecord list_prefix = random_reduced_prefix(
            gen, p, goal_from_atoms(list_atoms), rule, Mode::Rsld, 1 + gen.pick(6));
        if (auto why = replay_list_embedding(list_prefix)) {
            report.failures.push_back({seed, t, "list embedding: " + *why});
            continue;
        }

        // Bounded search for the pure p-SLD superlist derivation.
        if (rule.sq_split_of(p.clauses[0]).has_value()) {
            DerivationRecord prefix =
                random_reduced_prefix(gen, p, g0, rule, Mode::Prsld, 1 + gen.pick(6));
            EmbeddingSearchResult found = search_priority_embedding(prefix, rule);
            if (!found.found) {
                report.failures.push_back(
                    {seed, t,
                     found.budget_exhausted ? "priority embedding: node budget exhausted"
                                            : "priority embedding: no superlist derivation"});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Single-step lifting

CheckReport check_single_step_lifting(const Rule& rule, std::size_t trials,
                                      std::uint64_t seed) {
    CheckReport report;
    report.name = "single-step-lifting(" + rule.name() + ")";
    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        PriorityGoal lower_goal = gen.random_goal(1);
        Clause c = gen.random_clause_for(lower_goal.at(0).atom);
        ++report.trials;

        FreshVarGen g1;
        auto lower = p_derivation_step(lower_goal, c, 0, rule.policy, {}, g1, 0);
        if (!lower) {
            ++report.vacuous;
            continue;
        }

        // A more general selected atom over an unrelated context F.
        Atom general = gen.most_general_atom(lower_goal.at(0).atom.predicate,
                                             lower_goal.at(0).atom.args.size());
        PriorityGoal f = gen.random_goal(1);
        std::vector<PriorityAtom> lifted_atoms;
        Rational top = f.min_priority() - 1;
        lifted_atoms.push_back({general, top, LineageTag{LineageTag::kInitial, 99}});
        for (const PriorityAtom& a : f.atoms()) lifted_atoms.push_back(a);

        VariableSet avoid_v = {"x", "y", "zz1", "zz2"}; // arbitrary finite V
        FreshVarGen g2;
        auto lifted = p_derivation_step(PriorityGoal(lifted_atoms), c, 0, rule.policy,
                                        avoid_v, g2, 0);
        if (!lifted) {
            report.failures.push_back({seed, t, "clause does not lift to the general atom"});
            continue;
        }
        for (const auto& [var, value] : lifted->renaming.substitution().bindings()) {
            if (avoid_v.count(value.name())) {
                report.failures.push_back({seed, t, "fresh variable collided with V"});
                break;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Resolvent-instance property

CheckReport check_resolvent_instance_property(const Rule& rule, std::size_t trials,
                                              std::uint64_t seed) {
    CheckReport report;
    report.name = "resolvent-instance(" + rule.name() + ")";
    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        auto inst = random_lowering_instance(gen, rule);
        ++report.trials;
        if (!inst) {
            ++report.vacuous;
            continue;
        }
        // delta with K·tau·mu'' = K·mu'·delta and B·xi''·mu'' = B·xi'·mu'·delta,
        // matched tag for tag / body position for body position.
        std::vector<Atom> pattern, target;
        for (std::size_t i = 1; i < inst->base_goal.size(); ++i) {
            LineageTag tag = inst->base_goal.at(i).tag;
            pattern.push_back(inst->base_step.resolvent.find_tag(tag)->atom);
            target.push_back(inst->specialised_step.resolvent.find_tag(tag)->atom);
        }
        for (std::size_t m = 0; m < inst->clause.body.size(); ++m) {
            LineageTag tag{0, static_cast<std::int64_t>(m)};
            pattern.push_back(inst->base_step.resolvent.find_tag(tag)->atom);
            target.push_back(inst->specialised_step.resolvent.find_tag(tag)->atom);
        }
        Substitution delta;
        bool ok = true;
        for (std::size_t i = 0; i < pattern.size() && ok; ++i) {
            auto extended = match_atom(pattern[i], target[i], {}, delta);
            if (!extended) ok = false;
            else delta = *extended;
        }
        if (!ok) {
            report.failures.push_back({seed, t, "no delta: " + describe(*inst)});
            continue;
        }
        if (inst->lambda.is_renaming_for(inst->base_goal.variables()) &&
            !delta.is_renaming()) {
            report.failures.push_back(
                {seed, t, "delta not a renaming under a renaming tau: " + describe(*inst)});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Template replay under instantiation

CheckReport check_template_replays_under_instance(const Rule& rule, std::size_t trials,
                                                  std::uint64_t seed) {
    CheckReport report;
    report.name = "template-instance-replay(" + rule.name() + ")";
    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        Program p = gen.random_program(3);
        PriorityGoal g = gen.random_goal(1);
        DerivationRecord base =
            random_reduced_prefix(gen, p, g, rule, Mode::Psld, 1 + gen.pick(4));
        std::vector<std::size_t> choices;
        for (const DerivationEntry& e : base.entries) {
            if (e.step) choices.push_back(e.step->clause_index);
        }
        ++report.trials;
        if (choices.empty()) {
            ++report.vacuous;
            continue;
        }
        Substitution theta = base.entries.back().accumulated;
        if (base.entries.back().step) {
            theta = theta.compose(base.entries.back().step->unifier);
        }
        PriorityGoal instantiated = g.apply(theta);
        Substitution phi = gen.random_substitution(instantiated.variables());
        DerivationRecord replay =
            derive_with_choices(p, instantiated.apply(phi), rule, psld_options(), choices);
        if (replay.num_steps() < choices.size()) {
            report.failures.push_back(
                {seed, t, "template does not replay from G·theta·phi"});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Preq-type determinism

CheckReport check_preq_determinism(const Rule& rule, std::size_t trials,
                                   std::uint64_t seed) {
    CheckReport report;
    report.name = "preq-determinism(" + rule.name() + ")";
    StackQueueSplit split{rule.kind == Rule::Kind::Stack  ? StackQueueSplit::Kind::AllStack
                          : rule.kind == Rule::Kind::Queue ? StackQueueSplit::Kind::AllQueue
                                                           : StackQueueSplit::Kind::PerClause};
    for (std::uint64_t t = 1; t <= trials; ++t) {
        InstanceGen gen(seed, t);
        Program p = gen.random_program(3);
        PriorityGoal a_part = gen.random_goal(1);
        PriorityGoal x_part;
        {
            // X strictly after A, fresh tags.
            std::size_t xlen = 1 + gen.pick(2);
            std::vector<PriorityAtom> xs;
            Rational base = a_part.max_priority();
            for (std::size_t i = 0; i < xlen; ++i) {
                base = base + 1;
                xs.push_back({gen.random_atom(), base,
                              LineageTag{LoweringInstance::kContextStep,
                                         static_cast<std::int64_t>(i)}});
            }
            x_part = PriorityGoal(std::move(xs));
        }
        PriorityGoal start = concat(a_part, x_part);

        DerivationRecord run =
            random_reduced_prefix(gen, p, start, rule, Mode::Psld, 1 + gen.pick(4));
        // Trim to the A-preq prefix.
        std::vector<std::size_t> choices;
        {
            std::set<LineageTag> stacked = goal_tags(a_part);
            for (const DerivationEntry& e : run.entries) {
                if (!e.step) break;
                if (!stacked.count(e.step->selected.tag)) break;
                choices.push_back(e.step->clause_index);
                const Clause& c = p.clauses[e.step->clause_index];
                std::size_t s = split.split_of(c);
                auto j = static_cast<std::int64_t>(&e - run.entries.data());
                for (std::size_t m = 0; m < s; ++m) {
                    stacked.insert(LineageTag{j, static_cast<std::int64_t>(m)});
                }
            }
        }
        ++report.trials;
        if (choices.empty()) {
            ++report.vacuous;
            continue;
        }
        DerivationRecord preq = derive_with_choices(p, start, rule, psld_options(), choices);

        // A·lambda·shift | Y with Y unrelated.
        Renaming lambda = gen.random_renaming(a_part.variables());
        std::vector<Rational> fresh = gen.random_priorities(a_part.size());
        std::vector<PriorityAtom> lifted;
        for (std::size_t i = 0; i < a_part.size(); ++i) {
            lifted.push_back({lambda.apply(a_part.at(i).atom), fresh[i], a_part.at(i).tag});
        }
        Rational floor = fresh.back();
        std::size_t ylen = gen.pick(3);
        for (std::size_t i = 0; i < ylen; ++i) {
            floor = floor + 1;
            lifted.push_back({gen.random_atom(), floor,
                              LineageTag{-3, static_cast<std::int64_t>(i)}});
        }
        DerivationRecord other =
            derive_with_choices(p, PriorityGoal(lifted), rule, psld_options(), choices);
        if (other.num_steps() < choices.size()) {
            report.failures.push_back({seed, t, "A-preq template not replayable"});
            continue;
        }
        PriorityGoal sub_q = sub_resolvent(preq, 0, goal_tags(a_part));
        PriorityGoal sub_r = sub_resolvent(other, 0, goal_tags(a_part));
        if (!p_variant_of(sub_q, sub_r)) {
            report.failures.push_back(
                {seed, t,
                 "sub-resolvents unrelated: " + to_string(sub_q) + " vs " + to_string(sub_r)});
        }
    }
    return report;
}

} // namespace rsld::lab
