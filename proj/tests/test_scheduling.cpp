#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rsld/engine.hpp"
#include "rsld/errors.hpp"
#include "rsld/parser.hpp"
#include "rsld/property_lab.hpp"
#include "rsld/scheduling.hpp"

using namespace rsld;

namespace {

PriorityGoal goal(const std::string& text) { return parse_priority_goal(text); }

std::vector<Atom> atoms_of(const PriorityGoal& g) { return g.atom_list(); }

StepRecord step_via(const PriorityGoal& g, const Clause& c, const Rule& rule) {
    FreshVarGen gen;
    auto step = p_derivation_step(g, c, 0, rule.policy, {}, gen, 0);
    REQUIRE(step);
    return *step;
}

} // namespace

TEST_CASE("select_atom picks the minimum priority") {
    CHECK(select_atom(goal("b[3], q[1]")).atom == Atom{"q", {}});
    CHECK(select_atom(goal("a[1]")).atom == Atom{"a", {}});
    CHECK_THROWS_AS(select_atom(PriorityGoal{}), EmptyGoal);
}

TEST_CASE("stack rule stacks the body in order before the old resolvent") {
    Program p = parse_program("p <- q(x) | p.\n");
    StepRecord step = step_via(goal("p[1], q(a)[2]"), p.clauses[0], Rule::stack());
    CHECK(atoms_of(step.resolvent) ==
          std::vector<Atom>{parse_atom("q(v1)"), parse_atom("p"), parse_atom("q(a)")});
    // everything below the old resolvent
    CHECK(step.resolvent.at(1).priority < Rational(2));
}

TEST_CASE("queue rule positions the body after the old resolvent") {
    Program p = parse_program("a <- q.\n");
    StepRecord step = step_via(goal("a[2], b[3]"), p.clauses[0], Rule::queue());
    CHECK(atoms_of(step.resolvent) == std::vector<Atom>{Atom{"b", {}}, Atom{"q", {}}});
    CHECK(step.resolvent.at(1).priority > Rational(3));
}

TEST_CASE("fact clauses leave the remainder unchanged") {
    Program p = parse_program("a <-.\n");
    StepRecord step = step_via(goal("a[1], b[2]"), p.clauses[0], Rule::stack());
    CHECK(atoms_of(step.resolvent) == std::vector<Atom>{Atom{"b", {}}});
    CHECK(step.resolvent.at(0).priority == Rational(2));
}

TEST_CASE("per-clause splits via the sq rule") {
    Program p = parse_program("a <- b1, b2 | b3.\n");
    StepRecord step = step_via(goal("a[5], k[6]"), p.clauses[0], Rule::sq());
    CHECK(atoms_of(step.resolvent) ==
          std::vector<Atom>{Atom{"b1", {}}, Atom{"b2", {}}, Atom{"k", {}}, Atom{"b3", {}}});
}

TEST_CASE("center insert places before the centre when odd, at it when even") {
    Program p = parse_program("p(x) <- q(x).\n"
                              "s <- p(b).\n");
    // odd remainder: immediately before the centre
    StepRecord odd = step_via(goal("s[1], p(a)[2]"), p.clauses[1], Rule::center());
    CHECK(atoms_of(odd.resolvent) == std::vector<Atom>{parse_atom("p(b)"), parse_atom("p(a)")});

    // even remainder: at the centre
    StepRecord even = step_via(goal("s[1], p(a)[1.5], r[2]"), p.clauses[1], Rule::center());
    CHECK(atoms_of(even.resolvent) ==
          std::vector<Atom>{parse_atom("p(a)"), parse_atom("p(b)"), parse_atom("r")});
    CHECK(even.resolvent.at(1).priority > Rational(3, 2));
    CHECK(even.resolvent.at(1).priority < Rational(2));

    // empty remainder: body order at the front
    Program two = parse_program("s <- m1, m2.\n");
    StepRecord alone = step_via(goal("s[1]"), two.clauses[0], Rule::center());
    CHECK(atoms_of(alone.resolvent) == std::vector<Atom>{Atom{"m1", {}}, Atom{"m2", {}}});
}

TEST_CASE("pred-special places after the first old atom for its predicate") {
    Program p = parse_program("r <-.\n"
                              "s(x,y) <- t(x,y).\n"
                              "q(x,y) <- r, s(z,y), r, q(x,z).\n");
    Rule rule = Rule::pred_special("s");

    // the special predicate: s(x2,x1) rewritten inside s|q|t
    StepRecord special =
        step_via(goal("s(x2,x1)[1], q(x,x2)[2], t(x1,x)[3]"), p.clauses[1], rule);
    CHECK(atoms_of(special.resolvent) ==
          std::vector<Atom>{parse_atom("q(x,x2)"), parse_atom("t(x2,x1)"),
                            parse_atom("t(x1,x)")});

    // other predicates behave as a stack rule
    StepRecord plain = step_via(goal("q(x,x1)[1], t(x1,x)[2]"), p.clauses[2], rule);
    CHECK(atoms_of(plain.resolvent) ==
          std::vector<Atom>{parse_atom("r"), parse_atom("s(v3,x1)"), parse_atom("r"),
                            parse_atom("q(x,v3)"), parse_atom("t(x1,x)")});

    // empty remainder: body order at the front
    StepRecord alone = step_via(goal("s(a,b)[4]"), p.clauses[1], rule);
    CHECK(atoms_of(alone.resolvent) == std::vector<Atom>{parse_atom("t(a,b)")});
}

TEST_CASE("odd-even selection") {
    ListSelectionRule rule = make_odd_even_selection();
    CHECK(rule({Atom{"a", {}}, Atom{"b", {}}}) == 1);                  // even: last
    CHECK(rule({Atom{"a", {}}, Atom{"b", {}}, Atom{"c", {}}}) == 0);   // odd: first
    CHECK(rule({Atom{"a", {}}}) == 0);
    CHECK(rule(std::vector<Atom>(5, Atom{"a", {}})) == 0);
}

TEST_CASE("stack-queue steps satisfy the three-segment decomposition") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        lab::InstanceGen gen(41, t);
        PriorityGoal g = gen.random_goal(1);
        Clause c = gen.random_clause_for(g.at(0).atom);
        Rule rule = t % 3 == 0 ? Rule::stack() : t % 3 == 1 ? Rule::queue() : Rule::sq();
        FreshVarGen fresh;
        auto step = p_derivation_step(g, c, 0, rule.policy, {}, fresh, 0);
        if (!step) continue;

        std::size_t split = *rule.sq_split_of(c);
        std::optional<Rational> min_k, max_k;
        if (g.size() > 1) {
            min_k = g.at(1).priority;
            max_k = g.at(g.size() - 1).priority;
        }
        for (std::size_t m = 0; m < c.body.size(); ++m) {
            if (m + 1 < c.body.size()) {
                // body-internal order preserved
                CHECK(step->new_priorities[m] < step->new_priorities[m + 1]);
            }
            if (m < split) {
                if (min_k) CHECK(step->new_priorities[m] < *min_k);
            } else {
                if (max_k) CHECK(step->new_priorities[m] > *max_k);
            }
        }
    }
}

TEST_CASE("policies never veto an applicable clause") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        lab::InstanceGen gen(42, t);
        PriorityGoal g = gen.random_goal(1);
        Clause c = gen.random_clause_for(g.at(0).atom);
        FreshVarGen probe;
        auto [renamed, xi] = rename_apart(c, g.variables(), probe);
        bool unifiable = mgu(g.at(0).atom, renamed.head).has_value();
        for (const Rule& rule :
             {Rule::stack(), Rule::queue(), Rule::sq(), Rule::center(),
              Rule::pred_special("p")}) {
            FreshVarGen fresh;
            auto step = p_derivation_step(g, c, 0, rule.policy, {}, fresh, 0);
            CHECK(step.has_value() == unifiable);
        }
    }
}

TEST_CASE("built-in policies are deterministic across p-variants") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        lab::InstanceGen gen(43, t);
        PriorityGoal g = gen.random_goal(1);
        Clause c = gen.random_clause_for(g.at(0).atom);

        Renaming lam = gen.random_renaming(g.variables());
        std::vector<Rational> fresh = gen.random_priorities(g.size());
        std::vector<PriorityAtom> moved;
        for (std::size_t i = 0; i < g.size(); ++i) {
            moved.push_back({lam.apply(g.at(i).atom), fresh[i], g.at(i).tag});
        }
        PriorityGoal variant(moved);

        for (const Rule& rule :
             {Rule::stack(), Rule::queue(), Rule::sq(), Rule::center(),
              Rule::pred_special("p")}) {
            FreshVarGen g1, g2;
            auto s1 = p_derivation_step(g, c, 0, rule.policy, {}, g1, 0);
            auto s2 = p_derivation_step(variant, c, 0, rule.policy, {}, g2, 0);
            REQUIRE(s1.has_value() == s2.has_value());
            if (!s1) continue;
            // identical origin interleavings
            auto labels = [](const StepRecord& s, const PriorityGoal& start) {
                std::vector<std::pair<bool, std::int64_t>> out;
                for (const PriorityAtom& a : s.resolvent.atoms()) {
                    bool body = !start.find_tag(a.tag);
                    out.emplace_back(body, a.tag.pos);
                }
                return out;
            };
            CHECK(labels(*s1, g) == labels(*s2, variant));
        }
    }
}
