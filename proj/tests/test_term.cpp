#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rsld/parser.hpp"
#include "rsld/property_lab.hpp"
#include "rsld/term.hpp"

using namespace rsld;

namespace {

Atom atom(const std::string& text) { return parse_atom(text); }
Term term(const std::string& text) { return parse_term(text); }

} // namespace

TEST_CASE("variable lexical classes") {
    CHECK(Term::is_variable_name("x"));
    CHECK(Term::is_variable_name("x1"));
    CHECK(Term::is_variable_name("z42"));
    CHECK(Term::is_variable_name("w"));
    CHECK(Term::is_variable_name("v7"));
    CHECK(Term::is_variable_name("X"));
    CHECK(Term::is_variable_name("_tmp"));
    CHECK_FALSE(Term::is_variable_name("p"));
    CHECK_FALSE(Term::is_variable_name("a"));
    CHECK_FALSE(Term::is_variable_name("foo"));
    CHECK_FALSE(Term::is_variable_name("x1y")); // digit suffix only
    CHECK_FALSE(Term::is_variable_name("t"));
    CHECK_FALSE(Term::is_variable_name("s"));
}

TEST_CASE("mgu single binding") {
    auto theta = mgu(atom("p(x)"), atom("p(a)"));
    REQUIRE(theta);
    CHECK(theta->apply(atom("p(x)")) == atom("p(a)"));
    CHECK(theta->size() == 1);
}

TEST_CASE("mgu predicate clash") {
    CHECK_FALSE(mgu(atom("p(x)"), atom("q(x)")));
    CHECK_FALSE(mgu(atom("p(x)"), atom("p(x,y)")));
}

TEST_CASE("mgu chained variables gives idempotent form") {
    // p(x,y) vs p(y,a): worked Martelli-Montanari gives {x/a, y/a}.
    auto theta = mgu(atom("p(x,y)"), atom("p(y,a)"));
    REQUIRE(theta);
    CHECK(to_string(*theta) == "{x/a, y/a}");
    CHECK(theta->is_idempotent());
}

TEST_CASE("mgu occurs check") {
    CHECK_FALSE(mgu(atom("p(x)"), atom("p(f(x))")));
    CHECK(mgu(atom("p(x)"), atom("p(f(x))"), false)); // disabled on request
    CHECK(mgu(atom("p(x)"), atom("p(f(y))")));
}

TEST_CASE("mgu idempotence and relevance on random atom pairs") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        lab::GeneratorLimits limits;
        limits.function_free = false;
        lab::InstanceGen gen(11, t, limits);
        Atom a = gen.random_atom();
        Atom b = gen.random_atom();
        auto theta = mgu(a, b);
        if (!theta) continue;
        CHECK(theta->apply(a) == theta->apply(b));
        CHECK(theta->is_idempotent());
        VariableSet in;
        a.collect_variables(in);
        b.collect_variables(in);
        for (const std::string& v : theta->variables()) CHECK(in.count(v));
    }
}

TEST_CASE("apply substitution") {
    Substitution s;
    s.bind("x", term("a"));
    CHECK(s.apply(atom("p(x)")) == atom("p(a)"));
    CHECK(Substitution{}.apply(atom("p(x)")) == atom("p(x)"));

    // Simultaneous, not recursive: x -> f(y) leaves the introduced y alone.
    Substitution f;
    f.bind("x", term("f(y)"));
    CHECK(f.apply(atom("p(x,y)")) == atom("p(f(y),y)"));
}

TEST_CASE("substitution composition order") {
    Substitution first, then;
    first.bind("x", term("y"));
    then.bind("y", term("a"));
    Substitution both = first.compose(then);
    CHECK(both.apply(term("x")) == term("a"));
    CHECK(both.apply(term("y")) == term("a"));
}

TEST_CASE("rename apart") {
    Program p = parse_program("p(x) <- q(x).\n"
                              "r <-.\n");
    FreshVarGen gen;

    auto [renamed, xi] = rename_apart(p.clauses[0], {"x"}, gen);
    CHECK(renamed.head == atom("p(v1)"));
    CHECK(renamed.body[0] == atom("q(v1)"));
    CHECK(xi.substitution().size() == 1);

    auto [fact, eps] = rename_apart(p.clauses[1], {"x"}, gen);
    CHECK(fact.head == atom("r"));
    CHECK(eps.empty());

    // Monotone counter: successive calls never reuse a fresh name.
    auto [again, xi2] = rename_apart(p.clauses[0], {"x"}, gen);
    CHECK(again.head == atom("p(v2)"));

    // The avoid set is skipped, not reused.
    FreshVarGen gen2;
    auto [skipped, xi3] = rename_apart(p.clauses[0], {"v1", "x"}, gen2);
    CHECK(skipped.head == atom("p(v2)"));
}

TEST_CASE("rename apart freshness property") {
    for (std::uint64_t t = 0; t < 200; ++t) {
        lab::InstanceGen gen(12, t);
        Clause c = gen.random_clause();
        PriorityGoal g = gen.random_goal();
        VariableSet avoid = g.variables();
        FreshVarGen fresh;
        auto [renamed, xi] = rename_apart(c, avoid, fresh);
        for (const std::string& v : renamed.variables()) CHECK_FALSE(avoid.count(v));
        std::vector<Atom> before{c.head}, after{renamed.head};
        for (const Atom& a : c.body) before.push_back(a);
        for (const Atom& a : renamed.body) after.push_back(a);
        CHECK(variant_of(after, before));
    }
}

TEST_CASE("variant_of examples") {
    std::vector<Atom> f{atom("p(x)"), atom("q(x)")};
    std::vector<Atom> g{atom("p(y)"), atom("q(y)")};
    auto tau = variant_of(f, g);
    REQUIRE(tau);
    CHECK(tau->apply(atom("p(x)")) == atom("p(y)"));

    std::vector<Atom> broken{atom("p(y)"), atom("q(z)")}; // linking lost
    CHECK_FALSE(variant_of(f, broken));

    CHECK(variant_of(std::vector<Atom>{}, std::vector<Atom>{}));
    CHECK_FALSE(variant_of(f, std::vector<Atom>{atom("p(x)")}));
}

TEST_CASE("variant_of is an equivalence") {
    for (std::uint64_t t = 0; t < 200; ++t) {
        lab::InstanceGen gen(13, t);
        PriorityGoal base = gen.random_goal();
        std::vector<Atom> g1 = base.atom_list();
        std::vector<Atom> g2 = gen.random_renaming(base.variables()).substitution().apply(g1);
        // reflexive
        auto self = variant_of(g1, g1);
        REQUIRE(self);
        CHECK(self->empty());
        // symmetric via the inverse renaming
        auto fwd = variant_of(g1, g2);
        REQUIRE(fwd);
        auto back = variant_of(g2, g1);
        REQUIRE(back);
        for (std::size_t i = 0; i < g1.size(); ++i) {
            CHECK(back->apply(fwd->apply(g1[i])) == g1[i]);
        }
        // transitive onto a third variant
        Substitution perm;
        std::size_t k = 0;
        for (const std::string& v : variables_of(g2)) {
            perm.bind(v, Term::variable("u" + std::to_string(++k)));
        }
        std::vector<Atom> g3 = perm.apply(g2);
        auto snd = variant_of(g2, g3);
        REQUIRE(snd);
        CHECK(variant_of(g1, g3));
    }
}

TEST_CASE("subsumes_as_list examples") {
    // single atom onto a later one
    auto lam = subsumes_as_list(std::vector<Atom>{atom("p(x)")},
                                std::vector<Atom>{atom("q(a)"), atom("p(b)")});
    REQUIRE(lam);
    CHECK(lam->apply(atom("p(x)")) == atom("p(b)"));

    // order-preserving embedding with a shared variable
    auto lam2 = subsumes_as_list(std::vector<Atom>{atom("p(x)"), atom("q(x)")},
                                 std::vector<Atom>{atom("p(a)"), atom("r(a)"), atom("q(a)")});
    REQUIRE(lam2);
    CHECK(to_string(*lam2) == "{x/a}");

    CHECK_FALSE(subsumes_as_list(std::vector<Atom>{atom("p(a)")},
                                 std::vector<Atom>{atom("p(b)")}));

    // embedding must preserve order
    CHECK_FALSE(subsumes_as_list(std::vector<Atom>{atom("q(x)"), atom("p(x)")},
                                 std::vector<Atom>{atom("p(a)"), atom("q(a)")}));
}

TEST_CASE("subsumes_as_list finds instances of itself") {
    for (std::uint64_t t = 0; t < 200; ++t) {
        lab::InstanceGen gen(14, t);
        PriorityGoal g = gen.random_goal();
        std::vector<Atom> base = g.atom_list();
        Substitution inst = gen.random_substitution(g.variables());
        // interleave extra atoms around the instance
        std::vector<Atom> full;
        for (const Atom& a : base) {
            if (gen.chance(0.4)) full.push_back(gen.random_atom());
            full.push_back(inst.apply(a));
        }
        auto lam = subsumes_as_list(base, full);
        CHECK(lam);
    }
}

TEST_CASE("renamings proper for an expression") {
    Substitution fresh;
    fresh.bind("x", term("y1"));
    CHECK(fresh.is_renaming_for({"x", "z"}));

    Substitution collapse;
    collapse.bind("x", term("z")); // z free in the expression
    CHECK(collapse.is_renaming());
    CHECK_FALSE(collapse.is_renaming_for({"x", "z"}));

    Substitution swap;
    swap.bind("x", term("z"));
    swap.bind("z", term("x"));
    CHECK(swap.is_renaming_for({"x", "z"}));

    Substitution instantiate;
    instantiate.bind("x", term("a"));
    CHECK_FALSE(instantiate.is_renaming());
}

TEST_CASE("clause split parts") {
    Program p = parse_program("p <- q(x) | p.\n");
    CHECK(p.clauses[0].stack_part() == std::vector<Atom>{atom("q(x)")});
    CHECK(p.clauses[0].queue_part() == std::vector<Atom>{atom("p")});
}
