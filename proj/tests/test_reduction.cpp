#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rsld/parser.hpp"
#include "rsld/property_lab.hpp"
#include "rsld/reduction.hpp"

using namespace rsld;

namespace {

PriorityGoal goal(const std::string& text) { return parse_priority_goal(text); }

std::vector<Atom> list(const std::string& text) { return parse_list_goal(text); }

} // namespace

TEST_CASE("the worked list reduction: two eliminations under one tau") {
    // G = p(z,v),q(w),p(w,v),p(w,x),p(w,y),q(v),q(y) with {x,w} protected
    // reduces to N = q(w),p(w,v),p(w,x),q(v) by tau = {z/w, y/v}.
    auto g = list("p(z,v), q(w), p(w,v), p(w,x), p(w,y), q(v), q(y)");
    auto [n, cert] = reduce_list_goal(g, {"x", "w"});
    CHECK(n == list("q(w), p(w,v), p(w,x), q(v)"));
    CHECK(to_string(cert.tau) == "{y/v, z/w}");
    CHECK(verify_reduction(goal_from_atoms(g), cert.kept, cert, {"x", "w"}));
}

TEST_CASE("no repeated predicate leaves the goal unchanged") {
    auto g = list("p(x), q(y), r");
    auto [n, cert] = reduce_list_goal(g, {});
    CHECK(n == g);
    CHECK(cert.is_identity());
    CHECK(cert.tau.empty());
}

TEST_CASE("a shared variable protects the more general atom") {
    // p(x),q(x),p(a): dropping p(x) would sever the x link to q(x).
    auto g = list("p(x), q(x), p(a)");
    auto [n, cert] = reduce_list_goal(g, {});
    CHECK(n == g);
}

TEST_CASE("initial-goal variables are protected") {
    // p(x),p(a) reduces only when x is not protected.
    auto free_case = reduce_list_goal(list("p(x), p(a)"), {});
    CHECK(free_case.first == list("p(a)"));
    auto protected_case = reduce_list_goal(list("p(x), p(a)"), {"x"});
    CHECK(protected_case.first == list("p(x), p(a)"));
}

TEST_CASE("duplicates drop the later copy") {
    auto [n, cert] = reduce_list_goal(list("q, p(x), q"), {});
    CHECK(n == list("q, p(x)"));
    REQUIRE(cert.eliminations.size() == 1);
    CHECK(cert.eliminations[0].eliminator.priority == Rational(1));
    CHECK(cert.eliminations[0].eliminated[0].priority == Rational(3));
}

TEST_CASE("priority reduction with advancement: the eliminator takes the earliest slot") {
    // G = p(z)[1],q(w)[2],p(a)[3],p(y)[4],q(v)[5] reduces to p(a)[1],q(w)[2]:
    // p(a) advances to replace the first atom it eliminates.
    auto g = goal("p(z)[1], q(w)[2], p(a)[3], p(y)[4], q(v)[5]");
    auto [n, cert] = reduce_priority_goal(g, {});
    CHECK(to_string(n) == "p(a)[1], q(w)[2]");
    CHECK(verify_reduction(g, n, cert, {}));
    for (const auto& e : cert.eliminations) {
        if (e.eliminator.atom == parse_atom("p(a)")) {
            CHECK(e.eliminator.priority == Rational(3));
            CHECK(e.new_priority == Rational(1));
            CHECK(e.eliminated.size() == 2);
        }
    }
}

TEST_CASE("advancement on the requeue-loop resolvent") {
    auto g = goal("q(x1)[1], p[2], q(a)[3]");
    auto advanced = reduce_priority_goal(g, {});
    CHECK(to_string(advanced.first) == "q(a)[1], p[2]");
    CHECK(to_string(advanced.second.tau) == "{x1/a}");

    ReductionOptions off;
    off.advancement = false;
    auto plain = reduce_priority_goal(g, {}, off);
    CHECK(to_string(plain.first) == "p[2], q(a)[3]");
    CHECK(verify_reduction(g, plain.first, plain.second, {}));
}

TEST_CASE("verify_reduction rejects a certificate that severs a link") {
    // dropping p(x) from p(x),q(x),p(a) with tau = {x/a} violates iii).
    auto g = goal("p(x)[1], q(x)[2], p(a)[3]");
    ReductionCertificate cert;
    cert.advancement = false;
    cert.tau.bind("x", Term::compound("a"));
    cert.kept = PriorityGoal({g.at(1), g.at(2)});
    cert.eliminations.push_back({g.at(2), {g.at(0)}, g.at(2).priority});
    CHECK_FALSE(verify_reduction(g, cert.kept, cert, {}));

    // the identity certificate is always valid
    ReductionCertificate id;
    id.kept = g;
    id.advancement = false;
    CHECK(verify_reduction(g, g, id, {}));
}

TEST_CASE("verify_reduction rejects wrong advancement priorities") {
    auto g = goal("q(x1)[1], p[2], q(a)[3]");
    auto [n, cert] = reduce_priority_goal(g, {});
    REQUIRE(verify_reduction(g, n, cert, {}));
    ReductionCertificate broken = cert;
    broken.eliminations[0].new_priority = Rational(99);
    CHECK_FALSE(verify_reduction(g, n, broken, {}));
    // and a tau binding a protected variable
    CHECK_FALSE(verify_reduction(g, n, cert, {"x1"}));
}

TEST_CASE("every produced certificate verifies") {
    for (std::uint64_t t = 0; t < 400; ++t) {
        lab::InstanceGen gen(51, t);
        PriorityGoal g = gen.random_goal(1);
        VariableSet x;
        for (const std::string& v : g.variables()) {
            if (gen.chance(0.3)) x.insert(v);
        }
        ReductionOptions opts;
        opts.advancement = gen.chance(0.5);
        opts.exhaustive = gen.chance(0.3);
        auto [n, cert] = reduce_priority_goal(g, x, opts);
        CHECK(verify_reduction(g, n, cert, x));
    }
}

TEST_CASE("greedy reduction is idempotent") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        lab::InstanceGen gen(52, t);
        PriorityGoal g = gen.random_goal(1);
        auto [n1, c1] = reduce_priority_goal(g, {});
        auto [n2, c2] = reduce_priority_goal(n1, {});
        CHECK(n1 == n2);
        CHECK(c2.is_identity());
    }
}

TEST_CASE("exhaustive is never longer than greedy and both verify") {
    for (std::uint64_t t = 0; t < 200; ++t) {
        lab::GeneratorLimits limits;
        limits.max_goal_len = 8;
        lab::InstanceGen gen(53, t, limits);
        PriorityGoal g = gen.random_goal(1);
        ReductionOptions greedy, exhaustive;
        exhaustive.exhaustive = true;
        auto [ng, cg] = reduce_priority_goal(g, {}, greedy);
        auto [ne, ce] = reduce_priority_goal(g, {}, exhaustive);
        CHECK(ne.size() <= ng.size());
        CHECK(verify_reduction(g, ng, cg, {}));
        CHECK(verify_reduction(g, ne, ce, {}));
    }
}

TEST_CASE("advancement equals the minimum over the eliminated set") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        lab::InstanceGen gen(54, t);
        PriorityGoal g = gen.random_goal(1);
        auto [n, cert] = reduce_priority_goal(g, {});
        for (const auto& e : cert.eliminations) {
            Rational least = e.eliminator.priority;
            for (const PriorityAtom& b : e.eliminated) least = std::min(least, b.priority);
            CHECK(e.new_priority == least);
            CHECK(n.find_tag(e.eliminator.tag)->priority == least);
        }
    }
}
