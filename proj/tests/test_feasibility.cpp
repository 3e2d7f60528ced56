#include <doctest.h>

#include <random>
#include <sstream>

#include "bks/catalog.hpp"
#include "bks/encodings.hpp"
#include "bks/feasibility.hpp"

using namespace bks;

TEST_CASE("tiny problems") {
    FeasibilityProblem p;
    p.reset(2);
    p.add_exactly_one({0, 1});
    p.add_at_most_one(0, 1);
    auto r = solve(p);
    REQUIRE(r.status == Feasibility::feasible);
    CHECK(satisfies(p, r.witness));
    CHECK(r.witness[0] == 1);   // deterministic branching picks x=1
    CHECK(r.witness[1] == 0);

    FeasibilityProblem q;
    q.reset(2);
    q.add_exactly_one({0});
    q.add_exactly_one({1});
    q.add_at_most_one(0, 1);
    CHECK(solve(q).status == Feasibility::infeasible);
}

TEST_CASE("solver vs exhaustive enumeration on random problems") {
    std::mt19937 rng(20240811);
    for (int iter = 0; iter < 1000; ++iter) {
        int n = 4 + int(rng() % 17);   // 4..20 variables
        FeasibilityProblem p;
        p.reset(n);
        int ngroups = 1 + int(rng() % 5);
        std::vector<std::vector<int>> groups;
        for (int g = 0; g < ngroups; ++g) {
            int sz = 1 + int(rng() % 4);
            std::vector<int> vars;
            for (int i = 0; i < sz; ++i) vars.push_back(int(rng() % n));
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            groups.push_back(vars);
            if (rng() % 2)
                p.add_exactly_one(vars);
            else
                p.add_at_least_one(vars);
        }
        int npairs = int(rng() % (2 * n));
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < npairs; ++i) {
            int a = int(rng() % n), b = int(rng() % n);
            if (a == b) continue;
            p.add_at_most_one(a, b);
        }
        auto r = solve(p);
        // brute force over all 2^n assignments
        bool any = false;
        for (std::uint64_t w = 0; w < (std::uint64_t(1) << n) && !any; ++w) {
            std::vector<std::uint8_t> asg(n);
            for (int i = 0; i < n; ++i) asg[i] = w >> i & 1;
            if (satisfies(p, asg)) any = true;
        }
        CAPTURE(iter);
        CHECK((r.status == Feasibility::feasible) == any);
        if (r.status == Feasibility::feasible) CHECK(satisfies(p, r.witness));
    }
}

TEST_CASE("solver determinism") {
    FeasibilityProblem p;
    p.reset(6);
    p.add_exactly_one({0, 1, 2});
    p.add_at_least_one({3, 4, 5});
    p.add_at_most_one(0, 3);
    p.add_at_most_one(1, 4);
    auto r1 = solve(p);
    auto r2 = solve(p);
    CHECK(r1.witness == r2.witness);
    CHECK(r1.decisions == r2.decisions);
}

TEST_CASE("encode_ks basics") {
    // single orthonormal basis in d=3 is trivially colorable
    std::vector<ExactVector> vs;
    for (int i = 0; i < 3; ++i) {
        std::vector<FieldElement> c(3, FieldElement(0));
        c[i] = FieldElement(1);
        vs.push_back(ExactVector(c));
    }
    auto inst = KSInstance::from_coordinates("basis3", 3, {"a", "b", "c"}, vs,
                                             {Basis{1, {0, 1, 2}, 0}});
    auto r = solve(encode_ks(inst));
    CHECK(r.status == Feasibility::feasible);
}

TEST_CASE("encode_ks on catalog sets") {
    for (const char* name : {"CEG-18", "P-24", "P-33", "K-20"}) {
        auto doc = catalog::get(name);
        CAPTURE(name);
        CHECK(solve(encode_ks(doc.instance)).status == Feasibility::infeasible);
    }
}

TEST_CASE("CEG-18 with any one basis deleted becomes colorable") {
    auto inst = catalog::get("CEG-18").instance;
    for (int skip = 0; skip < inst.m(); ++skip) {
        std::vector<Basis> bases;
        for (int i = 0; i < inst.m(); ++i)
            if (i != skip) bases.push_back(inst.basis(i));
        auto sub = KSInstance::from_coordinates("CEG-18-minus", inst.dimension(), inst.ids(),
                                                inst.coordinates(), bases);
        CHECK(solve(encode_ks(sub)).status == Feasibility::feasible);
    }
}

TEST_CASE("encode_bks examples") {
    auto p24 = catalog::get("P-24").instance;
    Mask sa = p24.mask_of_labels({1, 4, 5});
    Mask sb = p24.mask_of_labels({9, 15, 22});
    CHECK(solve(encode_bks(p24, sa, sb)).status == Feasibility::infeasible);

    auto ceg = catalog::get("CEG-18").instance;
    Mask all = ceg.full_basis_mask();
    CHECK(solve(encode_bks(ceg, all, all)).status == Feasibility::infeasible);
    // empty Alice side: conditions vacuous, any per-basis pick works
    CHECK(solve(encode_bks(ceg, 0, all)).status == Feasibility::feasible);

    // witness soundness on a feasible pair
    auto prob = encode_bks(ceg, ceg.mask_of_labels({1, 2, 3}), ceg.mask_of_labels({4, 5, 6}));
    auto r = solve(prob);
    REQUIRE(r.status == Feasibility::feasible);
    CHECK(satisfies(prob, r.witness));
}

TEST_CASE("encode_bks_capable examples") {
    auto ceg = catalog::get("CEG-18").instance;
    Mask c1 = ceg.mask_of_labels({1, 2, 4, 7, 8});
    CHECK(solve(encode_bks_capable(ceg, c1)).status == Feasibility::infeasible);
    // every subset of size <= 4 is colorable, hence not capable
    std::mt19937 rng(5);
    for (int iter = 0; iter < 40; ++iter) {
        Mask sa = 0;
        while (popcount(sa) < 1 + int(rng() % 4)) sa |= Mask(1) << (rng() % 9);
        CAPTURE(sa);
        CHECK(solve(encode_bks_capable(ceg, sa)).status == Feasibility::feasible);
    }
    // empty S_A: any per-basis pick satisfies the at-least-one groups
    CHECK(solve(encode_bks_capable(ceg, 0)).status == Feasibility::feasible);
}

TEST_CASE("capable equivalence with the pair formulation") {
    auto ceg = catalog::get("CEG-18").instance;
    for (Mask sa = 0; sa < 512; sa += 7) CHECK(check_capable_equivalence(ceg, sa));
    auto k20 = catalog::get("K-20").instance;
    std::mt19937 rng(11);
    for (int iter = 0; iter < 60; ++iter) {
        Mask sa = Mask(rng()) % (Mask(1) << k20.m());
        CAPTURE(sa);
        CHECK(check_capable_equivalence(k20, sa));
    }
    // the optimal Alice sides from the bundled reference pairs
    auto s29 = catalog::get("S-29").instance;
    CHECK(check_capable_equivalence(s29, s29.mask_of_labels({5, 6, 9, 10, 13, 14})));
    auto zp = catalog::get("ZP-28").instance;
    CHECK(check_capable_equivalence(zp, zp.mask_of_labels({1, 4, 9, 20, 29, 37})));
}

TEST_CASE("monotonicity and symmetry of B-KS pairs") {
    auto ceg = catalog::get("CEG-18").instance;
    Mask sa = ceg.mask_of_labels({1, 3, 6, 8, 9});       // optimal S_A (C4)
    Mask sb = ceg.mask_of_labels({1, 2, 4, 5, 7, 9});    // optimal S_B (C10)
    REQUIRE(solve(encode_bks(ceg, sa, sb)).status == Feasibility::infeasible);
    CHECK(solve(encode_bks(ceg, sb, sa)).status == Feasibility::infeasible);
    std::mt19937 rng(3);
    for (int iter = 0; iter < 25; ++iter) {
        Mask ea = sa | (Mask(1) << (rng() % 9));
        Mask eb = sb | (Mask(1) << (rng() % 9));
        CHECK(solve(encode_bks(ceg, ea, eb)).status == Feasibility::infeasible);
    }
}

TEST_CASE("cnf emission") {
    FeasibilityProblem p;
    p.reset(3);
    p.add_exactly_one({0, 1});
    p.add_at_least_one({2});
    p.add_at_most_one(0, 2);
    std::ostringstream os;
    p.write_cnf(os);
    CHECK(os.str() == "p cnf 3 4\n1 2 0\n-1 -2 0\n3 0\n-1 -3 0\n");
}
