#pragma once

#include <string>
#include <vector>

#include "bks/feasibility.hpp"
#include "bks/instance.hpp"

namespace bks {

/// KS noncolorability test (conditions I and II): one variable per vector,
/// at-most-one across every orthogonal pair, exactly-one per basis.  The
/// instance is a KS set iff the problem is infeasible.
inline void encode_ks_into(const KSInstance& inst, FeasibilityProblem& p) {
    p.reset(inst.n());
    for (int v = 0; v < inst.n(); ++v) {
        Mask row = v + 1 >= 64 ? 0 : inst.adjacency(v) >> (v + 1) << (v + 1);   // pairs once
        while (row) {
            int u = lowest_bit(row);
            row &= row - 1;
            p.add_at_most_one(v, u);
        }
    }
    for (const auto& b : inst.bases()) p.add_exactly_one(b.members);
}

inline FeasibilityProblem encode_ks(const KSInstance& inst) {
    FeasibilityProblem p;
    encode_ks_into(inst, p);
    std::vector<std::string> names = inst.ids();
    p.set_names(std::move(names));
    return p;
}

/// Bipartite KS test for (S_A, S_B): distinct variables per (vector, basis)
/// pair and per side (a basis appearing on both sides gets independent
/// copies), exactly-one per basis per side, and at-most-one across every
/// orthogonal A-side/B-side pair.  Because distinct vectors of a shared
/// basis are orthogonal, the cross constraints force the two copies of a
/// shared basis to select the same vector, so this matches reading the
/// assignment on the union of (vector, basis) pairs.  Cross-side pairs of
/// the same vector stay unconstrained: no vector is orthogonal to itself.
/// (S_A, S_B) is a B-KS set iff the problem is infeasible.
inline void encode_bks_into(const KSInstance& inst, Mask sa, Mask sb, FeasibilityProblem& p,
                            std::vector<std::string>* names = nullptr) {
    struct SideVar { int basis; int vec; };
    static thread_local std::vector<SideVar> avars, bvars;
    avars.clear();
    bvars.clear();
    auto collect = [&](Mask s, std::vector<SideVar>& out) {
        while (s) {
            int bi = lowest_bit(s);
            s &= s - 1;
            for (int v : inst.basis(bi).members) out.push_back({bi, v});
        }
    };
    collect(sa, avars);
    collect(sb, bvars);
    const int na = static_cast<int>(avars.size());
    const int nb = static_cast<int>(bvars.size());
    p.reset(na + nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if (inst.orthogonal(avars[i].vec, bvars[j].vec)) p.add_at_most_one(i, na + j);
    int next = 0;
    auto add_groups = [&](const std::vector<SideVar>& side) {
        std::vector<int> g;
        std::size_t i = 0;
        while (i < side.size()) {
            g.clear();
            int bi = side[i].basis;
            while (i < side.size() && side[i].basis == bi) g.push_back(next + static_cast<int>(i++));
            p.add_exactly_one(g);
        }
        next += static_cast<int>(side.size());
    };
    add_groups(avars);
    next = na;
    add_groups(bvars);
    if (names) {
        names->clear();
        for (const auto& sv : avars)
            names->push_back("A:" + std::to_string(inst.basis(sv.basis).label) + ":" + inst.ids()[sv.vec]);
        for (const auto& sv : bvars)
            names->push_back("B:" + std::to_string(inst.basis(sv.basis).label) + ":" + inst.ids()[sv.vec]);
    }
}

inline FeasibilityProblem encode_bks(const KSInstance& inst, Mask sa, Mask sb) {
    FeasibilityProblem p;
    std::vector<std::string> names;
    encode_bks_into(inst, sa, sb, p, &names);
    p.set_names(std::move(names));
    return p;
}

/// Single-variable capability test: one variable per vector, exactly-one per
/// S_A basis, at-least-one per remaining basis, and at-most-one for every
/// orthogonal pair with at least one endpoint in the groundset of S_A (both
/// endpoints ranging over covered vectors).  S_A is B-KS capable iff the
/// problem is infeasible, and this agrees with encode_bks(S_A, all bases).
///
/// Note the pair constraints run over Gamma(S_A) x Gamma(B).  Restricting
/// the second endpoint to Gamma(B \ S_A) loses every constraint on vectors
/// whose bases all lie in S_A and then disagrees with the pair formulation.
inline void encode_bks_capable_into(const KSInstance& inst, Mask sa, FeasibilityProblem& p) {
    p.reset(inst.n());
    Mask ga = inst.groundset(sa);
    Mask gall = inst.covered_vectors();
    for (int v = 0; v < inst.n(); ++v) {
        Mask partners = 0;
        if (ga >> v & 1) partners |= inst.adjacency(v) & gall;
        if (gall >> v & 1) partners |= inst.adjacency(v) & ga;
        partners = v + 1 >= 64 ? 0 : partners >> (v + 1) << (v + 1);
        while (partners) {
            int u = lowest_bit(partners);
            partners &= partners - 1;
            p.add_at_most_one(v, u);
        }
    }
    for (int bi = 0; bi < inst.m(); ++bi) {
        if (sa >> bi & 1)
            p.add_exactly_one(inst.basis(bi).members);
        else
            p.add_at_least_one(inst.basis(bi).members);
    }
}

inline FeasibilityProblem encode_bks_capable(const KSInstance& inst, Mask sa) {
    FeasibilityProblem p;
    encode_bks_capable_into(inst, sa, p);
    std::vector<std::string> names = inst.ids();
    p.set_names(std::move(names));
    return p;
}

/// Cross-validation oracle: the two capability formulations must agree on
/// feasibility for every S_A.
inline bool check_capable_equivalence(const KSInstance& inst, Mask sa) {
    FeasibilityProblem p1, p2;
    Solver s;
    encode_bks_capable_into(inst, sa, p1);
    auto r1 = s.solve(p1);
    encode_bks_into(inst, sa, inst.full_basis_mask(), p2);
    auto r2 = s.solve(p2);
    return r1.status == r2.status;
}

}  // namespace bks
