#include <doctest.h>

#include <random>

#include "bks/catalog.hpp"
#include "bks/games.hpp"
#include "bks/search.hpp"

using namespace bks;

namespace {

/// Independent oracle: enumerate every deterministic strategy pair.
std::uint64_t exhaustive_best(const GameSpec& g) {
    const auto& inst = g.instance;
    int ka = g.alice_inputs(), kb = g.bob_inputs(), d = inst.dimension();
    std::uint64_t best = 0;
    std::vector<int> a(ka), b(kb);
    std::uint64_t atot = 1, btot = 1;
    for (int i = 0; i < ka; ++i) atot *= d;
    for (int i = 0; i < kb; ++i) btot *= d;
    for (std::uint64_t am = 0; am < atot; ++am) {
        std::uint64_t t = am;
        for (int i = 0; i < ka; ++i) {
            a[i] = inst.basis(g.alice_bases[i]).members[t % d];
            t /= d;
        }
        for (std::uint64_t bm = 0; bm < btot; ++bm) {
            std::uint64_t u = bm, wins = 0;
            for (int j = 0; j < kb; ++j) {
                b[j] = inst.basis(g.bob_bases[j]).members[u % d];
                u /= d;
            }
            for (int i = 0; i < ka; ++i)
                for (int j = 0; j < kb; ++j) wins += g.win(a[i], b[j]);
            best = std::max(best, wins);
        }
    }
    return best;
}

bool pair_is_bks(const KSInstance& inst, Mask sa, Mask sb) {
    FeasibilityProblem p;
    encode_bks_into(inst, sa, sb, p);
    return solve(p).status == Feasibility::infeasible;
}

}  // namespace

TEST_CASE("game construction") {
    auto ceg = catalog::get("CEG-18").instance;
    auto game = build_game(ceg, ceg.mask_of_labels({1, 3, 6, 8, 9}),
                           ceg.mask_of_labels({1, 2, 4, 5, 7, 9}));
    CHECK(game.input_pairs() == 30);
    auto p24 = catalog::get("P-24").instance;
    auto g2 = build_game(p24, p24.mask_of_labels({1, 4, 5}), p24.mask_of_labels({9, 15, 22}));
    CHECK(g2.input_pairs() == 9);
    CHECK_THROWS(build_game(p24, 0, 1));

    // a shared single basis: only equal outputs win
    auto g3 = build_game(p24, p24.mask_of_labels({1}), p24.mask_of_labels({1}));
    const auto& mem = p24.basis(p24.index_of_label(1)).members;
    for (int a : mem)
        for (int b : mem) CHECK(g3.win(a, b) == (a == b));
    CHECK(classical_value(g3) == Rational(1));
}

TEST_CASE("classical value of the optimal games, frozen from the oracle") {
    auto ceg = catalog::get("CEG-18").instance;
    auto game = build_game(ceg, ceg.mask_of_labels({1, 3, 6, 8, 9}),
                           ceg.mask_of_labels({1, 2, 4, 5, 7, 9}));
    CHECK(classical_value(game) == Rational(29, 30));
    CHECK(exhaustive_best(game) == 29);

    auto p24 = catalog::get("P-24").instance;
    auto g2 = build_game(p24, p24.mask_of_labels({1, 4, 5}), p24.mask_of_labels({9, 15, 22}));
    CHECK(classical_value(g2) == Rational(8, 9));
    CHECK(exhaustive_best(g2) == 8);
}

TEST_CASE("branch and bound equals exhaustive enumeration on random games") {
    auto ceg = catalog::get("CEG-18").instance;
    std::mt19937 rng(31);
    for (int iter = 0; iter < 12; ++iter) {
        Mask sa = 0, sb = 0;
        while (popcount(sa) < 3) sa |= Mask(1) << (rng() % 9);
        while (popcount(sb) < 4) sb |= Mask(1) << (rng() % 9);
        auto g = build_game(ceg, sa, sb);
        CAPTURE(sa);
        CAPTURE(sb);
        CHECK(classical_best_wins(g) == exhaustive_best(g));
    }
}

TEST_CASE("classical value below one iff the pair is B-KS") {
    auto ceg = catalog::get("CEG-18").instance;
    std::mt19937 rng(77);
    int bks_seen = 0, non_seen = 0;
    for (int iter = 0; iter < 30; ++iter) {
        Mask sa = 0, sb = 0;
        while (popcount(sa) < 3 + int(rng() % 3)) sa |= Mask(1) << (rng() % 9);
        while (popcount(sb) < 3 + int(rng() % 4)) sb |= Mask(1) << (rng() % 9);
        bool bks = pair_is_bks(ceg, sa, sb);
        auto v = classical_value(build_game(ceg, sa, sb));
        CAPTURE(sa);
        CAPTURE(sb);
        CHECK((v < Rational(1)) == bks);
        (bks ? bks_seen : non_seen)++;
    }
    // the sample covered both sides
    CHECK(non_seen > 0);
    // the optimal pair itself
    Mask sa = ceg.mask_of_labels({1, 3, 6, 8, 9});
    Mask sb = ceg.mask_of_labels({1, 2, 4, 5, 7, 9});
    CHECK(pair_is_bks(ceg, sa, sb));
    CHECK(classical_value(build_game(ceg, sa, sb)) < Rational(1));
}

TEST_CASE("quantum strategy certificate") {
    auto p24 = catalog::get("P-24").instance;
    auto g = build_game(p24, p24.mask_of_labels({1, 4, 5}), p24.mask_of_labels({9, 15, 22}));
    auto cert = verify_quantum_perfect(g);
    CHECK(cert.verifiable);
    CHECK(cert.perfect);
    CHECK(cert.support_equals_win);
    CHECK(cert.normalization_exact);

    // dropping a basis from S_B keeps the strategy perfect but kills the
    // classical gap: perfect without being a BPQS
    auto g2 = build_game(p24, p24.mask_of_labels({1, 4, 5}), p24.mask_of_labels({9, 15}));
    CHECK_FALSE(pair_is_bks(p24, g2.sa, g2.sb));
    auto cert2 = verify_quantum_perfect(g2);
    CHECK(cert2.perfect);
    CHECK(classical_value(g2) == Rational(1));

    // abstract instances cannot be verified, only reported as such
    auto pen = catalog::get("Pen-40").instance;
    auto g3 = build_game(pen, pen.mask_of_labels({1, 2, 3, 9}),
                         pen.mask_of_labels({1, 2, 3, 14, 17, 22, 28, 33}));
    CHECK_FALSE(verify_quantum_perfect(g3).verifiable);

    // the d=3 sets carry sqrt-2 coordinates; certificate stays exact
    auto mp = catalog::get("P-33").instance;
    auto g4 = build_game(mp, mp.mask_of_labels({2, 4, 5, 7, 8, 33, 38}),
                         mp.mask_of_labels({1, 3, 6, 10, 13, 18, 21, 24, 26}));
    auto cert4 = verify_quantum_perfect(g4);
    CHECK(cert4.verifiable);
    CHECK(cert4.perfect);
    CHECK(cert4.normalization_exact);
}

TEST_CASE("scaling a vector changes nothing") {
    auto p24 = catalog::get("P-24").instance;
    auto coords = p24.coordinates();
    // multiply one vector by -7/3
    for (auto& c : coords[5].coords) c = c * FieldElement(Rational(-7, 3));
    std::vector<Basis> bases(p24.bases().begin(), p24.bases().end());
    auto scaled = KSInstance::from_coordinates("P-24s", 4, p24.ids(), coords, bases);
    Mask sa = p24.mask_of_labels({1, 4, 5});
    Mask sb = p24.mask_of_labels({9, 15, 22});
    auto g1 = build_game(p24, sa, sb);
    auto g2 = build_game(scaled, scaled.mask_of_labels({1, 4, 5}), scaled.mask_of_labels({9, 15, 22}));
    CHECK(classical_value(g1) == classical_value(g2));
    auto c1 = verify_quantum_perfect(g1), c2 = verify_quantum_perfect(g2);
    CHECK(c1.perfect == c2.perfect);
    CHECK(c1.support_equals_win == c2.support_equals_win);
    CHECK(c1.normalization_exact == c2.normalization_exact);
}

TEST_CASE("monte carlo demo lands near one for a perfect strategy") {
    auto p24 = catalog::get("P-24").instance;
    auto g = build_game(p24, p24.mask_of_labels({1, 4, 5}), p24.mask_of_labels({9, 15, 22}));
    double rate = simulate_quantum_strategy(g, 20000, 12345);
    CHECK(rate == 1.0);   // support never leaves the winning set
}
