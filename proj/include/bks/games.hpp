#pragma once

#include <atomic>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bks/encodings.hpp"
#include "bks/instance.hpp"

namespace bks {

/// Two-player game built from a pair of basis subsets: the referee draws
/// (x, y) uniformly from S_A x S_B, Alice answers with a vector of basis x,
/// Bob with a vector of basis y, and they win iff the two vectors are NOT
/// orthogonal.  With that orientation the maximally-entangled strategy's
/// outcome support is exactly the winning set, and a perfect classical
/// strategy exists precisely when (S_A, S_B) fails to be a B-KS pair.
struct GameSpec {
    KSInstance instance;
    Mask sa = 0, sb = 0;
    std::vector<int> alice_bases, bob_bases;   // basis indices

    int alice_inputs() const { return static_cast<int>(alice_bases.size()); }
    int bob_inputs() const { return static_cast<int>(bob_bases.size()); }
    long long input_pairs() const { return 1ll * alice_inputs() * bob_inputs(); }
    bool win(int vec_a, int vec_b) const { return !instance.orthogonal(vec_a, vec_b); }
};

inline GameSpec build_game(const KSInstance& inst, Mask sa, Mask sb) {
    if (sa == 0 || sb == 0) throw std::invalid_argument("build_game: empty basis subset");
    GameSpec g;
    g.instance = inst;
    g.sa = sa;
    g.sb = sb;
    for (int bi = 0; bi < inst.m(); ++bi) {
        if (sa >> bi & 1) g.alice_bases.push_back(bi);
        if (sb >> bi & 1) g.bob_bases.push_back(bi);
    }
    return g;
}

namespace detail {

/// Branch-and-bound worker over Alice assignments starting from a fixed
/// first-input choice; Bob's best answers decompose per input, giving the
/// exact closure at the leaves and an admissible per-input bound inside.
inline std::uint64_t bnb_from_first(const GameSpec& g, int first_choice,
                                    std::uint64_t initial_best) {
    const auto& inst = g.instance;
    const int ka = g.alice_inputs();
    const int kb = g.bob_inputs();
    const int d = inst.dimension();
    std::vector<std::vector<int>> score(kb, std::vector<int>(d, 0));
    std::uint64_t best = initial_best;
    auto add = [&](int va, int sign) {
        for (int y = 0; y < kb; ++y) {
            const auto& yb = inst.basis(g.bob_bases[y]).members;
            for (int j = 0; j < d; ++j)
                if (g.win(va, yb[j])) score[y][j] += sign;
        }
    };
    auto rec = [&](auto&& self, int depth) -> void {
        std::uint64_t partial = 0;
        for (int y = 0; y < kb; ++y) {
            int mx = 0;
            for (int j = 0; j < d; ++j) mx = std::max(mx, score[y][j]);
            partial += mx;
        }
        if (depth == ka) {
            best = std::max(best, partial);
            return;
        }
        if (partial + std::uint64_t(kb) * (ka - depth) <= best) return;
        const auto& xa = inst.basis(g.alice_bases[depth]).members;
        for (int i = 0; i < d; ++i) {
            add(xa[i], +1);
            self(self, depth + 1);
            add(xa[i], -1);
        }
    };
    add(inst.basis(g.alice_bases[0]).members[first_choice], +1);
    rec(rec, 1);
    return best;
}

}  // namespace detail

/// Maximum number of input pairs won by a deterministic strategy pair.
/// Parallelizes over the first Alice choice; the result is a pure max, so
/// the worker count never changes it.
inline std::uint64_t classical_best_wins(const GameSpec& g, int jobs = 1) {
    const int d = g.instance.dimension();
    if (jobs <= 1) {
        std::uint64_t best = 0;
        for (int i = 0; i < d; ++i) best = std::max(best, detail::bnb_from_first(g, i, best));
        return best;
    }
    std::vector<std::uint64_t> results(d, 0);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, d); ++t)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < d;)
                results[i] = detail::bnb_from_first(g, i, 0);
        });
    for (auto& th : pool) th.join();
    std::uint64_t best = 0;
    for (std::uint64_t r : results) best = std::max(best, r);
    return best;
}

/// Exact optimal classical winning probability over deterministic strategies
/// (convexity makes this the classical optimum).
inline Rational classical_value(const GameSpec& g, int jobs = 1) {
    return Rational(classical_best_wins(g, jobs), static_cast<std::uint64_t>(g.input_pairs()));
}

struct QuantumCertificate {
    bool verifiable = false;          // needs exact coordinates
    bool perfect = false;             // outcome support within the winning set
    bool support_equals_win = false;  // support is exactly the winning set
    bool normalization_exact = false; // per-input probabilities sum to 1 exactly
};

/// Exact verification of the maximally-entangled strategy: for every input
/// pair (x, y) and outputs (a, b), the outcome probability is proportional
/// to <a,b>^2 / (|a|^2 |b|^2), so the strategy is perfect iff every output
/// pair with nonzero inner product wins; the per-input probabilities sum to
/// one exactly because sum_{a in x, b in y} <a,b>^2/(|a|^2 |b|^2) = d by
/// basis completeness.  No floating point is involved.
inline QuantumCertificate verify_quantum_perfect(const GameSpec& g) {
    QuantumCertificate cert;
    const auto& inst = g.instance;
    if (!inst.coordinate_backed()) return cert;
    cert.verifiable = true;
    cert.perfect = true;
    cert.support_equals_win = true;
    cert.normalization_exact = true;
    const auto& coords = inst.coordinates();
    std::vector<FieldElement> norm2(inst.n());
    for (int v = 0; v < inst.n(); ++v) norm2[v] = inner_product(coords[v], coords[v]);
    FieldElement dim(inst.dimension());
    for (int x : g.alice_bases) {
        for (int y : g.bob_bases) {
            FieldElement sum;
            for (int va : inst.basis(x).members) {
                for (int vb : inst.basis(y).members) {
                    FieldElement ip = inner_product(coords[va], coords[vb]);
                    FieldElement p = (ip * ip) / (norm2[va] * norm2[vb]);
                    sum = sum + p;
                    bool support = !ip.is_zero();
                    bool win = g.win(va, vb);
                    if (support && !win) cert.perfect = false;
                    if (support != win) cert.support_equals_win = false;
                }
            }
            if (sum != dim) cert.normalization_exact = false;
        }
    }
    return cert;
}

/// Demonstration-only Monte-Carlo run of the quantum strategy (floating
/// point; carries no verification weight).
inline double simulate_quantum_strategy(const GameSpec& g, std::uint64_t trials,
                                        std::uint64_t seed) {
    const auto& inst = g.instance;
    if (!inst.coordinate_backed())
        throw std::invalid_argument("simulate_quantum_strategy: needs coordinates");
    std::mt19937_64 rng(seed);
    const auto& coords = inst.coordinates();
    std::vector<double> norm2(inst.n());
    for (int v = 0; v < inst.n(); ++v) norm2[v] = inner_product(coords[v], coords[v]).approx();
    std::uniform_int_distribution<int> dx(0, g.alice_inputs() - 1), dy(0, g.bob_inputs() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uint64_t wins = 0;
    const int d = inst.dimension();
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto& xa = inst.basis(g.alice_bases[dx(rng)]).members;
        const auto& yb = inst.basis(g.bob_bases[dy(rng)]).members;
        double r = unit(rng), acc = 0;
        int va = xa[0], vb = yb[0];
        bool picked = false;
        for (int i = 0; i < d && !picked; ++i)
            for (int j = 0; j < d && !picked; ++j) {
                double ip = inner_product(coords[xa[i]], coords[yb[j]]).approx();
                acc += ip * ip / (norm2[xa[i]] * norm2[yb[j]] * d);
                if (r < acc) {
                    va = xa[i];
                    vb = yb[j];
                    picked = true;
                }
            }
        if (g.win(va, vb)) ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(trials);
}

}  // namespace bks
