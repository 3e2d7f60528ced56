#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "bks/encodings.hpp"
#include "bks/instance.hpp"
#include "bks/symmetry.hpp"

namespace bks {

using BigInt = boost::multiprecision::cpp_int;

struct SearchOptions {
    int jobs = 1;
    bool symmetric = false;
    bool two_phase = false;
    bool deep = false;               // permit long-running instances
    bool audit_equivalence = false;  // double-check every capability solve
    std::string checkpoint_dir;      // empty: no checkpoints
    std::function<void(const nlohmann::ordered_json&)> progress;
};

struct SizeCounters {
    int k = 0;
    std::uint64_t enumerated = 0;      // subsets visited (canonical reps in symmetric mode)
    std::uint64_t solver_calls = 0;    // capability problems actually solved
    std::uint64_t pruned = 0;          // derived capable via monotonicity
    std::uint64_t skipped_noncanonical = 0;
    std::uint64_t capable = 0;
    std::uint64_t pair_checks = 0;
    std::uint64_t pair_hits = 0;
};

struct Improvement {
    int k = 0;
    Mask sa = 0, sb = 0;
    std::uint64_t product = 0;
};

struct SearchReport {
    bool is_ks = false;
    std::vector<std::uint8_t> ks_witness;   // coloring when the input is not a KS set
    std::string strategy;
    Mask best_sa = 0, best_sb = 0;          // normalized: |sa| <= |sb|
    std::uint64_t omega = 0;
    int k_min = 0;
    int k_max = 0;
    std::vector<SizeCounters> per_size;
    std::vector<Improvement> improvements;
    std::uint64_t equivalence_checked = 0;
    std::uint64_t equivalence_mismatches = 0;
    bool reverified = false;
    bool cardinality_bound_ok = false;
    std::pair<int, int> sizes() const {
        return {popcount(best_sa), popcount(best_sb)};
    }
};

// --------------------------------------------------------------- combinatorics

inline std::uint64_t comb_count(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt c = 1;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return static_cast<std::uint64_t>(c);
}

/// r-th (0-based) k-combination of {0..n-1} in lexicographic order.
inline void unrank_combination(int n, int k, std::uint64_t r, std::vector<int>& out) {
    out.clear();
    int next = 0;
    for (int slot = k; slot >= 1; --slot) {
        for (int v = next;; ++v) {
            std::uint64_t block = comb_count(n - v - 1, slot - 1);
            if (r < block) {
                out.push_back(v);
                next = v + 1;
                break;
            }
            r -= block;
        }
    }
}

inline bool next_combination(std::vector<int>& c, int n) {
    int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

template <class Fn>
inline void run_blocks(std::uint64_t nblocks, int jobs, Fn&& fn) {
    if (jobs <= 1 || nblocks <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    int workers = std::min<std::uint64_t>(jobs, nblocks);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::uint64_t b; (b = next.fetch_add(1)) < nblocks;) fn(b);
        });
    for (auto& th : pool) th.join();
}

// --------------------------------------------------------------- call budget

struct BudgetEstimate {
    BigInt worst_case_pairs = 0;          // C(sum_{k=k_min..k_max} C(m,k), 2)
    BigInt capable_check_calls = 0;       // sum_{k=3..k_max} C(m,k)
    std::optional<BigInt> post_filter_pairs;   // C(observed capable <= k_max, 2)
};

inline BudgetEstimate call_budget_estimate(int num_bases, int k_min, int k_max,
                                           long long observed_capable = -1) {
    BudgetEstimate est;
    if (k_max < 3) return est;
    auto big_comb = [](int n, int k) {
        BigInt c = 1;
        for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
        return k < 0 || k > n ? BigInt(0) : c;
    };
    BigInt pool = 0;
    for (int k = std::max(3, k_min); k <= k_max; ++k) pool += big_comb(num_bases, k);
    est.worst_case_pairs = pool * (pool - 1) / 2;
    for (int k = 3; k <= k_max; ++k) est.capable_check_calls += big_comb(num_bases, k);
    if (observed_capable >= 0) {
        BigInt o = observed_capable;
        est.post_filter_pairs = o * (o - 1) / 2;
    }
    return est;
}

// --------------------------------------------------------------- capability scan

namespace detail {

struct ScanState {
    std::vector<Mask> minimal_capable;   // antichain closed under the group in symmetric mode
    const SubsetCanonicalizer* canon = nullptr;   // set in symmetric mode
};

inline bool contains_minimal(const ScanState& st, Mask s) {
    for (Mask c : st.minimal_capable)
        if ((s & c) == c) return true;
    return false;
}

/// Enumerates capable subsets of one size in lexicographic order.
/// In symmetric mode only canonical representatives are visited/stored.
/// Deterministic for any job count: blocks are merged in order.
inline std::vector<Mask> scan_size(const KSInstance& inst, int k, ScanState& st,
                                   const SearchOptions& opts, SizeCounters& ctr,
                                   std::uint64_t* audit_checked = nullptr,
                                   std::uint64_t* audit_bad = nullptr) {
    const int m = inst.m();
    const std::uint64_t total = comb_count(m, k);
    const std::uint64_t block_size = 16384;
    const std::uint64_t nblocks = (total + block_size - 1) / block_size;
    struct BlockOut {
        std::vector<std::pair<Mask, bool>> capable;   // (mask, solver_found)
        std::uint64_t solver_calls = 0, pruned = 0, skipped = 0, audits = 0, audit_bad = 0;
    };
    std::vector<BlockOut> results(nblocks);
    run_blocks(nblocks, opts.jobs, [&](std::uint64_t b) {
        BlockOut out;
        Solver solver;
        FeasibilityProblem prob, audit_prob;
        std::vector<int> combo;
        unrank_combination(m, k, b * block_size, combo);
        std::uint64_t count = std::min(block_size, total - b * block_size);
        for (std::uint64_t i = 0; i < count; ++i) {
            Mask s = 0;
            for (int v : combo) s |= Mask(1) << v;
            bool last = (i + 1 == count);
            if (st.canon && !st.canon->is_canonical(s)) {
                ++out.skipped;
            } else if (contains_minimal(st, s)) {
                ++out.pruned;
                out.capable.emplace_back(s, false);
            } else {
                ++out.solver_calls;
                encode_bks_capable_into(inst, s, prob);
                bool cap = solver.solve(prob).status == Feasibility::infeasible;
                if (opts.audit_equivalence) {
                    ++out.audits;
                    encode_bks_into(inst, s, inst.full_basis_mask(), audit_prob);
                    bool cap2 = solver.solve(audit_prob).status == Feasibility::infeasible;
                    if (cap2 != cap) ++out.audit_bad;
                }
                if (cap) out.capable.emplace_back(s, true);
            }
            if (!last) next_combination(combo, m);
        }
        results[b] = std::move(out);
    });
    std::vector<Mask> capable;
    std::vector<Mask> new_minimal;
    for (auto& out : results) {
        ctr.solver_calls += out.solver_calls;
        ctr.pruned += out.pruned;
        ctr.skipped_noncanonical += out.skipped;
        if (audit_checked) *audit_checked += out.audits;
        if (audit_bad) *audit_bad += out.audit_bad;
        for (auto [s, solved] : out.capable) {
            capable.push_back(s);
            if (solved) new_minimal.push_back(s);
        }
    }
    ctr.enumerated += total;
    ctr.capable += capable.size();
    // solver-confirmed capable sets of this size are minimal (no capable
    // proper subset exists, or pruning would have caught them)
    for (Mask s : new_minimal) {
        if (st.canon) {
            for (Mask img : st.canon->orbit(s)) st.minimal_capable.push_back(img);
        } else {
            st.minimal_capable.push_back(s);
        }
    }
    return capable;
}

inline void emit(const SearchOptions& opts, nlohmann::ordered_json ev) {
    if (opts.progress) opts.progress(ev);
}

}  // namespace detail

// --------------------------------------------------------------- census

struct CensusReport {
    int min_size = 3, max_size = 0;
    std::vector<Mask> capable;            // lex order within nondecreasing size
    std::vector<Mask> essential;
    std::map<int, long long> capable_by_size;
    std::map<int, long long> essential_by_size;
    std::map<int, long long> iso_capable;      // filled when group computed
    std::map<int, long long> iso_essential;
    std::vector<SizeCounters> per_size;
    std::uint64_t equivalence_checked = 0, equivalence_mismatches = 0;
    long long capable_total() const { return static_cast<long long>(capable.size()); }
    long long essential_total() const { return static_cast<long long>(essential.size()); }
};

namespace detail {

struct Checkpoint {
    std::string path;
    nlohmann::ordered_json state;
    bool loaded = false;

    static std::string options_key(const std::string& op, int kmin, int kmax) {
        return op + "-" + std::to_string(kmin) + "-" + std::to_string(kmax);
    }
    void open(const std::string& dir, const std::string& fp, const std::string& key) {
        if (dir.empty()) return;
        std::filesystem::create_directories(dir);
        path = (std::filesystem::path(dir) / (fp + "-" + key + ".json")).string();
        std::ifstream in(path);
        if (in) {
            try {
                in >> state;
                loaded = state.value("fingerprint", "") == fp;
            } catch (...) {
                loaded = false;
            }
        }
        if (!loaded) {
            state = nlohmann::ordered_json();
            state["fingerprint"] = fp;
            state["done_sizes"] = nlohmann::ordered_json::array();
            state["capable"] = nlohmann::ordered_json::array();
            state["minimal"] = nlohmann::ordered_json::array();
        }
    }
    bool size_done(int k) const {
        if (path.empty() || !loaded) return false;
        for (const auto& v : state["done_sizes"])
            if (v.get<int>() == k) return true;
        return false;
    }
    void record_size(int k, const std::vector<Mask>& found, const std::vector<Mask>& minimal) {
        if (path.empty()) return;
        state["done_sizes"].push_back(k);
        for (Mask s : found) state["capable"].push_back(s);
        state["minimal"] = nlohmann::ordered_json::array();
        for (Mask s : minimal) state["minimal"].push_back(s);
        std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            out << state.dump();
        }
        std::filesystem::rename(tmp, path);
    }
    std::vector<Mask> capable_of_size(int k) const {
        std::vector<Mask> out;
        for (const auto& v : state["capable"]) {
            Mask s = v.get<std::uint64_t>();
            if (popcount(s) == k) out.push_back(s);
        }
        return out;
    }
    std::vector<Mask> minimal() const {
        std::vector<Mask> out;
        if (loaded)
            for (const auto& v : state["minimal"]) out.push_back(v.get<std::uint64_t>());
        return out;
    }
};

}  // namespace detail

/// Enumerates every B-KS capable subset with sizes in [min_size, max_size],
/// using monotone pruning (supersets of a known capable set skip the solver).
inline CensusReport enumerate_capable(const KSInstance& inst, int min_size, int max_size,
                                      const SearchOptions& opts = {}) {
    CensusReport rep;
    rep.min_size = std::max(1, min_size);
    rep.max_size = std::min(max_size, inst.m());
    detail::ScanState st;
    SubsetCanonicalizer* canon = nullptr;   // census always enumerates raw sets
    (void)canon;
    detail::Checkpoint ckpt;
    ckpt.open(opts.checkpoint_dir, fingerprint(inst),
              detail::Checkpoint::options_key("census", rep.min_size, rep.max_size));
    st.minimal_capable = ckpt.minimal();
    for (int k = rep.min_size; k <= rep.max_size; ++k) {
        SizeCounters ctr;
        ctr.k = k;
        detail::emit(opts, {{"ev", "size_start"}, {"k", k}, {"combinations", comb_count(inst.m(), k)}});
        std::vector<Mask> found;
        if (ckpt.size_done(k)) {
            found = ckpt.capable_of_size(k);
            ctr.capable = found.size();
        } else {
            found = detail::scan_size(inst, k, st, opts, ctr, &rep.equivalence_checked,
                                      &rep.equivalence_mismatches);
            ckpt.record_size(k, found, st.minimal_capable);
        }
        if (!found.empty()) rep.capable_by_size[k] = static_cast<long long>(found.size());
        for (Mask s : found) rep.capable.push_back(s);
        rep.per_size.push_back(ctr);
        detail::emit(opts, {{"ev", "size_done"}, {"k", k}, {"capable", ctr.capable},
                            {"solver_calls", ctr.solver_calls}});
    }
    return rep;
}

/// Essential = capable with no proper capable subset.  By upward monotonicity
/// it suffices to look one size down; the capable list must be complete for
/// all sizes up to the largest present.
inline std::vector<Mask> essential_filter(const KSInstance& inst, const std::vector<Mask>& capable) {
    (void)inst;
    std::map<int, std::vector<Mask>> by_size;
    for (Mask s : capable) by_size[popcount(s)].push_back(s);
    for (auto& [k, v] : by_size) std::sort(v.begin(), v.end());
    std::vector<Mask> out;
    for (Mask s : capable) {
        int k = popcount(s);
        auto it = by_size.find(k - 1);
        bool minimal = true;
        if (it != by_size.end()) {
            Mask t = s;
            while (t && minimal) {
                int b = lowest_bit(t);
                t &= t - 1;
                if (std::binary_search(it->second.begin(), it->second.end(), s & ~(Mask(1) << b)))
                    minimal = false;
            }
        }
        if (minimal) out.push_back(s);
    }
    return out;
}

/// Full census: capable + essential (+ iso rows when with_iso).
inline CensusReport census(const KSInstance& inst, const SearchOptions& opts = {},
                           bool with_iso = false, int min_size = 3, int max_size = -1) {
    CensusReport rep = enumerate_capable(inst, min_size, max_size < 0 ? inst.m() : max_size, opts);
    rep.essential = essential_filter(inst, rep.capable);
    for (Mask s : rep.essential) rep.essential_by_size[popcount(s)]++;
    if (with_iso) {
        auto group = compute_automorphisms(inst);
        SubsetCanonicalizer canon(group, inst.m());
        rep.iso_capable = orbit_count(canon, rep.capable);
        rep.iso_essential = orbit_count(canon, rep.essential);
    }
    return rep;
}

// --------------------------------------------------------------- optimal search

namespace detail {

class PairChecker {
public:
    explicit PairChecker(const KSInstance& inst) : inst_(inst) {}
    bool is_bks(Mask sa, Mask sb) {
        encode_bks_into(inst_, sa, sb, prob_);
        return solver_.solve(prob_).status == Feasibility::infeasible;
    }

private:
    const KSInstance& inst_;
    Solver solver_;
    FeasibilityProblem prob_;
};

}  // namespace detail

/// The optimal-pair search: subsets of increasing size from k = 3 feed a
/// capability filter; each capable set is tested against the previously
/// stored capable sets until the product bound or a hit; terminates once
/// k * k_min >= omega.  `symmetric` stores one representative per orbit and
/// tests candidate pairs against every image of a stored class.
inline SearchReport optimal_bks(const KSInstance& inst, const SearchOptions& opts = {}) {
    SearchReport rep;
    rep.strategy = opts.two_phase ? "two-phase" : (opts.symmetric ? "symmetric" : "direct");
    {
        FeasibilityProblem ks;
        encode_ks_into(inst, ks);
        auto r = solve(ks);
        rep.is_ks = r.status == Feasibility::infeasible;
        if (!rep.is_ks) {
            rep.ks_witness = r.witness;
            return rep;
        }
    }
    const int m = inst.m();
    std::optional<AutomorphismGroup> group;
    std::optional<SubsetCanonicalizer> canon;
    if (opts.symmetric || opts.two_phase) {
        group = compute_automorphisms(inst);
        canon.emplace(*group, m);
    }

    detail::ScanState st;
    if (canon) st.canon = &*canon;
    detail::PairChecker pc{inst};
    std::map<Mask, std::vector<Mask>> orbit_cache;
    auto orbit_of = [&](Mask s) -> const std::vector<Mask>& {
        auto it = orbit_cache.find(s);
        if (it == orbit_cache.end()) it = orbit_cache.emplace(s, canon->orbit(s)).first;
        return it->second;
    };
    std::vector<Mask> C;   // stored capable sets (reps in symmetric mode)
    std::uint64_t omega = std::uint64_t(m) * m;
    bool found_capable = false, found_pair = false;
    int k_min = m;
    Mask best_sa = 0, best_sb = 0;
    int k = 3;

    auto consider_pair = [&](Mask sa, Mask sb, SizeCounters& ctr) -> bool {
        // returns true when the inner loop should break (hit)
        ++ctr.pair_checks;
        if (pc.is_bks(sa, sb)) {
            ++ctr.pair_hits;
            best_sa = sa;
            best_sb = sb;
            omega = std::uint64_t(popcount(sa)) * popcount(sb);
            rep.improvements.push_back({k, sa, sb, omega});
            found_pair = true;
            detail::emit(opts, {{"ev", "improved"},
                                {"product", omega},
                                {"sizes", {popcount(sa), popcount(sb)}}});
            return true;
        }
        return false;
    };

    if (!opts.two_phase) {
        for (; k <= m; ++k) {
            SizeCounters ctr;
            ctr.k = k;
            detail::emit(opts, {{"ev", "size_start"}, {"k", k},
                                {"combinations", comb_count(m, k)}});
            auto capable_k = detail::scan_size(inst, k, st, opts, ctr, &rep.equivalence_checked,
                                               &rep.equivalence_mismatches);
            for (Mask sa : capable_k) {
                if (!found_capable) {
                    found_capable = true;
                    k_min = k;
                }
                for (Mask sb : C) {
                    std::uint64_t product = std::uint64_t(k) * popcount(sb);
                    if (product >= omega) break;
                    if (!canon) {
                        if (consider_pair(sa, sb, ctr)) break;
                    } else {
                        bool hit = false;
                        for (Mask img : orbit_of(sb))
                            if (consider_pair(sa, img, ctr)) {
                                hit = true;
                                break;
                            }
                        if (hit) break;
                    }
                }
                C.push_back(sa);
            }
            rep.per_size.push_back(ctr);
            detail::emit(opts, {{"ev", "size_done"}, {"k", k}, {"capable", ctr.capable}});
            if (found_capable && std::uint64_t(k + 1) * k_min >= omega) {
                ++k;
                break;
            }
        }
        rep.k_max = std::min(k - 1, m);
    } else {
        // Phase 1: find k_min and the capable classes of that size.
        std::vector<Mask> base_reps;
        for (; k <= m; ++k) {
            SizeCounters ctr;
            ctr.k = k;
            base_reps = detail::scan_size(inst, k, st, opts, ctr, &rep.equivalence_checked,
                                          &rep.equivalence_mismatches);
            rep.per_size.push_back(ctr);
            if (!base_reps.empty()) {
                found_capable = true;
                k_min = k;
                break;
            }
        }
        detail::emit(opts, {{"ev", "phase1_done"}, {"k_min", k_min},
                            {"classes", base_reps.size()}});
        // Phase 2: for each Alice size a upward, scan Bob sizes t upward and
        // stop either loop as soon as the product cannot beat omega.  The
        // first hit per a is its best product; completeness follows because
        // every pair with product below the final omega is visited.
        std::map<int, std::vector<Mask>> reps_by_size{{k_min, base_reps}};
        auto reps_of = [&](int t) -> const std::vector<Mask>& {
            auto it = reps_by_size.find(t);
            if (it != reps_by_size.end()) return it->second;
            SizeCounters ctr;
            ctr.k = t;
            auto reps = detail::scan_size(inst, t, st, opts, ctr, &rep.equivalence_checked,
                                          &rep.equivalence_mismatches);
            rep.per_size.push_back(ctr);
            return reps_by_size.emplace(t, std::move(reps)).first->second;
        };
        SizeCounters pair_ctr;
        pair_ctr.k = -1;   // pair phase bucket
        for (int a = k_min; a <= m && std::uint64_t(a) * a < omega; ++a) {
            for (int t = a; t <= m && std::uint64_t(a) * t < omega; ++t) {
                k = std::max(k, t);
                detail::emit(opts, {{"ev", "phase2_pair_sizes"}, {"a", a}, {"t", t}});
                bool hit = false;
                for (Mask sa : reps_of(a)) {
                    for (Mask sbrep : reps_of(t)) {
                        for (Mask img : orbit_of(sbrep)) {
                            if (sa == img) continue;
                            if (consider_pair(sa, img, pair_ctr)) {
                                hit = true;
                                break;
                            }
                        }
                        if (hit) break;
                    }
                    if (hit) break;
                }
                if (hit) break;   // larger t cannot beat a*t for this a
            }
        }
        rep.per_size.push_back(pair_ctr);
        rep.k_max = k;
    }

    if (!found_pair) {
        // exhausted every size: the trivial pair (B, B) realizes the optimum
        best_sa = best_sb = inst.full_basis_mask();
        omega = std::uint64_t(m) * m;
    }
    if (popcount(best_sa) > popcount(best_sb)) std::swap(best_sa, best_sb);
    rep.best_sa = best_sa;
    rep.best_sb = best_sb;
    rep.omega = omega;
    rep.k_min = k_min;
    if (rep.k_max == 0) rep.k_max = k;
    {
        detail::PairChecker verifier{inst};
        rep.reverified = verifier.is_bks(rep.best_sa, rep.best_sb);
        rep.cardinality_bound_ok = cardinality_lower_bound(inst, rep.best_sa, rep.best_sb);
    }
    return rep;
}

}  // namespace bks
