#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "bks/instance.hpp"

namespace bks {

/// Automorphisms of the orthogonality structure that also map the basis list
/// onto itself.  All group elements are enumerated explicitly (the groups at
/// hand are modest); `basis_perms` is the induced action on basis indices
/// with duplicates removed.
struct AutomorphismGroup {
    std::vector<std::vector<int>> vector_perms;
    std::vector<std::vector<int>> basis_perms;
    std::size_t order() const { return vector_perms.size(); }
};

namespace detail {

/// Union graph on vectors + basis nodes with <=128 vertices.
struct TwoWordGraph {
    int n = 0;
    std::vector<std::array<std::uint64_t, 2>> row;
    std::vector<int> color;

    void init(int nn) {
        n = nn;
        row.assign(n, {0, 0});
        color.assign(n, 0);
    }
    void add_edge(int a, int b) {
        row[a][b >> 6] |= std::uint64_t(1) << (b & 63);
        row[b][a >> 6] |= std::uint64_t(1) << (a & 63);
    }
    bool edge(int a, int b) const { return row[a][b >> 6] >> (b & 63) & 1; }

    /// Iterated neighborhood-color refinement to a fixed point.
    void refine() {
        int classes = 0;
        {
            std::map<int, int> cmap;
            for (int v = 0; v < n; ++v) {
                auto [it, fresh] = cmap.emplace(color[v], classes);
                if (fresh) ++classes;
                color[v] = it->second;
            }
        }
        while (true) {
            std::vector<std::pair<std::vector<int>, int>> sig(n);
            for (int v = 0; v < n; ++v) {
                std::vector<int> neigh;
                for (int w = 0; w < n; ++w)
                    if (edge(v, w)) neigh.push_back(color[w]);
                std::sort(neigh.begin(), neigh.end());
                neigh.push_back(color[v]);
                sig[v] = {std::move(neigh), v};
            }
            std::map<std::vector<int>, int> cmap;
            int next = 0;
            std::vector<int> nc(n);
            for (int v = 0; v < n; ++v) {
                auto [it, fresh] = cmap.emplace(sig[v].first, next);
                if (fresh) ++next;
                nc[v] = it->second;
            }
            if (next == classes) break;
            classes = next;
            color = nc;
        }
    }
};

/// Enumerates every color- and adjacency-preserving permutation.
class AutomorphismSearch {
public:
    AutomorphismSearch(const TwoWordGraph& g, std::size_t cap) : g_(g), cap_(cap) {
        const int n = g_.n;
        // processing order: rare colors first, then prefer vertices adjacent
        // to already-ordered ones so mapped-neighbor pruning bites early
        std::vector<int> class_size(n, 0);
        std::vector<int> cnt;
        for (int v = 0; v < n; ++v) {
            if (g_.color[v] >= static_cast<int>(cnt.size())) cnt.resize(g_.color[v] + 1, 0);
            cnt[g_.color[v]]++;
        }
        for (int v = 0; v < n; ++v) class_size[v] = cnt[g_.color[v]];
        std::vector<bool> placed(n, false);
        for (int k = 0; k < n; ++k) {
            int best = -1;
            long best_key = 0;
            for (int v = 0; v < n; ++v) {
                if (placed[v]) continue;
                long mapped_neighbors = 0;
                for (int u : order_)
                    if (g_.edge(v, u)) ++mapped_neighbors;
                long key = mapped_neighbors * 10000 - class_size[v] * 100 - g_.color[v];
                if (best < 0 || key > best_key) {   // ascending v breaks ties low
                    best = v;
                    best_key = key;
                }
            }
            placed[best] = true;
            order_.push_back(best);
        }
        members_by_color_.resize(cnt.size());
        for (int v = 0; v < n; ++v) members_by_color_[g_.color[v]].push_back(v);
    }

    std::vector<std::vector<int>> run() {
        target_.assign(g_.n, -1);
        used_.assign(g_.n, false);
        found_.clear();
        dfs(0);
        return std::move(found_);
    }

private:
    void dfs(int depth) {
        if (depth == g_.n) {
            found_.push_back(target_);
            if (found_.size() > cap_)
                throw std::runtime_error("automorphism group larger than supported cap");
            return;
        }
        int v = order_[depth];
        for (int c : members_by_color_[g_.color[v]]) {
            if (used_[c]) continue;
            bool ok = true;
            for (int k = 0; k < depth && ok; ++k) {
                int u = order_[k];
                if (g_.edge(v, u) != g_.edge(c, target_[u])) ok = false;
            }
            if (!ok) continue;
            target_[v] = c;
            used_[c] = true;
            dfs(depth + 1);
            used_[c] = false;
            target_[v] = -1;
        }
    }

    const TwoWordGraph& g_;
    std::size_t cap_;
    std::vector<int> order_;
    std::vector<std::vector<int>> members_by_color_;
    std::vector<int> target_;
    std::vector<bool> used_;
    std::vector<std::vector<int>> found_;
};

}  // namespace detail

/// Full automorphism group of (orthogonality relation, basis list), found by
/// color refinement plus exhaustive backtracking over the vector+basis
/// incidence graph.  The basis-node images give the induced basis action.
inline AutomorphismGroup compute_automorphisms(const KSInstance& inst,
                                               std::size_t cap = 250000) {
    const int n = inst.n(), m = inst.m();
    detail::TwoWordGraph g;
    g.init(n + m);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (inst.orthogonal(a, b)) g.add_edge(a, b);
    for (int bi = 0; bi < m; ++bi) {
        g.color[n + bi] = 1;
        for (int v : inst.basis(bi).members) g.add_edge(v, n + bi);
    }
    g.refine();
    detail::AutomorphismSearch search(g, cap);
    auto perms = search.run();

    AutomorphismGroup out;
    std::unordered_set<std::string> seen;
    for (const auto& p : perms) {
        std::vector<int> vp(p.begin(), p.begin() + n);
        std::vector<int> bp(m);
        for (int bi = 0; bi < m; ++bi) bp[bi] = p[n + bi] - n;
        out.vector_perms.push_back(std::move(vp));
        std::string key(bp.begin(), bp.end());
        if (seen.insert(key).second) out.basis_perms.push_back(std::move(bp));
    }
    std::sort(out.basis_perms.begin(), out.basis_perms.end());
    return out;
}

/// Disjoint-cycle rendering of a permutation, for audit output.
inline std::string cycle_notation(const std::vector<int>& perm) {
    std::string out;
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (seen[i] || perm[i] == static_cast<int>(i)) continue;
        out += "(";
        std::size_t j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = true;
            out += (first ? "" : " ") + std::to_string(j);
            first = false;
            j = perm[j];
        }
        out += ")";
    }
    return out.empty() ? "()" : out;
}

/// True when every orthogonality-only graph automorphism also maps the basis
/// list onto itself (i.e. the two symmetry notions coincide).
inline bool graph_group_preserves_bases(const KSInstance& inst, std::size_t cap = 250000) {
    detail::TwoWordGraph g;
    g.init(inst.n());
    for (int a = 0; a < inst.n(); ++a)
        for (int b = a + 1; b < inst.n(); ++b)
            if (inst.orthogonal(a, b)) g.add_edge(a, b);
    g.refine();
    detail::AutomorphismSearch search(g, cap);
    auto perms = search.run();
    std::unordered_set<Mask> basis_masks;
    for (const auto& b : inst.bases()) basis_masks.insert(b.mask);
    for (const auto& p : perms) {
        for (const auto& b : inst.bases()) {
            Mask img = 0;
            for (int v : b.members) img |= Mask(1) << p[v];
            if (!basis_masks.count(img)) return false;
        }
    }
    return true;
}

/// Orbit-minimal representatives of basis subsets under the induced basis
/// action.  Small groups get per-permutation byte tables; large ones apply
/// the permutation bit by bit (is_canonical exits early, so the average cost
/// stays low either way).
class SubsetCanonicalizer {
public:
    static constexpr std::size_t kTableLimit = 2048;

    explicit SubsetCanonicalizer(const AutomorphismGroup& group, int num_bases)
        : m_(num_bases), perms_(group.basis_perms) {
        if (perms_.empty()) {
            std::vector<int> id(m_);
            for (int i = 0; i < m_; ++i) id[i] = i;
            perms_.push_back(std::move(id));
        }
        if (perms_.size() <= kTableLimit) {
            for (const auto& p : perms_) {
                Table t{};
                for (int byte = 0; byte < 8; ++byte)
                    for (int val = 0; val < 256; ++val) {
                        Mask img = 0;
                        for (int j = 0; j < 8; ++j) {
                            int src = byte * 8 + j;
                            if ((val >> j & 1) && src < m_) img |= Mask(1) << p[src];
                        }
                        t[byte][val] = img;
                    }
                tables_.push_back(t);
            }
        }
    }

    Mask apply(std::size_t perm, Mask s) const {
        if (!tables_.empty()) {
            const Table& t = tables_[perm];
            Mask img = 0;
            for (int byte = 0; byte < 8; ++byte) img |= t[byte][(s >> (byte * 8)) & 255];
            return img;
        }
        const auto& p = perms_[perm];
        Mask img = 0;
        while (s) {
            int b = lowest_bit(s);
            s &= s - 1;
            img |= Mask(1) << p[b];
        }
        return img;
    }

    std::size_t group_size() const { return perms_.size(); }

    /// Lexicographically smallest subset in the orbit of s.
    Mask canonical(Mask s) const {
        Mask best = s;
        for (std::size_t i = 0; i < perms_.size(); ++i) {
            Mask img = apply(i, s);
            if (subset_lex_less(img, best)) best = img;
        }
        return best;
    }

    bool is_canonical(Mask s) const {
        for (std::size_t i = 0; i < perms_.size(); ++i)
            if (subset_lex_less(apply(i, s), s)) return false;
        return true;
    }

    /// All distinct images of s.
    std::vector<Mask> orbit(Mask s) const {
        std::vector<Mask> out;
        for (std::size_t i = 0; i < perms_.size(); ++i) out.push_back(apply(i, s));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    using Table = std::array<std::array<Mask, 256>, 8>;
    int m_;
    std::vector<std::vector<int>> perms_;
    std::vector<Table> tables_;
};

/// Buckets subsets by canonical form; returns size -> number of classes.
inline std::map<int, long long> orbit_count(const SubsetCanonicalizer& canon,
                                            const std::vector<Mask>& subsets) {
    std::map<int, std::unordered_set<Mask>> classes;
    for (Mask s : subsets) classes[popcount(s)].insert(canon.canonical(s));
    std::map<int, long long> out;
    for (const auto& [size, set] : classes) out[size] = static_cast<long long>(set.size());
    return out;
}

}  // namespace bks
