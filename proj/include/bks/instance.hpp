#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bks/field.hpp"

namespace bks {

using Mask = std::uint64_t;

inline int popcount(Mask m) { return __builtin_popcountll(m); }
inline int lowest_bit(Mask m) { return __builtin_ctzll(m); }

/// Lexicographic order on subsets seen as sorted index lists: the set owning
/// the smallest element of the symmetric difference comes first.
inline bool subset_lex_less(Mask a, Mask b) {
    Mask d = a ^ b;
    if (d == 0) return false;
    return (d & -d) & a;
}

struct Basis {
    int label = 0;                // 1-based display label (may be sparse)
    std::vector<int> members;     // sorted vector indices
    Mask mask = 0;
};

/// A KS set: vectors (exact coordinates or abstract vertices), the
/// orthogonality relation as adjacency bitmasks, and an explicit list of
/// orthogonal bases (d-cliques of the relation).
class KSInstance {
public:
    static constexpr int kMaxVectors = 64;
    static constexpr int kMaxBases = 64;

    KSInstance() = default;

    /// Coordinate-backed construction; the orthogonality relation is derived
    /// from exact inner products.
    static KSInstance from_coordinates(std::string name, int dimension,
                                       std::vector<std::string> ids,
                                       std::vector<ExactVector> vectors,
                                       std::vector<Basis> bases) {
        KSInstance k;
        k.name_ = std::move(name);
        k.dimension_ = dimension;
        k.ids_ = std::move(ids);
        k.coords_ = std::move(vectors);
        k.bases_ = std::move(bases);
        k.check_shape(static_cast<int>(k.coords_.size()));
        k.adj_.assign(k.n(), 0);
        for (int i = 0; i < k.n(); ++i) {
            if (k.coords_[i].dim() != static_cast<std::size_t>(dimension))
                throw std::invalid_argument(k.name_ + ": vector " + k.ids_[i] + " has wrong dimension");
            if (k.coords_[i].is_zero())
                throw std::invalid_argument(k.name_ + ": vector " + k.ids_[i] + " is zero");
        }
        for (int i = 0; i < k.n(); ++i)
            for (int j = i + 1; j < k.n(); ++j)
                if (inner_product(k.coords_[i], k.coords_[j]).is_zero()) {
                    k.adj_[i] |= Mask(1) << j;
                    k.adj_[j] |= Mask(1) << i;
                }
        k.finish();
        return k;
    }

    /// Abstract construction from an explicit orthogonality edge list.
    static KSInstance from_orthogonality(std::string name, int dimension,
                                         std::vector<std::string> ids,
                                         const std::vector<std::pair<int, int>>& edges,
                                         std::vector<Basis> bases) {
        KSInstance k;
        k.name_ = std::move(name);
        k.dimension_ = dimension;
        k.ids_ = std::move(ids);
        k.bases_ = std::move(bases);
        k.check_shape(static_cast<int>(k.ids_.size()));
        k.adj_.assign(k.n(), 0);
        for (auto [a, b] : edges) {
            if (a < 0 || b < 0 || a >= k.n() || b >= k.n() || a == b)
                throw std::invalid_argument(k.name_ + ": bad orthogonality edge");
            k.adj_[a] |= Mask(1) << b;
            k.adj_[b] |= Mask(1) << a;
        }
        k.finish();
        return k;
    }

    const std::string& name() const { return name_; }
    int dimension() const { return dimension_; }
    int n() const { return static_cast<int>(ids_.size()); }
    int m() const { return static_cast<int>(bases_.size()); }
    bool coordinate_backed() const { return !coords_.empty(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<ExactVector>& coordinates() const { return coords_; }
    const std::vector<Basis>& bases() const { return bases_; }
    const Basis& basis(int i) const { return bases_.at(i); }
    Mask adjacency(int v) const { return adj_.at(v); }
    const std::vector<Mask>& adjacency() const { return adj_; }
    bool orthogonal(int a, int b) const { return adj_[a] >> b & 1; }

    Mask full_basis_mask() const { return m() == 64 ? ~Mask(0) : (Mask(1) << m()) - 1; }

    /// Union of the members of the bases selected by `basis_subset`.
    Mask groundset(Mask basis_subset) const {
        Mask g = 0;
        while (basis_subset) {
            int b = lowest_bit(basis_subset);
            basis_subset &= basis_subset - 1;
            g |= bases_[b].mask;
        }
        return g;
    }

    /// Vectors appearing in at least one basis.
    Mask covered_vectors() const { return covered_; }

    int index_of_label(int label) const {
        auto it = label_to_index_.find(label);
        if (it == label_to_index_.end())
            throw std::invalid_argument(name_ + ": no basis labeled " + std::to_string(label));
        return it->second;
    }
    bool has_label(int label) const { return label_to_index_.count(label) != 0; }

    std::vector<int> labels_of(Mask basis_subset) const {
        std::vector<int> out;
        while (basis_subset) {
            int b = lowest_bit(basis_subset);
            basis_subset &= basis_subset - 1;
            out.push_back(bases_[b].label);
        }
        return out;
    }
    Mask mask_of_labels(const std::vector<int>& labels) const {
        Mask m = 0;
        for (int lab : labels) m |= Mask(1) << index_of_label(lab);
        return m;
    }

private:
    void check_shape(int nvec) {
        if (dimension_ < 3) throw std::invalid_argument(name_ + ": dimension must be >= 3");
        if (nvec > kMaxVectors) throw std::invalid_argument(name_ + ": too many vectors (max 64)");
        if (static_cast<int>(bases_.size()) > kMaxBases)
            throw std::invalid_argument(name_ + ": too many bases (max 64)");
        if (static_cast<int>(ids_.size()) != nvec)
            throw std::invalid_argument(name_ + ": id/vector count mismatch");
    }
    void finish() {
        covered_ = 0;
        for (std::size_t i = 0; i < bases_.size(); ++i) {
            Basis& b = bases_[i];
            std::sort(b.members.begin(), b.members.end());
            b.mask = 0;
            for (int v : b.members) {
                if (v < 0 || v >= n())
                    throw std::invalid_argument(name_ + ": basis member out of range");
                b.mask |= Mask(1) << v;
            }
            if (static_cast<int>(b.members.size()) != dimension_ ||
                popcount(b.mask) != dimension_)
                throw std::invalid_argument(name_ + ": basis " + std::to_string(b.label) +
                                            " does not have d distinct members");
            covered_ |= b.mask;
            if (!label_to_index_.emplace(b.label, static_cast<int>(i)).second)
                throw std::invalid_argument(name_ + ": duplicate basis label " +
                                            std::to_string(b.label));
        }
    }

    std::string name_;
    int dimension_ = 0;
    std::vector<std::string> ids_;
    std::vector<ExactVector> coords_;   // empty for abstract instances
    std::vector<Mask> adj_;
    std::vector<Basis> bases_;
    std::map<int, int> label_to_index_;
    Mask covered_ = 0;
};

/// Eq-style cardinality bound: |S_A| + |S_B| >= |groundset(S_A u S_B)| / d,
/// compared exactly as (|S_A|+|S_B|) * d >= |groundset|.
inline bool cardinality_lower_bound(const KSInstance& inst, Mask sa, Mask sb) {
    int lhs = popcount(sa) + popcount(sb);
    int ground = popcount(inst.groundset(sa | sb));
    return lhs * inst.dimension() >= ground;
}

/// All d-cliques of the orthogonality graph in deterministic lexicographic
/// order.  For a coordinate-backed instance every d-clique is an orthogonal
/// basis, so this recovers (a superset of) the transcribed basis list.
inline std::vector<std::vector<int>> derive_bases_from_cliques(const KSInstance& inst) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    const int n = inst.n();
    const int d = inst.dimension();
    auto rec = [&](auto&& self, Mask cand, int start) -> void {
        if (static_cast<int>(cur.size()) == d) {
            out.push_back(cur);
            return;
        }
        if (static_cast<int>(cur.size()) + (n - start) < d) return;
        for (int v = start; v < n; ++v) {
            if (cand >> v & 1) {
                cur.push_back(v);
                self(self, cand & inst.adjacency(v), v + 1);
                cur.pop_back();
            }
        }
    };
    rec(rec, n == 64 ? ~Mask(0) : (Mask(1) << n) - 1, 0);
    return out;
}

// ------------------------------------------------------------------ validate

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    void add(std::string name, bool passed, std::string detail = "") {
        checks.push_back({std::move(name), passed, std::move(detail)});
    }
};

/// Structural validation of a KSInstance.  All checks are reported, none
/// throws: partial failures are useful when transcribing tables.
inline ValidationReport validate(const KSInstance& inst) {
    ValidationReport rep;
    rep.add("dimension >= 3", inst.dimension() >= 3);

    bool sizes_ok = true, orth_ok = true;
    std::string orth_detail;
    for (const auto& b : inst.bases()) {
        if (static_cast<int>(b.members.size()) != inst.dimension()) sizes_ok = false;
        for (std::size_t i = 0; i < b.members.size() && orth_ok; ++i)
            for (std::size_t j = i + 1; j < b.members.size(); ++j)
                if (!inst.orthogonal(b.members[i], b.members[j])) {
                    orth_ok = false;
                    orth_detail = "basis " + std::to_string(b.label) + ": " +
                                  inst.ids()[b.members[i]] + " vs " + inst.ids()[b.members[j]];
                    break;
                }
    }
    rep.add("bases have d members", sizes_ok);
    rep.add("bases are mutually orthogonal d-cliques", orth_ok, orth_detail);

    bool dup_basis = false;
    {
        std::vector<Mask> masks;
        for (const auto& b : inst.bases()) masks.push_back(b.mask);
        std::sort(masks.begin(), masks.end());
        dup_basis = std::adjacent_find(masks.begin(), masks.end()) != masks.end();
    }
    rep.add("no duplicate bases", !dup_basis);

    if (inst.coordinate_backed()) {
        bool dup_ray = false;
        std::string dup_detail;
        for (int i = 0; i < inst.n() && !dup_ray; ++i)
            for (int j = i + 1; j < inst.n(); ++j)
                if (same_ray(inst.coordinates()[i], inst.coordinates()[j])) {
                    dup_ray = true;
                    dup_detail = inst.ids()[i] + " ~ " + inst.ids()[j];
                    break;
                }
        rep.add("no projectively equal vectors", !dup_ray, dup_detail);

        // relation must coincide with exact inner products (by construction it
        // does; re-derive as a transcription guard)
        bool rel_ok = true;
        for (int i = 0; i < inst.n() && rel_ok; ++i)
            for (int j = i + 1; j < inst.n(); ++j) {
                bool zero = inner_product(inst.coordinates()[i], inst.coordinates()[j]).is_zero();
                if (zero != inst.orthogonal(i, j)) rel_ok = false;
            }
        rep.add("orthogonality matches exact inner products", rel_ok);
    }
    bool irreflexive = true;
    for (int i = 0; i < inst.n(); ++i)
        if (inst.adjacency(i) >> i & 1) irreflexive = false;
    rep.add("orthogonality irreflexive", irreflexive);
    return rep;
}

}  // namespace bks
