#pragma once

#include <cstdint>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bks {

/// A pure 0/1 feasibility problem:
///   exactly-one groups   (sum over set = 1)
///   at-least-one groups  (sum over set >= 1)
///   at-most-one pairs    (w + w' <= 1), stored as per-variable conflict bitsets.
class FeasibilityProblem {
public:
    static constexpr int kMaxWords = 8;   // up to 512 variables

    struct Group {
        bool exact = true;
        std::vector<int> vars;   // sorted ascending
    };

    void reset(int num_vars) {
        if (num_vars < 0 || num_vars > 64 * kMaxWords)
            throw std::invalid_argument("FeasibilityProblem: too many variables");
        nvars_ = num_vars;
        words_ = (num_vars + 63) / 64;
        if (words_ == 0) words_ = 1;
        conflict_.assign(static_cast<std::size_t>(nvars_) * words_, 0);
        groups_.clear();
        names_.clear();
    }

    int num_vars() const { return nvars_; }
    int words() const { return words_; }
    const std::vector<Group>& groups() const { return groups_; }
    const std::uint64_t* conflict_row(int v) const { return conflict_.data() + std::size_t(v) * words_; }

    void add_exactly_one(std::vector<int> vars) { add_group(std::move(vars), true); }
    void add_at_least_one(std::vector<int> vars) { add_group(std::move(vars), false); }

    void add_at_most_one(int a, int b) {
        check_var(a);
        check_var(b);
        if (a == b) throw std::invalid_argument("at_most_one: identical variables");
        conflict_[std::size_t(a) * words_ + b / 64] |= std::uint64_t(1) << (b % 64);
        conflict_[std::size_t(b) * words_ + a / 64] |= std::uint64_t(1) << (a % 64);
    }

    bool conflicting(int a, int b) const {
        return conflict_[std::size_t(a) * words_ + b / 64] >> (b % 64) & 1;
    }

    std::vector<std::pair<int, int>> at_most_one_pairs() const {
        std::vector<std::pair<int, int>> out;
        for (int a = 0; a < nvars_; ++a)
            for (int b = a + 1; b < nvars_; ++b)
                if (conflicting(a, b)) out.emplace_back(a, b);
        return out;
    }

    void set_names(std::vector<std::string> names) { names_ = std::move(names); }
    const std::vector<std::string>& names() const { return names_; }

    /// DIMACS-style CNF view: exactly-one expands to one positive clause plus
    /// pairwise negative clauses; at-least-one to a positive clause.
    void write_cnf(std::ostream& os) const {
        std::size_t clauses = 0;
        for (const auto& g : groups_) {
            clauses += 1;
            if (g.exact) clauses += g.vars.size() * (g.vars.size() - 1) / 2;
        }
        auto pairs = at_most_one_pairs();
        clauses += pairs.size();
        os << "p cnf " << nvars_ << ' ' << clauses << '\n';
        for (const auto& g : groups_) {
            for (int v : g.vars) os << (v + 1) << ' ';
            os << "0\n";
            if (g.exact)
                for (std::size_t i = 0; i < g.vars.size(); ++i)
                    for (std::size_t j = i + 1; j < g.vars.size(); ++j)
                        os << -(g.vars[i] + 1) << ' ' << -(g.vars[j] + 1) << " 0\n";
        }
        for (auto [a, b] : pairs) os << -(a + 1) << ' ' << -(b + 1) << " 0\n";
    }

private:
    void add_group(std::vector<int> vars, bool exact) {
        if (vars.empty()) throw std::invalid_argument("empty constraint group");
        for (int v : vars) check_var(v);
        groups_.push_back({exact, std::move(vars)});
    }
    void check_var(int v) const {
        if (v < 0 || v >= nvars_) throw std::invalid_argument("variable out of range");
    }

    int nvars_ = 0;
    int words_ = 1;
    std::vector<std::uint64_t> conflict_;
    std::vector<Group> groups_;
    std::vector<std::string> names_;
};

enum class Feasibility { feasible, infeasible };

struct SolveResult {
    Feasibility status = Feasibility::infeasible;
    std::vector<std::uint8_t> witness;   // total assignment when feasible
    std::uint64_t decisions = 0;
};

/// Independent constraint evaluator used to re-check witnesses.
inline bool satisfies(const FeasibilityProblem& p, const std::vector<std::uint8_t>& w) {
    if (static_cast<int>(w.size()) != p.num_vars()) return false;
    for (const auto& g : p.groups()) {
        int ones = 0;
        for (int v : g.vars) ones += w[v] ? 1 : 0;
        if (g.exact ? ones != 1 : ones < 1) return false;
    }
    for (int a = 0; a < p.num_vars(); ++a) {
        if (!w[a]) continue;
        const std::uint64_t* row = p.conflict_row(a);
        for (int wd = 0; wd < p.words(); ++wd) {
            std::uint64_t bits = row[wd];
            while (bits) {
                int b = wd * 64 + __builtin_ctzll(bits);
                bits &= bits - 1;
                if (b < p.num_vars() && w[b]) return false;
            }
        }
    }
    return true;
}

/// Complete depth-first search with unit propagation.  Deterministic:
/// branches on the lowest-index free variable of the most-constrained
/// unsatisfied group (fewest free variables; ties by group index), value 1
/// first.  Reusable across solves to avoid re-allocation.
class Solver {
public:
    SolveResult solve(const FeasibilityProblem& p) {
        p_ = &p;
        n_ = p.num_vars();
        words_ = p.words();
        value_.assign(n_, -1);
        var_groups_offset_.assign(n_ + 1, 0);
        const auto& groups = p.groups();
        group_free_.assign(groups.size(), 0);
        group_ones_.assign(groups.size(), 0);
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            group_free_[gi] = static_cast<int>(groups[gi].vars.size());
            for (int v : groups[gi].vars) var_groups_offset_[v + 1]++;
        }
        for (int v = 0; v < n_; ++v) var_groups_offset_[v + 1] += var_groups_offset_[v];
        var_groups_.assign(var_groups_offset_[n_], 0);
        {
            std::vector<int> fill(var_groups_offset_.begin(), var_groups_offset_.end() - 1);
            for (std::size_t gi = 0; gi < groups.size(); ++gi)
                for (int v : groups[gi].vars) var_groups_[fill[v]++] = static_cast<int>(gi);
        }
        trail_.clear();
        queue_.clear();
        result_ = SolveResult{};

        if (dfs()) {
            result_.status = Feasibility::feasible;
            result_.witness.assign(n_, 0);
            for (int v = 0; v < n_; ++v) result_.witness[v] = value_[v] == 1 ? 1 : 0;
        } else {
            result_.status = Feasibility::infeasible;
        }
        return result_;
    }

private:
    // assign + propagate; returns false on conflict. Appends to trail_.
    bool enqueue(int v, int val) {
        queue_.clear();
        queue_.push_back((v << 1) | val);
        std::size_t qi = 0;
        while (qi < queue_.size()) {
            int item = queue_[qi++];
            int var = item >> 1;
            int val2 = item & 1;
            if (value_[var] != -1) {
                if (value_[var] != val2) return false;
                continue;
            }
            value_[var] = static_cast<std::int8_t>(val2);
            trail_.push_back(var);
            const auto& groups = p_->groups();
            // Counter updates for var's groups must run to completion even on
            // conflict: undo_to reverts them for every group of var, so a
            // mid-loop early return would corrupt the counters.
            bool conflict = false;
            if (val2 == 1) {
                const std::uint64_t* row = p_->conflict_row(var);
                for (int wd = 0; wd < words_; ++wd) {
                    std::uint64_t bits = row[wd];
                    while (bits) {
                        int b = wd * 64 + __builtin_ctzll(bits);
                        bits &= bits - 1;
                        if (value_[b] == 1) conflict = true;
                        else if (value_[b] == -1) queue_.push_back(b << 1);
                    }
                }
                for (int k = var_groups_offset_[var]; k < var_groups_offset_[var + 1]; ++k) {
                    int gi = var_groups_[k];
                    --group_free_[gi];
                    ++group_ones_[gi];
                    if (groups[gi].exact) {
                        if (group_ones_[gi] > 1) conflict = true;
                        else if (!conflict)
                            for (int u : groups[gi].vars)
                                if (u != var && value_[u] == -1) queue_.push_back(u << 1);
                    }
                }
            } else {
                for (int k = var_groups_offset_[var]; k < var_groups_offset_[var + 1]; ++k) {
                    int gi = var_groups_[k];
                    --group_free_[gi];
                    if (group_ones_[gi] == 0) {
                        if (group_free_[gi] == 0) conflict = true;
                        else if (group_free_[gi] == 1 && !conflict) {
                            for (int u : groups[gi].vars)
                                if (value_[u] == -1) {
                                    queue_.push_back((u << 1) | 1);
                                    break;
                                }
                        }
                    }
                }
            }
            if (conflict) return false;
        }
        return true;
    }

    void undo_to(std::size_t mark) {
        const auto& groups = p_->groups();
        while (trail_.size() > mark) {
            int var = trail_.back();
            trail_.pop_back();
            int val = value_[var];
            value_[var] = -1;
            for (int k = var_groups_offset_[var]; k < var_groups_offset_[var + 1]; ++k) {
                int gi = var_groups_[k];
                ++group_free_[gi];
                if (val == 1) --group_ones_[gi];
            }
        }
        (void)groups;
    }

    int pick_group() const {
        const auto& groups = p_->groups();
        int best = -1, best_free = 1 << 30;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            if (group_ones_[gi] > 0) continue;
            if (group_free_[gi] < best_free) {
                best_free = group_free_[gi];
                best = static_cast<int>(gi);
            }
        }
        return best;
    }

    bool dfs() {
        int gi = pick_group();
        if (gi < 0) return true;   // all groups satisfied; free vars default to 0
        int var = -1;
        for (int u : p_->groups()[gi].vars)
            if (value_[u] == -1) {
                var = u;
                break;
            }
        if (var < 0) return false;  // free count 0 with no ones: dead (propagation should catch)
        ++result_.decisions;
        for (int val : {1, 0}) {
            std::size_t mark = trail_.size();
            if (enqueue(var, val) && dfs()) return true;
            undo_to(mark);
        }
        return false;
    }

    const FeasibilityProblem* p_ = nullptr;
    int n_ = 0, words_ = 1;
    std::vector<std::int8_t> value_;
    std::vector<int> group_free_, group_ones_;
    std::vector<int> var_groups_offset_, var_groups_;
    std::vector<int> trail_;
    std::vector<int> queue_;
    SolveResult result_;
};

inline SolveResult solve(const FeasibilityProblem& p) {
    Solver s;
    return s.solve(p);
}

}  // namespace bks
