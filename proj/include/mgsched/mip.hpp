#pragma once

// Branch-and-bound for 0-1 mixed-integer programs on top of the bounded
// simplex, plus the exhaustive enumeration used as a test oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mgsched/error.hpp"
#include "mgsched/lp.hpp"

namespace mgsched {

/// Rounding advice for a binary: set it to 1 when constant + sum(terms) > 0,
/// to 0 when the expression is negative, and to the nearest integer on a tie.
struct RoundingHint {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;

    bool empty() const { return terms.empty() && constant == 0.0; }
    double evaluate(const std::vector<double>& x) const {
        double s = constant;
        for (auto [j, a] : terms) s += a * x[j];
        return s;
    }
};

struct MipProblem {
    const LinearProgram* lp = nullptr;
    std::vector<int> binaries;
    std::vector<int> priority;          // parallel to binaries; higher branches first
    std::vector<RoundingHint> hints;    // parallel to binaries; may be empty
    std::vector<int> rounding_class;    // parallel to binaries; heuristic fixes lower classes first
    std::vector<std::vector<int>> groups; // positions in binaries; equal-length blocks local search may swap patterns between
};

enum class SolverMode { exact, chunked };

inline const char* to_string(SolverMode m) { return m == SolverMode::exact ? "exact" : "chunked"; }

struct SolverOptions {
    double feasibility_tol = 1e-7;
    double integrality_tol = 1e-6;
    double optimality_gap = 1e-6;
    long node_limit = 1000000;
    SolverMode mode = SolverMode::chunked;
    int chunk_hours = 24;
    long window_node_limit = 50; // per window in chunked mode
    int heuristic_interval = 25;  // run the rounding dive every this many nodes
    int local_search_passes = 2;  // one-flip improvement sweeps over the incumbent
    int max_exact_rows = 4000;
    std::ostream* trace = nullptr;

    void validate() const {
        if (!(feasibility_tol > 0.0) || !(integrality_tol > 0.0) || !(optimality_gap > 0.0))
            throw ConfigError("solver tolerances must be positive");
        if (node_limit < 1 || window_node_limit < 1) throw ConfigError("node limits must be >= 1");
        if (chunk_hours < 1) throw ConfigError("chunk_hours must be >= 1");
        if (heuristic_interval < 1) throw ConfigError("heuristic_interval must be >= 1");
    }

    LpOptions lp_options() const {
        LpOptions o;
        o.feasibility_tol = feasibility_tol;
        return o;
    }
};

enum class MipStatus { optimal, infeasible, node_limit, numerical_failure };

inline const char* to_string(MipStatus s) {
    switch (s) {
    case MipStatus::optimal: return "optimal";
    case MipStatus::infeasible: return "infeasible";
    case MipStatus::node_limit: return "node_limit";
    case MipStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

struct MipResult {
    MipStatus status = MipStatus::infeasible;
    double objective = -kInf;
    double bound = kInf;
    std::vector<double> x;
    long nodes = 0;
    long lp_iterations = 0;
    bool has_incumbent = false;
    std::string message;

    double gap() const {
        if (!has_incumbent) return kInf;
        return std::abs(bound - objective) / std::max(1.0, std::abs(objective));
    }
};

namespace detail {

inline bool gap_closed(double bound, double incumbent, double gap) {
    return bound - incumbent <= gap * std::max(1.0, std::abs(incumbent));
}

/// Re-solves the LP with every binary fixed to an exact 0/1 value so the
/// reported point has clean integers and tight continuous values.
inline bool polish(const MipProblem& p, const LpOptions& lo, std::vector<double>& x, double& obj) {
    LinearProgram fixed = *p.lp;
    for (int j : p.binaries) {
        const double v = x[j] >= 0.5 ? 1.0 : 0.0;
        if (v < fixed.lower[j] || v > fixed.upper[j]) return false;
        fixed.lower[j] = fixed.upper[j] = v;
    }
    auto sol = solve_lp(fixed, lo);
    if (sol.status != LpStatus::optimal) return false;
    x = std::move(sol.x);
    obj = sol.objective;
    return true;
}

class BranchAndBound {
public:
    BranchAndBound(const MipProblem& p, const SolverOptions& opt)
        : p_(p), opt_(opt), engine_(*p.lp, opt.lp_options()) {
        const int nb = static_cast<int>(p.binaries.size());
        root_lo_.resize(nb);
        root_hi_.resize(nb);
        for (int k = 0; k < nb; ++k) {
            const int j = p.binaries[k];
            root_lo_[k] = std::max(0.0, std::ceil(p.lp->lower[j] - opt.integrality_tol));
            root_hi_[k] = std::min(1.0, std::floor(p.lp->upper[j] + opt.integrality_tol));
        }
        cur_lo_ = root_lo_;
        cur_hi_ = root_hi_;
        for (int k = 0; k < nb; ++k) engine_.set_column_bounds(p.binaries[k], cur_lo_[k], cur_hi_[k]);
        priority_ = p.priority.empty() ? std::vector<int>(nb, 0) : p.priority;
        class_ = p.rounding_class.empty() ? std::vector<int>(nb, 0) : p.rounding_class;
    }

    MipResult run() {
        MipResult res;
        const int nb = static_cast<int>(p_.binaries.size());
        for (int k = 0; k < nb; ++k)
            if (root_lo_[k] > root_hi_[k]) {
                res.status = MipStatus::infeasible;
                res.bound = -kInf;
                res.message = "binary bounds exclude both 0 and 1";
                return res;
            }
        struct Node {
            std::vector<std::pair<int, char>> fix; // binary position, value
            double bound;
            int depth;
        };
        std::vector<Node> stack;
        stack.push_back({{}, kInf, 0});
        bool numerical = false;
        while (!stack.empty()) {
            if (nodes_ >= opt_.node_limit) break;
            Node node = std::move(stack.back());
            stack.pop_back();
            if (has_inc_ && gap_closed(node.bound, inc_obj_, opt_.optimality_gap)) continue;
            ++nodes_;
            apply(node.fix);
            const LpStatus st = engine_.solve();
            iterations_ += engine_.iterations();
            if (st == LpStatus::infeasible) {
                trace(node, "infeasible", -kInf, -1);
                continue;
            }
            if (st != LpStatus::optimal) {
                numerical = true;
                trace(node, to_string(st), -kInf, -1);
                continue;
            }
            const double obj = engine_.objective();
            if (obj > node.bound + 1e-6 * std::max(1.0, std::abs(obj)) && node.depth > 0) {
                // bound sentinel: a child can never beat its parent's relaxation
                obj_violations_++;
            }
            const double node_bound = std::min(obj, node.bound);
            if (has_inc_ && gap_closed(node_bound, inc_obj_, opt_.optimality_gap)) {
                trace(node, "pruned", obj, -1);
                continue;
            }
            auto x = engine_.primal();
            const int br = select_branch(x);
            if (br < 0) {
                try_incumbent(x, obj);
                trace(node, "integral", obj, -1);
                continue;
            }
            if (nodes_ == 1 || nodes_ % opt_.heuristic_interval == 0) {
                dive(x);
                apply(node.fix);
                if (has_inc_ && gap_closed(node_bound, inc_obj_, opt_.optimality_gap)) {
                    trace(node, "pruned", obj, -1);
                    continue;
                }
            }
            trace(node, "branch", obj, p_.binaries[br]);
            const double v = x[p_.binaries[br]];
            const char first = v >= 0.5 ? 1 : 0;
            Node later{node.fix, node_bound, node.depth + 1};
            later.fix.emplace_back(br, static_cast<char>(1 - first));
            node.fix.emplace_back(br, first);
            stack.push_back(std::move(later));
            stack.push_back({std::move(node.fix), node_bound, node.depth + 1});
        }

        if (has_inc_ && !stack.empty()) local_search();

        res.nodes = nodes_;
        res.lp_iterations = iterations_;
        double open_bound = -kInf;
        for (const auto& n : stack) open_bound = std::max(open_bound, n.bound);
        if (has_inc_) {
            res.has_incumbent = true;
            res.x = inc_x_;
            res.objective = inc_obj_;
        }
        if (stack.empty()) {
            if (has_inc_) {
                res.status = MipStatus::optimal;
                res.bound = inc_obj_;
            } else {
                res.status = numerical ? MipStatus::numerical_failure : MipStatus::infeasible;
                res.bound = -kInf;
                if (numerical) res.message = "LP failures prevented a proof of infeasibility";
            }
        } else {
            res.bound = has_inc_ ? std::max(open_bound, inc_obj_) : open_bound;
            res.status = has_inc_ && gap_closed(res.bound, inc_obj_, opt_.optimality_gap) ? MipStatus::optimal
                                                                                            : MipStatus::node_limit;
            if (res.status == MipStatus::node_limit)
                res.message = "node limit reached with " + std::to_string(stack.size()) + " open nodes";
        }
        if (numerical && res.status == MipStatus::optimal) {
            res.message = "some nodes failed numerically; optimality is not certified";
            res.status = MipStatus::node_limit;
        }
        if (obj_violations_ > 0) res.message += (res.message.empty() ? "" : "; ") + std::string("bound sentinel tripped");
        return res;
    }

private:
    void apply(const std::vector<std::pair<int, char>>& fix) {
        std::vector<double> lo = root_lo_, hi = root_hi_;
        for (auto [k, v] : fix) lo[k] = hi[k] = v;
        set_bounds(lo, hi);
    }

    void set_bounds(const std::vector<double>& lo, const std::vector<double>& hi) {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (lo[k] != cur_lo_[k] || hi[k] != cur_hi_[k]) {
                cur_lo_[k] = lo[k];
                cur_hi_[k] = hi[k];
                engine_.set_column_bounds(p_.binaries[k], lo[k], hi[k]);
            }
    }

    int select_branch(const std::vector<double>& x) const {
        int best = -1;
        double best_frac = 0.0;
        for (std::size_t k = 0; k < p_.binaries.size(); ++k) {
            const double v = x[p_.binaries[k]];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac <= opt_.integrality_tol) continue;
            if (best < 0 || priority_[k] > priority_[best] ||
                (priority_[k] == priority_[best] && frac > best_frac + 1e-12)) {
                best = static_cast<int>(k);
                best_frac = frac;
            }
        }
        return best;
    }

    void try_incumbent(std::vector<double> x, double obj) {
        if (has_inc_ && obj <= inc_obj_ + 1e-12 * std::max(1.0, std::abs(inc_obj_))) return;
        if (!polish(p_, opt_.lp_options(), x, obj)) return;
        if (has_inc_ && obj <= inc_obj_) return;
        has_inc_ = true;
        inc_obj_ = obj;
        inc_x_ = std::move(x);
    }

    /// Fixes binaries class by class from their hints and re-solves.
    void dive(std::vector<double> x) {
        std::vector<double> lo = cur_lo_, hi = cur_hi_;
        int max_class = 0;
        for (int c : class_) max_class = std::max(max_class, c);
        for (int c = 0; c <= max_class; ++c) {
            bool changed = false;
            for (std::size_t k = 0; k < p_.binaries.size(); ++k) {
                if (class_[k] != c || lo[k] == hi[k]) continue;
                const double v = x[p_.binaries[k]];
                double r = v >= 0.5 ? 1.0 : 0.0;
                if (k < p_.hints.size() && !p_.hints[k].empty()) {
                    const double e = p_.hints[k].evaluate(x);
                    if (e > 1e-9) r = 1.0;
                    else if (e < -1e-9) r = 0.0;
                }
                lo[k] = hi[k] = r;
                changed = true;
            }
            if (!changed) continue;
            set_bounds(lo, hi);
            const LpStatus st = engine_.solve();
            iterations_ += engine_.iterations();
            if (st != LpStatus::optimal) return;
            x = engine_.primal();
        }
        for (std::size_t k = 0; k < p_.binaries.size(); ++k) {
            const double v = x[p_.binaries[k]];
            if (std::min(v, 1.0 - v) > opt_.integrality_tol) return;
        }
        try_incumbent(x, engine_.objective());
    }

    /// Flips one lowest-class binary at a time around the incumbent, keeping
    /// improvements; higher classes stay relaxed and are re-fixed at the end.
    void local_search() {
        if (opt_.local_search_passes <= 0) return;
        const std::size_t nb = p_.binaries.size();
        std::vector<double> lo = root_lo_, hi = root_hi_;
        std::vector<std::size_t> movable;
        for (std::size_t k = 0; k < nb; ++k) {
            if (class_[k] != 0) continue;
            const double v = inc_x_[p_.binaries[k]] >= 0.5 ? 1.0 : 0.0;
            lo[k] = hi[k] = v;
            if (root_lo_[k] < root_hi_[k]) movable.push_back(k);
        }
        set_bounds(lo, hi);
        if (engine_.solve() != LpStatus::optimal) return;
        iterations_ += engine_.iterations();
        double best = engine_.objective();
        const double eps = 1e-9 * std::max(1.0, std::abs(best));
        bool any = false;
        for (int pass = 0; pass < opt_.local_search_passes; ++pass) {
            bool improved = false;
            for (std::size_t k : movable) {
                const double flipped = 1.0 - lo[k];
                lo[k] = hi[k] = flipped;
                set_bounds(lo, hi);
                const LpStatus st = engine_.solve();
                iterations_ += engine_.iterations();
                if (st == LpStatus::optimal && engine_.objective() > best + eps) {
                    best = engine_.objective();
                    improved = any = true;
                } else {
                    lo[k] = hi[k] = 1.0 - flipped;
                }
            }
            if (block_moves(lo, hi, best, eps)) improved = any = true;
            if (!improved) break;
        }
        if (!any) return;
        set_bounds(lo, hi);
        if (engine_.solve() != LpStatus::optimal) return;
        dive(engine_.primal());
    }

    /// Copies the binary pattern of one group onto another, keeping improvements.
    bool block_moves(std::vector<double>& lo, std::vector<double>& hi, double& best, double eps) {
        bool improved = false;
        const auto& groups = p_.groups;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<std::vector<double>> tried;
            auto pattern = [&](std::size_t h) {
                std::vector<double> v;
                for (int k : groups[h]) v.push_back(lo[k]);
                return v;
            };
            tried.push_back(pattern(g));
            for (std::size_t h = 0; h < groups.size(); ++h) {
                if (groups[h].size() != groups[g].size()) continue;
                std::vector<double> cand = pattern(h);
                if (std::find(tried.begin(), tried.end(), cand) != tried.end()) continue;
                tried.push_back(cand);
                bool allowed = true;
                for (std::size_t i = 0; i < cand.size(); ++i) {
                    const int k = groups[g][i];
                    if (class_[k] != 0 || cand[i] < root_lo_[k] || cand[i] > root_hi_[k]) allowed = false;
                }
                if (!allowed) continue;
                std::vector<double> saved = pattern(g);
                for (std::size_t i = 0; i < cand.size(); ++i) lo[groups[g][i]] = hi[groups[g][i]] = cand[i];
                set_bounds(lo, hi);
                const LpStatus st = engine_.solve();
                iterations_ += engine_.iterations();
                if (st == LpStatus::optimal && engine_.objective() > best + eps) {
                    best = engine_.objective();
                    improved = true;
                    tried.front() = cand;
                } else {
                    for (std::size_t i = 0; i < saved.size(); ++i) lo[groups[g][i]] = hi[groups[g][i]] = saved[i];
                }
            }
        }
        return improved;
    }

    template <class N>
    void trace(const N& node, const char* what, double obj, int var) {
        if (!opt_.trace) return;
        *opt_.trace << "node " << nodes_ << " depth " << node.depth << " parent_bound " << node.bound << " lp " << obj
                    << ' ' << what;
        if (var >= 0) *opt_.trace << " branch " << p_.lp->col_names[var];
        if (has_inc_) *opt_.trace << " incumbent " << inc_obj_;
        *opt_.trace << '\n';
    }

    const MipProblem& p_;
    SolverOptions opt_;
    SimplexEngine engine_;
    std::vector<double> root_lo_, root_hi_, cur_lo_, cur_hi_;
    std::vector<int> priority_, class_;
    long nodes_ = 0;
    long iterations_ = 0;
    long obj_violations_ = 0;
    bool has_inc_ = false;
    double inc_obj_ = -kInf;
    std::vector<double> inc_x_;
};

} // namespace detail

inline void validate_mip(const MipProblem& p) {
    if (!p.lp) throw SolverError("MipProblem has no LP");
    p.lp->validate();
    const auto nb = p.binaries.size();
    if (!p.priority.empty() && p.priority.size() != nb) throw SolverError("priority size mismatch");
    if (!p.hints.empty() && p.hints.size() != nb) throw SolverError("hint size mismatch");
    if (!p.rounding_class.empty() && p.rounding_class.size() != nb) throw SolverError("rounding class size mismatch");
    for (const auto& g : p.groups)
        for (int k : g)
            if (k < 0 || static_cast<std::size_t>(k) >= nb) throw SolverError("group position out of range");
    for (int j : p.binaries) {
        if (j < 0 || j >= p.lp->num_cols()) throw SolverError("binary index out of range");
        if (p.lp->lower[j] < -1e-12 || p.lp->upper[j] > 1.0 + 1e-12) throw SolverError("binary column bounds exceed [0, 1]");
    }
}

/// Depth-first branch-and-bound with best-bound pruning. Branches on the
/// most fractional binary of the highest priority class; ties go to the
/// lowest position in `binaries`. The child on the LP value's side is explored first.
inline MipResult solve_mip(const MipProblem& p, const SolverOptions& opt = {}) {
    validate_mip(p);
    opt.validate();
    detail::BranchAndBound bb(p, opt);
    return bb.run();
}

/// Solves the LP for every assignment of the free binaries, visited in Gray
/// code order so consecutive solves differ by one bound change.
inline MipResult brute_force_mip(const MipProblem& p, const SolverOptions& opt = {}, int max_binaries = 24) {
    validate_mip(p);
    std::vector<int> free_cols;
    LinearProgram lp = *p.lp;
    for (int j : p.binaries) {
        const double lo = std::max(0.0, std::ceil(lp.lower[j] - 1e-9));
        const double hi = std::min(1.0, std::floor(lp.upper[j] + 1e-9));
        if (lo > hi) {
            MipResult r;
            r.status = MipStatus::infeasible;
            return r;
        }
        lp.lower[j] = lo;
        lp.upper[j] = hi;
        if (lo < hi) {
            free_cols.push_back(j);
            lp.upper[j] = 0.0;
        }
    }
    const int nf = static_cast<int>(free_cols.size());
    if (nf > max_binaries)
        throw SolverError("brute force supports at most " + std::to_string(max_binaries) + " free binaries, got " +
                          std::to_string(nf));
    SimplexEngine engine(lp, opt.lp_options());
    MipResult res;
    res.status = MipStatus::infeasible;
    const std::uint64_t count = std::uint64_t{1} << nf;
    std::uint64_t gray = 0;
    bool numerical = false;
    for (std::uint64_t i = 0; i < count; ++i) {
        if (i > 0) {
            const int bit = __builtin_ctzll(i);
            gray ^= std::uint64_t{1} << bit;
            const double v = (gray >> bit) & 1 ? 1.0 : 0.0;
            engine.set_column_bounds(free_cols[bit], v, v);
        }
        ++res.nodes;
        const LpStatus st = engine.solve();
        res.lp_iterations += engine.iterations();
        if (st == LpStatus::infeasible) continue;
        if (st != LpStatus::optimal) {
            numerical = true;
            continue;
        }
        const double obj = engine.objective();
        if (!res.has_incumbent || obj > res.objective) {
            res.has_incumbent = true;
            res.objective = obj;
            res.x = engine.primal();
        }
    }
    if (res.has_incumbent) {
        double obj = res.objective;
        if (detail::polish(p, opt.lp_options(), res.x, obj)) res.objective = obj;
        res.status = numerical ? MipStatus::numerical_failure : MipStatus::optimal;
        res.bound = res.objective;
    } else {
        res.status = numerical ? MipStatus::numerical_failure : MipStatus::infeasible;
        res.bound = -kInf;
    }
    return res;
}

} // namespace mgsched
