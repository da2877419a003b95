#pragma once

// Bounded-variable simplex for small and medium dense-ish LPs.
//
// Every row i carries a logical variable r_i = a_i^T x with bounds taken from
// the row sense, so the working system is A x - r = 0 with simple bounds on
// all n + m variables. The basis inverse is held explicitly (dense m x m) and
// updated by elementary row operations, refactored periodically. Structural
// variables must be boxed, which makes the all-logical basis dual feasible and
// lets the dual simplex start without a phase 1. The same engine is used warm
// by branch-and-bound: bound changes keep the basis dual feasible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgsched/error.hpp"

namespace mgsched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : char { le, eq, ge };

/// Maximization LP with boxed columns and sparse rows (CSR).
struct LinearProgram {
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::string> col_names;

    std::vector<int> row_start{0};
    std::vector<int> row_index;
    std::vector<double> row_value;
    std::vector<RowSense> sense;
    std::vector<double> rhs;
    std::vector<std::string> row_names;

    int num_cols() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rhs.size()); }
    int num_nonzeros() const { return static_cast<int>(row_index.size()); }

    int add_column(double lo, double hi, double obj, std::string name = {}) {
        objective.push_back(obj);
        lower.push_back(lo);
        upper.push_back(hi);
        col_names.push_back(std::move(name));
        return num_cols() - 1;
    }

    /// Duplicate column indices are merged; exact zeros are dropped.
    int add_row(std::vector<std::pair<int, double>> terms, RowSense s, double b, std::string name = {}) {
        std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
        std::size_t k = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (k > 0 && terms[k - 1].first == terms[i].first)
                terms[k - 1].second += terms[i].second;
            else
                terms[k++] = terms[i];
        }
        terms.resize(k);
        for (const auto& [j, v] : terms) {
            if (v == 0.0) continue;
            row_index.push_back(j);
            row_value.push_back(v);
        }
        row_start.push_back(static_cast<int>(row_index.size()));
        sense.push_back(s);
        rhs.push_back(b);
        row_names.push_back(std::move(name));
        return num_rows() - 1;
    }

    std::span<const int> row_cols(int i) const {
        return {row_index.data() + row_start[i], static_cast<std::size_t>(row_start[i + 1] - row_start[i])};
    }
    std::span<const double> row_vals(int i) const {
        return {row_value.data() + row_start[i], static_cast<std::size_t>(row_start[i + 1] - row_start[i])};
    }

    double row_lower(int i) const { return sense[i] == RowSense::le ? -kInf : rhs[i]; }
    double row_upper(int i) const { return sense[i] == RowSense::ge ? kInf : rhs[i]; }

    double activity(int i, std::span<const double> x) const {
        double s = 0.0;
        auto cols = row_cols(i);
        auto vals = row_vals(i);
        for (std::size_t e = 0; e < cols.size(); ++e) s += vals[e] * x[cols[e]];
        return s;
    }

    double objective_value(std::span<const double> x) const {
        double s = 0.0;
        for (int j = 0; j < num_cols(); ++j) s += objective[j] * x[j];
        return s;
    }

    void validate() const {
        const auto n = objective.size();
        if (lower.size() != n || upper.size() != n)
            throw SolverError("LinearProgram: bound vectors do not match column count");
        if (!col_names.empty() && col_names.size() != n)
            throw SolverError("LinearProgram: name vector does not match column count");
        if (row_start.size() != rhs.size() + 1 || sense.size() != rhs.size())
            throw SolverError("LinearProgram: row arrays inconsistent");
        if (static_cast<std::size_t>(row_start.back()) != row_index.size() || row_index.size() != row_value.size())
            throw SolverError("LinearProgram: row storage inconsistent");
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
                throw SolverError("LinearProgram: column " + std::to_string(j) + " has an infinite bound");
            if (lower[j] > upper[j])
                throw SolverError("LinearProgram: column " + std::to_string(j) + " has lower > upper");
            if (!std::isfinite(objective[j]))
                throw SolverError("LinearProgram: non-finite objective coefficient");
        }
        for (int idx : row_index)
            if (idx < 0 || static_cast<std::size_t>(idx) >= n)
                throw SolverError("LinearProgram: row references undeclared column " + std::to_string(idx));
        for (double v : row_value)
            if (!std::isfinite(v)) throw SolverError("LinearProgram: non-finite row coefficient");
        for (double b : rhs)
            if (!std::isfinite(b)) throw SolverError("LinearProgram: non-finite right-hand side");
    }
};

struct LpOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    long max_iterations = 0; // 0 = automatic
    int stall_threshold = 60;
    int refactor_interval = 100;
};

enum class LpStatus { optimal, infeasible, iteration_limit, numerical_failure };

inline const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace detail {

inline double dot(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int c = 0;
    for (; c + 4 <= n; c += 4) {
        s0 += a[c] * b[c];
        s1 += a[c + 1] * b[c + 1];
        s2 += a[c + 2] * b[c + 2];
        s3 += a[c + 3] * b[c + 3];
    }
    for (; c < n; ++c) s0 += a[c] * b[c];
    return (s0 + s1) + (s2 + s3);
}

} // namespace detail

struct LpSolution {
    LpStatus status = LpStatus::numerical_failure;
    double objective = 0.0;
    std::vector<double> x;
    std::vector<double> row_activity;
    long iterations = 0;
    std::string message;
};

class SimplexEngine {
public:
    SimplexEngine(const LinearProgram& lp, LpOptions opts) : lp_(&lp), opt_(opts) {
        lp.validate();
        n_ = lp.num_cols();
        m_ = lp.num_rows();
        build_columns();
        const int total = n_ + m_;
        cost_.assign(total, 0.0);
        lo_.resize(total);
        up_.resize(total);
        for (int j = 0; j < n_; ++j) {
            cost_[j] = -lp.objective[j];
            lo_[j] = lp.lower[j];
            up_[j] = lp.upper[j];
        }
        for (int i = 0; i < m_; ++i) {
            lo_[n_ + i] = lp.row_lower(i);
            up_[n_ + i] = lp.row_upper(i);
        }
        x_.assign(total, 0.0);
        d_.assign(total, 0.0);
        state_.assign(total, State::at_lower);
        head_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            head_[i] = n_ + i;
            state_[n_ + i] = State::basic;
        }
        for (int j = 0; j < n_; ++j) {
            // all-logical basis: y = 0, d = c
            state_[j] = cost_[j] >= 0.0 ? State::at_lower : State::at_upper;
            x_[j] = state_[j] == State::at_lower ? lo_[j] : up_[j];
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        scratch_.assign(m_, 0.0);
        weight_.assign(m_, 1.0);
        for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = -1.0;
        needs_factor_ = true;
    }

    int num_cols() const { return n_; }
    int num_rows() const { return m_; }

    double column_lower(int j) const { return lo_[j]; }
    double column_upper(int j) const { return up_[j]; }

    /// Changes a structural bound; the basis stays dual feasible.
    void set_column_bounds(int j, double lo, double hi) {
        lo_[j] = lo;
        up_[j] = hi;
        if (state_[j] == State::basic) return;
        const double old = x_[j];
        place_nonbasic(j);
        const double delta = x_[j] - old;
        if (delta == 0.0) return;
        if (needs_factor_ || dirty_) {
            dirty_ = true;
            return;
        }
        compute_column(j, scratch_);
        for (int i = 0; i < m_; ++i) x_[head_[i]] -= delta * scratch_[i];
    }

    LpStatus solve() {
        iterations_ = 0;
        message_.clear();
        const long limit = opt_.max_iterations > 0 ? opt_.max_iterations : 50L * (n_ + m_) + 2000;
        if (needs_factor_) {
            refactor();
            needs_factor_ = false;
        } else if (dirty_) {
            compute_primal();
        }
        dirty_ = false;
        bool refactored = false;
        for (int attempt = 0; attempt < 6; ++attempt) {
            LpStatus st = dual_phase(limit);
            if (st != LpStatus::optimal) {
                status_ = st;
                return st;
            }
            if (!verify_rows()) compute_primal();
            compute_duals();
            if (max_primal_infeasibility() > opt_.feasibility_tol) continue;
            if (fix_dual_infeasibilities()) continue;
            if (has_dual_infeasibility()) {
                st = primal_phase(limit);
                if (st != LpStatus::optimal) {
                    status_ = st;
                    return st;
                }
                compute_primal();
                compute_duals();
                if (max_primal_infeasibility() > opt_.feasibility_tol) continue;
                if (has_dual_infeasibility()) continue;
            }
            if (!verify_rows()) {
                if (!refactored) {
                    refactored = true;
                    refactor();
                    continue;
                }
                message_ = "row residual check failed after refactorization";
                status_ = LpStatus::numerical_failure;
                return status_;
            }
            status_ = LpStatus::optimal;
            return status_;
        }
        message_ = "could not reach a primal and dual feasible basis";
        status_ = LpStatus::numerical_failure;
        return status_;
    }

    LpStatus status() const { return status_; }
    long iterations() const { return iterations_; }
    const std::string& message() const { return message_; }

    /// Structural values clamped into their bounds.
    std::vector<double> primal() const {
        std::vector<double> x(n_);
        for (int j = 0; j < n_; ++j) x[j] = std::clamp(x_[j], lo_[j], up_[j]);
        return x;
    }

    /// Objective in the caller's (maximization) sense.
    double objective() const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += lp_->objective[j] * std::clamp(x_[j], lo_[j], up_[j]);
        return s;
    }

    LpSolution solution() const {
        LpSolution sol;
        sol.status = status_;
        sol.iterations = iterations_;
        sol.message = message_;
        if (status_ == LpStatus::optimal) {
            sol.x = primal();
            sol.objective = lp_->objective_value(sol.x);
            sol.row_activity.resize(m_);
            for (int i = 0; i < m_; ++i) sol.row_activity[i] = lp_->activity(i, sol.x);
        }
        return sol;
    }

private:
    enum class State : std::uint8_t { basic, at_lower, at_upper };

    std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * m_ + c; }

    void build_columns() {
        col_start_.assign(n_ + 1, 0);
        for (int e : lp_->row_index) ++col_start_[e + 1];
        for (int j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
        col_row_.resize(lp_->row_index.size());
        col_val_.resize(lp_->row_index.size());
        std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
        for (int i = 0; i < m_; ++i) {
            for (int e = lp_->row_start[i]; e < lp_->row_start[i + 1]; ++e) {
                const int j = lp_->row_index[e];
                col_row_[fill[j]] = i;
                col_val_[fill[j]] = lp_->row_value[e];
                ++fill[j];
            }
        }
    }

    bool is_fixed(int k) const { return up_[k] - lo_[k] <= 0.0; }

    void place_nonbasic(int k) {
        const bool lo_ok = std::isfinite(lo_[k]);
        const bool up_ok = std::isfinite(up_[k]);
        if (lo_ok && up_ok)
            state_[k] = d_[k] >= 0.0 ? State::at_lower : State::at_upper;
        else if (lo_ok)
            state_[k] = State::at_lower;
        else
            state_[k] = State::at_upper;
        x_[k] = state_[k] == State::at_lower ? lo_[k] : up_[k];
    }

    // x_B <- -B^{-1} N x_N
    void compute_primal() {
        std::vector<double> v(m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (state_[j] == State::basic || x_[j] == 0.0) continue;
            for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) v[col_row_[e]] += col_val_[e] * x_[j];
        }
        for (int i = 0; i < m_; ++i) {
            const int k = n_ + i;
            if (state_[k] != State::basic) v[i] -= x_[k];
        }
        for (int i = 0; i < m_; ++i) {
            x_[head_[i]] = -detail::dot(&binv_[idx(i, 0)], v.data(), m_);
        }
    }

    void compute_duals() {
        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const double cb = cost_[head_[i]];
            if (cb == 0.0) continue;
            const double* row = &binv_[idx(i, 0)];
            for (int c = 0; c < m_; ++c) y[c] += cb * row[c];
        }
        for (int j = 0; j < n_; ++j) {
            if (state_[j] == State::basic) {
                d_[j] = 0.0;
                continue;
            }
            double s = cost_[j];
            for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) s -= y[col_row_[e]] * col_val_[e];
            d_[j] = s;
        }
        for (int i = 0; i < m_; ++i) {
            const int k = n_ + i;
            d_[k] = state_[k] == State::basic ? 0.0 : cost_[k] + y[i];
        }
    }

    void compute_weights() {
        for (int i = 0; i < m_; ++i) {
            const double* row = &binv_[idx(i, 0)];
            double s = 0.0;
            for (int c = 0; c < m_; ++c) s += row[c] * row[c];
            weight_[i] = std::max(s, 1e-12);
        }
    }

    // Rebuilds B^{-1} from the basis heading. Only the structural block needs
    // elimination; logical columns are -e_i. Singular structural columns are
    // swapped out for logicals of the rows they failed to cover.
    void refactor() {
        for (int repair = 0; repair < m_ + 1; ++repair) {
            std::vector<int> spos;
            std::vector<char> covered(m_, 0);
            for (int i = 0; i < m_; ++i) {
                if (head_[i] < n_)
                    spos.push_back(i);
                else
                    covered[head_[i] - n_] = 1;
            }
            std::vector<int> rrows;
            for (int r = 0; r < m_; ++r)
                if (!covered[r]) rrows.push_back(r);
            const int k = static_cast<int>(spos.size());
            std::vector<int> row_slot(m_, -1);
            for (int a = 0; a < k; ++a) row_slot[rrows[a]] = a;

            // K = B_S restricted to uncovered rows, augmented with identity.
            std::vector<double> K(static_cast<std::size_t>(k) * k, 0.0);
            std::vector<double> Kinv(static_cast<std::size_t>(k) * k, 0.0);
            for (int s = 0; s < k; ++s) {
                const int j = head_[spos[s]];
                for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
                    const int a = row_slot[col_row_[e]];
                    if (a >= 0) K[static_cast<std::size_t>(a) * k + s] = col_val_[e];
                }
            }
            for (int a = 0; a < k; ++a) Kinv[static_cast<std::size_t>(a) * k + a] = 1.0;

            std::vector<int> pivot_row_of_col(k, -1);
            std::vector<char> row_used(k, 0);
            std::vector<int> dependent;
            for (int s = 0; s < k; ++s) {
                int best = -1;
                double best_abs = 1e-10;
                for (int a = 0; a < k; ++a) {
                    if (row_used[a]) continue;
                    const double v = std::abs(K[static_cast<std::size_t>(a) * k + s]);
                    if (v > best_abs) {
                        best_abs = v;
                        best = a;
                    }
                }
                if (best < 0) {
                    dependent.push_back(s);
                    continue;
                }
                row_used[best] = 1;
                pivot_row_of_col[s] = best;
                double* prow = &K[static_cast<std::size_t>(best) * k];
                double* pinv = &Kinv[static_cast<std::size_t>(best) * k];
                const double inv = 1.0 / prow[s];
                for (int c = 0; c < k; ++c) {
                    prow[c] *= inv;
                    pinv[c] *= inv;
                }
                for (int a = 0; a < k; ++a) {
                    if (a == best) continue;
                    double* arow = &K[static_cast<std::size_t>(a) * k];
                    const double f = arow[s];
                    if (f == 0.0) continue;
                    double* ainv = &Kinv[static_cast<std::size_t>(a) * k];
                    for (int c = 0; c < k; ++c) {
                        arow[c] -= f * prow[c];
                        ainv[c] -= f * pinv[c];
                    }
                }
            }
            if (!dependent.empty()) {
                std::vector<int> free_rows;
                for (int a = 0; a < k; ++a)
                    if (!row_used[a]) free_rows.push_back(rrows[a]);
                for (std::size_t q = 0; q < dependent.size(); ++q) {
                    const int pos = spos[dependent[q]];
                    const int out = head_[pos];
                    const int in = n_ + free_rows[q];
                    head_[pos] = in;
                    state_[in] = State::basic;
                    place_nonbasic(out);
                }
                ++repairs_;
                continue;
            }

            // Row of B^{-1} for structural position spos[s] lives in Kinv row
            // pivot_row_of_col[s], scattered onto the uncovered rows.
            std::fill(binv_.begin(), binv_.end(), 0.0);
            for (int s = 0; s < k; ++s) {
                const double* src = &Kinv[static_cast<std::size_t>(pivot_row_of_col[s]) * k];
                double* dst = &binv_[idx(spos[s], 0)];
                for (int a = 0; a < k; ++a) dst[rrows[a]] = src[a];
            }
            std::vector<int> struct_pos_of_col(n_, -1);
            for (int s = 0; s < k; ++s) struct_pos_of_col[head_[spos[s]]] = spos[s];
            for (int i = 0; i < m_; ++i) {
                if (head_[i] < n_) continue;
                const int r = head_[i] - n_;
                double* dst = &binv_[idx(i, 0)];
                for (int e = lp_->row_start[r]; e < lp_->row_start[r + 1]; ++e) {
                    const int p = struct_pos_of_col[lp_->row_index[e]];
                    if (p < 0) continue;
                    const double a = lp_->row_value[e];
                    const double* src = &binv_[idx(p, 0)];
                    for (int c = 0; c < m_; ++c) dst[c] += a * src[c];
                }
                dst[r] -= 1.0;
            }
            break;
        }
        since_refactor_ = 0;
        compute_primal();
        compute_duals();
        compute_weights();
    }

    double infeasibility(int k) const {
        if (x_[k] < lo_[k] - opt_.feasibility_tol) return lo_[k] - x_[k];
        if (x_[k] > up_[k] + opt_.feasibility_tol) return x_[k] - up_[k];
        return 0.0;
    }

    double max_primal_infeasibility() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) worst = std::max(worst, infeasibility(head_[i]));
        return worst;
    }

    bool dual_infeasible(int k) const {
        if (state_[k] == State::basic || is_fixed(k)) return false;
        if (state_[k] == State::at_lower) return d_[k] < -opt_.optimality_tol;
        return d_[k] > opt_.optimality_tol;
    }

    bool has_dual_infeasibility() const {
        for (int k = 0; k < n_ + m_; ++k)
            if (dual_infeasible(k)) return true;
        return false;
    }

    // Boxed nonbasics with the wrong reduced-cost sign are flipped to the
    // other bound. Returns true if anything moved (primal must be redone).
    bool fix_dual_infeasibilities() {
        bool moved = false;
        for (int k = 0; k < n_ + m_; ++k) {
            if (!dual_infeasible(k)) continue;
            if (!std::isfinite(lo_[k]) || !std::isfinite(up_[k])) continue;
            state_[k] = state_[k] == State::at_lower ? State::at_upper : State::at_lower;
            x_[k] = state_[k] == State::at_lower ? lo_[k] : up_[k];
            moved = true;
        }
        if (moved) compute_primal();
        return moved;
    }

    bool verify_rows() const {
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int e = lp_->row_start[i]; e < lp_->row_start[i + 1]; ++e)
                s += lp_->row_value[e] * std::clamp(x_[lp_->row_index[e]], lo_[lp_->row_index[e]], up_[lp_->row_index[e]]);
            const double tol = 10.0 * opt_.feasibility_tol * (1.0 + std::abs(s));
            if (s < lo_[n_ + i] - tol || s > up_[n_ + i] + tol) return false;
        }
        return true;
    }

    double current_cost() const {
        double s = 0.0;
        for (int k = 0; k < n_; ++k) s += cost_[k] * x_[k];
        return s;
    }

    // alpha_r = row r of B^{-1} times each nonbasic column.
    void compute_pivot_row(int r, std::vector<double>& alpha) {
        std::fill(alpha.begin(), alpha.end(), 0.0);
        const double* rho = &binv_[idx(r, 0)];
        for (int c = 0; c < m_; ++c) {
            const double rc = rho[c];
            if (rc == 0.0) continue;
            for (int e = lp_->row_start[c]; e < lp_->row_start[c + 1]; ++e)
                alpha[lp_->row_index[e]] += rc * lp_->row_value[e];
            alpha[n_ + c] = -rc;
        }
    }

    /// alpha satisfies sum_j alpha_j v_j = 0 at every point with A x = s, for
    /// any row multiplier. If the bound box keeps that sum away from zero the
    /// LP is infeasible regardless of the accuracy of B^{-1}.
    bool farkas_certified(const std::vector<double>& alpha) const {
        double lo = 0.0, hi = 0.0, mag = 0.0;
        for (int j = 0; j < n_ + m_; ++j) {
            const double a = alpha[j];
            if (a == 0.0) continue;
            const double l = a > 0.0 ? lo_[j] : up_[j];
            const double u = a > 0.0 ? up_[j] : lo_[j];
            if (std::abs(a) <= opt_.pivot_tol && (!std::isfinite(l) || !std::isfinite(u))) continue;
            lo += a * l;
            hi += a * u;
            if (std::isfinite(l)) mag = std::max(mag, std::abs(a * l));
            if (std::isfinite(u)) mag = std::max(mag, std::abs(a * u));
        }
        const double tol = 10.0 * opt_.feasibility_tol * (1.0 + mag);
        return lo > tol || hi < -tol;
    }

    void compute_column(int q, std::vector<double>& col) const {
        if (q < n_) {
            std::fill(col.begin(), col.end(), 0.0);
            for (int e = col_start_[q]; e < col_start_[q + 1]; ++e) {
                const int rr = col_row_[e];
                const double v = col_val_[e];
                for (int i = 0; i < m_; ++i) col[i] += binv_[idx(i, rr)] * v;
            }
        } else {
            const int rr = q - n_;
            for (int i = 0; i < m_; ++i) col[i] = -binv_[idx(i, rr)];
        }
    }

    // Replaces basic position r by variable q with pivot column col.
    void pivot_update(int r, int q, const std::vector<double>& col) {
        const double piv = col[r];
        double* prow = &binv_[idx(r, 0)];
        const double inv = 1.0 / piv;
        double nr = 0.0;
        for (int c = 0; c < m_; ++c) {
            prow[c] *= inv;
            nr += prow[c] * prow[c];
        }
        weight_[r] = std::max(nr, 1e-12);
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = col[i];
            if (f == 0.0) continue;
            double* row = &binv_[idx(i, 0)];
            for (int c = 0; c < m_; ++c) row[c] -= f * prow[c];
            weight_[i] = std::max(detail::dot(row, row, m_), 1e-12);
        }
        head_[r] = q;
        state_[q] = State::basic;
        ++since_refactor_;
    }

    LpStatus dual_phase(long limit) {
        alpha_.resize(n_ + m_);
        col_.resize(m_);
        auto& alpha = alpha_;
        auto& col = col_;
        bool bland = false;
        int stall = 0;
        bool retried = false;
        while (true) {
            if (iterations_ >= limit) {
                message_ = "dual simplex iteration limit";
                return LpStatus::iteration_limit;
            }
            if (since_refactor_ >= opt_.refactor_interval) refactor();

            // leaving row
            int r = -1;
            double best = 0.0;
            for (int i = 0; i < m_; ++i) {
                const int k = head_[i];
                const double inf = infeasibility(k);
                if (inf <= 0.0) continue;
                if (bland) {
                    if (r < 0 || k < head_[r]) r = i;
                } else {
                    const double score = inf * inf / weight_[i];
                    if (score > best) {
                        best = score;
                        r = i;
                    }
                }
            }
            if (r < 0) return LpStatus::optimal;

            const int leave = head_[r];
            const bool need_up = x_[leave] < lo_[leave];
            const double target = need_up ? lo_[leave] : up_[leave];
            const double dir = need_up ? 1.0 : -1.0;
            compute_pivot_row(r, alpha);

            // Harris two-pass ratio test over nonbasic candidates.
            int q = -1;
            const int total = n_ + m_;
            auto slack = [&](int j) {
                return state_[j] == State::at_lower ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
            };
            cand_.clear();
            for (int j = 0; j < total; ++j) {
                const double a = dir * alpha[j];
                if (a == 0.0 || state_[j] == State::basic) continue;
                if (state_[j] == State::at_lower ? a >= -opt_.pivot_tol : a <= opt_.pivot_tol) continue;
                if (!is_fixed(j)) cand_.push_back(j);
            }
            if (!bland) {
                double tmax = kInf;
                for (int j : cand_) tmax = std::min(tmax, (slack(j) + opt_.optimality_tol) / std::abs(alpha[j]));
                double best_a = 0.0;
                for (int j : cand_) {
                    const double a = std::abs(alpha[j]);
                    if (slack(j) / a <= tmax && a > best_a) {
                        best_a = a;
                        q = j;
                    }
                }
            } else {
                double tmin = kInf;
                for (int j : cand_) {
                    const double t = slack(j) / std::abs(alpha[j]);
                    if (t < tmin - 1e-12) {
                        tmin = t;
                        q = j;
                    }
                }
            }
            if (q < 0) {
                if (!retried && !farkas_certified(alpha)) {
                    retried = true;
                    refactor();
                    continue;
                }
                message_ = "dual ray: rows cannot be satisfied within bounds";
                return LpStatus::infeasible;
            }
            retried = false;

            compute_column(q, col);
            if (std::abs(col[r] - alpha[q]) > 1e-7 * (1.0 + std::abs(alpha[q]))) {
                if (since_refactor_ > 0) {
                    refactor();
                    continue;
                }
            }
            if (std::abs(col[r]) < opt_.pivot_tol) {
                if (since_refactor_ > 0) {
                    refactor();
                    continue;
                }
                message_ = "pivot element vanished after refactorization";
                return LpStatus::numerical_failure;
            }

            const double apiv = col[r];
            const double theta_p = (x_[leave] - target) / apiv;
            x_[q] += theta_p;
            for (int i = 0; i < m_; ++i)
                if (col[i] != 0.0) x_[head_[i]] -= theta_p * col[i];
            x_[leave] = target;

            const double theta_d = d_[q] / alpha[q];
            for (int j = 0; j < total; ++j) {
                if (state_[j] == State::basic || alpha[j] == 0.0) continue;
                d_[j] -= theta_d * alpha[j];
            }
            d_[q] = 0.0;
            d_[leave] = -theta_d;

            pivot_update(r, q, col);
            state_[leave] = need_up ? State::at_lower : State::at_upper;
            ++iterations_;

            if (std::abs(theta_d) > 1e-12) {
                stall = 0;
                bland = false;
            } else if (++stall > opt_.stall_threshold) {
                bland = true;
            }
        }
    }

    // Phase-2 primal simplex from a primal feasible basis; used to clean up
    // residual dual infeasibilities on one-sided logicals.
    LpStatus primal_phase(long limit) {
        std::vector<double> alpha(n_ + m_);
        std::vector<double> col(m_);
        bool bland = false;
        int stall = 0;
        double last_cost = current_cost();
        const double ftol = opt_.feasibility_tol;
        while (true) {
            if (iterations_ >= limit) {
                message_ = "primal simplex iteration limit";
                return LpStatus::iteration_limit;
            }
            if (since_refactor_ >= opt_.refactor_interval) refactor();
            int q = -1;
            double best = 0.0;
            for (int k = 0; k < n_ + m_; ++k) {
                if (!dual_infeasible(k)) continue;
                if (bland) {
                    q = k;
                    break;
                }
                if (std::abs(d_[k]) > best) {
                    best = std::abs(d_[k]);
                    q = k;
                }
            }
            if (q < 0) return LpStatus::optimal;
            const double sigma = state_[q] == State::at_lower ? 1.0 : -1.0;
            compute_column(q, col);

            // basic i moves by -sigma * col[i] per unit step
            double tmax = up_[q] - lo_[q];
            for (int i = 0; i < m_; ++i) {
                const double rate = -sigma * col[i];
                const int k = head_[i];
                if (rate < -opt_.pivot_tol && std::isfinite(lo_[k]))
                    tmax = std::min(tmax, (x_[k] - lo_[k] + ftol) / -rate);
                else if (rate > opt_.pivot_tol && std::isfinite(up_[k]))
                    tmax = std::min(tmax, (up_[k] - x_[k] + ftol) / rate);
            }
            int r = -1;
            double best_a = 0.0;
            double step = up_[q] - lo_[q];
            bool bound_flip = std::isfinite(step) && step <= tmax;
            if (!bound_flip) {
                for (int i = 0; i < m_; ++i) {
                    const double rate = -sigma * col[i];
                    const int k = head_[i];
                    double t = kInf;
                    if (rate < -opt_.pivot_tol && std::isfinite(lo_[k]))
                        t = std::max(0.0, (x_[k] - lo_[k]) / -rate);
                    else if (rate > opt_.pivot_tol && std::isfinite(up_[k]))
                        t = std::max(0.0, (up_[k] - x_[k]) / rate);
                    else
                        continue;
                    if (t <= tmax && std::abs(col[i]) > best_a) {
                        best_a = std::abs(col[i]);
                        r = i;
                        step = t;
                    }
                }
                if (r < 0) {
                    message_ = "primal ray on a bounded problem";
                    return LpStatus::numerical_failure;
                }
            }
            x_[q] += sigma * step;
            for (int i = 0; i < m_; ++i)
                if (col[i] != 0.0) x_[head_[i]] -= sigma * step * col[i];
            if (bound_flip) {
                state_[q] = state_[q] == State::at_lower ? State::at_upper : State::at_lower;
                x_[q] = state_[q] == State::at_lower ? lo_[q] : up_[q];
                ++iterations_;
                continue;
            }
            const int leave = head_[r];
            const double rate = -sigma * col[r];
            const bool to_lower = rate < 0.0;
            compute_pivot_row(r, alpha);
            const double theta_d = d_[q] / alpha[q];
            for (int j = 0; j < n_ + m_; ++j) {
                if (state_[j] == State::basic || alpha[j] == 0.0) continue;
                d_[j] -= theta_d * alpha[j];
            }
            d_[q] = 0.0;
            d_[leave] = -theta_d;
            pivot_update(r, q, col);
            state_[leave] = to_lower ? State::at_lower : State::at_upper;
            x_[leave] = to_lower ? lo_[leave] : up_[leave];
            ++iterations_;
            const double c = current_cost();
            if (c < last_cost - 1e-12 * (1.0 + std::abs(last_cost))) {
                last_cost = c;
                stall = 0;
                bland = false;
            } else if (++stall > opt_.stall_threshold) {
                bland = true;
            }
        }
    }

    const LinearProgram* lp_;
    LpOptions opt_;
    int n_ = 0;
    int m_ = 0;
    std::vector<int> col_start_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> cost_, lo_, up_, x_, d_;
    std::vector<State> state_;
    std::vector<int> head_;
    std::vector<double> binv_;
    std::vector<double> weight_;
    int since_refactor_ = 0;
    std::vector<double> scratch_, alpha_, col_;
    std::vector<int> cand_;
    int repairs_ = 0;
    long iterations_ = 0;
    bool dirty_ = true;
    bool needs_factor_ = true;
    LpStatus status_ = LpStatus::numerical_failure;
    std::string message_;
};

/// One-shot LP solve from the all-logical basis.
inline LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {}) {
    SimplexEngine engine(lp, opts);
    engine.solve();
    return engine.solution();
}

} // namespace mgsched
