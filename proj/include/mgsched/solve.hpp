#pragma once

// Month-level solving: exact branch-and-bound on a whole instance, the
// exhaustive oracle, and the windowed heuristic for full-size months.

#include <algorithm>
#include <string>
#include <vector>

#include "mgsched/mip.hpp"
#include "mgsched/model.hpp"

namespace mgsched {

struct MonthSolveResult {
    MipStatus status = MipStatus::infeasible;
    ScheduleSolution solution;
    ValidationReport validation;
    std::vector<int> infeasible_smgs; // 1-based, hard EDR diagnosis
    double bound = kInf;              // upper bound on the objective when known
    long nodes = 0;
    int windows = 1;
    bool heuristic = false;
    std::string message;

    bool has_solution() const { return status == MipStatus::optimal || status == MipStatus::node_limit; }
};

inline void check_exact_size(const MonthlyInstance& inst, const SolverOptions& opt) {
    if (inst.lp.num_rows() > opt.max_exact_rows)
        throw SolverError("instance has " + std::to_string(inst.lp.num_rows()) + " rows; exact mode handles at most " +
                          std::to_string(opt.max_exact_rows) + " (use chunked mode for full months)");
}

inline MonthSolveResult finish_month(const MonthlyInstance& inst, const MipResult& mr, double tol) {
    MonthSolveResult out;
    out.status = mr.status;
    out.bound = mr.bound;
    out.nodes = mr.nodes;
    out.message = mr.message;
    if (mr.has_incumbent) {
        out.solution = extract_solution(inst, mr.x);
        out.solution.status = to_string(mr.status);
        out.validation = validate_solution(inst, out.solution, tol);
        if (mr.status == MipStatus::numerical_failure) out.status = MipStatus::node_limit;
    } else {
        if (mr.status == MipStatus::numerical_failure) out.status = MipStatus::numerical_failure;
        out.solution.month = inst.inputs.month;
        out.solution.n_smg = inst.n();
        out.solution.initial_soc = inst.initial_soc;
        out.solution.status = to_string(out.status);
        if (mr.status == MipStatus::infeasible && inst.has_risk && inst.scenario.edr_mode == EdrMode::hard)
            out.infeasible_smgs = diagnose_edr_infeasibility(inst);
    }
    return out;
}

inline MonthSolveResult solve_mip(const MonthlyInstance& inst, const SolverOptions& opt = {}) {
    check_exact_size(inst, opt);
    return finish_month(inst, solve_mip(inst.mip(), opt), 1e-6);
}

inline MonthSolveResult brute_force_mip(const MonthlyInstance& inst, const SolverOptions& opt = {}) {
    return finish_month(inst, brute_force_mip(inst.mip(), opt), 1e-6);
}

/// Solves consecutive windows of `chunk_hours` with the battery state carried
/// across, then settles risk from the stitched monthly profits. The result is
/// feasible for the month but carries no optimality guarantee.
inline MonthSolveResult solve_month_chunked(const SystemSpec& spec, const ScenarioConfig& scenario,
                                            const MonthInputs& inputs, const SmgValues& initial_soc,
                                            const SolverOptions& opt = {}) {
    opt.validate();
    const int T = inputs.hours();
    if (opt.chunk_hours >= T) {
        auto whole = build_instance(spec, scenario, inputs, initial_soc);
        return solve_mip(whole, opt);
    }
    MonthSolveResult out;
    out.heuristic = true;
    out.windows = 0;
    ScheduleSolution stitched;
    stitched.month = inputs.month;
    stitched.n_smg = spec.n_smg;
    stitched.initial_soc = initial_soc;
    stitched.heuristic = true;
    SmgValues soc = initial_soc;
    double objective = 0.0;
    bool exhausted = false;
    SolverOptions wopt = opt;
    wopt.node_limit = opt.window_node_limit;
    for (int t0 = 0; t0 < T; t0 += opt.chunk_hours) {
        const int len = std::min(opt.chunk_hours, T - t0);
        ScenarioConfig wsc = scenario;
        if (t0 + len < T) wsc.terminal_soc_rule = TerminalSocRule::free;
        MonthlyInstance w = build_instance(spec, wsc, inputs.slice(t0, len), soc, {.include_risk = false});
        w.scenario.terminal_soc_rule = wsc.terminal_soc_rule;
        check_exact_size(w, wopt);
        MipResult mr = solve_mip(w.mip(), wopt);
        ++out.windows;
        out.nodes += mr.nodes;
        if (!mr.has_incumbent) {
            out.status = mr.status == MipStatus::numerical_failure ? MipStatus::numerical_failure : MipStatus::infeasible;
            out.message = "window starting at hour " + std::to_string(t0 + 1) + " has no feasible schedule";
            stitched.status = to_string(out.status);
            out.solution = stitched;
            return out;
        }
        if (mr.status != MipStatus::optimal) exhausted = true;
        ScheduleSolution part = extract_solution(w, mr.x);
        objective += part.objective;
        stitched.append(part);
        soc = part.final_soc();
    }
    auto pb = profit_accounting(stitched, inputs);
    stitched.profit = pb.smg;
    stitched.objective = objective;
    settle_risk(stitched, spec);
    out.status = MipStatus::node_limit;
    stitched.status = "heuristic";
    out.message = exhausted ? "windows hit the node limit" : "all windows solved to optimality";

    MonthlyInstance whole = build_instance(spec, scenario, inputs, initial_soc);
    if (scenario.edr_mode == EdrMode::hard)
        for (int z = 0; z < spec.n_smg; ++z)
            if (stitched.risk[z] > spec.edr_cap + 1e-6) out.infeasible_smgs.push_back(z + 1);
    if (!out.infeasible_smgs.empty()) {
        out.status = MipStatus::infeasible;
        stitched.status = "edr_violated";
        out.message = "stitched schedule exceeds the EDR cap";
    }
    out.validation = validate_solution(whole, stitched, 1e-6);
    out.solution = std::move(stitched);
    return out;
}

} // namespace mgsched
