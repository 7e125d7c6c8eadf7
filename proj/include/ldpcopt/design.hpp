#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conic_solver.hpp"
#include "degree_distribution.hpp"
#include "density_evolution.hpp"
#include "errors.hpp"
#include "sos.hpp"

namespace ldpcopt {

struct SolverStats {
    SolveStatus status = SolveStatus::numerical_failure;
    int iterations = 0;
    SolverResiduals residuals;
};

struct DesignOptions {
    SolverOptions solver{};
    int grid_size = de_defaults::grid_size;
    double validation_tol = de_defaults::validation_tol;
};

struct DesignResult {
    DegreeDistribution distribution; // the optimized side
    DegreeDistribution fixed_side;
    double channel_param = 0.0; // erasure rate or crossover
    double design_rate = 0.0;
    double objective = 0.0;     // sum lambda_i/i (or rho_j/j)
    GramMatrix certificate;     // empty (dim 0) for the grid-LP baseline
    FeasibilityReport validation;
    SolverStats solver_stats;
};

namespace flags {
inline constexpr const char* non_positive_rate = "NonPositiveRate";
inline constexpr const char* rs1_at_entropy_floor = "Rs1AtEntropyFloor";
inline constexpr const char* rs1_at_unity = "Rs1AtUnity";
} // namespace flags

struct JointDesignSpec {
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    double correlation_p = 0.0; // Pr(U1 = U2), in (0.5, 1]
    DegreeDistribution rho1;
    DegreeDistribution rho2;
    DegreeDistribution lambda2;
    std::optional<DegreeDistribution> lambda1_fixed; // optimize when absent
    int max_vdeg1 = 0;                               // used when optimizing
    double Rs2 = 1.0;
};

struct JointDesignResult {
    double Rs1 = 0.0;
    double Rc1 = 0.0;
    double Rc2 = 0.0;
    DegreeDistribution lambda1;
    double cap_individual = 0.0;
    double cap_sum_residual = 0.0;
    double objective_R1_plus_R2 = 0.0;
    double sw_lower = 0.0;
    std::vector<std::string> flags;
    std::string notes;
    FeasibilityReport validation; // sender-1 decodability, grid oracle
    int d_v1 = 0;
};

namespace detail {

inline void require_distribution_kind(const DegreeDistribution& d, NodeKind k,
                                      const char* name) {
    if (d.kind() != k)
        throw ParamOutOfRange(std::string(name) + " has the wrong side kind");
}

// Clip solver round-off, drop negligible weights, renormalize exactly.
inline DegreeDistribution recover_distribution(NodeKind kind,
                                               const std::vector<double>& z,
                                               int max_degree) {
    constexpr double drop_tol = 1e-10;
    std::map<int, double> w;
    double sum = 0.0;
    for (int d = 2; d <= max_degree; ++d) {
        double v = std::max(0.0, z[static_cast<std::size_t>(d - 2)]);
        if (v > drop_tol) {
            w[d] = v;
            sum += v;
        }
    }
    if (w.empty() || sum <= 0.0)
        throw SolverFailure("optimizer returned an empty degree distribution");
    for (auto& [d, v] : w) v /= sum;
    return DegreeDistribution(kind, w);
}

inline SolverStats stats_of(const SolverSolution& sol) {
    return {sol.status, sol.iterations, sol.residuals};
}

[[noreturn]] inline void throw_solver(const SolverSolution& sol,
                                      const char* what) {
    std::string msg = std::string(what) + ": solver status " +
                      to_string(sol.status);
    if (!sol.message.empty()) msg += " (" + sol.message + ")";
    throw SolverFailure(msg);
}

} // namespace detail

// Maximize sum_d lambda_d / d over the simplex, subject to the certified
// erasure-channel decoding condition x - eps*lambda(1 - rho(1 - x)) >= 0.
inline DesignResult optimize_lambda_bec(const DegreeDistribution& rho,
                                        double epsilon, int D_v,
                                        const DesignOptions& opts = {}) {
    if (D_v < 2) throw ParamOutOfRange("max variable degree must be at least 2");
    detail::require_distribution_kind(rho, NodeKind::check, "rho");
    detail::require_epsilon(epsilon);

    FreeSide side{D_v};
    auto frag = build_sos_feasibility(
        lift_to_real_line(build_de_poly_bec(side, rho, epsilon), 1.0));
    AffineExpr objective;
    LinearConstraint normalization;
    for (int d = 2; d <= D_v; ++d) {
        objective.gradient[d - 2] = 1.0 / d;
        normalization.coeffs[d - 2] = 1.0;
    }
    normalization.rhs = 1.0;
    auto ap = assemble_program(objective, true, free_side_num_vars(side), {frag},
                               {normalization});
    auto sol = solve(ap.prog, opts.solver);
    if (sol.status == SolveStatus::primal_infeasible)
        throw Infeasible(
            "no variable-side distribution with these degrees decodes at this "
            "erasure rate");
    if (sol.status != SolveStatus::optimal)
        detail::throw_solver(sol, "variable-side design");

    DegreeDistribution lambda =
        detail::recover_distribution(NodeKind::variable, sol.primal, D_v);
    auto report = check_feasibility_grid_fn(
        [&](double x) { return eval_de_bec(lambda, rho, epsilon, x); }, 1.0,
        opts.grid_size, opts.validation_tol);
    if (!report.feasible)
        throw SolverFailure(
            "designed distribution failed the independent grid validation");
    return DesignResult{lambda,
                        rho,
                        epsilon,
                        design_rate(lambda, rho),
                        lambda.sum_inv_degree(),
                        extract_gram(ap, sol.primal, 0),
                        report,
                        detail::stats_of(sol)};
}

// Baseline oracle: the same objective with the decoding constraint enforced
// only at grid points x_k = k/(N-1). Solved through the LP dual so the
// factorized system stays (D_v - 1)-dimensional; the distribution is read off
// the equality-row multipliers, and an unbounded dual certifies that the
// grid-constrained primal is infeasible.
inline DesignResult optimize_lambda_grid_lp(const DegreeDistribution& rho,
                                            double epsilon, int D_v,
                                            int grid_size,
                                            const DesignOptions& opts = {}) {
    if (D_v < 2) throw ParamOutOfRange("max variable degree must be at least 2");
    if (grid_size < 100) throw ParamOutOfRange("grid size must be at least 100");
    detail::require_distribution_kind(rho, NodeKind::check, "rho");
    detail::require_epsilon(epsilon);

    const int K = D_v - 1;
    const int npts = grid_size - 1; // k = 1 .. grid_size-1 (x = 0 is vacuous)
    const int nvars = npts + 2 + K; // u, v+, v-, surplus
    ConicProgram prog;
    prog.cones = {{ConeBlock::Type::nonneg, nvars}};
    prog.c.assign(nvars, 0.0);
    prog.b.assign(K, 0.0);
    for (int d = 2; d <= D_v; ++d) prog.b[d - 2] = 1.0 / d;
    prog.c[npts] = 1.0;
    prog.c[npts + 1] = -1.0;
    for (int r = 0; r < K; ++r) {
        prog.A.push_back({r, npts, 1.0});
        prog.A.push_back({r, npts + 1, -1.0});
        prog.A.push_back({r, npts + 2 + r, -1.0});
    }
    for (int k = 1; k < grid_size; ++k) {
        double x = static_cast<double>(k) / (grid_size - 1);
        double y = 1.0 - rho.eval(1.0 - x);
        prog.c[k - 1] = x;
        double g = epsilon * y;
        for (int d = 2; d <= D_v; ++d) {
            if (std::abs(g) >= 1e-300)
                prog.A.push_back({d - 2, k - 1, g});
            g *= y;
        }
    }

    auto sol = solve(prog, opts.solver);
    if (sol.status == SolveStatus::unbounded)
        throw Infeasible(
            "grid-sampled decoding constraints admit no distribution");
    if (sol.status != SolveStatus::optimal)
        detail::throw_solver(sol, "grid-LP design");

    DegreeDistribution lambda =
        detail::recover_distribution(NodeKind::variable, sol.dual_y, D_v);
    auto report = check_feasibility_grid_fn(
        [&](double x) { return eval_de_bec(lambda, rho, epsilon, x); }, 1.0,
        grid_size, opts.validation_tol);
    if (!report.feasible)
        throw SolverFailure(
            "grid-LP distribution failed validation on its own grid");
    return DesignResult{lambda,
                        rho,
                        epsilon,
                        design_rate(lambda, rho),
                        lambda.sum_inv_degree(),
                        GramMatrix{},
                        report,
                        detail::stats_of(sol)};
}

// Minimize sum_j rho_j / j subject to the check-side condition
// rho(1 - eps*lambda(x)) >= 1 - x on [0,1].
inline DesignResult optimize_rho_bec(const DegreeDistribution& lambda,
                                     double epsilon, int D_c,
                                     const DesignOptions& opts = {}) {
    if (D_c < 2) throw ParamOutOfRange("max check degree must be at least 2");
    detail::require_distribution_kind(lambda, NodeKind::variable, "lambda");
    detail::require_epsilon(epsilon);

    FreeSide side{D_c};
    auto frag = build_sos_feasibility(
        lift_to_real_line(build_de_poly_bec_dual(lambda, side, epsilon), 1.0));
    AffineExpr objective;
    LinearConstraint normalization;
    for (int j = 2; j <= D_c; ++j) {
        objective.gradient[j - 2] = 1.0 / j;
        normalization.coeffs[j - 2] = 1.0;
    }
    normalization.rhs = 1.0;
    auto ap = assemble_program(objective, false, free_side_num_vars(side), {frag},
                               {normalization});
    auto sol = solve(ap.prog, opts.solver);
    if (sol.status == SolveStatus::primal_infeasible)
        throw Infeasible(
            "no check-side distribution with these degrees satisfies the "
            "decoding condition");
    if (sol.status != SolveStatus::optimal)
        detail::throw_solver(sol, "check-side design");

    DegreeDistribution rho =
        detail::recover_distribution(NodeKind::check, sol.primal, D_c);
    auto report = check_feasibility_grid_fn(
        [&](double x) { return eval_de_bec_dual(lambda, rho, epsilon, x); }, 1.0,
        opts.grid_size, opts.validation_tol);
    if (!report.feasible)
        throw SolverFailure(
            "designed distribution failed the independent grid validation");
    return DesignResult{rho,
                        lambda,
                        epsilon,
                        design_rate(lambda, rho),
                        rho.sum_inv_degree(),
                        extract_gram(ap, sol.primal, 0),
                        report,
                        detail::stats_of(sol)};
}

// Maximize sum_d lambda_d / d with the binary-symmetric-channel condition
// certified on [0, p] (lift parameter a = p).
inline DesignResult optimize_lambda_bsc(const DegreeDistribution& rho,
                                        double p_crossover, int D_v,
                                        const DesignOptions& opts = {}) {
    if (D_v < 2) throw ParamOutOfRange("max variable degree must be at least 2");
    detail::require_distribution_kind(rho, NodeKind::check, "rho");
    detail::require_crossover(p_crossover);

    FreeSide side{D_v};
    auto frag = build_sos_feasibility(lift_to_real_line(
        build_de_poly_bsc(side, rho, p_crossover), p_crossover));
    AffineExpr objective;
    LinearConstraint normalization;
    for (int d = 2; d <= D_v; ++d) {
        objective.gradient[d - 2] = 1.0 / d;
        normalization.coeffs[d - 2] = 1.0;
    }
    normalization.rhs = 1.0;
    auto ap = assemble_program(objective, true, free_side_num_vars(side), {frag},
                               {normalization});
    auto sol = solve(ap.prog, opts.solver);
    if (sol.status == SolveStatus::primal_infeasible)
        throw Infeasible(
            "no variable-side distribution with these degrees decodes at this "
            "crossover");
    if (sol.status != SolveStatus::optimal)
        detail::throw_solver(sol, "variable-side design (crossover channel)");

    DegreeDistribution lambda =
        detail::recover_distribution(NodeKind::variable, sol.primal, D_v);
    auto report = check_feasibility_grid_fn(
        [&](double x) { return eval_de_bsc(lambda, rho, p_crossover, x); },
        p_crossover, opts.grid_size, opts.validation_tol);
    if (!report.feasible)
        throw SolverFailure(
            "designed distribution failed the independent grid validation");
    return DesignResult{lambda,
                        rho,
                        p_crossover,
                        design_rate(lambda, rho),
                        lambda.sum_inv_degree(),
                        extract_gram(ap, sol.primal, 0),
                        report,
                        detail::stats_of(sol)};
}

inline double binary_entropy(double u) {
    if (!(u >= 0.0 && u <= 1.0))
        throw ParamOutOfRange("entropy argument must lie in [0,1]");
    if (u == 0.0 || u == 1.0) return 0.0;
    return -u * std::log2(u) - (1.0 - u) * std::log2(1.0 - u);
}

struct SlepianWolfBounds {
    double lower = 0.0;
    double upper = 1.0;
};

// Correlated uniform pair U2 = U1 xor Z with Pr(Z = 0) = correlation_p:
// conditional entropy h(p), joint entropy 1 + h(p).
inline SlepianWolfBounds slepian_wolf_bounds(double correlation_p, double Rs2) {
    if (!(correlation_p > 0.5 && correlation_p <= 1.0))
        throw ParamOutOfRange("correlation must lie in (0.5, 1]");
    if (!(Rs2 >= 0.0 && Rs2 <= 1.0))
        throw ParamOutOfRange("Rs2 must lie in [0, 1]");
    double h = binary_entropy(correlation_p);
    // max(h, 1 + h - Rs2) without the round trip through 1 + h
    double lower = (Rs2 >= 1.0) ? h : (1.0 - Rs2) + h;
    return {lower, 1.0};
}

struct MacCaps {
    double cap_individual = 0.0;
    double cap_sum_residual = 0.0;
};

// Orthogonal erasure links of capacities 1 - eps1 and 1 - eps2; this is the
// single seam where a different multiple-access model would plug in.
inline MacCaps mac_caps(double epsilon1, double epsilon2, double Rc2) {
    if (!(epsilon1 > 0.0 && epsilon1 < 1.0) ||
        !(epsilon2 > 0.0 && epsilon2 < 1.0))
        throw ParamOutOfRange("erasure probabilities must lie in (0,1)");
    return {1.0 - epsilon1, (1.0 - epsilon1) + (1.0 - epsilon2) - Rc2};
}

inline JointDesignResult design_joint_mac(const JointDesignSpec& spec,
                                          const DesignOptions& opts = {}) {
    detail::require_epsilon(spec.epsilon1);
    detail::require_epsilon(spec.epsilon2);
    if (!(spec.correlation_p > 0.5 && spec.correlation_p <= 1.0))
        throw ParamOutOfRange("correlation must lie in (0.5, 1]");
    if (!(spec.Rs2 >= 0.0 && spec.Rs2 <= 1.0))
        throw ParamOutOfRange("Rs2 must lie in [0, 1]");
    detail::require_distribution_kind(spec.rho1, NodeKind::check, "rho1");
    detail::require_distribution_kind(spec.rho2, NodeKind::check, "rho2");
    detail::require_distribution_kind(spec.lambda2, NodeKind::variable,
                                      "lambda2");
    if (spec.lambda1_fixed)
        detail::require_distribution_kind(*spec.lambda1_fixed,
                                          NodeKind::variable, "lambda1");
    else if (spec.max_vdeg1 < 2)
        throw ParamOutOfRange("max variable degree must be at least 2");

    std::vector<std::string> result_flags;
    auto add_flag = [&](const char* f) {
        if (std::find(result_flags.begin(), result_flags.end(), f) ==
            result_flags.end())
            result_flags.emplace_back(f);
    };

    double Rc2 = design_rate(spec.lambda2, spec.rho2);
    if (Rc2 <= 0.0) add_flag(flags::non_positive_rate);

    MacCaps caps = mac_caps(spec.epsilon1, spec.epsilon2, Rc2);
    double cap = std::min(caps.cap_individual, caps.cap_sum_residual);
    if (cap <= 0.0)
        throw CapNonpositive(
            "the capacity region leaves no rate for sender 1 at these "
            "parameters");

    std::optional<DegreeDistribution> lambda1;
    double Rc1 = 0.0;
    if (spec.lambda1_fixed) {
        lambda1 = *spec.lambda1_fixed;
        auto frag = build_sos_feasibility(lift_to_real_line(
            build_de_poly_bec_dual(*lambda1, spec.rho1, spec.epsilon1), 1.0));
        auto ap = assemble_program(AffineExpr{}, false, 0, {frag}, {});
        auto sol = solve(ap.prog, opts.solver);
        if (sol.status == SolveStatus::primal_infeasible)
            throw DEInfeasible(
                "the fixed sender-1 code is not decodable at epsilon1");
        if (sol.status != SolveStatus::optimal)
            detail::throw_solver(sol, "sender-1 decodability check");
        Rc1 = design_rate(*lambda1, spec.rho1);
    } else {
        auto res =
            optimize_lambda_bec(spec.rho1, spec.epsilon1, spec.max_vdeg1, opts);
        lambda1 = res.distribution;
        Rc1 = res.design_rate;
    }

    double sw_lower =
        slepian_wolf_bounds(spec.correlation_p, spec.Rs2).lower;

    std::string notes =
        "Channel caps model the two senders as orthogonal erasure links "
        "(individual cap 1 - eps1; sum cap (1 - eps1) + (1 - eps2) minus the "
        "second code rate). The sources are a uniform pair U2 = U1 xor Z with "
        "Pr(Z = 0) equal to the correlation, so the compression floor is the "
        "binary entropy of the correlation. Code rates use the edge-perspective "
        "formula R = 1 - (sum_j rho_j/j) / (sum_i lambda_i/i).";

    double Rs1 = 0.0;
    if (Rc1 > 0.0) {
        double ratio = cap / Rc1;
        if (ratio < sw_lower)
            throw SourceIncompressible(
                "the compression floor exceeds what the channel supports at "
                "this code rate");
        Rs1 = std::min(1.0, ratio);
        if (ratio >= 1.0) add_flag(flags::rs1_at_unity);
        if (Rs1 <= sw_lower) add_flag(flags::rs1_at_entropy_floor);
    } else {
        add_flag(flags::non_positive_rate);
        add_flag(flags::rs1_at_entropy_floor);
        Rs1 = sw_lower;
        notes +=
            " For this configuration the sender-1 code rate under that "
            "convention is non-positive, so the cap-to-rate ratio is not "
            "usable and R_s1 is reported at the entropy floor.";
    }

    double objective = Rs1 * Rc1 + spec.Rs2 * Rc2;

    auto report = check_feasibility_grid_fn(
        [&](double x) {
            return eval_de_bec_dual(*lambda1, spec.rho1, spec.epsilon1, x);
        },
        1.0, opts.grid_size, opts.validation_tol);

    JointDesignResult out{Rs1,
                          Rc1,
                          Rc2,
                          *lambda1,
                          caps.cap_individual,
                          caps.cap_sum_residual,
                          objective,
                          sw_lower,
                          std::move(result_flags),
                          std::move(notes),
                          report,
                          lambda1->max_degree()};
    return out;
}

} // namespace ldpcopt
