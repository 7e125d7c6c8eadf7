#pragma once

#include <cmath>
#include <cstddef>

#include "affine.hpp"
#include "degree_distribution.hpp"
#include "errors.hpp"
#include "polynomial.hpp"

namespace ldpcopt {

// A side of the DE constraint left free for optimization: coefficients for
// degrees 2..max_degree become decision variables, degree d at index d - 2.
struct FreeSide {
    int max_degree;
};

inline int free_side_num_vars(const FreeSide& f) { return f.max_degree - 1; }

namespace de_defaults {
inline constexpr double conv_tol = 1e-10;
inline constexpr int max_iter = 10000;
inline constexpr double stall_tol = 1e-14;
inline constexpr int grid_size = 10000;
inline constexpr double grid_tol = 1e-8;
inline constexpr double validation_tol = 1e-6;
} // namespace de_defaults

struct FeasibilityReport {
    bool feasible = false;
    double max_violation = 0.0;
    double argmax_x = 0.0;
    int grid_size = 0;
    double tolerance = 0.0;
};

struct RecursionResult {
    bool converged = false;
    double final_x = 0.0;
    int iters = 0;
};

namespace detail {

inline void require_epsilon(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw EpsilonOutOfRange("epsilon must lie in (0,1)");
}

inline void require_crossover(double p) {
    if (!(p > 0.0 && p < 0.5))
        throw CrossoverOutOfRange("crossover must lie in (0,0.5)");
}

} // namespace detail

// BEC: P(x) = x - eps * lambda(1 - rho(1 - x)); decoding succeeds when
// P >= 0 on the interval.
inline AffinePolynomial build_de_poly_bec(const DegreeDistribution& lambda,
                                          const DegreeDistribution& rho,
                                          double epsilon) {
    detail::require_epsilon(epsilon);
    Polynomial inner =
        Polynomial::constant(1.0) - compose(rho.poly(), Polynomial{1.0, -1.0});
    AffinePolynomial P(0, Polynomial{0.0, 1.0});
    P.add_poly(compose(lambda.poly(), inner) * (-epsilon));
    return P;
}

inline AffinePolynomial build_de_poly_bec(const FreeSide& lambda,
                                          const DegreeDistribution& rho,
                                          double epsilon) {
    detail::require_epsilon(epsilon);
    Polynomial inner =
        Polynomial::constant(1.0) - compose(rho.poly(), Polynomial{1.0, -1.0});
    AffinePolynomial P(free_side_num_vars(lambda), Polynomial{0.0, 1.0});
    Polynomial pw = inner; // inner^(d-1), starting at d = 2
    for (int d = 2; d <= lambda.max_degree; ++d) {
        P.add_term(affine_var(d - 2, -epsilon), pw);
        if (d < lambda.max_degree) pw = pw * inner;
    }
    return P;
}

// BSC sufficient condition: with s(x) = (1 - rho(1-2x))/2 and
// u(x) = (1 + rho(1-2x))/2,
//   P(x) = x - (1-p) lambda(s(x)) - p [1 - lambda(u(x))]  >= 0 on [0, p].
inline AffinePolynomial build_de_poly_bsc(const DegreeDistribution& lambda,
                                          const DegreeDistribution& rho,
                                          double p_crossover) {
    detail::require_crossover(p_crossover);
    Polynomial r2 = compose(rho.poly(), Polynomial{1.0, -2.0});
    Polynomial s = (Polynomial::constant(1.0) - r2) * 0.5;
    Polynomial u = (Polynomial::constant(1.0) + r2) * 0.5;
    AffinePolynomial P(0, Polynomial{-p_crossover, 1.0});
    P.add_poly(compose(lambda.poly(), s) * (-(1.0 - p_crossover)));
    P.add_poly(compose(lambda.poly(), u) * p_crossover);
    return P;
}

inline AffinePolynomial build_de_poly_bsc(const FreeSide& lambda,
                                          const DegreeDistribution& rho,
                                          double p_crossover) {
    detail::require_crossover(p_crossover);
    Polynomial r2 = compose(rho.poly(), Polynomial{1.0, -2.0});
    Polynomial s = (Polynomial::constant(1.0) - r2) * 0.5;
    Polynomial u = (Polynomial::constant(1.0) + r2) * 0.5;
    AffinePolynomial P(free_side_num_vars(lambda), Polynomial{-p_crossover, 1.0});
    Polynomial spw = s, upw = u;
    for (int d = 2; d <= lambda.max_degree; ++d) {
        AffineExpr lam = affine_var(d - 2);
        P.add_term(lam * (-(1.0 - p_crossover)), spw);
        P.add_term(lam * p_crossover, upw);
        if (d < lambda.max_degree) {
            spw = spw * s;
            upw = upw * u;
        }
    }
    return P;
}

// Check-side form of the BEC condition: Q(x) = rho(1 - eps*lambda(x)) - (1-x),
// required >= 0 on [0,1]; affine in rho when that side is free.
inline AffinePolynomial build_de_poly_bec_dual(const DegreeDistribution& lambda,
                                               const DegreeDistribution& rho,
                                               double epsilon) {
    detail::require_epsilon(epsilon);
    Polynomial inner = Polynomial::constant(1.0) - lambda.poly() * epsilon;
    AffinePolynomial Q(0, Polynomial{-1.0, 1.0});
    Q.add_poly(compose(rho.poly(), inner));
    return Q;
}

inline AffinePolynomial build_de_poly_bec_dual(const DegreeDistribution& lambda,
                                               const FreeSide& rho,
                                               double epsilon) {
    detail::require_epsilon(epsilon);
    Polynomial inner = Polynomial::constant(1.0) - lambda.poly() * epsilon;
    AffinePolynomial Q(free_side_num_vars(rho), Polynomial{-1.0, 1.0});
    Polynomial pw = inner;
    for (int j = 2; j <= rho.max_degree; ++j) {
        Q.add_term(affine_var(j - 2), pw);
        if (j < rho.max_degree) pw = pw * inner;
    }
    return Q;
}

// Point evaluation of the DE constraints in nested (composition) form.
// Expanding lambda(1 - rho(1 - x)) into monomial coefficients is exact only at
// small degrees; by degree ~60 the expanded coefficients are large enough that
// evaluation loses every significant digit, while the nested form stays at
// machine precision. All oracles below therefore evaluate nested.
inline double eval_de_bec(const DegreeDistribution& lambda,
                          const DegreeDistribution& rho, double epsilon,
                          double x) {
    return x - epsilon * lambda.eval(1.0 - rho.eval(1.0 - x));
}

inline double eval_de_bsc(const DegreeDistribution& lambda,
                          const DegreeDistribution& rho, double p_crossover,
                          double x) {
    double r = rho.eval(1.0 - 2.0 * x);
    return x - (1.0 - p_crossover) * lambda.eval(0.5 * (1.0 - r)) -
           p_crossover * (1.0 - lambda.eval(0.5 * (1.0 + r)));
}

inline double eval_de_bec_dual(const DegreeDistribution& lambda,
                               const DegreeDistribution& rho, double epsilon,
                               double x) {
    return rho.eval(1.0 - epsilon * lambda.eval(x)) - (1.0 - x);
}

// Independent oracle: evaluate f on a uniform grid over [0, interval_end] and
// report the worst violation of f >= 0.
template <class F>
FeasibilityReport check_feasibility_grid_fn(F&& f, double interval_end,
                                            int grid_size, double tol) {
    double min_val = f(0.0);
    double arg_min = 0.0;
    for (int k = 1; k < grid_size; ++k) {
        double x = interval_end * k / (grid_size - 1);
        double v = f(x);
        if (v < min_val) {
            min_val = v;
            arg_min = x;
        }
    }
    FeasibilityReport r;
    r.max_violation = -min_val;
    r.argmax_x = arg_min;
    r.grid_size = grid_size;
    r.tolerance = tol;
    r.feasible = min_val >= -tol;
    return r;
}

inline FeasibilityReport check_feasibility_grid(const Polynomial& P,
                                                double interval_end,
                                                int grid_size,
                                                double tol) {
    return check_feasibility_grid_fn([&](double x) { return P.eval(x); },
                                     interval_end, grid_size, tol);
}

// Fixed-point recursion x <- eps * lambda(1 - rho(1 - x)), x0 = eps.
inline RecursionResult de_recursion_bec(const DegreeDistribution& lambda,
                                        const DegreeDistribution& rho,
                                        double epsilon,
                                        int max_iter = de_defaults::max_iter,
                                        double conv_tol = de_defaults::conv_tol) {
    detail::require_epsilon(epsilon);
    RecursionResult res;
    double x = epsilon;
    for (int l = 0; l < max_iter; ++l) {
        if (x < conv_tol) {
            res.converged = true;
            res.final_x = x;
            res.iters = l;
            return res;
        }
        double next = epsilon * lambda.eval(1.0 - rho.eval(1.0 - x));
        if (std::abs(next - x) < de_defaults::stall_tol) {
            res.final_x = next;
            res.iters = l + 1;
            return res;
        }
        x = next;
    }
    res.final_x = x;
    res.iters = max_iter;
    return res;
}

// sup{eps : recursion converges}, by bisection; convergence is monotone in eps.
// Probes get a larger iteration budget than the recursion default: when
// lambda_2 > 0 the decay rate near the threshold is 1 - O(eps* - eps), so
// resolving eps* to ~1e-4 needs ~|ln conv_tol| / gap iterations.
inline double threshold_bec(const DegreeDistribution& lambda,
                            const DegreeDistribution& rho,
                            double bisect_tol = 1e-4) {
    if (bisect_tol < 1e-8)
        throw ParamOutOfRange("bisect_tol must be >= 1e-8");
    constexpr int probe_iters = 200000;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > bisect_tol) {
        double mid = 0.5 * (lo + hi);
        if (de_recursion_bec(lambda, rho, mid, probe_iters).converged)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace ldpcopt
