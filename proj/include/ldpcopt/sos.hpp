#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "affine.hpp"
#include "conic_program.hpp"
#include "errors.hpp"
#include "polynomial.hpp"

namespace ldpcopt {

struct GramMatrix {
    int dim = 0;
    Eigen::MatrixXd entries;
};

inline constexpr std::size_t max_lift_degree = 200;

// Pi(t) = (1+t^2)^q P(a t^2 / (1+t^2)), q = deg P. P >= 0 on [0,a] iff
// Pi >= 0 on the real line, i.e. iff Pi is a sum of squares.
inline AffinePolynomial lift_to_real_line(const AffinePolynomial& P, double a) {
    if (P.is_zero()) throw ZeroPolynomial("cannot lift the zero polynomial");
    if (!(a > 0.0 && a <= 1.0))
        throw ParamOutOfRange("lift interval end must lie in (0,1]");
    std::size_t q = P.degree();
    if (q > max_lift_degree)
        throw ParamOutOfRange("lift degree " + std::to_string(q) +
                              " exceeds cap " + std::to_string(max_lift_degree));
    std::vector<Polynomial> pw(q + 1);
    pw[0] = Polynomial::constant(1.0);
    Polynomial one_plus_t2{1.0, 0.0, 1.0};
    for (std::size_t k = 1; k <= q; ++k) pw[k] = pw[k - 1] * one_plus_t2;

    AffinePolynomial Pi(P.num_vars());
    Polynomial at2k = Polynomial::constant(1.0);
    Polynomial at2{0.0, 0.0, a};
    for (std::size_t k = 0; k <= q; ++k) {
        Pi.add_term(P.coeff(k), at2k * pw[q - k]);
        if (k < q) at2k = at2k * at2;
    }
    return Pi;
}

// One "Pi is SOS" block: Gram basis (1, t, ..., t^{s-1}) with
// Pi_l = sum_{i+j=l} B_ij and B >= 0. basis_scale holds per-basis weights
// D_i; the solver sees Bhat with B_ij = D_i D_j Bhat_ij, which keeps the
// Gram variables O(1) even when Pi's coefficients span many orders.
struct SosFragment {
    AffinePolynomial pi;
    int gram_side;
    std::vector<double> basis_scale;
};

namespace detail {

// log-magnitude profile of the coefficient scales, with zero gaps filled by
// linear interpolation (the profiles arising from the lift are log-concave)
inline std::vector<double> log_profile(const std::vector<double>& gamma) {
    const double undef = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = gamma.size();
    std::vector<double> lg(n, undef);
    for (std::size_t l = 0; l < n; ++l)
        if (gamma[l] > 0.0) lg[l] = std::log(gamma[l]);

    std::ptrdiff_t first = -1, last = -1;
    for (std::size_t l = 0; l < n; ++l)
        if (!std::isnan(lg[l])) {
            if (first < 0) first = static_cast<std::ptrdiff_t>(l);
            last = static_cast<std::ptrdiff_t>(l);
        }
    if (first < 0) return std::vector<double>(n, 0.0);

    for (std::ptrdiff_t l = 0; l < first; ++l) lg[l] = lg[first];
    for (std::ptrdiff_t l = last + 1; l < static_cast<std::ptrdiff_t>(n); ++l)
        lg[l] = lg[last];
    std::ptrdiff_t prev = first;
    for (std::ptrdiff_t l = first + 1; l <= last; ++l) {
        if (std::isnan(lg[l])) continue;
        for (std::ptrdiff_t m = prev + 1; m < l; ++m)
            lg[m] = lg[prev] + (lg[l] - lg[prev]) * double(m - prev) / double(l - prev);
        prev = l;
    }
    return lg;
}

inline double affine_scale(const AffineExpr& e) {
    double s = std::abs(e.constant);
    for (const auto& [v, g] : e.gradient) s = std::max(s, std::abs(g));
    return s;
}

} // namespace detail

inline SosFragment build_sos_feasibility(const AffinePolynomial& pi) {
    std::size_t deg = pi.degree();
    int side = static_cast<int>(deg / 2) + 1;
    std::size_t rows = std::max(deg + 1, static_cast<std::size_t>(2 * side - 1));

    std::vector<double> gamma(rows, 0.0);
    for (std::size_t l = 0; l < rows; ++l) gamma[l] = detail::affine_scale(pi.coeff(l));
    std::vector<double> lg = detail::log_profile(gamma);

    SosFragment f{pi, side, {}};
    f.basis_scale.resize(side);
    for (int i = 0; i < side; ++i) f.basis_scale[i] = std::exp(0.5 * lg[2 * i]);
    return f;
}

// decision-variable linear equality sum_v coeffs[v] z_v = rhs
struct LinearConstraint {
    std::map<int, double> coeffs;
    double rhs = 0.0;
};

struct SosBlockInfo {
    int var_offset = 0;
    int side = 0;
    int row_offset = 0;
    std::vector<double> basis_scale;
};

// Full program plus the layout metadata needed to interpret solutions.
struct AssembledProgram {
    ConicProgram prog;
    double objective_sign = 1.0; // -1 when the source problem was a max
    double objective_offset = 0.0;
    int num_decision = 0;
    std::vector<SosBlockInfo> blocks;
    std::vector<double> row_scale; // normalization applied to each row of A, b
};

// Layout: decision variables (one orthant block) first, then one PSD block
// per fragment. Every equality row is normalized by its largest coefficient.
inline AssembledProgram assemble_program(const AffineExpr& objective,
                                         bool maximize, int num_decision,
                                         const std::vector<SosFragment>& fragments,
                                         const std::vector<LinearConstraint>& linear) {
    for (const auto& f : fragments)
        if (f.pi.num_vars() != num_decision)
            throw IndexSpaceMismatch(
                "fragment decision-variable space does not match program");

    AssembledProgram ap;
    ap.num_decision = num_decision;
    ap.objective_sign = maximize ? -1.0 : 1.0;
    ap.objective_offset = objective.constant;

    int total_vars = num_decision;
    if (num_decision > 0)
        ap.prog.cones.push_back({ConeBlock::Type::nonneg, num_decision});
    for (const auto& f : fragments) {
        SosBlockInfo info;
        info.var_offset = total_vars;
        info.side = f.gram_side;
        info.basis_scale = f.basis_scale;
        ap.blocks.push_back(info);
        ap.prog.cones.push_back({ConeBlock::Type::psd, f.gram_side});
        total_vars += svec_len(f.gram_side);
    }

    ap.prog.c.assign(total_vars, 0.0);
    for (const auto& [v, g] : objective.gradient) {
        if (v < 0 || v >= num_decision)
            throw IndexSpaceMismatch("objective references unknown variable");
        ap.prog.c[v] = maximize ? -g : g;
    }

    int row = 0;
    for (std::size_t fi = 0; fi < fragments.size(); ++fi) {
        const auto& f = fragments[fi];
        auto& info = ap.blocks[fi];
        info.row_offset = row;
        const auto& D = f.basis_scale;
        int side = f.gram_side;
        std::size_t rows =
            std::max(f.pi.degree() + 1, static_cast<std::size_t>(2 * side - 1));
        for (std::size_t l = 0; l < rows; ++l) {
            std::vector<Triplet> ents;
            for (int i = static_cast<int>(l) - (side - 1); i <= static_cast<int>(l); ++i) {
                int j = static_cast<int>(l) - i;
                if (i < j || i >= side || j < 0) continue;
                double coef = (i == j) ? D[i] * D[i] : sqrt2 * D[i] * D[j];
                ents.push_back({row, info.var_offset + svec_index(i, j, side), coef});
            }
            const AffineExpr& pl = f.pi.coeff(l);
            for (const auto& [v, g] : pl.gradient)
                ents.push_back({row, v, -g});
            double rhs = pl.constant;

            double scale = std::abs(rhs);
            for (const auto& t : ents) scale = std::max(scale, std::abs(t.value));
            if (scale == 0.0) scale = 1.0;
            for (auto& t : ents) t.value /= scale;
            for (const auto& t : ents) ap.prog.A.push_back(t);
            ap.prog.b.push_back(rhs / scale);
            ap.row_scale.push_back(scale);
            ++row;
        }
    }

    for (const auto& lc : linear) {
        double scale = std::abs(lc.rhs);
        for (const auto& [v, g] : lc.coeffs) scale = std::max(scale, std::abs(g));
        if (scale == 0.0) scale = 1.0;
        for (const auto& [v, g] : lc.coeffs) {
            if (v < 0 || v >= num_decision)
                throw IndexSpaceMismatch("constraint references unknown variable");
            ap.prog.A.push_back({row, v, g / scale});
        }
        ap.prog.b.push_back(lc.rhs / scale);
        ap.row_scale.push_back(scale);
        ++row;
    }

    validate(ap.prog);
    return ap;
}

// Recover the unscaled Gram matrix of block `idx` from a primal vector.
inline GramMatrix extract_gram(const AssembledProgram& ap,
                               const std::vector<double>& z, std::size_t idx) {
    const auto& info = ap.blocks.at(idx);
    int len = svec_len(info.side);
    Eigen::VectorXd v(len);
    for (int k = 0; k < len; ++k) v[k] = z[static_cast<std::size_t>(info.var_offset + k)];
    Eigen::MatrixXd Bhat = svec_unpack(v, info.side);
    GramMatrix g;
    g.dim = info.side;
    g.entries.resize(info.side, info.side);
    for (int i = 0; i < info.side; ++i)
        for (int j = 0; j < info.side; ++j)
            g.entries(i, j) = info.basis_scale[i] * info.basis_scale[j] * Bhat(i, j);
    return g;
}

} // namespace ldpcopt
