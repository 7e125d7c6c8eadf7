#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"

namespace ldpcopt {

// constant + sum_v gradient[v] * z_v, for decision variables z.
struct AffineExpr {
    double constant = 0.0;
    std::map<int, double> gradient;

    bool is_constant() const { return gradient.empty(); }

    bool is_zero() const {
        if (std::abs(constant) > Polynomial::trim_tol) return false;
        for (const auto& [v, g] : gradient)
            if (std::abs(g) > Polynomial::trim_tol) return false;
        return true;
    }

    double eval(const std::vector<double>& z) const {
        double acc = constant;
        for (const auto& [v, g] : gradient) acc += g * z[static_cast<std::size_t>(v)];
        return acc;
    }

    AffineExpr& operator+=(const AffineExpr& o) {
        constant += o.constant;
        for (const auto& [v, g] : o.gradient) gradient[v] += g;
        return *this;
    }

    AffineExpr operator*(double s) const {
        AffineExpr r;
        r.constant = constant * s;
        for (const auto& [v, g] : gradient) r.gradient[v] = g * s;
        return r;
    }
};

inline AffineExpr affine_const(double c) { return AffineExpr{c, {}}; }

inline AffineExpr affine_var(int v, double coeff = 1.0) {
    AffineExpr e;
    e.gradient[v] = coeff;
    return e;
}

// Polynomial in x whose coefficients are affine in a vector of decision
// variables. Instantiating at a concrete vector yields a Polynomial exactly.
class AffinePolynomial {
public:
    explicit AffinePolynomial(int num_vars) : num_vars_(num_vars) {}

    AffinePolynomial(int num_vars, const Polynomial& p) : num_vars_(num_vars) {
        for (std::size_t i = 0; i < p.coeffs().size(); ++i)
            coeffs_.push_back(affine_const(p.coeffs()[i]));
    }

    int num_vars() const { return num_vars_; }

    // index of the last coefficient that is not identically zero
    std::size_t degree() const {
        std::size_t d = 0;
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            if (!coeffs_[i].is_zero()) d = i;
        return d;
    }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    std::size_t size() const { return coeffs_.size(); }

    const AffineExpr& coeff(std::size_t i) const {
        static const AffineExpr zero{};
        return i < coeffs_.size() ? coeffs_[i] : zero;
    }

    // this += s(z) * p(x)
    void add_term(const AffineExpr& s, const Polynomial& p) {
        if (coeffs_.size() < p.coeffs().size()) coeffs_.resize(p.coeffs().size());
        for (std::size_t i = 0; i < p.coeffs().size(); ++i)
            coeffs_[i] += s * p.coeffs()[i];
    }

    void add_poly(const Polynomial& p) { add_term(affine_const(1.0), p); }

    Polynomial instantiate(const std::vector<double>& z) const {
        if (z.size() != static_cast<std::size_t>(num_vars_))
            throw DimensionMismatch("decision vector length mismatch");
        std::vector<double> c(coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] = coeffs_[i].eval(z);
        return Polynomial{std::move(c)};
    }

private:
    int num_vars_;
    std::vector<AffineExpr> coeffs_;
};

} // namespace ldpcopt
