#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace ldpcopt {

// Dense univariate polynomial, coefficients lowest-degree-first.
// Canonical form trims trailing coefficients with |c| <= trim_tol, so the
// zero polynomial has an empty coefficient vector.
class Polynomial {
public:
    static constexpr double trim_tol = 1e-15;

    Polynomial() = default;

    explicit Polynomial(std::vector<double> c) : coeffs_(std::move(c)) { trim(); }

    Polynomial(std::initializer_list<double> c) : coeffs_(c) { trim(); }

    static Polynomial constant(double c) { return Polynomial{std::vector<double>{c}}; }

    // c * x^d
    static Polynomial monomial(std::size_t d, double c = 1.0) {
        std::vector<double> v(d + 1, 0.0);
        v[d] = c;
        return Polynomial{std::move(v)};
    }

    const std::vector<double>& coeffs() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }

    std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

    double coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0.0; }

    double eval(double x) const {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
        return acc;
    }

    double operator()(double x) const { return eval(x); }

    Polynomial operator-() const {
        std::vector<double> c = coeffs_;
        for (double& v : c) v = -v;
        return Polynomial{std::move(c)};
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        trim();
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        trim();
        return *this;
    }

    Polynomial& operator*=(double s) {
        for (double& v : coeffs_) v *= s;
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial{std::move(c)};
    }

private:
    void trim() {
        while (!coeffs_.empty() && std::abs(coeffs_.back()) <= trim_tol) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
};

// outer(inner(x)), by Horner over polynomial coefficients.
inline Polynomial compose(const Polynomial& outer, const Polynomial& inner) {
    Polynomial acc;
    const auto& c = outer.coeffs();
    for (std::size_t i = c.size(); i-- > 0;) {
        acc = acc * inner;
        acc += Polynomial::constant(c[i]);
    }
    return acc;
}

} // namespace ldpcopt
