#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "errors.hpp"
#include "polynomial.hpp"

namespace ldpcopt {

enum class NodeKind { variable, check };

inline const char* to_string(NodeKind k) {
    return k == NodeKind::variable ? "variable" : "check";
}

// Edge-perspective degree distribution: weights w_d over node degrees d >= 2,
// with polynomial form sum_d w_d x^(d-1).
class DegreeDistribution {
public:
    DegreeDistribution(NodeKind kind, std::map<int, double> weights)
        : kind_(kind), weights_(std::move(weights)) {
        double sum = 0.0;
        for (const auto& [d, w] : weights_) {
            if (d < 2)
                throw DegreeBelowTwo("degree " + std::to_string(d) + " below 2");
            if (w < 0.0)
                throw NegativeWeight("weight for degree " + std::to_string(d) +
                                     " is negative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw WeightsNotNormalized("weights sum to " + std::to_string(sum));
        // Accepted within 1e-9 of 1; renormalize so the stored sum is exact.
        for (auto& [d, w] : weights_) w /= sum;
    }

    NodeKind kind() const { return kind_; }
    const std::map<int, double>& weights() const { return weights_; }

    int max_degree() const { return weights_.rbegin()->first; }

    Polynomial poly() const {
        std::vector<double> c(static_cast<std::size_t>(max_degree()), 0.0);
        for (const auto& [d, w] : weights_) c[static_cast<std::size_t>(d - 1)] += w;
        return Polynomial{std::move(c)};
    }

    // sum_d w_d / d — the integral of the polynomial form over [0,1].
    double sum_inv_degree() const {
        double s = 0.0;
        for (const auto& [d, w] : weights_) s += w / d;
        return s;
    }

    // Point evaluation of the polynomial form straight from the weight map.
    // All terms are nonnegative for y >= 0, so this stays accurate at degrees
    // where the expanded composite DE polynomials do not.
    double eval(double y) const {
        double s = 0.0;
        for (const auto& [d, w] : weights_) s += w * std::pow(y, d - 1);
        return s;
    }

private:
    NodeKind kind_;
    std::map<int, double> weights_;
};

// R = 1 - (sum_j rho_j/j) / (sum_i lambda_i/i). May be negative; callers
// decide whether that is acceptable.
inline double design_rate(const DegreeDistribution& lambda,
                          const DegreeDistribution& rho) {
    return 1.0 - rho.sum_inv_degree() / lambda.sum_inv_degree();
}

} // namespace ldpcopt
