#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ldpcopt {

// Standard form: min c.z  s.t.  A z = b,  z in K, where K is a product of
// nonnegative orthants and PSD cones. A PSD block of side s occupies
// s(s+1)/2 consecutive entries of z: the lower triangle stacked by column,
// off-diagonal entries scaled by sqrt(2) so that z-block dot products equal
// trace inner products of the matrices.
struct ConeBlock {
    enum class Type { nonneg, psd };
    Type type;
    int size; // orthant length, or matrix side for psd

    int vec_len() const {
        return type == Type::psd ? size * (size + 1) / 2 : size;
    }
};

struct Triplet {
    int row;
    int col;
    double value;
};

struct ConicProgram {
    std::vector<double> c;
    std::vector<Triplet> A;
    std::vector<double> b;
    std::vector<ConeBlock> cones;

    int num_vars() const { return static_cast<int>(c.size()); }
    int num_rows() const { return static_cast<int>(b.size()); }
};

inline int svec_len(int side) { return side * (side + 1) / 2; }

// index of entry (i,j), i >= j, in the column-stacked lower triangle
inline int svec_index(int i, int j, int side) {
    return j * side - j * (j - 1) / 2 + (i - j);
}

inline double constexpr sqrt2 = 1.4142135623730951;

inline Eigen::VectorXd svec_pack(const Eigen::MatrixXd& M) {
    int s = static_cast<int>(M.rows());
    Eigen::VectorXd v(svec_len(s));
    for (int j = 0; j < s; ++j)
        for (int i = j; i < s; ++i)
            v[svec_index(i, j, s)] = (i == j) ? M(i, j) : sqrt2 * M(i, j);
    return v;
}

inline Eigen::MatrixXd svec_unpack(const Eigen::VectorXd& v, int side) {
    if (v.size() != svec_len(side))
        throw DimensionMismatch("svec length does not match side");
    Eigen::MatrixXd M(side, side);
    for (int j = 0; j < side; ++j)
        for (int i = j; i < side; ++i) {
            double x = v[svec_index(i, j, side)];
            M(i, j) = M(j, i) = (i == j) ? x : x / sqrt2;
        }
    return M;
}

inline void validate(const ConicProgram& p) {
    int n = 0;
    for (const auto& k : p.cones) {
        if (k.size < 1) throw MalformedProgram("cone block with nonpositive size");
        n += k.vec_len();
    }
    if (n != p.num_vars())
        throw MalformedProgram("objective length " + std::to_string(p.c.size()) +
                               " does not match cone layout length " +
                               std::to_string(n));
    for (const auto& t : p.A) {
        if (t.row < 0 || t.row >= p.num_rows() || t.col < 0 || t.col >= n)
            throw MalformedProgram("triplet index out of range");
        if (!std::isfinite(t.value)) throw MalformedProgram("non-finite entry in A");
    }
    for (double v : p.b)
        if (!std::isfinite(v)) throw MalformedProgram("non-finite entry in b");
    for (double v : p.c)
        if (!std::isfinite(v)) throw MalformedProgram("non-finite entry in c");
}

} // namespace ldpcopt
