#pragma once

#include "waylab/random.hpp"

#include <doctest.h>

namespace testing {

using namespace waylab;

inline double dist(const Mat& a, const Mat& b) { return opcore::op_norm(a - b); }

inline Mat sx() {
    Mat m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Mat sy() {
    Mat m(2, 2);
    m << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
    return m;
}

inline Mat sz() {
    Mat m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

inline Mat diag(std::initializer_list<double> v) {
    Mat m = Mat::Zero(int(v.size()), int(v.size()));
    int i = 0;
    for (double x : v) {
        m(i, i) = x;
        ++i;
    }
    return m;
}

inline Vec ket(std::initializer_list<cplx> v) {
    Vec k(int(v.size()));
    int i = 0;
    for (cplx x : v) k(i++) = x;
    return k;
}

inline OperationMap amplitude_damping(double g) {
    Mat k0 = diag({1.0, std::sqrt(1.0 - g)});
    Mat k1 = std::sqrt(g) * opcore::matrix_unit(2, 0, 1);
    return OperationMap::from_kraus({k0, k1});
}

// Random effect with spectrum spread over [0, 1].
inline Mat random_effect(random::Rng& rng, int d) {
    Mat h = random::random_hermitian(rng, d);
    opcore::Eigh e = opcore::eigh(h);
    RVec v = e.values;
    double lo = v.minCoeff(), hi = v.maxCoeff();
    for (int i = 0; i < v.size(); ++i) v(i) = (v(i) - lo) / (hi - lo);
    return e.vectors * v.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

}  // namespace testing
