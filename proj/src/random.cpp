#include "waylab/random.hpp"

#include <Eigen/QR>

#include <cmath>

namespace waylab::random {

Rng make_rng(std::uint64_t seed) { return Rng(seed); }

Mat ginibre(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            double re = g(rng);
            double im = g(rng);
            m(i, j) = cplx(re, im) / std::sqrt(2.0);
        }
    return m;
}

Mat haar_unitary(Rng& rng, int d) {
    Mat z = ginibre(rng, d, d);
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity of QR so the distribution is Haar.
    for (int i = 0; i < d; ++i) {
        cplx di = r(i, i);
        double a = std::abs(di);
        q.col(i) *= (a > 0.0) ? di / a : cplx(1.0);
    }
    return q;
}

Mat random_hermitian(Rng& rng, int d) {
    Mat g = ginibre(rng, d, d);
    return 0.5 * (g + g.adjoint());
}

Vec random_pure(Rng& rng, int d) {
    Vec v = ginibre(rng, d, 1).col(0);
    return v / v.norm();
}

Mat random_state(Rng& rng, int d, int env) {
    if (env <= 0) env = d;
    Mat psi = ginibre(rng, d, env);
    Mat rho = psi * psi.adjoint();
    rho /= rho.trace().real();
    return opcore::hermitian_part(rho);
}

Observable random_povm(Rng& rng, int d, int n) {
    std::vector<Mat> parts;
    Mat s = Mat::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        Mat g = ginibre(rng, d, d);
        parts.push_back(g * g.adjoint());
        s += parts.back();
    }
    Mat w = opcore::psd_inv_sqrt(s);
    for (auto& p : parts) p = opcore::hermitian_part(w * p * w);
    return make_observable(std::move(parts));
}

Observable random_sharp_observable(Rng& rng, int d, int n) {
    if (n < 1 || n > d) throw InputError("random_sharp_observable: need 1 <= n <= d");
    Mat u = haar_unitary(rng, d);
    // Outcome x gets basis vectors x, x+n, x+2n, ... so every outcome is nonzero.
    std::vector<Mat> eff(size_t(n), Mat::Zero(d, d));
    for (int k = 0; k < d; ++k) eff[size_t(k % n)] += opcore::projector(u.col(k));
    return make_observable(std::move(eff));
}

OperationMap random_channel(Rng& rng, int d, int kraus) {
    Mat v = haar_unitary(rng, d * kraus).leftCols(d);
    std::vector<Mat> ks;
    for (int k = 0; k < kraus; ++k) ks.push_back(v.middleRows(k * d, d));
    return OperationMap::from_kraus(std::move(ks));
}

OperationMap random_unital_channel(Rng& rng, int d, int terms) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> w;
    double tot = 0.0;
    for (int i = 0; i < terms; ++i) {
        w.push_back(u(rng));
        tot += w.back();
    }
    std::vector<Mat> ks;
    for (int i = 0; i < terms; ++i) ks.push_back(std::sqrt(w[size_t(i)] / tot) * haar_unitary(rng, d));
    return OperationMap::from_kraus(std::move(ks));
}

Mat conservative_unitary(Rng& rng, const Mat& n, const Tolerance& tol) {
    opcore::Eigh e = opcore::eigh(n);
    const int d = int(n.rows());
    Mat h = Mat::Zero(d, d);
    int start = 0;
    while (start < d) {
        int end = start + 1;
        while (end < d && std::abs(e.values(end) - e.values(start)) <= tol.rank_tol) ++end;
        int k = end - start;
        Mat block = random_hermitian(rng, k);
        Mat v = e.vectors.middleCols(start, k);
        h += v * block * v.adjoint();
        start = end;
    }
    return opcore::expi_hermitian(h);
}

}  // namespace waylab::random
