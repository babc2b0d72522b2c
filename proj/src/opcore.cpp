#include "waylab/opcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace waylab {

void Tolerance::validate() const {
    if (!(eq_tol > 0.0) || !std::isfinite(eq_tol))
        throw InputError("eq_tol must be positive and finite");
    if (!(rank_tol > 0.0) || !std::isfinite(rank_tol))
        throw InputError("rank_tol must be positive and finite");
}

Tolerance tolerance_from_env() {
    Tolerance tol;
    if (const char* env = std::getenv("WAYLAB_TOL"); env && *env) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end == env || *end != '\0')
            throw InputError(std::string("WAYLAB_TOL is not a number: ") + env);
        tol.eq_tol = v;
    }
    tol.validate();
    return tol;
}

namespace opcore {

Mat identity(int d) { return Mat::Identity(d, d); }
Mat zeros(int d) { return Mat::Zero(d, d); }

Mat ket_bra(const Vec& ket, const Vec& bra) { return ket * bra.adjoint(); }
Mat projector(const Vec& v) { return v * v.adjoint(); }

Vec basis_ket(int d, int i) {
    Vec v = Vec::Zero(d);
    v(i) = 1.0;
    return v;
}

Mat matrix_unit(int d, int i, int j) {
    Mat m = Mat::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

Mat tensor(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat partial_trace(const Mat& t, Keep keep, int dS, int dA) {
    if (t.rows() != dS * dA || t.cols() != dS * dA)
        throw InputError("partial_trace: operator dimension " + std::to_string(t.rows()) +
                         " does not match " + std::to_string(dS) + "x" + std::to_string(dA));
    if (keep == Keep::System) {
        Mat out = Mat::Zero(dS, dS);
        for (int i = 0; i < dS; ++i)
            for (int j = 0; j < dS; ++j)
                for (int a = 0; a < dA; ++a) out(i, j) += t(i * dA + a, j * dA + a);
        return out;
    }
    Mat out = Mat::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
        for (int b = 0; b < dA; ++b)
            for (int s = 0; s < dS; ++s) out(a, b) += t(s * dA + a, s * dA + b);
    return out;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

double op_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

cplx trace(const Mat& a) { return a.trace(); }

bool is_square(const Mat& a) { return a.rows() == a.cols(); }

bool is_hermitian(const Mat& a, const Tolerance& tol) {
    if (!is_square(a)) return false;
    return op_norm(a - a.adjoint()) <= 2.0 * tol.eq_tol;
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Eigh eigh(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
    return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Mat& a) { return eigh(a).values.minCoeff(); }
double max_eigenvalue(const Mat& a) { return eigh(a).values.maxCoeff(); }

bool is_effect(const Mat& a, const Tolerance& tol) {
    if (!is_hermitian(a, tol)) return false;
    RVec ev = eigh(a).values;
    return ev.minCoeff() >= -tol.eq_tol && ev.maxCoeff() <= 1.0 + tol.eq_tol;
}

bool is_projection(const Mat& a, const Tolerance& tol) {
    if (!is_hermitian(a, tol)) return false;
    Mat h = hermitian_part(a);
    return op_norm(h * h - h) <= tol.eq_tol;
}

bool is_state(const Mat& a, const Tolerance& tol) {
    if (!is_hermitian(a, tol)) return false;
    return min_eigenvalue(a) >= -tol.eq_tol && std::abs(a.trace() - 1.0) <= tol.eq_tol;
}

bool is_unitary(const Mat& a, const Tolerance& tol) {
    if (!is_square(a)) return false;
    return op_norm(a.adjoint() * a - identity(int(a.rows()))) <= tol.eq_tol;
}

Mat hermitian_function(const Mat& a, double (*f)(double)) {
    Eigh e = eigh(a);
    RVec fv = e.values.unaryExpr(f);
    return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

namespace {

double roundoff_floor(const RVec& values) {
    double scale = values.size() ? std::max(1.0, values.cwiseAbs().maxCoeff()) : 1.0;
    return 64.0 * std::numeric_limits<double>::epsilon() * scale * double(std::max<Eigen::Index>(1, values.size()));
}

}  // namespace

Mat psd_sqrt(const Mat& a, const Tolerance& tol) {
    Eigh e = eigh(a);
    double lo = e.values.size() ? e.values.minCoeff() : 0.0;
    if (lo < -tol.eq_tol)
        throw InputError("psd_sqrt: operator is not PSD (min eigenvalue " + std::to_string(lo) + ")");
    // Eigenvalues at roundoff level are zeros; their square roots would be ~1e-8.
    const double floor = roundoff_floor(e.values);
    RVec s = e.values.unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
    return e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

Mat psd_inv_sqrt(const Mat& a, const Tolerance& tol) {
    Eigh e = eigh(a);
    double lo = e.values.minCoeff();
    if (lo <= tol.rank_tol)
        throw InputError("psd_inv_sqrt: operator is singular (min eigenvalue " + std::to_string(lo) + ")");
    RVec s = e.values.unaryExpr([](double v) { return 1.0 / std::sqrt(v); });
    return e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

Mat expi_hermitian(const Mat& h) {
    Eigh e = eigh(h);
    Vec ph(e.values.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, e.values(i));
    return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

double root_fidelity(const Mat& rho, const Mat& sigma, const Tolerance& tol) {
    if (!is_state(rho, tol) || !is_state(sigma, tol))
        throw InputError("fidelity: inputs must be states");
    Mat s = psd_sqrt(rho, tol);
    Mat inner = s * sigma * s;
    RVec ev = eigh(inner).values;
    const double floor = roundoff_floor(ev);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > floor) acc += std::sqrt(ev(i));
    return std::min(acc, 1.0);
}

double fidelity(const Mat& rho, const Mat& sigma, const Tolerance& tol) {
    double r = root_fidelity(rho, sigma, tol);
    return r * r;
}

Mat eigenspace_projector(const Mat& a, double value, const Tolerance& tol) {
    if (!is_hermitian(a, tol)) throw InputError("eigenspace_projector: input is not Hermitian");
    Eigh e = eigh(a);
    Mat p = Mat::Zero(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        if (std::abs(e.values(i) - value) <= tol.rank_tol) p += projector(e.vectors.col(i));
    return p;
}

Mat support_isometry(const Mat& a, const Tolerance& tol) {
    Eigh e = eigh(a);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = e.values.size() - 1; i >= 0; --i)
        if (e.values(i) > tol.rank_tol) keep.push_back(i);
    Mat v(a.rows(), Eigen::Index(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) v.col(Eigen::Index(k)) = e.vectors.col(keep[k]);
    return v;
}

Vec vec(const Mat& a) { return Eigen::Map<const Vec>(a.data(), a.size()); }

Mat unvec(const Vec& v, int rows, int cols) { return Eigen::Map<const Mat>(v.data(), rows, cols); }

Mat null_space(const Mat& m, double threshold) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const RVec& s = svd.singularValues();
    Eigen::Index n = m.cols();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

}  // namespace opcore
}  // namespace waylab
