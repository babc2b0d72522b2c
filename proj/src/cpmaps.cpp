#include "waylab/cpmaps.hpp"

#include <cmath>

namespace waylab {

BoundReport make_report(std::string id, std::string outcome, double lhs, double rhs,
                        const Tolerance& tol, bool hypothesis_violated, std::string notes) {
    BoundReport r;
    r.bound_id = std::move(id);
    r.outcome = std::move(outcome);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.satisfied = r.slack >= -tol.eq_tol;
    r.hypothesis_violated = hypothesis_violated;
    r.notes = std::move(notes);
    return r;
}

OperationMap OperationMap::from_kraus(std::vector<Mat> kraus) {
    if (kraus.empty()) throw InputError("operation needs at least one Kraus operator");
    OperationMap m;
    m.out_dim = int(kraus.front().rows());
    m.in_dim = int(kraus.front().cols());
    for (const auto& k : kraus)
        if (k.rows() != m.out_dim || k.cols() != m.in_dim)
            throw InputError("Kraus operators have inconsistent shapes");
    m.kraus = std::move(kraus);
    return m;
}

OperationMap OperationMap::unitary(const Mat& u) { return from_kraus({u}); }

OperationMap OperationMap::identity(int d) { return from_kraus({Mat::Identity(d, d)}); }

namespace cpmaps {

namespace {

void require_dim(const Mat& a, int d, const char* what) {
    if (a.rows() != d || a.cols() != d)
        throw InputError(std::string(what) + ": expected " + std::to_string(d) + "x" +
                         std::to_string(d) + " operator, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
}

}  // namespace

Mat apply(const OperationMap& phi, const Mat& t) {
    require_dim(t, phi.in_dim, "apply");
    Mat out = Mat::Zero(phi.out_dim, phi.out_dim);
    for (const auto& k : phi.kraus) out.noalias() += k * t * k.adjoint();
    return out;
}

Mat apply_dual(const OperationMap& phi, const Mat& a) {
    require_dim(a, phi.out_dim, "apply_dual");
    Mat out = Mat::Zero(phi.in_dim, phi.in_dim);
    for (const auto& k : phi.kraus) out.noalias() += k.adjoint() * a * k;
    return out;
}

Mat sesquilinear(const OperationMap& phi, const Mat& a, const Mat& b) {
    Mat ad = a.adjoint();
    return apply_dual(phi, ad * b) - apply_dual(phi, ad) * apply_dual(phi, b);
}

BoundReport commutator_defect_bound(const OperationMap& phi, const Mat& a, const Mat& b,
                                    const Tolerance& tol) {
    using opcore::commutator;
    using opcore::op_norm;
    Mat pa = apply_dual(phi, a), pb = apply_dual(phi, b);
    double lhs = op_norm(commutator(pa, pb) - apply_dual(phi, commutator(a, b)));
    Mat ad = a.adjoint(), bd = b.adjoint();
    double rhs = std::sqrt(op_norm(sesquilinear(phi, a, a))) * std::sqrt(op_norm(sesquilinear(phi, bd, bd))) +
                 std::sqrt(op_norm(sesquilinear(phi, ad, ad))) * std::sqrt(op_norm(sesquilinear(phi, b, b)));
    return make_report("channel_commutator", "", lhs, rhs, tol);
}

MultiplicabilityResult check_multiplicability(const OperationMap& phi, const Mat& b,
                                              const Tolerance& tol) {
    MultiplicabilityResult r;
    r.precondition_defect = opcore::op_norm(sesquilinear(phi, b, b));
    r.applicable = r.precondition_defect <= tol.eq_tol;
    if (!r.applicable) return r;
    const int d = phi.out_dim;
    Mat pb = apply_dual(phi, b);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Mat a = opcore::matrix_unit(d, i, j);
            double def = opcore::op_norm(apply_dual(phi, a * b) - apply_dual(phi, a) * pb);
            r.witness = std::max(r.witness, def);
        }
    r.holds = r.witness <= tol.eq_tol;
    return r;
}

OperationMap compose(const OperationMap& phi2, const OperationMap& phi1) {
    if (phi1.out_dim != phi2.in_dim)
        throw InputError("compose: output dimension " + std::to_string(phi1.out_dim) +
                         " does not match input dimension " + std::to_string(phi2.in_dim));
    std::vector<Mat> ks;
    ks.reserve(phi1.kraus.size() * phi2.kraus.size());
    for (const auto& k1 : phi1.kraus)
        for (const auto& k2 : phi2.kraus) ks.push_back(k2 * k1);
    return OperationMap::from_kraus(std::move(ks));
}

Mat to_supermatrix(const OperationMap& phi) {
    // vec(K^dagger a K) = (K^T kron K^dagger) vec(a)
    const Eigen::Index n = Eigen::Index(phi.in_dim) * phi.in_dim;
    const Eigen::Index m = Eigen::Index(phi.out_dim) * phi.out_dim;
    Mat sm = Mat::Zero(n, m);
    for (const auto& k : phi.kraus) sm += opcore::tensor(k.transpose(), k.adjoint());
    return sm;
}

Mat choi(const OperationMap& phi) {
    // J = sum_ij |i><j| kron Phi(|i><j|)
    const int din = phi.in_dim, dout = phi.out_dim;
    Mat j = Mat::Zero(din * dout, din * dout);
    for (int a = 0; a < din; ++a)
        for (int b = 0; b < din; ++b)
            j.block(a * dout, b * dout, dout, dout) = cpmaps::apply(phi, opcore::matrix_unit(din, a, b));
    return j;
}

OperationMap compress(const OperationMap& phi, const Tolerance& tol) {
    const int din = phi.in_dim, dout = phi.out_dim;
    opcore::Eigh e = opcore::eigh(choi(phi));
    std::vector<Mat> ks;
    for (Eigen::Index i = e.values.size() - 1; i >= 0; --i) {
        if (e.values(i) < tol.rank_tol) continue;
        Vec v = std::sqrt(e.values(i)) * e.vectors.col(i);
        Mat k(dout, din);
        for (int a = 0; a < din; ++a) k.col(a) = v.segment(a * dout, dout);
        ks.push_back(std::move(k));
    }
    if (ks.empty()) ks.push_back(Mat::Zero(dout, din));
    return OperationMap::from_kraus(std::move(ks));
}

double trace_defect(const OperationMap& phi) {
    Mat s = Mat::Zero(phi.in_dim, phi.in_dim);
    for (const auto& k : phi.kraus) s.noalias() += k.adjoint() * k;
    return opcore::op_norm(s - opcore::identity(phi.in_dim));
}

bool is_channel(const OperationMap& phi, const Tolerance& tol) {
    return trace_defect(phi) <= tol.eq_tol;
}

bool is_operation(const OperationMap& phi, const Tolerance& tol) {
    Mat s = Mat::Zero(phi.in_dim, phi.in_dim);
    for (const auto& k : phi.kraus) s.noalias() += k.adjoint() * k;
    return opcore::max_eigenvalue(s) <= 1.0 + tol.eq_tol;
}

OperationMap sum(const std::vector<OperationMap>& maps) {
    if (maps.empty()) throw InputError("sum of zero operations");
    std::vector<Mat> ks;
    for (const auto& m : maps) {
        if (m.in_dim != maps.front().in_dim || m.out_dim != maps.front().out_dim)
            throw InputError("sum: operations have different dimensions");
        ks.insert(ks.end(), m.kraus.begin(), m.kraus.end());
    }
    return OperationMap::from_kraus(std::move(ks));
}

}  // namespace cpmaps
}  // namespace waylab
