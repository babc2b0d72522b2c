#include "waylab/conserve.hpp"

#include <cmath>

namespace waylab {

using opcore::commutator;
using opcore::op_norm;

void AdditiveQuantity::validate(const Tolerance& tol) const {
    if (!opcore::is_hermitian(n_sys, tol)) throw InputError("n_sys is not Hermitian");
    if (!opcore::is_hermitian(n_app, tol)) throw InputError("n_app is not Hermitian");
}

Mat AdditiveQuantity::composite() const {
    const int dS = int(n_sys.rows()), dA = int(n_app.rows());
    return opcore::tensor(n_sys, opcore::identity(dA)) + opcore::tensor(opcore::identity(dS), n_app);
}

namespace conserve {

ConservationReport check_conservation(const OperationMap& phi, const Mat& n, const Tolerance& tol) {
    if (phi.in_dim != phi.out_dim || n.rows() != phi.in_dim)
        throw InputError("check_conservation: dimension mismatch");
    if (!cpmaps::is_channel(phi, tol)) throw InputError("check_conservation: map is not a channel");
    if (!opcore::is_hermitian(n, tol)) throw InputError("check_conservation: quantity is not Hermitian");
    Mat n2 = n * n;
    ConservationReport r;
    r.average_defect = op_norm(cpmaps::apply_dual(phi, n) - n);
    r.full_defect = op_norm(cpmaps::apply_dual(phi, n2) - n2);
    r.average_holds = r.average_defect <= tol.eq_tol;
    r.full_holds = r.average_holds && r.full_defect <= tol.eq_tol;
    return r;
}

UnitaryEquivalenceReport check_unitary_equivalence(const Mat& u, const Mat& n, const Tolerance& tol) {
    if (!opcore::is_unitary(u, tol)) throw InputError("check_unitary_equivalence: input is not unitary");
    ConservationReport c = check_conservation(OperationMap::unitary(u), n, tol);
    UnitaryEquivalenceReport r;
    r.commutator_defect = op_norm(commutator(u, n));
    r.average_defect = c.average_defect;
    r.full_defect = c.full_defect;
    bool a = r.commutator_defect <= tol.eq_tol, b = c.average_holds, f = c.full_holds;
    r.agree = (a == b) && (b == f);
    return r;
}

double variance(const Mat& n, const Mat& state, const Tolerance& tol) {
    if (!opcore::is_state(state, tol)) throw InputError("variance: invalid state");
    double m1 = (n * state).trace().real();
    double m2 = (n * n * state).trace().real();
    return std::max(0.0, m2 - m1 * m1);
}

double qfi(const Mat& n, const Mat& state, const Tolerance& tol) {
    if (!opcore::is_state(state, tol)) throw InputError("qfi: invalid state");
    opcore::Eigh e = opcore::eigh(state);
    Mat nn = e.vectors.adjoint() * n * e.vectors;
    double q = 0.0;
    const Eigen::Index d = e.values.size();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double li = e.values(i), lj = e.values(j);
            if (li + lj <= tol.rank_tol) continue;
            q += (li - lj) * (li - lj) / (li + lj) * std::norm(nn(i, j));
        }
    return 2.0 * q;
}

YanaseReport yanase_conditions(const MeasurementScheme& m, const AdditiveQuantity& q, const Tolerance& tol) {
    if (q.n_sys.rows() != m.sys_dim || q.n_app.rows() != m.app_dim)
        throw InputError("yanase_conditions: quantity does not match scheme dimensions");
    Mat n = q.composite();
    Observable zt = measure::heisenberg_pointer(m);
    YanaseReport r;
    for (size_t x = 0; x < m.pointer.size(); ++x) {
        r.yanase_defect = std::max(r.yanase_defect, op_norm(commutator(m.pointer.effects[x], q.n_app)));
        r.weak_yanase_defect = std::max(r.weak_yanase_defect, op_norm(commutator(zt.effects[x], n)));
    }
    r.yanase = r.yanase_defect <= tol.eq_tol;
    r.weak_yanase = r.weak_yanase_defect <= tol.eq_tol;
    if (m.coupling.kraus.size() == 1 && opcore::is_unitary(m.coupling.kraus.front(), tol) &&
        check_conservation(m.coupling, n, tol).average_holds) {
        r.equivalence_checked = true;
        r.equivalence_agrees = r.yanase == r.weak_yanase;
    }
    return r;
}

}  // namespace conserve
}  // namespace waylab
