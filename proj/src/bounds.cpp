#include "waylab/bounds.hpp"

#include <cmath>
#include <map>

namespace waylab::bounds {

using cpmaps::apply;
using cpmaps::apply_dual;
using opcore::commutator;
using opcore::op_norm;

namespace {

const std::map<std::string, Gate>& gate_table() {
    static const std::map<std::string, Gate> table{
        {"compatibility_unsharpness", Gate::None},
        {"disturbance_variance", Gate::None},
        {"disturbance_variance_nondisturbing", Gate::None},
        {"disturbance_unsharpness", Gate::None},
        {"conservation_disturbance", Gate::Average},
        {"conservation_disturbance_nondisturbing", Gate::Average},
        {"conservation_disturbance_unsharpness", Gate::Average},
        {"conservation_disturbance_apparatus_variance", Gate::Full},
        {"conservation_disturbance_qfi", Gate::Full},
        {"conservation_disturbance_qfi_extremal", Gate::Full},
        {"measurability_variance", Gate::Average},
        {"measurability_qfi", Gate::Full},
        {"measurability_qfi_extremal", Gate::Full},
        {"way_unsharpness", Gate::Average},
        {"way_weak_yanase_variance", Gate::WeakYanase},
        {"way_weak_yanase_qfi", Gate::WeakYanaseAndFull},
        {"way_weak_yanase_extremal", Gate::WeakYanaseAndFull},
        {"distinguishability_fidelity", Gate::Average},
        {"distinguishability_spectral", Gate::Average},
        {"repeatable_compressed_commutation", Gate::Average},
    };
    return table;
}

double sqrtp(double v) { return std::sqrt(std::max(0.0, v)); }

double unsharpness(const Mat& e) { return op_norm(e - e * e); }

std::string pair_label(const std::string& x, const std::string& y) { return x + "|" + y; }

struct ConservationStatus {
    bool average = false;
    bool full = false;
    bool weak_yanase = false;
    std::string note;
};

ConservationStatus status_of(const MeasurementScheme& m, const AdditiveQuantity& q, const Tolerance& tol) {
    if (q.n_sys.rows() != m.sys_dim || q.n_app.rows() != m.app_dim)
        throw InputError("quantity dimensions do not match the scheme");
    q.validate(tol);
    ConservationReport c = conserve::check_conservation(m.coupling, q.composite(), tol);
    YanaseReport y = conserve::yanase_conditions(m, q, tol);
    ConservationStatus s{c.average_holds, c.full_holds, y.weak_yanase, {}};
    s.note = std::string("average=") + (s.average ? "yes" : "no") + " full=" + (s.full ? "yes" : "no");
    return s;
}

bool violated(Gate g, const ConservationStatus& s) {
    switch (g) {
        case Gate::None: return false;
        case Gate::Average: return !s.average;
        case Gate::Full: return !s.full;
        case Gate::WeakYanase: return !s.weak_yanase;
        case Gate::WeakYanaseAndFull: return !s.weak_yanase || !s.full;
    }
    return false;
}

}  // namespace

Gate gate_of(const std::string& bound_id) {
    auto it = gate_table().find(bound_id);
    if (it == gate_table().end()) throw InputError("unknown bound id: " + bound_id);
    return it->second;
}

const char* gate_name(Gate g) {
    switch (g) {
        case Gate::None: return "none";
        case Gate::Average: return "average";
        case Gate::Full: return "full";
        case Gate::WeakYanase: return "weak_yanase";
        case Gate::WeakYanaseAndFull: return "weak_yanase+full";
    }
    return "?";
}

std::vector<std::string> bound_ids() {
    std::vector<std::string> ids;
    for (const auto& [k, v] : gate_table()) ids.push_back(k);
    return ids;
}

DisturbanceProfile disturbance_profile(const Instrument& inst, const Observable& f) {
    if (f.dim != inst.dim) throw InputError("disturbance_profile: dimension mismatch");
    OperationMap tot = inst.total();
    DisturbanceProfile p;
    for (const auto& fy : f.effects) {
        p.defects.push_back(apply_dual(tot, fy) - fy);
        p.norms.push_back(op_norm(p.defects.back()));
        p.global = std::max(p.global, p.norms.back());
    }
    return p;
}

ErrorProfile error_profile(const MeasurementScheme& m, const Observable& target) {
    if (target.dim != m.sys_dim) throw InputError("error_profile: dimension mismatch");
    if (target.outcomes != m.pointer.outcomes)
        throw InputError("error_profile: target and pointer outcome sets differ");
    Observable meas = measure::measured_observable(m);
    ErrorProfile p;
    for (size_t x = 0; x < target.size(); ++x) {
        p.defects.push_back(meas.effects[x] - target.effects[x]);
        p.norms.push_back(op_norm(p.defects.back()));
        p.global = std::max(p.global, p.norms.back());
    }
    return p;
}

double scheme_variance(const MeasurementScheme& m, const AdditiveQuantity& q) {
    RestrictionMaps rm = measure::restriction_maps(m);
    Mat n = q.composite();
    Mat g1 = apply_dual(rm.gamma_e, n);
    return op_norm(apply_dual(rm.gamma_e, n * n) - g1 * g1);
}

std::vector<BoundReport> eval_disturbance_bounds(const MeasurementScheme& m, const Observable& f,
                                                 const std::optional<AdditiveQuantity>& q,
                                                 bool assert_extremal, const Tolerance& tol) {
    Instrument inst = measure::scheme_to_instrument(m);
    Observable e = measure::measured_observable(m);
    OperationMap tot = inst.total();
    DisturbanceProfile dp = disturbance_profile(inst, f);
    const bool compatible = dp.global <= tol.eq_tol;

    std::vector<double> fvar;  // ||I*(F^2) - I*(F)^2||
    std::vector<double> fvar0; // ||I*(F^2) - F^2||
    for (const auto& fy : f.effects) {
        Mat f2 = fy * fy, i1 = apply_dual(tot, fy), i2 = apply_dual(tot, f2);
        fvar.push_back(op_norm(i2 - i1 * i1));
        fvar0.push_back(op_norm(i2 - f2));
    }

    std::vector<BoundReport> out;
    for (size_t x = 0; x < e.size(); ++x) {
        const double ue = unsharpness(e.effects[x]);
        for (size_t y = 0; y < f.size(); ++y) {
            const std::string lbl = pair_label(e.outcomes[x], f.outcomes[y]);
            const double lhs = op_norm(commutator(e.effects[x], f.effects[y]));
            const double dy = dp.norms[y];
            const double uf = unsharpness(f.effects[y]);
            out.push_back(make_report("compatibility_unsharpness", lbl, lhs, 2.0 * sqrtp(ue) * sqrtp(uf), tol,
                                      !compatible, compatible ? "" : "compatibility not certified"));
            out.push_back(make_report("disturbance_variance", lbl, lhs, dy + 2.0 * sqrtp(ue) * sqrtp(fvar[y]), tol));
            out.push_back(make_report("disturbance_variance_nondisturbing", lbl, lhs,
                                      2.0 * sqrtp(ue) * sqrtp(fvar0[y]), tol, dy > tol.eq_tol,
                                      dy > tol.eq_tol ? "effect is disturbed" : ""));
            out.push_back(make_report("disturbance_unsharpness", lbl, lhs,
                                      dy + 2.0 * sqrtp(ue) * sqrtp(2.0 * dy + uf), tol));
        }
    }
    if (!q) return out;

    ConservationStatus s = status_of(m, *q, tol);
    const Mat& ns = q->n_sys;
    const double nsn = op_norm(ns);
    const double varg = scheme_variance(m, *q);
    const double vara = conserve::variance(q->n_app, m.xi, tol);
    const double qf = conserve::qfi(q->n_app, m.xi, tol);
    for (size_t y = 0; y < f.size(); ++y) {
        const std::string& lbl = f.outcomes[y];
        Mat c = commutator(f.effects[y], ns);
        const double lhs = op_norm(c - apply_dual(tot, c));
        const double dy = dp.norms[y];
        const double uf = unsharpness(f.effects[y]);
        auto emit = [&](const char* id, double rhs, bool extra_violation = false, std::string note = {}) {
            bool hv = violated(gate_of(id), s) || extra_violation;
            out.push_back(make_report(id, lbl, lhs, rhs, tol, hv, note.empty() ? s.note : note + "; " + s.note));
        };
        emit("conservation_disturbance", 2.0 * nsn * dy + 2.0 * sqrtp(varg) * sqrtp(fvar[y]));
        emit("conservation_disturbance_nondisturbing", 2.0 * sqrtp(varg) * sqrtp(fvar0[y]), dy > tol.eq_tol,
             dy > tol.eq_tol ? "effect is disturbed" : "");
        emit("conservation_disturbance_unsharpness", 2.0 * nsn * dy + 2.0 * sqrtp(varg) * sqrtp(2.0 * dy + uf));
        emit("conservation_disturbance_apparatus_variance",
             2.0 * nsn * dy + 2.0 * sqrtp(vara) * sqrtp(2.0 * dy + uf));
        emit("conservation_disturbance_qfi", 2.0 * nsn * dy + 0.5 * sqrtp(qf));
        if (assert_extremal)
            emit("conservation_disturbance_qfi_extremal", 2.0 * nsn * dy + sqrtp(qf) * sqrtp(fvar[y]), false,
                 "extremality asserted by caller");
    }
    return out;
}

std::vector<BoundReport> eval_measurability_bounds(const MeasurementScheme& m, const Observable& target,
                                                   const AdditiveQuantity& q, bool assert_extremal,
                                                   const Tolerance& tol) {
    ConservationStatus s = status_of(m, q, tol);
    ErrorProfile ep = error_profile(m, target);
    RestrictionMaps rm = measure::restriction_maps(m);
    const double nsn = op_norm(q.n_sys);
    const double varg = scheme_variance(m, q);
    const double qf = conserve::qfi(q.n_app, m.xi, tol);
    std::vector<BoundReport> out;
    for (size_t x = 0; x < target.size(); ++x) {
        const Mat& ex = target.effects[x];
        const double lhs = op_norm(commutator(ex, q.n_sys) -
                                   apply_dual(rm.lambda, commutator(m.pointer.effects[x], q.n_app)));
        const double eps = ep.norms[x];
        const double ue = unsharpness(ex);
        auto emit = [&](const char* id, double rhs, bool extra = false, std::string note = {}) {
            bool hv = violated(gate_of(id), s) || extra;
            out.push_back(make_report(id, target.outcomes[x], lhs, rhs, tol, hv,
                                      note.empty() ? s.note : note + "; " + s.note));
        };
        emit("measurability_variance", 2.0 * nsn * eps + 2.0 * sqrtp(varg) * sqrtp(2.0 * eps + ue));
        emit("measurability_qfi", 2.0 * nsn * eps + 0.5 * sqrtp(qf));
        if (assert_extremal)
            emit("measurability_qfi_extremal", sqrtp(qf) * sqrtp(ue), ep.global > tol.eq_tol,
                 ep.global > tol.eq_tol ? "extremality asserted; scheme does not measure target"
                                        : "extremality asserted by caller");
    }
    return out;
}

std::vector<BoundReport> eval_way(const MeasurementScheme& m, const AdditiveQuantity& q,
                                  const std::optional<Observable>& target, bool assert_extremal,
                                  const Tolerance& tol) {
    ConservationStatus s = status_of(m, q, tol);
    Observable meas = measure::measured_observable(m);
    Instrument inst = measure::scheme_to_instrument(m);
    YanaseReport yr = conserve::yanase_conditions(m, q, tol);
    measure::RepeatabilityReport rep = measure::repeatability_report(inst, std::nullopt, tol);
    const double nsn = op_norm(q.n_sys);
    const double varg = scheme_variance(m, q);
    const double vara = conserve::variance(q.n_app, m.xi, tol);
    const double qf = conserve::qfi(q.n_app, m.xi, tol);

    std::vector<BoundReport> out;
    if (rep.repeatable || yr.yanase) {
        std::string why = std::string(rep.repeatable ? "repeatable" : "yanase") +
                          " (repeatability defect " + std::to_string(rep.repeatability_defect) +
                          ", yanase defect " + std::to_string(yr.yanase_defect) + ")";
        for (size_t x = 0; x < meas.size(); ++x) {
            const double lhs = op_norm(commutator(meas.effects[x], q.n_sys));
            const double rhs = 2.0 * sqrtp(varg) * sqrtp(unsharpness(meas.effects[x]));
            out.push_back(make_report("way_unsharpness", meas.outcomes[x], lhs, rhs, tol,
                                      violated(Gate::Average, s), why + "; " + s.note));
        }
    }

    const Observable& tgt = target ? *target : meas;
    ErrorProfile ep = error_profile(m, tgt);
    std::string wy = "weak yanase defect " + std::to_string(yr.weak_yanase_defect);
    for (size_t x = 0; x < tgt.size(); ++x) {
        const double lhs = op_norm(commutator(tgt.effects[x], q.n_sys));
        const double eps = ep.norms[x];
        const double ue = unsharpness(tgt.effects[x]);
        auto emit = [&](const char* id, double rhs, bool extra = false, std::string note = {}) {
            bool hv = violated(gate_of(id), s) || extra;
            out.push_back(make_report(id, tgt.outcomes[x], lhs, rhs, tol, hv,
                                      (note.empty() ? wy : note + "; " + wy) + "; " + s.note));
        };
        emit("way_weak_yanase_variance", 2.0 * nsn * eps + 2.0 * sqrtp(vara) * sqrtp(2.0 * eps + ue));
        emit("way_weak_yanase_qfi", 2.0 * nsn * eps + 0.5 * sqrtp(qf));
        if (assert_extremal)
            emit("way_weak_yanase_extremal", sqrtp(qf) * sqrtp(ue), ep.global > tol.eq_tol,
                 "extremality asserted by caller");
    }
    return out;
}

std::pair<Vec, Vec> extremal_pair(const Mat& effect) {
    opcore::Eigh e = opcore::eigh(effect);
    return {e.vectors.col(e.values.size() - 1), e.vectors.col(0)};
}

std::vector<BoundReport> eval_distinguishability_bounds(const MeasurementScheme& m, const AdditiveQuantity& q,
                                                        const Vec& psi, const Vec& phi,
                                                        const Tolerance& tol) {
    const int d = m.sys_dim;
    if (psi.size() != d || phi.size() != d) throw InputError("distinguishability: vector dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > tol.eq_tol || std::abs(phi.norm() - 1.0) > tol.eq_tol)
        throw InputError("distinguishability: vectors must be unit vectors");
    if (std::abs(psi.dot(phi)) > tol.eq_tol) throw InputError("distinguishability: vectors are not orthogonal");

    ConservationStatus s = status_of(m, q, tol);
    Instrument inst = measure::scheme_to_instrument(m);
    OperationMap tot = inst.total();
    RestrictionMaps rm = measure::restriction_maps(m);
    Observable e = inst.induced();
    measure::RepeatabilityReport rep = measure::repeatability_report(inst, std::nullopt, tol);

    const Mat rpsi = opcore::projector(psi), rphi = opcore::projector(phi);
    const double lhs = std::abs(psi.dot(q.n_sys * phi));
    const double nsn = op_norm(q.n_sys), nan = op_norm(q.n_app);

    std::vector<BoundReport> out;
    const double f_sys = opcore::root_fidelity(cpmaps::apply(tot, rpsi), cpmaps::apply(tot, rphi), tol);
    const double f_app = opcore::root_fidelity(cpmaps::apply(rm.lambda, rpsi), cpmaps::apply(rm.lambda, rphi), tol);
    out.push_back(make_report("distinguishability_fidelity", "", lhs, nan * f_sys + nsn * f_app, tol,
                              violated(Gate::Average, s), s.note));

    for (size_t x = 0; x < e.size(); ++x) {
        const Mat& ex = e.effects[x];
        if (op_norm(ex - ex.trace() / double(d) * opcore::identity(d)) <= tol.eq_tol)
            continue;
        const double ne = op_norm(ex);
        const Mat comp = opcore::identity(d) - ex;
        const double nc = op_norm(comp);
        Mat kmax = opcore::eigenspace_projector(ex, ne, tol);
        Mat kmin = opcore::eigenspace_projector(comp, nc, tol);
        bool in_max = (psi - kmax * psi).norm() <= tol.rank_tol;
        bool in_min = (phi - kmin * phi).norm() <= tol.rank_tol;
        if (!in_max || !in_min) continue;
        const double rhs = nsn * (sqrtp(ne) * sqrtp(1.0 - nc) + sqrtp(1.0 - ne) * sqrtp(nc));
        bool hv = violated(Gate::Average, s) || !rep.first_kind;
        out.push_back(make_report("distinguishability_spectral", e.outcomes[x], lhs, rhs, tol, hv,
                                  std::string(rep.first_kind ? "first kind" : "not first kind") + "; " + s.note));
    }
    return out;
}

std::vector<BoundReport> eval_repeatable_commutation(const MeasurementScheme& m, const AdditiveQuantity& q,
                                                     const Tolerance& tol) {
    ConservationStatus s = status_of(m, q, tol);
    Instrument inst = measure::scheme_to_instrument(m);
    Observable e = inst.induced();
    measure::RepeatabilityReport rep = measure::repeatability_report(inst, std::nullopt, tol);
    std::vector<BoundReport> out;
    if (!rep.repeatable) return out;
    Mat px = Mat::Zero(m.sys_dim, m.sys_dim);
    for (const auto& ex : e.effects) px += opcore::eigenspace_projector(ex, 1.0, tol);
    Mat compressed = px * q.n_sys * px;
    for (size_t x = 0; x < e.size(); ++x)
        out.push_back(make_report("repeatable_compressed_commutation", e.outcomes[x],
                                  op_norm(commutator(e.effects[x], compressed)), 0.0, tol,
                                  violated(Gate::Average, s), s.note));
    return out;
}

}  // namespace waylab::bounds
