#include "waylab/measure.hpp"

#include <algorithm>
#include <cmath>

namespace waylab {

using opcore::op_norm;

namespace {

std::vector<std::string> default_labels(size_t n) {
    std::vector<std::string> out;
    for (size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

}  // namespace

void Observable::validate(const Tolerance& tol) const {
    if (dim <= 0) throw InputError("observable dimension must be positive");
    if (effects.empty()) throw InputError("observable has no effects");
    if (outcomes.size() != effects.size())
        throw InputError("observable has " + std::to_string(outcomes.size()) + " labels but " +
                         std::to_string(effects.size()) + " effects");
    Mat s = Mat::Zero(dim, dim);
    for (size_t i = 0; i < effects.size(); ++i) {
        const Mat& e = effects[i];
        if (e.rows() != dim || e.cols() != dim)
            throw InputError("effect '" + outcomes[i] + "' has wrong dimension");
        if (!opcore::is_hermitian(e, tol))
            throw InputError("effect '" + outcomes[i] + "' is not Hermitian");
        opcore::Eigh ev = opcore::eigh(e);
        if (ev.values.minCoeff() < -tol.eq_tol)
            throw InputError("effect '" + outcomes[i] + "' is not PSD (min eigenvalue " +
                             std::to_string(ev.values.minCoeff()) + ")");
        if (ev.values.maxCoeff() > 1.0 + tol.eq_tol)
            throw InputError("effect '" + outcomes[i] + "' exceeds identity (max eigenvalue " +
                             std::to_string(ev.values.maxCoeff()) + ")");
        s += e;
    }
    double def = op_norm(s - opcore::identity(dim));
    if (def > tol.eq_tol)
        throw InputError("effects do not sum to identity (defect " + std::to_string(def) + ")");
}

bool Observable::is_sharp(const Tolerance& tol) const {
    for (size_t i = 0; i < effects.size(); ++i) {
        if (!opcore::is_projection(effects[i], tol)) return false;
        for (size_t j = i + 1; j < effects.size(); ++j)
            if (op_norm(effects[i] * effects[j]) > tol.eq_tol) return false;
    }
    return true;
}

bool Observable::is_commutative(const Tolerance& tol) const {
    for (size_t i = 0; i < effects.size(); ++i)
        for (size_t j = i + 1; j < effects.size(); ++j)
            if (op_norm(opcore::commutator(effects[i], effects[j])) > tol.eq_tol) return false;
    return true;
}

bool Observable::is_norm_one(const Tolerance& tol) const {
    for (const auto& e : effects) {
        double n = op_norm(e);
        if (n > tol.rank_tol && std::abs(n - 1.0) > tol.rank_tol) return false;
    }
    return true;
}

bool Observable::is_rank_one(const Tolerance& tol) const {
    for (const auto& e : effects) {
        RVec ev = opcore::eigh(e).values;
        if ((ev.array() > tol.rank_tol).count() > 1) return false;
    }
    return true;
}

bool Observable::is_trivial(const Tolerance& tol) const {
    for (const auto& e : effects) {
        cplx t = e.trace() / double(dim);
        if (op_norm(e - t * opcore::identity(dim)) > tol.eq_tol) return false;
    }
    return true;
}

Observable make_observable(std::vector<Mat> effects) {
    Observable o;
    o.dim = effects.empty() ? 0 : int(effects.front().rows());
    o.outcomes = default_labels(effects.size());
    o.effects = std::move(effects);
    return o;
}

void Instrument::validate(const Tolerance& tol) const {
    if (operations.empty()) throw InputError("instrument has no operations");
    if (outcomes.size() != operations.size())
        throw InputError("instrument labels and operations differ in number");
    for (size_t i = 0; i < operations.size(); ++i)
        if (operations[i].in_dim != dim || operations[i].out_dim != dim)
            throw InputError("operation '" + outcomes[i] + "' has wrong dimension");
    double def = cpmaps::trace_defect(total());
    if (def > tol.eq_tol)
        throw InputError("instrument operations do not sum to a channel (defect " +
                         std::to_string(def) + ")");
}

OperationMap Instrument::total() const { return cpmaps::sum(operations); }

Observable Instrument::induced() const {
    Observable o;
    o.dim = dim;
    o.outcomes = outcomes;
    for (const auto& op : operations) o.effects.push_back(cpmaps::apply_dual(op, opcore::identity(dim)));
    return o;
}

void MeasurementScheme::validate(const Tolerance& tol) const {
    if (sys_dim <= 0 || app_dim <= 0) throw InputError("scheme dimensions must be positive");
    if (xi.rows() != app_dim || xi.cols() != app_dim)
        throw InputError("apparatus state has wrong dimension");
    if (!opcore::is_state(xi, tol)) throw InputError("apparatus state xi is not a state");
    if (coupling.in_dim != sys_dim * app_dim || coupling.out_dim != sys_dim * app_dim)
        throw InputError("coupling does not act on the composite space");
    double def = cpmaps::trace_defect(coupling);
    if (def > tol.eq_tol)
        throw InputError("coupling is not a channel (defect " + std::to_string(def) + ")");
    if (pointer.dim != app_dim) throw InputError("pointer observable has wrong dimension");
    pointer.validate(tol);
}

namespace measure {

Instrument luders_instrument(const Observable& e, const Tolerance& tol) {
    Instrument inst;
    inst.dim = e.dim;
    inst.outcomes = e.outcomes;
    for (const auto& eff : e.effects)
        inst.operations.push_back(OperationMap::from_kraus({opcore::psd_sqrt(eff, tol)}));
    return inst;
}

namespace {

// S -> S (x) A, t -> t (x) xi, with xi purified by its eigendecomposition.
OperationMap embedding(const MeasurementScheme& m) {
    opcore::Eigh e = opcore::eigh(m.xi);
    std::vector<Mat> ks;
    for (Eigen::Index i = e.values.size() - 1; i >= 0; --i) {
        if (e.values(i) <= 1e-15) continue;
        Mat col = std::sqrt(e.values(i)) * e.vectors.col(i);
        ks.push_back(opcore::tensor(opcore::identity(m.sys_dim), col));
    }
    return OperationMap::from_kraus(std::move(ks));
}

// S (x) A -> A, partial trace over the system.
OperationMap trace_system(int dS, int dA) {
    std::vector<Mat> ks;
    for (int s = 0; s < dS; ++s)
        ks.push_back(opcore::tensor(opcore::basis_ket(dS, s).transpose(), opcore::identity(dA)));
    return OperationMap::from_kraus(std::move(ks));
}

// S (x) A -> S, t -> tr_A[(1 (x) Z) t] with Z = root * root.
OperationMap pointer_readout(int dS, int dA, const Mat& root) {
    std::vector<Mat> ks;
    for (int a = 0; a < dA; ++a)
        ks.push_back(opcore::tensor(opcore::identity(dS), opcore::basis_ket(dA, a).transpose() * root));
    return OperationMap::from_kraus(std::move(ks));
}

}  // namespace

RestrictionMaps restriction_maps(const MeasurementScheme& m) {
    OperationMap emb = embedding(m);
    OperationMap ge = cpmaps::compose(m.coupling, emb);
    return {emb, ge, cpmaps::compose(trace_system(m.sys_dim, m.app_dim), ge)};
}

Instrument scheme_to_instrument(const MeasurementScheme& m) {
    OperationMap ge = cpmaps::compose(m.coupling, embedding(m));
    Instrument inst;
    inst.dim = m.sys_dim;
    inst.outcomes = m.pointer.outcomes;
    for (const auto& z : m.pointer.effects)
        inst.operations.push_back(
            cpmaps::compose(pointer_readout(m.sys_dim, m.app_dim, opcore::psd_sqrt(z)), ge));
    return inst;
}

Observable measured_observable(const MeasurementScheme& m) {
    OperationMap ge = cpmaps::compose(m.coupling, embedding(m));
    Observable o;
    o.dim = m.sys_dim;
    o.outcomes = m.pointer.outcomes;
    for (const auto& z : m.pointer.effects)
        o.effects.push_back(cpmaps::apply_dual(ge, opcore::tensor(opcore::identity(m.sys_dim), z)));
    return o;
}

Observable heisenberg_pointer(const MeasurementScheme& m) {
    Observable o;
    o.dim = m.sys_dim * m.app_dim;
    o.outcomes = m.pointer.outcomes;
    for (const auto& z : m.pointer.effects)
        o.effects.push_back(cpmaps::apply_dual(m.coupling, opcore::tensor(opcore::identity(m.sys_dim), z)));
    return o;
}

Mat complete_isometry(const Mat& v, int stride, const Tolerance& tol) {
    const Eigen::Index n = v.rows();
    if (v.cols() * stride > n) throw InputError("complete_isometry: columns do not fit");
    Mat u = Mat::Zero(n, n);
    std::vector<bool> used(size_t(n), false);
    std::vector<Vec> basis;
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        u.col(k * stride) = v.col(k);
        used[size_t(k * stride)] = true;
        basis.push_back(v.col(k));
    }
    Eigen::Index slot = 0;
    for (Eigen::Index j = 0; j < n && Eigen::Index(basis.size()) < n; ++j) {
        Vec w = opcore::basis_ket(int(n), int(j));
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) w -= b.dot(w) * b;
        double nw = w.norm();
        if (nw <= tol.rank_tol) continue;
        w /= nw;
        while (used[size_t(slot)]) ++slot;
        u.col(slot) = w;
        used[size_t(slot)] = true;
        basis.push_back(w);
    }
    return u;
}

MeasurementScheme instrument_dilation(const Instrument& inst, const Tolerance& tol) {
    const int dS = inst.dim;
    std::vector<const Mat*> flat;
    std::vector<size_t> owner;
    for (size_t x = 0; x < inst.operations.size(); ++x)
        for (const auto& k : inst.operations[x].kraus) {
            flat.push_back(&k);
            owner.push_back(x);
        }
    const int n = int(flat.size());
    Mat v = Mat::Zero(dS * n, dS);
    for (int j = 0; j < n; ++j) v += opcore::tensor(*flat[size_t(j)], opcore::basis_ket(n, j));
    double iso = op_norm(v.adjoint() * v - opcore::identity(dS));
    if (iso > tol.eq_tol)
        throw InputError("instrument_dilation: instrument is not trace preserving (defect " +
                         std::to_string(iso) + ")");

    MeasurementScheme m;
    m.sys_dim = dS;
    m.app_dim = n;
    m.xi = opcore::projector(opcore::basis_ket(n, 0));
    m.coupling = OperationMap::unitary(complete_isometry(v, n, tol));
    m.pointer.dim = n;
    m.pointer.outcomes = inst.outcomes;
    m.pointer.effects.assign(inst.operations.size(), Mat::Zero(n, n));
    for (int j = 0; j < n; ++j) m.pointer.effects[owner[size_t(j)]](j, j) = 1.0;
    return m;
}

MeasurementScheme normal_dilation(const Observable& e, const Tolerance& tol) {
    return instrument_dilation(luders_instrument(e, tol), tol);
}

Instrument rank1_collapse(const Observable& e, const std::vector<Vec>& vectors,
                          const Tolerance& tol) {
    if (!vectors.empty() && vectors.size() != e.size())
        throw InputError("rank1_collapse: need one vector per outcome");
    Instrument inst;
    inst.dim = e.dim;
    inst.outcomes = e.outcomes;
    for (size_t x = 0; x < e.size(); ++x) {
        opcore::Eigh ev = opcore::eigh(e.effects[x]);
        Vec psi;
        if (!vectors.empty()) {
            psi = vectors[x];
            if (std::abs(psi.norm() - 1.0) > tol.eq_tol)
                throw InputError("rank1_collapse: vector for '" + e.outcomes[x] + "' is not a unit vector");
        } else {
            psi = ev.vectors.col(ev.values.size() - 1);
        }
        std::vector<Mat> ks;
        for (Eigen::Index k = 0; k < ev.values.size(); ++k)
            if (ev.values(k) > 1e-15)
                ks.push_back(std::sqrt(ev.values(k)) * psi * ev.vectors.col(k).adjoint());
        if (ks.empty()) ks.push_back(Mat::Zero(e.dim, e.dim));
        inst.operations.push_back(OperationMap::from_kraus(std::move(ks)));
    }
    return inst;
}

bool RepeatabilityReport::all_applicable_pass() const {
    return std::all_of(items.begin(), items.end(),
                       [](const Check& c) { return !c.applicable || c.pass; });
}

const Check* RepeatabilityReport::find(const std::string& name) const {
    for (const auto& c : items)
        if (c.name == name) return &c;
    return nullptr;
}

RepeatabilityReport repeatability_report(const Instrument& inst,
                                         const std::optional<MeasurementScheme>& m,
                                         const Tolerance& tol) {
    using cpmaps::apply;
    using cpmaps::apply_dual;
    const int d = inst.dim;
    const size_t nx = inst.operations.size();
    Observable e = inst.induced();
    OperationMap tot = inst.total();

    std::optional<RestrictionMaps> rm;
    if (m) {
        if (m->sys_dim != d || m->pointer.size() != nx)
            throw InputError("repeatability_report: scheme does not match instrument");
        Instrument si = scheme_to_instrument(*m);
        for (size_t x = 0; x < nx; ++x)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Mat a = opcore::matrix_unit(d, i, j);
                    if (op_norm(cpmaps::apply(si.operations[x], a) - cpmaps::apply(inst.operations[x], a)) > tol.eq_tol)
                        throw InputError("repeatability_report: scheme does not implement instrument");
                }
        rm = restriction_maps(*m);
    }

    RepeatabilityReport r;
    // sum_x I*_x(1 - E(x)) is the probability that an immediate repetition disagrees.
    Mat mismatch = Mat::Zero(d, d);
    for (size_t x = 0; x < nx; ++x) {
        mismatch += e.effects[x] - apply_dual(inst.operations[x], e.effects[x]);
        r.first_kind_defect =
            std::max(r.first_kind_defect, op_norm(apply_dual(tot, e.effects[x]) - e.effects[x]));
    }
    r.repeatability_defect = op_norm(mismatch);
    r.repeatable = r.repeatability_defect <= tol.eq_tol;
    r.first_kind = r.first_kind_defect <= tol.eq_tol;
    r.sharp = e.is_sharp(tol);
    r.sharp_equivalence_disagreement = r.sharp && (r.repeatable != r.first_kind);

    const bool app = r.repeatable;
    auto add = [&](std::string name, double defect, bool applicable, double thresh) {
        r.items.push_back({std::move(name), defect, defect <= thresh, applicable});
    };

    std::vector<Mat> basis;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) basis.push_back(opcore::matrix_unit(d, i, j));

    std::vector<Mat> P(nx);
    for (size_t x = 0; x < nx; ++x) P[x] = opcore::eigenspace_projector(e.effects[x], 1.0, tol);

    double d1 = 0, d2 = 0, d6 = 0;
    for (size_t x = 0; x < nx; ++x) {
        const Mat& ex = e.effects[x];
        const OperationMap& op = inst.operations[x];
        for (const auto& a : basis) {
            Mat ia = apply_dual(op, a);
            d1 = std::max({d1, op_norm(ia - apply_dual(op, ex * a)), op_norm(ia - apply_dual(op, a * ex)),
                           op_norm(ia - apply_dual(op, ex * a * ex))});
            d2 = std::max(d2, op_norm(apply_dual(tot, ex * a) - ia));
            d6 = std::max(d6, op_norm(ia - apply_dual(op, P[x] * a * P[x])));
        }
    }
    add("i_effect_absorption", d1, app, tol.eq_tol);
    add("ii_total_absorption", d2, app, tol.eq_tol);

    double d4 = 0;
    for (size_t x = 0; x < nx; ++x)
        if (op_norm(e.effects[x]) > tol.rank_tol)
            d4 = std::max(d4, std::abs(1.0 - opcore::max_eigenvalue(e.effects[x])));
    double d5 = 0;
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < nx; ++y)
            d5 = std::max(d5, op_norm(P[x] * e.effects[y] - (x == y ? P[x] : Mat::Zero(d, d))));

    if (rm) {
        const int dA = m->app_dim;
        const Mat is = opcore::identity(d), ia = opcore::identity(dA);
        double d3 = 0;
        for (size_t x = 0; x < nx; ++x) {
            Mat en = is, zn = ia;
            for (int n = 1; n <= 3; ++n) {
                en = en * e.effects[x];
                zn = zn * m->pointer.effects[x];
                d3 = std::max({d3, op_norm(e.effects[x] - apply_dual(rm->gamma_e, opcore::tensor(en, ia))),
                               op_norm(e.effects[x] - apply_dual(rm->gamma_e, opcore::tensor(is, zn)))});
            }
        }
        add("iii_power_restriction", d3, app, tol.eq_tol);

        std::vector<Mat> Q(nx);
        Mat qsum = Mat::Zero(dA, dA);
        for (size_t x = 0; x < nx; ++x) {
            Q[x] = opcore::eigenspace_projector(m->pointer.effects[x], 1.0, tol);
            qsum += Q[x];
            if (op_norm(m->pointer.effects[x]) > tol.rank_tol)
                d4 = std::max(d4, std::abs(1.0 - opcore::max_eigenvalue(m->pointer.effects[x])));
        }
        add("iv_unit_eigenspaces", d4, app, tol.rank_tol);
        for (size_t x = 0; x < nx; ++x)
            for (size_t y = 0; y < nx; ++y)
                d5 = std::max(d5, op_norm(Q[x] * m->pointer.effects[y] - (x == y ? Q[x] : Mat::Zero(dA, dA))));
        add("v_projector_orthogonality", d5, app, tol.eq_tol);
        add("vi_projector_absorption", d6, app, tol.eq_tol);

        double d7 = 0;
        for (int i = 0; i < dA; ++i)
            for (int j = 0; j < dA; ++j) {
                Mat a = opcore::matrix_unit(dA, i, j);
                d7 = std::max(d7, op_norm(apply_dual(rm->lambda, a) - apply_dual(rm->lambda, qsum * a * qsum)));
            }
        add("vii_conjugate_absorption", d7, app, tol.eq_tol);

        double d8 = 0;
        for (size_t x = 0; x < nx; ++x)
            for (const auto& a : basis)
                d8 = std::max(d8, op_norm(apply_dual(inst.operations[x], a) -
                                          apply_dual(rm->gamma_e, opcore::tensor(a, Q[x]))));
        add("viii_pointer_restriction", d8, app, tol.eq_tol);
    } else {
        add("iv_unit_eigenspaces", d4, app, tol.rank_tol);
        add("v_projector_orthogonality", d5, app, tol.eq_tol);
        add("vi_projector_absorption", d6, app, tol.eq_tol);
    }

    std::vector<Mat> probes{opcore::identity(d) / double(d)};
    for (int i = 0; i < d; ++i) probes.push_back(opcore::matrix_unit(d, i, i));
    double dor = 0;
    for (const auto& rho : probes) {
        std::vector<Mat> outs;
        for (const auto& op : inst.operations) outs.push_back(cpmaps::apply(op, rho));
        for (size_t x = 0; x < nx; ++x)
            for (size_t y = 0; y < nx; ++y)
                if (x != y) dor = std::max(dor, op_norm(outs[x] * outs[y]));
    }
    add("output_orthogonality", dor, app, tol.eq_tol);
    return r;
}

}  // namespace measure
}  // namespace waylab
