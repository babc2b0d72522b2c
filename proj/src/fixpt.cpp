#include "waylab/fixpt.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace waylab::fixpt {

using cpmaps::apply;
using cpmaps::apply_dual;
using measure::Check;
using opcore::commutator;
using opcore::op_norm;

namespace {

struct Spectral {
    double value;
    Mat proj;
};

// Spectral projections of a Hermitian operator, eigenvalues merged when closer than gap.
std::vector<Spectral> spectral_projections(const Mat& h, double gap) {
    opcore::Eigh e = opcore::eigh(h);
    std::vector<Spectral> out;
    const Eigen::Index n = e.values.size();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && e.values(end) - e.values(end - 1) <= gap) ++end;
        Mat v = e.vectors.middleCols(start, end - start);
        out.push_back({e.values.segment(start, end - start).mean(), v * v.adjoint()});
        start = end;
    }
    return out;
}

// Column groups of an orthonormal basis, split until every operator is scalar on each group.
std::vector<Mat> joint_blocks(const std::vector<Mat>& family, int dim, double gap, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat c = Mat::Zero(dim, dim);
    for (const auto& a : family) c += g(rng) * opcore::hermitian_part(a);
    opcore::Eigh e = opcore::eigh(c);

    std::deque<Mat> work;
    Eigen::Index start = 0;
    const Eigen::Index n = e.values.size();
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && e.values(end) - e.values(end - 1) <= gap) ++end;
        work.push_back(e.vectors.middleCols(start, end - start));
        start = end;
    }

    std::vector<Mat> done;
    while (!work.empty()) {
        Mat b = work.front();
        work.pop_front();
        bool split = false;
        for (const auto& a : family) {
            Mat r = opcore::hermitian_part(b.adjoint() * a * b);
            double mean = r.trace().real() / double(r.rows());
            if (op_norm(r - mean * Mat::Identity(r.rows(), r.cols())) <= gap) continue;
            opcore::Eigh re = opcore::eigh(r);
            Eigen::Index s = 0;
            const Eigen::Index k = re.values.size();
            while (s < k) {
                Eigen::Index t = s + 1;
                while (t < k && re.values(t) - re.values(t - 1) <= gap) ++t;
                work.push_back(b * re.vectors.middleCols(s, t - s));
                s = t;
            }
            split = true;
            break;
        }
        if (!split) done.push_back(b);
    }
    return done;
}

bool is_scalar(const Mat& a, double tol) {
    double mean = a.trace().real() / double(a.rows());
    return op_norm(a - mean * Mat::Identity(a.rows(), a.cols())) <= tol;
}

}  // namespace

std::vector<Mat> hermitian_span(const std::vector<Mat>& ops, double threshold) {
    if (ops.empty()) return {};
    const Eigen::Index rows = ops.front().rows(), cols = ops.front().cols();
    const Eigen::Index n = rows * cols;
    Eigen::MatrixXd real(2 * n, 2 * Eigen::Index(ops.size()));
    const cplx i(0.0, 1.0);
    for (size_t k = 0; k < ops.size(); ++k) {
        Mat h1 = 0.5 * (ops[k] + ops[k].adjoint());
        Mat h2 = (ops[k] - ops[k].adjoint()) / (2.0 * i);
        for (int part = 0; part < 2; ++part) {
            Vec v = opcore::vec(part == 0 ? h1 : h2);
            Eigen::Index col = 2 * Eigen::Index(k) + part;
            real.col(col).head(n) = v.real();
            real.col(col).tail(n) = v.imag();
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(real, Eigen::ComputeThinU);
    const Eigen::VectorXd& s = svd.singularValues();
    std::vector<Mat> out;
    if (s.size() == 0 || s(0) <= threshold) return out;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) <= threshold * std::max(1.0, s(0))) break;
        Eigen::VectorXd u = svd.matrixU().col(k);
        Vec c(n);
        for (Eigen::Index j = 0; j < n; ++j) c(j) = cplx(u(j), u(n + j));
        out.push_back(opcore::hermitian_part(opcore::unvec(c, int(rows), int(cols))));
    }
    return out;
}

double span_residual(const std::vector<Mat>& basis, const Mat& op) {
    Mat r = op;
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) r -= (b.adjoint() * r).trace() * b;
    return r.norm();
}

double subspace_distance(const std::vector<Mat>& a, const std::vector<Mat>& b) {
    double d = 0.0;
    for (const auto& x : a) d = std::max(d, span_residual(b, x));
    for (const auto& x : b) d = std::max(d, span_residual(a, x));
    return d;
}

std::vector<Mat> kraus_commutant(const OperationMap& phi, const Tolerance& tol) {
    const int d = phi.in_dim;
    if (phi.out_dim != d) throw InputError("kraus_commutant: map must be square");
    const Mat id = opcore::identity(d);
    const Eigen::Index d2 = Eigen::Index(d) * d;
    Mat sys(2 * Eigen::Index(phi.kraus.size()) * d2, d2);
    Eigen::Index row = 0;
    for (const auto& k : phi.kraus) {
        for (const Mat& op : {Mat(k), Mat(k.adjoint())}) {
            sys.middleRows(row, d2) = opcore::tensor(id, op) - opcore::tensor(op.transpose(), id);
            row += d2;
        }
    }
    Mat ns = opcore::null_space(sys, tol.rank_tol);
    std::vector<Mat> ops;
    for (Eigen::Index j = 0; j < ns.cols(); ++j) ops.push_back(opcore::unvec(ns.col(j), d, d));
    return hermitian_span(ops, tol.rank_tol);
}

FixedPointAnalysis analyze_fixed_points(const OperationMap& phi, const Tolerance& tol) {
    if (phi.in_dim != phi.out_dim) throw InputError("analyze_fixed_points: map must be square");
    if (!cpmaps::is_channel(phi, tol)) throw InputError("analyze_fixed_points: map is not a channel");
    const int d = phi.in_dim;
    const Eigen::Index d2 = Eigen::Index(d) * d;

    FixedPointAnalysis a;
    a.dim = d;
    Mat m = cpmaps::to_supermatrix(phi);
    Mat shifted = m - Mat::Identity(d2, d2);
    Mat r = opcore::null_space(shifted, tol.rank_tol);
    Mat l = opcore::null_space(shifted.adjoint(), tol.rank_tol).adjoint();
    if (r.cols() != l.rows())
        throw InputError("analyze_fixed_points: left and right fixed spaces differ in dimension (" +
                         std::to_string(r.cols()) + " vs " + std::to_string(l.rows()) + ")");
    Mat lr = l * r;
    a.projector = r * lr.inverse() * l;
    a.idempotence_defect = op_norm(a.projector * a.projector - a.projector);
    a.invariance_defect = op_norm(m * a.projector - a.projector);

    std::vector<Mat> raw;
    for (Eigen::Index j = 0; j < r.cols(); ++j) raw.push_back(opcore::unvec(r.col(j), d, d));
    a.basis = hermitian_span(raw, tol.rank_tol);
    if (a.basis.size() != size_t(r.cols()))
        throw InputError("analyze_fixed_points: fixed-point space is not closed under adjoints");

    a.rho0 = opcore::hermitian_part(average(a, opcore::identity(d) / double(d)));
    a.support_iso = opcore::support_isometry(a.rho0, tol);
    a.support_p = a.support_iso * a.support_iso.adjoint();
    a.faithful = a.support_iso.cols() == d;

    std::vector<Mat> compressed;
    for (const auto& b : a.basis) compressed.push_back(a.support_iso.adjoint() * b * a.support_iso);
    a.restricted_basis = hermitian_span(compressed, tol.rank_tol);

    for (const auto& x : a.restricted_basis)
        for (const auto& y : a.restricted_basis)
            a.algebra_defect = std::max(a.algebra_defect, span_residual(a.restricted_basis, x * y));
    a.algebra_certified = a.algebra_defect <= tol.eq_tol;

    if (a.faithful) {
        double full = 0.0;
        for (const auto& x : a.basis)
            for (const auto& y : a.basis) full = std::max(full, span_residual(a.basis, x * y));
        a.full_algebra_certified = full <= tol.eq_tol;
        a.commutant_checked = true;
        a.commutant_defect = subspace_distance(a.basis, kraus_commutant(phi, tol));
        a.commutant_agrees = a.commutant_defect <= tol.rank_tol;
    }
    return a;
}

Mat average_dual(const FixedPointAnalysis& a, const Mat& op) {
    return opcore::unvec(a.projector * opcore::vec(op), a.dim, a.dim);
}

Mat average(const FixedPointAnalysis& a, const Mat& state) {
    // tr[A Phi_av(t)] = tr[Phi*_av(A) t]
    Vec v = a.projector.transpose() * opcore::vec(state.transpose());
    return opcore::unvec(v, a.dim, a.dim).transpose();
}

OperationMap compressed_channel(const FixedPointAnalysis& a, const OperationMap& phi) {
    std::vector<Mat> ks;
    for (const auto& k : phi.kraus) ks.push_back(a.support_iso.adjoint() * k * a.support_iso);
    return OperationMap::from_kraus(std::move(ks));
}

std::vector<Check> check_support_projection(const FixedPointAnalysis& a, const OperationMap& phi, const Tolerance& tol) {
    const int d = a.dim;
    const Mat id = opcore::identity(d);
    const Mat& p = a.support_p;
    std::vector<Check> out;
    auto add = [&](std::string name, double def, bool pass) { out.push_back({std::move(name), def, pass, true}); };

    double d1 = std::max(op_norm(average_dual(a, p) - id), op_norm(average_dual(a, id - p)));
    add("i_support_maps_to_identity", d1, d1 <= tol.eq_tol);

    double d2 = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Mat e = opcore::matrix_unit(d, i, j);
            d2 = std::max(d2, op_norm(average_dual(a, e) - average_dual(a, p * e * p)));
        }
    add("ii_compression_invariance", d2, d2 <= tol.eq_tol);

    // Minimality: rho0 is faithful on the support, so no smaller projection is sent to 1.
    RVec ev = opcore::eigh(a.support_iso.adjoint() * a.rho0 * a.support_iso).values;
    double min_support = ev.size() ? ev.minCoeff() : 0.0;
    add("iii_support_eigenvalue_margin", min_support, min_support > tol.rank_tol);
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < a.support_iso.cols(); ++k) {
        Mat q = p - opcore::projector(a.support_iso.col(k));
        margin = std::min(margin, op_norm(average_dual(a, q) - id));
    }
    if (!std::isfinite(margin)) margin = 0.0;
    add("iv_minimality_margin", margin, margin > tol.eq_tol);

    Mat diff = apply_dual(phi, p) - p;
    double d5 = std::max(0.0, -opcore::min_eigenvalue(diff));
    add("v_dual_dominates_support", d5, d5 <= tol.eq_tol);
    return out;
}

std::vector<Check> check_restriction(const FixedPointAnalysis& a, const OperationMap& phi, const Tolerance& tol) {
    std::vector<Check> out;
    const Mat& v = a.support_iso;
    const int r = int(v.cols());

    double inv = 0.0;
    std::vector<Mat> lifted;
    for (const auto& b : a.restricted_basis) {
        Mat g = average_dual(a, v * b * v.adjoint());
        lifted.push_back(g);
        inv = std::max(inv, op_norm(v.adjoint() * g * v - b));
    }
    out.push_back({"compression_inverts_average", inv, inv <= tol.eq_tol, true});
    double rank_gap = std::abs(double(hermitian_span(lifted, tol.rank_tol).size()) - double(a.basis.size()));
    out.push_back({"average_lift_rank_gap", rank_gap, rank_gap == 0.0, true});
    double onto = 0.0;
    for (const auto& g : lifted) onto = std::max(onto, span_residual(a.basis, g));
    out.push_back({"average_lift_in_fixed_points", onto, onto <= tol.eq_tol, true});

    OperationMap cphi = compressed_channel(a, phi);
    Mat cm = cpmaps::to_supermatrix(cphi);
    Mat ns = opcore::null_space(cm - Mat::Identity(cm.rows(), cm.cols()), tol.rank_tol);
    std::vector<Mat> fp;
    for (Eigen::Index j = 0; j < ns.cols(); ++j) fp.push_back(opcore::unvec(ns.col(j), r, r));
    double d1 = subspace_distance(a.restricted_basis, hermitian_span(fp, tol.rank_tol));
    out.push_back({"compressed_fixed_points_match", d1, d1 <= tol.rank_tol, true});

    std::vector<Mat> range;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            range.push_back(v.adjoint() * average_dual(a, v * opcore::matrix_unit(r, i, j) * v.adjoint()) * v);
    double d2 = subspace_distance(a.restricted_basis, hermitian_span(range, tol.rank_tol));
    out.push_back({"compressed_average_range_match", d2, d2 <= tol.rank_tol, true});
    return out;
}

StructuralReport structural_necessary_conditions(const MeasurementScheme& m, const Observable& f,
                                                 const AdditiveQuantity& q, const Tolerance& tol) {
    Instrument inst = measure::scheme_to_instrument(m);
    Observable e = inst.induced();
    OperationMap tot = inst.total();
    const int d = inst.dim;
    if (f.dim != d || q.n_sys.rows() != d) throw InputError("structural conditions: dimension mismatch");

    StructuralReport rep;
    rep.hypothesis_violated = !conserve::check_conservation(m.coupling, q.composite(), tol).average_holds;
    FixedPointAnalysis a = analyze_fixed_points(tot, tol);
    const Mat& v = a.support_iso;
    rep.support_rank = int(v.cols());
    OperationMap cphi = compressed_channel(a, tot);

    DisturbanceProfile dp = bounds::disturbance_profile(inst, f);
    measure::RepeatabilityReport rr = measure::repeatability_report(inst, std::nullopt, tol);
    rep.non_disturbed = dp.global <= tol.eq_tol;
    rep.first_kind = rr.first_kind;
    rep.repeatable = rr.repeatable;

    auto compress = [&](const Mat& x) -> Mat { return v.adjoint() * x * v; };
    auto add = [&](std::string name, double def, bool applicable) {
        rep.items.push_back({std::move(name), def, def <= tol.eq_tol, applicable});
    };

    // Same conditions on a given subspace (v_ = support isometry or identity).
    auto evaluate = [&](const std::string& prefix, auto&& comp, auto&& dual) {
        Mat ns = comp(q.n_sys);
        Mat delta = dual(ns) - ns;
        double c_fe = 0, c_fd = 0, c_ee = 0, c_en = 0, sharp = 0;
        for (const auto& fy : f.effects) {
            Mat cf = comp(fy);
            c_fd = std::max(c_fd, op_norm(commutator(cf, delta)));
            for (const auto& ex : e.effects) c_fe = std::max(c_fe, op_norm(commutator(cf, comp(ex))));
        }
        for (size_t x = 0; x < e.size(); ++x) {
            Mat cx = comp(e.effects[x]);
            c_en = std::max(c_en, op_norm(commutator(cx, ns)));
            sharp = std::max(sharp, op_norm(cx * cx - cx));
            for (size_t y = x + 1; y < e.size(); ++y)
                c_ee = std::max(c_ee, op_norm(commutator(cx, comp(e.effects[y]))));
        }
        add(prefix + "nondisturbed_commutes_with_effects", c_fe, rep.non_disturbed);
        add(prefix + "nondisturbed_commutes_with_shift", c_fd, rep.non_disturbed);
        add(prefix + "first_kind_commutative", c_ee, rep.first_kind);
        add(prefix + "first_kind_commutes_with_quantity", c_en, rep.first_kind);
        add(prefix + "repeatable_sharp", sharp, rep.repeatable);
    };

    evaluate("support_", compress, [&](const Mat& x) { return apply_dual(cphi, x); });
    if (d == 2)
        evaluate("qubit_", [](const Mat& x) { return x; }, [&](const Mat& x) { return apply_dual(tot, x); });

    bool luders = e.is_commutative(tol);
    if (luders) {
        Instrument li = measure::luders_instrument(e, tol);
        for (size_t x = 0; x < e.size() && luders; ++x)
            for (int i = 0; i < d && luders; ++i)
                for (int j = 0; j < d && luders; ++j) {
                    Mat u = opcore::matrix_unit(d, i, j);
                    luders = op_norm(cpmaps::apply(li.operations[x], u) - cpmaps::apply(inst.operations[x], u)) <= tol.eq_tol;
                }
    }
    double cen = 0.0;
    for (const auto& ex : e.effects) cen = std::max(cen, op_norm(commutator(ex, q.n_sys)));
    add("luders_commutative_commutes_with_quantity", cen, luders);
    return rep;
}

NormOneResult nondisturbed_norm1_observable(const OperationMap& phi, const Observable& f, const Tolerance& tol) {
    if (f.is_trivial(tol)) throw InputError("norm-1 construction: observable is trivial");
    for (size_t y = 0; y < f.size(); ++y)
        if (op_norm(apply_dual(phi, f.effects[y]) - f.effects[y]) > tol.eq_tol)
            throw InputError("norm-1 construction: effect '" + f.outcomes[y] + "' is disturbed");

    FixedPointAnalysis a = analyze_fixed_points(phi, tol);
    const Mat& v = a.support_iso;
    const int r = int(v.cols());

    std::vector<Mat> rs{Mat::Identity(r, r)};
    bool seeded = false;
    for (const auto& fy : f.effects) {
        Mat c = opcore::hermitian_part(v.adjoint() * fy * v);
        if (is_scalar(c, tol.rank_tol)) continue;
        std::vector<Spectral> sp = spectral_projections(c, tol.rank_tol);
        if (seeded) {
            bool commute = true;
            for (const auto& s : sp)
                for (const auto& rz : rs)
                    if (op_norm(commutator(s.proj, rz)) > tol.rank_tol) commute = false;
            if (!commute) continue;
        }
        std::vector<Mat> refined;
        for (const auto& rz : rs)
            for (const auto& s : sp) {
                Mat prod = opcore::hermitian_part(rz * s.proj);
                if (prod.trace().real() > 0.5) refined.push_back(prod);
            }
        rs = std::move(refined);
        seeded = true;
    }
    if (!seeded) throw InputError("norm-1 construction: compressed observable is trivial");

    NormOneResult out;
    out.g.dim = a.dim;
    for (size_t z = 0; z < rs.size(); ++z) {
        Mat lifted = v * rs[z] * v.adjoint();
        out.r.push_back(lifted);
        out.g.outcomes.push_back("z" + std::to_string(z));
        out.g.effects.push_back(opcore::hermitian_part(average_dual(a, lifted)));
        out.states.push_back(lifted / lifted.trace().real());
    }
    for (size_t z = 0; z < rs.size(); ++z) {
        out.fixed_defect = std::max(out.fixed_defect, op_norm(apply_dual(phi, out.g.effects[z]) - out.g.effects[z]));
        Mat image = cpmaps::apply(phi, out.states[z]);
        for (size_t y = 0; y < rs.size(); ++y) {
            double p = (out.g.effects[y] * image).trace().real();
            out.distinguishability_defect = std::max(out.distinguishability_defect, std::abs(p - (y == z ? 1.0 : 0.0)));
        }
    }
    out.sharp = out.g.is_sharp(tol);
    return out;
}

PostProcessing post_processing_decomposition(const Instrument& inst, const Tolerance& tol) {
    Observable e = inst.induced();
    OperationMap tot = inst.total();
    measure::RepeatabilityReport rr = measure::repeatability_report(inst, std::nullopt, tol);
    if (!rr.first_kind)
        throw InputError("post-processing: instrument is not of the first kind (defect " +
                         std::to_string(rr.first_kind_defect) + ")");
    if (e.is_trivial(tol)) throw InputError("post-processing: observable is trivial");

    FixedPointAnalysis a = analyze_fixed_points(tot, tol);
    const Mat& v = a.support_iso;
    const int r = int(v.cols());
    std::vector<Mat> family;
    for (const auto& ex : e.effects) family.push_back(opcore::hermitian_part(v.adjoint() * ex * v));
    for (size_t x = 0; x < family.size(); ++x)
        for (size_t y = x + 1; y < family.size(); ++y) {
            double c = op_norm(commutator(family[x], family[y]));
            if (c > tol.eq_tol)
                throw InputError("post-processing: compressed effects do not commute (defect " + std::to_string(c) + ")");
        }

    std::vector<Mat> blocks = joint_blocks(family, r, tol.rank_tol, 0x9e3779b97f4a7c15ULL);
    struct Column {
        std::vector<double> p;
        Mat proj;
    };
    std::vector<Column> cols;
    for (const auto& b : blocks) {
        Mat proj = b * b.adjoint();
        double tr = double(b.cols());
        Column c{{}, proj};
        for (const auto& fx : family) c.p.push_back((fx * proj).trace().real() / tr);
        bool merged = false;
        for (auto& existing : cols) {
            double diff = 0.0;
            for (size_t x = 0; x < c.p.size(); ++x) diff = std::max(diff, std::abs(existing.p[x] - c.p[x]));
            if (diff <= tol.rank_tol) {
                existing.proj += proj;
                merged = true;
                break;
            }
        }
        if (!merged) cols.push_back(std::move(c));
    }
    std::sort(cols.begin(), cols.end(), [](const Column& l, const Column& r) { return l.p > r.p; });

    PostProcessing out;
    out.g.dim = a.dim;
    out.p = Mat::Zero(Eigen::Index(e.size()), Eigen::Index(cols.size()));
    for (size_t z = 0; z < cols.size(); ++z) {
        out.g.outcomes.push_back("z" + std::to_string(z));
        out.g.effects.push_back(opcore::hermitian_part(average_dual(a, v * cols[z].proj * v.adjoint())));
        for (size_t x = 0; x < e.size(); ++x) out.p(Eigen::Index(x), Eigen::Index(z)) = cols[z].p[x];
    }
    for (size_t x = 0; x < e.size(); ++x) {
        Mat rec = Mat::Zero(a.dim, a.dim);
        for (size_t z = 0; z < cols.size(); ++z) rec += out.p(Eigen::Index(x), Eigen::Index(z)) * out.g.effects[z];
        out.reconstruction_defect = std::max(out.reconstruction_defect, op_norm(rec - e.effects[x]));
    }
    return out;
}

}  // namespace waylab::fixpt
