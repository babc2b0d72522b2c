#include "waylab/suite.hpp"

#include <algorithm>
#include <cmath>

namespace waylab::suite {

using opcore::op_norm;

Observable sharp_qubit() {
    return make_observable({opcore::projector(opcore::basis_ket(2, 0)), opcore::projector(opcore::basis_ket(2, 1))});
}

Observable b_lambda(double lambda) {
    Vec plus(2), minus(2);
    plus << 1.0, 1.0;
    minus << 1.0, -1.0;
    const Mat mix = 0.5 * (1.0 - lambda) * opcore::identity(2);
    Observable b;
    b.dim = 2;
    b.outcomes = {"+", "-"};
    b.effects = {lambda * opcore::projector(plus / std::sqrt(2.0)) + mix,
                 lambda * opcore::projector(minus / std::sqrt(2.0)) + mix};
    return b;
}

Mat qutrit_quantity() {
    Mat n = Mat::Zero(3, 3);
    n(0, 0) = 1.0;
    n(2, 2) = -1.0;
    return n;
}

OperationMap qutrit_channel() {
    const double r = 1.0 / std::sqrt(2.0);
    return OperationMap::from_kraus({opcore::matrix_unit(3, 0, 0), opcore::matrix_unit(3, 2, 2),
                                     r * opcore::matrix_unit(3, 0, 1), r * opcore::matrix_unit(3, 2, 1)});
}

namespace {

int pick(random::Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Mat integer_spectrum(random::Rng& rng, int d) {
    Mat diag = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = double(pick(rng, 0, 2));
    Mat u = random::haar_unitary(rng, d);
    return opcore::hermitian_part(u * diag * u.adjoint());
}

Mat conjugate(const Mat& u, const Mat& k) { return u * k * u.adjoint(); }

OperationMap conjugated(const OperationMap& phi, const Mat& u) {
    std::vector<Mat> ks;
    for (const auto& k : phi.kraus) ks.push_back(conjugate(u, k));
    return OperationMap::from_kraus(std::move(ks));
}

// Kraus operators of a random channel C^din -> C^dout.
std::vector<Mat> random_kraus(random::Rng& rng, int din, int dout, int count) {
    Mat v = random::haar_unitary(rng, dout * count).leftCols(din);
    std::vector<Mat> ks;
    for (int k = 0; k < count; ++k) ks.push_back(v.middleRows(k * dout, dout));
    return ks;
}

Mat embed(const Mat& block, int d, int row, int col) {
    Mat out = Mat::Zero(d, d);
    out.block(row, col, block.rows(), block.cols()) = block;
    return out;
}

Mat degenerate_unitary(random::Rng& rng, int d) {
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    Mat diag = Mat::Zero(d, d);
    double shared = ph(rng);
    for (int i = 0; i < d; ++i) diag(i, i) = std::polar(1.0, i % 2 ? shared : ph(rng));
    Mat w = random::haar_unitary(rng, d);
    return conjugate(w, diag);
}

json checks_summary(const std::vector<measure::Check>& items) {
    json out = json::array();
    for (const auto& c : items)
        if (c.applicable && !c.pass) out.push_back({{"name", c.name}, {"defect", c.defect}});
    return out;
}

bool all_pass(const std::vector<measure::Check>& items) {
    return std::all_of(items.begin(), items.end(), [](const measure::Check& c) { return !c.applicable || c.pass; });
}

}  // namespace

OperationMap structured_channel(random::Rng& rng, int d, int kind) {
    switch (kind % 5) {
    case 0:
        return random::random_channel(rng, d, pick(rng, 1, 3));
    case 1:
        return OperationMap::unitary(degenerate_unitary(rng, d));
    case 2: {
        // Everything ends up in a k-dimensional corner.
        int k = pick(rng, 1, d - 1);
        int count = (d + k - 1) / k + 1;
        std::vector<Mat> ks;
        for (const auto& b : random_kraus(rng, d, k, count)) ks.push_back(embed(b, d, 0, 0));
        return conjugated(OperationMap::from_kraus(std::move(ks)), random::haar_unitary(rng, d));
    }
    case 3: {
        int d1 = pick(rng, 1, d - 1), d2 = d - d1;
        std::vector<Mat> ks;
        for (const auto& a : random_kraus(rng, d1, d1, pick(rng, 1, 2))) ks.push_back(embed(a, d, 0, 0));
        for (const auto& b : random_kraus(rng, d2, d2, pick(rng, 1, 2))) ks.push_back(embed(b, d, d1, d1));
        return conjugated(OperationMap::from_kraus(std::move(ks)), random::haar_unitary(rng, d));
    }
    default: {
        // Unitary dynamics on a k-dimensional block; the complement decays into it.
        int k = pick(rng, 1, d - 1), rest = d - k;
        std::vector<Mat> ks{embed(degenerate_unitary(rng, k), d, 0, 0)};
        int count = (rest + k - 1) / k + 1;
        for (const auto& b : random_kraus(rng, rest, k, count)) ks.push_back(embed(b, d, 0, k));
        return conjugated(OperationMap::from_kraus(std::move(ks)), random::haar_unitary(rng, d));
    }
    }
}

OperationMap structured_unital_channel(random::Rng& rng, int d, int kind) {
    switch (kind % 3) {
    case 0:
        return random::random_unital_channel(rng, d, pick(rng, 2, 3));
    case 1:
        return OperationMap::unitary(degenerate_unitary(rng, d));
    default: {
        // Mixture of block-diagonal unitaries: the fixed algebra has a nontrivial center.
        int d1 = pick(rng, 1, d - 1), d2 = d - d1;
        Mat w = random::haar_unitary(rng, d);
        std::vector<Mat> ks;
        const int terms = pick(rng, 2, 3);
        for (int t = 0; t < terms; ++t) {
            Mat u = Mat::Zero(d, d);
            u.topLeftCorner(d1, d1) = random::haar_unitary(rng, d1);
            u.bottomRightCorner(d2, d2) = random::haar_unitary(rng, d2);
            ks.push_back(conjugate(w, u) / std::sqrt(double(terms)));
        }
        return OperationMap::from_kraus(std::move(ks));
    }
    }
}

Instrument leak_instrument(double a, const Mat& u) {
    Instrument inst;
    inst.dim = 3;
    inst.outcomes = {"0", "1"};
    std::vector<Mat> k0 = {opcore::matrix_unit(3, 0, 0), std::sqrt(a) * opcore::matrix_unit(3, 0, 2)};
    std::vector<Mat> k1 = {opcore::matrix_unit(3, 1, 1), std::sqrt(1.0 - a) * opcore::matrix_unit(3, 1, 2)};
    for (auto& k : k0) k = conjugate(u, k);
    for (auto& k : k1) k = conjugate(u, k);
    inst.operations = {OperationMap::from_kraus(k0), OperationMap::from_kraus(k1)};
    return inst;
}

StochasticMix stochastic_mix(random::Rng& rng, int d) {
    StochasticMix out;
    Mat u = random::haar_unitary(rng, d);
    std::vector<Mat> g;
    for (int k = 0; k < d; ++k) g.push_back(opcore::projector(u.col(k)));
    out.g = make_observable(g);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    Eigen::MatrixXd m(d, d);
    do {
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < d; ++i) m(i, j) = w(rng) + (i == j ? 1.0 : 0.0);
            m.col(j) /= m.col(j).sum();
        }
    } while (std::abs(m.determinant()) < 1e-2);
    out.m = m.cast<cplx>();
    std::vector<Mat> f(size_t(d), Mat::Zero(d, d));
    for (int x = 0; x < d; ++x)
        for (int z = 0; z < d; ++z) f[size_t(x)] += m(x, z) * g[size_t(z)];
    out.f = make_observable(f);
    return out;
}

ConservativeScenario conservative_scenario(std::uint64_t seed) {
    random::Rng rng = random::make_rng(seed);
    const int ds = pick(rng, 2, 3), da = pick(rng, 2, 3);
    ConservativeScenario s;
    s.q = {integer_spectrum(rng, ds), integer_spectrum(rng, da)};
    const Mat n = s.q.composite();

    OperationMap coupling;
    if (seed % 3 == 0) {
        std::vector<Mat> ks;
        std::uniform_real_distribution<double> w(0.2, 1.0);
        double a = w(rng), b = w(rng);
        ks.push_back(std::sqrt(a / (a + b)) * random::conservative_unitary(rng, n));
        ks.push_back(std::sqrt(b / (a + b)) * random::conservative_unitary(rng, n));
        coupling = OperationMap::from_kraus(std::move(ks));
    } else {
        coupling = OperationMap::unitary(random::conservative_unitary(rng, n));
    }

    Observable z;
    if (seed % 2 == 0) {
        // Functions of N_A commute with it.
        opcore::Eigh e = opcore::eigh(s.q.n_app);
        std::uniform_real_distribution<double> w(0.0, 1.0);
        Mat z0 = Mat::Zero(da, da);
        for (int i = 0; i < da; ++i) z0 += w(rng) * opcore::projector(e.vectors.col(i));
        z = make_observable({opcore::hermitian_part(z0), opcore::hermitian_part(opcore::identity(da) - z0)});
    } else {
        z = random::random_povm(rng, da, 2);
    }

    s.scheme.sys_dim = ds;
    s.scheme.app_dim = da;
    s.scheme.xi = random::random_state(rng, da, pick(rng, 1, da));
    s.scheme.coupling = coupling;
    s.scheme.pointer = z;
    s.f = random::random_povm(rng, ds, pick(rng, 2, 3));
    s.target = random::random_sharp_observable(rng, ds, 2);
    Mat basis = random::haar_unitary(rng, ds);
    s.psi = basis.col(0);
    s.phi = basis.col(1);
    return s;
}

namespace {

Criterion qubit_family() {
    Criterion c{1, "qubit lambda-family disturbance and tightness", true, json::object()};
    json rows = json::array();
    double worst_error = 0.0, worst_slack = 0.0;
    for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        Observable a = sharp_qubit(), b = b_lambda(lambda);
        double comm = 0.0;
        for (const auto& ea : a.effects)
            for (const auto& eb : b.effects) comm = std::max(comm, std::abs(op_norm(opcore::commutator(ea, eb)) - lambda / 2));
        DisturbanceProfile da = bounds::disturbance_profile(measure::luders_instrument(a), b);
        DisturbanceProfile db = bounds::disturbance_profile(measure::luders_instrument(b), a);
        double dist_b = 0.0, dist_a = 0.0;
        const double want_a = (1.0 - std::sqrt(1.0 - lambda * lambda)) / 2.0;
        for (double v : da.norms) dist_b = std::max(dist_b, std::abs(v - lambda / 2));
        for (double v : db.norms) dist_a = std::max(dist_a, std::abs(v - want_a));
        double slack = 0.0;
        int tight_reports = 0;
        for (const auto& r : bounds::eval_disturbance_bounds(measure::normal_dilation(a), b, std::nullopt, false))
            if (r.bound_id == "disturbance_unsharpness") {
                slack = std::max(slack, std::abs(r.slack));
                ++tight_reports;
            }
        bool ok = comm <= 1e-10 && dist_b <= 1e-10 && dist_a <= 1e-10 && slack <= 1e-9 && tight_reports > 0;
        c.pass = c.pass && ok;
        worst_error = std::max({worst_error, comm, dist_b, dist_a});
        worst_slack = std::max(worst_slack, slack);
        rows.push_back({{"lambda", lambda},
                        {"commutator_error", comm},
                        {"disturbance_of_b_error", dist_b},
                        {"disturbance_of_a_error", dist_a},
                        {"max_abs_slack", slack},
                        {"pass", ok}});
    }
    c.detail["max_error"] = worst_error;
    c.detail["max_abs_slack"] = worst_slack;
    c.detail["cases"] = rows;
    return c;
}

Criterion qutrit_counterexample() {
    Criterion c{2, "qutrit channel conserves on average but not fully", false, json::object()};
    ConservationReport r = conserve::check_conservation(qutrit_channel(), qutrit_quantity());
    c.pass = r.average_defect <= 1e-12 && r.average_holds && !r.full_holds && std::abs(r.full_defect - 1.0) <= 1e-12;
    c.detail = {{"average_defect", r.average_defect}, {"full_defect", r.full_defect}, {"average_holds", r.average_holds},
                {"full_holds", r.full_holds}};
    return c;
}

Criterion unitary_equivalence() {
    Criterion c{3, "conservative unitaries conserve fully; generic ones fail on average", true, json::object()};
    random::Rng rng = random::make_rng(3003);
    double worst_full = 0.0, min_avg = 1e300;
    for (int i = 0; i < 100; ++i) {
        int d = pick(rng, 2, 4);
        Mat n = integer_spectrum(rng, d);
        Mat u = random::conservative_unitary(rng, n);
        worst_full = std::max(worst_full, conserve::check_conservation(OperationMap::unitary(u), n).full_defect);
    }
    for (int i = 0; i < 100; ++i) {
        int d = pick(rng, 2, 4);
        Mat n, u;
        do {
            n = integer_spectrum(rng, d);
            u = random::haar_unitary(rng, d);
        } while (op_norm(opcore::commutator(u, n)) <= 0.1);
        min_avg = std::min(min_avg, conserve::check_conservation(OperationMap::unitary(u), n).average_defect);
    }
    c.pass = worst_full <= 1e-9 && min_avg > 1e-3;
    c.detail = {{"max_full_defect_conservative", worst_full}, {"min_average_defect_generic", min_avg}};
    return c;
}

Criterion bound_suite() {
    Criterion c{4, "bound families hold on 200 conservative scenarios", true, json::object()};
    std::map<std::string, int> evaluated;
    int violations = 0, hypothesis_flagged = 0;
    double min_slack = 1e300;
    json worst = nullptr;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        ConservativeScenario s = conservative_scenario(seed);
        std::vector<BoundReport> all;
        auto add = [&](std::vector<BoundReport> r) { all.insert(all.end(), r.begin(), r.end()); };
        add(bounds::eval_disturbance_bounds(s.scheme, s.f, s.q, false));
        add(bounds::eval_measurability_bounds(s.scheme, s.target, s.q, false));
        add(bounds::eval_way(s.scheme, s.q));
        add(bounds::eval_distinguishability_bounds(s.scheme, s.q, s.psi, s.phi));
        Observable e = measure::measured_observable(s.scheme);
        const Mat& e0 = e.effects[0];
        if (op_norm(e0 - e0.trace() / double(e0.rows()) * opcore::identity(int(e0.rows()))) > 1e-6) {
            auto [p, q] = bounds::extremal_pair(e0);
            add(bounds::eval_distinguishability_bounds(s.scheme, s.q, p, q));
        }
        for (const auto& r : all) {
            if (r.hypothesis_violated) {
                ++hypothesis_flagged;
                continue;
            }
            ++evaluated[r.bound_id];
            if (r.slack < min_slack) {
                min_slack = r.slack;
                worst = {{"seed", seed}, {"bound_id", r.bound_id}, {"outcome", r.outcome}, {"slack", r.slack}};
            }
            if (r.slack < -1e-7) ++violations;
        }
    }
    json counts = json::object();
    for (const auto& [id, n] : evaluated) counts[id] = n;
    c.pass = violations == 0 && !evaluated.empty();
    c.detail = {{"violations", violations},
                {"min_slack", min_slack},
                {"tightest", worst},
                {"hypothesis_flagged", hypothesis_flagged},
                {"evaluated", counts}};
    return c;
}

Criterion qfi_checks() {
    Criterion c{5, "quantum Fisher information identities", true, json::object()};
    random::Rng rng = random::make_rng(5005);
    double pure_err = 0.0, commuting_max = 0.0;
    for (int i = 0; i < 50; ++i) {
        int d = pick(rng, 2, 4);
        Mat n = random::random_hermitian(rng, d);
        Mat rho = opcore::projector(random::random_pure(rng, d));
        pure_err = std::max(pure_err, std::abs(conserve::qfi(n, rho) - 4.0 * conserve::variance(n, rho)));
    }
    for (int i = 0; i < 50; ++i) {
        int d = pick(rng, 2, 4);
        Mat u = random::haar_unitary(rng, d);
        Mat dn = Mat::Zero(d, d), dr = Mat::Zero(d, d);
        std::uniform_real_distribution<double> w(0.0, 1.0);
        double tot = 0.0;
        for (int k = 0; k < d; ++k) {
            dn(k, k) = w(rng) * 4.0 - 2.0;
            dr(k, k) = w(rng);
            tot += dr(k, k).real();
        }
        commuting_max = std::max(commuting_max, conserve::qfi(u * dn * u.adjoint(), u * (dr / tot) * u.adjoint()));
    }
    Mat rho = Mat::Zero(2, 2);
    rho(0, 0) = 0.75;
    rho(1, 1) = 0.25;
    Mat sx = Mat::Zero(2, 2);
    sx(0, 1) = sx(1, 0) = 1.0;
    const double q = conserve::qfi(sx, rho);
    c.pass = pure_err <= 1e-9 && commuting_max <= 1e-9 && std::abs(q - 1.0) <= 1e-9;
    c.detail = {{"pure_state_max_error", pure_err}, {"commuting_max_qfi", commuting_max}, {"qubit_example_qfi", q}};
    return c;
}

Criterion fixed_points() {
    Criterion c{6, "fixed-point projector, support projection and commutant", true, json::object()};
    random::Rng rng = random::make_rng(6006);
    double idem = 0.0, inv = 0.0, range = 0.0;
    int rank_mismatch = 0, support_failures = 0, restriction_failures = 0, nonfaithful = 0;
    json failures = json::array();
    for (int i = 0; i < 100; ++i) {
        int d = pick(rng, 2, 4);
        OperationMap phi = structured_channel(rng, d, i);
        FixedPointAnalysis a = fixpt::analyze_fixed_points(phi);
        idem = std::max(idem, a.idempotence_defect);
        inv = std::max(inv, a.invariance_defect);
        Eigen::JacobiSVD<Mat> svd(a.projector);
        int rank = int((svd.singularValues().array() > 0.5).count());
        if (rank != int(a.basis.size())) ++rank_mismatch;
        for (const auto& b : a.basis) {
            range = std::max(range, op_norm(cpmaps::apply_dual(phi, b) - b));
            range = std::max(range, op_norm(fixpt::average_dual(a, b) - b));
        }
        if (!a.faithful) ++nonfaithful;
        auto sup = fixpt::check_support_projection(a, phi);
        auto res = fixpt::check_restriction(a, phi);
        if (!all_pass(sup)) {
            ++support_failures;
            failures.push_back({{"case", i}, {"support", checks_summary(sup)}});
        }
        if (!all_pass(res) || !a.algebra_certified) {
            ++restriction_failures;
            failures.push_back({{"case", i}, {"restriction", checks_summary(res)}, {"algebra_defect", a.algebra_defect}});
        }
    }
    double commutant = 0.0;
    int unfaithful_unital = 0, not_closed = 0;
    for (int i = 0; i < 50; ++i) {
        int d = pick(rng, 2, 4);
        OperationMap phi = structured_unital_channel(rng, d, i);
        FixedPointAnalysis a = fixpt::analyze_fixed_points(phi);
        if (!a.faithful || !a.commutant_checked) {
            ++unfaithful_unital;
            continue;
        }
        commutant = std::max(commutant, a.commutant_defect);
        if (!a.full_algebra_certified) ++not_closed;
    }
    c.pass = idem <= 1e-8 && inv <= 1e-8 && range <= 1e-8 && rank_mismatch == 0 && support_failures == 0 &&
             restriction_failures == 0 && commutant <= 1e-8 && unfaithful_unital == 0 && not_closed == 0;
    c.detail = {{"max_idempotence_defect", idem},
                {"max_invariance_defect", inv},
                {"max_range_residual", range},
                {"rank_mismatches", rank_mismatch},
                {"non_faithful_channels", nonfaithful},
                {"support_failures", support_failures},
                {"restriction_failures", restriction_failures},
                {"failures", failures},
                {"max_commutant_distance", commutant},
                {"unital_not_faithful", unfaithful_unital},
                {"unital_not_product_closed", not_closed}};
    return c;
}

Criterion repeatability() {
    Criterion c{7, "repeatability structure", true, json::object()};
    random::Rng rng = random::make_rng(7007);
    int luders_fail = 0, collapse_fail = 0;
    double worst_orth = 0.0;
    for (int i = 0; i < 30; ++i) {
        int d = pick(rng, 2, 4);
        Observable e = random::random_sharp_observable(rng, d, pick(rng, 2, d));
        Instrument inst = measure::luders_instrument(e);
        auto r = measure::repeatability_report(inst, measure::normal_dilation(e));
        if (!(r.repeatable && r.first_kind && r.all_applicable_pass())) ++luders_fail;

        Instrument col = measure::rank1_collapse(e);
        auto rc = measure::repeatability_report(col, measure::instrument_dilation(col));
        const measure::Check* orth = rc.find("output_orthogonality");
        if (orth) worst_orth = std::max(worst_orth, orth->defect);
        if (!(rc.repeatable && rc.all_applicable_pass() && orth && orth->applicable && orth->defect <= 1e-9))
            ++collapse_fail;
    }
    auto rb = measure::repeatability_report(measure::luders_instrument(b_lambda(0.5)));
    bool b_ok = rb.first_kind_defect <= 1e-10 && rb.repeatability_defect >= 0.2;
    c.pass = luders_fail == 0 && collapse_fail == 0 && b_ok;
    c.detail = {{"luders_sharp_failures", luders_fail},
                {"collapse_failures", collapse_fail},
                {"max_output_overlap", worst_orth},
                {"b_half_first_kind_defect", rb.first_kind_defect},
                {"b_half_repeatability_defect", rb.repeatability_defect}};
    return c;
}

Criterion post_processing() {
    Criterion c{8, "post-processing round trip", true, json::object()};
    random::Rng rng = random::make_rng(8008);
    double worst = 0.0;
    int failures = 0, nonfaithful = 0;
    for (int i = 0; i < 20; ++i) {
        int d = pick(rng, 2, 4);
        StochasticMix mix = stochastic_mix(rng, d);
        Instrument inst = measure::luders_instrument(mix.f);
        fixpt::PostProcessing pp = fixpt::post_processing_decomposition(inst);
        if (!fixpt::analyze_fixed_points(inst.total()).faithful) ++nonfaithful;
        if (pp.p.cols() != d) {
            ++failures;
            continue;
        }
        // Match each true column to its closest recovered column.
        std::vector<bool> used(size_t(d), false);
        double err = 0.0;
        for (int z = 0; z < d; ++z) {
            int best = -1;
            double best_err = 1e300;
            for (int w = 0; w < d; ++w) {
                if (used[size_t(w)]) continue;
                double e = (pp.p.col(w) - mix.m.col(z)).cwiseAbs().maxCoeff();
                if (e < best_err) best_err = e, best = w;
            }
            used[size_t(best)] = true;
            double g_err = (pp.g.effects[size_t(best)] - mix.g.effects[size_t(z)]).cwiseAbs().maxCoeff();
            err = std::max({err, best_err, g_err});
        }
        worst = std::max(worst, err);
        if (err > 1e-8) ++failures;
    }
    c.pass = failures == 0 && nonfaithful == 0;
    c.detail = {{"max_entry_error", worst}, {"failures", failures}, {"non_faithful", nonfaithful}};
    return c;
}

Criterion norm_one() {
    Criterion c{9, "norm-1 observables from non-disturbance", true, json::object()};
    random::Rng rng = random::make_rng(9009);
    int cases = 0, failures = 0, unsharp = 0;
    double worst_norm = 0.0, worst_fixed = 0.0, worst_dist = 0.0;
    auto check = [&](const Instrument& inst, const Observable& f) {
        fixpt::NormOneResult r = fixpt::nondisturbed_norm1_observable(inst.total(), f);
        double nerr = 0.0;
        for (const auto& g : r.g.effects) {
            double n = op_norm(g);
            if (n > 1e-9) nerr = std::max(nerr, std::abs(n - 1.0));
        }
        worst_norm = std::max(worst_norm, nerr);
        worst_fixed = std::max(worst_fixed, r.fixed_defect);
        worst_dist = std::max(worst_dist, r.distinguishability_defect);
        if (!r.sharp) ++unsharp;
        if (nerr > 1e-9 || r.fixed_defect > 1e-9 || r.distinguishability_defect > 1e-9) ++failures;
        ++cases;
    };
    for (int i = 0; i < 10; ++i) {
        int d = pick(rng, 2, 4);
        StochasticMix mix = stochastic_mix(rng, d);
        check(measure::luders_instrument(mix.f), mix.f);
        Observable e = random::random_sharp_observable(rng, d, pick(rng, 2, d));
        check(measure::luders_instrument(e), e);
        check(measure::rank1_collapse(e), e);
        std::uniform_real_distribution<double> w(0.1, 0.9);
        Instrument leak = leak_instrument(w(rng), random::haar_unitary(rng, 3));
        check(leak, leak.induced());
    }
    c.pass = failures == 0 && unsharp > 0;
    c.detail = {{"cases", cases},
                {"failures", failures},
                {"unsharp_cases", unsharp},
                {"max_norm_error", worst_norm},
                {"max_fixed_defect", worst_fixed},
                {"max_distinguishability_defect", worst_dist}};
    return c;
}

}  // namespace

Criterion run_criterion(int id) {
    try {
        switch (id) {
        case 1: return qubit_family();
        case 2: return qutrit_counterexample();
        case 3: return unitary_equivalence();
        case 4: return bound_suite();
        case 5: return qfi_checks();
        case 6: return fixed_points();
        case 7: return repeatability();
        case 8: return post_processing();
        case 9: return norm_one();
        default: throw InputError("no criterion " + std::to_string(id));
        }
    } catch (const InputError& e) {
        return {id, "error", false, {{"error", e.what()}}};
    }
}

json battery() {
    json out = {{"schema", scenario::kSchema}, {"suite", "acceptance"}};
    json crits = json::array();
    bool pass = true;
    for (int id = 1; id <= kCriteria; ++id) {
        Criterion c = run_criterion(id);
        pass = pass && c.pass;
        crits.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"detail", c.detail}});
    }
    json scen = json::array();
    const Tolerance defaults;
    for (const auto& name : scenario::builtin_names()) {
        scenario::RunResult r = scenario::run(scenario::builtin(name, {}), defaults);
        pass = pass && r.exit_code == 0;
        json entry = {{"name", name}, {"exit_code", r.exit_code}, {"digest", r.report.value("digest", "")}};
        if (r.report.contains("summary")) entry["summary"] = r.report["summary"];
        if (r.report.contains("error")) entry["error"] = r.report["error"];
        scen.push_back(std::move(entry));
    }
    out["criteria"] = crits;
    out["builtins"] = scen;
    out["pass"] = pass;
    return out;
}

}  // namespace waylab::suite
