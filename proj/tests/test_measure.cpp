#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include "waylab/suite.hpp"

using namespace testing;
using namespace waylab::measure;
using waylab::cpmaps::apply_dual;
using waylab::opcore::op_norm;

namespace {

double instrument_distance(const Instrument& a, const Instrument& b) {
    const int d = a.dim;
    double worst = 0;
    for (size_t x = 0; x < a.operations.size(); ++x)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Mat e = opcore::matrix_unit(d, i, j);
                worst = std::max(worst, dist(cpmaps::apply(a.operations[x], e), cpmaps::apply(b.operations[x], e)));
            }
    return worst;
}

std::vector<Instrument> instrument_zoo(random::Rng& rng, const Observable& e) {
    std::vector<Instrument> out{luders_instrument(e), rank1_collapse(e)};
    // Lueders followed by an outcome-dependent unitary.
    Instrument l = luders_instrument(e);
    for (auto& op : l.operations)
        op = cpmaps::compose(OperationMap::unitary(random::haar_unitary(rng, e.dim)), op);
    out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("observable validation names the offending effect") {
    Observable bad = make_observable({diag({1.2, 0.0}), diag({-0.2, 1.0})});
    try {
        bad.validate();
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("effect '0'") != std::string::npos);
    }
    CHECK_THROWS_AS(make_observable({diag({0.5, 0.5})}).validate(), InputError);
}

TEST_CASE("observable predicates") {
    Observable b = suite::b_lambda(0.5);
    CHECK(b.is_commutative());
    CHECK_FALSE(b.is_sharp());
    CHECK_FALSE(b.is_norm_one());
    CHECK(suite::sharp_qubit().is_sharp());
    CHECK(suite::sharp_qubit().is_rank_one());
    CHECK(make_observable({opcore::identity(3)}).is_trivial());
    CHECK(make_observable({0.3 * opcore::identity(2), 0.7 * opcore::identity(2)}).is_trivial());
}

TEST_CASE("Lueders instruments") {
    Instrument la = luders_instrument(suite::sharp_qubit());
    RepeatabilityReport ra = repeatability_report(la);
    CHECK(ra.repeatable);
    CHECK(ra.first_kind);
    CHECK(ra.all_applicable_pass());

    Instrument lb = luders_instrument(suite::b_lambda(0.5));
    RepeatabilityReport rb = repeatability_report(lb);
    CHECK(rb.first_kind);
    CHECK(rb.first_kind_defect <= 1e-10);
    CHECK_FALSE(rb.repeatable);
    // tests/oracle/derive.py: blambda_repeat_mismatch
    CHECK(std::abs(rb.repeatability_defect - 0.375) < 1e-12);

    Instrument triv = luders_instrument(make_observable({opcore::identity(2)}));
    Mat rho = diag({0.2, 0.8});
    rho(0, 1) = rho(1, 0) = cplx(0.1, 0.3);
    CHECK(dist(cpmaps::apply(triv.operations[0], rho), rho) < 1e-12);
    CHECK(dist(la.induced().effects[1], suite::sharp_qubit().effects[1]) < 1e-12);
}

TEST_CASE("schemes and their instruments") {
    for (const Observable& e : {suite::sharp_qubit(), suite::b_lambda(0.3)}) {
        MeasurementScheme m = normal_dilation(e);
        CHECK(m.app_dim == 2);
        CHECK(opcore::is_unitary(m.coupling.kraus[0]));
        CHECK(instrument_distance(scheme_to_instrument(m), luders_instrument(e)) < 1e-9);
        CHECK(heisenberg_pointer(m).is_sharp());
        for (size_t x = 0; x < e.size(); ++x)
            CHECK(dist(measured_observable(m).effects[x], e.effects[x]) < 1e-9);
    }

    MeasurementScheme idle;
    idle.sys_dim = 2;
    idle.app_dim = 2;
    idle.xi = diag({0.8, 0.2});
    idle.coupling = OperationMap::identity(4);
    idle.pointer = suite::sharp_qubit();
    Instrument ii = scheme_to_instrument(idle);
    Mat rho = diag({0.6, 0.4});
    CHECK(dist(cpmaps::apply(ii.operations[0], rho), 0.8 * rho) < 1e-12);
    CHECK(measured_observable(idle).is_trivial());
    Observable zt = heisenberg_pointer(idle);
    CHECK(dist(zt.effects[1], opcore::tensor(opcore::identity(2), diag({0.0, 1.0}))) < 1e-12);
}

TEST_CASE("restriction maps") {
    auto rng = random::make_rng(21);
    MeasurementScheme m = normal_dilation(random::random_povm(rng, 2, 3));
    m.xi = random::random_state(rng, 3);
    m.coupling = random::random_channel(rng, 6, 2);
    RestrictionMaps rm = restriction_maps(m);
    Mat na = random::random_hermitian(rng, 3), ns = random::random_hermitian(rng, 2);
    CHECK(dist(apply_dual(rm.gamma, opcore::tensor(opcore::identity(2), na)),
               opcore::trace(na * m.xi) * opcore::identity(2)) < 1e-12);
    CHECK(dist(apply_dual(rm.gamma, opcore::tensor(ns, opcore::identity(3))), ns) < 1e-12);
    for (int k = 0; k < 10; ++k) {
        Mat b = random::ginibre(rng, 6, 6), t = random::ginibre(rng, 2, 2);
        cplx lhs = opcore::trace(apply_dual(rm.gamma_e, b) * t);
        cplx rhs = opcore::trace(b * cpmaps::apply(m.coupling, opcore::tensor(t, m.xi)));
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("rank-1 collapse of a sharp observable is repeatable") {
    auto rng = random::make_rng(22);
    Observable e = random::random_sharp_observable(rng, 3, 3);
    Instrument r1 = rank1_collapse(e);
    RepeatabilityReport r = repeatability_report(r1, instrument_dilation(r1));
    CHECK(r.repeatable);
    CHECK(r.all_applicable_pass());
    CHECK(r.find("output_orthogonality")->defect <= 1e-9);
    CHECK(r.find("viii_pointer_restriction") != nullptr);
}

TEST_CASE("instrument dilation reproduces the instrument") {
    auto rng = random::make_rng(23);
    Observable e = random::random_povm(rng, 3, 2);
    Instrument l = luders_instrument(e);
    CHECK(instrument_distance(scheme_to_instrument(instrument_dilation(l)), l) < 1e-9);
}

TEST_CASE("complete_isometry places columns at the stride") {
    Mat v(4, 2);
    v << 1, 0, 0, 0, 0, 1, 0, 0;
    Mat u = complete_isometry(v, 2);
    CHECK(opcore::is_unitary(u));
    CHECK(dist(u.col(0), v.col(0)) < 1e-15);
    CHECK(dist(u.col(2), v.col(1)) < 1e-15);
}

TEST_CASE("property: sharp observables commute with the total dual of compatible instruments") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 2 + int(seed % 3);
        Observable e = random::random_sharp_observable(rng, d, std::min(d, 2 + int(seed % 2)));
        for (const Instrument& inst : instrument_zoo(rng, e)) {
            OperationMap tot = inst.total();
            Mat a = random::ginibre(rng, d, d);
            for (const auto& ex : e.effects) CHECK(op_norm(opcore::commutator(ex, apply_dual(tot, a))) <= 1e-9);
        }
    }
}

TEST_CASE("property: fixed effects yield a joint observable") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 2 + int(seed % 3);
        Observable e = random::random_sharp_observable(rng, d, 2);
        // F diagonal in the eigenbasis of E, so it is left invariant by the Lueders channel.
        std::vector<Mat> fe;
        Mat rest = opcore::identity(d);
        Mat part = Mat::Zero(d, d);
        for (const auto& ex : e.effects) part += std::uniform_real_distribution<double>(0, 1)(rng) * ex;
        Observable f = make_observable({part, rest - part});
        Instrument inst = luders_instrument(e);
        REQUIRE(bounds::disturbance_profile(inst, f).global <= tol.eq_tol);
        for (size_t x = 0; x < e.size(); ++x) {
            Mat marg = Mat::Zero(d, d);
            for (size_t y = 0; y < f.size(); ++y) {
                Mat g = apply_dual(inst.operations[x], f.effects[y]);
                CHECK(opcore::min_eigenvalue(g) >= -tol.eq_tol);
                marg += g;
            }
            CHECK(dist(marg, e.effects[x]) <= tol.eq_tol);
        }
        for (size_t y = 0; y < f.size(); ++y) {
            Mat marg = Mat::Zero(d, d);
            for (size_t x = 0; x < e.size(); ++x) marg += apply_dual(inst.operations[x], f.effects[y]);
            CHECK(dist(marg, f.effects[y]) <= tol.eq_tol);
        }
    }
}

TEST_CASE("property: normal dilation round trip") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto rng = random::make_rng(seed);
        Observable e = random::random_povm(rng, 2 + int(seed % 3), 2 + int(seed % 2));
        CAPTURE(seed);
        CHECK(instrument_distance(scheme_to_instrument(normal_dilation(e)), luders_instrument(e)) <= 1e-8);
    }
}

TEST_CASE("property: repeatable implies first kind") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 2 + int(seed % 3);
        Observable e = seed % 2 ? random::random_sharp_observable(rng, d, 2) : random::random_povm(rng, d, 2);
        for (const Instrument& inst : instrument_zoo(rng, e)) {
            RepeatabilityReport r = repeatability_report(inst);
            if (r.repeatability_defect <= tol.eq_tol) CHECK(r.first_kind_defect <= tol.eq_tol);
            CHECK_FALSE(r.sharp_equivalence_disagreement);
        }
    }
}
