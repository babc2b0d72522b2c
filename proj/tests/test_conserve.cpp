#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include "waylab/suite.hpp"

using namespace testing;
using namespace waylab::conserve;
using waylab::cpmaps::apply_dual;
using waylab::opcore::op_norm;

namespace {

Mat exp_i(const Mat& h, double t) { return opcore::expi_hermitian(t * h); }

Mat integer_quantity(random::Rng& rng, int d) {
    Mat dg = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) dg(i, i) = double(std::uniform_int_distribution<int>(-1, 1)(rng));
    Mat u = random::haar_unitary(rng, d);
    return opcore::hermitian_part(u * dg * u.adjoint());
}

}  // namespace

TEST_CASE("conservation reports") {
    Mat n = suite::qutrit_quantity();
    ConservationReport id = check_conservation(OperationMap::identity(3), n);
    CHECK(id.average_holds);
    CHECK(id.full_holds);

    ConservationReport q = check_conservation(suite::qutrit_channel(), n);
    CHECK(q.average_holds);
    CHECK(q.average_defect <= 1e-12);
    CHECK_FALSE(q.full_holds);
    CHECK(std::abs(q.full_defect - 1.0) <= 1e-12);

    CHECK(check_conservation(OperationMap::unitary(exp_i(sz(), 1.0)), sz()).full_holds);
    CHECK_THROWS_AS(check_conservation(OperationMap::from_kraus({diag({1.0, 0.5})}), sz()), InputError);
    CHECK_THROWS_AS(check_conservation(OperationMap::identity(2), opcore::matrix_unit(2, 0, 1)), InputError);
}

TEST_CASE("unitary equivalence") {
    UnitaryEquivalenceReport a = check_unitary_equivalence(exp_i(sx(), 0.7), sx());
    CHECK(a.commutator_defect <= 1e-12);
    CHECK(a.average_defect <= 1e-12);
    CHECK(a.full_defect <= 1e-12);
    CHECK(a.agree);

    UnitaryEquivalenceReport b = check_unitary_equivalence(sx(), sz());
    CHECK(std::abs(b.commutator_defect - 2.0) <= 1e-12);
    CHECK(b.average_defect > 0.1);
    // sigma_z^2 = 1, so the second-moment defect vanishes; full conservation still fails on the first moment.
    CHECK(b.full_defect <= 1e-12);
    CHECK_FALSE(check_conservation(OperationMap::unitary(sx()), sz()).full_holds);
    CHECK(b.agree);

    UnitaryEquivalenceReport b3 = check_unitary_equivalence(exp_i(sx(), 0.5), diag({1.0, 0.0}));
    CHECK(b3.commutator_defect > 0.1);
    CHECK(b3.average_defect > 0.1);
    CHECK(b3.full_defect > 0.1);
    CHECK(b3.agree);

    UnitaryEquivalenceReport c = check_unitary_equivalence(opcore::identity(3), suite::qutrit_quantity());
    CHECK(c.commutator_defect == 0.0);
    CHECK(c.agree);
    CHECK_THROWS_AS(check_unitary_equivalence(diag({1.0, 2.0}), sz()), InputError);
}

TEST_CASE("variance") {
    Mat plus = opcore::projector(ket({1.0, 1.0}) / std::sqrt(2.0));
    CHECK(variance(sz(), plus) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(variance(sz(), diag({1.0, 0.0}))) <= 1e-12);
    CHECK(variance(sx(), diag({0.75, 0.25})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(variance(sz(), diag({0.7, 0.7})), InputError);
}

TEST_CASE("quantum Fisher information") {
    Mat plus = opcore::projector(ket({1.0, 1.0}) / std::sqrt(2.0));
    CHECK(qfi(sz(), plus) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::abs(qfi(sz(), diag({0.75, 0.25}))) <= 1e-12);
    // tests/oracle/derive.py: qfi_qubit_diag_sx
    CHECK(std::abs(qfi(sx(), diag({0.75, 0.25})) - 1.0) <= 1e-9);

    Mat rho(3, 3), n(3, 3);
    rho << 0.5, 0.1, cplx(0, 0.05), 0.1, 0.3, 0.02, cplx(0, -0.05), 0.02, 0.2;
    n << 1.0, 0.5, 0.0, 0.5, 0.0, cplx(0, 0.25), 0.0, cplx(0, -0.25), -1.0;
    // tests/oracle/derive.py: qfi_qutrit (Sylvester-equation SLD), variance_qutrit
    CHECK(std::abs(qfi(n, rho) - 0.03821866321051658) <= 1e-10);
    CHECK(std::abs(variance(n, rho) - 0.88375) <= 1e-12);
}

TEST_CASE("Yanase conditions") {
    MeasurementScheme m = measure::normal_dilation(suite::sharp_qubit());
    AdditiveQuantity q{Mat::Zero(2, 2), diag({0.0, 1.0})};
    YanaseReport y = yanase_conditions(m, q);
    CHECK(y.yanase_defect <= 1e-12);
    CHECK(y.equivalence_agrees);

    MeasurementScheme idle = m;
    idle.coupling = OperationMap::identity(4);
    auto rng = random::make_rng(31);
    idle.pointer = random::random_povm(rng, 2, 2);
    YanaseReport yi = yanase_conditions(idle, AdditiveQuantity{sz(), sx()});
    CHECK(std::abs(yi.weak_yanase_defect - yi.yanase_defect) <= 1e-12);
    CHECK(yi.yanase_defect > 0.01);
    CHECK_THROWS_AS(yanase_conditions(m, AdditiveQuantity{sz(), opcore::identity(3)}), InputError);
}

TEST_CASE("property: second-order conservation propagates to the third power") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 2 + int(seed % 3);
        Mat n = integer_quantity(rng, d);
        // Random mixture of conservative unitaries, which fully conserves n.
        std::vector<Mat> ks;
        const int terms = 1 + int(seed % 3);
        for (int k = 0; k < terms; ++k)
            ks.push_back(random::conservative_unitary(rng, n) / std::sqrt(double(terms)));
        OperationMap phi = OperationMap::from_kraus(ks);
        ConservationReport r = check_conservation(phi, n);
        REQUIRE(r.full_holds);
        double nn = std::max(1.0, op_norm(n));
        CHECK(op_norm(apply_dual(phi, n * n * n) - n * n * n) <= 10 * tol.eq_tol * nn * nn * nn);
    }
}

TEST_CASE("property: fully conservative couplings transfer the apparatus variance") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto rng = random::make_rng(seed);
        int dS = 2 + int(seed % 2), dA = 2 + int(seed / 2 % 2);
        AdditiveQuantity q{integer_quantity(rng, dS), integer_quantity(rng, dA)};
        MeasurementScheme m;
        m.sys_dim = dS;
        m.app_dim = dA;
        m.xi = random::random_state(rng, dA);
        m.coupling = OperationMap::unitary(random::conservative_unitary(rng, q.composite()));
        m.pointer = random::random_povm(rng, dA, 2);
        REQUIRE(check_conservation(m.coupling, q.composite()).full_holds);
        double nn = op_norm(q.composite());
        CAPTURE(seed);
        CHECK(std::abs(bounds::scheme_variance(m, q) - variance(q.n_app, m.xi)) <= tol.eq_tol * std::max(1.0, nn * nn));
    }
}

TEST_CASE("property: QFI lies between zero and four variances") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 2 + int(seed % 3);
        Mat n = random::random_hermitian(rng, d);
        Mat rho = seed % 4 == 0 ? opcore::projector(random::random_pure(rng, d))
                                : random::random_state(rng, d, 1 + int(seed % 3));
        double q = qfi(n, rho), v = variance(n, rho);
        CAPTURE(seed);
        CHECK(q >= -tol.eq_tol);
        CHECK(q <= 4 * v + tol.eq_tol);
        if (seed % 4 == 0) CHECK(std::abs(q - 4 * v) <= tol.eq_tol);
    }
}
