#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include "waylab/suite.hpp"

using namespace testing;
using namespace waylab::cpmaps;
using waylab::opcore::matrix_unit;
using waylab::opcore::op_norm;

TEST_CASE("qutrit channel action and duals") {
    OperationMap phi = suite::qutrit_channel();
    Mat n = suite::qutrit_quantity();
    // Basis order |1>, |0>, |-1>.
    Mat out = cpmaps::apply(phi, matrix_unit(3, 1, 1));
    CHECK(dist(out, diag({0.5, 0.0, 0.5})) < 1e-12);
    CHECK(dist(apply_dual(phi, n), n) < 1e-12);
    CHECK(dist(apply_dual(phi, n * n), opcore::identity(3)) < 1e-12);
    CHECK(dist(sesquilinear(phi, n, n), diag({0.0, 1.0, 0.0})) < 1e-12);
    CHECK(dist(apply_dual(phi, opcore::identity(3)), opcore::identity(3)) < 1e-12);
    CHECK_THROWS_AS(cpmaps::apply(phi, opcore::identity(2)), InputError);
}

TEST_CASE("unitary channels are multiplicative") {
    auto rng = random::make_rng(11);
    OperationMap u = OperationMap::unitary(random::haar_unitary(rng, 3));
    Mat a = random::ginibre(rng, 3, 3), b = random::ginibre(rng, 3, 3);
    CHECK(op_norm(sesquilinear(u, a, b)) < 1e-12);
    BoundReport r = commutator_defect_bound(u, a, b);
    CHECK(r.lhs < 1e-12);
    CHECK(r.rhs < 1e-6);
    CHECK(r.satisfied);
    OperationMap id = compose(u, OperationMap::unitary(u.kraus[0].adjoint()));
    CHECK(dist(cpmaps::apply(id, a), a) < 1e-12);
}

TEST_CASE("sesquilinear form vanishes against the identity") {
    auto rng = random::make_rng(12);
    OperationMap phi = random::random_channel(rng, 3, 3);
    CHECK(op_norm(sesquilinear(phi, opcore::identity(3), random::ginibre(rng, 3, 3))) < 1e-12);
}

TEST_CASE("commutator defect bound on the qutrit channel") {
    // tests/oracle/derive.py: qutrit_commutator_lhs, qutrit_commutator_rhs
    BoundReport r = commutator_defect_bound(suite::qutrit_channel(), suite::qutrit_quantity(), matrix_unit(3, 0, 1));
    CHECK(r.lhs < 1e-12);
    CHECK(std::abs(r.rhs - 1.0) < 1e-9);
    CHECK(r.satisfied);
}

TEST_CASE("commutator defect bound on random channels") {
    auto rng = random::make_rng(13);
    OperationMap phi = random::random_channel(rng, 3, 3);
    for (int i = 0; i < 100; ++i) {
        BoundReport r = commutator_defect_bound(phi, random::ginibre(rng, 3, 3), random::ginibre(rng, 3, 3));
        CHECK(r.satisfied);
    }
}

TEST_CASE("multiplicability for the sharp qubit Lueders channel") {
    OperationMap lz = OperationMap::from_kraus({matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)});
    MultiplicabilityResult z = check_multiplicability(lz, sz());
    CHECK(z.applicable);
    CHECK(z.holds);
    CHECK(z.witness < 1e-12);
    MultiplicabilityResult x = check_multiplicability(lz, sx());
    CHECK_FALSE(x.applicable);
    CHECK(std::abs(x.precondition_defect - 1.0) < 1e-12);
}

TEST_CASE("composition") {
    OperationMap lp = OperationMap::from_kraus({matrix_unit(2, 0, 0)});
    OperationMap twice = compose(lp, lp);
    Mat rho = diag({0.3, 0.7});
    rho(0, 1) = rho(1, 0) = 0.2;
    CHECK(dist(cpmaps::apply(twice, rho), cpmaps::apply(lp, rho)) < 1e-15);
    CHECK(dist(cpmaps::apply(compose(OperationMap::identity(2), amplitude_damping(0.3)), rho),
               cpmaps::apply(amplitude_damping(0.3), rho)) < 1e-15);
    CHECK_THROWS_AS(compose(OperationMap::identity(3), lp), InputError);
}

TEST_CASE("supermatrix") {
    CHECK(dist(to_supermatrix(OperationMap::identity(3)), opcore::identity(9)) < 1e-15);
    Mat m = to_supermatrix(OperationMap::unitary(sx()));
    Eigen::ComplexEigenSolver<Mat> es(m);
    std::vector<double> ev;
    for (int i = 0; i < 4; ++i) ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(-1.0));
    CHECK(ev[1] == doctest::Approx(-1.0));
    CHECK(ev[2] == doctest::Approx(1.0));
    CHECK(ev[3] == doctest::Approx(1.0));

    auto rng = random::make_rng(14);
    OperationMap phi = random::random_channel(rng, 3, 2);
    Mat a = random::ginibre(rng, 3, 3);
    CHECK(dist(opcore::unvec(to_supermatrix(phi) * opcore::vec(a), 3, 3), apply_dual(phi, a)) < 1e-12);
}

TEST_CASE("amplitude damping sesquilinear defect") {
    // tests/oracle/derive.py: damping_sesq_sx
    CHECK(std::abs(op_norm(sesquilinear(amplitude_damping(0.36), sx(), sx())) - 0.36) < 1e-12);
}

TEST_CASE("compress drops vanishing Kraus products") {
    OperationMap lp = OperationMap::from_kraus({matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)});
    OperationMap big = compose(lp, compose(lp, lp));
    CHECK(big.kraus.size() == 8);
    OperationMap small = compress(big);
    CHECK(small.kraus.size() == 2);
    CHECK(dist(choi(small), choi(big)) < 1e-12);
}

TEST_CASE("property: sesquilinear form is positive and Cauchy-Schwarz holds") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 2 + int(seed % 3);
        OperationMap phi = random::random_channel(rng, d, 1 + int(seed % 4));
        Mat a = random::ginibre(rng, d, d), b = random::ginibre(rng, d, d);
        Mat aa = sesquilinear(phi, a, a), bb = sesquilinear(phi, b, b);
        Mat ab = sesquilinear(phi, a, b), ba = sesquilinear(phi, b, a);
        CAPTURE(seed);
        CHECK(opcore::min_eigenvalue(aa) >= -tol.eq_tol * std::max(1.0, op_norm(a) * op_norm(a)));
        Mat gap = op_norm(bb) * aa - ab * ba;
        CHECK(opcore::min_eigenvalue(gap) >= -1e-9 * std::max(1.0, op_norm(aa) * op_norm(bb)));
    }
}

TEST_CASE("property: effect squares are controlled by closeness to a sharp-ish input") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto rng = random::make_rng(seed);
        OperationMap phi = random::random_channel(rng, 3, 2);
        Mat a = random_effect(rng, 3), b = random_effect(rng, 3);
        Mat pa = apply_dual(phi, a);
        double lhs = op_norm(apply_dual(phi, a * a) - pa * pa);
        double rhs = 2.0 * op_norm(pa - b) + op_norm(b - b * b);
        CAPTURE(seed);
        CHECK(lhs <= rhs + tol.eq_tol);
    }
}

TEST_CASE("property: annihilated positive operators annihilate products") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto rng = random::make_rng(seed);
        // Channel whose dual kills the projector onto the last basis vector.
        Mat v = random::haar_unitary(rng, 3).leftCols(2);
        std::vector<Mat> ks;
        Mat w = random::haar_unitary(rng, 2);
        ks.push_back(v * w * Mat::Identity(2, 3) * std::sqrt(0.5));
        ks.push_back(v * Mat::Identity(2, 3) * std::sqrt(0.5));
        // Pad the input space: anything on |2> goes nowhere useful, so extend to a channel.
        ks.push_back(v.col(0) * opcore::basis_ket(3, 2).adjoint());
        OperationMap phi = OperationMap::from_kraus(ks);
        REQUIRE(is_channel(phi));
        Mat p = Mat::Identity(3, 3) - v * v.adjoint();
        REQUIRE(op_norm(apply_dual(phi, p)) < 1e-12);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(op_norm(apply_dual(phi, p * matrix_unit(3, i, j))) < 1e-12);
    }
}

TEST_CASE("property: duality pairing") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto rng = random::make_rng(seed);
        OperationMap phi = random::random_channel(rng, 3, 3);
        Mat a = random::ginibre(rng, 3, 3), t = random::ginibre(rng, 3, 3);
        double tn = Eigen::JacobiSVD<Mat>(t).singularValues().sum();
        cplx lhs = opcore::trace(apply_dual(phi, a) * t), rhs = opcore::trace(a * cpmaps::apply(phi, t));
        CHECK(std::abs(lhs - rhs) <= 1e-9 * op_norm(a) * tn);
    }
}

TEST_CASE("property: supermatrix spectral radius") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto rng = random::make_rng(seed);
        Eigen::ComplexEigenSolver<Mat> es(to_supermatrix(random::random_channel(rng, 3, 1 + int(seed % 3))));
        CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
    }
}
