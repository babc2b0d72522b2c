#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

using namespace testing;
using namespace waylab::opcore;

TEST_CASE("tensor keeps the system index slow") {
    Mat t = tensor(projector(basis_ket(2, 0)), sx());
    CHECK(op_norm(t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(t(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(t(2, 3)) < 1e-15);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
    Vec bell = (tensor(basis_ket(2, 0), basis_ket(2, 0)) + tensor(basis_ket(2, 1), basis_ket(2, 1))) / std::sqrt(2.0);
    Mat rho = projector(bell);
    CHECK(dist(partial_trace(rho, Keep::System, 2, 2), 0.5 * identity(2)) < 1e-12);
    CHECK(dist(partial_trace(rho, Keep::Apparatus, 2, 2), 0.5 * identity(2)) < 1e-12);

    Mat prod = tensor(diag({0.25, 0.75}), diag({0.1, 0.2, 0.7}));
    CHECK(dist(partial_trace(prod, Keep::Apparatus, 2, 3), diag({0.1, 0.2, 0.7})) < 1e-12);
    CHECK_THROWS_AS(partial_trace(prod, Keep::System, 3, 3), InputError);
}

TEST_CASE("psd square root and its guards") {
    CHECK(dist(psd_sqrt(diag({4.0, 9.0})), diag({2.0, 3.0})) < 1e-12);
    CHECK(dist(psd_sqrt(zeros(3)), zeros(3)) < 1e-15);
    CHECK_THROWS_AS(psd_sqrt(diag({1.0, -0.5})), InputError);
    // Eigenvalues at roundoff level must come back as zero, not as their square roots.
    Mat p = projector(ket({1.0, cplx(0, 1)}) / std::sqrt(2.0));
    CHECK(dist(psd_sqrt(p), p) < 1e-14);
}

TEST_CASE("predicates") {
    CHECK(is_effect(diag({0.0, 0.3, 1.0})));
    CHECK_FALSE(is_effect(diag({0.0, 1.2})));
    CHECK(is_projection(projector(ket({0.6, 0.8}))));
    CHECK_FALSE(is_projection(diag({0.5, 1.0})));
    CHECK(is_state(diag({0.25, 0.75})));
    CHECK_FALSE(is_state(diag({0.5, 0.6})));
    CHECK(is_unitary(sy()));
    CHECK_FALSE(is_hermitian(opcore::matrix_unit(2, 0, 1)));
}

TEST_CASE("fidelity uses the squared convention") {
    Mat r0 = projector(basis_ket(2, 0)), r1 = projector(basis_ket(2, 1));
    CHECK(fidelity(r0, r0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fidelity(r0, r1)) < 1e-12);
    CHECK(fidelity(r0, 0.5 * identity(2)) == doctest::Approx(0.5).epsilon(1e-12));

    Mat rho(2, 2), sigma(2, 2);
    rho << 0.7, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.3;
    sigma << 0.4, -0.1, -0.1, 0.6;
    // tests/oracle/derive.py: fidelity_mixed (scipy sqrtm)
    CHECK(std::abs(fidelity(rho, sigma) - 0.8036665218650171) < 1e-10);
    CHECK(std::abs(fidelity(rho, sigma) - fidelity(sigma, rho)) < 1e-12);
    CHECK_THROWS_AS(fidelity(diag({0.5, 0.6}), rho), InputError);
}

TEST_CASE("eigenspace projectors") {
    CHECK(dist(eigenspace_projector(identity(3), 1.0), identity(3)) < 1e-12);
    CHECK(dist(eigenspace_projector(diag({1.0, 0.4}), 1.0), projector(basis_ket(2, 0))) < 1e-12);
    CHECK(dist(eigenspace_projector(sx(), 1.0), projector(ket({1.0, 1.0}) / std::sqrt(2.0))) < 1e-12);
    CHECK(dist(eigenspace_projector(diag({0.2, 0.4}), 1.0), zeros(2)) < 1e-15);
    CHECK_THROWS_AS(eigenspace_projector(opcore::matrix_unit(2, 0, 1), 1.0), InputError);
}

TEST_CASE("vec and unvec stack columns") {
    Mat a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    Vec v = vec(a);
    CHECK(v(1) == cplx(3.0));
    CHECK(v(2) == cplx(2.0));
    CHECK(dist(unvec(v, 2, 2), a) < 1e-15);
}

TEST_CASE("property: psd_sqrt squares back and norms agree") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 1 + int(seed % 5);
        Mat g = random::ginibre(rng, d, d);
        Mat a = g * g.adjoint();
        Mat s = psd_sqrt(a);
        CAPTURE(seed);
        CHECK(std::abs(op_norm(s) * op_norm(s) - op_norm(a)) <= 2 * tol.eq_tol * std::max(1.0, op_norm(a)));
        CHECK(dist(s * s, a) <= 1e-10 * std::max(1.0, op_norm(a)));
    }
}

TEST_CASE("property: partial trace preserves the trace") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto rng = random::make_rng(seed);
        int dS = 1 + int(seed % 3), dA = 1 + int(seed / 3 % 4);
        Mat t = random::ginibre(rng, dS * dA, dS * dA);
        CAPTURE(seed);
        CHECK(std::abs(trace(partial_trace(t, Keep::System, dS, dA)) - trace(t)) <= 1e-9);
        CHECK(std::abs(trace(partial_trace(t, Keep::Apparatus, dS, dA)) - trace(t)) <= 1e-9);
    }
}

TEST_CASE("property: tensor is associative") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto rng = random::make_rng(seed);
        Mat a = random::ginibre(rng, 2, 2), b = random::ginibre(rng, 3, 3), c = random::ginibre(rng, 2, 2);
        CHECK(dist(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) <= 1e-9);
    }
}

TEST_CASE("property: eigenspace projectors are idempotent eigenprojectors") {
    const Tolerance tol;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto rng = random::make_rng(seed);
        int d = 2 + int(seed % 4);
        // Integer spectrum so that the requested eigenvalue actually occurs, often degenerate.
        Mat u = random::haar_unitary(rng, d);
        Mat dg = Mat::Zero(d, d);
        for (int i = 0; i < d; ++i) dg(i, i) = double((seed + i * i) % 3);
        Mat a = u * dg * u.adjoint();
        for (double value : {0.0, 1.0, 2.0}) {
            Mat q = eigenspace_projector(a, value);
            CAPTURE(seed);
            CHECK(dist(q * q, q) <= tol.rank_tol);
            CHECK(dist(a * q, value * q) <= tol.rank_tol * std::max(1.0, op_norm(a)));
        }
    }
}
