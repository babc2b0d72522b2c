#pragma once

#include "waylab/measure.hpp"

namespace waylab {

// N = n_sys (x) 1 + 1 (x) n_app
struct AdditiveQuantity {
    Mat n_sys;
    Mat n_app;

    void validate(const Tolerance& tol = {}) const;
    Mat composite() const;
};

struct ConservationReport {
    double average_defect = 0.0;  // ||Phi*(N) - N||
    double full_defect = 0.0;     // ||Phi*(N^2) - N^2||
    bool average_holds = false;
    bool full_holds = false;
};

struct UnitaryEquivalenceReport {
    double commutator_defect = 0.0;
    double average_defect = 0.0;
    double full_defect = 0.0;
    bool agree = false;
};

struct YanaseReport {
    double yanase_defect = 0.0;       // max_x ||[Z(x), N_A]||
    double weak_yanase_defect = 0.0;  // max_x ||[Z^tau(x), N]||
    bool yanase = false;
    bool weak_yanase = false;
    // Only meaningful for unitary couplings that conserve N on average.
    bool equivalence_checked = false;
    bool equivalence_agrees = true;
};

namespace conserve {

ConservationReport check_conservation(const OperationMap& phi, const Mat& n, const Tolerance& tol = {});
UnitaryEquivalenceReport check_unitary_equivalence(const Mat& u, const Mat& n, const Tolerance& tol = {});

double variance(const Mat& n, const Mat& state, const Tolerance& tol = {});
double qfi(const Mat& n, const Mat& state, const Tolerance& tol = {});

YanaseReport yanase_conditions(const MeasurementScheme& m, const AdditiveQuantity& q,
                               const Tolerance& tol = {});

}  // namespace conserve
}  // namespace waylab
