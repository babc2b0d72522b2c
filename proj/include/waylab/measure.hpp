#pragma once

#include "waylab/cpmaps.hpp"

#include <optional>
#include <string>
#include <vector>

namespace waylab {

struct Observable {
    int dim = 0;
    std::vector<std::string> outcomes;
    std::vector<Mat> effects;

    // Throws InputError naming the first offending effect.
    void validate(const Tolerance& tol = {}) const;
    size_t size() const { return effects.size(); }

    bool is_sharp(const Tolerance& tol = {}) const;
    bool is_commutative(const Tolerance& tol = {}) const;
    bool is_norm_one(const Tolerance& tol = {}) const;
    bool is_rank_one(const Tolerance& tol = {}) const;
    bool is_trivial(const Tolerance& tol = {}) const;
};

// Effects with default labels "0", "1", ...
Observable make_observable(std::vector<Mat> effects);

struct Instrument {
    int dim = 0;
    std::vector<std::string> outcomes;
    std::vector<OperationMap> operations;

    void validate(const Tolerance& tol = {}) const;
    OperationMap total() const;
    Observable induced() const;
};

struct MeasurementScheme {
    int sys_dim = 0;
    int app_dim = 0;
    Mat xi;
    OperationMap coupling;
    Observable pointer;

    void validate(const Tolerance& tol = {}) const;
};

// Operation maps whose duals are the restriction maps of a scheme:
// apply_dual(gamma, B) = Gamma_xi(B), apply_dual(gamma_e, B) = Gamma_xi^E(B),
// and lambda is the conjugate channel S -> A.
struct RestrictionMaps {
    OperationMap gamma;
    OperationMap gamma_e;
    OperationMap lambda;
};

namespace measure {

Instrument luders_instrument(const Observable& e, const Tolerance& tol = {});
Instrument scheme_to_instrument(const MeasurementScheme& m);
Observable measured_observable(const MeasurementScheme& m);
RestrictionMaps restriction_maps(const MeasurementScheme& m);
Observable heisenberg_pointer(const MeasurementScheme& m);

// Scheme with xi = |0><0| and one pointer slot per Kraus operator, reproducing inst exactly.
MeasurementScheme instrument_dilation(const Instrument& inst, const Tolerance& tol = {});
MeasurementScheme normal_dilation(const Observable& e, const Tolerance& tol = {});

// I_x(rho) = tr[E(x) rho] |psi_x><psi_x|.  Without vectors, psi_x is taken from the
// eigenvalue-1 eigenspace of E(x) (largest eigenvalue if there is none).
Instrument rank1_collapse(const Observable& e, const std::vector<Vec>& vectors = {},
                          const Tolerance& tol = {});

// Unitary whose columns k * stride hold the columns of v in order; the remaining
// columns are an orthonormal completion by Gram-Schmidt over the standard basis.
Mat complete_isometry(const Mat& v, int stride, const Tolerance& tol = {});

struct Check {
    std::string name;
    double defect = 0.0;
    bool pass = true;
    bool applicable = true;
};

struct RepeatabilityReport {
    bool repeatable = false;
    bool first_kind = false;
    double repeatability_defect = 0.0;  // || sum_x I*_x(1 - E(x)) ||
    double first_kind_defect = 0.0;
    bool sharp = false;
    // Set when the observable is sharp and the two properties disagree.
    bool sharp_equivalence_disagreement = false;
    std::vector<Check> items;

    bool all_applicable_pass() const;
    const Check* find(const std::string& name) const;
};

RepeatabilityReport repeatability_report(const Instrument& inst,
                                         const std::optional<MeasurementScheme>& m = std::nullopt,
                                         const Tolerance& tol = {});

}  // namespace measure
}  // namespace waylab
