#pragma once

#include "waylab/bounds.hpp"

#include <vector>

namespace waylab {

struct FixedPointAnalysis {
    int dim = 0;
    std::vector<Mat> basis;  // Hermitian, Hilbert-Schmidt orthonormal, spans F(Phi*)
    Mat projector;           // supermatrix of the averaged dual map
    Mat rho0;
    Mat support_p;
    Mat support_iso;         // columns: orthonormal basis of the range of support_p
    bool faithful = false;
    std::vector<Mat> restricted_basis;  // on the compressed support
    bool algebra_certified = false;
    double algebra_defect = 0.0;
    bool commutant_checked = false;
    bool commutant_agrees = false;
    double commutant_defect = 0.0;
    bool full_algebra_certified = false;  // only meaningful when faithful
    double idempotence_defect = 0.0;      // ||Pi^2 - Pi||
    double invariance_defect = 0.0;       // ||M Pi - Pi||
};

namespace fixpt {

FixedPointAnalysis analyze_fixed_points(const OperationMap& phi, const Tolerance& tol = {});

Mat average_dual(const FixedPointAnalysis& a, const Mat& op);   // Phi*_av
Mat average(const FixedPointAnalysis& a, const Mat& state);     // Phi_av

// The compressed channel t -> V^dagger Phi(V t V^dagger) V on the support of P.
OperationMap compressed_channel(const FixedPointAnalysis& a, const OperationMap& phi);

// Hermitian orthonormal basis of the complex span of the given operators.
std::vector<Mat> hermitian_span(const std::vector<Mat>& ops, double threshold);
// Frobenius residual of op after projection onto span(basis) (basis orthonormal).
double span_residual(const std::vector<Mat>& basis, const Mat& op);
// Max residual in either direction; zero when the spans coincide.
double subspace_distance(const std::vector<Mat>& a, const std::vector<Mat>& b);
// Basis of {X : [K, X] = [K^dagger, X] = 0 for all Kraus K}.
std::vector<Mat> kraus_commutant(const OperationMap& phi, const Tolerance& tol = {});

std::vector<measure::Check> check_support_projection(const FixedPointAnalysis& a, const OperationMap& phi,
                                          const Tolerance& tol = {});

// Bijection and subspace identities between F(Phi*) and the compressed fixed points.
std::vector<measure::Check> check_restriction(const FixedPointAnalysis& a, const OperationMap& phi,
                                              const Tolerance& tol = {});

struct StructuralReport {
    bool hypothesis_violated = false;
    int support_rank = 0;
    bool non_disturbed = false;
    bool first_kind = false;
    bool repeatable = false;
    std::vector<measure::Check> items;
};

StructuralReport structural_necessary_conditions(const MeasurementScheme& m, const Observable& f,
                                                 const AdditiveQuantity& q, const Tolerance& tol = {});

struct NormOneResult {
    Observable g;
    std::vector<Mat> r;        // projections R(z) lifted to the full space
    std::vector<Mat> states;   // rho_z
    double fixed_defect = 0.0;            // max ||Phi*(G(z)) - G(z)||
    double distinguishability_defect = 0.0;  // max |tr[G(y) Phi(rho_z)] - delta|
    bool sharp = false;
};

NormOneResult nondisturbed_norm1_observable(const OperationMap& phi, const Observable& f,
                                            const Tolerance& tol = {});

struct PostProcessing {
    Observable g;
    Mat p;  // rows: outcomes of E, columns: outcomes of G
    double reconstruction_defect = 0.0;
};

PostProcessing post_processing_decomposition(const Instrument& inst, const Tolerance& tol = {});

}  // namespace fixpt
}  // namespace waylab
