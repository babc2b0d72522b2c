#pragma once

#include "waylab/conserve.hpp"

#include <optional>
#include <vector>

namespace waylab {

struct DisturbanceProfile {
    std::vector<Mat> defects;  // I*_X(F(y)) - F(y)
    std::vector<double> norms;
    double global = 0.0;
};

struct ErrorProfile {
    std::vector<Mat> defects;  // Lambda*(Z(x)) - E(x)
    std::vector<double> norms;
    double global = 0.0;
};

namespace bounds {

// Static gating table: which conservation notion each bound family needs.
enum class Gate { None, Average, Full, WeakYanase, WeakYanaseAndFull };
Gate gate_of(const std::string& bound_id);
const char* gate_name(Gate g);
std::vector<std::string> bound_ids();

DisturbanceProfile disturbance_profile(const Instrument& inst, const Observable& f);
ErrorProfile error_profile(const MeasurementScheme& m, const Observable& target);

// ||Gamma_xi^E(N^2) - Gamma_xi^E(N)^2||
double scheme_variance(const MeasurementScheme& m, const AdditiveQuantity& q);

std::vector<BoundReport> eval_disturbance_bounds(const MeasurementScheme& m, const Observable& f,
                                                 const std::optional<AdditiveQuantity>& q,
                                                 bool assert_extremal, const Tolerance& tol = {});

std::vector<BoundReport> eval_measurability_bounds(const MeasurementScheme& m, const Observable& target,
                                                   const AdditiveQuantity& q, bool assert_extremal,
                                                   const Tolerance& tol = {});

// Without a target the measured observable of the scheme is used.
std::vector<BoundReport> eval_way(const MeasurementScheme& m, const AdditiveQuantity& q,
                                  const std::optional<Observable>& target = std::nullopt,
                                  bool assert_extremal = false, const Tolerance& tol = {});

std::vector<BoundReport> eval_distinguishability_bounds(const MeasurementScheme& m, const AdditiveQuantity& q,
                                                        const Vec& psi, const Vec& phi,
                                                        const Tolerance& tol = {});

// Unit vectors spanning the top eigenspaces of E(x) and 1 - E(x).
std::pair<Vec, Vec> extremal_pair(const Mat& effect);

// Reports on the compressed commutator ||[E(x), P(X) N_S P(X)]|| for repeatable instruments.
std::vector<BoundReport> eval_repeatable_commutation(const MeasurementScheme& m, const AdditiveQuantity& q,
                                                     const Tolerance& tol = {});

}  // namespace bounds
}  // namespace waylab
