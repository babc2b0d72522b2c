#pragma once

#include "waylab/opcore.hpp"

#include <string>
#include <vector>

namespace waylab {

// One evaluated inequality lhs <= rhs.
struct BoundReport {
    std::string bound_id;
    std::string outcome;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool satisfied = true;
    bool hypothesis_violated = false;
    std::string notes;
    std::string inputs_digest;
};

BoundReport make_report(std::string id, std::string outcome, double lhs, double rhs,
                        const Tolerance& tol, bool hypothesis_violated = false,
                        std::string notes = {});

// Completely positive map in Kraus form: t -> sum_i K_i t K_i^dagger.
struct OperationMap {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<Mat> kraus;

    static OperationMap from_kraus(std::vector<Mat> kraus);
    static OperationMap unitary(const Mat& u);
    static OperationMap identity(int d);
};

namespace cpmaps {

Mat apply(const OperationMap& phi, const Mat& t);
Mat apply_dual(const OperationMap& phi, const Mat& a);

// Phi*(a^dagger b) - Phi*(a^dagger) Phi*(b)
Mat sesquilinear(const OperationMap& phi, const Mat& a, const Mat& b);

BoundReport commutator_defect_bound(const OperationMap& phi, const Mat& a, const Mat& b,
                                    const Tolerance& tol = {});

struct MultiplicabilityResult {
    bool applicable = false;
    double precondition_defect = 0.0;
    bool holds = false;
    double witness = 0.0;
};

MultiplicabilityResult check_multiplicability(const OperationMap& phi, const Mat& b,
                                              const Tolerance& tol = {});

// phi2 after phi1
OperationMap compose(const OperationMap& phi2, const OperationMap& phi1);

// M with M vec(a) = vec(Phi*(a)), column stacking.
Mat to_supermatrix(const OperationMap& phi);

Mat choi(const OperationMap& phi);
OperationMap compress(const OperationMap& phi, const Tolerance& tol = {});

double trace_defect(const OperationMap& phi);  // || sum K^dagger K - 1 ||
bool is_channel(const OperationMap& phi, const Tolerance& tol = {});
bool is_operation(const OperationMap& phi, const Tolerance& tol = {});

// Sum of several maps with equal dimensions, as one Kraus list.
OperationMap sum(const std::vector<OperationMap>& maps);

}  // namespace cpmaps
}  // namespace waylab
