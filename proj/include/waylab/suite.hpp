#pragma once

#include "waylab/random.hpp"
#include "waylab/scenario.hpp"

#include <cstdint>

namespace waylab::suite {

using scenario::json;

struct Criterion {
    int id = 0;
    std::string title;
    bool pass = false;
    json detail;
};

constexpr int kCriteria = 9;

Criterion run_criterion(int id);
// Criteria 1..9 plus every builtin scenario at default parameters.  No timings, so the
// output is a pure function of the code.
json battery();

// Generators shared with the tests.
struct ConservativeScenario {
    MeasurementScheme scheme;
    AdditiveQuantity q;
    Observable f;
    Observable target;
    Vec psi, phi;
};
ConservativeScenario conservative_scenario(std::uint64_t seed);

Observable b_lambda(double lambda);
Observable sharp_qubit();
OperationMap qutrit_channel();
Mat qutrit_quantity();

// Channel families used by the fixed-point checks; kind cycles through five shapes.
OperationMap structured_channel(random::Rng& rng, int d, int kind);
OperationMap structured_unital_channel(random::Rng& rng, int d, int kind);

// Instrument on C^3 whose fixed states live on span{|0>,|1>}; the induced observable
// {diag(1,0,a), diag(0,1,1-a)} is fixed but unsharp.  Conjugated by u.
Instrument leak_instrument(double a, const Mat& u);

// F = M G for a random rank-1 sharp G and a random invertible column-stochastic M.
struct StochasticMix {
    Observable g;
    Mat m;  // real entries, rows index F, columns index G
    Observable f;
};
StochasticMix stochastic_mix(random::Rng& rng, int d);

}  // namespace waylab::suite
