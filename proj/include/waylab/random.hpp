#pragma once

#include "waylab/measure.hpp"

#include <cstdint>
#include <random>

namespace waylab::random {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed);

Mat ginibre(Rng& rng, int rows, int cols);
Mat haar_unitary(Rng& rng, int d);
Mat random_hermitian(Rng& rng, int d);
Vec random_pure(Rng& rng, int d);
// Reduced state of a Haar-random pure state on C^d (x) C^env.
Mat random_state(Rng& rng, int d, int env = 0);
Observable random_povm(Rng& rng, int d, int n);
Observable random_sharp_observable(Rng& rng, int d, int n);
OperationMap random_channel(Rng& rng, int d, int kraus);
OperationMap random_unital_channel(Rng& rng, int d, int terms);
// exp(iH) with H block diagonal in the eigenspaces of n.
Mat conservative_unitary(Rng& rng, const Mat& n, const Tolerance& tol = {});

}  // namespace waylab::random
