#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace waylab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Raised for malformed user input (bad dimensions, non-PSD effects, ...).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerance {
    double eq_tol = 1e-9;
    double rank_tol = 1e-8;

    void validate() const;
};

// Defaults, with eq_tol replaced by WAYLAB_TOL when that variable is set.
Tolerance tolerance_from_env();

namespace opcore {

enum class Keep { System, Apparatus };

Mat identity(int d);
Mat zeros(int d);
Mat ket_bra(const Vec& ket, const Vec& bra);
Mat projector(const Vec& v);
Vec basis_ket(int d, int i);
Mat matrix_unit(int d, int i, int j);

Mat tensor(const Mat& a, const Mat& b);
Mat partial_trace(const Mat& t, Keep keep, int dS, int dA);

Mat commutator(const Mat& a, const Mat& b);
double op_norm(const Mat& a);
cplx trace(const Mat& a);

bool is_square(const Mat& a);
bool is_hermitian(const Mat& a, const Tolerance& tol = {});
bool is_effect(const Mat& a, const Tolerance& tol = {});
bool is_projection(const Mat& a, const Tolerance& tol = {});
bool is_state(const Mat& a, const Tolerance& tol = {});
bool is_unitary(const Mat& a, const Tolerance& tol = {});

Mat hermitian_part(const Mat& a);

struct Eigh {
    RVec values;  // ascending
    Mat vectors;  // columns
};

// Eigendecomposition of the symmetrized input.
Eigh eigh(const Mat& a);
double min_eigenvalue(const Mat& a);
double max_eigenvalue(const Mat& a);

Mat psd_sqrt(const Mat& a, const Tolerance& tol = {});
Mat psd_inv_sqrt(const Mat& a, const Tolerance& tol = {});
Mat hermitian_function(const Mat& a, double (*f)(double));
Mat expi_hermitian(const Mat& h);  // exp(iH)

double fidelity(const Mat& rho, const Mat& sigma, const Tolerance& tol = {});
double root_fidelity(const Mat& rho, const Mat& sigma, const Tolerance& tol = {});

Mat eigenspace_projector(const Mat& a, double value, const Tolerance& tol = {});

// Orthonormal basis of the support (eigenvalue > rank_tol) of a PSD operator.
Mat support_isometry(const Mat& a, const Tolerance& tol = {});

// Column-stacking vectorization.
Vec vec(const Mat& a);
Mat unvec(const Vec& v, int rows, int cols);

// Orthonormal basis (columns) of the null space of m, singular values <= threshold.
Mat null_space(const Mat& m, double threshold);

}  // namespace opcore
}  // namespace waylab
