#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace spinsemi {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

constexpr double kEigenvalueClip = 1e-12;    // eigenvalues below this count as zero in entropies
constexpr double kDensityTolerance = 1e-10;  // trace and positivity slack for density matrices

Operator kron(const Operator& a, const Operator& b);

// For X on C^{d1} (x) C^{d2}, first leg slowest.
Operator trace_out_first(const Operator& x, int d1, int d2);
Operator trace_out_second(const Operator& x, int d1, int d2);

Eigen::VectorXd hermitian_eigenvalues(const Operator& h);
// f(H) through the spectral decomposition of the Hermitian part of H.
Operator hermitian_apply(const Operator& h, const std::function<double(double)>& f);

// vec(A) stacks columns.
Eigen::VectorXcd vec(const Operator& a);
Operator unvec(const Eigen::VectorXcd& v, int rows, int cols);

// Throws ValidationError unless rho is Hermitian, PSD and trace one within kDensityTolerance.
void require_density(const Operator& rho, const char* what = "operator");

Operator matrix_unit(int n, int a, int b);

double max_abs(const Operator& a);

}  // namespace spinsemi
