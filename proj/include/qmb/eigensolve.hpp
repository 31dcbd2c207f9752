#ifndef QMB_EIGENSOLVE_HPP
#define QMB_EIGENSOLVE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "qmb/matrix.hpp"
#include "qmb/spin_chain.hpp"

namespace qmb::eig {

// Hermitian operator given by its action on a vector; the large spin
// Hamiltonians never exist as matrices.
struct LinearOperator {
  std::size_t dimension = 0;
  std::function<void(const cvector&, cvector&)> apply;

  static LinearOperator from_matrix(const Matrix& m);
  static LinearOperator from_tfim(const spin::TfimHamiltonian& h);
};

struct SolverConfig {
  double tolerance = 1e-10;  // absolute ground-energy change between iterations
  int max_iterations = 20000;
  std::uint64_t seed = 1;
  double shift = 0.0;             // power method only
  bool reorthogonalize = true;    // Lanczos only
};

struct EigenResult {
  double energy = 0.0;
  cvector vector;
  int iterations = 0;
  double residual_norm = 0.0;  // |H v - E v|
  bool converged = false;
};

// a[n] = <phi_n|H|phi_n> / <phi_n|phi_n>, b[n]^2 = <phi_n|phi_n> /
// <phi_{n-1}|phi_{n-1}>; with unit-normalized Krylov vectors the b[n] are
// the subdiagonal entries directly.
struct LanczosCoefficients {
  std::vector<double> a;
  std::vector<double> b;  // size a.size() - 1
  int iterations = 0;
};

struct LanczosOutcome {
  EigenResult eigen;
  LanczosCoefficients coefficients;
};

struct TridiagonalMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;  // size diag.size() - 1
};

struct TridiagonalEigen {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column i pairs with eigenvalues[i]
};

struct EighResult {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // empty when compute_vectors = false
};

// Iterates v <- normalize((H - shift) v) until the Rayleigh quotient of H
// changes by less than the tolerance. The shift must make the target state
// dominant in |eigenvalue| of H - shift.
EigenResult power_method(const LinearOperator& op, const SolverConfig& cfg);

// Lanczos with full reorthogonalization (on by default). Optionally
// warm-started from `initial`. On the b^2 < 1e-28 breakdown the current
// subspace is exact and the result is returned as converged.
LanczosOutcome lanczos(const LinearOperator& op, const SolverConfig& cfg,
                       const cvector* initial = nullptr);

// Implicit-shift QL on a symmetric tridiagonal matrix.
TridiagonalEigen tridiagonal_eigen(const TridiagonalMatrix& t);

// Full spectral decomposition of a Hermitian matrix by orthogonal
// similarity transforms: Householder reduction + QL for real input,
// cyclic two-sided Jacobi rotations for complex input. Guarded at
// dimension 4096.
EighResult dense_eigh(const Matrix& m, bool compute_vectors = true);

// Tr{O exp(-beta H)} / Tr{exp(-beta H)} from the full spectrum, with the
// weights stabilized by subtracting the lowest eigenvalue. Guarded at
// n_sites <= 12.
double thermal_expectation(const spin::TfimHamiltonian& h,
                           const spin::ObservableSpec& spec, double beta);

cvector random_unit_vector(std::size_t dim, std::uint64_t seed);

}  // namespace qmb::eig

#endif
