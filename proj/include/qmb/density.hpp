#ifndef QMB_DENSITY_HPP
#define QMB_DENSITY_HPP

#include <vector>

#include "qmb/matrix.hpp"
#include "qmb/spin_chain.hpp"

namespace qmb::density {

// Hermitian, unit-trace, positive-semidefinite (within 1e-12 each).
struct DensityMatrix {
  Matrix matrix;

  std::size_t dimension() const { return matrix.rows(); }
  // Throws when one of the three defining properties is violated.
  void validate() const;
};

// Schmidt coefficients sorted descending; squared they sum to one and
// equal the common nonzero spectrum of both reduced density matrices.
struct SchmidtSpectrum {
  std::vector<double> coefficients;
  Matrix left_vectors;   // columns, dimension of subsystem A
  Matrix right_vectors;  // columns, dimension of subsystem B
};

struct Bipartition {
  std::vector<int> sites_a;
  std::vector<int> sites_b;

  // Splits [0, n) into A = given sites, B = complement.
  static Bipartition of(int n_sites, std::vector<int> sites_a);
};

enum class Keep { A, B };

DensityMatrix pure_density(const spin::StateVector& state);

DensityMatrix partial_trace(const spin::StateVector& state, const Bipartition& cut,
                            Keep keep);
DensityMatrix partial_trace(const DensityMatrix& rho, int n_sites,
                            const Bipartition& cut, Keep keep);

// Reduced density matrix when the state is a plain A x B product of two
// bases of the given dimensions (amplitudes indexed ia * dim_b + ib).
// Used by DMRG, whose block bases are not spin-site products.
DensityMatrix reduce_split(const cvector& amplitudes, std::size_t dim_a,
                           std::size_t dim_b, Keep keep);

// S = -Tr(rho log rho) in nats; eigenvalues in [-1e-12, 0) are clamped.
double von_neumann_entropy(const DensityMatrix& rho);

SchmidtSpectrum schmidt(const spin::StateVector& state, const Bipartition& cut);

}  // namespace qmb::density

#endif
