#include "qmb/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmb/eigensolve.hpp"

namespace qmb::density {

namespace {

// Scatters the bits of a compact subsystem index onto the listed sites.
std::vector<std::uint64_t> scatter_table(const std::vector<int>& sites) {
  const std::size_t dim = std::size_t(1) << sites.size();
  std::vector<std::uint64_t> table(dim, 0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < sites.size(); ++k)
      if ((idx >> k) & 1) bits |= std::uint64_t(1) << sites[k];
    table[idx] = bits;
  }
  return table;
}

void check_partition(const Bipartition& cut, int n_sites) {
  if (cut.sites_a.empty() || cut.sites_b.empty())
    throw std::invalid_argument("bipartition: both subsystems must be non-empty");
  std::vector<bool> seen(n_sites, false);
  for (int s : cut.sites_a) {
    if (s < 0 || s >= n_sites || seen[s])
      throw std::invalid_argument("bipartition: invalid site set");
    seen[s] = true;
  }
  for (int s : cut.sites_b) {
    if (s < 0 || s >= n_sites || seen[s])
      throw std::invalid_argument("bipartition: invalid site set");
    seen[s] = true;
  }
  if (std::size_t(n_sites) != cut.sites_a.size() + cut.sites_b.size())
    throw std::invalid_argument("bipartition: sites must cover the system");
}

}  // namespace

Bipartition Bipartition::of(int n_sites, std::vector<int> sites_a) {
  Bipartition cut;
  cut.sites_a = std::move(sites_a);
  std::vector<bool> in_a(n_sites, false);
  for (int s : cut.sites_a) {
    if (s < 0 || s >= n_sites) throw std::invalid_argument("site out of range");
    in_a[s] = true;
  }
  for (int s = 0; s < n_sites; ++s)
    if (!in_a[s]) cut.sites_b.push_back(s);
  return cut;
}

void DensityMatrix::validate() const {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("density matrix must be square");
  if (matrix.hermiticity_defect() > 1e-12)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(matrix.trace() - cplx(1.0)) > 1e-12)
    throw std::invalid_argument("density matrix trace is not 1");
  const auto eig = eig::dense_eigh(matrix, false);
  if (eig.eigenvalues.front() < -1e-12)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

DensityMatrix pure_density(const spin::StateVector& state) {
  const std::size_t dim = state.dimension();
  DensityMatrix rho;
  rho.matrix = Matrix(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      rho.matrix(i, j) = state.amplitudes[i] * std::conj(state.amplitudes[j]);
  return rho;
}

DensityMatrix partial_trace(const spin::StateVector& state, const Bipartition& cut,
                            Keep keep) {
  check_partition(cut, state.n_sites);
  const auto& kept = (keep == Keep::A) ? cut.sites_a : cut.sites_b;
  const auto& traced = (keep == Keep::A) ? cut.sites_b : cut.sites_a;
  const auto kept_bits = scatter_table(kept);
  const auto traced_bits = scatter_table(traced);
  const std::size_t dk = kept_bits.size();
  DensityMatrix rho;
  rho.matrix = Matrix(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (const auto tb : traced_bits)
        s += state.amplitudes[kept_bits[i] | tb] *
             std::conj(state.amplitudes[kept_bits[j] | tb]);
      rho.matrix(i, j) = s;
    }
  return rho;
}

DensityMatrix partial_trace(const DensityMatrix& rho_in, int n_sites,
                            const Bipartition& cut, Keep keep) {
  check_partition(cut, n_sites);
  if (rho_in.dimension() != std::size_t(1) << n_sites)
    throw std::invalid_argument("partial_trace: dimension does not factorize");
  const auto& kept = (keep == Keep::A) ? cut.sites_a : cut.sites_b;
  const auto& traced = (keep == Keep::A) ? cut.sites_b : cut.sites_a;
  const auto kept_bits = scatter_table(kept);
  const auto traced_bits = scatter_table(traced);
  const std::size_t dk = kept_bits.size();
  DensityMatrix rho;
  rho.matrix = Matrix(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (const auto tb : traced_bits)
        s += rho_in.matrix(kept_bits[i] | tb, kept_bits[j] | tb);
      rho.matrix(i, j) = s;
    }
  return rho;
}

DensityMatrix reduce_split(const cvector& amplitudes, std::size_t dim_a,
                           std::size_t dim_b, Keep keep) {
  if (amplitudes.size() != dim_a * dim_b)
    throw std::invalid_argument("reduce_split: dimension does not factorize");
  DensityMatrix rho;
  if (keep == Keep::A) {
    rho.matrix = Matrix(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < dim_b; ++k)
          s += amplitudes[i * dim_b + k] * std::conj(amplitudes[j * dim_b + k]);
        rho.matrix(i, j) = s;
        rho.matrix(j, i) = std::conj(s);
      }
  } else {
    rho.matrix = Matrix(dim_b, dim_b);
    for (std::size_t i = 0; i < dim_b; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < dim_a; ++k)
          s += amplitudes[k * dim_b + i] * std::conj(amplitudes[k * dim_b + j]);
        rho.matrix(i, j) = s;
        rho.matrix(j, i) = std::conj(s);
      }
  }
  return rho;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  rho.validate();
  const auto eig = eig::dense_eigh(rho.matrix, false);
  double s = 0.0;
  for (double lambda : eig.eigenvalues) {
    if (lambda < 0.0) lambda = 0.0;  // clamped; validate() rejected anything below -1e-12
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

SchmidtSpectrum schmidt(const spin::StateVector& state, const Bipartition& cut) {
  const DensityMatrix rho_a = partial_trace(state, cut, Keep::A);
  const auto eig = eig::dense_eigh(rho_a.matrix);
  const std::size_t da = rho_a.dimension();
  const std::size_t db = state.dimension() / da;

  // Descending eigenvalue order.
  std::vector<std::size_t> order(da);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return eig.eigenvalues[x] > eig.eigenvalues[y];
  });

  const auto kept_bits = scatter_table(cut.sites_a);
  const auto traced_bits = scatter_table(cut.sites_b);

  SchmidtSpectrum out;
  out.left_vectors = Matrix(da, da);
  out.right_vectors = Matrix(db, da);
  std::size_t rank = 0;
  for (std::size_t r = 0; r < da; ++r) {
    const double lambda = std::max(0.0, eig.eigenvalues[order[r]]);
    const double c = std::sqrt(lambda);
    if (c < 1e-14) break;  // remaining coefficients are numerically zero
    out.coefficients.push_back(c);
    for (std::size_t i = 0; i < da; ++i)
      out.left_vectors(i, rank) = eig.eigenvectors(i, order[r]);
    // |chi_r> = (<phi_r| (x) I) |psi> / c_r
    for (std::size_t j = 0; j < db; ++j) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < da; ++i)
        s += std::conj(out.left_vectors(i, rank)) *
             state.amplitudes[kept_bits[i] | traced_bits[j]];
      out.right_vectors(j, rank) = s / c;
    }
    ++rank;
  }
  return out;
}

}  // namespace qmb::density
