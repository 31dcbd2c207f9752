#ifndef QMB_SPIN_CHAIN_HPP
#define QMB_SPIN_CHAIN_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qmb/matrix.hpp"

namespace qmb::spin {

enum class Boundary { open, periodic };

// One basis state of a spin-1/2 chain. Bit i of `bits` is the spin at
// site i, with 1 = up (sigma_z eigenvalue +1). Flipping site i is a XOR
// with (1 << i), which is what makes the matrix-free Hamiltonian cheap.
struct SpinConfiguration {
  std::uint64_t bits = 0;
  int n_sites = 1;

  int spin(int site) const { return (bits >> site) & 1 ? +1 : -1; }
  SpinConfiguration flipped(int site) const {
    return {bits ^ (std::uint64_t(1) << site), n_sites};
  }
};

// Transverse-field Ising chain  H = g sum_i sx_i - sum_<ij> sz_i sz_j,
// applied matrix-free. Energies are in units of the bond coupling.
struct TfimHamiltonian {
  int n_sites = 2;
  double g = 1.0;
  Boundary boundary = Boundary::open;
};

struct StateVector {
  cvector amplitudes;
  int n_sites = 0;

  static StateVector zero(int n_sites);
  // Basis state with the given bit pattern.
  static StateVector basis(int n_sites, std::uint64_t bits);
  static StateVector random_unit(int n_sites, std::uint64_t seed);

  std::size_t dimension() const { return amplitudes.size(); }
  double norm() const { return vec_norm(amplitudes); }
  // Rescales to unit norm; the result satisfies |norm - 1| <= 1e-12.
  void normalize();
};

struct ObservableSpec {
  enum class Kind {
    magnetization_z_sq,
    magnetization_z,
    transverse_magnetization,
    zz_correlation,
    energy,
  };

  Kind kind = Kind::magnetization_z;
  int site_i = 0;  // zz_correlation only
  int site_j = 0;

  static ObservableSpec magnetization_z_sq() { return {Kind::magnetization_z_sq}; }
  static ObservableSpec magnetization_z() { return {Kind::magnetization_z}; }
  static ObservableSpec transverse_magnetization() {
    return {Kind::transverse_magnetization};
  }
  static ObservableSpec zz_correlation(int i, int j) {
    return {Kind::zz_correlation, i, j};
  }
  static ObservableSpec energy() { return {Kind::energy}; }
};

// Counts how many amplitude updates a matrix-free application performed;
// each basis state touches exactly N+1 output entries (one diagonal, N
// single-flip neighbours), so the total is (N+1) * 2^N.
struct ApplyStats {
  std::uint64_t entry_updates = 0;
};

// Diagonal part -sum sz_i sz_j of one configuration.
double bond_energy(std::uint64_t bits, int n_sites, Boundary boundary);

// y = H x, unnormalized.
StateVector apply_tfim(const TfimHamiltonian& h, const StateVector& v,
                       ApplyStats* stats = nullptr);

// Dense 2^N x 2^N realization of the same operator; oracle for tests.
// Guarded at n_sites <= 14.
Matrix dense_tfim(const TfimHamiltonian& h);

// <v|O|v> for a normalized state. `h` is required for the energy kind.
double expectation(const ObservableSpec& spec, const StateVector& v,
                   const TfimHamiltonian* h = nullptr);

}  // namespace qmb::spin

#endif
