#ifndef QMB_QMC_HPP
#define QMB_QMC_HPP

#include <cstdint>
#include <vector>

#include "qmb/spin_chain.hpp"

namespace qmb::qmc {

// Coefficients of the quantum-classical mapping for the transverse-field
// Ising chain: a = beta*g/n_y, Lambda = sqrt(sinh a cosh a),
// gamma = -log(tanh a)/2, beta_cl = beta/n_y. The Boltzmann exponent of
// the mapped model carries gamma on the Trotter direction and beta/n_y on
// the chain direction.
struct MappingParameters {
  double beta = 0.0;
  double g = 0.0;
  int n_y = 0;
  double a = 0.0;
  double gamma = 0.0;
  double lambda_factor = 0.0;
  double beta_cl = 0.0;

  double coupling_exponent_y() const { return gamma; }
  double coupling_exponent_x() const { return beta_cl; }
};

struct ClassicalLattice2D {
  int n_x = 0;
  int n_y = 0;
  std::vector<signed char> spins;  // +1 / -1, row-major (x fast)
  double coupling_x = 1.0;  // chain (quantum) direction
  double coupling_y = 1.0;  // Trotter direction, always periodic
  spin::Boundary boundary_x = spin::Boundary::periodic;

  // Cold start, all spins up.
  static ClassicalLattice2D polarized(int n_x, int n_y, double coupling_x,
                                      double coupling_y,
                                      spin::Boundary boundary_x);

  signed char& at(int x, int y) { return spins[std::size_t(y) * n_x + x]; }
  signed char at(int x, int y) const { return spins[std::size_t(y) * n_x + x]; }

  // H_cl = -Kx sum_x-bonds s s - Ky sum_y-bonds s s
  double energy() const;
  double magnetization() const;
};

struct ChainStats {
  long long samples = 0;
  double mean_abs_magnetization = 0.0;
  double mean_energy_per_site = 0.0;
  double binder_cumulant = 0.0;
  double stderr_abs_magnetization = 0.0;
  double stderr_energy_per_site = 0.0;
  double acceptance_rate = 0.0;
};

struct SignedSample {
  double value = 0.0;   // A_i
  double weight = 0.0;  // p_i, may be negative but not zero
};

struct SignReweighted {
  double estimate = 0.0;
  double mean_sign = 0.0;
};

MappingParameters map_parameters(double beta, double g, int n_y);

// min(1, exp(-beta dE)); exposed so detailed balance can be checked on the
// acceptance function itself.
double metropolis_acceptance(double delta_e, double beta);

// Single-spin-flip Metropolis. One sweep proposes n_x*n_y flips at
// uniformly random sites; statistics are collected once per sweep after
// `thermalization` sweeps. Error bars come from 32-block averaging. The
// run is fully determined by the seed.
ChainStats metropolis_run(ClassicalLattice2D lattice, double beta_cl,
                          long long sweeps, long long thermalization,
                          std::uint64_t seed);

// sinh(2 beta_cl) sinh(2 beta_cl ratio) - 1; zero on the critical line.
double critical_line_residual(double beta_cl, double coupling_ratio);

// Maps the quantum chain onto the anisotropic 2D lattice and samples it;
// the classical |m| is the proxy for the quantum order parameter.
// thermalization < 0 selects the default of 20% of the sweeps.
ChainStats tfim_qmc_magnetization(int n_x, double g, double beta, int n_y,
                                  long long sweeps, std::uint64_t seed,
                                  long long thermalization = -1,
                                  spin::Boundary boundary_x = spin::Boundary::open);

// <A> = sum A_i p_i / sum p_i over signed weights, sampled with |p|;
// mean_sign = sum p_i / sum |p_i|. Throws when the sign sum vanishes.
SignReweighted sign_reweight(const std::vector<SignedSample>& samples);

}  // namespace qmb::qmc

#endif
