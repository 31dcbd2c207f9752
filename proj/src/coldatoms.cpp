#include "qmb/coldatoms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmb::coldatoms {

double helium_energy(double z_eff) {
  if (z_eff <= 0.0) throw std::invalid_argument("helium_energy: z must be positive");
  return z_eff * z_eff - (27.0 / 8.0) * z_eff;
}

HeliumMinimum helium_minimize() {
  HeliumMinimum m;
  m.z_star = 27.0 / 16.0;
  m.e_min = -729.0 / 256.0;
  return m;
}

double bh_energy_per_site(const BoseHubbardMF& m) {
  if (m.n_star < 1 || m.zj_over_u < 0.0 || m.epsilon < 0.0 || m.epsilon > 0.5)
    throw std::invalid_argument("bh_energy_per_site: parameters out of range");
  const double n = m.n_star;
  const double hop = std::sqrt(n) + std::sqrt(n + 1.0);
  return -m.zj_over_u * m.epsilon * (1.0 - 2.0 * m.epsilon) * hop * hop +
         0.5 * (2.0 * m.epsilon + n * (n - 1.0)) - m.mu_over_u * n;
}

double bh_critical_point(int n_star) {
  if (n_star < 1) throw std::invalid_argument("bh_critical_point: n* >= 1");
  const double s = std::sqrt(double(n_star)) + std::sqrt(double(n_star) + 1.0);
  return s * s;
}

MottLobe mott_lobes(int n, double zj_over_u) {
  if (n < 1 || zj_over_u < 0.0)
    throw std::invalid_argument("mott_lobes: parameters out of range");
  MottLobe lobe;
  lobe.mu_lower_over_u = n - 1.0 + 2.0 * n * zj_over_u;
  lobe.mu_upper_over_u = n - 2.0 * (n - 1.0) * zj_over_u;
  lobe.closed = lobe.mu_lower_over_u >= lobe.mu_upper_over_u;
  return lobe;
}

BandParameters band_parameters(const LatticeParams& p) {
  if (p.v0_over_er <= 0.0)
    throw std::invalid_argument("band_parameters: lattice depth must be positive");
  const double v = p.v0_over_er;
  BandParameters out;
  out.shallow_lattice = v < 5.0;
  out.bandwidth = p.recoil_er * (16.0 / std::sqrt(std::numbers::pi)) *
                  std::pow(v, 0.75) * std::exp(-4.0 * std::sqrt(v));
  out.j_hop = out.bandwidth / 4.0;
  out.a_osc = 1.0 / (p.k_l * std::pow(v, 0.25));
  out.u_onsite = std::sqrt(8.0 / std::numbers::pi) * p.k_l * p.a_s * p.recoil_er *
                 std::pow(v, 0.75);
  return out;
}

}  // namespace qmb::coldatoms
