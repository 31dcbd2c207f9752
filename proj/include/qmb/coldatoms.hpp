#ifndef QMB_COLDATOMS_HPP
#define QMB_COLDATOMS_HPP

namespace qmb::coldatoms {

// Helium ground state with the shielded product ansatz, atomic units:
// <H>(z) = z^2 - (27/8) z.
double helium_energy(double z_eff);

struct HeliumMinimum {
  double z_star = 0.0;
  double e_min = 0.0;
};
// Closed-form stationary point z* = 27/16, E = -729/256.
HeliumMinimum helium_minimize();

// Mean-field Bose-Hubbard ansatz sqrt(1-eps)|n*> + sqrt(eps)|n*+-1>.
struct BoseHubbardMF {
  int n_star = 1;
  double zj_over_u = 0.0;
  double epsilon = 0.0;  // in [0, 1/2]
  double mu_over_u = 0.0;
};

// Variational energy per site in units of U.
double bh_energy_per_site(const BoseHubbardMF& m);

// U_c / zJ = (sqrt(n*) + sqrt(n*+1))^2.
double bh_critical_point(int n_star);

struct MottLobe {
  double mu_lower_over_u = 0.0;
  double mu_upper_over_u = 0.0;
  bool closed = false;  // lower >= upper
};
// Lower branch n-1 + 2n zJ/U, upper branch n - 2(n-1) zJ/U.
MottLobe mott_lobes(int n, double zj_over_u);

struct LatticeParams {
  double v0_over_er = 10.0;  // lattice depth V0 / E_r
  double recoil_er = 1.0;    // energy unit
  double k_l = 1.0;          // laser wavevector
  double a_s = 0.0;          // s-wave scattering length, units of 1/k_l
};

struct BandParameters {
  double bandwidth = 0.0;   // W, Mathieu asymptotic, in energy units
  double j_hop = 0.0;       // J = W / 4
  double a_osc = 0.0;       // oscillator length 1 / (k_l (V0/E_r)^{1/4})
  double u_onsite = 0.0;    // sqrt(8/pi) k_l a_s E_r (V0/E_r)^{3/4}
  bool shallow_lattice = false;  // set when V0/E_r < 5; W is asymptotic
};

BandParameters band_parameters(const LatticeParams& p);

}  // namespace qmb::coldatoms

#endif
