#include "qmb/qmc.hpp"

#include <cmath>
#include <stdexcept>

#include "qmb/rng.hpp"

namespace qmb::qmc {

namespace {

struct BlockAccumulator {
  double sum = 0.0;
  double block_sum = 0.0;
  std::vector<double> block_means;

  void add(double value, long long per_block) {
    sum += value;
    block_sum += value;
    if (per_block > 0 &&
        static_cast<long long>(count_ + 1) % per_block == 0) {
      block_means.push_back(block_sum / double(per_block));
      block_sum = 0.0;
    }
    ++count_;
  }

  double mean() const { return sum / double(count_); }

  double standard_error() const {
    const std::size_t nb = block_means.size();
    if (nb < 2) return 0.0;
    double m = 0.0;
    for (double b : block_means) m += b;
    m /= double(nb);
    double var = 0.0;
    for (double b : block_means) var += (b - m) * (b - m);
    return std::sqrt(var / double(nb * (nb - 1)));
  }

 private:
  std::size_t count_ = 0;
};

}  // namespace

ClassicalLattice2D ClassicalLattice2D::polarized(int n_x, int n_y,
                                                 double coupling_x,
                                                 double coupling_y,
                                                 spin::Boundary boundary_x) {
  if (n_x < 1 || n_y < 1) throw std::invalid_argument("lattice size must be positive");
  ClassicalLattice2D l;
  l.n_x = n_x;
  l.n_y = n_y;
  l.coupling_x = coupling_x;
  l.coupling_y = coupling_y;
  l.boundary_x = boundary_x;
  l.spins.assign(std::size_t(n_x) * n_y, 1);
  return l;
}

double ClassicalLattice2D::energy() const {
  long long sum_x = 0, sum_y = 0;
  for (int y = 0; y < n_y; ++y) {
    for (int x = 0; x < n_x; ++x) {
      const int s = at(x, y);
      if (x + 1 < n_x)
        sum_x += s * at(x + 1, y);
      else if (boundary_x == spin::Boundary::periodic && n_x > 1)
        sum_x += s * at(0, y);
      if (n_y > 1) sum_y += s * at(x, (y + 1) % n_y);
    }
  }
  return -coupling_x * double(sum_x) - coupling_y * double(sum_y);
}

double ClassicalLattice2D::magnetization() const {
  long long s = 0;
  for (const auto v : spins) s += v;
  return double(s) / double(spins.size());
}

MappingParameters map_parameters(double beta, double g, int n_y) {
  if (beta <= 0.0 || g <= 0.0 || n_y < 2)
    throw std::invalid_argument("map_parameters: need beta > 0, g > 0, n_y >= 2");
  MappingParameters p;
  p.beta = beta;
  p.g = g;
  p.n_y = n_y;
  p.a = beta * g / double(n_y);
  p.gamma = -0.5 * std::log(std::tanh(p.a));
  p.lambda_factor = std::sqrt(std::sinh(p.a) * std::cosh(p.a));
  p.beta_cl = beta / double(n_y);
  return p;
}

double metropolis_acceptance(double delta_e, double beta) {
  if (delta_e <= 0.0) return 1.0;
  return std::exp(-beta * delta_e);
}

ChainStats metropolis_run(ClassicalLattice2D lattice, double beta_cl,
                          long long sweeps, long long thermalization,
                          std::uint64_t seed) {
  if (sweeps < 1) throw std::invalid_argument("metropolis_run: sweeps >= 1");
  if (thermalization < 0) throw std::invalid_argument("metropolis_run: thermalization >= 0");
  const int n_x = lattice.n_x;
  const int n_y = lattice.n_y;
  const long long n_sites = static_cast<long long>(n_x) * n_y;
  const bool periodic_x = lattice.boundary_x == spin::Boundary::periodic;

  // The flip energy 2 s (Kx Sx + Ky Sy) only takes a handful of values
  // (Sx in -2..2, Sy in {-2, 0, 2}), so the Boltzmann factors are
  // tabulated once.
  double accept[2][5][5];
  for (int si = 0; si < 2; ++si)
    for (int sx = -2; sx <= 2; ++sx)
      for (int sy = -2; sy <= 2; ++sy) {
        const double s = si == 0 ? -1.0 : 1.0;
        const double de =
            2.0 * s * (lattice.coupling_x * sx + lattice.coupling_y * sy);
        accept[si][sx + 2][sy + 2] = metropolis_acceptance(de, beta_cl);
      }

  // Integer bond bookkeeping keeps the running energy exact.
  long long spin_sum = 0;
  long long bonds_x = 0, bonds_y = 0;
  for (int y = 0; y < n_y; ++y)
    for (int x = 0; x < n_x; ++x) {
      const int s = lattice.at(x, y);
      spin_sum += s;
      if (x + 1 < n_x)
        bonds_x += s * lattice.at(x + 1, y);
      else if (periodic_x && n_x > 1)
        bonds_x += s * lattice.at(0, y);
      if (n_y > 1) bonds_y += s * lattice.at(x, (y + 1) % n_y);
    }

  Rng rng(seed);
  BlockAccumulator abs_m, energy, m2, m4;
  long long accepted = 0, proposed = 0;
  const long long per_block = std::max<long long>(1, sweeps / 32);

  for (long long sweep = 0; sweep < thermalization + sweeps; ++sweep) {
    const bool measuring = sweep >= thermalization;
    for (long long step = 0; step < n_sites; ++step) {
      const std::uint32_t site = rng.next_index(std::uint32_t(n_sites));
      const int x = int(site % n_x);
      const int y = int(site / n_x);
      const int s = lattice.at(x, y);
      int sx = 0;
      if (x + 1 < n_x)
        sx += lattice.at(x + 1, y);
      else if (periodic_x && n_x > 1)
        sx += lattice.at(0, y);
      if (x > 0)
        sx += lattice.at(x - 1, y);
      else if (periodic_x && n_x > 1)
        sx += lattice.at(n_x - 1, y);
      int sy = 0;
      if (n_y > 1) {
        sy += lattice.at(x, (y + 1) % n_y);
        sy += lattice.at(x, (y + n_y - 1) % n_y);
      }
      const double p = accept[s > 0 ? 1 : 0][sx + 2][sy + 2];
      bool take = p >= 1.0;
      if (!take) take = rng.next_double() < p;
      if (measuring) {
        ++proposed;
        if (take) ++accepted;
      }
      if (take) {
        lattice.at(x, y) = static_cast<signed char>(-s);
        spin_sum -= 2 * s;
        bonds_x -= 2 * s * sx;
        bonds_y -= 2 * s * sy;
      }
    }
    if (measuring) {
      const double m = double(spin_sum) / double(n_sites);
      const double e = (-lattice.coupling_x * double(bonds_x) -
                        lattice.coupling_y * double(bonds_y)) /
                       double(n_sites);
      abs_m.add(std::abs(m), per_block);
      energy.add(e, per_block);
      m2.add(m * m, per_block);
      m4.add(m * m * m * m, per_block);
    }
  }

  ChainStats stats;
  stats.samples = sweeps;
  stats.mean_abs_magnetization = abs_m.mean();
  stats.mean_energy_per_site = energy.mean();
  const double mm2 = m2.mean();
  stats.binder_cumulant = mm2 > 0.0 ? 1.0 - m4.mean() / (3.0 * mm2 * mm2) : 0.0;
  stats.stderr_abs_magnetization = abs_m.standard_error();
  stats.stderr_energy_per_site = energy.standard_error();
  stats.acceptance_rate = proposed > 0 ? double(accepted) / double(proposed) : 0.0;
  return stats;
}

double critical_line_residual(double beta_cl, double coupling_ratio) {
  return std::sinh(2.0 * beta_cl) * std::sinh(2.0 * beta_cl * coupling_ratio) - 1.0;
}

ChainStats tfim_qmc_magnetization(int n_x, double g, double beta, int n_y,
                                  long long sweeps, std::uint64_t seed,
                                  long long thermalization,
                                  spin::Boundary boundary_x) {
  const MappingParameters p = map_parameters(beta, g, n_y);
  if (thermalization < 0) thermalization = sweeps / 5;
  // In H_cl units the chain bond is the energy scale; the Trotter-direction
  // coupling gamma/beta_cl then reproduces the Boltzmann exponent at the
  // classical temperature beta_cl.
  auto lattice = ClassicalLattice2D::polarized(n_x, n_y, 1.0, p.gamma / p.beta_cl,
                                               boundary_x);
  return metropolis_run(std::move(lattice), p.beta_cl, sweeps, thermalization, seed);
}

SignReweighted sign_reweight(const std::vector<SignedSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("sign_reweight: no samples");
  double sum_ap = 0.0, sum_p = 0.0, sum_abs = 0.0;
  for (const auto& s : samples) {
    if (s.weight == 0.0)
      throw std::invalid_argument("sign_reweight: zero weight");
    sum_ap += s.value * s.weight;
    sum_p += s.weight;
    sum_abs += std::abs(s.weight);
  }
  if (sum_p == 0.0 || std::abs(sum_p) < 1e-15 * sum_abs)
    throw std::domain_error("sign_reweight: sign sum vanished (fatal sign problem)");
  SignReweighted out;
  out.estimate = sum_ap / sum_p;
  out.mean_sign = sum_p / sum_abs;
  return out;
}

}  // namespace qmb::qmc
