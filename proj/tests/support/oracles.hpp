#ifndef QMB_TESTS_ORACLES_HPP
#define QMB_TESTS_ORACLES_HPP

// Independent reference implementations used only by the tests: exhaustive
// enumeration for small classical lattices, the Onsager closed form, a 1-D
// golden-section minimizer, and dense matrix exponentials built from the
// spectral decomposition.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qmb/eigensolve.hpp"
#include "qmb/matrix.hpp"
#include "qmb/qmc.hpp"
#include "qmb/rng.hpp"

namespace oracles {

struct IsingExact {
  double mean_abs_magnetization = 0.0;
  double mean_energy_per_site = 0.0;
};

// Boltzmann average over all 2^(n_x n_y) configurations; uses the lattice
// energy convention so the comparison targets only the sampler.
inline IsingExact enumerate_ising(int n_x, int n_y, double beta,
                                  double coupling_x, double coupling_y,
                                  qmb::spin::Boundary boundary_x) {
  auto lattice = qmb::qmc::ClassicalLattice2D::polarized(n_x, n_y, coupling_x,
                                                         coupling_y, boundary_x);
  const int n = n_x * n_y;
  const std::size_t total = std::size_t(1) << n;
  double z = 0.0, num_m = 0.0, num_e = 0.0;
  for (std::size_t bits = 0; bits < total; ++bits) {
    for (int i = 0; i < n; ++i)
      lattice.spins[i] = (bits >> i) & 1 ? 1 : -1;
    const double e = lattice.energy();
    const double w = std::exp(-beta * e);
    z += w;
    num_m += w * std::abs(lattice.magnetization());
    num_e += w * e / double(n);
  }
  return {num_m / z, num_e / z};
}

// Spontaneous magnetization of the infinite isotropic 2D Ising model,
// (1 - sinh(2 beta)^-4)^(1/8) above beta_c.
inline double onsager_magnetization(double beta) {
  const double s = std::sinh(2.0 * beta);
  const double inside = 1.0 - 1.0 / (s * s * s * s);
  return inside > 0.0 ? std::pow(inside, 0.125) : 0.0;
}

inline double ising_beta_c() { return 0.5 * std::log(1.0 + std::sqrt(2.0)); }

inline double golden_section_minimize(const std::function<double(double)>& f,
                                      double lo, double hi, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// exp(i angle H) for Hermitian H via the full spectral decomposition.
inline qmb::Matrix exp_i_hermitian(const qmb::Matrix& h, double angle) {
  const auto eig = qmb::eig::dense_eigh(h);
  const std::size_t n = h.rows();
  qmb::Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      qmb::cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eig.eigenvectors(i, k) * std::polar(1.0, angle * eig.eigenvalues[k]) *
             std::conj(eig.eigenvectors(j, k));
      out(i, j) = s;
    }
  return out;
}

inline qmb::Matrix random_hermitian(std::size_t n, std::uint64_t seed) {
  qmb::Rng rng(seed);
  qmb::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = rng.next_symmetric();
    for (std::size_t j = i + 1; j < n; ++j) {
      const qmb::cplx v(rng.next_symmetric(), rng.next_symmetric());
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

inline qmb::Matrix random_real_symmetric(std::size_t n, std::uint64_t seed) {
  qmb::Rng rng(seed);
  qmb::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = rng.next_symmetric();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rng.next_symmetric();
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  for (char c : text) {
    if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      row.push_back(field);
      field.clear();
      rows.push_back(row);
      row.clear();
    } else {
      field += c;
    }
  }
  return rows;
}

}  // namespace oracles

#endif
