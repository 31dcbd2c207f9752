#include <doctest.h>

#include <cmath>

#include "qmb/qmc.hpp"
#include "support/oracles.hpp"

using namespace qmb;
using qmc::ClassicalLattice2D;
using qmc::SignedSample;
using spin::Boundary;

TEST_SUITE_BEGIN("qmc");

TEST_CASE("map_parameters closed forms") {
  const auto p = qmc::map_parameters(1.0, 1.0, 8);
  CHECK(p.a == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(p.gamma == doctest::Approx(-0.5 * std::log(std::tanh(0.125))));
  CHECK(p.gamma == doctest::Approx(1.04232).epsilon(1e-5));
  CHECK(p.lambda_factor ==
        doctest::Approx(std::sqrt(std::sinh(0.125) * std::cosh(0.125))));
  CHECK(p.lambda_factor == doctest::Approx(0.35540).epsilon(1e-4));
  CHECK(p.beta_cl == doctest::Approx(0.125));
  CHECK(p.coupling_exponent_y() == doctest::Approx(p.gamma));
  CHECK(p.coupling_exponent_x() == doctest::Approx(0.125));
}

TEST_CASE("gamma vanishes in the large-a limit") {
  const auto p = qmc::map_parameters(40.0, 2.0, 4);  // a = 20
  CHECK(p.gamma < 1e-15);
}

TEST_CASE("mapping depends on (beta, g, n_y) only through a") {
  const auto p1 = qmc::map_parameters(1.0, 1.0, 8);
  const auto p2 = qmc::map_parameters(2.0, 0.5, 8);  // same a = 0.125
  CHECK(p1.a == doctest::Approx(p2.a).epsilon(1e-15));
  CHECK(p1.gamma == doctest::Approx(p2.gamma).epsilon(1e-15));
  CHECK(p1.lambda_factor == doctest::Approx(p2.lambda_factor).epsilon(1e-15));
  const auto p3 = qmc::map_parameters(4.0, 0.25, 8);
  CHECK(p3.gamma == doctest::Approx(p1.gamma).epsilon(1e-15));
}

TEST_CASE("map_parameters rejects non-positive input") {
  CHECK_THROWS_AS(qmc::map_parameters(0.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(qmc::map_parameters(1.0, -1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(qmc::map_parameters(1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("acceptance function satisfies detailed balance exactly") {
  for (const double beta : {0.2, 0.7, 1.3}) {
    for (const double de : {0.5, 1.0, 4.0, 17.0}) {
      const double forward = qmc::metropolis_acceptance(de, beta);
      const double backward = qmc::metropolis_acceptance(-de, beta);
      CHECK(backward == 1.0);
      CHECK(forward / backward == doctest::Approx(std::exp(-beta * de)).epsilon(1e-15));
    }
  }
  CHECK(qmc::metropolis_acceptance(0.0, 5.0) == 1.0);
}

TEST_CASE("infinite temperature accepts everything") {
  auto lattice =
      ClassicalLattice2D::polarized(16, 16, 1.0, 1.0, Boundary::periodic);
  const auto stats = qmc::metropolis_run(std::move(lattice), 0.0, 2000, 200, 1);
  CHECK(stats.acceptance_rate == 1.0);
  // Random-walk scale: |m| ~ 1/L with a generous window.
  CHECK(stats.mean_abs_magnetization < 0.05 + 3.0 * stats.stderr_abs_magnetization + 0.02);
}

TEST_CASE("small lattices reproduce exact enumeration") {
  struct Case {
    int n_x, n_y;
  };
  for (const auto& size : {Case{2, 2}, Case{3, 3}}) {
    for (const double beta : {0.2, 0.5, 1.0}) {
      CAPTURE(size.n_x);
      CAPTURE(beta);
      const auto exact = oracles::enumerate_ising(size.n_x, size.n_y, beta, 1.0,
                                                  1.0, Boundary::periodic);
      auto lattice = ClassicalLattice2D::polarized(size.n_x, size.n_y, 1.0, 1.0,
                                                   Boundary::periodic);
      const auto stats =
          qmc::metropolis_run(std::move(lattice), beta, 60000, 6000, 99);
      const double m_err = std::max(stats.stderr_abs_magnetization, 1e-4);
      const double e_err = std::max(stats.stderr_energy_per_site, 1e-4);
      CHECK(std::abs(stats.mean_abs_magnetization - exact.mean_abs_magnetization) <
            3.0 * m_err);
      CHECK(std::abs(stats.mean_energy_per_site - exact.mean_energy_per_site) <
            3.0 * e_err);
    }
  }
}

TEST_CASE("ordered phase matches the Onsager magnetization") {
  auto lattice =
      ClassicalLattice2D::polarized(16, 16, 1.0, 1.0, Boundary::periodic);
  const auto stats = qmc::metropolis_run(std::move(lattice), 1.0, 20000, 2000, 7);
  CHECK(stats.mean_abs_magnetization > 0.99);
  CHECK(oracles::onsager_magnetization(1.0) == doctest::Approx(0.99928).epsilon(1e-4));
  CHECK(std::abs(stats.mean_abs_magnetization -
                 oracles::onsager_magnetization(1.0)) < 0.005);
}

TEST_CASE("metropolis_run is deterministic in the seed") {
  auto make = [] {
    return ClassicalLattice2D::polarized(8, 8, 1.0, 1.0, Boundary::periodic);
  };
  const auto a = qmc::metropolis_run(make(), 0.4, 5000, 500, 1234);
  const auto b = qmc::metropolis_run(make(), 0.4, 5000, 500, 1234);
  CHECK(a.mean_abs_magnetization == b.mean_abs_magnetization);
  CHECK(a.mean_energy_per_site == b.mean_energy_per_site);
  CHECK(a.binder_cumulant == b.binder_cumulant);
  CHECK(a.acceptance_rate == b.acceptance_rate);
  const auto c = qmc::metropolis_run(make(), 0.4, 5000, 500, 4321);
  CHECK(a.mean_abs_magnetization != c.mean_abs_magnetization);
}

TEST_CASE("critical line residual") {
  const double beta_c = oracles::ising_beta_c();
  CHECK(qmc::critical_line_residual(beta_c, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(qmc::critical_line_residual(1.0, 1.0) ==
        doctest::Approx(std::sinh(2.0) * std::sinh(2.0) - 1.0));
  CHECK(std::sinh(2.0) * std::sinh(2.0) - 1.0 == doctest::Approx(12.154).epsilon(1e-3));
  CHECK(qmc::critical_line_residual(1e-9, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("isotropy point of the mapping reproduces the Onsager condition") {
  // gamma(a) = a holds exactly at a = beta_c (tanh(beta_c) = sqrt(2) - 1),
  // so beta = n_y beta_c with g = 1 lands on the isotropic critical point.
  const double beta_c = oracles::ising_beta_c();
  const auto iso = qmc::map_parameters(8.0 * beta_c, 1.0, 8);
  CHECK(iso.beta_cl == doctest::Approx(beta_c));
  CHECK(iso.gamma == doctest::Approx(beta_c).epsilon(1e-12));
  CHECK(iso.coupling_exponent_y() == doctest::Approx(iso.coupling_exponent_x()));
  CHECK(qmc::critical_line_residual(iso.beta_cl, iso.gamma / iso.beta_cl) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("tfim mapping: deep ferromagnet and paramagnet") {
  const auto ferro = qmc::tfim_qmc_magnetization(12, 0.2, 8.0, 48, 12000, 5);
  CHECK(ferro.mean_abs_magnetization > 0.8);
  const auto para = qmc::tfim_qmc_magnetization(12, 2.0, 8.0, 48, 12000, 5);
  CHECK(para.mean_abs_magnetization < 0.3);
  CHECK(ferro.samples == 12000);
}

TEST_CASE("sign_reweight reduces to the weighted mean for positive weights") {
  std::vector<SignedSample> samples = {{1.0, 0.25}, {2.0, 0.5}, {5.0, 0.25}};
  const auto out = qmc::sign_reweight(samples);
  CHECK(out.mean_sign == 1.0);
  const double expect = (1.0 * 0.25 + 2.0 * 0.5 + 5.0 * 0.25) / 1.0;
  CHECK(std::abs(out.estimate - expect) < 1e-15);
}

TEST_CASE("sign_reweight two-term hand example") {
  std::vector<SignedSample> samples = {{2.0, 0.5}, {0.0, -0.25}};
  const auto out = qmc::sign_reweight(samples);
  CHECK(out.estimate == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(out.mean_sign == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("sign_reweight rejects a vanishing sign sum") {
  std::vector<SignedSample> cancel = {{1.0, 0.7}, {3.0, -0.7}};
  CHECK_THROWS_AS(qmc::sign_reweight(cancel), std::domain_error);
  std::vector<SignedSample> zero_weight = {{1.0, 0.0}};
  CHECK_THROWS_AS(qmc::sign_reweight(zero_weight), std::invalid_argument);
  CHECK_THROWS_AS(qmc::sign_reweight({}), std::invalid_argument);
}

TEST_SUITE_END();
