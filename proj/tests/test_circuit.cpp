#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmb/circuit.hpp"
#include "qmb/density.hpp"
#include "qmb/eigensolve.hpp"
#include "support/oracles.hpp"

using namespace qmb;
using circuit::Circuit;
using circuit::Gate;
using circuit::QubitRegister;
using spin::Boundary;
using spin::TfimHamiltonian;

TEST_SUITE_BEGIN("circuit");

namespace {

constexpr double kPi = std::numbers::pi;

Matrix gate_matrix(const Gate& g, int n_qubits) {
  Circuit c;
  c.n_qubits = n_qubits;
  c.gates = {g};
  return circuit::circuit_unitary(c);
}

Matrix pauli(char which) {
  Matrix m(2, 2);
  switch (which) {
    case 'x':
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 'y':
      m(0, 1) = cplx(0.0, -1.0);
      m(1, 0) = cplx(0.0, 1.0);
      break;
    case 'z':
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

Matrix sx_four() {
  const Matrix sx = pauli('x');
  return kron(kron(sx, sx), kron(sx, sx));
}

// exp(-i H t) |psi> through the spectral decomposition.
cvector evolve_dense(const Matrix& h, double t, const cvector& psi) {
  return oracles::exp_i_hermitian(h, -t) * psi;
}

}  // namespace

TEST_CASE("hadamard on |0> gives the equal superposition") {
  auto reg = QubitRegister::basis(1, 0);
  reg = circuit::apply_gate(reg, Gate::hadamard(0));
  CHECK(std::abs(reg.amplitudes[0] - cplx(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(reg.amplitudes[1] - cplx(1.0 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("CNOT flips the target when the control is set") {
  auto reg = QubitRegister::basis(2, 0b01);  // qubit 0 (control) set
  reg = circuit::apply_gate(reg, Gate::cnot(0, 1));
  CHECK(std::abs(reg.amplitudes[0b11] - cplx(1.0)) < 1e-15);
}

TEST_CASE("Rz pairs cancel") {
  const auto reg = QubitRegister::random_unit(3, 77);
  auto out = circuit::apply_gate(reg, Gate::rz(1, kPi / 4.0));
  out = circuit::apply_gate(out, Gate::rz(1, -kPi / 4.0));
  double diff = 0.0;
  for (std::size_t i = 0; i < reg.dimension(); ++i)
    diff = std::max(diff, std::abs(out.amplitudes[i] - reg.amplitudes[i]));
  CHECK(diff < 1e-14);
}

TEST_CASE("all gates preserve the norm") {
  const auto reg = QubitRegister::random_unit(3, 5);
  for (const auto& gate :
       {Gate::rz(0, 0.3), Gate::rx(1, -0.7), Gate::ry(2, 1.1), Gate::hadamard(1),
        Gate::t(0), Gate::cnot(0, 2), Gate::toffoli(0, 1, 2)}) {
    const auto out = circuit::apply_gate(reg, gate);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("run_circuit builds the Bell state and empty circuits are identity") {
  Circuit bell;
  bell.n_qubits = 2;
  bell.gates = {Gate::hadamard(0), Gate::cnot(0, 1)};
  auto reg = circuit::run_circuit(QubitRegister::basis(2, 0), bell);
  CHECK(std::abs(reg.amplitudes[0b00] - cplx(1.0 / std::sqrt(2.0))) < 1e-14);
  CHECK(std::abs(reg.amplitudes[0b11] - cplx(1.0 / std::sqrt(2.0))) < 1e-14);
  CHECK(std::abs(reg.amplitudes[0b01]) < 1e-15);

  Circuit empty;
  empty.n_qubits = 2;
  const auto same = circuit::run_circuit(reg, empty);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(same.amplitudes[i] == reg.amplitudes[i]);

  // Either Bell qubit is maximally mixed: entropy log 2.
  const auto rho = density::partial_trace(reg, density::Bipartition::of(2, {0}),
                                          density::Keep::A);
  CHECK(density::von_neumann_entropy(rho) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("circuit_unitary of elementary gates") {
  const Matrix h = gate_matrix(Gate::hadamard(0), 1);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(h(0, 0) - cplx(r)) < 1e-15);
  CHECK(std::abs(h(1, 1) + cplx(r)) < 1e-15);
  CHECK((h - h.adjoint()).max_abs() < 1e-15);  // Hadamard is Hermitian

  // CNOT with control = qubit 0: fixes |00>, |01>; swaps |10> <-> |11>
  // (indices 1 and 3 in the bit convention).
  const Matrix cx = gate_matrix(Gate::cnot(0, 1), 2);
  CHECK(std::abs(cx(0, 0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(cx(2, 2) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(cx(3, 1) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(cx(1, 3) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(cx(1, 1)) < 1e-15);

  // Unitarity of a composite circuit.
  Circuit c;
  c.n_qubits = 3;
  c.gates = {Gate::hadamard(0), Gate::cnot(0, 1), Gate::t(2), Gate::rx(1, 0.4),
             Gate::toffoli(0, 1, 2)};
  const Matrix u = circuit::circuit_unitary(c);
  CHECK((u.adjoint() * u - Matrix::identity(8)).max_abs() < 1e-10);

  Circuit big;
  big.n_qubits = 11;
  CHECK_THROWS_AS(circuit::circuit_unitary(big), std::invalid_argument);
}

TEST_CASE("rotation identities from the gate set") {
  const double phi = 0.6180;
  const Matrix rz = gate_matrix(Gate::rz(0, phi), 1);
  const Matrix rx = gate_matrix(Gate::rx(0, phi), 1);
  const Matrix ry = gate_matrix(Gate::ry(0, phi), 1);
  const Matrix h = gate_matrix(Gate::hadamard(0), 1);

  // Rx = H Rz H and Rz = H Rx H
  CHECK((h * rz * h - rx).max_abs() < 1e-12);
  CHECK((h * rx * h - rz).max_abs() < 1e-12);
  // Ry = Rz(-pi/4) Rx Rz(pi/4)
  const Matrix rzm = gate_matrix(Gate::rz(0, -kPi / 4.0), 1);
  const Matrix rzp = gate_matrix(Gate::rz(0, kPi / 4.0), 1);
  CHECK((rzm * rx * rzp - ry).max_abs() < 1e-12);

  // Rx(phi) matches its closed form.
  CHECK(std::abs(rx(0, 0) - cplx(std::cos(phi))) < 1e-15);
  CHECK(std::abs(rx(0, 1) - cplx(0.0, std::sin(phi))) < 1e-15);

  // Generator conventions: Rz = exp(i phi sz), Ry = exp(i phi sy).
  CHECK((rz - oracles::exp_i_hermitian(pauli('z'), phi)).max_abs() < 1e-13);
  CHECK((ry - oracles::exp_i_hermitian(pauli('y'), phi)).max_abs() < 1e-13);
}

TEST_CASE("toffoli decomposition equals the Toffoli permutation up to phase") {
  const Circuit decomposition = circuit::toffoli_circuit();
  for (const auto& gate : decomposition.gates)
    CHECK(gate.kind != circuit::GateKind::toffoli);
  const Matrix u = circuit::circuit_unitary(decomposition);
  const Matrix exact = gate_matrix(Gate::toffoli(0, 1, 2), 3);
  CHECK(circuit::unitary_distance_up_to_phase(u, exact) < 1e-10);

  // Action on |110> (qubits 0,1 set -> index 3) -> |111> up to phase.
  auto reg = circuit::run_circuit(QubitRegister::basis(3, 0b011), decomposition);
  CHECK(std::abs(reg.amplitudes[0b111]) == doctest::Approx(1.0).epsilon(1e-12));
  reg = circuit::run_circuit(QubitRegister::basis(3, 0b000), decomposition);
  CHECK(std::abs(reg.amplitudes[0b000]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("four_body_G maps the sigma_x parity onto the control") {
  auto plus_all = QubitRegister::basis(5, 0);
  Circuit prep;
  prep.n_qubits = 5;
  prep.gates = {Gate::hadamard(0), Gate::hadamard(1), Gate::hadamard(2),
                Gate::hadamard(3)};
  plus_all = circuit::run_circuit(plus_all, prep);
  const Circuit g = circuit::four_body_G(4, {0, 1, 2, 3});
  auto mapped = circuit::run_circuit(plus_all, g);
  double control_one = 0.0;
  for (std::size_t i = 0; i < mapped.dimension(); ++i)
    if (i & 0b10000) control_one += std::norm(mapped.amplitudes[i]);
  CHECK(control_one < 1e-12);

  auto minus_first = QubitRegister::basis(5, 0b00001);   // qubit 0 in |1>
  minus_first = circuit::run_circuit(minus_first, prep);  // H|1> = |->
  mapped = circuit::run_circuit(minus_first, g);
  control_one = 0.0;
  for (std::size_t i = 0; i < mapped.dimension(); ++i)
    if (i & 0b10000) control_one += std::norm(mapped.amplitudes[i]);
  CHECK(control_one == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("four_body_G is an involution") {
  const Circuit g = circuit::four_body_G(4, {0, 1, 2, 3});
  Circuit twice;
  twice.n_qubits = 5;
  twice.gates = g.gates;
  twice.gates.insert(twice.gates.end(), g.gates.begin(), g.gates.end());
  const Matrix u = circuit::circuit_unitary(twice);
  CHECK((u - Matrix::identity(32)).max_abs() < 1e-12);
}

TEST_CASE("four_body_G rejects overlapping indices") {
  CHECK_THROWS_AS(circuit::four_body_G(2, {0, 1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(circuit::four_body_G(4, {0, 1, 1, 3}), std::invalid_argument);
}

TEST_CASE("simulate_four_body matches the dense exponential oracle") {
  struct Case {
    double e0, t;
  };
  const Case cases[] = {{0.0, 0.0}, {0.7, 0.3}, {1.0, kPi}};
  const Matrix generator = sx_four();
  for (const auto& c : cases) {
    CAPTURE(c.e0);
    CAPTURE(c.t);
    auto reg = QubitRegister::zero(5);
    // Random 4-qubit target state (x) |0> on the control.
    const auto target = QubitRegister::random_unit(4, 321);
    for (std::size_t i = 0; i < 16; ++i) reg.amplitudes[i] = target.amplitudes[i];
    const auto evolved = circuit::simulate_four_body(c.e0, c.t, reg);
    const cvector expect = evolve_dense(c.e0 * generator, c.t, target.amplitudes);
    double diff = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
      diff = std::max(diff, std::abs(evolved.amplitudes[i] - expect[i]));
    for (std::size_t i = 16; i < 32; ++i)
      diff = std::max(diff, std::abs(evolved.amplitudes[i]));
    CHECK(diff < 1e-10);
  }
}

TEST_CASE("simulate_four_body restores the control for all parity eigenstates") {
  Circuit rotate;
  rotate.n_qubits = 5;
  rotate.gates = {Gate::hadamard(0), Gate::hadamard(1), Gate::hadamard(2),
                  Gate::hadamard(3)};
  for (std::size_t basis = 0; basis < 16; ++basis) {
    auto reg = circuit::run_circuit(QubitRegister::basis(5, basis), rotate);
    const auto evolved = circuit::simulate_four_body(0.9, 0.37, reg);
    double leak = 0.0;
    for (std::size_t i = 0; i < 32; ++i)
      if (i & 0b10000) leak += std::norm(evolved.amplitudes[i]);
    CHECK(leak < 1e-12);
  }
}

TEST_CASE("simulate_four_body rejects a dirty control") {
  auto reg = QubitRegister::basis(5, 0b10000);  // control in |1>
  CHECK_THROWS_AS(circuit::simulate_four_body(1.0, 0.1, reg), std::domain_error);
}

TEST_CASE("trotter with commuting terms is exact for any step count") {
  circuit::TrotterPlan plan;
  plan.terms = {circuit::TrotterTerm::z_field(0, 0.8),
                circuit::TrotterTerm::z_field(1, -0.45)};
  plan.total_time = 2.0;
  const auto reg = QubitRegister::random_unit(2, 55);
  const Matrix h = 0.8 * kron(Matrix::identity(2), pauli('z')) +
                   -0.45 * kron(pauli('z'), Matrix::identity(2));
  const cvector expect = evolve_dense(h, plan.total_time, reg.amplitudes);
  for (const int steps : {1, 7}) {
    plan.steps = steps;
    const auto out = circuit::trotter_evolve(plan, reg);
    double diff = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      diff = std::max(diff, std::abs(out.amplitudes[i] - expect[i]));
    CHECK(diff < 1e-12);
  }
}

TEST_CASE("single-slice Trotter error scales as tau^2") {
  TfimHamiltonian h{2, 1.0, Boundary::open};
  const Matrix dense = spin::dense_tfim(h);
  std::vector<double> log_tau, log_err;
  for (const double tau : {0.1, 0.05, 0.025, 0.0125}) {
    const auto plan = circuit::tfim_trotter_plan(h, tau, 1);
    Matrix u(4, 4);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto col = circuit::trotter_evolve(plan, QubitRegister::basis(2, j));
      for (std::size_t i = 0; i < 4; ++i) u(i, j) = col.amplitudes[i];
    }
    const Matrix exact = oracles::exp_i_hermitian(dense, -tau);
    log_tau.push_back(std::log(tau));
    log_err.push_back(std::log((u - exact).frobenius_norm()));
  }
  const double slope = oracles::fitted_slope(log_tau, log_err);
  CHECK(std::abs(slope - 2.0) < 0.1);
}

TEST_CASE("trotter approaches the RK4 reference on the TFIM") {
  TfimHamiltonian h{4, 1.0, Boundary::open};
  const auto reg = QubitRegister::random_unit(4, 99);
  const auto plan = circuit::tfim_trotter_plan(h, 0.5, 256);
  const auto trotterized = circuit::trotter_evolve(plan, reg);
  const auto rk4 = circuit::rk4_evolve(h, 0.5, 1e-3, reg);
  const double overlap =
      std::abs(vec_dot(trotterized.amplitudes, rk4.state.amplitudes));
  CHECK(1.0 - overlap < 1e-3);
}

TEST_CASE("rk4 limits: zero time and dense-exponential agreement") {
  TfimHamiltonian h{2, 1.0, Boundary::open};
  const auto reg = QubitRegister::random_unit(2, 31);
  const auto nothing = circuit::rk4_evolve(h, 0.0, 1e-3, reg);
  CHECK(nothing.steps == 0);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(nothing.state.amplitudes[i] == reg.amplitudes[i]);

  const auto evolved = circuit::rk4_evolve(h, 1.0, 1e-3, reg);
  const cvector expect = evolve_dense(spin::dense_tfim(h), 1.0, reg.amplitudes);
  const double overlap = std::abs(vec_dot(expect, evolved.state.amplitudes));
  CHECK(1.0 - overlap < 1e-8);
  CHECK(evolved.norm_drift < 1e-8);
}

TEST_CASE("rk4 global error is fourth order") {
  TfimHamiltonian h{2, 1.0, Boundary::open};
  const auto reg = QubitRegister::random_unit(2, 13);
  const cvector expect = evolve_dense(spin::dense_tfim(h), 1.0, reg.amplitudes);
  std::vector<double> log_tau, log_err;
  for (const double tau : {0.1, 0.05, 0.025, 0.0125}) {
    const auto evolved = circuit::rk4_evolve(h, 1.0, tau, reg);
    double err = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      err += std::norm(evolved.state.amplitudes[i] - expect[i]);
    log_tau.push_back(std::log(tau));
    log_err.push_back(0.5 * std::log(err));
  }
  const double slope = oracles::fitted_slope(log_tau, log_err);
  CHECK(std::abs(slope - 4.0) < 0.3);
}

TEST_CASE("unitary distance up to phase") {
  const Matrix u = circuit::circuit_unitary(circuit::toffoli_circuit());
  CHECK(circuit::unitary_distance_up_to_phase(u, u) < 1e-14);
  Matrix v = u;
  v *= std::polar(1.0, kPi / 3.0);
  CHECK(circuit::unitary_distance_up_to_phase(u, v) < 1e-13);
  CHECK(circuit::unitary_distance_up_to_phase(Matrix::identity(2), pauli('x')) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(circuit::unitary_distance_up_to_phase(Matrix::identity(2),
                                                        Matrix::identity(3)),
                  std::invalid_argument);
}

TEST_CASE("circuit text format round-trips bit-exactly") {
  Circuit c;
  c.n_qubits = 3;
  c.gates = {Gate::rz(0, kPi / 4.0),  Gate::cnot(0, 1),
             Gate::hadamard(2),       Gate::t(1),
             Gate::rx(2, -1.2345678901234567), Gate::ry(0, 0.1),
             Gate::toffoli(0, 1, 2)};
  const std::string text = circuit::format_circuit(c);
  const Circuit back = circuit::parse_circuit(text);
  REQUIRE(back.gates.size() == c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    CHECK(back.gates[i] == c.gates[i]);
  CHECK(circuit::format_circuit(back) == text);
  CHECK(back.n_qubits == 3);
}

TEST_CASE("circuit parser accepts comments and rejects junk") {
  const auto c = circuit::parse_circuit("# a comment\nH 0\n\nCNOT 0 1 # inline\n");
  CHECK(c.gates.size() == 2);
  CHECK(c.n_qubits == 2);
  CHECK_THROWS_AS(circuit::parse_circuit("NOPE 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(circuit::parse_circuit("RZ 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(circuit::parse_circuit("H 5\n", 2), std::invalid_argument);
}

TEST_CASE("gate application rejects bad indices") {
  const auto reg = QubitRegister::basis(2, 0);
  CHECK_THROWS_AS(circuit::apply_gate(reg, Gate::hadamard(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(Gate::cnot(1, 1), std::invalid_argument);
  Circuit c;
  c.n_qubits = 4;
  CHECK_THROWS_AS(circuit::run_circuit(QubitRegister::basis(2, 0), c),
                  std::invalid_argument);
}

TEST_CASE("trotter plan matches the Hamiltonian for periodic chains") {
  // The wrap-around bond convention must agree with the matrix-free
  // Hamiltonian, including the two-site edge case.
  for (const int n : {2, 3, 4}) {
    TfimHamiltonian h{n, 0.9, Boundary::periodic};
    const auto reg = QubitRegister::random_unit(n, 17 + n);
    const auto plan = circuit::tfim_trotter_plan(h, 0.4, 512);
    const auto trotterized = circuit::trotter_evolve(plan, reg);
    const cvector expect =
        evolve_dense(spin::dense_tfim(h), 0.4, reg.amplitudes);
    const double overlap =
        std::abs(vec_dot(expect, trotterized.amplitudes));
    CHECK(1.0 - overlap < 1e-5);
  }
}

TEST_SUITE_END();
