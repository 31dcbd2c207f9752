#ifndef QMB_CIRCUIT_HPP
#define QMB_CIRCUIT_HPP

#include <array>
#include <string>
#include <vector>

#include "qmb/matrix.hpp"
#include "qmb/spin_chain.hpp"

namespace qmb::circuit {

// Qubit 0 is the least significant bit of the state index, matching the
// spin-chain encoding. Rz(phi) = diag(e^{i phi}, e^{-i phi}) = exp(i phi sz)
// acting on (|0>, |1>); T = Rz(pi/8).
using QubitRegister = spin::StateVector;

enum class GateKind { rz, rx, ry, h, t, cnot, toffoli };

struct Gate {
  GateKind kind = GateKind::h;
  std::array<int, 3> qubits = {0, 0, 0};
  int n_operands = 1;
  double phase = 0.0;  // rotation gates only

  static Gate rz(int q, double phi) { return {GateKind::rz, {q, 0, 0}, 1, phi}; }
  static Gate rx(int q, double phi) { return {GateKind::rx, {q, 0, 0}, 1, phi}; }
  static Gate ry(int q, double phi) { return {GateKind::ry, {q, 0, 0}, 1, phi}; }
  static Gate hadamard(int q) { return {GateKind::h, {q, 0, 0}, 1, 0.0}; }
  static Gate t(int q);
  static Gate cnot(int control, int target);
  static Gate toffoli(int c1, int c2, int target);

  bool operator==(const Gate& other) const = default;
};

struct Circuit {
  int n_qubits = 1;
  std::vector<Gate> gates;
};

QubitRegister apply_gate(const QubitRegister& reg, const Gate& gate);
QubitRegister run_circuit(const QubitRegister& reg, const Circuit& c);

// Columns are the circuit applied to the basis states. Guarded at 10 qubits.
Matrix circuit_unitary(const Circuit& c);

// Toffoli on qubits (0, 1 controls; 2 target) out of {H, CNOT, T, Rz(-pi/8)};
// equals the Toffoli permutation up to a global phase.
Circuit toffoli_circuit();

// G = H_c (prod_i CNOT(c, i)) H_c: maps the sigma_x^(x)4 eigenvalue of the
// four targets onto the control qubit.
Circuit four_body_G(int control, const std::array<int, 4>& targets);

// exp(-i E0 sx sx sx sx t) on the four targets of a 5-qubit register via
// G Rz(-E0 t) G; qubit 4 is the control and must start in |0>.
QubitRegister simulate_four_body(double e0, double t, const QubitRegister& reg);

struct TrotterTerm {
  enum class Kind { x_field, z_field, zz_bond, four_body_x };
  Kind kind = Kind::x_field;
  std::array<int, 4> qubits = {0, 0, 0, 0};
  int ancilla = -1;  // four_body_x only
  double coefficient = 0.0;

  static TrotterTerm x_field(int q, double c) {
    return {Kind::x_field, {q, 0, 0, 0}, -1, c};
  }
  static TrotterTerm z_field(int q, double c) {
    return {Kind::z_field, {q, 0, 0, 0}, -1, c};
  }
  static TrotterTerm zz_bond(int a, int b, double c) {
    return {Kind::zz_bond, {a, b, 0, 0}, -1, c};
  }
  static TrotterTerm four_body_x(const std::array<int, 4>& targets, int ancilla,
                                 double c) {
    return {Kind::four_body_x, targets, ancilla, c};
  }
};

struct TrotterPlan {
  std::vector<TrotterTerm> terms;
  double total_time = 0.0;
  int steps = 1;
};

// First-order splitting for H = g sum sx - sum sz sz; the ancilla-free
// terms only.
TrotterPlan tfim_trotter_plan(const spin::TfimHamiltonian& h, double total_time,
                              int steps);

// Applies prod_k exp(-i c_k H_k tau) per slice, tau = total_time / steps,
// in plan order.
QubitRegister trotter_evolve(const TrotterPlan& plan, const QubitRegister& reg);

struct Rk4Result {
  QubitRegister state;
  double norm_drift = 0.0;  // accumulated |norm - 1| before renormalization
  int steps = 0;
};

// Classic four-stage integration of d|psi>/dt = -i H |psi>, renormalizing
// after each step. A final partial step absorbs any remainder of t.
Rk4Result rk4_evolve(const spin::TfimHamiltonian& h, double t, double tau,
                     const QubitRegister& reg);

// min over theta of |U - e^{i theta} V|_F = sqrt(2d - 2|Tr(U^dagger V)|).
double unitary_distance_up_to_phase(const Matrix& u, const Matrix& v);

// One gate per line: NAME q0 [q1 [q2]] [phase]; '#' starts a comment.
// Rotation phases use the shortest round-trip decimal form.
std::string format_circuit(const Circuit& c);
Circuit parse_circuit(const std::string& text, int n_qubits = -1);

}  // namespace qmb::circuit

#endif
