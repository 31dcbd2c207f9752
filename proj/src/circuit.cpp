#include "qmb/circuit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qmb/numio.hpp"

namespace qmb::circuit {

namespace {

constexpr double kPi = std::numbers::pi;

void check_qubit(int q, int n_qubits) {
  if (q < 0 || q >= n_qubits)
    throw std::invalid_argument("gate qubit index out of range");
}

void apply_single(cvector& amp, int q, const cplx u00, const cplx u01,
                  const cplx u10, const cplx u11) {
  const std::size_t stride = std::size_t(1) << q;
  const std::size_t dim = amp.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & stride) continue;
    const cplx a0 = amp[i];
    const cplx a1 = amp[i | stride];
    amp[i] = u00 * a0 + u01 * a1;
    amp[i | stride] = u10 * a0 + u11 * a1;
  }
}

void apply_in_place(cvector& amp, const Gate& gate, int n_qubits) {
  for (int k = 0; k < gate.n_operands; ++k) check_qubit(gate.qubits[k], n_qubits);
  switch (gate.kind) {
    case GateKind::rz:
    case GateKind::t: {
      const double phi = gate.phase;
      const cplx up = std::polar(1.0, phi);
      const cplx down = std::polar(1.0, -phi);
      const std::size_t stride = std::size_t(1) << gate.qubits[0];
      for (std::size_t i = 0; i < amp.size(); ++i)
        amp[i] *= (i & stride) ? down : up;
      break;
    }
    case GateKind::rx: {
      const cplx c = std::cos(gate.phase);
      const cplx is = cplx(0.0, std::sin(gate.phase));
      apply_single(amp, gate.qubits[0], c, is, is, c);
      break;
    }
    case GateKind::ry: {
      const double c = std::cos(gate.phase);
      const double s = std::sin(gate.phase);
      apply_single(amp, gate.qubits[0], c, s, -s, c);
      break;
    }
    case GateKind::h: {
      const double r = 1.0 / std::sqrt(2.0);
      apply_single(amp, gate.qubits[0], r, r, r, -r);
      break;
    }
    case GateKind::cnot: {
      const std::size_t cm = std::size_t(1) << gate.qubits[0];
      const std::size_t tm = std::size_t(1) << gate.qubits[1];
      for (std::size_t i = 0; i < amp.size(); ++i)
        if ((i & cm) && !(i & tm)) std::swap(amp[i], amp[i | tm]);
      break;
    }
    case GateKind::toffoli: {
      const std::size_t c1 = std::size_t(1) << gate.qubits[0];
      const std::size_t c2 = std::size_t(1) << gate.qubits[1];
      const std::size_t tm = std::size_t(1) << gate.qubits[2];
      for (std::size_t i = 0; i < amp.size(); ++i)
        if ((i & c1) && (i & c2) && !(i & tm)) std::swap(amp[i], amp[i | tm]);
      break;
    }
  }
}

void apply_exp_zz(cvector& amp, int a, int b, double angle, int n_qubits) {
  // exp(i angle sz sz) = CNOT(a,b) exp(i angle sz_b) CNOT(a,b)
  apply_in_place(amp, Gate::cnot(a, b), n_qubits);
  apply_in_place(amp, Gate::rz(b, angle), n_qubits);
  apply_in_place(amp, Gate::cnot(a, b), n_qubits);
}

double control_one_population(const cvector& amp, int control) {
  const std::size_t mask = std::size_t(1) << control;
  double p = 0.0;
  for (std::size_t i = 0; i < amp.size(); ++i)
    if (i & mask) p += std::norm(amp[i]);
  return p;
}

void apply_four_body_exp(cvector& amp, const std::array<int, 4>& targets,
                         int control, double e0, double t, int n_qubits) {
  if (control_one_population(amp, control) > 1e-10)
    throw std::domain_error("four-body gadget: control qubit is not in |0>");
  const Circuit g = four_body_G(control, targets);
  for (const auto& gate : g.gates) apply_in_place(amp, gate, n_qubits);
  apply_in_place(amp, Gate::rz(control, -e0 * t), n_qubits);
  for (const auto& gate : g.gates) apply_in_place(amp, gate, n_qubits);
}

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::rz: return "RZ";
    case GateKind::rx: return "RX";
    case GateKind::ry: return "RY";
    case GateKind::h: return "H";
    case GateKind::t: return "T";
    case GateKind::cnot: return "CNOT";
    case GateKind::toffoli: return "TOFFOLI";
  }
  return "?";
}

}  // namespace

Gate Gate::t(int q) { return {GateKind::t, {q, 0, 0}, 1, kPi / 8.0}; }

Gate Gate::cnot(int control, int target) {
  if (control == target) throw std::invalid_argument("CNOT qubits must differ");
  return {GateKind::cnot, {control, target, 0}, 2, 0.0};
}

Gate Gate::toffoli(int c1, int c2, int target) {
  if (c1 == c2 || c1 == target || c2 == target)
    throw std::invalid_argument("Toffoli qubits must differ");
  return {GateKind::toffoli, {c1, c2, target}, 3, 0.0};
}

QubitRegister apply_gate(const QubitRegister& reg, const Gate& gate) {
  QubitRegister out = reg;
  apply_in_place(out.amplitudes, gate, reg.n_sites);
  return out;
}

QubitRegister run_circuit(const QubitRegister& reg, const Circuit& c) {
  if (c.n_qubits > reg.n_sites)
    throw std::invalid_argument("circuit does not fit the register");
  QubitRegister out = reg;
  for (const auto& gate : c.gates) apply_in_place(out.amplitudes, gate, reg.n_sites);
  return out;
}

Matrix circuit_unitary(const Circuit& c) {
  if (c.n_qubits > 10)
    throw std::invalid_argument("circuit_unitary: above the 10-qubit guard");
  const std::size_t dim = std::size_t(1) << c.n_qubits;
  Matrix u(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    QubitRegister col = QubitRegister::basis(c.n_qubits, j);
    col = run_circuit(col, c);
    for (std::size_t i = 0; i < dim; ++i) u(i, j) = col.amplitudes[i];
  }
  return u;
}

Circuit toffoli_circuit() {
  // Standard elementary-gate network; with Rz(pi/8) in this convention the
  // T / T-inverse roles are swapped relative to diag(1, e^{i pi/4}), which
  // only shifts the global phase.
  const int a = 0, b = 1, c = 2;
  auto tgate = [](int q) { return Gate::t(q); };
  auto tinv = [](int q) { return Gate::rz(q, -kPi / 8.0); };
  Circuit out;
  out.n_qubits = 3;
  out.gates = {
      Gate::hadamard(c), Gate::cnot(b, c), tgate(c),  Gate::cnot(a, c),
      tinv(c),           Gate::cnot(b, c), tgate(c),  Gate::cnot(a, c),
      tinv(b),           tinv(c),          Gate::hadamard(c),
      Gate::cnot(a, b),  tinv(a),          tgate(b),  Gate::cnot(a, b),
  };
  return out;
}

Circuit four_body_G(int control, const std::array<int, 4>& targets) {
  int max_index = control;
  for (int t : targets) {
    if (t == control) throw std::invalid_argument("four_body_G: overlapping indices");
    max_index = std::max(max_index, t);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (targets[i] == targets[j])
        throw std::invalid_argument("four_body_G: overlapping indices");
  Circuit g;
  g.n_qubits = max_index + 1;
  g.gates.push_back(Gate::hadamard(control));
  for (int t : targets) g.gates.push_back(Gate::cnot(control, t));
  g.gates.push_back(Gate::hadamard(control));
  return g;
}

QubitRegister simulate_four_body(double e0, double t, const QubitRegister& reg) {
  if (reg.n_sites != 5)
    throw std::invalid_argument("simulate_four_body: needs a 5-qubit register");
  QubitRegister out = reg;
  apply_four_body_exp(out.amplitudes, {0, 1, 2, 3}, 4, e0, t, 5);
  return out;
}

TrotterPlan tfim_trotter_plan(const spin::TfimHamiltonian& h, double total_time,
                              int steps) {
  TrotterPlan plan;
  plan.total_time = total_time;
  plan.steps = steps;
  for (int i = 0; i < h.n_sites; ++i)
    plan.terms.push_back(TrotterTerm::x_field(i, h.g));
  // The wrap-around bond exists only for n > 2, matching bond_energy.
  const int bonds =
      h.n_sites - 1 +
      (h.boundary == spin::Boundary::periodic && h.n_sites > 2 ? 1 : 0);
  for (int i = 0; i < bonds; ++i)
    plan.terms.push_back(TrotterTerm::zz_bond(i, (i + 1) % h.n_sites, -1.0));
  return plan;
}

QubitRegister trotter_evolve(const TrotterPlan& plan, const QubitRegister& reg) {
  if (plan.steps < 1) throw std::invalid_argument("trotter_evolve: steps >= 1");
  const double tau = plan.total_time / plan.steps;
  QubitRegister out = reg;
  cvector& amp = out.amplitudes;
  for (int step = 0; step < plan.steps; ++step) {
    for (const auto& term : plan.terms) {
      switch (term.kind) {
        case TrotterTerm::Kind::x_field:
          apply_in_place(amp, Gate::rx(term.qubits[0], -term.coefficient * tau),
                         out.n_sites);
          break;
        case TrotterTerm::Kind::z_field:
          apply_in_place(amp, Gate::rz(term.qubits[0], -term.coefficient * tau),
                         out.n_sites);
          break;
        case TrotterTerm::Kind::zz_bond:
          apply_exp_zz(amp, term.qubits[0], term.qubits[1],
                       -term.coefficient * tau, out.n_sites);
          break;
        case TrotterTerm::Kind::four_body_x:
          apply_four_body_exp(amp, term.qubits, term.ancilla, term.coefficient,
                              tau, out.n_sites);
          break;
      }
    }
  }
  return out;
}

Rk4Result rk4_evolve(const spin::TfimHamiltonian& h, double t, double tau,
                     const QubitRegister& reg) {
  if (tau <= 0.0) throw std::invalid_argument("rk4_evolve: tau must be positive");
  Rk4Result result;
  result.state = reg;
  auto derivative = [&](const spin::StateVector& x) {
    spin::StateVector hx = spin::apply_tfim(h, x);
    for (auto& a : hx.amplitudes) a *= cplx(0.0, -1.0);
    return hx;
  };
  double remaining = t;
  while (remaining > 1e-15 * std::max(1.0, t)) {
    const double step = std::min(tau, remaining);
    const std::size_t dim = result.state.dimension();
    const spin::StateVector& psi = result.state;
    spin::StateVector k1 = derivative(psi);
    spin::StateVector y = psi;
    for (std::size_t i = 0; i < dim; ++i)
      y.amplitudes[i] = psi.amplitudes[i] + 0.5 * step * k1.amplitudes[i];
    spin::StateVector k2 = derivative(y);
    for (std::size_t i = 0; i < dim; ++i)
      y.amplitudes[i] = psi.amplitudes[i] + 0.5 * step * k2.amplitudes[i];
    spin::StateVector k3 = derivative(y);
    for (std::size_t i = 0; i < dim; ++i)
      y.amplitudes[i] = psi.amplitudes[i] + step * k3.amplitudes[i];
    spin::StateVector k4 = derivative(y);
    spin::StateVector next = psi;
    for (std::size_t i = 0; i < dim; ++i)
      next.amplitudes[i] +=
          step / 6.0 *
          (k1.amplitudes[i] + 2.0 * k2.amplitudes[i] + 2.0 * k3.amplitudes[i] +
           k4.amplitudes[i]);
    result.norm_drift += std::abs(next.norm() - 1.0);
    next.normalize();
    result.state = std::move(next);
    ++result.steps;
    remaining -= step;
  }
  return result;
}

double unitary_distance_up_to_phase(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
    throw std::invalid_argument("unitary distance: shape mismatch");
  // min over theta of |U - e^{i theta} V|_F = sqrt(2d - 2|Tr(U^dagger V)|),
  // attained at e^{i theta} = conj(T)/|T|. The subtraction form avoids the
  // sqrt-of-cancellation noise floor of the closed form near zero.
  const cplx overlap = (u.adjoint() * v).trace();
  if (std::abs(overlap) < 1e-300)
    return std::sqrt(2.0 * double(u.rows()));
  const cplx phase = std::conj(overlap) / std::abs(overlap);
  Matrix diff = u;
  diff -= phase * Matrix(v);
  return diff.frobenius_norm();
}

std::string format_circuit(const Circuit& c) {
  std::string out;
  for (const auto& gate : c.gates) {
    out += gate_name(gate.kind);
    for (int k = 0; k < gate.n_operands; ++k)
      out += " " + std::to_string(gate.qubits[k]);
    if (gate.kind == GateKind::rz || gate.kind == GateKind::rx ||
        gate.kind == GateKind::ry)
      out += " " + format_double(gate.phase);
    out += "\n";
  }
  return out;
}

Circuit parse_circuit(const std::string& text, int n_qubits) {
  Circuit c;
  int max_index = -1;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    std::vector<std::string> args;
    for (std::string tok; fields >> tok;) args.push_back(tok);
    auto qubit = [&](std::size_t i) { return int(parse_int(args.at(i))); };
    Gate gate;
    if (name == "RZ" || name == "RX" || name == "RY") {
      if (args.size() != 2) throw std::invalid_argument("bad rotation line: " + line);
      const double phi = parse_double(args[1]);
      gate = name == "RZ"   ? Gate::rz(qubit(0), phi)
             : name == "RX" ? Gate::rx(qubit(0), phi)
                            : Gate::ry(qubit(0), phi);
    } else if (name == "H" || name == "T") {
      if (args.size() != 1) throw std::invalid_argument("bad gate line: " + line);
      gate = name == "H" ? Gate::hadamard(qubit(0)) : Gate::t(qubit(0));
    } else if (name == "CNOT") {
      if (args.size() != 2) throw std::invalid_argument("bad CNOT line: " + line);
      gate = Gate::cnot(qubit(0), qubit(1));
    } else if (name == "TOFFOLI") {
      if (args.size() != 3) throw std::invalid_argument("bad TOFFOLI line: " + line);
      gate = Gate::toffoli(qubit(0), qubit(1), qubit(2));
    } else {
      throw std::invalid_argument("unknown gate: " + name);
    }
    for (int k = 0; k < gate.n_operands; ++k)
      max_index = std::max(max_index, gate.qubits[k]);
    c.gates.push_back(gate);
  }
  c.n_qubits = n_qubits > 0 ? n_qubits : max_index + 1;
  if (max_index >= c.n_qubits)
    throw std::invalid_argument("circuit uses qubits outside the register");
  if (c.n_qubits < 1) c.n_qubits = 1;
  return c;
}

}  // namespace qmb::circuit
