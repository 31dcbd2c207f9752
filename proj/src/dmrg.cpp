#include "qmb/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qmb/density.hpp"
#include "qmb/rng.hpp"

namespace qmb::dmrg {

namespace {

Matrix pauli_x() {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

// sigma_z in the spin-chain bit convention: +1 on the up (bit = 1) state.
Matrix pauli_z() {
  Matrix m(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

void check_config(const DmrgConfig& cfg) {
  if (cfg.d_max < 2) throw std::invalid_argument("dmrg: d_max >= 2 required");
  if (cfg.target_length < 4 || cfg.target_length % 2 != 0)
    throw std::invalid_argument("dmrg: target_length must be even and >= 4");
  if (cfg.energy_tolerance <= 0.0)
    throw std::invalid_argument("dmrg: energy_tolerance must be positive");
}

double entropy_of(const std::vector<double>& rho_spectrum) {
  double s = 0.0;
  for (double lambda : rho_spectrum)
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  return s;
}

}  // namespace

DmrgBlock single_site_block(double g) {
  DmrgBlock b;
  b.length = 1;
  b.basis_size = 2;
  b.hamiltonian = g * pauli_x();
  b.edge_sz = pauli_z();
  return b;
}

DmrgBlock grow_block(const DmrgBlock& block, double g) {
  const std::size_t m = block.basis_size;
  const Matrix id_m = Matrix::identity(m);
  const Matrix id_2 = Matrix::identity(2);
  DmrgBlock out;
  out.length = block.length + 1;
  out.basis_size = int(2 * m);
  out.hamiltonian = kron(block.hamiltonian, id_2) + kron(id_m, g * pauli_x()) -
                    kron(block.edge_sz, pauli_z());
  out.edge_sz = kron(id_m, pauli_z());
  return out;
}

SuperblockGround superblock_ground(const DmrgBlock& sys_grown,
                                   const DmrgBlock& env_grown,
                                   const eig::SolverConfig& solver,
                                   const cvector* guess) {
  const std::size_t ms = sys_grown.basis_size;
  const std::size_t me = env_grown.basis_size;
  const Matrix& hs = sys_grown.hamiltonian;
  const Matrix& he = env_grown.hamiltonian;
  const Matrix& es = sys_grown.edge_sz;
  const Matrix& ee = env_grown.edge_sz;

  eig::LinearOperator op;
  op.dimension = ms * me;
  op.apply = [&, ms, me](const cvector& v, cvector& out) {
    out.assign(ms * me, cplx(0.0));
    // H_sys (x) I
    for (std::size_t i = 0; i < ms; ++i)
      for (std::size_t j = 0; j < ms; ++j) {
        const cplx h = hs(i, j);
        if (h == cplx(0.0)) continue;
        const cplx* src = &v[j * me];
        cplx* dst = &out[i * me];
        for (std::size_t e = 0; e < me; ++e) dst[e] += h * src[e];
      }
    // I (x) H_env
    for (std::size_t s = 0; s < ms; ++s) {
      const cplx* src = &v[s * me];
      cplx* dst = &out[s * me];
      for (std::size_t i = 0; i < me; ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < me; ++j) acc += he(i, j) * src[j];
        dst[i] += acc;
      }
    }
    // -edge_sz (x) edge_sz
    cvector tmp(ms * me, cplx(0.0));
    for (std::size_t i = 0; i < ms; ++i)
      for (std::size_t j = 0; j < ms; ++j) {
        const cplx s = es(i, j);
        if (s == cplx(0.0)) continue;
        const cplx* src = &v[j * me];
        cplx* dst = &tmp[i * me];
        for (std::size_t e = 0; e < me; ++e) dst[e] += s * src[e];
      }
    for (std::size_t s = 0; s < ms; ++s) {
      const cplx* src = &tmp[s * me];
      cplx* dst = &out[s * me];
      for (std::size_t i = 0; i < me; ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < me; ++j) acc += ee(i, j) * src[j];
        dst[i] -= acc;
      }
    }
  };

  const auto outcome = eig::lanczos(op, solver, guess);
  if (!outcome.eigen.converged)
    throw std::runtime_error("dmrg: superblock Lanczos did not converge");
  SuperblockGround result;
  result.energy = outcome.eigen.energy;
  result.psi = outcome.eigen.vector;
  result.lanczos_iterations = outcome.eigen.iterations;
  return result;
}

Truncation truncate(const cvector& psi, std::size_t dim_sys, std::size_t dim_env,
                    int d_max) {
  if (psi.size() != dim_sys * dim_env)
    throw std::invalid_argument("truncate: dimension mismatch");
  const density::DensityMatrix rho =
      density::reduce_split(psi, dim_sys, dim_env, density::Keep::A);
  const auto eig = eig::dense_eigh(rho.matrix);

  // Descending order.
  std::vector<std::size_t> order(dim_sys);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eig.eigenvalues[a] > eig.eigenvalues[b];
  });

  std::size_t kept = std::min<std::size_t>(d_max, dim_sys);
  Truncation out;
  if (kept < dim_sys) {
    // A degenerate multiplet straddling the cut is kept whole when it fits
    // within d_max + 4; otherwise the members are ordered lexicographically
    // by eigenvector entries and the cut falls inside that ordering.
    const double tie_eps = 1e-12 * std::max(1.0, eig.eigenvalues[order[0]]);
    const double cut_value = eig.eigenvalues[order[kept - 1]];
    if (cut_value - eig.eigenvalues[order[kept]] < tie_eps) {
      std::size_t lo = kept - 1;
      while (lo > 0 && eig.eigenvalues[order[lo - 1]] - cut_value < tie_eps) --lo;
      std::size_t hi = kept + 1;
      while (hi < dim_sys && cut_value - eig.eigenvalues[order[hi]] < tie_eps)
        ++hi;
      if (hi <= std::size_t(d_max) + 4) {
        kept = hi;
        out.report.multiplet_extended = true;
      } else {
        std::stable_sort(order.begin() + lo, order.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                           for (std::size_t i = 0; i < dim_sys; ++i) {
                             const cplx va = eig.eigenvectors(i, a);
                             const cplx vb = eig.eigenvectors(i, b);
                             if (va.real() != vb.real()) return va.real() < vb.real();
                             if (va.imag() != vb.imag()) return va.imag() < vb.imag();
                           }
                           return false;
                         });
        out.report.tie_broken = true;
      }
    }
  }

  out.projector = Matrix(dim_sys, kept);
  double kept_weight = 0.0;
  for (std::size_t k = 0; k < kept; ++k) {
    const std::size_t col = order[k];
    const double lambda = std::max(0.0, eig.eigenvalues[col]);
    out.report.spectrum.push_back(lambda);
    kept_weight += lambda;
    for (std::size_t i = 0; i < dim_sys; ++i)
      out.projector(i, k) = eig.eigenvectors(i, col);
  }
  out.report.kept = int(kept);
  out.report.discarded_weight = std::max(0.0, 1.0 - kept_weight);
  return out;
}

DmrgBlock project_block(const DmrgBlock& grown, const Matrix& projector) {
  const Matrix pd = projector.adjoint();
  DmrgBlock out;
  out.length = grown.length;
  out.basis_size = int(projector.cols());
  out.hamiltonian = pd * grown.hamiltonian * projector;
  out.edge_sz = pd * grown.edge_sz * projector;
  // Re-symmetrize: the projection is Hermitian up to rounding, and the
  // block invariant is exact hermiticity.
  for (std::size_t i = 0; i < out.hamiltonian.rows(); ++i)
    for (std::size_t j = i; j < out.hamiltonian.cols(); ++j) {
      const cplx h = 0.5 * (out.hamiltonian(i, j) + std::conj(out.hamiltonian(j, i)));
      out.hamiltonian(i, j) = h;
      out.hamiltonian(j, i) = std::conj(h);
      const cplx e = 0.5 * (out.edge_sz(i, j) + std::conj(out.edge_sz(j, i)));
      out.edge_sz(i, j) = e;
      out.edge_sz(j, i) = std::conj(e);
    }
  return out;
}

Dmrg::Dmrg(const DmrgConfig& cfg) : cfg_(cfg) { check_config(cfg); }

SuperblockGround Dmrg::solve_current(const cvector* guess, int env_length) {
  const DmrgBlock sys = grow_block(left_[pos_].block, cfg_.g);
  const DmrgBlock env = grow_block(right_[env_length].block, cfg_.g);
  eig::SolverConfig solver;
  solver.tolerance = std::min(1e-12, cfg_.energy_tolerance * 1e-2);
  solver.max_iterations = 2000;
  solver.seed = splitmix64(cfg_.seed ^ ++solve_counter_);
  auto ground = superblock_ground(sys, env, solver, guess);
  psi_ = ground.psi;
  current_energy_ = ground.energy;
  best_energy_ = std::min(best_energy_, ground.energy);
  return ground;
}

double Dmrg::sys_entropy() const {
  const std::size_t dim_sys = 2 * left_[pos_].block.basis_size;
  const std::size_t dim_env = psi_.size() / dim_sys;
  const auto rho = density::reduce_split(psi_, dim_sys, dim_env, density::Keep::A);
  const auto eig = eig::dense_eigh(rho.matrix, false);
  std::vector<double> spectrum;
  for (double v : eig.eigenvalues) spectrum.push_back(std::max(0.0, v));
  return entropy_of(spectrum);
}

DmrgResult Dmrg::run_infinite() {
  const int n = cfg_.target_length;
  left_.assign(n, Stored{});
  right_.assign(n, Stored{});
  left_[1].block = single_site_block(cfg_.g);
  right_[1].block = single_site_block(cfg_.g);

  DmrgResult result;
  result.length = n;
  best_energy_ = std::numeric_limits<double>::infinity();

  for (pos_ = 1; 2 * pos_ + 2 <= n; ++pos_) {
    solve_current(nullptr, pos_);
    result.sweep_energies.push_back(current_energy_);

    const std::size_t dim_sys = 2 * left_[pos_].block.basis_size;
    const std::size_t dim_env = psi_.size() / dim_sys;
    Truncation tr = truncate(psi_, dim_sys, dim_env, cfg_.d_max);
    result.truncation_history.push_back(tr.report);
    truncation_history_.push_back(tr.report);
    const DmrgBlock grown = grow_block(left_[pos_].block, cfg_.g);
    left_[pos_ + 1].block = project_block(grown, tr.projector);
    left_[pos_ + 1].growth_projector = tr.projector;
    // Reflection symmetry: the environment mirrors the system.
    right_[pos_ + 1] = left_[pos_ + 1];
    result.final_truncation = std::move(tr.report);
  }
  pos_ = n / 2 - 1;  // configuration of the last solve

  result.energy = current_energy_;
  result.energy_per_bond = result.energy / double(n - 1);
  result.entanglement_entropy_mid = sys_entropy();
  infinite_done_ = true;
  infinite_result_ = result;
  return result;
}

void Dmrg::move_right() {
  const int n = cfg_.target_length;
  const int r = n - pos_ - 2;  // current environment block length
  const std::size_t dim_sys = 2 * left_[pos_].block.basis_size;
  const std::size_t dim_env = psi_.size() / dim_sys;

  Truncation tr = truncate(psi_, dim_sys, dim_env, cfg_.d_max);
  truncation_history_.push_back(tr.report);
  const DmrgBlock grown = grow_block(left_[pos_].block, cfg_.g);
  left_[pos_ + 1].block = project_block(grown, tr.projector);
  left_[pos_ + 1].growth_projector = tr.projector;

  // Transform the ground state into the bases of the next configuration:
  // contract the new system projector, then expand the environment block
  // through the projector that created it.
  const Matrix& p = tr.projector;               // dim_sys x k
  const Matrix& q = right_[r].growth_projector; // (2 m_{r-1}) x m_r
  const std::size_t k = p.cols();
  const std::size_t mr = right_[r].block.basis_size;
  const std::size_t mr_prev = q.rows() / 2;

  // phi[A][b*2+tau] = sum_gs conj(P[gs][A]) psi[gs][b*2+tau]
  cvector phi(k * dim_env, cplx(0.0));
  for (std::size_t gs = 0; gs < dim_sys; ++gs)
    for (std::size_t a = 0; a < k; ++a) {
      const cplx c = std::conj(p(gs, a));
      if (c == cplx(0.0)) continue;
      const cplx* src = &psi_[gs * dim_env];
      cplx* dst = &phi[a * dim_env];
      for (std::size_t e = 0; e < dim_env; ++e) dst[e] += c * src[e];
    }
  // psi'[(A*2+tau)][(b~*2+tau')] = sum_b Q[b~*2+tau'][b] phi[A][b*2+tau]
  const std::size_t new_env = 2 * mr_prev;
  cvector next(k * 2 * new_env, cplx(0.0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t tau = 0; tau < 2; ++tau)
      for (std::size_t ghat = 0; ghat < new_env; ++ghat) {
        cplx acc = 0.0;
        for (std::size_t b = 0; b < mr; ++b)
          acc += q(ghat, b) * phi[a * dim_env + b * 2 + tau];
        next[(a * 2 + tau) * new_env + ghat] = acc;
      }
  psi_ = std::move(next);
  ++pos_;

  const double norm = vec_norm(psi_);
  if (norm < 1e-8) {
    // Degenerate-case fallback: the transformed guess lost its support.
    psi_ = eig::random_unit_vector(psi_.size(),
                                   splitmix64(cfg_.seed ^ (0x5157u + solve_counter_)));
  } else {
    for (auto& c : psi_) c /= norm;
  }
}

void Dmrg::move_left() {
  const int n = cfg_.target_length;
  const int r = n - pos_ - 2;
  const std::size_t dim_sys = 2 * left_[pos_].block.basis_size;
  const std::size_t dim_env = psi_.size() / dim_sys;

  // Truncate the environment side.
  cvector swapped(psi_.size());
  for (std::size_t s = 0; s < dim_sys; ++s)
    for (std::size_t e = 0; e < dim_env; ++e)
      swapped[e * dim_sys + s] = psi_[s * dim_env + e];
  Truncation tr = truncate(swapped, dim_env, dim_sys, cfg_.d_max);
  truncation_history_.push_back(tr.report);
  const DmrgBlock grown = grow_block(right_[r].block, cfg_.g);
  right_[r + 1].block = project_block(grown, tr.projector);
  right_[r + 1].growth_projector = tr.projector;

  const Matrix& qp = tr.projector;                  // dim_env x k
  const Matrix& pl = left_[pos_].growth_projector;  // (2 m_{l-1}) x m_l
  const std::size_t k = qp.cols();
  const std::size_t ml = left_[pos_].block.basis_size;
  const std::size_t ml_prev = pl.rows() / 2;

  // phi[a*2+sigma][B] = sum_ge psi[(a*2+sigma)][ge] conj(Q[ge][B])
  cvector phi(dim_sys * k, cplx(0.0));
  for (std::size_t gs = 0; gs < dim_sys; ++gs)
    for (std::size_t bb = 0; bb < k; ++bb) {
      cplx acc = 0.0;
      for (std::size_t ge = 0; ge < dim_env; ++ge)
        acc += psi_[gs * dim_env + ge] * std::conj(qp(ge, bb));
      phi[gs * k + bb] = acc;
    }
  // psi'[(a~*2+sigma~)][(B*2+sigma)] = sum_a P[a~*2+sigma~][a] phi[a*2+sigma][B]
  const std::size_t new_sys = 2 * ml_prev;
  cvector next(new_sys * 2 * k, cplx(0.0));
  for (std::size_t ghat = 0; ghat < new_sys; ++ghat)
    for (std::size_t a = 0; a < ml; ++a) {
      const cplx c = pl(ghat, a);
      if (c == cplx(0.0)) continue;
      for (std::size_t sigma = 0; sigma < 2; ++sigma)
        for (std::size_t bb = 0; bb < k; ++bb)
          next[ghat * 2 * k + bb * 2 + sigma] += c * phi[(a * 2 + sigma) * k + bb];
    }
  psi_ = std::move(next);
  --pos_;

  const double norm = vec_norm(psi_);
  if (norm < 1e-8) {
    psi_ = eig::random_unit_vector(psi_.size(),
                                   splitmix64(cfg_.seed ^ (0x4c57u + solve_counter_)));
  } else {
    for (auto& c : psi_) c /= norm;
  }
}

DmrgResult Dmrg::run_finite() {
  if (cfg_.sweep_count < 1)
    throw std::invalid_argument("dmrg: sweep_count >= 1 required for finite sweeps");
  if (!infinite_done_) run_infinite();
  const int n = cfg_.target_length;

  DmrgResult result;
  result.length = n;

  double prev_sweep_energy = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < cfg_.sweep_count; ++sweep) {
    double sweep_min = current_energy_;
    auto record = [&] {
      sweep_min = std::min(sweep_min, current_energy_);
      result.step_entropies.push_back(sys_entropy());
    };
    // Right pass to the edge, left pass to the other edge, return to the
    // symmetric configuration.
    while (pos_ < n - 3) {
      move_right();
      solve_current(&psi_, n - pos_ - 2);
      record();
    }
    while (pos_ > 1) {
      move_left();
      solve_current(&psi_, n - pos_ - 2);
      record();
    }
    while (pos_ < n / 2 - 1) {
      move_right();
      solve_current(&psi_, n - pos_ - 2);
      record();
    }
    result.sweep_energies.push_back(sweep_min);
    result.sweeps_performed = sweep + 1;
    if (std::abs(sweep_min - prev_sweep_energy) < cfg_.energy_tolerance) break;
    prev_sweep_energy = sweep_min;
  }
  result.truncation_history = truncation_history_;

  // Final measurement at the symmetric configuration.
  result.energy = best_energy_;
  result.energy_per_bond = result.energy / double(n - 1);
  result.entanglement_entropy_mid = sys_entropy();
  const std::size_t dim_sys = 2 * left_[pos_].block.basis_size;
  result.final_truncation =
      truncate(psi_, dim_sys, psi_.size() / dim_sys, cfg_.d_max).report;
  return result;
}

DmrgResult infinite_dmrg(const DmrgConfig& cfg) { return Dmrg(cfg).run_infinite(); }

DmrgResult finite_dmrg(const DmrgConfig& cfg) { return Dmrg(cfg).run_finite(); }

}  // namespace qmb::dmrg
