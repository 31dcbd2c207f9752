#include "qmb/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qmb/rng.hpp"

namespace qmb::eig {

namespace {

constexpr double kBreakdown = 1e-28;  // threshold on b^2

// ---------------------------------------------------------------------
// Implicit-shift QL on a symmetric tridiagonal matrix. d holds the
// diagonal (length n), e the subdiagonal in e[0..n-2]; z, when non-null,
// is an n x n row-major matrix whose columns get rotated along (the
// caller seeds it with the identity or with the Householder transform).
void ql_implicit(std::vector<double>& d, std::vector<double>& e, double* z,
                 std::size_t n) {
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    while (true) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++iterations > 80)
        throw std::runtime_error("tridiagonal QL failed to converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        const std::size_t i = ii;
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z) {
          for (std::size_t k = 0; k < n; ++k) {
            f = z[k * n + i + 1];
            z[k * n + i + 1] = s * z[k * n + i] + c * f;
            z[k * n + i] = c * z[k * n + i] - s * f;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

void sort_pairs(std::vector<double>& values, double* z, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];
  values = sorted;
  if (z) {
    std::vector<double> row(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) row[i] = z[k * n + order[i]];
      std::copy(row.begin(), row.end(), z + k * n);
    }
  }
}

// ---------------------------------------------------------------------
// Householder reduction of a real symmetric matrix (row-major, destroyed)
// to tridiagonal form; optionally accumulates the orthogonal transform.
void householder_tridiag(std::vector<double>& a, std::size_t n,
                         std::vector<double>& d, std::vector<double>& e,
                         std::vector<double>* q) {
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  std::vector<double> house_v;   // reflector per step, stored flat
  std::vector<double> house_beta;
  std::vector<std::size_t> house_off;
  std::vector<double> v, p, w;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    const double x0 = a[(k + 1) * n + k];
    double sigma = 0.0;
    for (std::size_t i = 2; i <= m; ++i) {
      const double xi = a[(k + i) * n + k];
      sigma += xi * xi;
    }
    if (sigma == 0.0) {
      e[k] = x0;
      if (q) {
        house_off.push_back(house_v.size());
        house_beta.push_back(0.0);
      }
      continue;
    }
    const double mu = std::sqrt(x0 * x0 + sigma);
    const double v0 = (x0 <= 0.0) ? x0 - mu : -sigma / (x0 + mu);
    const double beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    v.assign(m, 0.0);
    v[0] = 1.0;
    for (std::size_t i = 2; i <= m; ++i) v[i - 1] = a[(k + i) * n + k] / v0;
    // p = beta * A22 * v, using only the lower triangle of A22
    p.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      const double* row = &a[(k + 1 + i) * n + k + 1];
      for (std::size_t j = 0; j <= i; ++j) s += row[j] * v[j];
      for (std::size_t j = i + 1; j < m; ++j) s += a[(k + 1 + j) * n + k + 1 + i] * v[j];
      p[i] = beta * s;
    }
    double vp = 0.0;
    for (std::size_t i = 0; i < m; ++i) vp += v[i] * p[i];
    const double kappa = 0.5 * beta * vp;
    w.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - kappa * v[i];
    // A22 -= v w^T + w v^T (lower triangle only)
    for (std::size_t i = 0; i < m; ++i) {
      double* row = &a[(k + 1 + i) * n + k + 1];
      for (std::size_t j = 0; j <= i; ++j) row[j] -= v[i] * w[j] + w[i] * v[j];
    }
    e[k] = mu;
    if (q) {
      house_off.push_back(house_v.size());
      house_beta.push_back(beta);
      house_v.insert(house_v.end(), v.begin(), v.end());
    }
  }
  if (n >= 2) e[n - 2] = a[(n - 1) * n + n - 2];
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
  if (q) {
    q->assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) (*q)[i * n + i] = 1.0;
    for (std::size_t step = house_beta.size(); step-- > 0;) {
      const double beta = house_beta[step];
      if (beta == 0.0) continue;
      const std::size_t k = step;
      const std::size_t m = n - k - 1;
      const double* hv = &house_v[house_off[step]];
      // Q[k+1:, k+1:] = (I - beta v v^T) Q[k+1:, k+1:]
      w.assign(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const double vi = hv[i];
        if (vi == 0.0) continue;
        const double* row = &(*q)[(k + 1 + i) * n + k + 1];
        for (std::size_t j = 0; j < m; ++j) w[j] += vi * row[j];
      }
      for (std::size_t j = 0; j < m; ++j) w[j] *= beta;
      for (std::size_t i = 0; i < m; ++i) {
        const double vi = hv[i];
        if (vi == 0.0) continue;
        double* row = &(*q)[(k + 1 + i) * n + k + 1];
        for (std::size_t j = 0; j < m; ++j) row[j] -= vi * w[j];
      }
    }
  }
}

EighResult eigh_real(const Matrix& matrix, bool compute_vectors) {
  const std::size_t n = matrix.rows();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = matrix(i, j).real();
  std::vector<double> d, e, q;
  householder_tridiag(a, n, d, e, compute_vectors ? &q : nullptr);
  ql_implicit(d, e, compute_vectors ? q.data() : nullptr, n);
  sort_pairs(d, compute_vectors ? q.data() : nullptr, n);
  EighResult out;
  out.eigenvalues = std::move(d);
  if (compute_vectors) {
    out.eigenvectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.eigenvectors(i, j) = q[i * n + j];
  }
  return out;
}

// ---------------------------------------------------------------------
// Cyclic Jacobi sweeps for complex Hermitian matrices. Fine for the
// dimensions that actually carry complex entries here (density matrices,
// small gate unitaries).
EighResult eigh_jacobi(Matrix a, bool compute_vectors) {
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  const double norm = a.frobenius_norm();
  const double target = 1e-12 * std::max(norm, 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(a(p, q));
    if (std::sqrt(off) < target) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double m = std::abs(apq);
        if (m < 1e-300) continue;
        const cplx phase = apq / m;  // e^{i alpha}
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * m);
        const double t0 = (theta >= 0.0)
                              ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                              : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        const double t = -t0;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx sp = s * phase;        // s e^{i alpha}
        const cplx spc = std::conj(sp);   // s e^{-i alpha}
        // columns: A <- A J
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + spc * akq;
          a(k, q) = -sp * akp + c * akq;
        }
        // rows: A <- J^dagger A
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + sp * aqk;
          a(q, k) = -spc * apk + c * aqk;
        }
        if (compute_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const cplx vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp + spc * vkq;
            v(k, q) = -sp * vkp + c * vkq;
          }
        }
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  EighResult out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = values[order[i]];
  if (compute_vectors) {
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

double smallest_tridiag_eigenvalue(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  std::vector<double> d = a;
  std::vector<double> e = b;
  ql_implicit(d, e, nullptr, d.size());
  return *std::min_element(d.begin(), d.end());
}

}  // namespace

LinearOperator LinearOperator::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("operator must be square");
  LinearOperator op;
  op.dimension = m.rows();
  op.apply = [m](const cvector& in, cvector& out) {
    const std::size_t n = m.rows();
    out.assign(n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m(i, j) * in[j];
      out[i] = s;
    }
  };
  return op;
}

LinearOperator LinearOperator::from_tfim(const spin::TfimHamiltonian& h) {
  LinearOperator op;
  op.dimension = std::size_t(1) << h.n_sites;
  op.apply = [h](const cvector& in, cvector& out) {
    const std::size_t dim = in.size();
    out.assign(dim, cplx(0.0));
    for (std::size_t b = 0; b < dim; ++b) {
      const cplx amp = in[b];
      out[b] += spin::bond_energy(b, h.n_sites, h.boundary) * amp;
      for (int i = 0; i < h.n_sites; ++i)
        out[b ^ (std::uint64_t(1) << i)] += h.g * amp;
    }
  };
  return op;
}

cvector random_unit_vector(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  cvector v(dim);
  for (auto& x : v) x = cplx(rng.next_symmetric(), rng.next_symmetric());
  const double n = vec_norm(v);
  for (auto& x : v) x /= n;
  return v;
}

EigenResult power_method(const LinearOperator& op, const SolverConfig& cfg) {
  if (cfg.tolerance <= 0.0 || cfg.max_iterations < 1)
    throw std::invalid_argument("invalid solver config");
  cvector v = random_unit_vector(op.dimension, cfg.seed);
  cvector w(op.dimension);
  double energy_prev = std::numeric_limits<double>::quiet_NaN();
  EigenResult result;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    op.apply(v, w);
    const double energy = vec_dot(v, w).real();
    result.iterations = iter;
    if (iter > 1 && std::abs(energy - energy_prev) < cfg.tolerance) {
      result.energy = energy;
      result.vector = v;
      cvector r = w;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= energy * v[i];
      result.residual_norm = vec_norm(r);
      result.converged = true;
      return result;
    }
    energy_prev = energy;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.shift * v[i];
    const double n = vec_norm(w);
    if (n < 1e-300)
      throw std::domain_error("power method hit the zero vector; adjust the shift");
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / n;
  }
  // Convergence failure: hand back the last iterate.
  op.apply(v, w);
  result.energy = vec_dot(v, w).real();
  result.vector = v;
  cvector r = w;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= result.energy * v[i];
  result.residual_norm = vec_norm(r);
  result.converged = false;
  return result;
}

LanczosOutcome lanczos(const LinearOperator& op, const SolverConfig& cfg,
                       const cvector* initial) {
  if (op.dimension < 2) throw std::invalid_argument("lanczos needs dimension >= 2");
  if (cfg.tolerance <= 0.0 || cfg.max_iterations < 1)
    throw std::invalid_argument("invalid solver config");

  std::vector<cvector> basis;
  cvector v0;
  if (initial && vec_norm(*initial) > 1e-8) {
    v0 = *initial;
    const double n = vec_norm(v0);
    for (auto& x : v0) x /= n;
  } else {
    v0 = random_unit_vector(op.dimension, cfg.seed);
  }
  basis.push_back(std::move(v0));

  std::vector<double> a, b;
  cvector w(op.dimension);
  double theta_prev = std::numeric_limits<double>::infinity();
  double theta = theta_prev;
  bool converged = false;
  int small_changes = 0;  // converged after two successive sub-tolerance changes

  const int max_steps =
      std::min<int>(cfg.max_iterations, static_cast<int>(op.dimension));
  for (int n = 0; n < max_steps; ++n) {
    op.apply(basis[n], w);
    if (n > 0)
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= b[n - 1] * basis[n - 1][i];
    const double an = vec_dot(basis[n], w).real();
    a.push_back(an);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= an * basis[n][i];

    if (cfg.reorthogonalize) {
      // One modified Gram-Schmidt pass, repeated once more if the vector
      // shrank enough that cancellation may have spoiled it.
      const double before = vec_norm(w);
      for (const auto& u : basis) {
        const cplx overlap = vec_dot(u, w);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= overlap * u[i];
      }
      if (vec_norm(w) < 0.5 * before) {
        for (const auto& u : basis) {
          const cplx overlap = vec_dot(u, w);
          for (std::size_t i = 0; i < w.size(); ++i) w[i] -= overlap * u[i];
        }
      }
    }

    theta = smallest_tridiag_eigenvalue(a, b);
    if (n >= 1) {
      small_changes =
          std::abs(theta - theta_prev) < cfg.tolerance ? small_changes + 1 : 0;
      if (small_changes >= 2) {
        converged = true;
        break;
      }
    }
    theta_prev = theta;

    const double beta = vec_norm(w);
    if (beta * beta <= kBreakdown) {
      // Exact invariant subspace found.
      converged = true;
      break;
    }
    if (n + 1 == max_steps) {
      converged = std::size_t(max_steps) == op.dimension || converged;
      break;
    }
    for (auto& x : w) x /= beta;
    basis.push_back(w);
    b.push_back(beta);
  }

  // Ritz vector for the lowest eigenvalue of the tridiagonal matrix.
  TridiagonalEigen tri = tridiagonal_eigen({a, b});
  theta = tri.eigenvalues.front();
  cvector x(op.dimension, cplx(0.0));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const cplx yk = tri.eigenvectors(k, 0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += yk * basis[k][i];
  }
  const double xn = vec_norm(x);
  for (auto& c : x) c /= xn;
  op.apply(x, w);
  cvector r = w;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= theta * x[i];

  LanczosOutcome out;
  out.eigen.energy = theta;
  out.eigen.vector = std::move(x);
  out.eigen.iterations = static_cast<int>(a.size());
  out.eigen.residual_norm = vec_norm(r);
  out.eigen.converged = converged;
  out.coefficients.a = std::move(a);
  out.coefficients.b = std::move(b);
  out.coefficients.iterations = out.eigen.iterations;
  return out;
}

TridiagonalEigen tridiagonal_eigen(const TridiagonalMatrix& t) {
  const std::size_t n = t.diag.size();
  if (n == 0) throw std::invalid_argument("empty tridiagonal matrix");
  if (t.offdiag.size() + 1 != n)
    throw std::invalid_argument("tridiagonal size mismatch");
  std::vector<double> d = t.diag;
  std::vector<double> e = t.offdiag;
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  ql_implicit(d, e, z.data(), n);
  sort_pairs(d, z.data(), n);
  TridiagonalEigen out;
  out.eigenvalues = std::move(d);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.eigenvectors(i, j) = z[i * n + j];
  return out;
}

EighResult dense_eigh(const Matrix& m, bool compute_vectors) {
  if (m.rows() != m.cols()) throw std::invalid_argument("dense_eigh: not square");
  if (m.rows() > 4096) throw std::invalid_argument("dense_eigh: dimension above 4096");
  if (m.rows() == 0) throw std::invalid_argument("dense_eigh: empty matrix");
  const double scale = std::max(1.0, m.max_abs());
  if (m.hermiticity_defect() > 1e-12 * scale)
    throw std::invalid_argument("dense_eigh: matrix is not Hermitian");
  bool real = true;
  for (std::size_t i = 0; i < m.rows() && real; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j).imag() != 0.0) {
        real = false;
        break;
      }
  return real ? eigh_real(m, compute_vectors) : eigh_jacobi(m, compute_vectors);
}

double thermal_expectation(const spin::TfimHamiltonian& h,
                           const spin::ObservableSpec& spec, double beta) {
  if (h.n_sites > 12)
    throw std::invalid_argument("thermal_expectation: n_sites above 12");
  if (beta < 0.0) throw std::invalid_argument("thermal_expectation: beta < 0");
  const EighResult eig = dense_eigh(spin::dense_tfim(h));
  const std::size_t dim = eig.eigenvalues.size();
  const double e_min = eig.eigenvalues.front();
  double z = 0.0, acc = 0.0;
  spin::StateVector state = spin::StateVector::zero(h.n_sites);
  for (std::size_t i = 0; i < dim; ++i) {
    const double weight = std::exp(-beta * (eig.eigenvalues[i] - e_min));
    for (std::size_t k = 0; k < dim; ++k)
      state.amplitudes[k] = eig.eigenvectors(k, i);
    double value;
    if (spec.kind == spin::ObservableSpec::Kind::energy)
      value = eig.eigenvalues[i];
    else
      value = spin::expectation(spec, state);
    z += weight;
    acc += weight * value;
  }
  return acc / z;
}

}  // namespace qmb::eig
