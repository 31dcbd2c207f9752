#include "qmb/spin_chain.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "qmb/rng.hpp"

namespace qmb::spin {

namespace {

void check_sites(int n_sites) {
  if (n_sites < 1 || n_sites > 30)
    throw std::invalid_argument("n_sites out of range");
}

}  // namespace

StateVector StateVector::zero(int n_sites) {
  check_sites(n_sites);
  StateVector v;
  v.n_sites = n_sites;
  v.amplitudes.assign(std::size_t(1) << n_sites, cplx(0.0));
  return v;
}

StateVector StateVector::basis(int n_sites, std::uint64_t bits) {
  StateVector v = zero(n_sites);
  if (bits >= v.dimension()) throw std::invalid_argument("basis index out of range");
  v.amplitudes[bits] = 1.0;
  return v;
}

StateVector StateVector::random_unit(int n_sites, std::uint64_t seed) {
  StateVector v = zero(n_sites);
  Rng rng(seed);
  for (auto& a : v.amplitudes) a = cplx(rng.next_symmetric(), rng.next_symmetric());
  v.normalize();
  return v;
}

void StateVector::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
  const double inv = 1.0 / n;
  for (auto& a : amplitudes) a *= inv;
}

double bond_energy(std::uint64_t bits, int n_sites, Boundary boundary) {
  // Bit i of (bits ^ (bits >> 1)) marks an unequal neighbour pair, so the
  // popcount gives the number of broken bonds directly.
  const std::uint64_t mism = bits ^ (bits >> 1);
  const std::uint64_t mask = (std::uint64_t(1) << (n_sites - 1)) - 1;
  int broken = std::popcount(mism & mask);
  int bonds = n_sites - 1;
  if (boundary == Boundary::periodic && n_sites > 2) {
    broken += int(((bits >> (n_sites - 1)) ^ bits) & 1);
    bonds += 1;
  }
  return -double(bonds - 2 * broken);
}

StateVector apply_tfim(const TfimHamiltonian& h, const StateVector& v,
                       ApplyStats* stats) {
  if (h.n_sites != v.n_sites)
    throw std::invalid_argument("apply_tfim: dimension mismatch");
  StateVector out = StateVector::zero(h.n_sites);
  const std::size_t dim = v.dimension();
  std::uint64_t updates = 0;
  for (std::size_t b = 0; b < dim; ++b) {
    const cplx amp = v.amplitudes[b];
    out.amplitudes[b] += bond_energy(b, h.n_sites, h.boundary) * amp;
    ++updates;
    for (int i = 0; i < h.n_sites; ++i) {
      out.amplitudes[b ^ (std::uint64_t(1) << i)] += h.g * amp;
      ++updates;
    }
  }
  if (stats) stats->entry_updates += updates;
  return out;
}

Matrix dense_tfim(const TfimHamiltonian& h) {
  if (h.n_sites > 14)
    throw std::invalid_argument("dense_tfim: n_sites above the 2^14 guard");
  const std::size_t dim = std::size_t(1) << h.n_sites;
  Matrix m(dim, dim);
  for (std::size_t b = 0; b < dim; ++b) {
    m(b, b) = bond_energy(b, h.n_sites, h.boundary);
    for (int i = 0; i < h.n_sites; ++i) m(b ^ (std::uint64_t(1) << i), b) += h.g;
  }
  return m;
}

double expectation(const ObservableSpec& spec, const StateVector& v,
                   const TfimHamiltonian* h) {
  const std::size_t dim = v.dimension();
  const int n = v.n_sites;
  switch (spec.kind) {
    case ObservableSpec::Kind::magnetization_z_sq: {
      double s = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        const double m = double(2 * std::popcount(b) - n) / n;
        s += std::norm(v.amplitudes[b]) * m * m;
      }
      return s;
    }
    case ObservableSpec::Kind::magnetization_z: {
      double s = 0.0;
      for (std::size_t b = 0; b < dim; ++b)
        s += std::norm(v.amplitudes[b]) * double(2 * std::popcount(b) - n) / n;
      return s;
    }
    case ObservableSpec::Kind::transverse_magnetization: {
      cplx s = 0.0;
      for (std::size_t b = 0; b < dim; ++b)
        for (int i = 0; i < n; ++i)
          s += std::conj(v.amplitudes[b ^ (std::uint64_t(1) << i)]) * v.amplitudes[b];
      return s.real() / n;
    }
    case ObservableSpec::Kind::zz_correlation: {
      if (spec.site_i < 0 || spec.site_i >= n || spec.site_j < 0 || spec.site_j >= n)
        throw std::invalid_argument("zz_correlation: site index out of range");
      double s = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        const int zi = (b >> spec.site_i) & 1 ? +1 : -1;
        const int zj = (b >> spec.site_j) & 1 ? +1 : -1;
        s += std::norm(v.amplitudes[b]) * zi * zj;
      }
      return s;
    }
    case ObservableSpec::Kind::energy: {
      if (!h) throw std::invalid_argument("energy expectation needs the Hamiltonian");
      const StateVector hv = apply_tfim(*h, v);
      return vec_dot(v.amplitudes, hv.amplitudes).real();
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace qmb::spin
