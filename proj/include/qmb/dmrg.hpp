#ifndef QMB_DMRG_HPP
#define QMB_DMRG_HPP

#include <cstdint>
#include <vector>

#include "qmb/eigensolve.hpp"
#include "qmb/matrix.hpp"

namespace qmb::dmrg {

// Truncated block of a TFIM chain segment. The transverse-field terms of
// all contained sites are folded into the block Hamiltonian; the only
// operator needed to couple further is sigma_z of the newest (edge) site.
struct DmrgBlock {
  int length = 1;
  int basis_size = 2;
  Matrix hamiltonian;
  Matrix edge_sz;
  bool field_terms_absorbed = true;
};

struct TruncationReport {
  int kept = 0;
  double discarded_weight = 0.0;       // epsilon
  std::vector<double> spectrum;        // kept eigenvalues, descending
  bool multiplet_extended = false;     // kept a full degenerate multiplet
  bool tie_broken = false;             // lexicographic tie-break applied
};

struct DmrgConfig {
  int d_max = 16;
  int target_length = 16;  // even, >= 4
  double g = 1.0;
  double energy_tolerance = 1e-9;  // per-sweep energy change for early stop
  int sweep_count = 3;
  std::uint64_t seed = 1;
};

struct DmrgResult {
  double energy = 0.0;
  double energy_per_bond = 0.0;
  int length = 0;
  TruncationReport final_truncation;
  double entanglement_entropy_mid = 0.0;  // nats, system|environment cut
  std::vector<double> sweep_energies;     // infinite: per growth step;
                                          // finite: per-sweep minimum
  std::vector<double> step_entropies;     // one per finite-sweep solve
  std::vector<TruncationReport> truncation_history;
  int sweeps_performed = 0;
};

struct SuperblockGround {
  double energy = 0.0;
  cvector psi;  // index = sys_grown * dim_env + env_grown
  int lanczos_iterations = 0;
};

DmrgBlock single_site_block(double g);

// Adds one site: H' = H (x) I + I (x) g sx - edge_sz (x) sz, basis 2m.
DmrgBlock grow_block(const DmrgBlock& block, double g);

// Ground state of H_sys (x) I + I (x) H_env - edge_sz (x) edge_sz via the
// matrix-free Lanczos solver, optionally warm-started from `guess`.
SuperblockGround superblock_ground(const DmrgBlock& sys_grown,
                                   const DmrgBlock& env_grown,
                                   const eig::SolverConfig& solver,
                                   const cvector* guess = nullptr);

struct Truncation {
  Matrix projector;  // dim_sys x kept, orthonormal columns
  TruncationReport report;
};

// Diagonalizes the reduced density matrix of the system side of psi and
// keeps the eigenvectors with the largest eigenvalues. A degenerate
// multiplet at the cut is kept whole when it fits within d_max + 4,
// otherwise broken by a deterministic lexicographic rule.
Truncation truncate(const cvector& psi, std::size_t dim_sys, std::size_t dim_env,
                    int d_max);

DmrgBlock project_block(const DmrgBlock& grown, const Matrix& projector);

// Runs the grow / solve / truncate loop from a single site to the target
// length, mirroring the environment from the system. The engine keeps the
// block chain so finite sweeps can follow.
class Dmrg {
 public:
  explicit Dmrg(const DmrgConfig& cfg);

  DmrgResult run_infinite();
  // Finite-system sweeps at fixed length (runs the infinite stage first if
  // needed); each superblock solve is warm-started from the previous
  // ground state transformed into the new bases.
  DmrgResult run_finite();

 private:
  struct Stored {
    DmrgBlock block;
    Matrix growth_projector;  // from grow(parent) product basis
  };

  SuperblockGround solve_current(const cvector* guess, int env_length);
  void move_right();
  void move_left();
  double sys_entropy() const;

  DmrgConfig cfg_;
  std::vector<Stored> left_;   // index = block length
  std::vector<Stored> right_;
  int pos_ = 0;                // current left block length
  cvector psi_;                // ground state at the current configuration
  double current_energy_ = 0.0;
  double best_energy_ = 0.0;
  bool infinite_done_ = false;
  DmrgResult infinite_result_;
  std::uint64_t solve_counter_ = 0;
  std::vector<TruncationReport> truncation_history_;
};

DmrgResult infinite_dmrg(const DmrgConfig& cfg);
DmrgResult finite_dmrg(const DmrgConfig& cfg);

}  // namespace qmb::dmrg

#endif
