// lattice.hpp — finite-lattice brute-force oracle: sparse effective
// Hamiltonians for the physical and mirage baths, time evolution in the one-
// and two-excitation sectors, and shift-invert eigenmodes.
//
// Single-excitation basis order: emitters 0..Na-1 first, then bath sites
// interleaved as A0, B0, A1, B1, ... Two-excitation basis: symmetric pairs
// (p <= q) of the modes [emitter, A0, B0, A1, B1, ...] in lexicographic order,
// index(p,q) = p*M - p*(p-1)/2 + (q-p) with M the mode count; doubly occupied
// modes carry the bosonic sqrt(2) factors.
//
// Mirage (Sheet::Second) builds rescale the emitter-bath couplings by
// xi = r^{-(cell - anchor)} (sublattice A, one extra r^{-1} on B), with the
// anchor at the smallest emitter cell. The anchor is a pure gauge: it drops
// out of every emitter-emitter observable.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sshbath/bound_states.hpp"
#include "sshbath/timeseries.hpp"

namespace sshbath {

struct Triplet {
  int row;
  int col;
  cplx value;
};

// Compressed-row complex sparse matrix; matrix-vector product only.
struct SparseMatrix {
  int dim{0};
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<cplx> val;

  static SparseMatrix from_triplets(int dim, std::vector<Triplet> triplets);
  void apply(const cplx* in, cplx* out) const;
  double max_abs() const;
};

struct LatticeOperator {
  SparseMatrix matrix;
  Boundary boundary{Boundary::PBC};
  Sheet sheet{Sheet::First};
  int n_emitters{0};
  int n_cells{0};
  bool two_excitation{false};

  int dim() const { return matrix.dim; }
  int emitter_index(int m) const;
  int bath_index(Sublattice s, int cell) const;
  int mode_count() const;              // two-excitation sector only
  int pair_index(int p, int q) const;  // two-excitation sector only
  std::string label(int index) const;
};

// Sheet::Second with OBC is heuristic: the mirage construction is defined
// from the periodic bath, so open mirage builds are for exploration only.
LatticeOperator build_heff(const BathParams& p, const std::vector<EmitterSpec>& emitters, int n_b,
                           Boundary boundary, Sheet sheet);

// Two-excitation sector of one nonlinear (Kerr) emitter coupled to the bath.
LatticeOperator two_excitation_build(const BathParams& p, const EmitterSpec& emitter, double u,
                                     int n_b, Boundary boundary, Sheet sheet);

// Adaptive Dormand-Prince integration of d psi/dt = -i H psi. Amplitudes of
// the watched basis indices are recorded at every grid time under labels
// "idx:<n>"; the state norm is recorded under "norm".
TimeSeries evolve_state(const LatticeOperator& op, const std::vector<cplx>& psi0,
                        const std::vector<double>& t_grid, const std::vector<int>& watch);

// Shift-and-invert inverse iteration around sigma (dense LU).
std::pair<cplx, std::vector<cplx>> eigenmode_near(const LatticeOperator& op, cplx sigma);

// Full dense spectrum; small operators only.
std::vector<cplx> full_spectrum(const LatticeOperator& op);

// Versioned little-endian binary dump (debugging aid).
void save_operator(const LatticeOperator& op, const std::string& path);
LatticeOperator load_operator(const std::string& path);
void save_state(const std::vector<cplx>& psi, const std::string& path);
std::vector<cplx> load_state(const std::string& path);

}  // namespace sshbath
