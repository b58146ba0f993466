#include "sshbath/lattice.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <random>

namespace sshbath {

static_assert(std::endian::native == std::endian::little,
              "binary dumps are defined little-endian");

// ---------------------------------------------------------------------------
// sparse matrix
// ---------------------------------------------------------------------------

SparseMatrix SparseMatrix::from_triplets(int dim, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.dim = dim;
  m.row_ptr.assign((size_t)dim + 1, 0);
  for (size_t i = 0; i < triplets.size(); ++i) {
    const Triplet& t = triplets[i];
    if (t.row < 0 || t.row >= dim || t.col < 0 || t.col >= dim)
      fail(ErrorCode::InvalidArgument, "triplet out of range");
    if (!m.col.empty() && !triplets.empty() && i > 0 && triplets[i - 1].row == t.row &&
        triplets[i - 1].col == t.col) {
      m.val.back() += t.value;
    } else {
      m.col.push_back(t.col);
      m.val.push_back(t.value);
      m.row_ptr[(size_t)t.row + 1]++;
    }
  }
  for (int r = 0; r < dim; ++r) m.row_ptr[(size_t)r + 1] += m.row_ptr[(size_t)r];
  return m;
}

void SparseMatrix::apply(const cplx* in, cplx* out) const {
  for (int r = 0; r < dim; ++r) {
    cplx acc{0.0, 0.0};
    for (int i = row_ptr[(size_t)r]; i < row_ptr[(size_t)r + 1]; ++i)
      acc += val[(size_t)i] * in[col[(size_t)i]];
    out[r] = acc;
  }
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx v : val) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------
// basis bookkeeping
// ---------------------------------------------------------------------------

int LatticeOperator::emitter_index(int m) const {
  if (m < 0 || m >= n_emitters) fail(ErrorCode::InvalidArgument, "emitter index out of range");
  return m;
}

int LatticeOperator::bath_index(Sublattice s, int cell) const {
  if (cell < 0 || cell >= n_cells) fail(ErrorCode::InvalidArgument, "cell out of range");
  return n_emitters + 2 * cell + (s == Sublattice::B ? 1 : 0);
}

int LatticeOperator::mode_count() const {
  if (!two_excitation) fail(ErrorCode::InvalidArgument, "single-excitation operator");
  return 1 + 2 * n_cells;
}

int LatticeOperator::pair_index(int p, int q) const {
  const int m = mode_count();
  if (p > q) std::swap(p, q);
  if (p < 0 || q >= m) fail(ErrorCode::InvalidArgument, "mode index out of range");
  return p * m - p * (p - 1) / 2 + (q - p);
}

std::string LatticeOperator::label(int index) const {
  if (!two_excitation) {
    if (index < n_emitters) return "emitter:" + std::to_string(index);
    const int k = index - n_emitters;
    return std::string(k % 2 == 0 ? "A" : "B") + ":" + std::to_string(k / 2);
  }
  return "pair:" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// builds
// ---------------------------------------------------------------------------

namespace {

struct HopSet {
  double intra_fwd;  // row A, col B
  double intra_bwd;  // row B, col A
  cplx onsite;
};

HopSet bath_hops(const BathParams& p, Sheet sheet) {
  if (sheet == Sheet::First) return {p.jp(), p.jm(), -0.5 * I * p.gamma_b};
  const double jt = mirage_map(p).j1_tilde;
  return {jt, jt, -0.5 * I * p.gamma_b};
}

// Single-particle triplets for the bath block plus emitter couplings; offsets
// follow the LatticeOperator basis. Emitter mode index = m, bath mode index =
// n_emitters + 2*cell + sub.
void add_single_particle(const BathParams& p, const std::vector<EmitterSpec>& emitters, int n_b,
                         Boundary boundary, Sheet sheet, int emitter_offset,
                         std::vector<Triplet>& out) {
  const HopSet h = bath_hops(p, sheet);
  const int na = (int)emitters.size();
  auto bidx = [&](Sublattice s, int cell) {
    return emitter_offset + na + 2 * cell + (s == Sublattice::B ? 1 : 0);
  };

  for (int j = 0; j < n_b; ++j) {
    const int a = bidx(Sublattice::A, j);
    const int b = bidx(Sublattice::B, j);
    if (std::abs(h.onsite) > 0.0) {
      out.push_back({a, a, h.onsite});
      out.push_back({b, b, h.onsite});
    }
    out.push_back({a, b, h.intra_fwd});
    out.push_back({b, a, h.intra_bwd});
    const bool wrap = j + 1 == n_b;
    if (!wrap || boundary == Boundary::PBC) {
      const int a_next = bidx(Sublattice::A, (j + 1) % n_b);
      out.push_back({b, a_next, p.j2});
      out.push_back({a_next, b, p.j2});
    }
  }

  // Mirage couplings rescaled by xi = r^{-j} on A, r^{-j-1} on B. The overall
  // gauge is anchored at the first emitter's own site (xi = 1 there), which
  // keeps every emitter-emitter observable identical to the j-anchored form
  // and makes single-emitter eigenvectors match the analytic tables directly.
  int anchor_pw = 0;
  if (!emitters.empty()) {
    anchor_pw = -emitters.front().cell -
                (emitters.front().sublattice == Sublattice::B ? 1 : 0);
  }
  const double r = sheet == Sheet::Second ? mirage_map(p).r : 1.0;

  for (int m = 0; m < na; ++m) {
    const EmitterSpec& em = emitters[(size_t)m];
    em.validate();
    if (em.cell < 0 || em.cell >= n_b)
      fail(ErrorCode::InvalidArgument, "emitter cell outside the lattice");
    const int me = emitter_offset + m;
    out.push_back({me, me, em.delta_prime()});
    const int site = bidx(em.sublattice, em.cell);
    if (sheet == Sheet::First) {
      out.push_back({site, me, em.omega_rabi});
      out.push_back({me, site, em.omega_rabi});
    } else {
      const int pw = -em.cell - (em.sublattice == Sublattice::B ? 1 : 0) - anchor_pw;
      const double xi = std::pow(r, pw);
      out.push_back({site, me, em.omega_rabi * xi});
      out.push_back({me, site, em.omega_rabi / xi});
    }
  }
}

}  // namespace

LatticeOperator build_heff(const BathParams& p, const std::vector<EmitterSpec>& emitters, int n_b,
                           Boundary boundary, Sheet sheet) {
  p.validate();
  if (n_b < 4) fail(ErrorCode::InvalidArgument, "n_b must be >= 4");
  LatticeOperator op;
  op.boundary = boundary;
  op.sheet = sheet;
  op.n_emitters = (int)emitters.size();
  op.n_cells = n_b;
  op.two_excitation = false;

  std::vector<Triplet> trips;
  trips.reserve((size_t)(6 * n_b + 4 * emitters.size()));
  add_single_particle(p, emitters, n_b, boundary, sheet, 0, trips);
  op.matrix = SparseMatrix::from_triplets(op.n_emitters + 2 * n_b, std::move(trips));
  return op;
}

LatticeOperator two_excitation_build(const BathParams& p, const EmitterSpec& emitter, double u,
                                     int n_b, Boundary boundary, Sheet sheet) {
  p.validate();
  emitter.validate();
  if (n_b < 4) fail(ErrorCode::InvalidArgument, "n_b must be >= 4");
  if (n_b > 100) fail(ErrorCode::DimensionTooLarge, "two-excitation sector limited to n_b <= 100");

  // single-particle matrix over modes [emitter, A0, B0, ...]
  std::vector<Triplet> single;
  add_single_particle(p, {emitter}, n_b, boundary, sheet, 0, single);

  const int modes = 1 + 2 * n_b;
  LatticeOperator op;
  op.boundary = boundary;
  op.sheet = sheet;
  op.n_emitters = 1;
  op.n_cells = n_b;
  op.two_excitation = true;

  auto pidx = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    return a * modes - a * (a - 1) / 2 + (b - a);
  };
  const int dim = modes * (modes + 1) / 2;

  // norm factor of |pq>: sqrt(2) when doubly occupied
  auto nf = [](int a, int b) { return a == b ? std::sqrt(2.0) : 1.0; };

  std::vector<Triplet> trips;
  trips.reserve(single.size() * (size_t)modes);
  for (const Triplet& t : single) {
    const int x = t.row, y = t.col;
    // h_xy a_x^dag a_y on |y s> -> |x s> for every spectator s; a_y hits a
    // doubly occupied column twice
    for (int s = 0; s < modes; ++s) {
      const double mult = s == y ? 2.0 : 1.0;
      trips.push_back({pidx(x, s), pidx(y, s), t.value * mult * nf(x, s) / nf(y, s)});
    }
  }
  trips.push_back({pidx(0, 0), pidx(0, 0), cplx{u, 0.0}});

  op.matrix = SparseMatrix::from_triplets(dim, std::move(trips));
  return op;
}

// ---------------------------------------------------------------------------
// adaptive Dormand-Prince evolution
// ---------------------------------------------------------------------------

namespace {

class Rk45 {
 public:
  explicit Rk45(const SparseMatrix& h) : h_(h), n_((size_t)h.dim) {
    for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y4_}) k->resize(n_);
    have_k1_ = false;
  }

  void deriv(const std::vector<cplx>& y, std::vector<cplx>& out) {
    h_.apply(y.data(), out.data());
    for (size_t i = 0; i < n_; ++i) out[i] *= cplx{0.0, -1.0};
  }

  // advance y from t to t_end
  void advance(std::vector<cplx>& y, double t, double t_end) {
    const double tol = 1e-10;
    double hstep = std::min(0.05, t_end - t);
    if (!have_k1_) {
      deriv(y, k1_);
      have_k1_ = true;
    }
    while (t < t_end) {
      hstep = std::min(hstep, t_end - t);
      if (hstep < 1e-14) fail(ErrorCode::StepUnderflow, "time step underflow");

      stage(y, k2_, {0.2}, hstep);
      stage(y, k3_, {3.0 / 40, 9.0 / 40}, hstep);
      stage(y, k4_, {44.0 / 45, -56.0 / 15, 32.0 / 9}, hstep);
      stage(y, k5_, {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729}, hstep);
      stage(y, k6_, {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
            hstep);
      // 5th-order solution
      static const double b5[6] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                                   11.0 / 84};
      static const double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
      const std::vector<cplx>* ks[6] = {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_};
      for (size_t i = 0; i < n_; ++i) {
        cplx acc{0.0, 0.0};
        for (int s = 0; s < 6; ++s) acc += b5[s] * (*ks[s])[i];
        tmp_[i] = y[i] + hstep * acc;
      }
      deriv(tmp_, k7_);
      double err2 = 0.0;
      for (size_t i = 0; i < n_; ++i) {
        cplx acc4{0.0, 0.0};
        for (int s = 0; s < 6; ++s) acc4 += b4[s] * (*ks[s])[i];
        acc4 += b4[6] * k7_[i];
        y4_[i] = y[i] + hstep * acc4;
        const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(tmp_[i])));
        const double e = std::abs(tmp_[i] - y4_[i]) / sc;
        err2 += e * e;
      }
      const double err = std::sqrt(err2 / (double)n_);
      if (err <= 1.0) {
        t += hstep;
        y.swap(tmp_);
        k1_.swap(k7_);  // FSAL
      }
      const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      hstep *= std::clamp(fac, 0.2, 5.0);
    }
  }

  void reset_fsal() { have_k1_ = false; }

 private:
  void stage(const std::vector<cplx>& y, std::vector<cplx>& kout,
             std::initializer_list<double> coeffs, double hstep) {
    const std::vector<cplx>* ks[5] = {&k1_, &k2_, &k3_, &k4_, &k5_};
    for (size_t i = 0; i < n_; ++i) {
      cplx acc{0.0, 0.0};
      int s = 0;
      for (double cval : coeffs) acc += cval * (*ks[s++])[i];
      tmp_[i] = y[i] + hstep * acc;
    }
    deriv(tmp_, kout);
  }

  const SparseMatrix& h_;
  size_t n_;
  bool have_k1_;
  std::vector<cplx> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y4_;
};

}  // namespace

TimeSeries evolve_state(const LatticeOperator& op, const std::vector<cplx>& psi0,
                        const std::vector<double>& t_grid, const std::vector<int>& watch) {
  if ((int)psi0.size() != op.dim()) fail(ErrorCode::InvalidArgument, "psi0 dimension mismatch");
  if (t_grid.empty()) fail(ErrorCode::InvalidArgument, "empty time grid");
  for (size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i + 1] > t_grid[i]))
      fail(ErrorCode::InvalidArgument, "time grid must be strictly increasing");
  if (t_grid.front() < 0.0) fail(ErrorCode::InvalidArgument, "times must be >= 0");
  for (int w : watch)
    if (w < 0 || w >= op.dim()) fail(ErrorCode::InvalidArgument, "watch index out of range");

  TimeSeries ts;
  ts.times = t_grid;
  for (int w : watch) ts.values["idx:" + std::to_string(w)] = {};
  ts.values["norm"] = {};

  std::vector<cplx> y = psi0;
  Rk45 rk(op.matrix);
  double t = t_grid.front();
  for (size_t g = 0; g < t_grid.size(); ++g) {
    if (t_grid[g] > t) {
      rk.advance(y, t, t_grid[g]);
      t = t_grid[g];
    }
    double n2 = 0.0;
    for (const cplx v : y) n2 += std::norm(v);
    ts.values["norm"].push_back(cplx{std::sqrt(n2), 0.0});
    for (int w : watch) ts.values["idx:" + std::to_string(w)].push_back(y[(size_t)w]);
  }
  return ts;
}

// ---------------------------------------------------------------------------
// eigen solves
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXcd to_dense(const SparseMatrix& m) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(m.dim, m.dim);
  for (int r = 0; r < m.dim; ++r)
    for (int i = m.row_ptr[(size_t)r]; i < m.row_ptr[(size_t)r + 1]; ++i)
      d(r, m.col[(size_t)i]) += m.val[(size_t)i];
  return d;
}

}  // namespace

std::pair<cplx, std::vector<cplx>> eigenmode_near(const LatticeOperator& op, cplx sigma) {
  const int n = op.dim();
  if (n > 6000) fail(ErrorCode::DimensionTooLarge, "dense shift-invert limited to dim <= 6000");
  const Eigen::MatrixXcd h = to_dense(op.matrix);
  const double scale = std::max(1.0, op.matrix.max_abs());

  cplx shift = sigma;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  auto factor = [&]() {
    Eigen::MatrixXcd a = h;
    a.diagonal().array() -= shift;
    lu.compute(a);
  };
  factor();

  std::mt19937 rng(12345u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx{uni(rng), uni(rng)};
  v.normalize();

  cplx lambda = sigma;
  for (int it = 0; it < 300; ++it) {
    Eigen::VectorXcd w = lu.solve(v);
    const double nw = w.norm();
    if (!std::isfinite(nw) || nw > 1e280) {
      // sigma numerically an eigenvalue: nudge and refactor
      shift += (1e-10 + 1e-10 * std::abs(shift)) * cplx{1.0, 1.0};
      factor();
      continue;
    }
    v = w / nw;
    const Eigen::VectorXcd hv = h * v;
    lambda = v.dot(hv);  // v is normalized; Eigen dot conjugates the left side
    const double res = (hv - lambda * v).norm();
    if (res < 1e-10 * scale) {
      std::vector<cplx> vec((size_t)n);
      for (int i = 0; i < n; ++i) vec[(size_t)i] = v(i);
      return {lambda, vec};
    }
  }
  fail(ErrorCode::NoConvergence, "inverse iteration did not converge");
}

std::vector<cplx> full_spectrum(const LatticeOperator& op) {
  if (op.dim() > 2100) fail(ErrorCode::DimensionTooLarge, "dense spectrum limited to dim <= 2100");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_dense(op.matrix), false);
  if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "dense eigensolver failed");
  std::vector<cplx> out((size_t)op.dim());
  for (int i = 0; i < op.dim(); ++i) out[(size_t)i] = es.eigenvalues()(i);
  return out;
}

// ---------------------------------------------------------------------------
// binary dumps: magic, u32 fields, then CSR arrays (little-endian throughout)
// ---------------------------------------------------------------------------

namespace {

void write_u32(std::FILE* f, uint32_t v) { std::fwrite(&v, sizeof v, 1, f); }
void write_i64(std::FILE* f, int64_t v) { std::fwrite(&v, sizeof v, 1, f); }
uint32_t read_u32(std::FILE* f) {
  uint32_t v = 0;
  if (std::fread(&v, sizeof v, 1, f) != 1) fail(ErrorCode::InvalidArgument, "truncated dump");
  return v;
}
int64_t read_i64(std::FILE* f) {
  int64_t v = 0;
  if (std::fread(&v, sizeof v, 1, f) != 1) fail(ErrorCode::InvalidArgument, "truncated dump");
  return v;
}

constexpr char kOpMagic[8] = {'S', 'S', 'H', 'B', 'O', 'P', '0', '1'};
constexpr char kStMagic[8] = {'S', 'S', 'H', 'B', 'S', 'T', '0', '1'};

}  // namespace

void save_operator(const LatticeOperator& op, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorCode::InvalidArgument, "cannot open " + path);
  std::fwrite(kOpMagic, 1, 8, f);
  write_u32(f, op.boundary == Boundary::PBC ? 0 : 1);
  write_u32(f, op.sheet == Sheet::First ? 0 : 1);
  write_u32(f, op.two_excitation ? 1 : 0);
  write_u32(f, (uint32_t)op.n_emitters);
  write_u32(f, (uint32_t)op.n_cells);
  write_i64(f, op.matrix.dim);
  write_i64(f, (int64_t)op.matrix.val.size());
  std::fwrite(op.matrix.row_ptr.data(), sizeof(int), op.matrix.row_ptr.size(), f);
  std::fwrite(op.matrix.col.data(), sizeof(int), op.matrix.col.size(), f);
  std::fwrite(op.matrix.val.data(), sizeof(cplx), op.matrix.val.size(), f);
  std::fclose(f);
}

LatticeOperator load_operator(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail(ErrorCode::InvalidArgument, "cannot open " + path);
  char magic[8];
  if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kOpMagic, 8) != 0) {
    std::fclose(f);
    fail(ErrorCode::InvalidArgument, "bad operator dump magic");
  }
  LatticeOperator op;
  op.boundary = read_u32(f) == 0 ? Boundary::PBC : Boundary::OBC;
  op.sheet = read_u32(f) == 0 ? Sheet::First : Sheet::Second;
  op.two_excitation = read_u32(f) != 0;
  op.n_emitters = (int)read_u32(f);
  op.n_cells = (int)read_u32(f);
  op.matrix.dim = (int)read_i64(f);
  const int64_t nnz = read_i64(f);
  op.matrix.row_ptr.resize((size_t)op.matrix.dim + 1);
  op.matrix.col.resize((size_t)nnz);
  op.matrix.val.resize((size_t)nnz);
  bool ok = std::fread(op.matrix.row_ptr.data(), sizeof(int), op.matrix.row_ptr.size(), f) ==
            op.matrix.row_ptr.size();
  ok = ok && std::fread(op.matrix.col.data(), sizeof(int), op.matrix.col.size(), f) ==
                 op.matrix.col.size();
  ok = ok && std::fread(op.matrix.val.data(), sizeof(cplx), op.matrix.val.size(), f) ==
                 op.matrix.val.size();
  std::fclose(f);
  if (!ok) fail(ErrorCode::InvalidArgument, "truncated operator dump");
  return op;
}

void save_state(const std::vector<cplx>& psi, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorCode::InvalidArgument, "cannot open " + path);
  std::fwrite(kStMagic, 1, 8, f);
  write_i64(f, (int64_t)psi.size());
  std::fwrite(psi.data(), sizeof(cplx), psi.size(), f);
  std::fclose(f);
}

std::vector<cplx> load_state(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail(ErrorCode::InvalidArgument, "cannot open " + path);
  char magic[8];
  if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kStMagic, 8) != 0) {
    std::fclose(f);
    fail(ErrorCode::InvalidArgument, "bad state dump magic");
  }
  std::vector<cplx> psi((size_t)read_i64(f));
  const bool ok = std::fread(psi.data(), sizeof(cplx), psi.size(), f) == psi.size();
  std::fclose(f);
  if (!ok) fail(ErrorCode::InvalidArgument, "truncated state dump");
  return psi;
}

}  // namespace sshbath
