// cli.cpp — figure-data pipelines: each subcommand evaluates one family of
// observables and writes deterministic CSV (and optional SVG) files.

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "sshbath/bound_states.hpp"
#include "sshbath/dynamics.hpp"
#include "sshbath/lattice.hpp"
#include "sshbath/multi_excitation.hpp"

namespace sshbath::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// output helpers
// ---------------------------------------------------------------------------

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void write_csv(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot open " + path.string());
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    for (const auto& row : rows) {
      for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << fmt(row[c]);
      out << "\n";
    }
  }

  // polyline plot of columns ys against column x; convenience output only
  void write_svg(const fs::path& path, size_t x, const std::vector<size_t>& ys) const {
    const double w = 720, h = 480, m = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : rows) {
      xmin = std::min(xmin, r[x]);
      xmax = std::max(xmax, r[x]);
      for (size_t c : ys) {
        ymin = std::min(ymin, r[c]);
        ymax = std::max(ymax, r[c]);
      }
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    auto px = [&](double v) { return m + (w - 2 * m) * (v - xmin) / (xmax - xmin); };
    auto py = [&](double v) { return h - m - (h - 2 * m) * (v - ymin) / (ymax - ymin); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ofstream out(path);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot open " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect x='" << m << "' y='" << m << "' width='" << w - 2 * m << "' height='"
        << h - 2 * m << "' fill='none' stroke='black'/>\n";
    for (size_t i = 0; i < ys.size(); ++i) {
      out << "<polyline fill='none' stroke='" << colors[i % 8] << "' points='";
      for (const auto& r : rows) out << px(r[x]) << "," << py(r[ys[i]]) << " ";
      out << "'/>\n";
      out << "<text x='" << w - m + 4 << "' y='" << m + 16 * i + 12 << "' font-size='11'>"
          << header[ys[i]] << "</text>\n";
    }
    out << "<text x='" << w / 2 << "' y='" << h - 12 << "' font-size='12'>" << header[x]
        << "</text>\n";
    out << "</svg>\n";
  }
};

struct Outputs {
  fs::path dir;
  bool svg{false};

  void emit(const Table& t, const std::string& stem) const {
    fs::create_directories(dir);
    t.write_csv(dir / (stem + ".csv"));
    if (svg && t.header.size() > 1 && !t.rows.empty()) {
      std::vector<size_t> ys;
      for (size_t c = 1; c < t.header.size(); ++c) ys.push_back(c);
      if (ys.size() > 8) ys.resize(8);
      t.write_svg(dir / (stem + ".svg"), 0, ys);
    }
  }
};

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

double need_num(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    fail(ErrorCode::InvalidArgument, "config: missing numeric field '" + key + "'");
  return j[key].get<double>();
}

double opt_num(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(ErrorCode::InvalidArgument, "config: '" + key + "' not numeric");
  return j[key].get<double>();
}

std::string opt_str(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  return j[key].get<std::string>();
}

BathParams parse_bath(const json& j) {
  if (!j.contains("bath")) fail(ErrorCode::InvalidArgument, "config: missing 'bath'");
  const json& b = j["bath"];
  BathParams p{need_num(b, "j1"), need_num(b, "j2"), need_num(b, "gamma_b")};
  p.validate();
  return p;
}

Sublattice parse_sublattice(const std::string& s) {
  if (s == "A" || s == "a") return Sublattice::A;
  if (s == "B" || s == "b") return Sublattice::B;
  fail(ErrorCode::InvalidArgument, "config: sublattice must be A or B");
}

Sheet parse_sheet(const std::string& s) {
  if (s == "first" || s == "physical") return Sheet::First;
  if (s == "second" || s == "mirage") return Sheet::Second;
  fail(ErrorCode::InvalidArgument, "config: sheet must be first|second");
}

EmitterSpec parse_emitter(const json& e) {
  EmitterSpec em;
  em.sublattice = parse_sublattice(opt_str(e, "sublattice", "A"));
  em.cell = (int)opt_num(e, "cell", 0);
  em.delta = opt_num(e, "delta", 0.0);
  em.gamma_a = need_num(e, "gamma_a");
  em.omega_rabi = need_num(e, "omega_rabi");
  em.validate();
  return em;
}

std::vector<EmitterSpec> parse_emitters(const json& j) {
  if (!j.contains("emitters") || !j["emitters"].is_array() || j["emitters"].empty())
    fail(ErrorCode::InvalidArgument, "config: missing 'emitters' array");
  std::vector<EmitterSpec> out;
  for (const json& e : j["emitters"]) out.push_back(parse_emitter(e));
  return out;
}

ContourSpec parse_contour(const json& j) {
  ContourSpec c;
  if (j.contains("contour")) {
    const json& cj = j["contour"];
    c.eta = opt_num(cj, "eta", 0.0);
    c.span = opt_num(cj, "span", 0.0);
    c.n_omega = (int)opt_num(cj, "n_omega", c.n_omega);
    c.span_factor = opt_num(cj, "span_factor", c.span_factor);
  }
  return c;
}

std::vector<double> parse_time_grid(const json& j, double fallback_tmax = 100.0) {
  double tmax = fallback_tmax;
  int n = 501;
  if (j.contains("time")) {
    tmax = opt_num(j["time"], "t_max", tmax);
    n = (int)opt_num(j["time"], "n", n);
  }
  std::vector<double> t((size_t)n);
  for (int i = 0; i < n; ++i) t[(size_t)i] = tmax * i / (n - 1);
  return t;
}

// ---------------------------------------------------------------------------
// worker pool for sweep points
// ---------------------------------------------------------------------------

int worker_count() {
  if (const char* env = std::getenv("SSHBATH_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

template <class F>
void parallel_for(int n, const F& body) {
  const int workers = std::min(worker_count(), n > 0 ? n : 1);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_phase(const json& cfg, const Outputs& out) {
  const double j2 = need_num(cfg["bath"], "j2");
  const double gb = need_num(cfg["bath"], "gamma_b");
  const json& sweep = cfg["sweep"];
  const double lo = need_num(sweep, "j1_min"), hi = need_num(sweep, "j1_max");
  const int n = (int)need_num(sweep, "n");

  Table t;
  t.header = {"j1", "physical_phase", "mirage_phase"};
  // labels encoded as integers: 0 topo-line, 1 point, 2 trivial-line; mirage 0 topo, 2 trivial
  for (int i = 0; i < n; ++i) {
    const double j1 = lo + (hi - lo) * i / (n - 1);
    BathParams p{j1, j2, gb};
    double phys = -1, mir = -1;
    try {
      switch (classify_phase(p)) {
        case Phase::TopologicalLineGap: phys = 0; break;
        case Phase::PointGap: phys = 1; break;
        default: phys = 2; break;
      }
    } catch (const Error&) {
      phys = -1;  // exactly on a boundary
    }
    try {
      mir = classify_mirage_phase(p) == Phase::Topological ? 0 : 2;
    } catch (const Error&) {
      mir = -1;
    }
    t.rows.push_back({j1, phys, mir});
  }
  out.emit(t, "phase");
  return 0;
}

int cmd_spectrum(const json& cfg, const Outputs& out) {
  const BathParams p = parse_bath(cfg);
  const int n = (int)opt_num(cfg, "n_k", 512);
  Table t;
  t.header = {"k"};
  std::vector<Variant> variants;
  for (Variant v : {Variant::Closed, Variant::Physical, Variant::Mirage}) {
    if (v == Variant::Mirage && !(p.j1 > 0.5 * p.gamma_b)) continue;
    variants.push_back(v);
    for (const char* band : {"plus", "minus"}) {
      t.header.push_back(std::string(variant_name(v)) + "_" + band + "_re");
      t.header.push_back(std::string(variant_name(v)) + "_" + band + "_im");
    }
  }
  for (int i = 0; i < n; ++i) {
    const double k = -PI + 2.0 * PI * i / n;
    std::vector<double> row{k};
    for (Variant v : variants) {
      for (int band : {+1, -1}) {
        const cplx e = dispersion(p, k, band, v);
        row.push_back(e.real());
        row.push_back(e.imag());
      }
    }
    t.rows.push_back(row);
  }
  out.emit(t, "spectrum");
  return 0;
}

int cmd_selfenergy(const json& cfg, const Outputs& out) {
  const BathParams p = parse_bath(cfg);
  const double omr = need_num(cfg, "omega_rabi");
  const int d = (int)opt_num(cfg, "d", 0);
  const std::string pair_s = opt_str(cfg, "pair", "AA");
  const Pair pair = pair_s == "AB"   ? Pair::AB
                    : pair_s == "BA" ? Pair::BA
                    : pair_s == "BB" ? Pair::BB
                                     : Pair::AA;
  const json& grid = cfg["omega_grid"];
  const double lo = need_num(grid, "re_min"), hi = need_num(grid, "re_max");
  const double im = opt_num(grid, "im", 0.5);
  const int n = (int)need_num(grid, "n");

  Table t;
  t.header = {"omega_re", "omega_im"};
  for (const char* sheet : {"first", "second"})
    for (const char* col : {"_re", "_im", "_oracle_delta"})
      t.header.push_back(std::string("sigma_") + sheet + col);

  t.rows.assign((size_t)n, {});
  parallel_for(n, [&](int i) {
    const cplx w{lo + (hi - lo) * i / (n - 1), im};
    std::vector<double> row{w.real(), w.imag()};
    for (Sheet sheet : {Sheet::First, Sheet::Second}) {
      const Variant v = sheet == Sheet::First ? Variant::Physical : Variant::Mirage;
      try {
        const cplx s = d == 0 && (pair == Pair::AA || pair == Pair::BB)
                           ? sigma_onsite(p, omr, w, sheet).value
                           : sigma_cross(p, omr, w, d, pair, sheet).value;
        const cplx q = sigma_quadrature_oracle(p, omr, w, d, pair, v);
        row.insert(row.end(), {s.real(), s.imag(), std::abs(s - q)});
      } catch (const Error&) {
        row.insert(row.end(), {0.0, 0.0, -1.0});
      }
    }
    t.rows[(size_t)i] = row;
  });
  out.emit(t, "selfenergy");
  return 0;
}

int cmd_bs(const json& cfg, const Outputs& out) {
  const std::string mode = opt_str(cfg, "mode", "pbc");  // pbc | obc
  const int n_b = (int)opt_num(cfg, "n_b", 500);
  const json& runs = cfg["runs"];

  for (const json& run : runs) {
    const BathParams p = parse_bath(run);
    EmitterSpec em = parse_emitter(run["emitter"]);
    const Sheet sheet = parse_sheet(opt_str(run, "sheet", "first"));
    const std::string label = run["label"].get<std::string>();
    const Boundary boundary = mode == "obc" ? Boundary::OBC : Boundary::PBC;

    // analytic profile
    BoundState bs;
    if (mode == "obc") {
      bs = obc_dark_state(p, em.omega_rabi, em.sublattice, n_b / 2);
    } else {
      bs = bs_wavefunction(p, em, sheet);
    }

    // numerical eigenmode on the lattice
    EmitterSpec centered = em;
    centered.cell = n_b / 2;
    const LatticeOperator op = build_heff(p, {centered}, n_b, boundary, sheet);
    const auto [val, vec] = eigenmode_near(op, bs.omega_bs.value);

    double nv = 0.0;
    for (const cplx c : vec) nv += std::norm(c);
    const cplx at_em = vec[(size_t)op.emitter_index(0)];
    const cplx scale =
        1.0 / (std::sqrt(nv) * (std::abs(at_em) > 0 ? at_em / std::abs(at_em) : 1.0));

    Table t;
    t.header = {"j", "abs_fa", "abs_fb", "abs_fa_numeric", "abs_fb_numeric"};
    const int half = std::min(n_b / 2 - 1, 60);
    for (int j = -half; j <= half; ++j) {
      const int cell = centered.cell + j;
      t.rows.push_back({(double)j, std::abs(bs.fa(j)), std::abs(bs.fb(j)),
                        std::abs(vec[(size_t)op.bath_index(Sublattice::A, cell)] * scale),
                        std::abs(vec[(size_t)op.bath_index(Sublattice::B, cell)] * scale)});
    }
    out.emit(t, "bs_" + label);
  }
  return 0;
}

int cmd_dynamics(const json& cfg, const Outputs& out) {
  const std::vector<double> t_grid = parse_time_grid(cfg);
  const json& runs = cfg["runs"];
  const std::string observable = opt_str(cfg, "observable", "population");

  Table t;
  t.header = {"t"};
  std::vector<std::vector<double>> cols;

  for (const json& run : runs) {
    const BathParams p = parse_bath(run);
    const std::vector<EmitterSpec> ems = parse_emitters(run);
    const std::string label = run["label"].get<std::string>();
    const int initial = (int)opt_num(run, "initial", 0);
    const std::string route = opt_str(run, "route", "green");
    std::vector<int> watch;
    if (run.contains("watch"))
      for (const json& w : run["watch"]) watch.push_back(w.get<int>());
    else
      for (size_t m = 0; m < ems.size(); ++m) watch.push_back((int)m);

    std::vector<std::vector<cplx>> amp(watch.size());
    if (route == "lattice") {
      const int n_b = (int)opt_num(run, "n_b", 2000);
      const Sheet sheet = parse_sheet(opt_str(run, "sheet", "first"));
      const LatticeOperator op = build_heff(p, ems, n_b, Boundary::PBC, sheet);
      std::vector<cplx> psi((size_t)op.dim(), cplx{0.0, 0.0});
      psi[(size_t)op.emitter_index(initial)] = 1.0;
      std::vector<int> idx;
      for (int m : watch) idx.push_back(op.emitter_index(m));
      const TimeSeries ts = evolve_state(op, psi, t_grid, idx);
      for (size_t w = 0; w < watch.size(); ++w)
        amp[w] = ts.at("idx:" + std::to_string(idx[w]));
    } else {
      const Sheet sheet = parse_sheet(opt_str(run, "sheet", "first"));
      const TimeSeries ts = evolve_emitters(p, ems, t_grid, sheet, parse_contour(run), initial);
      for (size_t w = 0; w < watch.size(); ++w)
        amp[w] = ts.at("emitter:" + std::to_string(watch[w]));
    }

    for (size_t w = 0; w < watch.size(); ++w) {
      std::string name = label + "_m" + std::to_string(watch[w]);
      std::vector<double> col(t_grid.size());
      for (size_t i = 0; i < t_grid.size(); ++i) {
        const double a2 = std::norm(amp[w][i]);
        if (observable == "amplitude") col[i] = std::abs(amp[w][i]);
        else if (observable == "renormalized") col[i] = std::exp(p.gamma_b * t_grid[i]) * a2;
        else if (observable == "renormalized_amp")
          col[i] = std::exp(0.5 * p.gamma_b * t_grid[i]) * std::abs(amp[w][i]);
        else col[i] = a2;  // population
      }
      t.header.push_back(name);
      cols.push_back(std::move(col));
    }
  }

  for (size_t i = 0; i < t_grid.size(); ++i) {
    std::vector<double> row{t_grid[i]};
    for (const auto& col : cols) row.push_back(col[i]);
    t.rows.push_back(row);
  }
  out.emit(t, "dynamics");
  return 0;
}

int cmd_interaction(const json& cfg, const Outputs& out) {
  const double j2 = need_num(cfg["bath"], "j2");
  const double gb = need_num(cfg["bath"], "gamma_b");
  const double omr = need_num(cfg, "omega_rabi");
  const Sheet sheet = parse_sheet(opt_str(cfg, "sheet", "first"));
  const json& sweep = cfg["sweep"];
  const double lo = need_num(sweep, "j1_min"), hi = need_num(sweep, "j1_max");
  const int n = (int)need_num(sweep, "n");
  std::vector<int> d_list;
  for (const json& d : cfg["d_list"]) d_list.push_back(d.get<int>());

  Table t;
  t.header = {"j1"};
  for (const char* pair : {"AB", "BA"})
    for (int d : d_list) t.header.push_back(std::string("abs_sigma_") + pair + "_d" + std::to_string(d));

  t.rows.assign((size_t)n, {});
  parallel_for(n, [&](int i) {
    const double j1 = lo + (hi - lo) * i / (n - 1);
    BathParams p{j1, j2, gb};
    std::vector<double> row{j1};
    for (Pair pair : {Pair::AB, Pair::BA}) {
      for (int d : d_list) {
        double v = -1.0;
        try {
          v = std::abs(
              interaction_single_pole(p, omr, cplx{0.0, -0.5 * gb}, d, pair, sheet));
        } catch (const Error&) {
          v = -1.0;  // boundary or undefined mirage point
        }
        row.push_back(v);
      }
    }
    t.rows[(size_t)i] = row;
  });
  out.emit(t, std::string("interaction_") + (sheet == Sheet::First ? "first" : "mirage"));
  return 0;
}

int cmd_g2(const json& cfg, const Outputs& out) {
  const std::string mode = opt_str(cfg, "mode", "steady");

  if (mode == "pair") {
    const std::vector<double> t_grid = parse_time_grid(cfg, 50.0);
    Table t;
    t.header = {"t"};
    std::vector<std::vector<double>> cols;
    for (const json& run : cfg["runs"]) {
      const BathParams p = parse_bath(run);
      NonlinearEmitterSpec nl;
      nl.base = parse_emitter(run["emitter"]);
      nl.u = need_num(run, "u");
      const TimeSeries d = pair_emission_dynamics(p, nl, t_grid, parse_contour(run));
      std::vector<double> col(t_grid.size());
      for (size_t i = 0; i < t_grid.size(); ++i) col[i] = std::abs(d.at("D")[i]);
      t.header.push_back(run["label"].get<std::string>());
      cols.push_back(std::move(col));
    }
    for (size_t i = 0; i < t_grid.size(); ++i) {
      std::vector<double> row{t_grid[i]};
      for (const auto& col : cols) row.push_back(col[i]);
      t.rows.push_back(row);
    }
    out.emit(t, "pair_dynamics");
    return 0;
  }

  const BathParams p = parse_bath(cfg);
  NonlinearEmitterSpec nl;
  nl.base = parse_emitter(cfg["emitter"]);
  nl.drive_omega = opt_num(cfg, "drive_omega", 0.0);

  const json& us = cfg["u_sweep"];
  const double lo = need_num(us, "u_min"), hi = need_num(us, "u_max");
  const int n = (int)need_num(us, "n");
  Table t0;
  t0.header = {"u", "g2_0"};
  t0.rows.assign((size_t)n, {});
  parallel_for(n, [&](int i) {
    NonlinearEmitterSpec run = nl;
    run.u = lo + (hi - lo) * i / (n - 1);
    t0.rows[(size_t)i] = {run.u, g2(p, run, 0.0)};
  });
  out.emit(t0, "g2_zero");

  if (cfg.contains("tau_u_list")) {
    const double tau_max = opt_num(cfg, "tau_max", 100.0);
    const int n_tau = (int)opt_num(cfg, "n_tau", 101);
    Table tt;
    tt.header = {"tau"};
    std::vector<std::vector<double>> cols;
    for (const json& uj : cfg["tau_u_list"]) {
      NonlinearEmitterSpec run = nl;
      run.u = uj.get<double>();
      std::vector<double> col((size_t)n_tau);
      parallel_for(n_tau, [&](int i) {
        col[(size_t)i] = g2(p, run, tau_max * i / (n_tau - 1));
      });
      char label[32];
      std::snprintf(label, sizeof label, "g2_u%g", run.u);
      tt.header.push_back(label);
      cols.push_back(std::move(col));
    }
    for (int i = 0; i < n_tau; ++i) {
      std::vector<double> row{tau_max * i / (n_tau - 1)};
      for (const auto& col : cols) row.push_back(col[(size_t)i]);
      tt.rows.push_back(row);
    }
    out.emit(tt, "g2_tau");
  }
  return 0;
}

// condensed invariant suite; returns the number of failures
int cmd_validate(bool quick) {
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  {  // pole products and gamma_b -> 0 reduction
    bool ok = true;
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> uj(0.3, 2.0), ug(0.0, 0.4), ux(-4.0, 4.0),
        uy(-1.5, 1.0);
    const int n = quick ? 300 : 3000;
    for (int i = 0; i < n && ok; ++i) {
      BathParams p{uj(rng), 1.0, ug(rng)};
      const cplx w{ux(rng), uy(rng)};
      try {
        const PolePair z = poles_z(p, w, Variant::Physical);
        ok = std::abs(z.z_plus * z.z_minus - p.jm() / p.jp()) < 1e-10;
      } catch (const Error&) {
      }
    }
    report("pole-products", ok);
  }

  {  // closed-form self-energies vs quadrature
    bool ok = true;
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> uj(0.3, 2.0), ug(0.0, 0.4), ux(-4.0, 4.0),
        uy(-1.5, 1.0);
    std::uniform_int_distribution<int> ud(-5, 5), upair(0, 3);
    int done = 0;
    const int target = quick ? 40 : 400;
    while (done < target && ok) {
      BathParams p{uj(rng), 1.0, ug(rng)};
      const bool mir = p.j1 > 0.5 * p.gamma_b + 0.03;
      const Sheet sheet = mir && (done % 2) ? Sheet::Second : Sheet::First;
      const Variant v = sheet == Sheet::First ? Variant::Physical : Variant::Mirage;
      const cplx w{ux(rng), uy(rng)};
      if (distance_to_spectrum(p, w, v, 512) < 0.05) continue;
      const int d = ud(rng);
      const Pair pair = static_cast<Pair>(upair(rng));
      try {
        const cplx a = sigma_cross(p, 0.2, w, d, pair, sheet).value;
        const cplx b = sigma_quadrature_oracle(p, 0.2, w, d, pair, v);
        ok = std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-8});
        ++done;
      } catch (const Error&) {
      }
    }
    report("residue-vs-quadrature", ok);
  }

  {  // region-II exact zero
    bool ok = true;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ur(-0.02, 0.02), ui(-0.015, 0.015);
    BathParams p{1.02, 1.0, 0.05};
    int done = 0;
    while (done < (quick ? 100 : 1000) && ok) {
      const cplx w{ur(rng), -0.025 + ui(rng)};
      try {
        if (region_of(p, w) != Region::II) continue;
        ok = sigma_onsite(p, 0.2, w, Sheet::First).value == cplx{0.0, 0.0};
        ++done;
      } catch (const Error&) {
      }
    }
    report("region-II-zero", ok);
  }

  {  // midgap bound-state forms agree between code paths
    bool ok = true;
    for (const BathParams& p :
         {BathParams{1.03, 1.0, 0.1}, BathParams{0.9, 1.0, 0.1}, BathParams{1.3, 1.0, 0.0}}) {
      for (Sublattice s : {Sublattice::A, Sublattice::B}) {
        const BoundState a = bs_midgap_closed_form(p, s, Sheet::First, 0.1);
        EmitterSpec em{s, 0, 0.0, p.gamma_b, 0.1};
        const BoundState b = bs_wavefunction(p, em, Sheet::First);
        for (int j = -10; j <= 10 && ok; ++j)
          ok = std::abs(a.fa(j) - b.fa(j)) < 1e-10 && std::abs(a.fb(j) - b.fb(j)) < 1e-10;
      }
    }
    report("midgap-tables", ok);
  }

  {  // sheet equivalence of single-emitter dynamics
    bool ok = true;
    BathParams p{1.02, 1.0, 0.05};
    EmitterSpec em{Sublattice::A, 0, 0.0, 0.05, 0.2};
    std::vector<double> t;
    for (int i = 0; i <= (quick ? 40 : 100); ++i) t.push_back(i * 1.0);
    ContourSpec contour;
    contour.n_omega = quick ? (1 << 14) : (1 << 16);
    const TimeSeries f = evolve_emitters(p, {em}, t, Sheet::First, contour, 0);
    const TimeSeries s = evolve_emitters(p, {em}, t, Sheet::Second, contour, 0);
    for (size_t i = 0; i < t.size(); ++i)
      ok = ok && std::abs(f.at("emitter:0")[i] - s.at("emitter:0")[i]) < 1e-6;
    report("sheet-equivalence", ok);
  }

  return failures;
}

json preset_config(const std::string& name, const std::string& presets_dir) {
  std::vector<fs::path> candidates;
  if (!presets_dir.empty()) candidates.push_back(fs::path(presets_dir) / (name + ".json"));
  candidates.push_back(fs::path("presets") / (name + ".json"));
  candidates.push_back(fs::path("../presets") / (name + ".json"));
  if (const char* env = std::getenv("SSHBATH_PRESETS"))
    candidates.push_back(fs::path(env) / (name + ".json"));
  for (const fs::path& c : candidates) {
    std::ifstream in(c);
    if (in) return json::parse(in);
  }
  fail(ErrorCode::InvalidArgument, "preset not found: " + name);
}

int dispatch(const json& cfg, const Outputs& out) {
  const std::string command = opt_str(cfg, "command", "");
  if (command == "phase") return cmd_phase(cfg, out);
  if (command == "spectrum") return cmd_spectrum(cfg, out);
  if (command == "selfenergy") return cmd_selfenergy(cfg, out);
  if (command == "bs") return cmd_bs(cfg, out);
  if (command == "dynamics") return cmd_dynamics(cfg, out);
  if (command == "interaction") return cmd_interaction(cfg, out);
  if (command == "g2") return cmd_g2(cfg, out);
  fail(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"quantum emitters in closed, dissipative and mirage SSH photonic baths"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string out_dir = ".";
  std::string preset, config_path, presets_dir;
  bool svg = false;
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--svg", svg, "also write SVG plots");
  app.add_option("--presets-dir", presets_dir, "directory holding preset JSON files");

  std::vector<CLI::App*> subs;
  for (const char* name :
       {"phase", "spectrum", "selfenergy", "bs", "dynamics", "interaction", "g2"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--preset", preset, "figure preset name");
    sub->add_option("--config", config_path, "JSON config file");
    subs.push_back(sub);
  }
  CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
  bool quick = false;
  validate->add_flag("--quick", quick, "reduced sample counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) {
      const int failures = cmd_validate(quick);
      std::cout << (failures == 0 ? "validate: all invariants hold\n"
                                  : "validate: failures detected\n");
      return failures == 0 ? 0 : 2;
    }

    json cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) fail(ErrorCode::InvalidArgument, "cannot open config " + config_path);
      cfg = json::parse(in);
    } else if (!preset.empty()) {
      cfg = preset_config(preset, presets_dir);
    } else {
      fail(ErrorCode::InvalidArgument, "need --preset or --config");
    }

    // the chosen subcommand must match the config's command field
    for (CLI::App* sub : subs) {
      if (sub->parsed()) {
        if (cfg.contains("command") && cfg["command"].get<std::string>() != sub->get_name())
          fail(ErrorCode::InvalidArgument, "config command does not match subcommand");
        if (!cfg.contains("command")) cfg["command"] = sub->get_name();
      }
    }

    Outputs out{fs::path(out_dir), svg};
    return dispatch(cfg, out);
  } catch (const Error& e) {
    json err;
    err["error"]["code"] = error_code_name(e.code());
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? 1 : 2;
  } catch (const json::exception& e) {
    json err;
    err["error"]["code"] = "ConfigParse";
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

}  // namespace sshbath::cli
