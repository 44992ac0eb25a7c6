// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "jjaqed/coupling.hpp"
#include "jjaqed/dynamics.hpp"
#include "jjaqed/nonlinear.hpp"
#include "jjaqed/parallel.hpp"
#include "jjaqed/perturbative.hpp"
#include "jjaqed/spectral.hpp"
#include "jjaqed/spectrum.hpp"
#include "jjaqed/tracker.hpp"

namespace jjaqed {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(int v) { return std::to_string(v); }

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '\'';
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out + "\"";
}

std::string describe(const Error& e) { return std::string(error_kind_name(e.kind())) + ": " + e.what(); }

class Csv {
 public:
  Csv(const RunConfig& cfg, const std::string& name, std::vector<std::string> columns,
      std::vector<std::string>* written)
      : path_((std::filesystem::path(cfg.output) / name).string()), out_(path_), columns_(std::move(columns)) {
    if (!out_) fail(ErrorKind::Domain, "cannot write " + path_);
    out_ << config_header(cfg);
    written->push_back(path_);
  }
  ~Csv() { flush_columns(); }

  // Run metadata goes into the comment block, ahead of the column names.
  void meta(const std::string& key, const std::string& value) { out_ << "#: " << key << " = " << value << "\n"; }

  void row(const std::vector<std::string>& cells) {
    flush_columns();
    if (cells.size() != columns_.size()) fail(ErrorKind::Domain, "row width mismatch in " + path_);
    write(cells);
  }

 private:
  void write(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  void flush_columns() {
    if (columns_written_) return;
    columns_written_ = true;
    write(columns_);
  }

  std::string path_;
  std::ofstream out_;
  std::vector<std::string> columns_;
  bool columns_written_ = false;
};

std::vector<double> time_grid(const RunConfig& cfg) {
  std::vector<double> t(static_cast<std::size_t>(cfg.t_points));
  for (int i = 0; i < cfg.t_points; ++i) t[i] = cfg.t_max * i / (cfg.t_points - 1);
  return t;
}

TrackOptions track_options(const RunConfig& cfg) {
  TrackOptions opt;
  opt.overlap_threshold = cfg.overlap_threshold;
  return opt;
}

void run_modes(const RunConfig& cfg, std::vector<std::string>* files) {
  const ReducedSystem sys = build_reduced_system(cfg.circuit);
  const ModeSet ms = solve_quadratic_modes(sys);
  Csv csv(cfg, "modes.csv", {"index", "s_re", "s_im", "omega_re", "omega_im", "residual", "defective"}, files);
  csv.meta("Z0", num(sys.Z0));
  csv.meta("Omega0", num(sys.Omega0));
  csv.meta("merged", num(ms.merged));
  for (int p = 0; p < ms.size(); ++p) {
    const cplx w = sys.Omega0 * omega_of_pole(ms.poles[p]);
    csv.row({num(p), num(ms.poles[p].real()), num(ms.poles[p].imag()), num(w.real()), num(w.imag()),
             num(ms.residual_norms[p]), ms.defective[p] ? "1" : "0"});
  }
}

void run_jja(const RunConfig& cfg, std::vector<std::string>* files) {
  const CircuitParams& p = cfg.circuit;
  const JJAModeSet jm = solve_closed_jja_modes(build_closed_jja(p));
  Csv csv(cfg, "jja.csv", {"k", "omega", "omega_nn", "omega_dn", "phi_first", "phi_last"}, files);
  csv.meta("Omega0", num(plasma_frequency(p)));
  csv.meta("omega_c", num(band_edge(p)));
  const int N = static_cast<int>(jm.frequencies.size());
  for (int k = 0; k < N; ++k) {
    csv.row({num(k), num(jm.frequencies(k)), num(analytic_dispersion(k, BoundaryCondition::NN, p)),
             num(analytic_dispersion(k, BoundaryCondition::DN, p)), num(jm.modes(0, k)), num(jm.modes(N - 1, k))});
  }
}

void run_track(const RunConfig& cfg, std::vector<std::string>* files) {
  const AtomicModeTrace tr = track_atomic_mode(cfg.circuit, cfg.chi_target, cfg.initial_steps, track_options(cfg));
  Csv csv(cfg, "track.csv", {"chi", "omega_re", "omega_im", "overlap"}, files);
  csv.meta("lamb_shift", num(tr.lamb_shift));
  csv.meta("decay", num(tr.decay));
  csv.meta("ipr", num(tr.ipr));
  csv.meta("steps", num(tr.steps));
  for (std::size_t i = 0; i < tr.chi_grid.size(); ++i) {
    csv.row({num(tr.chi_grid[i]), num(tr.frequencies[i].real()), num(tr.frequencies[i].imag()),
             num(tr.overlaps[i])});
  }
}

CouplingSet couplings_of(const CircuitParams& p) {
  return build_coupling_set(p, solve_closed_jja_modes(build_closed_jja(p)));
}

void run_couplings(const RunConfig& cfg, std::vector<std::string>* files) {
  const CouplingSet cs = couplings_of(cfg.circuit);
  {
    Csv atom(cfg, "atom.csv",
             {"chi", "C_A_prime", "L_A_prime", "C_A_dprime", "omega_A", "omega_A_prime", "omega_A_dprime", "Z_A",
              "sum_phi1_sq"},
             files);
    atom.row({num(cs.chi), num(cs.C_A_prime), num(cs.L_A_prime), num(cs.C_A_dprime), num(cfg.circuit.omega_A),
              num(cs.omega_A_prime), num(cs.omega_A_dprime), num(cs.Z_A), num(cs.sum_phi1_sq)});
  }
  {
    Csv csv(cfg, "couplings.csv",
            {"k", "omega_k", "omega_k_prime", "Z_k", "phi1", "g_phi", "g_q", "xi_kk", "fsr", "regime"}, files);
    for (int k = 0; k < cs.K(); ++k) {
      csv.row({num(k), num(cs.omega_k(k)), num(cs.omega_k_prime(k)), num(cs.Z_k(k)), num(cs.phi1(k)),
               num(cs.g_phi(k)), num(cs.g_q(k)), num(cs.xi(k, k)), num(cs.fsr(k)),
               std::string(1, cs.regimes[static_cast<std::size_t>(k)])});
    }
  }
  // The full matrix is K^2 rows; large arrays only get the diagonal above.
  if (cs.K() > 200) return;
  Csv xi(cfg, "xi.csv", {"k", "j", "xi"}, files);
  for (int k = 0; k < cs.K(); ++k) {
    for (int j = 0; j < cs.K(); ++j) xi.row({num(k), num(j), num(cs.xi(k, j))});
  }
}

void run_perturbation(const RunConfig& cfg, std::vector<std::string>* files) {
  const CircuitParams& p = cfg.circuit;
  const CouplingSet cs = couplings_of(p);
  const double shift = lamb_shift_pt2(cs);
  Csv csv(cfg, "perturbation.csv",
          {"chi", "omega_A", "omega_A_dprime", "delta_omega2", "omega_pt", "gamma_eff", "gamma_eff_inf"}, files);
  csv.row({num(p.chi), num(p.omega_A), num(cs.omega_A_dprime), num(shift), num(cs.omega_A_dprime + shift),
           num(purcell_pt(p, false)), num(purcell_pt(p, true))});
}

void write_trace(const RunConfig& cfg, const std::string& name, const DynamicsTrace& tr,
                 std::vector<std::string>* files) {
  Csv csv(cfg, name, {"t_tilde", "n_A", "part_initial", "part_vacuum", "part_thermal"}, files);
  csv.meta("method", tr.method == DynamicsMethod::Modal ? "modal" : "oracle");
  csv.meta("n_A_inf", num(tr.n_A_inf));
  csv.meta("hbar_omega0_over_kT", num(tr.hbar_omega0_over_kT));
  csv.meta("slowest_decay", num(tr.slowest_decay));
  csv.meta("atom_decay", num(tr.atom_decay));
  for (const auto& w : tr.warnings) csv.meta("warning", w);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    csv.row({num(tr.t[i]), num(tr.n_A[i]), num(tr.part_initial[i]), num(tr.part_vacuum[i]),
             num(tr.part_thermal[i])});
  }
}

void run_dynamics(const RunConfig& cfg, std::vector<std::string>* files) {
  const std::vector<double> t = time_grid(cfg);
  const double T = cfg.circuit.T;
  if (cfg.method == "modal" || cfg.method == "both") {
    write_trace(cfg, "trace.csv", atom_occupation_modal(cfg.circuit, t, T), files);
  }
  if (cfg.method == "oracle" || cfg.method == "both") {
    write_trace(cfg, cfg.method == "both" ? "trace_oracle.csv" : "trace.csv",
                covariance_ode_oracle(cfg.circuit, t, T), files);
  }
}

void run_spectrum(const RunConfig& cfg, std::vector<std::string>* files) {
  const ModalModel model = build_modal_model(cfg.circuit);
  const DynamicsTrace tr = atom_occupation_modal(model, time_grid(cfg));
  const BeatSpectrum bs = beat_spectrum(tr, model.modes, model.sys.atom_index);
  write_trace(cfg, "trace.csv", tr, files);
  {
    Csv csv(cfg, "spectrum.csv", {"freq_dimensionless", "magnitude", "matched_pole_pair"}, files);
    csv.meta("floor", num(bs.floor));
    csv.meta("bin_width", num(bs.bin_width));
    for (const auto& pk : bs.peaks) {
      const std::string pair = pk.matched ? num(pk.match.p) + ":" + num(pk.match.m) : "none";
      csv.row({num(pk.freq), num(pk.magnitude), pair});
    }
  }
  Csv full(cfg, "spectrum_full.csv", {"freq_dimensionless", "magnitude"}, files);
  for (std::size_t i = 0; i < bs.freq.size(); ++i) full.row({num(bs.freq[i]), num(bs.magnitude[i])});
}

void run_sweep_chi_ramp(const RunConfig& cfg, std::vector<std::string>* files) {
  const auto rows = sweep_chi(cfg.circuit, cfg.chi_grid, cfg.initial_steps, track_options(cfg));
  Csv csv(cfg, "sweep_chi.csv", {"chi", "omega_re", "omega_im"}, files);
  for (const auto& r : rows) csv.row({num(r.chi), num(r.omega.real()), num(r.omega.imag())});
}

const std::vector<std::string> kOmegaColumns = {"omega_A", "index",     "omega_re", "omega_im",
                                                "is_atomic", "atomic_ipr", "error"};

void omega_rows(Csv& csv, double omega_A, const BareFrequencyRow* row, const std::string& error) {
  if (!row) {
    csv.row({num(omega_A), "", "", "", "", "", quote(error)});
    return;
  }
  for (std::size_t j = 0; j < row->omegas.size(); ++j) {
    csv.row({num(omega_A), num(static_cast<int>(j)), num(row->omegas[j].real()), num(row->omegas[j].imag()),
             static_cast<int>(j) == row->atomic_id ? "1" : "0", num(row->ipr), ""});
  }
}

void run_sweep_omega(const RunConfig& cfg, std::vector<std::string>* files) {
  const auto rows =
      sweep_bare_frequency(cfg.circuit, cfg.omega_grid, cfg.initial_steps, cfg.parallelism, track_options(cfg));
  Csv csv(cfg, "sweep_omega.csv", kOmegaColumns, files);
  for (const auto& r : rows) omega_rows(csv, r.omega_A, &r, "");
}

void run_impedance(const RunConfig& cfg, std::vector<std::string>* files) {
  const ImpedanceProfile prof = impedance_profile(cfg.circuit, cfg.omega_grid);
  Csv csv(cfg, "impedance.csv", {"omega_hz", "re_inv_zeff", "re_inv_zinf"}, files);
  for (std::size_t i = 0; i < prof.omega.size(); ++i) {
    csv.row({num(prof.omega[i] / (2.0 * M_PI)), num((1.0 / prof.Z_eff[i]).real()),
             num((1.0 / prof.Z_inf[i]).real())});
  }
}

void run_nonlinear(const RunConfig& cfg, std::vector<std::string>* files) {
  const CircuitParams& p = cfg.circuit;
  const ReducedSystem sys = build_reduced_system(p);
  NonlinearConfig nl;
  nl.Lambda = cfg.Lambda;
  nl.lambda_scale = cfg.lambda_scale;
  nl.initial = Eigen::VectorXd::Zero(2 * sys.M);
  nl.initial(sys.atom_index) = cfg.phi_A0;
  const std::vector<double> t = time_grid(cfg);
  const Trajectory lin = linear_modal_trajectory(p, nl.initial, t);
  const Trajectory corr = first_order_correction(p, nl, lin);
  const Trajectory direct = integrate_nonlinear_classical(p, nl, t);
  {
    Csv csv(cfg, "nonlinear.csv", {"t_tilde", "node", "phi", "q", "phi1", "q1"}, files);
    csv.meta("strength", num(direct.strength));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (int node : cfg.nodes) {
        csv.row({num(t[i]), num(node), num(lin.phi(r, node)), num(lin.q(r, node)), num(corr.phi(r, node)),
                 num(corr.q(r, node))});
      }
    }
  }
  Csv csv(cfg, "nonlinear_direct.csv", {"t_tilde", "node", "phi", "q"}, files);
  csv.meta("strength", num(direct.strength));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int node : cfg.nodes) csv.row({num(t[i]), num(node), num(direct.phi(r, node)), num(direct.q(r, node))});
  }
}

// The table is still written; a sweep with no usable point is a numeric failure.
template <class Points>
void all_failed(const Points& pts) {
  for (const auto& pt : pts) {
    if (pt.error.empty()) return;
  }
  fail(ErrorKind::Solver, "every sweep point failed; first: " + pts.front().error);
}

void prepare(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) fail(ErrorKind::Domain, "cannot create output directory " + cfg.output + ": " + ec.message());
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema:
      return 2;
    case ErrorKind::Tracking:
      return 4;
    default:
      return 3;
  }
}

std::vector<std::string> run(const RunConfig& cfg) {
  prepare(cfg);
  std::vector<std::string> files;
  switch (cfg.task) {
    case Task::Modes: run_modes(cfg, &files); break;
    case Task::Jja: run_jja(cfg, &files); break;
    case Task::Track: run_track(cfg, &files); break;
    case Task::Couplings: run_couplings(cfg, &files); break;
    case Task::Perturbation: run_perturbation(cfg, &files); break;
    case Task::Dynamics: run_dynamics(cfg, &files); break;
    case Task::Spectrum: run_spectrum(cfg, &files); break;
    case Task::SweepChi: run_sweep_chi_ramp(cfg, &files); break;
    case Task::SweepOmega: run_sweep_omega(cfg, &files); break;
    case Task::Impedance: run_impedance(cfg, &files); break;
    case Task::Nonlinear: run_nonlinear(cfg, &files); break;
  }
  return files;
}

std::vector<std::string> sweep(const RunConfig& cfg) {
  if (cfg.task != Task::SweepChi && cfg.task != Task::SweepOmega) {
    fail(ErrorKind::Schema, std::string("sweep needs task sweep-chi or sweep-omega, got ") + task_name(cfg.task));
  }
  prepare(cfg);
  std::vector<std::string> files;
  const TrackOptions opt = track_options(cfg);

  if (cfg.task == Task::SweepChi) {
    struct Point {
      AtomicModeTrace trace;
      std::string error;
    };
    std::vector<Point> pts(cfg.chi_grid.size());
    parallel_for(static_cast<int>(pts.size()), cfg.parallelism, [&](int i) {
      try {
        pts[i].trace = track_atomic_mode(cfg.circuit, cfg.chi_grid[i], cfg.initial_steps, opt);
      } catch (const Error& e) {
        pts[i].error = describe(e);
      }
    });
    {
      Csv csv(cfg, "sweep_chi.csv", {"chi", "omega_re", "omega_im", "decay", "ipr", "error"}, &files);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!pts[i].error.empty()) {
          csv.row({num(cfg.chi_grid[i]), "", "", "", "", quote(pts[i].error)});
          continue;
        }
        const cplx w = pts[i].trace.frequencies.back();
        csv.row({num(cfg.chi_grid[i]), num(w.real()), num(w.imag()), num(pts[i].trace.decay),
                 num(pts[i].trace.ipr), ""});
      }
    }
    all_failed(pts);
    return files;
  }

  struct Point {
    BareFrequencyRow row;
    std::string error;
  };
  std::vector<Point> pts(cfg.omega_grid.size());
  parallel_for(static_cast<int>(pts.size()), cfg.parallelism, [&](int i) {
    try {
      pts[i].row = sweep_bare_frequency(cfg.circuit, {cfg.omega_grid[i]}, cfg.initial_steps, 1, opt).front();
    } catch (const Error& e) {
      pts[i].error = describe(e);
    }
  });
  {
    Csv csv(cfg, "sweep_omega.csv", kOmegaColumns, &files);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      omega_rows(csv, cfg.omega_grid[i], pts[i].error.empty() ? &pts[i].row : nullptr, pts[i].error);
    }
  }
  all_failed(pts);
  return files;
}

}  // namespace jjaqed
