#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpg_beam/analysis.hpp"
#include "dpg_beam/dpg_core.hpp"
#include "dpg_beam/exact_solution.hpp"
#include "dpg_beam/mesh.hpp"
#include "dpg_beam/trace.hpp"

namespace dpg_beam {

enum class LoadKind { sin, zero };

inline LoadKind parse_load(std::string_view s) {
  if (s == "sin") return LoadKind::sin;
  if (s == "zero") return LoadKind::zero;
  throw std::invalid_argument("unknown load '" + std::string(s) + "' (expected sin or zero)");
}

/// Convergence study grid: one run per (t, p), each over `levels` uniform
/// refinements starting from n0 elements.
struct StudyConfig {
  BoundaryCondition bc = BoundaryCondition::cf;
  std::vector<double> t{1.0, 1e-3, 1e-6, 0.0};
  std::vector<int> p{0, 1, 2};
  std::size_t n0 = 4;
  int levels = 6;
  LoadKind load = LoadKind::sin;
  std::string out = "convergence.csv";
  bool gnuplot = false;

  void validate() const {
    if (levels < 1) throw std::invalid_argument("levels must be at least 1");
    if (n0 < 1) throw std::invalid_argument("n0 must be at least 1");
    if (t.empty() || p.empty()) throw std::invalid_argument("need at least one t and one p");
    for (double ti : t) Thickness{ti};
    for (int pi : p) {
      if (pi < 0) throw std::invalid_argument("p must be nonnegative");
    }
  }
};

struct StudyRun {
  double t = 0.0;
  int p = 0;
  std::vector<ConvergenceRecord> records;  ///< successful levels, in order
  std::vector<int> failed_levels;
  std::vector<std::size_t> failed_n;
};

inline StudyRun run_convergence(BoundaryCondition bc, double t, int p, std::size_t n0, int levels,
                                LoadKind load = LoadKind::sin) {
  const Thickness th(t);
  const ExactSolution exact = load == LoadKind::sin ? solve_exact(bc, th) : ExactSolution::zero();
  const Load f = load == LoadKind::sin ? Load(sin_load) : Load([](double) { return 0.0; });
  StudyRun run{t, p, {}, {}, {}};
  Mesh mesh = uniform_mesh(n0);
  for (int level = 0; level < levels; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    try {
      const DpgSolution sol = assemble_and_solve(mesh, bc, th, p, f);
      ConvergenceRecord rec = compute_errors(sol, exact, mesh, p);
      rec.level = level;
      run.records.push_back(rec);
    } catch (const SolverError&) {
      run.failed_levels.push_back(level);
      run.failed_n.push_back(mesh.num_elements());
    }
  }
  return run;
}

inline std::vector<StudyRun> run_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<StudyRun> runs;
  for (double t : cfg.t) {
    for (int p : cfg.p) runs.push_back(run_convergence(cfg.bc, t, p, cfg.n0, cfg.levels, cfg.load));
  }
  return runs;
}

inline constexpr std::string_view csv_header =
    "level,n,dofs,h,err_u,err_M,proj_u,proj_M,trace_u,trace_M,residual";

/// Scientific notation with 12 significant digits.
inline std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

/// Writes one row per level; failed levels carry nan in every real column.
inline void write_csv(std::ostream& os, const StudyRun& run, int levels, std::size_t n0) {
  os << csv_header << '\n';
  auto rec_it = run.records.begin();
  std::size_t fail_idx = 0;
  for (int level = 0; level < levels; ++level) {
    if (rec_it != run.records.end() && rec_it->level == level) {
      const auto& r = *rec_it++;
      os << r.level << ',' << r.n << ',' << r.dofs << ',' << format_sci(r.h);
      for (ErrorField f : all_error_fields) os << ',' << format_sci(field_value(r, f));
      os << '\n';
    } else {
      const std::size_t n = fail_idx < run.failed_n.size() ? run.failed_n[fail_idx++] : (n0 << level);
      os << level << ',' << n << ',' << num_dofs(n, run.p) << ',' << format_sci(1.0 / static_cast<double>(n));
      for (std::size_t k = 0; k < all_error_fields.size(); ++k) os << ",nan";
      os << '\n';
    }
  }
}

inline std::string format_t(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

/// Output path for a run: cfg.out itself for a single (t, p) pair, otherwise
/// cfg.out with "_t<t>_p<p>" inserted before the extension.
inline std::filesystem::path csv_path(const StudyConfig& cfg, const StudyRun& run) {
  std::filesystem::path out(cfg.out);
  if (cfg.t.size() * cfg.p.size() == 1) return out;
  std::filesystem::path name = out.stem();
  name += "_t" + format_t(run.t) + "_p" + std::to_string(run.p);
  name += out.has_extension() ? out.extension() : std::filesystem::path(".csv");
  return out.parent_path() / name;
}

inline void print_rate_summary(std::ostream& os, const StudyConfig& cfg, const StudyRun& run) {
  os << "bc=" << to_string(cfg.bc) << " t=" << format_t(run.t) << " p=" << run.p;
  if (!run.failed_levels.empty()) {
    os << " failed_levels=";
    for (std::size_t i = 0; i < run.failed_levels.size(); ++i) os << (i ? ";" : "") << run.failed_levels[i];
  }
  os << '\n';
  if (run.records.size() < 2) {
    os << "  (fewer than two successful levels, no rates)\n";
    return;
  }
  for (ErrorField f : all_error_fields) {
    const RateEstimate r = estimate_rate(run.records, f);
    char buf[64];
    if (r.exact) {
      std::snprintf(buf, sizeof buf, "  %-9s exact\n", std::string(to_string(f)).c_str());
    } else {
      std::snprintf(buf, sizeof buf, "  %-9s rate %6.3f\n", std::string(to_string(f)).c_str(), r.rate);
    }
    os << buf;
  }
}

/// Gnuplot script drawing every error column against dofs on log-log axes.
inline void write_gnuplot(std::ostream& os, const StudyConfig& cfg, const std::vector<StudyRun>& runs) {
  os << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'degrees of freedom'\n"
     << "set ylabel 'error'\n"
     << "set key outside\n"
     << "set terminal pngcairo size 900,600\n";
  for (const auto& run : runs) {
    const auto csv = csv_path(cfg, run);
    auto png = csv;
    png.replace_extension(".png");
    os << "set output '" << png.filename().string() << "'\n"
       << "set title 'bc=" << to_string(cfg.bc) << " t=" << format_t(run.t) << " p=" << run.p << "'\n"
       << "plot ";
    for (std::size_t k = 0; k < all_error_fields.size(); ++k) {
      os << (k ? ", " : "") << "'" << csv.filename().string() << "' using 3:" << 5 + k
         << " with linespoints title '" << to_string(all_error_fields[k]) << "'";
    }
    os << "\n";
  }
}

}  // namespace dpg_beam
