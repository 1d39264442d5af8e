// Convergence-study driver for the DPG Timoshenko beam solver.
//
//   dpg_beam --bc cf --t 1,1e-3,1e-6,0 --p 0,1,2 --n0 4 --levels 6 --out conv.csv
//
// Exit codes: 0 success, 1 bad arguments, 2 every level of every run failed.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dpg_beam/study.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(',', start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DPG method for the scaled Timoshenko beam: convergence studies"};
  std::string bc = "cf";
  std::string t_list = "1,1e-3,1e-6,0";
  std::string p_list = "0,1,2";
  std::string load = "sin";
  dpg_beam::StudyConfig cfg;
  long long n0 = 4;

  app.add_option("--bc", bc, "boundary condition: cc, cs, cf or ss")->capture_default_str();
  app.add_option("--t", t_list, "comma separated thickness values in [0,1]")->capture_default_str();
  app.add_option("--p", p_list, "comma separated trial degrees")->capture_default_str();
  app.add_option("--n0", n0, "elements on the coarsest mesh")->capture_default_str();
  app.add_option("--levels", cfg.levels, "number of uniform refinement levels")->capture_default_str();
  app.add_option("--load", load, "load: sin (f = sin(pi x)) or zero")->capture_default_str();
  app.add_option("--out", cfg.out, "CSV output path")->capture_default_str();
  app.add_flag("--gnuplot", cfg.gnuplot, "also write a gnuplot script next to the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cfg.bc = dpg_beam::parse_boundary_condition(bc);
    cfg.load = dpg_beam::parse_load(load);
    if (n0 < 1) throw std::invalid_argument("n0 must be at least 1");
    cfg.n0 = static_cast<std::size_t>(n0);
    cfg.t.clear();
    for (const auto& s : split_commas(t_list)) cfg.t.push_back(parse_real(s));
    cfg.p.clear();
    for (const auto& s : split_commas(p_list)) cfg.p.push_back(parse_int(s));
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const auto runs = dpg_beam::run_study(cfg);
  bool any_success = false;
  for (const auto& run : runs) {
    const auto path = dpg_beam::csv_path(cfg, run);
    std::ofstream os(path);
    if (!os) {
      std::cerr << "error: cannot write " << path << '\n';
      return 1;
    }
    dpg_beam::write_csv(os, run, cfg.levels, cfg.n0);
    std::cout << "wrote " << path.string() << '\n';
    dpg_beam::print_rate_summary(std::cout, cfg, run);
    any_success = any_success || !run.records.empty();
  }
  if (cfg.gnuplot) {
    auto script = std::filesystem::path(cfg.out).replace_extension(".gp");
    std::ofstream gp(script);
    dpg_beam::write_gnuplot(gp, cfg, runs);
    std::cout << "wrote " << script.string() << '\n';
  }
  return any_success ? 0 : 2;
}
