// urbaneq: solve, sweep, classify, enumerate and render urban-system equilibria.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>

#include "urbaneq/config.hpp"
#include "urbaneq/error.hpp"
#include "urbaneq/io.hpp"

using namespace urbaneq;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kNotConverged = 2, kLeftFeasibleSet = 3 };

struct Options {
  std::string config;
  std::string out = "out";
  int threads = -1;
  bool verbose = false;
  std::string input;
  int width = 640;
};

class Log {
 public:
  explicit Log(bool on) : on_(on), t0_(std::chrono::steady_clock::now()) {}
  void operator()(const std::string& msg) const {
    if (!on_) return;
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    std::cerr << "[" << std::fixed << std::setprecision(3) << t << "s] " << msg << '\n';
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point t0_;
};

RunConfig load(const Options& o, const Log& log) {
  if (o.config.empty()) throw Error(ErrorKind::Config, "--config is required");
  RunConfig cfg = load_config(o.config);
  const int threads = o.threads >= 0 ? o.threads : cfg.threads;
  if (threads > 0) omp_set_num_threads(threads);
  log("config " + o.config + ", threads " + std::to_string(threads > 0 ? threads : omp_get_max_threads()));
  return cfg;
}

void require_geography(const RunConfig& cfg) {
  if (!cfg.has_geography) throw Error(ErrorKind::Config, cfg.source + ": this command needs a geography section");
}

fs::path out_dir(const Options& o) {
  fs::create_directories(o.out);
  return fs::path(o.out);
}

void write_json(const fs::path& path, const io::Json& j) { io::write_text(path.string(), j.dump(2) + "\n"); }

int cmd_solve(const Options& o) {
  const Log log(o.verbose);
  const RunConfig cfg = load(o, log);
  require_geography(cfg);
  const fs::path dir = out_dir(o);
  const Geography& geo = cfg.geography;

  for (const auto& c : validate_geography(geo, cfg.seed).checks)
    if (!c.passed) std::cerr << "warning: assumption " << c.name << " failed: " << c.detail << '\n';

  EquilibriumSolution sol;
  try {
    sol = fixed_point_solve(geo, cfg.params, cfg.active, cfg.solver);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotConverged) {
      std::cerr << e.what() << '\n';
      return kNotConverged;
    }
    throw;
  }
  log(std::string("solve ") + to_string(sol.status) + " after " + std::to_string(sol.iterations) + " iterations");

  const Geography sub = geo.subset(cfg.active);
  io::Json doc = io::solution_json(sol, geo);
  if (sol.levels_recovered && sol.converged()) {
    doc["sustainability"] = io::sustainability_json(spatial_equilibrium_check(sol, geo, cfg.params));
    if (cfg.probe_starts > 0) {
      const ProbeReport probe =
          multistart_uniqueness_probe(geo, cfg.params, cfg.active, cfg.probe_starts, cfg.seed, cfg.solver);
      write_json(dir / "probe.json", io::probe_json(probe));
      log("probe " + std::to_string(probe.clusters.size()) + " cluster(s)");
    }
  }
  write_json(dir / "solution.json", doc);
  if (sol.levels_recovered) io::write_text((dir / "sites.csv").string(), io::site_csv(sol, geo));
  if (!sol.tessellation.labels.empty()) {
    io::write_label_pgm((dir / "labels.pgm").string(), *geo.grid, sol.tessellation.labels);
    io::write_text((dir / "map.svg").string(), io::tessellation_svg(io::map_view(sol, geo), o.width));
  }
  if (sol.levels_recovered) {
    const KernelSpec kernel = variant_transform(cfg.params).kernel;
    const CellAggregates agg = aggregate_amenities(sol.tessellation, sub, kernel);
    const Raster density{geo.grid->bbox(), geo.grid->nx(), geo.grid->ny(),
                         resident_density(sol.tessellation, sub, kernel, agg, sol.L)};
    write_raster((dir / "density.raster").string(), density);
  }
  log("wrote " + dir.string());

  std::cout << "status " << to_string(sol.status) << ", iterations " << sol.iterations;
  if (sol.levels_recovered) std::cout << ", V " << sol.V << ", residual " << sol.residuals.lambda_eq;
  std::cout << '\n';
  if (!sol.note.empty()) std::cerr << "note: " << sol.note << '\n';
  switch (sol.status) {
    case SolveStatus::converged: return sol.levels_recovered ? kOk : kNotConverged;
    case SolveStatus::not_converged: return kNotConverged;
    case SolveStatus::left_feasible_set: return kLeftFeasibleSet;
  }
  return kOk;
}

int cmd_sweep(const Options& o) {
  const Log log(o.verbose);
  const RunConfig cfg = load(o, log);
  const fs::path dir = out_dir(o);
  const SweepResult sweep = parameter_sweep(cfg.sweep);
  io::write_text((dir / "sweep.csv").string(), io::sweep_csv(sweep));
  io::write_text((dir / "sweep.svg").string(), io::sweep_svg(sweep, o.width));
  std::cout << "sweep " << sweep.cells.size() << " cells\n";
  return kOk;
}

int cmd_classify(const Options& o) {
  const Log log(o.verbose);
  const RunConfig cfg = load(o, log);
  const RegimeReport rep = cfg.has_geography
                               ? regime_report(cfg.geography, cfg.params, cfg.active, cfg.existence)
                               : regime_classify(cfg.params);
  const io::Json j = io::regime_json(rep);
  if (!o.out.empty() && o.out != "-") write_json(out_dir(o) / "regime.json", j);
  std::cout << "alpha_cutoff " << rep.alpha_cutoff << '\n'
            << "location_multiplicity " << to_string(rep.location_multiplicity) << '\n'
            << "gamma1 " << rep.gamma1 << "\ngamma2 " << rep.gamma2 << "\ngamma_ratio " << rep.gamma_ratio << '\n'
            << "labor_uniqueness " << std::boolalpha << rep.labor_uniqueness << '\n'
            << "reconciliation " << rep.reconciliation << '\n';
  if (rep.uniqueness)
    std::cout << "eta_hat " << *rep.eta_hat << " (estimate)\nuniqueness_lhs " << rep.uniqueness->lhs << '\n'
              << "uniqueness_holds " << rep.uniqueness->holds << '\n';
  if (rep.existence)
    std::cout << "existence_min_margin " << rep.existence->min_margin << "\nexistence_passes "
              << rep.existence->passes << '\n';
  return kOk;
}

int cmd_enumerate(const Options& o) {
  const Log log(o.verbose);
  const RunConfig cfg = load(o, log);
  require_geography(cfg);
  const fs::path dir = out_dir(o);
  const EquilibriumCatalog cat = enumerate_urban_systems(cfg.geography, cfg.params, cfg.enumerate);
  write_json(dir / "catalog.json", io::catalog_json(cat));
  io::write_text((dir / "catalog.csv").string(), io::catalog_csv(cat));
  std::cout << "subsets " << cat.entries.size() << ", sustainable " << cat.sustainable_entries().size() << " ("
            << cat.strategy << ")\n";
  return kOk;
}

int cmd_render(const Options& o) {
  if (o.input.empty()) throw Error(ErrorKind::Config, "--input is required");
  io::Json doc;
  try {
    doc = io::Json::parse(io::read_text(o.input));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, o.input + ": " + e.what());
  }
  fs::path target = o.out.empty() ? fs::path(o.input).replace_extension(".svg") : fs::path(o.out);
  if (fs::is_directory(target)) target /= "map.svg";
  io::write_text(target.string(), io::tessellation_svg(io::map_view(doc), o.width));
  std::cout << "wrote " << target.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Urban-system equilibria on additively weighted Voronoi tessellations"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", o.config, "run configuration (YAML)")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--verbose,-v", o.verbose, "progress on stderr");
  };
  auto* solve = app.add_subcommand("solve", "solve a Y*-centric equilibrium");
  auto* sweep = app.add_subcommand("sweep", "parameter-region map");
  auto* classify = app.add_subcommand("classify", "regime report");
  auto* enumerate = app.add_subcommand("enumerate", "catalog of urban systems");
  auto* render = app.add_subcommand("render", "SVG from a saved solution");
  for (auto* s : {solve, sweep, classify, enumerate}) common(s, true);
  common(render, false);
  render->add_option("--input", o.input, "solution JSON")->required()->check(CLI::ExistingFile);
  o.out.clear();
  for (auto* s : {solve, sweep, classify, enumerate, render})
    s->add_option("--width", o.width, "SVG width in pixels")->check(CLI::Range(64, 8192));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }
  const bool default_out = o.out.empty();
  if (default_out && !render->parsed()) o.out = "out";

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (classify->parsed()) return cmd_classify(o);
    if (enumerate->parsed()) return cmd_enumerate(o);
    return cmd_render(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::NotConverged) return kNotConverged;
    if (e.kind() == ErrorKind::LeftFeasibleSet) return kLeftFeasibleSet;
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
