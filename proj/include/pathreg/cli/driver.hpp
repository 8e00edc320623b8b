#pragma once

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "pathreg/io/config.hpp"
#include "pathreg/io/formats.hpp"
#include "pathreg/io/manifest.hpp"
#include "pathreg/pathreg.hpp"
#include "pathreg/yode/oracle.hpp"

namespace pathreg::cli {

namespace fs = std::filesystem;
using io::json;

struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

/// Apply --set key.path=value overrides on top of the config file; flags win.
inline void apply_overrides(json& cfg, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw io::UsageError("--set expects key.path=value, got '" + kv + "'");
    const std::string keypath = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
      const auto dot = keypath.find('.', pos);
      const std::string key = keypath.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
      if (key.empty()) throw io::UsageError("--set: empty key in '" + keypath + "'");
      if (dot == std::string::npos) {
        json parsed;
        try {
          parsed = json::parse(value);
        } catch (const json::parse_error&) {
          parsed = value;  // bare strings
        }
        (*node)[key] = parsed;
        break;
      }
      node = &(*node)[key];
      pos = dot + 1;
    }
  }
}

inline fs::path ensure_outdir(const json& cfg) {
  const std::string dir = io::get_or<std::string>(cfg, "output_dir", "out");
  fs::create_directories(dir);
  return dir;
}

/// Deterministic fan-out over a batch: each index writes its own slot, so
/// results are identical for any worker count.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

inline std::unique_ptr<yode::NonlinearField> make_field(const averaging::SpectralDrift& drift,
                                                        const gauss::SamplePath& path, const json& cfg,
                                                        int jet_order) {
  const double gamma = io::get_or<double>(cfg, "gamma", 0.75);
  const double delta = io::get_or<double>(cfg, "delta", 2.0);
  if (std::holds_alternative<averaging::CombSymbol>(drift.kind))
    return std::make_unique<yode::CombDriftField>(drift, path, jet_order, gamma, delta);
  if (std::holds_alternative<averaging::SmoothDrift1D>(drift.kind)) {
    const auto& s = std::get<averaging::SmoothDrift1D>(drift.kind);
    return std::make_unique<yode::SmoothDriftField>(s, path, jet_order, 1.0, delta);
  }
  const core::FrequencyGrid fgrid = io::fgrid_from_json(io::get_or<json>(cfg, "grid", json::object()), 1);
  if (io::get_or<bool>(cfg, "interpolated_field", false))
    return std::make_unique<yode::InterpolatedAveragedField>(drift, path, fgrid, jet_order, gamma, delta);
  return std::make_unique<yode::GridSymbolField>(drift, path, fgrid, jet_order, gamma, delta);
}

// ---------- subcommands ----------

inline int cmd_simulate(const json& cfg) {
  const auto model = io::model_from_json(io::require<json>(cfg, "model"));
  const auto n = io::get_or<std::size_t>(cfg, "steps", 1024);
  const auto npaths = io::get_or<std::size_t>(cfg, "paths", 1);
  const auto seed = io::get_or<std::uint64_t>(cfg, "seed", 1);
  const bool binary = io::get_or<bool>(cfg, "binary", false);
  const fs::path dir = ensure_outdir(cfg);
  io::RunManifest manifest(cfg);
  if (const auto* s = std::get_if<gauss::FbmSeriesSpec>(&model.kind))
    manifest.add_warning("fbm_series: truncation forfeits the tail beyond " +
                         std::to_string(s->lambdas.size()) + " terms (last weight^2 = " +
                         std::to_string(model.series_tail_weight()) + ")");
  for (std::size_t i = 0; i < npaths; ++i) {
    const auto path = gauss::sample(model, n, core::split_seed(seed, i));
    const fs::path file = dir / ("path_" + std::to_string(i) + (binary ? ".bin" : ".csv"));
    if (binary)
      io::write_path_binary(path, file.string());
    else
      io::write_path_csv(path, file.string());
    manifest.add_output(file.string());
  }
  manifest.stage_done("simulate");
  manifest.write((dir / "manifest.json").string());
  std::cout << "simulate: wrote " << npaths << " paths to " << dir.string() << "\n";
  return 0;
}

inline int cmd_localtime(const json& cfg) {
  const auto model = io::model_from_json(io::require<json>(cfg, "model"));
  const auto n = io::get_or<std::size_t>(cfg, "steps", 4096);
  const auto seed = io::get_or<std::uint64_t>(cfg, "seed", 1);
  const auto fgrid = io::fgrid_from_json(io::get_or<json>(cfg, "grid", json::object()), model.dimension);
  const fs::path dir = ensure_outdir(cfg);
  io::RunManifest manifest(cfg);
  const auto path = gauss::sample(model, n, seed);
  manifest.stage_done("simulate");
  const double s = io::get_or<double>(cfg, "window_start", 0.0);
  const double t = io::get_or<double>(cfg, "window_end", model.horizon);
  const auto spec = occupation::occupation_spectrum(path, s, t, fgrid);
  manifest.stage_done("spectrum");
  manifest.add_warnings(occupation::resolution_warnings(path, fgrid));
  const auto lt = occupation::local_time(spec, io::get_or<double>(cfg, "taper_cells", 0.0));
  manifest.add_warnings(lt.warnings);
  manifest.stage_done("local_time");
  const fs::path spec_file = dir / "spectrum.csv";
  const fs::path lt_file = dir / "local_time.csv";
  io::write_spectrum_csv(spec, spec_file.string());
  io::write_local_time_csv(lt, lt_file.string());
  manifest.add_output(spec_file.string());
  manifest.add_output(lt_file.string());
  manifest.write((dir / "manifest.json").string());
  std::cout << "localtime: mass error " << lt.mass_rel_error << ", min " << lt.min_value() << ", max "
            << lt.max_value() << "\n";
  return 0;
}

inline int cmd_regularity(const json& cfg, unsigned threads) {
  const auto model = io::model_from_json(io::require<json>(cfg, "model"));
  if (model.dimension != 1 && model.dimension != 2)
    throw io::UsageError("regularity: supported dimensions are 1 and 2");
  const auto n = io::get_or<std::size_t>(cfg, "steps", 4096);
  const auto npaths = io::get_or<std::size_t>(cfg, "paths", 64);
  const auto seed = io::get_or<std::uint64_t>(cfg, "seed", 1);
  const auto fgrid = io::fgrid_from_json(io::get_or<json>(cfg, "grid", json::object()), model.dimension);
  const auto windows = io::windows_from_json(io::get_or<json>(cfg, "windows", json::object()));
  std::vector<double> lambdas;
  if (cfg.contains("lambda") && cfg.at("lambda").is_array())
    lambdas = cfg.at("lambda").get<std::vector<double>>();
  else
    lambdas = {io::get_or<double>(cfg, "lambda", 0.0)};
  if (npaths < 20) throw io::UsageError("regularity: exponent fits need at least 20 paths");
  const fs::path dir = ensure_outdir(cfg);
  io::RunManifest manifest(cfg);

  std::vector<gauss::SamplePath> paths(npaths);
  parallel_for(npaths, threads,
               [&](std::size_t i) { paths[i] = gauss::sample(model, n, core::split_seed(seed, i)); });
  manifest.stage_done("simulate");

  json reports = json::array();
  for (double lambda : lambdas) {
    const auto rep = occupation::holder_exponent(paths, lambda, fgrid, windows);
    json jr;
    jr["lambda"] = rep.lambda;
    jr["gamma_hat"] = rep.gamma_hat;
    jr["stderr"] = rep.std_error;
    jr["n_paths"] = rep.n_paths;
    jr["windows"] = {{"j_min", windows.j_min}, {"j_max", windows.j_max}, {"offsets", windows.offsets_per_scale}};
    reports.push_back(jr);
    const fs::path scale_file = dir / ("scales_lambda_" + io::format_double(lambda) + ".csv");
    io::CsvWriter w(scale_file.string());
    w.row({"h", "mean_sup_norm"});
    for (const auto& p : rep.mean_scale_points) w.numeric_row({p.h, p.sup_norm});
    manifest.add_output(scale_file.string());
  }
  manifest.stage_done("exponent_fit");
  const fs::path rep_file = dir / "regularity.json";
  {
    std::ofstream out(rep_file);
    out << reports.dump(2) << "\n";
  }
  manifest.add_output(rep_file.string());
  manifest.write((dir / "manifest.json").string());
  std::cout << "regularity:";
  for (const auto& r : reports)
    std::cout << " lambda=" << r["lambda"] << " gamma_hat=" << r["gamma_hat"] << " stderr=" << r["stderr"];
  std::cout << "\n";
  return 0;
}

inline int cmd_average(const json& cfg) {
  const auto model = io::model_from_json(io::require<json>(cfg, "model"));
  if (model.dimension != 1) throw io::UsageError("average: d = 1 in this driver");
  const auto drift = io::drift_from_json(io::require<json>(cfg, "drift"));
  const auto n = io::get_or<std::size_t>(cfg, "steps", 4096);
  const auto seed = io::get_or<std::uint64_t>(cfg, "seed", 1);
  const int k = io::get_or<int>(cfg, "jet_order", 2);
  const auto fgrid = io::fgrid_from_json(io::get_or<json>(cfg, "grid", json::object()), 1);
  const auto windows = io::windows_from_json(io::get_or<json>(cfg, "windows", json::object()));
  const fs::path dir = ensure_outdir(cfg);
  io::RunManifest manifest(cfg);
  const auto path = gauss::sample(model, n, seed);
  manifest.stage_done("simulate");
  if (!drift.has_lattice_symbol())
    throw io::UsageError("average: drift '" + drift.name() + "' has no lattice symbol");
  std::vector<occupation::OccupationSpectrum> spectra;
  for (std::size_t j = windows.j_min; j <= windows.j_max; ++j) {
    const std::size_t hidx = n >> j;
    if (hidx == 0) break;
    spectra.push_back(occupation::occupation_spectrum(path, 0.0, path.grid.time(hidx), fgrid));
  }
  manifest.stage_done("spectra");
  const auto field = averaging::average(drift, spectra, k);
  manifest.add_warnings(field.warnings);
  manifest.stage_done("average");
  // jets exported in the binary column layout with a jet-order axis
  const fs::path jet_file = dir / "averaged_jets.bin";
  {
    std::ofstream out(jet_file, std::ios::binary);
    out.write(io::kJetMagic, 8);
    out.put(1);
    io::detail::put_u32(out, static_cast<std::uint32_t>(field.dim));
    io::detail::put_u32(out, static_cast<std::uint32_t>(field.jet_order));
    io::detail::put_u64(out, field.windows.size());
    for (const auto& win : field.windows) {
      io::detail::put_f64(out, win.s);
      io::detail::put_f64(out, win.t);
      for (const auto& level : win.jets)
        for (const auto& comp : level)
          for (double v : comp) io::detail::put_f64(out, v);
    }
  }
  manifest.add_output(jet_file.string());
  manifest.write((dir / "manifest.json").string());
  std::cout << "average: " << field.windows.size() << " windows, jets to order " << k << "\n";
  return 0;
}

inline int cmd_solve(const json& cfg) {
  const auto model = io::model_from_json(io::require<json>(cfg, "model"));
  if (model.dimension != 1) throw io::UsageError("solve: d = 1 in this driver");
  const auto drift = io::drift_from_json(io::require<json>(cfg, "drift"));
  const auto n = io::get_or<std::size_t>(cfg, "steps", 4096);
  const auto seed = io::get_or<std::uint64_t>(cfg, "seed", 1);
  const int k = io::get_or<int>(cfg, "jet_order", 0);
  const double x0 = io::require<double>(cfg, "x");
  auto scfg = io::solve_config_from_json(io::get_or<json>(cfg, "solver", json::object()));
  const fs::path dir = ensure_outdir(cfg);
  io::RunManifest manifest(cfg);
  const auto path = gauss::sample(model, n, seed);
  manifest.stage_done("simulate");
  const auto field = make_field(drift, path, cfg, k + 1);
  manifest.stage_done("field");
  Eigen::VectorXd x(1);
  x << x0;
  const auto jet = yode::solve_flow(*field, x, k, scfg);
  manifest.stage_done("solve");
  if (jet.status == yode::SolveStatus::MaxIterations) {
    double worst = 0.0;
    for (const auto& e : jet.contraction_log) worst = std::max(worst, e.contraction);
    throw NumericalFailure("solve: Picard iteration failed to contract (measured factor " +
                           std::to_string(worst) + ")");
  }
  if (jet.status == yode::SolveStatus::Exploded && drift.besov)
    manifest.add_warning(
        "solve: explosion despite a Besov-tagged drift (global existence predicted); treat as a "
        "resolution warning");
  const fs::path jet_file = dir / "flow_jet.bin";
  io::write_jet_binary(jet, jet_file.string());
  manifest.add_output(jet_file.string());

  json report;
  report["status"] = jet.status == yode::SolveStatus::Complete ? "complete" : "exploded";
  report["t_star"] = jet.t_star;
  report["gamma_prime"] = jet.gamma_prime_used;
  report["asymmetry_residual"] = jet.asymmetry_residual;
  json clog = json::array();
  json tau_profile = json::array();
  for (const auto& e : jet.contraction_log) {
    clog.push_back({{"level", e.level},
                    {"t0", e.t0},
                    {"t1", e.t1},
                    {"iterations", e.iterations},
                    {"contraction", e.contraction}});
    if (e.level == 0) tau_profile.push_back({{"t0", e.t0}, {"tau_inverse", e.tau_inverse}});
  }
  report["contraction_log"] = clog;
  report["tau_inverse_profile"] = tau_profile;

  if (io::get_or<std::string>(cfg, "oracle", "") == "classical") {
    const auto b = yode::classical_evaluator(drift);
    const auto ref = yode::classical_oracle(b, path, x);
    json table = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i <= jet.last_index; i += std::max<std::size_t>(1, n / 64)) {
      const double err =
          (jet.levels[0].row(static_cast<Eigen::Index>(i)) - ref.row(static_cast<Eigen::Index>(i)))
              .lpNorm<Eigen::Infinity>();
      worst = std::max(worst, err);
      table.push_back({{"t", jet.grid.time(i)}, {"error", err}});
    }
    report["oracle_error_table"] = table;
    report["oracle_max_error"] = worst;
    manifest.stage_done("oracle");
  }

  const fs::path rep_file = dir / "solve.json";
  {
    std::ofstream out(rep_file);
    out << report.dump(2) << "\n";
  }
  manifest.add_output(rep_file.string());
  manifest.write((dir / "manifest.json").string());
  std::cout << "solve: status " << report["status"] << " t_star " << jet.t_star << "\n";
  return 0;
}

inline int cmd_lnd(const json& cfg) {
  const auto model = io::model_from_json(io::require<json>(cfg, "model"));
  const auto n = io::get_or<std::size_t>(cfg, "steps", 256);
  if (n < 3) throw io::UsageError("lnd: grid needs at least 3 points");
  std::vector<double> zetas;
  if (cfg.contains("zeta") && cfg.at("zeta").is_array())
    zetas = cfg.at("zeta").get<std::vector<double>>();
  else
    zetas = {io::get_or<double>(cfg, "zeta", 0.5)};
  const auto max_lag = io::get_or<std::size_t>(cfg, "max_lag", 0);
  const fs::path dir = ensure_outdir(cfg);
  io::RunManifest manifest(cfg);
  core::TimeGrid grid(model.horizon, n);
  json reports = json::array();
  for (double zeta : zetas) {
    const auto prof = gauss::lnd_profile(model, grid, zeta, max_lag);
    json jr;
    jr["zeta"] = zeta;
    jr["strong_infimum"] = prof.strong_infimum;
    jr["weak_infimum"] = prof.weak_infimum;
    jr["is_lnd_strong"] = prof.is_lnd_strong();
    jr["is_lnd_weak"] = prof.is_lnd_weak();
    jr["near_diagonal_strong"] = prof.near_diagonal_strong(1);
    reports.push_back(jr);
  }
  manifest.stage_done("lnd");
  const fs::path rep_file = dir / "lnd.json";
  {
    std::ofstream out(rep_file);
    out << reports.dump(2) << "\n";
  }
  manifest.add_output(rep_file.string());
  manifest.write((dir / "manifest.json").string());
  std::cout << "lnd:";
  for (const auto& r : reports)
    std::cout << " zeta=" << r["zeta"] << " inf=" << r["strong_infimum"] << " lnd=" << r["is_lnd_strong"];
  std::cout << "\n";
  return 0;
}

inline int cmd_sewcheck(const json& cfg) {
  auto model = io::model_from_json(io::require<json>(cfg, "model"));
  if (model.dimension != 1) throw io::UsageError("sewcheck: coordinates are independent; use dimension 1");
  const auto n = io::get_or<std::size_t>(cfg, "steps", 256);
  if ((n & (n - 1)) != 0) throw io::UsageError("sewcheck: steps must be a power of two");
  const double z = io::get_or<double>(cfg, "z", 8.0);
  const auto batch = io::get_or<std::size_t>(cfg, "batch", 64);
  sewing::SewcheckOptions opt;
  opt.base_seed = io::get_or<std::uint64_t>(cfg, "seed", 1);
  const fs::path dir = ensure_outdir(cfg);
  io::RunManifest manifest(cfg);
  core::TimeGrid grid(model.horizon, n);
  const auto rep = sewing::stochastic_sewing_check(model, z, grid, batch, opt);
  manifest.stage_done("sewcheck");
  json jr;
  jr["z"] = rep.z;
  jr["batch"] = rep.batch;
  jr["tower_estimate"] = rep.tower_estimate;
  jr["beta_hat"] = nullptr;  // conditional estimate is an analytic zero; no finite exponent to fit
  jr["kappa_hat"] = rep.kappa_hat;
  jr["K1_est"] = rep.k1_est;
  jr["K2_est"] = rep.k2_est;
  jr["hypothesis_ok"] = rep.hypothesis_ok;
  json mesh = json::array();
  for (const auto& row : rep.mesh_table) mesh.push_back({{"cells", row.cells}, {"l2_error", row.l2_error}});
  jr["mesh_table"] = mesh;
  const fs::path rep_file = dir / "sewcheck.json";
  {
    std::ofstream out(rep_file);
    out << jr.dump(2) << "\n";
  }
  manifest.add_output(rep_file.string());
  manifest.write((dir / "manifest.json").string());
  std::cout << "sewcheck: tower " << rep.tower_estimate << " kappa_hat " << rep.kappa_hat << "\n";
  return 0;
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 2 usage error, 3 numerical failure (in-band explosion is still success).
inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"pathreg: local times, averaging operators, and nonlinear Young ODEs"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string oracle;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", overrides, "override config fields, key.path=value (flags win)");
  app.add_option("--threads", threads, "worker pool size for batch stages");
  app.add_option("--oracle", oracle, "solve: compare against this reference integrator (classical)");

  const std::vector<std::string> names{"simulate", "localtime", "regularity", "average",
                                       "solve",    "lnd",       "sewcheck"};
  for (const auto& n : names) app.add_subcommand(n)->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("pathreg");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    json cfg = config_path.empty() ? json::object() : io::load_json(config_path);
    detail::apply_overrides(cfg, overrides);
    if (!oracle.empty()) cfg["oracle"] = oracle;
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "simulate") return detail::cmd_simulate(cfg);
    if (sub == "localtime") return detail::cmd_localtime(cfg);
    if (sub == "regularity") return detail::cmd_regularity(cfg, threads);
    if (sub == "average") return detail::cmd_average(cfg);
    if (sub == "solve") return detail::cmd_solve(cfg);
    if (sub == "lnd") return detail::cmd_lnd(cfg);
    if (sub == "sewcheck") return detail::cmd_sewcheck(cfg);
    return 2;
  } catch (const io::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace pathreg::cli
