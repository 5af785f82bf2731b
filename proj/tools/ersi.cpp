// Command-line driver: synthetic data generation, reconstruction, parameter
// sweeps, and the probe conditioning survey.
//
// Exit codes: 0 ok, 2 validation, 3 I/O, 4 numerical.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ersi/analysis.hpp"
#include "ersi/config.hpp"
#include "ersi/csv.hpp"
#include "ersi/dataset_io.hpp"
#include "ersi/field_io.hpp"
#include "ersi/forward.hpp"
#include "ersi/probes.hpp"
#include "ersi/reconstruct.hpp"

namespace fs = std::filesystem;
using namespace ersi;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (key = value)");
  cmd->add_option("--preset", args.preset, "parameter preset: desk or paper");
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--set", args.sets, "override a single key, e.g. --set recon.beta=1.0");
  cmd->add_option("--seed", args.seed, "override sampling.seed")
      ->each([&](const std::string&) { args.seed_given = true; });
  cmd->add_option("--workers", args.workers, "worker thread count");
}

RunConfig build_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.preset.empty()) cfg.apply_preset(args.preset);
  if (!args.config_path.empty()) cfg = load_config_file(args.config_path, cfg);
  for (const auto& s : args.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ValidationError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (args.seed_given) {
    cfg.seed = args.seed;
    cfg.explicit_keys.insert("sampling.seed");
  }
  if (args.workers > 0) cfg.workers = args.workers;
  return cfg;
}

fs::path prepare_out_dir(const CommonArgs& args) {
  fs::path dir(args.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + args.out_dir + "'");
  return dir;
}

void write_meta(const fs::path& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << cfg.echo();
}

void echo_into_csv(CsvWriter& csv, const std::string& kind, const RunConfig& cfg) {
  csv.comment("ersi " + kind + " format " + std::to_string(kConfigFormatVersion));
  std::istringstream echo(cfg.echo());
  std::string line;
  while (std::getline(echo, line)) csv.comment(line);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Dataset header vs explicitly configured material/geometry.
void check_header_match(const Dataset& ds, const RunConfig& cfg) {
  auto mismatch = [](double a, double b) {
    return std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  auto require = [&](const char* key, bool bad) {
    if (bad)
      throw ValidationError(std::string("dataset header mismatch on ") + key +
                            " (file value differs from configured value)");
  };
  const auto& ex = cfg.explicit_keys;
  if (ex.count("material.kappa"))
    require("material.kappa", mismatch(ds.material.kappa(), cfg.kappa));
  if (ex.count("material.lambda"))
    require("material.lambda", mismatch(ds.material.lambda(), cfg.lambda));
  if (ex.count("material.mu")) require("material.mu", mismatch(ds.material.mu(), cfg.mu));
  if (ex.count("geometry.radius"))
    require("geometry.radius", mismatch(ds.obs.radius(), cfg.radius));
  if (ex.count("geometry.n_obs"))
    require("geometry.n_obs", ds.obs.size() != cfg.n_obs);
}

// Adopt the dataset's physical parameters into the config (so the echo in
// downstream outputs reflects the data actually used).
void adopt_header(RunConfig& cfg, const Dataset& ds) {
  cfg.kappa = ds.material.kappa();
  cfg.lambda = ds.material.lambda();
  cfg.mu = ds.material.mu();
  cfg.radius = ds.obs.radius();
  cfg.n_obs = ds.obs.size();
  cfg.n_samples = ds.n_samples;
  cfg.noise_level = ds.noise_level;
  cfg.seed = ds.seed;
}

int cmd_simulate(const CommonArgs& args, bool keep_noiseless) {
  RunConfig cfg = build_config(args);
  cfg.validate();
  const fs::path dir = prepare_out_dir(args);

  const MaterialParams p = cfg.material();
  const SourceGrid grid = build_grid(cfg.support(), cfg.h);
  const ObservationSet obs = fibonacci_sphere(cfg.n_obs, cfg.radius);
  const VarianceProfile profile = builtin_profile(cfg.profile);

  SimulateOptions sim_opt;
  sim_opt.workers = cfg.workers;

  const auto t0 = std::chrono::steady_clock::now();
  Dataset clean = simulate(grid, profile, p, obs, cfg.n_samples, cfg.seed, sim_opt);
  const double sim_s = elapsed_s(t0);

  if (keep_noiseless) {
    write_dataset((dir / "dataset_noiseless.ersi").string(), clean);
    write_meta(dir / "dataset_noiseless.ersi.meta", cfg);
  }
  Dataset out = cfg.noise_level > 0.0
                    ? add_noise(clean, cfg.noise_level, cfg.seed,
                                parse_noise_mode(cfg.noise_mode))
                    : std::move(clean);
  write_dataset((dir / "dataset.ersi").string(), out);
  write_meta(dir / "dataset.ersi.meta", cfg);

  std::printf("simulate: N_ob=%zu N_s=%zu cells=%zu noise=%g -> %s (%.1f s)\n",
              obs.size(), cfg.n_samples, grid.num_cells(), cfg.noise_level,
              (dir / "dataset.ersi").c_str(), sim_s);
  return 0;
}

int cmd_reconstruct(const CommonArgs& args, const std::string& data_path) {
  RunConfig cfg = build_config(args);
  const fs::path dir = prepare_out_dir(args);

  Dataset data = read_dataset(data_path);
  check_header_match(data, cfg);
  adopt_header(cfg, data);
  cfg.validate();
  if (!cfg.beta_in_suggested_range())
    std::fprintf(stderr,
                 "warning: recon.beta = %g is outside the suggested range "
                 "[0.8, 1.25]\n",
                 cfg.beta);

  const MaterialParams p = cfg.material();
  const SourceGrid eval_grid = build_grid(cfg.support(), cfg.h);
  const VarianceProfile profile = builtin_profile(cfg.profile);

  ReconstructOptions opt;
  opt.workers = cfg.workers;
  opt.cond_ceiling = cfg.cond_ceiling;
  opt.theta = cfg.theta;

  const auto t0 = std::chrono::steady_clock::now();
  ReconstructResult rec = reconstruct_variance(data, p, cfg.beta, cfg.delta_xi,
                                               eval_grid, opt);
  const double rec_s = elapsed_s(t0);

  write_field((dir / "field.ersf").string(), rec.field, cfg.echo());

  RunParams params;
  params.kappa = cfg.kappa;
  params.beta = cfg.beta;
  params.n_samples = cfg.n_samples;
  params.n_obs = cfg.n_obs;
  params.h = cfg.h;
  params.noise = cfg.noise_level;
  params.seed = cfg.seed;
  params.dxi = cfg.delta_xi;
  ErrorReport report = l2_relative_error(rec.field, profile, params);

  const char* slice_names[3] = {"slice_x0.csv", "slice_y0.csv", "slice_z0.csv"};
  const double cutoff = cfg.beta * p.kappa_s();
  for (int axis = 0; axis < 3; ++axis) {
    const SliceData s = extract_slice(rec.fourier, profile, eval_grid, axis, cutoff);
    report.max_abs = std::max(report.max_abs, s.max_abs_diff);
    CsvWriter csv((dir / slice_names[axis]).string());
    echo_into_csv(csv, "slice", cfg);
    csv.row({"plane", "c1", "c2", "component", "reconstructed", "truth", "difference"});
    const std::string plane = axis == 0 ? "x=0" : axis == 1 ? "y=0" : "z=0";
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t i1 = 0; i1 < s.c1.size(); ++i1)
        for (std::size_t i2 = 0; i2 < s.c2.size(); ++i2) {
          const std::size_t q = i1 * s.c2.size() + i2;
          csv.row({plane, format_double(s.c1[i1]), format_double(s.c2[i2]),
                   std::to_string(m + 1), format_double(s.recon[m][q]),
                   format_double(s.truth[m][q]), format_double(s.diff[m][q])});
        }
  }

  {
    CsvWriter csv((dir / "report.csv").string());
    echo_into_csv(csv, "report", cfg);
    csv.row({"kappa", "beta", "n_samples", "n_obs", "h", "noise", "seed", "delta_xi",
             "err1", "err2", "err3", "mean", "max_abs", "imag_residue", "skipped"});
    csv.row({format_double(params.kappa), format_double(params.beta),
             std::to_string(params.n_samples), std::to_string(params.n_obs),
             format_double(params.h), format_double(params.noise),
             std::to_string(params.seed), format_double(params.dxi),
             format_double(report.err[0]), format_double(report.err[1]),
             format_double(report.err[2]), format_double(report.mean_err),
             format_double(report.max_abs), format_double(rec.field.max_imag_residue),
             std::to_string(rec.field.skipped_points)});
  }

  std::printf(
      "reconstruct: |Xi|=%zu skipped=%zu errors %.3f%% %.3f%% %.3f%% mean %.3f%% "
      "(%.1f s)\n",
      rec.fourier.lattice.full_size(), rec.field.skipped_points, 100 * report.err[0],
      100 * report.err[1], 100 * report.err[2], 100 * report.mean_err, rec_s);
  return 0;
}

int cmd_sweep_cutoff(const CommonArgs& args, const std::string& data_path,
                     const std::vector<double>& cutoffs) {
  if (cutoffs.empty()) throw ValidationError("sweep-cutoff: empty cutoff list");
  RunConfig cfg = build_config(args);
  const fs::path dir = prepare_out_dir(args);

  Dataset data = read_dataset(data_path);
  check_header_match(data, cfg);
  adopt_header(cfg, data);
  cfg.validate();

  const MaterialParams p = cfg.material();
  const SourceGrid eval_grid = build_grid(cfg.support(), cfg.h);
  const VarianceProfile profile = builtin_profile(cfg.profile);

  ReconstructOptions opt;
  opt.workers = cfg.workers;
  opt.cond_ceiling = cfg.cond_ceiling;
  opt.theta = cfg.theta;

  RunParams params;
  params.kappa = cfg.kappa;
  params.n_samples = cfg.n_samples;
  params.n_obs = cfg.n_obs;
  params.h = cfg.h;
  params.noise = cfg.noise_level;
  params.seed = cfg.seed;
  params.dxi = cfg.delta_xi;

  const auto rows =
      sweep_cutoff(data, p, cutoffs, cfg.delta_xi, eval_grid, profile, opt, params);

  CsvWriter csv((dir / "sweep_cutoff.csv").string());
  echo_into_csv(csv, "sweep-cutoff", cfg);
  csv.row({"parameter", "err1", "err2", "err3", "mean"});
  for (const auto& row : rows)
    csv.row({format_double(row.parameter), format_double(row.report.err[0]),
             format_double(row.report.err[1]), format_double(row.report.err[2]),
             format_double(row.report.mean_err)});
  std::printf("sweep-cutoff: %zu rows -> %s\n", rows.size(),
              (dir / "sweep_cutoff.csv").c_str());
  return 0;
}

int cmd_sweep_frequency(const CommonArgs& args, const std::vector<double>& kappas) {
  if (kappas.empty()) throw ValidationError("sweep-frequency: empty kappa list");
  RunConfig cfg = build_config(args);
  cfg.validate();
  const fs::path dir = prepare_out_dir(args);

  const SourceGrid grid = build_grid(cfg.support(), cfg.h);
  const VarianceProfile profile = builtin_profile(cfg.profile);

  FrequencySweepConfig fcfg;
  fcfg.lambda = cfg.lambda;
  fcfg.mu = cfg.mu;
  fcfg.radius = cfg.radius;
  fcfg.n_obs = cfg.n_obs;
  fcfg.n_samples = cfg.n_samples;
  fcfg.noise_level = cfg.noise_level;
  fcfg.noise_mode = parse_noise_mode(cfg.noise_mode);
  fcfg.seed = cfg.seed;
  fcfg.dxi = cfg.delta_xi;

  ReconstructOptions opt;
  opt.workers = cfg.workers;
  opt.cond_ceiling = cfg.cond_ceiling;
  opt.theta = cfg.theta;
  SimulateOptions sim_opt;
  sim_opt.workers = cfg.workers;

  const auto rows = sweep_frequency(kappas, grid, profile, grid, fcfg, opt, sim_opt);

  CsvWriter csv((dir / "sweep_frequency.csv").string());
  echo_into_csv(csv, "sweep-frequency", cfg);
  csv.row({"parameter", "beta", "err1", "err2", "err3", "mean"});
  for (const auto& row : rows)
    csv.row({format_double(row.kappa), format_double(row.beta_chosen),
             format_double(row.report.err[0]), format_double(row.report.err[1]),
             format_double(row.report.err[2]), format_double(row.report.mean_err)});
  std::printf("sweep-frequency: %zu rows -> %s\n", rows.size(),
              (dir / "sweep_frequency.csv").c_str());
  return 0;
}

int cmd_probe_survey(const CommonArgs& args, const std::vector<double>& radii,
                     std::size_t n_dirs) {
  if (radii.empty()) throw ValidationError("probe-survey: empty radius list");
  RunConfig cfg = build_config(args);
  cfg.validate();
  const fs::path dir = prepare_out_dir(args);
  const MaterialParams p = cfg.material();
  for (double r : radii)
    if (!(r > 0.0 && r < 2.0 * p.kappa_s()))
      throw OutOfBandError("probe-survey: radius " + std::to_string(r) +
                           " outside (0, 2 kappa_s)");

  const auto rows = conditioning_survey(radii, n_dirs, p, cfg.seed, cfg.theta);
  CsvWriter csv((dir / "probe_survey.csv").string());
  echo_into_csv(csv, "probe-survey", cfg);
  csv.row({"radius", "construction", "mean", "max", "median"});
  for (const auto& row : rows)
    csv.row({format_double(row.radius), row.construction, format_double(row.mean),
             format_double(row.max), format_double(row.median)});
  std::printf("probe-survey: %zu rows -> %s\n", rows.size(),
              (dir / "probe_survey.csv").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elastic random source inversion"};
  app.require_subcommand(1);

  CommonArgs sim_args, rec_args, sc_args, sf_args, ps_args;
  bool keep_noiseless = false;
  std::string rec_data, sc_data;
  std::vector<double> cutoffs, kappas, radii;
  std::size_t n_dirs = 256;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic boundary dataset");
  add_common(sim, sim_args);
  sim->add_flag("--keep-noiseless", keep_noiseless,
                "also write the noiseless dataset");

  auto* rec = app.add_subcommand("reconstruct", "reconstruct the variance from a dataset");
  add_common(rec, rec_args);
  rec->add_option("--data", rec_data, "input dataset (.ersi)")->required();

  auto* sc = app.add_subcommand("sweep-cutoff", "error table over cutoff frequencies");
  add_common(sc, sc_args);
  sc->add_option("--data", sc_data, "input dataset (.ersi)")->required();
  sc->add_option("--cutoffs", cutoffs, "cutoff frequencies |xi|_max")->required();

  auto* sf = app.add_subcommand("sweep-frequency", "error table over angular frequencies");
  add_common(sf, sf_args);
  sf->add_option("--kappas", kappas, "angular frequencies")->required();

  auto* ps = app.add_subcommand("probe-survey", "conditioning survey of the probe design");
  add_common(ps, ps_args);
  ps->add_option("--radii", radii, "|xi| radii to survey")->required();
  ps->add_option("--dirs", n_dirs, "directions per radius");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_args, keep_noiseless);
    if (rec->parsed()) return cmd_reconstruct(rec_args, rec_data);
    if (sc->parsed()) return cmd_sweep_cutoff(sc_args, sc_data, cutoffs);
    if (sf->parsed()) return cmd_sweep_frequency(sf_args, kappas);
    if (ps->parsed()) return cmd_probe_survey(ps_args, radii, n_dirs);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error (validation): %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return 3;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error (numerical): %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
