// Command-line surface: fit / sample / eval / plotdata over delimited numeric
// files and versioned model files. Exit codes: 0 success, 2 configuration
// error, 3 I/O error, 4 numerical failure.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "tgp/dataset.hpp"
#include "tgp/errors.hpp"
#include "tgp/evaluation.hpp"
#include "tgp/learn.hpp"
#include "tgp/model.hpp"
#include "tgp/model_io.hpp"
#include "tgp/rng.hpp"
#include "tgp/sampling.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void apply_thread_count(int flag_threads) {
  int n = flag_threads;
  if (n <= 0) {
    if (const char* env = std::getenv("TGP_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = 1;
  Eigen::setNbThreads(n);
}

struct IngestFlags {
  std::string delimiter = ",";
  std::string header = "auto";
  std::size_t max_rows = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--delimiter", delimiter, "Cell delimiter (one character)");
    cmd->add_option("--header", header, "Header row handling: auto, yes, no")
        ->check(CLI::IsMember({"auto", "yes", "no"}));
    cmd->add_option("--max-rows", max_rows, "Cap on ingested rows (0 = all)");
  }

  tgp::IngestOptions options(bool center) const {
    if (delimiter.size() != 1)
      throw tgp::ConfigError("delimiter must be a single character");
    tgp::IngestOptions opts;
    opts.delimiter = delimiter[0];
    opts.header = header == "yes"  ? tgp::IngestOptions::Header::Yes
                  : header == "no" ? tgp::IngestOptions::Header::No
                                   : tgp::IngestOptions::Header::Auto;
    opts.center = center;
    opts.max_rows = max_rows;
    return opts;
  }
};

struct SolverFlags {
  std::string method = "auto";
  double tol = 1e-8;
  int max_iter = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--solver", method, "Linear solver: auto, direct, cg")
        ->check(CLI::IsMember({"auto", "direct", "cg"}));
    cmd->add_option("--solver-tol", tol, "CG relative residual tolerance");
    cmd->add_option("--solver-max-iter", max_iter, "CG iteration cap (0 = 10S)");
  }

  tgp::SolverOptions options() const {
    tgp::SolverOptions opts;
    opts.method = method == "direct" ? tgp::SolveMethod::Direct
                  : method == "cg"   ? tgp::SolveMethod::ConjugateGradient
                                     : tgp::SolveMethod::Auto;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return opts;
  }
};

struct FitArgs {
  std::string data_path;
  std::string out_path;
  std::string algorithm;
  IngestFlags ingest;
  SolverFlags solver;
  bool no_center = false;
  bool anisotropic = false;
  double gamma = 0.0;
  double lambda = 0.1;
  int feature_count = 1000;
  double sigma_max = 0.0;
  int noise_levels = 10;
  double eta = 0.0;
  std::uint64_t seed = 0;
  double rho = 0.05;
  int iterations = 10000;
  int mc_samples = 100000;
};

int run_fit(const FitArgs& args, bool gamma_set, bool sigma_max_set,
            bool eta_set) {
  tgp::Dataset data = tgp::ingest(args.data_path,
                                  args.ingest.options(!args.no_center));
  if (data.rejected_rows > 0)
    std::fprintf(stderr, "rejected %zu malformed rows\n", data.rejected_rows);

  tgp::Hyperparams hp = tgp::default_hyperparams(data);
  hp.lambda = args.lambda;
  hp.feature_count = args.feature_count;
  hp.noise_levels = args.noise_levels;
  if (gamma_set) {
    hp.gamma = args.gamma;
    if (!eta_set) hp.eta = 1.0 / (args.gamma * args.gamma);
  }
  if (sigma_max_set) hp.sigma_max = args.sigma_max;
  if (eta_set) hp.eta = args.eta;
  hp.validate();

  const auto t_start = Clock::now();
  tgp::BaseMeasure base = tgp::empirical_base(data.rows);
  tgp::FrequencyCovariance cov =
      args.anisotropic
          ? tgp::FrequencyCovariance::from_data_covariance(base.sigma())
          : tgp::FrequencyCovariance::identity(data.dim());
  tgp::RffBasis basis = tgp::RffBasis::sample(data.dim(), hp.feature_count,
                                              hp.gamma, cov, args.seed);

  std::optional<tgp::TgpModel> model;
  double pass_seconds = 0.0;
  if (args.algorithm == "map") {
    tgp::MapOptions mo;
    mo.lambda = hp.lambda;
    mo.step = args.rho;
    mo.iterations = args.iterations;
    mo.mc_samples = args.mc_samples;
    mo.seed = tgp::splitmix64(args.seed + 1);
    pass_seconds = seconds_since(t_start);
    tgp::MapFitResult result = tgp::fit_map(data.rows, basis, base, mo);
    std::printf("map final_update_norm %.6g psi1_norm %.6g\n",
                result.final_update_norm, result.psi1_norm);
    model = std::move(result.model);
  } else {
    tgp::NoiseGrid grid = args.algorithm == "ncfd"
                              ? tgp::NoiseGrid(hp.sigma_max, hp.noise_levels)
                              : tgp::NoiseGrid::zero_only();
    tgp::SuffStats stats(basis, base, grid);
    stats.accumulate(data.rows);
    pass_seconds = seconds_since(t_start);
    if (args.algorithm == "fd") {
      model = tgp::fit_fd(stats, hp.lambda, args.solver.options());
    } else if (args.algorithm == "ncfd") {
      tgp::NoiseKernels kernels = tgp::NoiseKernels::compute(basis, grid);
      model = tgp::fit_ncfd(stats, kernels, hp.lambda, args.solver.options());
    } else {
      model = tgp::fit_fvpd(stats, hp.lambda, hp.eta, args.solver.options());
    }
  }
  const double solve_seconds = seconds_since(t_start) - pass_seconds;

  if (data.centered) model = model->with_centering_offset(data.centering_offset);
  tgp::save_model(*model, args.out_path);
  std::printf("fit %s n %lld d %d S %d pass_seconds %.3f solve_seconds %.3f\n",
              args.algorithm.c_str(), static_cast<long long>(data.n()),
              data.dim(), hp.feature_count, pass_seconds, solve_seconds);
  return 0;
}

struct SampleArgs {
  std::string model_path;
  std::string out_path;
  Eigen::Index count = 1000;
  Eigen::Index proposal_count = 250000;
  std::uint64_t seed = 0;
  std::string delimiter = ",";
  bool weighted = false;
};

int run_sample(const SampleArgs& args) {
  if (args.delimiter.size() != 1)
    throw tgp::ConfigError("delimiter must be a single character");
  if (args.count < 1) throw tgp::ConfigError("sample count must be >= 1");
  tgp::TgpModel model = tgp::load_model(args.model_path);
  if (args.weighted) {
    tgp::WeightedSampleSet set =
        tgp::draw_weighted(model, args.count, args.seed);
    Eigen::VectorXd weights = set.normalized();
    tgp::write_delimited(args.out_path, set.points, args.delimiter[0],
                         &weights);
  } else {
    tgp::WeightedSampleSet set =
        tgp::draw_weighted(model, args.proposal_count, args.seed);
    Eigen::MatrixXd points =
        tgp::resample(set, args.count, tgp::splitmix64(args.seed + 1));
    tgp::write_delimited(args.out_path, points, args.delimiter[0]);
  }
  return 0;
}

struct EvalArgs {
  std::string data_path;
  std::string model_path;
  std::string out_path;
  std::string kde;  // "", "exact", "rff"
  IngestFlags ingest;
  tgp::EvalConfig config;
  double gamma = 0.0;
  int feature_count = 1000;
};

int run_eval(const EvalArgs& args, bool gamma_set) {
  if (args.model_path.empty() == args.kde.empty())
    throw tgp::ConfigError("choose exactly one of --model and --kde");
  // Models carry their own centering offset, so data stays in original
  // coordinates here.
  tgp::Dataset data = tgp::ingest(args.data_path, args.ingest.options(false));

  std::optional<tgp::TgpModel> model;
  std::optional<tgp::KdeBaseline> kde;
  std::optional<tgp::EvalDensity> density;
  if (!args.model_path.empty()) {
    model = tgp::load_model(args.model_path);
    if (model->dim() != data.dim())
      throw tgp::ConfigError("model and data dimensions differ");
    density = tgp::eval_density(*model);
  } else {
    double gamma = gamma_set ? args.gamma
                             : tgp::default_hyperparams(data).gamma;
    if (args.kde == "rff") {
      tgp::RffBasis basis = tgp::RffBasis::sample(
          data.dim(), args.feature_count, gamma,
          tgp::FrequencyCovariance::identity(data.dim()), args.config.seed);
      kde.emplace(data.rows, gamma, basis);
    } else {
      kde.emplace(data.rows, gamma);
    }
    density = kde->as_eval_density();
  }

  tgp::EvalReport report =
      tgp::random_projection_eval(*density, data.rows, args.config);
  tgp::write_report(report, args.out_path);
  std::printf(
      "eval directions %d median_ks %.6g mean_ks %.6g median_wd %.6g "
      "mean_wd %.6g clamped %lld\n",
      args.config.n_directions, report.median_ks, report.mean_ks,
      report.median_wd, report.mean_wd,
      static_cast<long long>(report.clamped_negative));
  return 0;
}

struct PlotArgs {
  std::string model_path;
  std::string out_path;
  std::vector<double> bounds;  // xmin xmax ymin ymax
  int nx = 100;
  int ny = 100;
  double sigma = 0.0;
  std::string delimiter = ",";
};

int run_plotdata(const PlotArgs& args) {
  if (args.delimiter.size() != 1)
    throw tgp::ConfigError("delimiter must be a single character");
  if (args.nx < 2 || args.ny < 2)
    throw tgp::ConfigError("plot resolution must be >= 2 per axis");
  tgp::TgpModel model = tgp::load_model(args.model_path);
  if (model.dim() != 2)
    throw tgp::ConfigError("plotdata requires a 2-dimensional model");

  if (args.sigma != 0.0) {
    const auto& grid = model.meta().sigma_grid;
    bool on_grid = false;
    for (double level : grid)
      if (std::abs(level - args.sigma) <= 1e-12 * std::max(1.0, level))
        on_grid = true;
    if (!on_grid) {
      std::string levels;
      for (double level : grid) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), " %.17g", level);
        levels += buf;
      }
      throw tgp::ConfigError("sigma is not on the model's noise grid; valid:" +
                             levels);
    }
  }

  double xmin, xmax, ymin, ymax;
  if (!args.bounds.empty()) {
    if (args.bounds.size() != 4)
      throw tgp::ConfigError("--bounds takes xmin xmax ymin ymax");
    xmin = args.bounds[0];
    xmax = args.bounds[1];
    ymin = args.bounds[2];
    ymax = args.bounds[3];
    if (!(xmin < xmax) || !(ymin < ymax))
      throw tgp::ConfigError("bounds must satisfy min < max per axis");
  } else {
    const auto smoothed = model.base().smoothed(args.sigma);
    Eigen::VectorXd center = model.base().mu();
    if (model.meta().centering_offset.size() == 2)
      center += model.meta().centering_offset;
    const double sx = std::sqrt(smoothed.covariance(0, 0));
    const double sy = std::sqrt(smoothed.covariance(1, 1));
    xmin = center(0) - 3.0 * sx;
    xmax = center(0) + 3.0 * sx;
    ymin = center(1) - 3.0 * sy;
    ymax = center(1) + 3.0 * sy;
  }

  Eigen::MatrixXd out(static_cast<Eigen::Index>(args.nx) * args.ny, 3);
  Eigen::MatrixXd points(args.nx, 2);
  Eigen::Index row = 0;
  for (int j = 0; j < args.ny; ++j) {
    const double y = ymin + (ymax - ymin) * j / (args.ny - 1);
    for (int i = 0; i < args.nx; ++i) {
      points(i, 0) = xmin + (xmax - xmin) * i / (args.nx - 1);
      points(i, 1) = y;
    }
    Eigen::VectorXd values =
        model.log_unnorm_density_block(points, args.sigma);
    for (int i = 0; i < args.nx; ++i, ++row) {
      out(row, 0) = points(i, 0);
      out(row, 1) = points(i, 1);
      out(row, 2) = values(i);
    }
  }
  tgp::write_delimited(args.out_path, out, args.delimiter[0]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GP-tilted density estimation with random Fourier features"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker threads (default: TGP_THREADS env var, else 1)");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a density model");
  fit_cmd->add_option("data", fit.data_path, "Delimited data file")->required();
  fit_cmd->add_option("-o,--out", fit.out_path, "Model output file")
      ->required();
  fit_cmd->add_option("-a,--algo", fit.algorithm, "map, fd, ncfd, or fvpd")
      ->required()
      ->check(CLI::IsMember({"map", "fd", "ncfd", "fvpd"}));
  fit.ingest.attach(fit_cmd);
  fit.solver.attach(fit_cmd);
  fit_cmd->add_flag("--no-center", fit.no_center,
                    "Skip centering the data at ingestion");
  fit_cmd->add_flag("--anisotropic", fit.anisotropic,
                    "Draw frequencies from the scaled data covariance");
  CLI::Option* gamma_opt =
      fit_cmd->add_option("--gamma", fit.gamma, "Kernel bandwidth");
  fit_cmd->add_option("--lambda", fit.lambda, "Ridge strength");
  fit_cmd->add_option("--S", fit.feature_count, "Feature count");
  CLI::Option* sigma_max_opt = fit_cmd->add_option(
      "--sigma-max", fit.sigma_max, "Largest noise level (ncfd)");
  fit_cmd->add_option("--H", fit.noise_levels, "Noise level count (ncfd)");
  CLI::Option* eta_opt =
      fit_cmd->add_option("--eta", fit.eta, "Prior scale (fvpd)");
  fit_cmd->add_option("--seed", fit.seed, "RNG seed");
  fit_cmd->add_option("--rho", fit.rho, "Gradient step size (map)");
  fit_cmd->add_option("--iters", fit.iterations, "Iteration count (map)");
  fit_cmd->add_option("--mc-samples", fit.mc_samples,
                      "Monte-Carlo sample count (map)");

  SampleArgs sample;
  CLI::App* sample_cmd =
      app.add_subcommand("sample", "Draw points from a fitted model");
  sample_cmd->add_option("model", sample.model_path, "Model file")->required();
  sample_cmd->add_option("-o,--out", sample.out_path, "Sample output file")
      ->required();
  sample_cmd->add_option("-k,--count", sample.count, "Points to draw");
  sample_cmd->add_option("--ns", sample.proposal_count,
                         "Proposal draws behind the resampling");
  sample_cmd->add_option("--seed", sample.seed, "RNG seed");
  sample_cmd->add_option("--delimiter", sample.delimiter, "Output delimiter");
  sample_cmd->add_flag("--weighted", sample.weighted,
                       "Export weighted proposal points with a weight column");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Compare a density against data along random projections");
  eval_cmd->add_option("data", eval.data_path, "Delimited data file")
      ->required();
  eval_cmd->add_option("-o,--out", eval.out_path, "Report output file")
      ->required();
  eval_cmd->add_option("-m,--model", eval.model_path, "Model file");
  eval_cmd->add_option("--kde", eval.kde, "KDE baseline: exact or rff")
      ->check(CLI::IsMember({"exact", "rff"}));
  eval.ingest.attach(eval_cmd);
  eval_cmd->add_option("--directions", eval.config.n_directions,
                       "Random projection count");
  eval_cmd->add_option("--grid", eval.config.grid_points,
                       "CDF grid resolution");
  eval_cmd->add_option("--ns", eval.config.n_samples,
                       "Importance sample count");
  eval_cmd->add_option("--seed", eval.config.seed, "RNG seed");
  CLI::Option* eval_gamma_opt =
      eval_cmd->add_option("--gamma", eval.gamma, "KDE bandwidth");
  eval_cmd->add_option("--S", eval.feature_count, "Feature count (kde rff)");

  PlotArgs plot;
  CLI::App* plot_cmd = app.add_subcommand(
      "plotdata", "Export a log-density grid of a 2D model");
  plot_cmd->add_option("model", plot.model_path, "Model file")->required();
  plot_cmd->add_option("-o,--out", plot.out_path, "Grid output file")
      ->required();
  plot_cmd->add_option("--bounds", plot.bounds,
                       "xmin xmax ymin ymax (default: base mean +/- 3 sd)")
      ->expected(4);
  plot_cmd->add_option("--nx", plot.nx, "Grid columns");
  plot_cmd->add_option("--ny", plot.ny, "Grid rows");
  plot_cmd->add_option("--sigma", plot.sigma, "Noise level (ncfd models)");
  plot_cmd->add_option("--delimiter", plot.delimiter, "Output delimiter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    apply_thread_count(threads);
    if (fit_cmd->parsed())
      return run_fit(fit, gamma_opt->count() > 0, sigma_max_opt->count() > 0,
                     eta_opt->count() > 0);
    if (sample_cmd->parsed()) return run_sample(sample);
    if (eval_cmd->parsed()) return run_eval(eval, eval_gamma_opt->count() > 0);
    if (plot_cmd->parsed()) return run_plotdata(plot);
  } catch (const tgp::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const tgp::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const tgp::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
