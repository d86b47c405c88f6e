// Command-line front end: convergence studies, one-shot estimates, the
// statistical verification suite and subspace reports.

#include <CLI11.hpp>
#include <iostream>

#include "amoment/io.hpp"
#include "amoment/parallel.hpp"

namespace {

using namespace amoment;

constexpr int kExitSuccess = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInvalidConfig = 2;

TargetFunction load_or_generate_quadratic(const std::string& path, int n,
                                          std::uint64_t seed) {
  if (!path.empty()) return quadratic_from_json(load_json_file(path));
  return make_quadratic(random_symmetric(n, derive_seed(seed, 0xF00D, 0)),
                        random_vector(n, derive_seed(seed, 0xF00D, 1)));
}

Matrix feasible_centers(const Measure& measure, int N, double epsilon,
                        std::uint64_t seed, int attempts) {
  for (int a = 0; a < attempts; ++a) {
    Matrix X = sample_centers(measure, N, derive_seed(seed, 0xCE11, a));
    if (is_feasible_radius(X, measure.domain(), epsilon)) return X;
  }
  throw std::invalid_argument("epsilon is infeasible for the sampled centers; "
                              "reduce epsilon or the number of centers");
}

int run_study_command(const std::string& config_path, const std::string& preset,
                      const std::string& function_path, const std::string& out_csv,
                      const std::string& out_spec, std::uint64_t seed, bool seed_set,
                      int threads) {
  StudyConfig cfg;
  if (!config_path.empty())
    cfg = config_from_json(load_json_file(config_path));
  else if (preset == "desk")
    cfg = desk_preset();
  else if (preset == "paper")
    cfg = paper_preset();
  else
    throw std::invalid_argument("study needs --config or --preset desk|paper");
  if (seed_set) cfg.seed = seed;
  cfg.threads = threads;

  const TargetFunction f = load_or_generate_quadratic(function_path, cfg.n, cfg.seed);
  if (f.dimension() != cfg.n)
    throw std::invalid_argument("function dimension does not match the study config");

  const std::vector<StudyRow> rows = run_study(cfg, f);
  if (!out_csv.empty() || !out_spec.empty()) {
    emit_plot_data(rows, out_csv.empty() ? "rows.csv" : out_csv,
                   out_spec.empty() ? "plot.json" : out_spec);
  }
  const LineFit fit = fit_slope(rows);
  std::cout << "rows: " << rows.size() << "\n";
  std::cout << "fitted slope: " << fit.slope << " (intercept " << fit.intercept
            << ", residual " << fit.residual << ")\n";
  return kExitSuccess;
}

int run_estimate_command(const std::string& function_path, int n_centers, int n_min,
                         double epsilon, long long n_total, const std::string& kind,
                         const std::string& matrix_out, std::uint64_t seed, int threads) {
  const TargetFunction f = quadratic_from_json(load_json_file(function_path));
  const Measure measure = Measure::uniform(Domain::hypercube(f.dimension()));
  const EstimatorKind ekind = estimator_kind_from_string(kind);

  const Matrix X = feasible_centers(measure, n_centers, epsilon, seed, 100);
  MomentEstimate est;
  if (ekind == EstimatorKind::oracle) {
    est = oracle_estimate(f, X, seed);
  } else {
    if (n_total <= 0) n_total = 2LL * n_centers * n_min;
    SampleDesign design = sample_neighbors(X, epsilon, static_cast<int>(n_total),
                                           measure, NeighborMode::locally_uniform,
                                           derive_seed(seed, 0xDE51, 0), threads);
    design.min_count = n_min;
    DebiasOptions options;
    options.threads = threads;
    switch (ekind) {
      case EstimatorKind::naive:
        est = naive_estimate(f, design, threads);
        break;
      case EstimatorKind::debiased:
        est = debiased_estimate(f, design, options);
        break;
      case EstimatorKind::ideal_debiased:
        est = ideal_debiased_estimate(f, design, options);
        break;
      default:
        break;
    }
  }

  if (!matrix_out.empty()) save_json_file(to_json(est), matrix_out);
  std::cout << "estimator: " << to_string(est.kind) << ", included centers "
            << est.included_centers << "/" << est.N << "\n";
  if (f.second_moment) {
    const double abs_err = (est.matrix - *f.second_moment).norm();
    std::cout << "absolute error (Frobenius): " << abs_err << "\n";
    std::cout << "relative error: " << abs_err / f.second_moment->norm() << "\n";
    if (f.gradient_bound)
      std::cout << "error / L_f^2: "
                << abs_err / (*f.gradient_bound * *f.gradient_bound) << "\n";
  }
  std::cout << "function evaluations: " << eval_count(f) << "\n";
  return kExitSuccess;
}

int run_verify_command(const std::string& only, const std::string& json_out,
                       std::uint64_t seed, int threads) {
  std::vector<RegisteredCheck> selected;
  for (const RegisteredCheck& check : standard_checks()) {
    if (!only.empty()) {
      bool wanted = false;
      std::stringstream ss(only);
      std::string token;
      while (std::getline(ss, token, ','))
        if (!token.empty() && check.name.rfind(token, 0) == 0) wanted = true;
      if (!wanted) continue;
    }
    selected.push_back(check);
  }
  if (selected.empty()) throw std::invalid_argument("no checks match --only");

  std::vector<CheckResult> results(selected.size());
  std::vector<std::exception_ptr> errors(selected.size());
  parallel_for(static_cast<int>(selected.size()), threads, [&](int i) {
    try {
      results[i] = selected[i].run(derive_seed(seed, 0x5e1f, i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  json out = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const CheckResult& r = results[i];
    out.push_back(to_json(r));
    const bool expected = !selected[i].negative_control;
    const bool as_expected = r.passed == expected;
    if (!as_expected) ok = false;
    std::cerr << (as_expected ? "[ OK ] " : "[FAIL] ") << selected[i].name
              << (selected[i].negative_control ? " (negative control, must fail)" : "")
              << ": statistic " << r.statistic << " vs threshold " << r.threshold
              << "\n";
  }
  if (json_out.empty() || json_out == "-")
    std::cout << out.dump(2) << "\n";
  else
    save_json_file(out, json_out);
  return ok ? kExitSuccess : kExitCheckFailure;
}

int run_subspace_command(const std::string& function_path, int r, int n_centers,
                         int n_min, double epsilon, const std::string& kind,
                         const std::string& report_out, std::uint64_t seed,
                         int threads) {
  const TargetFunction f = quadratic_from_json(load_json_file(function_path));
  const Measure measure = Measure::uniform(Domain::hypercube(f.dimension()));
  if (r < 1 || r >= f.dimension())
    throw std::invalid_argument("subspace needs 1 <= r < n");

  const EstimatorKind ekind = estimator_kind_from_string(kind);
  const Matrix X = feasible_centers(measure, n_centers, epsilon, seed, 100);
  MomentEstimate est;
  if (ekind == EstimatorKind::oracle) {
    est = oracle_estimate(f, X, seed);
  } else {
    SampleDesign design = sample_neighbors(X, epsilon, 2 * n_centers * n_min, measure,
                                           NeighborMode::locally_uniform,
                                           derive_seed(seed, 0xDE51, 0), threads);
    design.min_count = n_min;
    est = ekind == EstimatorKind::naive ? naive_estimate(f, design, threads)
                                        : debiased_estimate(f, design);
  }

  const ActiveSubspace as = eigendecompose(est, r);
  SubspaceReport report;
  report.eigenvalues = as.eigenvalues;
  report.r = r;
  report.eigen_gap = as.eigenvalues[r - 1] - as.eigenvalues[r];
  // recovery angle against the leading-r eigenspace of the analytic moment
  const SymmetricEigen truth = symmetric_eigendecompose(*f.second_moment);
  report.principal_angles_rad = principal_angles(as.basis, truth.vectors.leftCols(r));
  report.principal_angle_rad = report.principal_angles_rad[r - 1];

  const json j = to_json(report);
  if (!report_out.empty()) save_json_file(j, report_out);
  std::cout << j.dump(2) << "\n";
  return kExitSuccess;
}

int run_gen_function_command(int n, std::uint64_t seed, const std::string& out) {
  if (n < 1) throw std::invalid_argument("gen-function needs n >= 1");
  const Matrix A = random_symmetric(n, derive_seed(seed, 0xF00D, 0));
  const Vector b = random_vector(n, derive_seed(seed, 0xF00D, 1));
  const json j = quadratic_to_json(A, b);
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << "\n";
  else
    save_json_file(j, out);
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"second-moment matrix estimation from point samples"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* study = app.add_subcommand("study", "run a convergence study grid");
  std::string study_config, study_preset, study_function, study_csv, study_spec;
  std::uint64_t study_seed = 0;
  bool study_seed_set = false;
  study->add_option("--config", study_config, "study config JSON");
  study->add_option("--preset", study_preset, "desk or paper grid")
      ->check(CLI::IsMember({"desk", "paper"}));
  study->add_option("--function", study_function, "quadratic instance JSON");
  study->add_option("--out", study_csv, "CSV output path");
  study->add_option("--plot-spec", study_spec, "plot spec JSON path");
  study->add_option("--seed", study_seed, "study seed")
      ->each([&study_seed_set](const std::string&) { study_seed_set = true; });

  auto* estimate = app.add_subcommand("estimate", "one-shot moment estimate");
  std::string est_function, est_kind = "debiased", est_matrix_out;
  int est_centers = 10, est_min = 10;
  long long est_total = 0;
  double est_eps = 1e-4;
  std::uint64_t est_seed = 0;
  estimate->add_option("--function", est_function, "quadratic instance JSON")->required();
  estimate->add_option("--n-centers", est_centers, "number of centers")->required();
  estimate->add_option("--n-min", est_min, "per-center inclusion threshold")->required();
  estimate->add_option("--epsilon", est_eps, "neighborhood radius")->required();
  estimate->add_option("--n-total", est_total, "neighbor budget (default 2*N*N_min)");
  estimate->add_option("--estimator", est_kind, "oracle|naive|debiased|ideal_debiased");
  estimate->add_option("--matrix-out", est_matrix_out, "estimate JSON output");
  estimate->add_option("--seed", est_seed, "seed");

  auto* verify = app.add_subcommand("verify", "run the statistical check suite");
  std::string verify_only, verify_json;
  std::uint64_t verify_seed = 0x5eedULL;
  verify->add_option("--only", verify_only, "comma-separated check name prefixes");
  verify->add_option("--json", verify_json, "JSON output path (default stdout)");
  verify->add_option("--seed", verify_seed, "base seed");

  auto* subspace = app.add_subcommand("subspace", "active-subspace recovery report");
  std::string sub_function, sub_kind = "debiased", sub_out;
  int sub_r = 1, sub_centers = 50, sub_min = 10;
  double sub_eps = 1e-4;
  std::uint64_t sub_seed = 0;
  subspace->add_option("--function", sub_function, "quadratic instance JSON")->required();
  subspace->add_option("--r", sub_r, "subspace dimension")->required();
  subspace->add_option("--n-centers", sub_centers, "number of centers");
  subspace->add_option("--n-min", sub_min, "per-center inclusion threshold");
  subspace->add_option("--epsilon", sub_eps, "neighborhood radius");
  subspace->add_option("--estimator", sub_kind, "oracle|naive|debiased");
  subspace->add_option("--report-out", sub_out, "report JSON output");
  subspace->add_option("--seed", sub_seed, "seed");

  auto* gen = app.add_subcommand("gen-function", "write a seeded random quadratic");
  int gen_n = 10;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "dimension")->required();
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // lets --threads appear after the subcommand as well
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidConfig;
  }

  try {
    if (study->parsed())
      return run_study_command(study_config, study_preset, study_function, study_csv,
                               study_spec, study_seed, study_seed_set, threads);
    if (estimate->parsed())
      return run_estimate_command(est_function, est_centers, est_min, est_eps,
                                  est_total, est_kind, est_matrix_out, est_seed,
                                  threads);
    if (verify->parsed())
      return run_verify_command(verify_only, verify_json, verify_seed, threads);
    if (subspace->parsed())
      return run_subspace_command(sub_function, sub_r, sub_centers, sub_min, sub_eps,
                                  sub_kind, sub_out, sub_seed, threads);
    if (gen->parsed()) return run_gen_function_command(gen_n, gen_seed, gen_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  return kExitSuccess;
}
