#include "amoment/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "amoment/parallel.hpp"
#include "amoment/sampling.hpp"

namespace amoment {

StudyConfig desk_preset() {
  StudyConfig cfg;
  cfg.n = 50;
  cfg.epsilon = 1e-4;
  cfg.N_min_values = {20};
  cfg.N_values = {10, 50, 100, 500};
  cfg.replications = 10;
  return cfg;
}

StudyConfig paper_preset() {
  StudyConfig cfg;
  cfg.n = 500;
  cfg.epsilon = 1e-4;
  cfg.N_min_values = {50, 200, 400, 550};
  cfg.N_values = {10, 50, 100, 500, 1000};
  cfg.replications = 10;
  return cfg;
}

namespace {

struct Cell {
  int N, N_min, replication, N_total;
};

StudyRow run_cell(const StudyConfig& cfg, const TargetFunction& f,
                  const Measure& measure, const Cell& cell, std::uint64_t cell_seed) {
  const auto t0 = std::chrono::steady_clock::now();

  Matrix X;
  bool feasible = false;
  for (int attempt = 0; attempt < cfg.center_resample_attempts; ++attempt) {
    X = sample_centers(measure, cell.N, derive_seed(cell_seed, 0xCE11, attempt));
    if (is_feasible_radius(X, measure.domain(), cfg.epsilon)) {
      feasible = true;
      break;
    }
  }
  if (!feasible)
    throw std::runtime_error(
        "run_study: epsilon infeasible for sampled centers after " +
        std::to_string(cfg.center_resample_attempts) + " attempts (N=" +
        std::to_string(cell.N) + ")");

  SampleDesign design =
      sample_neighbors(X, cfg.epsilon, cell.N_total, measure,
                       NeighborMode::locally_uniform, derive_seed(cell_seed, 0xDE51, 0));
  design.min_count = cell.N_min;

  MomentEstimate est;
  switch (cfg.estimator) {
    case EstimatorKind::oracle:
      est = oracle_estimate(f, X, cell_seed);
      break;
    case EstimatorKind::naive:
      est = naive_estimate(f, design);
      break;
    case EstimatorKind::debiased:
      est = debiased_estimate(f, design);
      break;
    case EstimatorKind::ideal_debiased:
      est = ideal_debiased_estimate(f, design);
      break;
  }

  const Matrix& truth = *f.second_moment;
  StudyRow row;
  row.N = cell.N;
  row.N_min = cell.N_min;
  row.N_total = cell.N_total;
  row.replication = cell.replication;
  row.rel_error = (est.matrix - truth).norm() / truth.norm();
  row.seed = cell_seed;
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

std::vector<StudyRow> run_study(const StudyConfig& cfg, const TargetFunction& f) {
  if (!f.second_moment)
    throw std::invalid_argument("run_study: target needs an analytic second moment");
  if (cfg.replications < 1 || !(cfg.epsilon > 0.0))
    throw std::invalid_argument("run_study: invalid configuration");
  for (int v : cfg.N_values)
    if (v < 1) throw std::invalid_argument("run_study: N values must be positive");
  for (int v : cfg.N_min_values)
    if (v < 1) throw std::invalid_argument("run_study: N_min values must be positive");

  const Measure measure = Measure::uniform(Domain::hypercube(cfg.n));

  std::vector<Cell> cells;
  for (int N_min : cfg.N_min_values)
    for (int N : cfg.N_values)
      for (int rep = 0; rep < cfg.replications; ++rep) {
        const int N_total =
            static_cast<int>(std::llround(cfg.budget_factor * N * N_min));
        cells.push_back({N, N_min, rep, N_total});
      }

  std::vector<StudyRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  parallel_for(static_cast<int>(cells.size()), cfg.threads, [&](int i) {
    try {
      const std::uint64_t cell_seed = derive_seed(cfg.seed, stream_tag::study_cell, i);
      rows[i] = run_cell(cfg, f, measure, cells[i], cell_seed);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::sort(rows.begin(), rows.end(), [](const StudyRow& a, const StudyRow& b) {
    if (a.N != b.N) return a.N < b.N;
    if (a.N_min != b.N_min) return a.N_min < b.N_min;
    return a.replication < b.replication;
  });
  return rows;
}

LineFit fit_slope(const std::vector<StudyRow>& rows) {
  std::map<int, ScalarMoments> by_total;
  for (const StudyRow& r : rows) by_total[r.N_total].add(r.rel_error);
  if (by_total.size() < 2)
    throw std::invalid_argument("fit_slope: need at least two distinct N_total values");
  std::vector<double> x, y;
  for (const auto& [total, acc] : by_total) {
    if (!(acc.mean() > 0.0))
      throw std::invalid_argument("fit_slope: zero mean error leaves log undefined");
    x.push_back(std::log10(static_cast<double>(total)));
    y.push_back(std::log10(acc.mean()));
  }
  return ols_fit(x, y);
}

std::string rows_to_csv(const std::vector<StudyRow>& rows) {
  std::string out = "N,N_min,N_total,replication,rel_error,seed\n";
  char line[160];
  for (const StudyRow& r : rows) {
    std::snprintf(line, sizeof(line), "%d,%d,%d,%d,%.17g,%llu\n", r.N, r.N_min,
                  r.N_total, r.replication, r.rel_error,
                  static_cast<unsigned long long>(r.seed));
    out += line;
  }
  return out;
}

std::vector<StudyRow> rows_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "N,N_min,N_total,replication,rel_error,seed")
    throw std::invalid_argument("rows_from_csv: missing or unexpected header");
  std::vector<StudyRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    StudyRow r;
    unsigned long long seed = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%lg,%llu", &r.N, &r.N_min, &r.N_total,
                    &r.replication, &r.rel_error, &seed) != 6)
      throw std::invalid_argument("rows_from_csv: malformed row: " + line);
    r.seed = seed;
    rows.push_back(r);
  }
  return rows;
}

void emit_plot_data(const std::vector<StudyRow>& rows, const std::string& csv_path,
                    const std::string& plot_spec_path) {
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("emit_plot_data: cannot open " + csv_path);
    csv << rows_to_csv(rows);
    if (!csv) throw std::runtime_error("emit_plot_data: write failed for " + csv_path);
  }

  nlohmann::json spec;
  spec["x_axis"] = {{"field", "N_total"}, {"scale", "log10"}};
  spec["y_axis"] = {{"field", "rel_error"}, {"scale", "log10"}};
  spec["reference_slope"] = -0.5;
  if (!rows.empty()) {
    try {
      const LineFit fit = fit_slope(rows);
      spec["fit"] = {{"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"residual", fit.residual}};
    } catch (const std::invalid_argument&) {
      // single-budget studies carry no overall fit
    }
    std::map<int, std::vector<StudyRow>> by_min;
    for (const StudyRow& r : rows) by_min[r.N_min].push_back(r);
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& [N_min, group_rows] : by_min) {
      nlohmann::json g;
      g["N_min"] = N_min;
      try {
        const LineFit fit = fit_slope(group_rows);
        g["fit"] = {{"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"residual", fit.residual}};
      } catch (const std::invalid_argument&) {
      }
      groups.push_back(g);
    }
    spec["groups"] = groups;
  }
  std::ofstream js(plot_spec_path, std::ios::binary);
  if (!js) throw std::runtime_error("emit_plot_data: cannot open " + plot_spec_path);
  js << spec.dump(2) << "\n";
  if (!js) throw std::runtime_error("emit_plot_data: write failed for " + plot_spec_path);
}

}  // namespace amoment
