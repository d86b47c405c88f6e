#pragma once

#include <string>
#include <vector>

#include "amoment/estimators.hpp"
#include "amoment/stats.hpp"

namespace amoment {

// Convergence-study grid: every (N_min, N, replication) cell samples a
// design with N_total = round(budget_factor * N * N_min) neighbors and
// records the relative Frobenius error of the chosen estimator against the
// analytic second moment.
struct StudyConfig {
  int n = 50;
  double epsilon = 1e-4;
  std::vector<int> N_min_values{20};
  std::vector<int> N_values{10, 50, 100, 500};
  int replications = 10;
  double budget_factor = 2.0;
  EstimatorKind estimator = EstimatorKind::debiased;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  int center_resample_attempts = 100;
};

struct StudyRow {
  int N = 0;
  int N_min = 0;
  int N_total = 0;
  int replication = 0;
  double rel_error = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

// n=50 deskside grid; finishes in minutes.
StudyConfig desk_preset();
// The large n=500 grid with N_min in {50,200,400,550} and
// N in {10,50,100,500,1000}.
StudyConfig paper_preset();

// Runs the grid (cells in parallel, rows sorted by key). The target must
// carry an analytic second moment.
std::vector<StudyRow> run_study(const StudyConfig& cfg, const TargetFunction& f);

// OLS of log10(mean error per N_total) against log10(N_total).
LineFit fit_slope(const std::vector<StudyRow>& rows);

// CSV with header N,N_min,N_total,replication,rel_error,seed; floats at 17
// significant digits so parsing returns the exact doubles.
std::string rows_to_csv(const std::vector<StudyRow>& rows);
std::vector<StudyRow> rows_from_csv(const std::string& csv);

void emit_plot_data(const std::vector<StudyRow>& rows, const std::string& csv_path,
                    const std::string& plot_spec_path);

}  // namespace amoment
