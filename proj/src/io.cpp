#include "amoment/io.hpp"

#include <fstream>

namespace amoment {

namespace {

json matrix_rows(const Matrix& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("matrix: expected a non-empty array of rows");
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows[0].size());
  Matrix M(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      throw std::invalid_argument("matrix: ragged rows");
    for (int j = 0; j < c; ++j) M(i, j) = rows[i][j].get<double>();
  }
  return M;
}

Vector vector_from_json(const json& arr) {
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
  return v;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

json to_json(const SampleDesign& design) {
  json j;
  j["n"] = design.dimension();
  j["N"] = design.num_centers();
  j["epsilon"] = design.epsilon;
  j["seed"] = design.seed;
  j["centers"] = matrix_rows(design.centers);
  json neighbors = json::array();
  for (int c = 0; c < design.num_neighbors(); ++c) {
    json item;
    item["center_index"] = design.assignment[c];
    item["point"] = vector_to_json(design.neighbors.col(c));
    neighbors.push_back(std::move(item));
  }
  j["neighbors"] = std::move(neighbors);
  return j;
}

SampleDesign design_from_json(const json& j, int min_count) {
  SampleDesign d;
  const int n = j.at("n").get<int>();
  const int N = j.at("N").get<int>();
  d.epsilon = j.at("epsilon").get<double>();
  d.seed = j.at("seed").get<std::uint64_t>();
  d.centers = matrix_from_rows(j.at("centers"));
  if (d.centers.rows() != n || d.centers.cols() != N)
    throw std::invalid_argument("design_from_json: center matrix shape mismatch");
  const json& neighbors = j.at("neighbors");
  const int total = static_cast<int>(neighbors.size());
  d.neighbors.resize(n, total);
  d.assignment.resize(total);
  d.counts.assign(N, 0);
  for (int c = 0; c < total; ++c) {
    const int s = neighbors[c].at("center_index").get<int>();
    if (s < 0 || s >= N)
      throw std::invalid_argument("design_from_json: center index out of range");
    d.assignment[c] = s;
    d.neighbors.col(c) = vector_from_json(neighbors[c].at("point"));
    ++d.counts[s];
  }
  // Regroup columns by center in case the document interleaved them.
  d.offsets.assign(N + 1, 0);
  for (int s = 0; s < N; ++s) d.offsets[s + 1] = d.offsets[s] + d.counts[s];
  Matrix grouped(n, total);
  std::vector<int> grouped_assignment(total);
  std::vector<int> cursor(d.offsets.begin(), d.offsets.end() - 1);
  for (int c = 0; c < total; ++c) {
    const int s = d.assignment[c];
    grouped.col(cursor[s]) = d.neighbors.col(c);
    grouped_assignment[cursor[s]] = s;
    ++cursor[s];
  }
  d.neighbors = std::move(grouped);
  d.assignment = std::move(grouped_assignment);
  d.min_count = min_count;
  return d;
}

json to_json(const MomentEstimate& est) {
  json j;
  j["kind"] = to_string(est.kind);
  j["n"] = est.n;
  j["N"] = est.N;
  j["N_total"] = est.N_total;
  j["N_min"] = est.N_min;
  j["epsilon"] = est.epsilon;
  j["seed"] = est.seed;
  j["matrix"] = matrix_rows(est.matrix);
  return j;
}

MomentEstimate estimate_from_json(const json& j) {
  MomentEstimate est;
  est.kind = estimator_kind_from_string(j.at("kind").get<std::string>());
  est.n = j.at("n").get<int>();
  est.N = j.at("N").get<int>();
  est.N_total = j.at("N_total").get<int>();
  est.N_min = j.at("N_min").get<int>();
  est.epsilon = j.at("epsilon").get<double>();
  est.seed = j.at("seed").get<std::uint64_t>();
  est.matrix = matrix_from_rows(j.at("matrix"));
  if (est.matrix.rows() != est.n || est.matrix.cols() != est.n)
    throw std::invalid_argument("estimate_from_json: matrix shape mismatch");
  return est;
}

json to_json(const CheckResult& result) {
  json j;
  j["name"] = result.name;
  j["statistic"] = result.statistic;
  j["threshold"] = result.threshold;
  j["sigma_mc"] = result.sigma_mc;
  j["passed"] = result.passed;
  j["samples_used"] = result.samples_used;
  j["seed"] = result.seed;
  return j;
}

json to_json(const SubspaceReport& report) {
  json j;
  j["eigenvalues"] = vector_to_json(report.eigenvalues);
  j["r"] = report.r;
  j["principal_angle_rad"] = report.principal_angle_rad;
  j["principal_angles_rad"] = vector_to_json(report.principal_angles_rad);
  j["eigen_gap"] = report.eigen_gap;
  return j;
}

json quadratic_to_json(const Matrix& A, const Vector& b) {
  json j;
  j["A"] = matrix_rows(A);
  j["b"] = vector_to_json(b);
  return j;
}

TargetFunction quadratic_from_json(const json& j) {
  const Matrix A = matrix_from_rows(j.at("A"));
  const Vector b = vector_from_json(j.at("b"));
  return make_quadratic(A, b);
}

json to_json(const StudyConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["epsilon"] = cfg.epsilon;
  j["N_min_values"] = cfg.N_min_values;
  j["N_values"] = cfg.N_values;
  j["replications"] = cfg.replications;
  j["budget_factor"] = cfg.budget_factor;
  j["estimator"] = to_string(cfg.estimator);
  j["seed"] = cfg.seed;
  return j;
}

StudyConfig config_from_json(const json& j) {
  StudyConfig cfg;
  cfg.n = j.at("n").get<int>();
  cfg.epsilon = j.at("epsilon").get<double>();
  cfg.N_min_values = j.at("N_min_values").get<std::vector<int>>();
  cfg.N_values = j.at("N_values").get<std::vector<int>>();
  cfg.replications = j.at("replications").get<int>();
  if (j.contains("budget_factor")) cfg.budget_factor = j.at("budget_factor").get<double>();
  if (j.contains("estimator"))
    cfg.estimator = estimator_kind_from_string(j.at("estimator").get<std::string>());
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void save_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace amoment
