#pragma once

#include <json.hpp>

#include "amoment/experiments.hpp"
#include "amoment/sampling.hpp"
#include "amoment/spectral.hpp"
#include "amoment/verify.hpp"

namespace amoment {

using json = nlohmann::json;

// {n, N, epsilon, seed, centers:[[...]], neighbors:[{center_index, point}]}
// with the n x N center matrix written row-major.
json to_json(const SampleDesign& design);
SampleDesign design_from_json(const json& j, int min_count = 1);

// {kind, n, N, N_total, N_min, epsilon, seed, matrix:[[...]]}
json to_json(const MomentEstimate& est);
MomentEstimate estimate_from_json(const json& j);

json to_json(const CheckResult& result);
json to_json(const SubspaceReport& report);

// Quadratic instances: {A:[[...]], b:[...]}; A row-major.
json quadratic_to_json(const Matrix& A, const Vector& b);
TargetFunction quadratic_from_json(const json& j);

json to_json(const StudyConfig& cfg);
StudyConfig config_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const json& j, const std::string& path);

}  // namespace amoment
