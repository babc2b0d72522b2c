#pragma once

#include "waylab/fixpt.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace waylab::scenario {

using json = nlohmann::ordered_json;

constexpr int kSchema = 1;

// Matrices are row-major nested arrays; each entry is [re, im] or a plain real number.
json to_json(const Mat& m);
json to_json(const Vec& v);
Mat matrix_from_json(const json& j, const std::string& where);
Vec vector_from_json(const json& j, const std::string& where);

// Deterministic serialization: ordered keys, floats as %.17g, NaN/inf as null.
std::string dump(const json& j);
std::string fnv1a_hex(const std::string& bytes);

struct RunResult {
    json report;
    int exit_code = 0;  // 0 ok, 1 violation, 2 input error
};

// Tolerance precedence: defaults < WAYLAB_TOL (in base) < scenario "tolerance" < override_eq_tol.
RunResult run(const json& scenario, const Tolerance& base, std::optional<double> override_eq_tol = std::nullopt);

// One CSV row per bound report.
std::string to_csv(const json& report);

using Params = std::map<std::string, std::string>;
std::vector<std::string> builtin_names();
json builtin(const std::string& name, const Params& params);

}  // namespace waylab::scenario
