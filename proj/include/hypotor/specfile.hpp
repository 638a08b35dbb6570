#pragma once

#include "hypotor/classify.hpp"
#include "hypotor/construct.hpp"

#include "json.hpp"

#include <map>
#include <string>
#include <vector>

namespace hypotor {

using Json = nlohmann::ordered_json;

enum class TaskKind { Classify, Scan, Witness, Fit, Approx, Construct, BaseGh };
std::string to_string(TaskKind k);

struct Task {
    std::string id;
    TaskKind kind = TaskKind::Classify;
    std::string op;  // operator id
    // budgets (mandatory per kind; no silent defaults)
    long r_max = 0;
    int j = 0;
    int cf_depth = 0;
    int truncation_depth = 0;
    Rat eps;
    long bound = 0;
    int n_max = 0;
    int grid = 0;
    bool require = false;  // none-within-budget becomes a failing exit
    std::optional<ExactComplex> z;  // approx target
};

struct SpecFile {
    std::string version;
    BasisPtr basis;
    std::map<std::string, OperatorSpec> operators;       // constant-coefficient
    std::map<std::string, TubeOperatorSpec> tubes;       // tube-type
    std::vector<std::string> operator_order;
    std::vector<Task> tasks;
};

/// Parses and validates a spec file. Exact numbers cross the boundary as
/// strings ("p/q", decimals, or coordinate objects over declared symbols);
/// bare JSON floats in decision positions are rejected.
SpecFile parse_spec_file(const std::string& path);
SpecFile parse_spec_json(const Json& j, const std::string& where = "spec");

/// Serialization back to the file format (round-trips exactly).
Json spec_to_json(const SpecFile& spec);

/// Exact number rendering for reports: coordinate map plus decimal hint.
Json exact_to_json(const ExactReal& x);
Json complex_to_json(const ExactComplex& z);

}  // namespace hypotor
