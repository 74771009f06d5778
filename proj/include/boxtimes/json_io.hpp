#pragma once

#include "boxtimes/pipeline.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace boxtimes {

using Json = nlohmann::json;

/// Scalars serialize as [re, im]; exact values as canonical rational strings
/// ("p/q"), floats as numbers. Round trips are bit-exact in exact mode.
Json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const Json& j);
Json exponent_to_json(const Exponent& e);
Exponent exponent_from_json(const Json& j);

Json series_to_json(const LogPowerSeries& s);
LogPowerSeries series_from_json(const Json& j);

Json system_to_json(const MatrixSeries& a);
MatrixSeries system_from_json(const Json& j);

Json solution_to_json(const FundamentalSolutionSet& f);

Json combination_to_json(const LinearCombination& lc);
Json quadruple_to_json(const BasisQuadruple& q);
BasisQuadruple quadruple_from_json(const Json& j);

Json assoc_report_to_json(const AssocReport& r);
Json pentagon_report_to_json(const PentagonReport& r);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

} // namespace boxtimes
