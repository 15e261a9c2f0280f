#pragma once

// JSON encodings used by the command-line tool. Complex numbers are [re, im],
// matrices row-major nested arrays of such pairs.

#include <string>

#include "cdil/dilation.hpp"
#include "cdil/varieties.hpp"
#include "json.hpp"

namespace cdil::io {

using json = nlohmann::ordered_json;

json to_json(cplx z);
json to_json(const ComplexMatrix& m);
json to_json(const DiskPoint& p);
json to_json(const BlaschkeProduct& b);
json to_json(const AtomicMeasure& mu);
json to_json(const AlgebraElement& e);
json to_json(const TestFunction& f);
json to_json(const BivariatePoly& p);
json to_json(const Tolerances& t);
json to_json(const GridResolution& g);
json to_json(const Certificate& c);
json to_json(const VerificationReport& r);
json to_json(const AnnihilatorBasis& basis);

cplx complex_from(const json& j);
ComplexMatrix matrix_from(const json& j);
DiskPoint disk_point_from(const json& j);
BlaschkeProduct blaschke_from(const json& j);
AtomicMeasure measure_from(const json& j);
PickProblem pick_problem_from(const json& j);

/// Inline JSON when the argument starts with '{' or '[', otherwise a file path.
/// Malformed input raises ValidationError with line and column.
json load(const std::string& arg);
/// Parses "re", "re,im" or "inf".
cplx parse_complex(const std::string& s);
DiskPoint parse_disk_point(const std::string& s);
/// "RxA".
GridResolution parse_grid(const std::string& s);

}  // namespace cdil::io
