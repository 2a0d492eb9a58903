#pragma once

// JSON encodings of models, configurations, solutions, classifications and
// verification reports. Field order is fixed; doubles are written as the
// shortest decimal that round-trips through binary64.
//
// Model:
//   {"components":[{"kind":"cusp"} | {"kind":"collar","area":A} | {"kind":"collar","genus":g}],
//    "pairs":[{"i":0,"j":1,"constant":K}],
//    "self":[{"index":0,"bound":B}]}
// Configuration: {"values":[...]} (a bare array is also accepted on input).
// Solution: {"method":..., "total":..., "config":[...],
//            "active_set":[{"kind":"pair","i":0,"j":1} | {"kind":"self","index":0}]}

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "periph/model.hpp"
#include "periph/optimize.hpp"
#include "periph/oracle.hpp"

namespace periph::io {

using Json = nlohmann::ordered_json;

/// Malformed JSON or a document that does not follow the schema.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Serializes with shortest round-trip doubles; indent < 0 gives one line.
std::string dump(const Json& value, int indent = -1);

Json to_json(const PeripheralModel& model);
PeripheralModel model_from_json(const Json& doc);
PeripheralModel parse_model(const std::string& text);
std::string dump_model(const PeripheralModel& model);

Json to_json(const Configuration& config);
Configuration config_from_json(const Json& doc);
/// Comma-separated values in component order, e.g. "0.5,1.2".
Configuration parse_config_list(const std::string& text);

Json to_json(const ConstraintOrigin& origin);
ConstraintOrigin origin_from_json(const Json& doc);

Json to_json(const Solution& solution);
Solution solution_from_json(const Json& doc);

Json to_json(const ProbeResult& probe);
Json to_json(const Classification& classification);

Json to_json(const oracle::VerificationReport& report);

/// Reads a whole file; throws FormatError if it cannot be opened.
std::string read_file(const std::string& path);
/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace periph::io
