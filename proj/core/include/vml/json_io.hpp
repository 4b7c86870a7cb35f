#pragma once

#include <string>

#include "json.hpp"
#include "vml/charfun.hpp"
#include "vml/free_measure.hpp"
#include "vml/kernel_qi.hpp"
#include "vml/linfun.hpp"
#include "vml/measure.hpp"
#include "vml/spectral.hpp"

namespace vml {

using Json = nlohmann::json;

// Throws ConfigError with the offending path on any failure.
Json load_json_file(const std::string& path);
void write_text_file_atomic(const std::string& path, const std::string& text);

// Descriptor schemas (documented in the README):
//   measure: {"kind":"product","label":..,"law":{...}}
//            {"kind":"circle","window":W,"convention":"complex"|"pairs"}
//   law:     {"type":"gaussian","sigma_rule":"1"} (or "sigma": number)
//            {"type":"rademacher"}
//            {"type":"uniform","half_width_rule":"1"} (or "half_width")
//            {"type":"custom","quantile_rule":"-log(1-u)"}   (vars u, n)
//   coeffs/shift: {"rule":"2^(-n)","label":..,
//                  "tail_sq_bound":"(4^(-n))/3","sq_partial_lower":"log(n+1)"}
//                 or {"basis":k,"scale":s}
//   chi:     {"form":"gaussian","scale":s}
//            {"form":"product","law":{...}} or {"form":"product","cf_rule":"cos(t)"}
//            {"form":"custom","tabulated":{"extent":L,"points":M,
//                                          "re_b64":..,"im_b64":..}}
Measure measure_from_json(const Json& j);
CoeffSeq coeffs_from_json(const Json& j);
ShiftVector shift_from_json(const Json& j);
PdFunctional chi_from_json(const Json& j);
CircleFunction circle_function_from_json(const Json& j);
WeightRule weight_rule_from_string(const std::string& source);

Json to_json(const ConvergenceReport& r);
Json to_json(const CharFunEstimate& e);
Json to_json(const PsdReport& r);
Json to_json(const CameronMartinReport& r);
Json to_json(const HellingerReport& r);
Json to_json(const QiReport& r);
Json to_json(const ReconstructionReport& r);
Json to_json(const FreenessTable& t);
Json to_json(const TightnessReport& r);
Json to_json(const ConsistencyReport& r);
Json to_json(const RealizeReport& r);

// Model persistence: gridded densities as base64 double arrays plus the
// original chi descriptor, so a verify pass can rebuild and re-check.
Json spectral_model_to_json(const SpectralModel& model, const Json& chi_descriptor);
SpectralModel spectral_model_from_json(const Json& j);

}  // namespace vml
