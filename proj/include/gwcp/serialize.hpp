#pragma once

#include <string>

#include "json.hpp"

#include "gwcp/bounds.hpp"
#include "gwcp/cp.hpp"
#include "gwcp/mc.hpp"

namespace gwcp {

using Json = nlohmann::ordered_json;

/// Distribution descriptor:
///   {"type":"explicit","p":{"4":0.5,"6":0.5}}
///   {"type":"geometric","mean":1.5}
///   {"type":"degenerate","d":4}
/// Geometric descriptors yield reproduction laws (they put mass on 0) and are
/// rejected wherever a tree law is required.
OffspringDistribution dist_from_json(const Json& j);
OffspringDistribution dist_from_json_text(const std::string& text);
OffspringDistribution dist_from_json_file(const std::string& path);  // IoError on failure
Json dist_to_json(const OffspringDistribution& d);

Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);
Json certificate_check_to_json(const CertificateCheck& c);
Json refined_bound_to_json(const RefinedUpperBound& b);
Json block_expectation_to_json(const BlockExpectation& b);
Json bound_report_to_json(const BoundReport& r);
Json survival_estimate_to_json(const SurvivalEstimate& e);
Json bisect_result_to_json(const BisectResult& r);

std::string csv_double(double v);  // shortest round-trip decimal form

}  // namespace gwcp
