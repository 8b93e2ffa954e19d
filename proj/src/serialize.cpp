#include "gwcp/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "gwcp/error.hpp"

namespace gwcp {

OffspringDistribution dist_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type"))
    raise(Errc::BadInput, "distribution descriptor needs a \"type\" field");
  const std::string type = j.at("type").get<std::string>();
  if (type == "explicit") {
    if (!j.contains("p") || !j.at("p").is_object())
      raise(Errc::BadInput, "explicit descriptor needs \"p\": {k: prob}");
    std::map<int, double> probs;
    for (const auto& [key, value] : j.at("p").items()) {
      std::size_t pos = 0;
      int k;
      try {
        k = std::stoi(key, &pos);
      } catch (const std::exception&) {
        raise(Errc::BadInput, "non-integer support key \"" + key + "\"");
      }
      if (pos != key.size()) raise(Errc::BadInput, "non-integer support key \"" + key + "\"");
      probs[k] = value.get<double>();
    }
    return OffspringDistribution::from_map(probs);
  }
  if (type == "geometric") {
    if (!j.contains("mean")) raise(Errc::BadInput, "geometric descriptor needs \"mean\"");
    return OffspringDistribution::geometric_from_rate(j.at("mean").get<double>());
  }
  if (type == "degenerate") {
    if (!j.contains("d")) raise(Errc::BadInput, "degenerate descriptor needs \"d\"");
    return OffspringDistribution::degenerate(j.at("d").get<int>());
  }
  raise(Errc::BadInput, "unknown distribution type \"" + type + "\"");
}

OffspringDistribution dist_from_json_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) raise(Errc::BadInput, "malformed JSON distribution descriptor");
  return dist_from_json(j);
}

OffspringDistribution dist_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return dist_from_json_text(text);
}

Json dist_to_json(const OffspringDistribution& d) {
  Json p = Json::object();
  for (std::size_t i = 0; i < d.support().size(); ++i)
    p[std::to_string(d.support()[i])] = d.probabilities()[i];
  return Json{{"type", "explicit"},
              {"p", p},
              {"h_min", d.h_min()},
              {"mean", d.mean()},
              {"allows_zero", d.allows_zero()}};
}

Json certificate_to_json(const Certificate& c) {
  return Json{{"h_min", c.h_min}, {"nu", c.nu},   {"r", c.r},
              {"b", c.b},         {"c", c.c},     {"eps", c.eps},
              {"lambda", c.lambda()}};
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.h_min = j.at("h_min").get<int>();
  c.nu = j.at("nu").get<double>();
  c.r = j.at("r").get<double>();
  c.b = j.at("b").get<double>();
  c.c = j.at("c").get<double>();
  c.eps = j.value("eps", 1e-4);
  return c;
}

Json certificate_check_to_json(const CertificateCheck& c) {
  return Json{{"feasible", c.feasible},
              {"lhs1", c.lhs1},
              {"lhs2", c.lhs2},
              {"slack1", c.slack1},
              {"slack2", c.slack2}};
}

Json refined_bound_to_json(const RefinedUpperBound& b) {
  Json j{{"finite", b.finite}, {"provenance", "root-find: smallest lambda with E_X f(X,lambda) > 1"}};
  if (b.finite) {
    j["value"] = b.lambda;
    j["bracket"] = Json::array({b.bracket_lo, b.bracket_hi});
  } else {
    j["value"] = "inf";
  }
  return j;
}

Json block_expectation_to_json(const BlockExpectation& b) {
  Json j{{"I", b.i_factor}, {"II", b.ii_factor}, {"n", b.n}, {"value", b.value}};
  if (b.min_n_supercritical) j["min_n_supercritical"] = *b.min_n_supercritical;
  return j;
}

Json bound_report_to_json(const BoundReport& r) {
  Json j;
  j["h_min"] = r.h_min;
  j["lambda_brw_lower"] =
      Json{{"value", r.lambda_brw_lower}, {"provenance", "formula: (h_min+1)/(2*sqrt(h_min))"}};
  if (r.lambda_g_upper_simple)
    j["lambda_g_upper_simple"] = Json{{"value", *r.lambda_g_upper_simple},
                                      {"provenance", "formula: (h_min+1)/(h_min-1)"}};
  else
    j["lambda_g_upper_simple"] = Json{{"value", nullptr}, {"provenance", "needs h_min >= 2"}};
  j["lambda_g_upper_refined"] = refined_bound_to_json(r.lambda_g_upper_refined);
  if (r.certificate) j["certificate"] = certificate_to_json(*r.certificate);
  j["lambda_l_lower_cert"] =
      Json{{"value", r.lambda_l_lower_cert},
           {"provenance", r.certificate ? "certificate: supermartingale weight search"
                                        : "formula: BRW domination"}};
  j["lambda_g_upper"] =
      std::isfinite(r.lambda_g_upper) ? Json(r.lambda_g_upper) : Json("inf");
  j["lambda_l_lower"] = r.lambda_l_lower;
  j["weak_survival"] = r.weak_survival;
  j["verdict"] = r.weak_survival ? "WEAK" : "NOT_CERTIFIED";
  return j;
}

Json survival_estimate_to_json(const SurvivalEstimate& e) {
  return Json{{"p_hat", e.p_hat},       {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},   {"n_trials", e.n_trials},
              {"successes", e.successes}, {"proxy", e.proxy}};
}

Json bisect_result_to_json(const BisectResult& r) {
  Json probes = Json::array();
  for (const auto& p : r.probes)
    probes.push_back(Json{{"lambda", p.value},  // the reproduction mean for BRW probes
                          {"p_hat", p.estimate.p_hat},
                          {"ci", Json::array({p.estimate.ci_low, p.estimate.ci_high})},
                          {"n_trials", p.estimate.n_trials},
                          {"successes", p.estimate.successes},
                          {"proxy", p.estimate.proxy}});
  return Json{{"interval", Json::array({r.low, r.high})}, {"probes", probes}};
}

std::string csv_double(double v) {
  // Shortest decimal that round-trips; keeps CSV bodies byte-stable.
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

}  // namespace gwcp
