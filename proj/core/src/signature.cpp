#include "ewb/signature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "ewb/errors.hpp"

namespace ewb {

void SignatureDef::validate() const {
  for (const auto& e : entries) {
    if (e.polarity != 1 && e.polarity != -1)
      throw ParameterError("signature: polarity of '" + e.feature_name + "' must be +1 or -1");
    if (!(e.std > 0.0) || !std::isfinite(e.std))
      throw ParameterError("signature: std of '" + e.feature_name + "' must be positive");
  }
}

std::string SignatureDef::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "ewb-signature";
  j["version"] = 1;
  j["name"] = name;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : entries)
    arr.push_back({{"feature", e.feature_name}, {"polarity", e.polarity}, {"mean", e.mean}, {"std", e.std}});
  j["entries"] = std::move(arr);
  return j.dump(2) + "\n";
}

SignatureDef SignatureDef::from_json(const std::string& text) {
  SignatureDef def;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "ewb-signature" || j.value("version", 0) != 1)
      throw SchemaError("signature", 0, "format", "not an ewb-signature v1 document");
    def.name = j.value("name", "");
    std::size_t row = 0;
    for (const auto& e : j.at("entries")) {
      if (!e.contains("feature") || !e.contains("polarity") || !e.contains("mean") || !e.contains("std"))
        throw SchemaError("signature", row, "entries", "entry needs feature, polarity, mean and std");
      def.entries.push_back({e.at("feature").get<std::string>(), e.at("polarity").get<int>(),
                             e.at("mean").get<double>(), e.at("std").get<double>()});
      ++row;
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("signature", 0, "", e.what());
  }
  def.validate();
  return def;
}

SignatureDef build_signature(const Matrix& x, const std::vector<int>& y, const std::vector<std::string>& names,
                             const std::vector<FeatureScore>& scores, std::size_t k) {
  if (k == 0) throw ParameterError("build_signature: k must be positive");
  if (k > names.size()) throw ParameterError("build_signature: k exceeds the feature count");
  if (y.size() != x.rows() || names.size() != x.cols()) throw ParameterError("build_signature: shape mismatch");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].f_value > scores[b].f_value; });

  SignatureDef def;
  def.name = "top" + std::to_string(k);
  const double n = static_cast<double>(x.rows());
  for (std::size_t rank : order) {
    if (def.entries.size() == k) break;
    const auto& name = scores[rank].feature_name;
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw LookupError(name, "build_signature");
    const auto c = static_cast<std::size_t>(it - names.begin());

    double sum = 0.0, hi = 0.0, lo = 0.0;
    double n_hi = 0.0, n_lo = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      sum += x(r, c);
      if (y[r] == 1) {
        hi += x(r, c);
        n_hi += 1;
      } else {
        lo += x(r, c);
        n_lo += 1;
      }
    }
    const double mean = sum / n;
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
    const double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) {
      def.warnings.push_back("feature '" + name + "' has zero variance; skipped");
      continue;
    }
    const double diff = (n_hi > 0 ? hi / n_hi : 0.0) - (n_lo > 0 ? lo / n_lo : 0.0);
    def.entries.push_back({name, diff < 0.0 ? -1 : 1, mean, sd});
  }
  if (def.entries.size() < k)
    def.warnings.push_back("only " + std::to_string(def.entries.size()) + " usable features for k = " +
                           std::to_string(k));
  return def;
}

double signature_value(const SignatureDef& def, const std::vector<std::string>& names,
                       const std::vector<double>& values) {
  double total = 0.0;
  for (const auto& e : def.entries) {
    const auto it = std::find(names.begin(), names.end(), e.feature_name);
    if (it == names.end()) throw LookupError(e.feature_name, "signature_value");
    total += e.polarity * (values[static_cast<std::size_t>(it - names.begin())] - e.mean) / e.std;
  }
  return total;
}

double signature_value(const SignatureDef& def, const FeatureVector& fv) {
  return signature_value(def, fv.names, fv.values);
}

double literature_signature(const FeatureVector& fv) {
  return fv.at("bp_delta_Fz") + fv.at("bp_theta_Fz") - fv.at("bp_alpha_Fz");
}

SignatureDef literature_signature_def() {
  SignatureDef def;
  def.name = "literature";
  def.entries = {{"bp_delta_Fz", 1, 0.0, 1.0}, {"bp_theta_Fz", 1, 0.0, 1.0}, {"bp_alpha_Fz", -1, 0.0, 1.0}};
  return def;
}

}  // namespace ewb
