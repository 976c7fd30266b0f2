#pragma once

#include <string>
#include <vector>

#include "ewb/features.hpp"
#include "ewb/matrix.hpp"
#include "ewb/ranking.hpp"

namespace ewb {

struct SignatureEntry {
  std::string feature_name;
  int polarity = 1;  // +1 or -1
  double mean = 0.0;
  double std = 1.0;
};

// Scalar workload index: sum of polarity * (value - mean) / std.
struct SignatureDef {
  std::string name;
  std::vector<SignatureEntry> entries;
  std::vector<std::string> warnings;  // not serialized

  // Throws ParameterError if a polarity is not +-1 or a std is not positive.
  void validate() const;
  std::string to_json() const;
  static SignatureDef from_json(const std::string& text);
};

// Picks the k best-scoring columns (ties keep score order) among those listed
// in `scores`, storing the pooled mean and population std of each over this
// data and polarity sign(mean HIGH - mean LOW), +1 on a tie. Zero-std columns
// are skipped with a warning and the next-ranked column is promoted.
SignatureDef build_signature(const Matrix& x, const std::vector<int>& y, const std::vector<std::string>& names,
                             const std::vector<FeatureScore>& scores, std::size_t k = 5);

double signature_value(const SignatureDef& def, const std::vector<std::string>& names,
                       const std::vector<double>& values);
double signature_value(const SignatureDef& def, const FeatureVector& fv);

// bp_delta_Fz + bp_theta_Fz - bp_alpha_Fz.
double literature_signature(const FeatureVector& fv);
// The same index as a SignatureDef with unit normalization.
SignatureDef literature_signature_def();

}  // namespace ewb
