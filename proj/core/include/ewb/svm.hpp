#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ewb/matrix.hpp"

namespace ewb {

struct SvmParams {
  double c = 1.0;
  // <= 0 selects 1 / (d * variance of all training feature values).
  double gamma = 0.0;
  double tolerance = 1e-3;
  std::size_t max_iterations = 1'000'000;
};

// Soft-margin RBF classifier. The decision function is
// sum_i coef_i exp(-gamma |sv_i - x|^2) + bias; values >= 0 predict class 1.
class SvmModel {
 public:
  SvmModel() = default;
  SvmModel(Matrix support_vectors, std::vector<double> coefficients, double bias, double gamma,
           std::vector<double> class_weights);

  double decision_value(std::span<const double> x) const;
  std::vector<double> decision_values(const Matrix& x) const;
  // Labels in {0, 1}. Throws ParameterError on a column-count mismatch.
  std::vector<int> predict(const Matrix& x) const;

  const Matrix& support_vectors() const noexcept { return support_vectors_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  double bias() const noexcept { return bias_; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<double>& class_weights() const noexcept { return class_weights_; }
  std::size_t dimension() const noexcept { return support_vectors_.cols(); }
  std::size_t iterations() const noexcept { return iterations_; }
  void set_iterations(std::size_t n) noexcept { iterations_ = n; }

  // Versioned JSON text; reloading reproduces decision values bit for bit.
  std::string to_json() const;
  static SvmModel from_json(const std::string& text);

 private:
  Matrix support_vectors_;
  std::vector<double> coefficients_;  // alpha_i * y_i, y in {-1, +1}
  double bias_ = 0.0;
  double gamma_ = 1.0;
  std::vector<double> class_weights_;  // index = class label
  std::size_t iterations_ = 0;
};

// Balanced class weights n / (2 n_c), index = class label.
std::vector<double> balanced_class_weights(const std::vector<int>& y);

// Solves the weighted hinge-loss dual with sequential pairwise (SMO) updates,
// second-order working-set selection and per-sample bound C * w_class.
// Throws TrainingError if a class is missing, ConvergenceError at the cap.
SvmModel train_rbf_classifier(const Matrix& x, const std::vector<int>& y, const SvmParams& params = {});

}  // namespace ewb
