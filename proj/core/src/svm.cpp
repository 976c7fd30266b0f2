#include "ewb/svm.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "ewb/errors.hpp"

namespace ewb {
namespace {

constexpr double kTau = 1e-12;
constexpr const char* kModelFormat = "ewb-svm";
constexpr int kModelVersion = 1;

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double scale_gamma(const Matrix& x) {
  const auto& v = x.data();
  if (v.empty()) return 1.0;
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double a : v) var += (a - mean) * (a - mean);
  var /= static_cast<double>(v.size());
  return var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

}  // namespace

SvmModel::SvmModel(Matrix support_vectors, std::vector<double> coefficients, double bias, double gamma,
                   std::vector<double> class_weights)
    : support_vectors_(std::move(support_vectors)),
      coefficients_(std::move(coefficients)),
      bias_(bias),
      gamma_(gamma),
      class_weights_(std::move(class_weights)) {
  if (coefficients_.size() != support_vectors_.rows())
    throw ParameterError("svm model: coefficient count does not match support vectors");
}

double SvmModel::decision_value(std::span<const double> x) const {
  if (x.size() != dimension())
    throw ParameterError("predict: expected " + std::to_string(dimension()) + " features, got " +
                         std::to_string(x.size()));
  double f = 0.0;
  for (std::size_t i = 0; i < support_vectors_.rows(); ++i)
    f += coefficients_[i] * rbf(support_vectors_.row(i), x, gamma_);
  return f + bias_;
}

std::vector<double> SvmModel::decision_values(const Matrix& x) const {
  if (x.rows() > 0 && x.cols() != dimension())
    throw ParameterError("predict: expected " + std::to_string(dimension()) + " features, got " +
                         std::to_string(x.cols()));
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = decision_value(x.row(r));
  return out;
}

std::vector<int> SvmModel::predict(const Matrix& x) const {
  const auto f = decision_values(x);
  std::vector<int> labels(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) labels[i] = f[i] >= 0.0 ? 1 : 0;
  return labels;
}

std::string SvmModel::to_json() const {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["gamma"] = gamma_;
  j["bias"] = bias_;
  j["class_weights"] = class_weights_;
  j["dimension"] = dimension();
  j["coefficients"] = coefficients_;
  nlohmann::json svs = nlohmann::json::array();
  for (std::size_t i = 0; i < support_vectors_.rows(); ++i) {
    auto row = support_vectors_.row(i);
    svs.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["support_vectors"] = std::move(svs);
  return j.dump(2);
}

SvmModel SvmModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("svm model", 0, "", e.what());
  }
  if (j.value("format", "") != kModelFormat || j.value("version", 0) != kModelVersion)
    throw SchemaError("svm model", 0, "version", "unsupported model format or version");
  try {
    const auto dim = j.at("dimension").get<std::size_t>();
    const auto rows = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    Matrix svs(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != dim) throw SchemaError("svm model", r, "support_vectors", "wrong row length");
      std::copy(rows[r].begin(), rows[r].end(), svs.row(r).begin());
    }
    return SvmModel(std::move(svs), j.at("coefficients").get<std::vector<double>>(), j.at("bias").get<double>(),
                    j.at("gamma").get<double>(), j.at("class_weights").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("svm model", 0, "", e.what());
  }
}

std::vector<double> balanced_class_weights(const std::vector<int>& y) {
  double n1 = 0.0;
  for (int v : y) n1 += (v == 1);
  const double n = static_cast<double>(y.size());
  const double n0 = n - n1;
  if (n0 == 0.0 || n1 == 0.0) throw TrainingError("training data must contain both classes");
  return {n / (2.0 * n0), n / (2.0 * n1)};
}

SvmModel train_rbf_classifier(const Matrix& x, const std::vector<int>& labels, const SvmParams& params) {
  const std::size_t n = x.rows();
  if (labels.size() != n) throw ParameterError("train_rbf_classifier: label count does not match rows");
  for (int v : labels)
    if (v != 0 && v != 1) throw ParameterError("train_rbf_classifier: labels must be 0 or 1");
  const auto weights = balanced_class_weights(labels);
  if (!(params.c > 0.0)) throw ParameterError("train_rbf_classifier: C must be positive");

  const double gamma = params.gamma > 0.0 ? params.gamma : scale_gamma(x);

  std::vector<double> y(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = labels[i] == 1 ? 1.0 : -1.0;
    upper[i] = params.c * weights[static_cast<std::size_t>(labels[i])];
  }

  // Q_ij = y_i y_j K_ij, stored in full.
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    q(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = y[i] * y[j] * rbf(x.row(i), x.row(j), gamma);
      q(i, j) = v;
      q(j, i) = v;
    }
  }

  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  auto at_upper = [&](std::size_t i) { return alpha[i] >= upper[i]; };
  auto at_lower = [&](std::size_t i) { return alpha[i] <= 0.0; };

  std::size_t iter = 0;
  for (;; ++iter) {
    // Working-set selection (maximal violating pair, second-order choice of j).
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!at_upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    std::ptrdiff_t j_sel = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    if (i_sel >= 0) {
      const auto i = static_cast<std::size_t>(i_sel);
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff = 0.0;
        if (y[t] > 0) {
          if (at_lower(t)) continue;
          grad_diff = gmax + grad[t];
          gmax2 = std::max(gmax2, grad[t]);
        } else {
          if (at_upper(t)) continue;
          grad_diff = gmax - grad[t];
          gmax2 = std::max(gmax2, -grad[t]);
        }
        if (grad_diff > 0.0) {
          // K_ii + K_tt - 2 K_it, with K_it = y_i y_t Q_it.
          double quad = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * q(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            j_sel = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (i_sel < 0 || j_sel < 0 || gmax + gmax2 < params.tolerance) break;
    if (iter >= params.max_iterations) throw ConvergenceError(params.max_iterations);

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double ci = upper[i];
    const double cj = upper[j];

    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    const auto qi = q.row(i);
    const auto qj = q.row(j);
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * dai + qj[t] * daj;
  }

  // Offset from free multipliers, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (at_upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : (ub + lb) / 2.0;

  std::size_t n_sv = 0;
  for (double a : alpha) n_sv += a > 0.0;
  Matrix svs(n_sv, x.cols());
  std::vector<double> coef;
  coef.reserve(n_sv);
  for (std::size_t t = 0, r = 0; t < n; ++t) {
    if (!(alpha[t] > 0.0)) continue;
    auto src = x.row(t);
    std::copy(src.begin(), src.end(), svs.row(r++).begin());
    coef.push_back(alpha[t] * y[t]);
  }
  SvmModel model(std::move(svs), std::move(coef), -rho, gamma, weights);
  model.set_iterations(iter);
  return model;
}

}  // namespace ewb
