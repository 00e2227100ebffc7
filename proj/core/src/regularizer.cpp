// Copyright 2026 The FTQL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ftql/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ftql/game.hpp"

namespace ftql {
namespace {

constexpr double kBisectTol = 1e-10;

void check_scores(const std::vector<double>& y) {
  if (y.empty()) throw std::invalid_argument("choice_map: empty score vector");
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("choice_map: scores must be finite");
    }
  }
}

std::vector<double> softmax(const std::vector<double>& y) {
  double top = *std::max_element(y.begin(), y.end());
  std::vector<double> x(y.size());
  double sum = 0.0;
  for (std::size_t a = 0; a < y.size(); ++a) {
    x[a] = std::exp(y[a] - top);
    sum += x[a];
  }
  for (double& v : x) v /= sum;
  return x;
}

// Euclidean projection onto the simplex, sort-and-threshold form. Exact
// zeros on the inactive set; the output hits vertices exactly.
std::vector<double> project_simplex(const std::vector<double>& y) {
  std::vector<double> u(y);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double shift = 0.0;
  int support = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    css += u[j];
    double candidate = (1.0 - css) / static_cast<double>(j + 1);
    if (u[j] + candidate > 0.0) {
      shift = candidate;
      support = static_cast<int>(j + 1);
    }
  }
  (void)support;
  std::vector<double> x(y.size());
  for (std::size_t a = 0; a < y.size(); ++a) {
    x[a] = std::max(0.0, y[a] + shift);
  }
  return x;
}

}  // namespace

std::string to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::kEntropic: return "entropic";
    case RegularizerKind::kEuclidean: return "euclidean";
    case RegularizerKind::kCustom: return "custom";
  }
  throw std::logic_error("unreachable regularizer kind");
}

RegularizerKind regularizer_kind_from_string(const std::string& name) {
  if (name == "entropic") return RegularizerKind::kEntropic;
  if (name == "euclidean") return RegularizerKind::kEuclidean;
  throw std::invalid_argument("unknown regularizer: " + name);
}

Regularizer::Regularizer(RegularizerKind kind, std::string name)
    : kind_(kind), name_(std::move(name)) {}

Regularizer Regularizer::entropic() {
  Regularizer r(RegularizerKind::kEntropic, "entropic");
  r.kernel_ = [](double z) { return z <= 0.0 ? 0.0 : z * std::log(z); };
  r.kernel_derivative_ = [](double z) { return 1.0 + std::log(z); };
  r.derivative_at_zero_ = -kInf;
  r.derivative_at_one_ = 1.0;
  return r;
}

Regularizer Regularizer::euclidean() {
  Regularizer r(RegularizerKind::kEuclidean, "euclidean");
  r.kernel_ = [](double z) { return 0.5 * z * z; };
  r.kernel_derivative_ = [](double z) { return z; };
  r.derivative_at_zero_ = 0.0;
  r.derivative_at_one_ = 1.0;
  return r;
}

Regularizer Regularizer::custom(std::string name,
                                std::function<double(double)> kernel,
                                std::function<double(double)> kernel_derivative,
                                double derivative_at_zero) {
  if (!kernel || !kernel_derivative) {
    throw std::invalid_argument("custom regularizer: kernel and derivative required");
  }
  Regularizer r(RegularizerKind::kCustom, std::move(name));
  r.kernel_ = std::move(kernel);
  r.kernel_derivative_ = std::move(kernel_derivative);
  r.derivative_at_zero_ = derivative_at_zero;
  r.derivative_at_one_ = r.kernel_derivative_(1.0);
  if (!(r.derivative_at_zero_ < r.derivative_at_one_)) {
    throw std::invalid_argument(
        "custom regularizer: theta'(0+) must be below theta'(1)");
  }
  return r;
}

double Regularizer::kernel(double z) const { return kernel_(z); }

double Regularizer::kernel_derivative(double z) const {
  return kernel_derivative_(z);
}

std::vector<double> Regularizer::choice_map(const std::vector<double>& y) const {
  check_scores(y);
  switch (kind_) {
    case RegularizerKind::kEntropic: return softmax(y);
    case RegularizerKind::kEuclidean: return project_simplex(y);
    case RegularizerKind::kCustom: return choice_map_bisection(y);
  }
  throw std::logic_error("unreachable regularizer kind");
}

double Regularizer::rate_function(double y) const {
  switch (kind_) {
    case RegularizerKind::kEntropic:
      return y >= 1.0 ? 1.0 : std::exp(y - 1.0);
    case RegularizerKind::kEuclidean:
      return std::clamp(y, 0.0, 1.0);
    case RegularizerKind::kCustom:
      return rate_function_bisection(y);
  }
  throw std::logic_error("unreachable regularizer kind");
}

std::vector<double> Regularizer::initial_scores(
    const std::vector<double>& x) const {
  if (!in_simplex(x)) {
    throw std::invalid_argument("initial_scores: not a probability vector");
  }
  std::vector<double> y(x.size());
  switch (kind_) {
    case RegularizerKind::kEntropic:
      for (std::size_t a = 0; a < x.size(); ++a) {
        if (x[a] <= 0.0) {
          throw std::invalid_argument(
              "initial_scores: entropic regularizer needs an interior point");
        }
        y[a] = std::log(x[a]);
      }
      return y;
    case RegularizerKind::kEuclidean:
      return x;
    case RegularizerKind::kCustom:
      for (std::size_t a = 0; a < x.size(); ++a) {
        y[a] = x[a] > 0.0 ? kernel_derivative_(x[a]) : derivative_at_zero_;
        if (!std::isfinite(y[a])) {
          throw std::invalid_argument(
              "initial_scores: steep kernel needs an interior point");
        }
      }
      return y;
  }
  throw std::logic_error("unreachable regularizer kind");
}

// sum_a rate(y_a - shift) decreases monotonically in shift; bisect the shift
// that makes the coordinates sum to one, then read the strategy off the rate
// function.
std::vector<double> Regularizer::choice_map_bisection(
    const std::vector<double>& y) const {
  double top = *std::max_element(y.begin(), y.end());
  auto mass = [&](double shift) {
    double sum = 0.0;
    for (double v : y) sum += rate_function_bisection(v - shift);
    return sum;
  };
  double lo = top - derivative_at_one_;  // rate at the max coordinate is 1
  double hi = lo + 1.0;
  double step = 1.0;
  while (mass(hi) > 1.0) {
    step *= 2.0;
    hi += step;
    if (step > 1e18) {
      throw std::runtime_error("choice_map: could not bracket the shift");
    }
  }
  for (int it = 0; it < 200 && (hi - lo) > kBisectTol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mass(mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double shift = 0.5 * (lo + hi);
  std::vector<double> x(y.size());
  double sum = 0.0;
  for (std::size_t a = 0; a < y.size(); ++a) {
    x[a] = rate_function_bisection(y[a] - shift);
    sum += x[a];
  }
  if (sum <= 0.0) throw std::runtime_error("choice_map: degenerate solution");
  for (double& v : x) v /= sum;
  return x;
}

double Regularizer::rate_function_bisection(double y) const {
  if (y >= derivative_at_one_) return 1.0;
  if (y <= derivative_at_zero_) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  // theta' is increasing; derivative_at_zero_ may be -inf, so probe from a
  // small positive point when the kernel cannot be evaluated at zero.
  for (int it = 0; it < 200 && (hi - lo) > kBisectTol; ++it) {
    double mid = 0.5 * (lo + hi);
    double d = kernel_derivative_(mid);
    if (d < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ftql
