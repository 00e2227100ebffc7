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

#ifndef FTQL_REGULARIZER_HPP_
#define FTQL_REGULARIZER_HPP_

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ftql {

enum class RegularizerKind { kEntropic, kEuclidean, kCustom };

std::string to_string(RegularizerKind kind);
RegularizerKind regularizer_kind_from_string(const std::string& name);

// Decomposable simplex regularizer h(x) = sum_a theta(x_a) with the maps it
// induces:
//   choice_map(y)    = argmax_x { <y, x> - h(x) : x in simplex }
//   rate_function(y) = clamped inverse of theta', i.e. 0 below theta'(0+),
//                      1 above theta'(1), (theta')^-1 in between.
//
// Built-ins use closed forms: entropic theta(z) = z log z gives the softmax
// choice map and rate exp(y - 1); Euclidean theta(z) = z^2/2 gives the
// sort-and-threshold simplex projection and rate clamp(y, 0, 1). Custom
// kernels are solved numerically (bisection, tolerance 1e-10).
class Regularizer {
 public:
  static Regularizer entropic();
  static Regularizer euclidean();
  // kernel must be strictly convex on (0, 1]; derivative_at_zero is
  // theta'(0+) and may be -infinity (a steep kernel).
  static Regularizer custom(std::string name,
                            std::function<double(double)> kernel,
                            std::function<double(double)> kernel_derivative,
                            double derivative_at_zero);

  RegularizerKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  // Steep kernels (theta'(0+) = -inf) keep the choice map strictly interior.
  bool steep() const { return derivative_at_zero_ == -kInf; }

  double kernel(double z) const;
  double kernel_derivative(double z) const;

  std::vector<double> choice_map(const std::vector<double>& y) const;
  double rate_function(double y) const;

  // Scores y with choice_map(y) = x. Entropic: y = log x (requires interior
  // x); Euclidean: y = x. Custom kernels: y = theta'(x) coordinatewise.
  std::vector<double> initial_scores(const std::vector<double>& x) const;

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  Regularizer(RegularizerKind kind, std::string name);

  std::vector<double> choice_map_bisection(const std::vector<double>& y) const;
  double rate_function_bisection(double y) const;

  RegularizerKind kind_;
  std::string name_;
  std::function<double(double)> kernel_;
  std::function<double(double)> kernel_derivative_;
  double derivative_at_zero_ = 0.0;
  double derivative_at_one_ = 1.0;
};

}  // namespace ftql

#endif  // FTQL_REGULARIZER_HPP_
