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

#ifndef FTQL_QUANTIZE_HPP_
#define FTQL_QUANTIZE_HPP_

#include <string>
#include <vector>

namespace ftql {

enum class RoundingRule { kIdentity, kFloor, kHalfAway, kEvenAway };

std::string to_string(RoundingRule rule);
RoundingRule rounding_rule_from_string(const std::string& name);

// Scalar quantizer onto a uniform, zero-aligned grid with the guarantee
// |quantize(v) - v| <= error/2. `error` is the declared quantization error
// l; every rule derives its own grid spacing from it:
//   half-away  spacing l    round half away from zero on l*Z
//   even-away  spacing l    same formula; conventional grid is 2Z (l = 2)
//   floor      spacing l/2  floor needs the finer grid to meet the l/2 bound
//   identity   spacing 0    no quantization (l must be 0)
// error = 0 always degrades to the identity operator.
class QuantizationScheme {
 public:
  QuantizationScheme() : QuantizationScheme(RoundingRule::kIdentity, 0.0) {}
  QuantizationScheme(RoundingRule rule, double error);

  // The rule on its conventional grid: half-away l=1, even-away l=2,
  // floor l=2, identity l=0; `scale` multiplies the declared error.
  static QuantizationScheme preset(RoundingRule rule, double scale = 1.0);

  RoundingRule rule() const { return rule_; }
  double error() const { return error_; }
  double spacing() const { return spacing_; }
  bool is_identity() const { return spacing_ == 0.0; }

  double quantize(double v) const;
  std::vector<double> quantize(const std::vector<double>& v) const;

 private:
  RoundingRule rule_;
  double error_;
  double spacing_;
};

}  // namespace ftql

#endif  // FTQL_QUANTIZE_HPP_
