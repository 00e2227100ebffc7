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

#include "ftql/quantize.hpp"

#include <cmath>
#include <stdexcept>

namespace ftql {
namespace {

// Floor with a relative snap of 1e-12 around whole numbers. Re-quantizing a
// grid point computes k*(1 + eps) for integer k; without the snap the floor
// could land on k-1 and break exact idempotence.
double snapped_floor(double t) {
  double r = std::nearbyint(t);
  if (std::abs(t - r) <= 1e-12 * std::max(1.0, std::abs(t))) return r;
  return std::floor(t);
}

}  // namespace

std::string to_string(RoundingRule rule) {
  switch (rule) {
    case RoundingRule::kIdentity: return "identity";
    case RoundingRule::kFloor: return "floor";
    case RoundingRule::kHalfAway: return "half-away";
    case RoundingRule::kEvenAway: return "even-away";
  }
  throw std::logic_error("unreachable rounding rule");
}

RoundingRule rounding_rule_from_string(const std::string& name) {
  if (name == "identity") return RoundingRule::kIdentity;
  if (name == "floor") return RoundingRule::kFloor;
  if (name == "half-away") return RoundingRule::kHalfAway;
  if (name == "even-away") return RoundingRule::kEvenAway;
  throw std::invalid_argument("unknown rounding rule: " + name);
}

QuantizationScheme::QuantizationScheme(RoundingRule rule, double error)
    : rule_(rule), error_(error) {
  if (!std::isfinite(error) || error < 0.0) {
    throw std::invalid_argument("quantization error must be finite and >= 0");
  }
  if (rule == RoundingRule::kIdentity && error != 0.0) {
    throw std::invalid_argument("identity rule requires error = 0");
  }
  if (error == 0.0) {
    spacing_ = 0.0;
  } else if (rule == RoundingRule::kFloor) {
    spacing_ = error / 2.0;
  } else {
    spacing_ = error;
  }
}

QuantizationScheme QuantizationScheme::preset(RoundingRule rule,
                                              double scale) {
  switch (rule) {
    case RoundingRule::kIdentity: return QuantizationScheme(rule, 0.0);
    case RoundingRule::kHalfAway: return QuantizationScheme(rule, scale);
    case RoundingRule::kEvenAway: return QuantizationScheme(rule, 2.0 * scale);
    case RoundingRule::kFloor: return QuantizationScheme(rule, 2.0 * scale);
  }
  throw std::logic_error("unreachable rounding rule");
}

double QuantizationScheme::quantize(double v) const {
  if (!std::isfinite(v)) {
    throw std::domain_error("quantize: input must be finite");
  }
  if (spacing_ == 0.0) return v;
  if (rule_ == RoundingRule::kFloor) {
    return spacing_ * snapped_floor(v / spacing_);
  }
  // Round half away from zero on the grid spacing_*Z. Ties (|v| exactly
  // halfway between grid points) land on the larger magnitude.
  double sign = (v > 0.0) ? 1.0 : ((v < 0.0) ? -1.0 : 0.0);
  return spacing_ * sign * snapped_floor(std::abs(v) / spacing_ + 0.5);
}

std::vector<double> QuantizationScheme::quantize(
    const std::vector<double>& v) const {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = quantize(v[k]);
  return out;
}

}  // namespace ftql
