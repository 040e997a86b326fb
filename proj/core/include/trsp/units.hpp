#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace trsp {

/// Data volumes are fixed point in hundredths of a GB so that cost sums,
/// storage checks, and the knapsack DP stay exact in integer arithmetic.
using Volume = std::int64_t;

/// Traffic coefficients are fixed point in thousandths of the unit cost
/// (the edge-to-cloud coefficient 1.0 is stored as 1000).
using Gamma = std::int64_t;

/// A transmission cost is Volume x Gamma, i.e. 1e-5 GB-equivalents.
using Cost = std::int64_t;

constexpr Volume kVolumePerGb = 100;
constexpr Gamma kGammaOne = 1000;
constexpr Cost kCostPerGb = kVolumePerGb * kGammaOne;

inline Volume volume_from_gb(double gb) {
  return static_cast<Volume>(std::llround(gb * kVolumePerGb));
}

inline double volume_to_gb(Volume v) {
  return static_cast<double>(v) / kVolumePerGb;
}

inline Gamma gamma_from_double(double g) {
  return static_cast<Gamma>(std::llround(g * kGammaOne));
}

inline double gamma_to_double(Gamma g) {
  return static_cast<double>(g) / kGammaOne;
}

inline double cost_to_gb(Cost c) {
  return static_cast<double>(c) / kCostPerGb;
}

/// Placement and refresh volumes carry no traffic coefficient in the cost
/// model, so converting them to Cost scales by the cloud coefficient.
inline Cost volume_as_cost(Volume v) { return v * kGammaOne; }

/// Exact decimal rendering of a Cost in GB with five fractional digits.
/// Used for CSV output, where byte-stable formatting is part of the contract.
std::string format_cost_gb(Cost c);

}  // namespace trsp
