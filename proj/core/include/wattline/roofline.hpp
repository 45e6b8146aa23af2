#pragma once

#include <string_view>

#include "wattline/types.hpp"

namespace wattline {

// Default relative tolerance for calling a point on-ridge; matches the
// two-significant-figure precision of typical reported ridge values.
inline constexpr double kDefaultRidgeTol = 0.01;

// Compute all ratio metrics for one record. Validates the record first.
DerivedMetrics derive_metrics(const MeasurementRecord& rec);

// Energy-per-unit at which the sloped line meets the power roof:
// p_peak / rate, in J/FLOP or J/byte. Throws DomainError on non-positive
// inputs.
double ridge_point(double p_peak_w, double rate);

// min(e_per_unit * rate, p_peak) for the named ceiling.
// Throws LookupError for an unknown ceiling, DomainError for e <= 0.
double attainable_power(const RooflineModel& model, std::string_view ceiling_name,
                        double e_per_unit);

// compute_bound left of the ridge, power_bound right of it, on_ridge within
// +-tol relative of it.
Boundedness classify(const RooflineModel& model, std::string_view ceiling_name,
                     double e_per_unit, double tol = kDefaultRidgeTol);

// Same, against the model's top (highest-rate) ceiling.
Boundedness classify(const RooflineModel& model, double e_per_unit,
                     double tol = kDefaultRidgeTol);

// Measured power over attainable power at the point's energy-per-unit.
// 1 means on the roofline, < 1 below it. Throws DomainError unless both
// coordinates are > 0.
double gap_to_roofline(const RooflineModel& model, std::string_view ceiling_name,
                       double e_per_unit, double power_w);

} // namespace wattline
