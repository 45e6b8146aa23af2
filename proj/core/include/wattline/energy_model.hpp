#pragma once

#include <vector>

#include "wattline/types.hpp"

namespace wattline {

// Least-squares fit of E ~ W*eps_flop + Q*eps_mem + e0 over a set of
// measurements. Columns that are identically zero across all records are
// excluded from the fit and get a zero coefficient; a column that is a
// linear combination of the others raises FitError naming the offenders.
// Negative fitted coefficients are clamped to zero (and `clamped` set);
// residual_rms always reflects the returned coefficients.
EnergyCoefficients fit_energy_coefficients(const std::vector<MeasurementRecord>& records);

// W*eps_flop + Q*eps_mem + e0.
double predict_energy(const EnergyCoefficients& c, double work_flop, double traffic_bytes);

} // namespace wattline
