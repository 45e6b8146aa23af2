#pragma once

#include <span>
#include <string>
#include <string_view>

#include "wattline/sample_log.hpp"
#include "wattline/types.hpp"

namespace wattline {

struct RegionReport {
    std::string name;
    double duration_s = 0.0;
    double energy_j = 0.0;
    double avg_power_w = 0.0;
    double min_power_w = 0.0;
    double max_power_w = 0.0;
    int64_t sample_count = 0; // samples with t0 <= t <= t1
    // Either endpoint's power came from interpolation or constant extension
    // rather than an exact sample at the boundary.
    bool boundary_interpolated = false;
};

// Trapezoidal integral of power over [t0, t1], in joules. Boundary powers
// are linearly interpolated between the nearest bracketing samples, or
// extended constant from the nearest interior sample when the window starts
// before the first (ends after the last) sample. Samples must be strictly
// increasing. Throws DomainError when the window has no interior sample and
// is not bracketed on both sides.
double integrate_region(std::span<const PowerSample> samples, int64_t t0_us,
                        int64_t t1_us);

// Full report for the first region named `name` in the log. Throws
// LookupError if no such region.
RegionReport region_report(const ParsedLog& log, std::string_view name);

// Same, for a region already in hand.
RegionReport region_report(std::span<const PowerSample> samples, const LogRegion& region);

// JSON object with the fixed keys {name, duration_s, energy_j, avg_power_w,
// min_power_w, max_power_w, sample_count, boundary_interpolated}.
std::string region_report_json(const RegionReport& rep);

// Join a report with externally counted work/traffic. Kernel label defaults
// to the region name when empty. Throws DomainError when both W and Q are
// zero (nothing to place the record by).
MeasurementRecord to_measurement_record(const RegionReport& rep, double work_flop,
                                        double traffic_bytes, std::string kernel = {},
                                        std::string config = "base",
                                        Precision precision = Precision::na);

} // namespace wattline
