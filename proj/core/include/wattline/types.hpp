#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wattline {

// All quantities are SI internally: watts, joules, seconds, FLOP, bytes.
// Display layers convert to J/GFLOP, GFLOP/s, mW as needed.

enum class Precision { sp, dp, na };

enum class CeilingKind { compute, memory };

enum class Boundedness { compute_bound, power_bound, on_ridge };

std::string_view to_string(Precision p);
std::string_view to_string(CeilingKind k);
std::string_view to_string(Boundedness b);
Precision precision_from_string(std::string_view s);
CeilingKind ceiling_kind_from_string(std::string_view s);

/// One measured kernel run: work, traffic, time, energy plus labels.
struct MeasurementRecord {
    std::string kernel_name;
    std::string config_label;
    Precision precision = Precision::na;
    double work_flop = 0.0;      // W
    double traffic_bytes = 0.0;  // Q
    double time_s = 0.0;         // t
    double energy_j = 0.0;       // E

    bool operator==(const MeasurementRecord&) const = default;
};

// Throws DomainError unless: t > 0, E >= 0, W >= 0, Q >= 0, and W + Q > 0.
void validate(const MeasurementRecord& rec);

/// Ratios derived from one record. Fields whose denominator is zero are
/// absent, never zero or infinite.
struct DerivedMetrics {
    double power_w = 0.0;           // E/t
    double perf_flops = 0.0;        // W/t
    double bandwidth_bps = 0.0;     // Q/t
    std::optional<double> e_w;      // J/FLOP, defined when W > 0
    std::optional<double> e_q;      // J/byte, defined when Q > 0
    std::optional<double> ee_comp;  // FLOP/J, reciprocal of e_w
    std::optional<double> ee_mem;   // byte/J, reciprocal of e_q
};

/// Fitted coefficients of the linear energy model
/// E ~ W*eps_flop + Q*eps_mem + e0.
struct EnergyCoefficients {
    double eps_flop = 0.0;      // J/FLOP
    double eps_mem = 0.0;       // J/byte
    double e0 = 0.0;            // J
    double residual_rms = 0.0;  // J, over the records the fit saw
    bool clamped = false;       // true if any raw coefficient was negative
};

/// One optimization technique: the rate it achieved under one configuration.
struct Ceiling {
    std::string name;
    CeilingKind kind = CeilingKind::compute;
    double rate = 0.0;  // FLOP/s for compute, bytes/s for memory
    Precision precision = Precision::na;
};

/// A platform's power roof plus its per-optimization sloped ceilings,
/// ordered by strictly descending rate.
class RooflineModel {
public:
    // Validates all invariants; the ceiling list must already be sorted by
    // strictly descending rate. Throws DomainError on violation.
    static RooflineModel create(std::string platform, double p_peak_w,
                                CeilingKind kind, Precision precision,
                                std::vector<Ceiling> ceilings);

    const std::string& platform() const { return platform_; }
    double p_peak_w() const { return p_peak_w_; }
    CeilingKind kind() const { return kind_; }
    Precision precision() const { return precision_; }
    const std::vector<Ceiling>& ceilings() const { return ceilings_; }

    // Highest-rate ceiling. Models always hold at least one.
    const Ceiling& top_ceiling() const { return ceilings_.front(); }

    // Throws LookupError when no ceiling has that name.
    const Ceiling& find_ceiling(std::string_view name) const;

private:
    RooflineModel() = default;

    std::string platform_;
    double p_peak_w_ = 0.0;
    CeilingKind kind_ = CeilingKind::compute;
    Precision precision_ = Precision::na;
    std::vector<Ceiling> ceilings_;
};

bool operator==(const Ceiling& a, const Ceiling& b);
bool operator==(const RooflineModel& a, const RooflineModel& b);

} // namespace wattline
