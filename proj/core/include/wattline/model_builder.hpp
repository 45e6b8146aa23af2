#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wattline/types.hpp"

namespace wattline {

struct PlatformSpec {
    std::string name;
    double p_peak_w = 0.0;
    std::string notes; // free text: core count, frequency, ...
};

// One optimization configuration's measurements; becomes one ceiling.
struct CeilingRecordGroup {
    std::string config_label;
    CeilingKind kind = CeilingKind::compute;
    Precision precision = Precision::na;
    std::vector<MeasurementRecord> records;
};

enum class RateStatistic { median, max };

struct PlacementPoint {
    double e_per_unit = 0.0; // J/FLOP or J/byte
    double power_w = 0.0;
};

struct KernelPlacement {
    std::string kernel_name;
    std::string config_label;
    Precision precision = Precision::na;
    std::optional<PlacementPoint> compute_point; // present when W > 0 and E > 0
    std::optional<PlacementPoint> memory_point;  // present when Q > 0 and E > 0
    // Against the top ceiling of the first model that matches a present
    // point (compute first); absent when nothing was classifiable.
    std::optional<Boundedness> classification;
    double gap = 0.0; // measured/attainable power on that same ceiling
    std::vector<std::string> warnings;
};

struct ConfigDelta {
    std::string kernel_name;
    std::string config_before;
    std::string config_after;
    double delta_power_w = 0.0;    // P_after - P_before
    double ee_ratio = 0.0;         // e_before / e_after; > 1 means improvement
    double gap_ratio_change = 0.0; // gap_after / gap_before (0 when undefined)
    bool crossed_ridge = false;    // classifications differ
};

struct StabilityRow {
    std::string kernel_name;
    std::string config_label;
    Precision precision = Precision::na;
    int size_count = 0;
    double e_w_min = 0.0;
    double e_w_max = 0.0;
    double spread = 0.0; // (max - min) / min
};

// One ceiling per group, rate = chosen statistic of per-record rate (W/t for
// compute groups, Q/t for memory), sorted descending. Mixed kinds or
// precisions, empty input, or two groups landing on the same rate are
// errors.
RooflineModel build_model(const PlatformSpec& platform,
                          const std::vector<CeilingRecordGroup>& groups,
                          RateStatistic stat = RateStatistic::median);

// Map records to roofline points and classify each against the top ceiling
// of the first applicable model (compute first). Either model may be null.
// A record that cannot be classified (or whose power exceeds the peak)
// still yields a placement, with a warning attached.
std::vector<KernelPlacement> place_kernels(const RooflineModel* compute_model,
                                           const RooflineModel* memory_model,
                                           const std::vector<MeasurementRecord>& records);

// Before/after deltas for one kernel across two configurations. Throws
// DomainError when the placements are for different kernels or precisions,
// or share no point kind.
ConfigDelta compare_configs(const KernelPlacement& before, const KernelPlacement& after);

// Spread of energy-per-flop across data-set sizes, per kernel/config.
// Outer key: data-set label. Throws DomainError when a kernel appears for
// fewer than two sizes or has no defined e_w.
std::vector<StabilityRow> stability_report(
    const std::map<std::string, std::vector<MeasurementRecord>>& records_by_size);

} // namespace wattline
