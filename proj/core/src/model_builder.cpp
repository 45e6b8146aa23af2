#include "wattline/model_builder.hpp"

#include <algorithm>
#include <tuple>

#include "wattline/errors.hpp"
#include "wattline/numeric.hpp"
#include "wattline/roofline.hpp"

namespace wattline {

namespace {

// Tolerance on P > p_peak before a placement gets the inconsistency
// warning; matches the ridge classification tolerance.
constexpr double kInconsistencyTol = kDefaultRidgeTol;

double group_rate(const CeilingRecordGroup& g, RateStatistic stat) {
    std::vector<double> rates;
    rates.reserve(g.records.size());
    for (const auto& r : g.records) {
        DerivedMetrics m = derive_metrics(r);
        double rate = g.kind == CeilingKind::compute ? m.perf_flops : m.bandwidth_bps;
        if (!(rate > 0.0)) {
            throw DomainError("build_model: record '" + r.kernel_name + "' in group '" +
                              g.config_label + "' has zero " +
                              (g.kind == CeilingKind::compute ? "work" : "traffic") +
                              "; no rate to aggregate");
        }
        rates.push_back(rate);
    }
    if (stat == RateStatistic::max) {
        return *std::max_element(rates.begin(), rates.end());
    }
    return median(std::move(rates));
}

} // namespace

RooflineModel build_model(const PlatformSpec& platform,
                          const std::vector<CeilingRecordGroup>& groups,
                          RateStatistic stat) {
    if (groups.empty()) {
        throw DomainError("build_model: no record groups");
    }
    for (const auto& g : groups) {
        if (g.records.empty()) {
            throw DomainError("build_model: group '" + g.config_label + "' is empty");
        }
        if (g.kind != groups.front().kind) {
            throw DomainError("build_model: groups mix compute and memory kinds ('" +
                              groups.front().config_label + "' vs '" + g.config_label +
                              "')");
        }
        if (g.precision != groups.front().precision) {
            throw DomainError("build_model: groups mix precisions ('" +
                              groups.front().config_label + "' vs '" + g.config_label +
                              "')");
        }
    }

    std::vector<Ceiling> ceilings;
    ceilings.reserve(groups.size());
    for (const auto& g : groups) {
        ceilings.push_back({g.config_label, g.kind, group_rate(g, stat), g.precision});
    }
    std::sort(ceilings.begin(), ceilings.end(), [](const Ceiling& a, const Ceiling& b) {
        return a.rate > b.rate;
    });
    // RooflineModel::create re-checks ordering and reports equal-rate pairs
    // by name, which is exactly the duplicate-config diagnostic we want.
    return RooflineModel::create(platform.name, platform.p_peak_w, groups.front().kind,
                                 groups.front().precision, std::move(ceilings));
}

std::vector<KernelPlacement> place_kernels(const RooflineModel* compute_model,
                                           const RooflineModel* memory_model,
                                           const std::vector<MeasurementRecord>& records) {
    if (compute_model == nullptr && memory_model == nullptr) {
        throw DomainError("place_kernels: no model given");
    }
    std::vector<KernelPlacement> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        DerivedMetrics m = derive_metrics(rec);
        KernelPlacement p;
        p.kernel_name = rec.kernel_name;
        p.config_label = rec.config_label;
        p.precision = rec.precision;
        if (m.e_w.has_value() && *m.e_w > 0.0) {
            p.compute_point = PlacementPoint{*m.e_w, m.power_w};
        }
        if (m.e_q.has_value() && *m.e_q > 0.0) {
            p.memory_point = PlacementPoint{*m.e_q, m.power_w};
        }
        if (!p.compute_point && !p.memory_point) {
            p.warnings.push_back("zero measured energy; nothing to place");
            out.push_back(std::move(p));
            continue;
        }

        const RooflineModel* model = nullptr;
        const PlacementPoint* point = nullptr;
        if (compute_model != nullptr && p.compute_point) {
            model = compute_model;
            point = &*p.compute_point;
        } else if (memory_model != nullptr && p.memory_point) {
            model = memory_model;
            point = &*p.memory_point;
        }
        if (model == nullptr) {
            p.warnings.push_back(
                "record '" + rec.kernel_name +
                "' has no point on the given model kind; not classified");
        } else {
            p.classification = classify(*model, point->e_per_unit);
            p.gap = gap_to_roofline(*model, model->top_ceiling().name, point->e_per_unit,
                                    point->power_w);
            if (point->power_w > model->p_peak_w() * (1.0 + kInconsistencyTol)) {
                p.warnings.push_back("inconsistent measurement: power " +
                                     std::to_string(point->power_w) +
                                     " W exceeds platform peak " +
                                     std::to_string(model->p_peak_w()) + " W");
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

ConfigDelta compare_configs(const KernelPlacement& before, const KernelPlacement& after) {
    if (before.kernel_name != after.kernel_name) {
        throw DomainError("compare_configs: placements are for different kernels ('" +
                          before.kernel_name + "' vs '" + after.kernel_name + "')");
    }
    if (before.precision != after.precision) {
        throw DomainError("compare_configs: placements are for different precisions");
    }
    const PlacementPoint* pb = nullptr;
    const PlacementPoint* pa = nullptr;
    if (before.compute_point && after.compute_point) {
        pb = &*before.compute_point;
        pa = &*after.compute_point;
    } else if (before.memory_point && after.memory_point) {
        pb = &*before.memory_point;
        pa = &*after.memory_point;
    } else {
        throw DomainError("compare_configs: placements share no point kind");
    }

    ConfigDelta d;
    d.kernel_name = before.kernel_name;
    d.config_before = before.config_label;
    d.config_after = after.config_label;
    d.delta_power_w = pa->power_w - pb->power_w;
    d.ee_ratio = pb->e_per_unit / pa->e_per_unit;
    d.gap_ratio_change =
        before.gap > 0.0 && after.gap > 0.0 ? after.gap / before.gap : 0.0;
    d.crossed_ridge = before.classification.has_value() &&
                      after.classification.has_value() &&
                      *before.classification != *after.classification;
    return d;
}

std::vector<StabilityRow> stability_report(
    const std::map<std::string, std::vector<MeasurementRecord>>& records_by_size) {
    // (kernel, config, precision) -> e_w per size label, aggregated by
    // median within a size.
    using Key = std::tuple<std::string, std::string, Precision>;
    std::map<Key, std::map<std::string, std::vector<double>>> ew;
    for (const auto& [size_label, records] : records_by_size) {
        for (const auto& rec : records) {
            DerivedMetrics m = derive_metrics(rec);
            if (!m.e_w.has_value()) {
                throw DomainError("stability_report: record '" + rec.kernel_name +
                                  "' in size '" + size_label +
                                  "' has no work; e_w undefined");
            }
            ew[{rec.kernel_name, rec.config_label, rec.precision}][size_label].push_back(
                *m.e_w);
        }
    }

    std::vector<StabilityRow> rows;
    for (const auto& [key, by_size] : ew) {
        if (by_size.size() < 2) {
            throw DomainError("stability_report: kernel '" + std::get<0>(key) +
                              "' config '" + std::get<1>(key) +
                              "' appears for fewer than two sizes");
        }
        std::vector<double> per_size;
        per_size.reserve(by_size.size());
        for (const auto& [label, vals] : by_size) {
            per_size.push_back(median(vals));
        }
        StabilityRow row;
        row.kernel_name = std::get<0>(key);
        row.config_label = std::get<1>(key);
        row.precision = std::get<2>(key);
        row.size_count = static_cast<int>(by_size.size());
        row.e_w_min = *std::min_element(per_size.begin(), per_size.end());
        row.e_w_max = *std::max_element(per_size.begin(), per_size.end());
        if (!(row.e_w_min > 0.0)) {
            throw DomainError("stability_report: kernel '" + row.kernel_name +
                              "' has a zero e_w; spread undefined");
        }
        row.spread = (row.e_w_max - row.e_w_min) / row.e_w_min;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace wattline
