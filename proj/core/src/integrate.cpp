#include "wattline/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "json.hpp"

#include "wattline/errors.hpp"
#include "wattline/numeric.hpp"

namespace wattline {

namespace {

struct Node {
    double t_us;
    double p_mw;
};

// Endpoint nodes plus every sample strictly inside (t0, t1). `interpolated`
// is set when either endpoint had no exact sample and its power had to be
// interpolated or extended. `inside_count` counts samples with
// t0 <= t <= t1.
struct WindowNodes {
    std::vector<Node> nodes;
    bool interpolated = false;
    size_t inside_count = 0;
};

double lerp_p(const PowerSample& a, const PowerSample& b, int64_t t) {
    double f = static_cast<double>(t - a.t_us) / static_cast<double>(b.t_us - a.t_us);
    return static_cast<double>(a.p_mw) + f * static_cast<double>(b.p_mw - a.p_mw);
}

WindowNodes window_nodes(std::span<const PowerSample> samples, int64_t t0_us,
                         int64_t t1_us) {
    if (t1_us < t0_us) {
        throw DomainError("integrate_region: window end precedes start");
    }
    auto by_t = [](const PowerSample& s, int64_t t) { return s.t_us < t; };
    auto lo = std::lower_bound(samples.begin(), samples.end(), t0_us, by_t);
    auto hi = std::lower_bound(samples.begin(), samples.end(), t1_us + 1, by_t);
    const bool have_inside = lo != hi;
    const bool have_before = lo != samples.begin();
    const bool have_after = hi != samples.end();

    WindowNodes w;
    w.inside_count = static_cast<size_t>(hi - lo);

    if (t0_us == t1_us) {
        // Degenerate window: a single node.
        double p;
        bool exact = have_inside; // a sample exactly at t0
        if (exact) {
            p = static_cast<double>(lo->p_mw);
        } else if (have_before && have_after) {
            p = lerp_p(*(lo - 1), *hi, t0_us);
        } else if (have_before) {
            p = static_cast<double>((lo - 1)->p_mw);
        } else if (have_after) {
            p = static_cast<double>(hi->p_mw);
        } else {
            throw DomainError("integrate_region: no samples to evaluate");
        }
        w.nodes.push_back({static_cast<double>(t0_us), p});
        w.interpolated = !exact;
        return w;
    }

    if (!have_inside && !(have_before && have_after)) {
        throw DomainError("integrate_region: window [" + std::to_string(t0_us) + ", " +
                          std::to_string(t1_us) +
                          "] µs has no interior samples and is not bracketed");
    }

    double p0;
    bool exact0 = have_inside && lo->t_us == t0_us;
    if (exact0) {
        p0 = static_cast<double>(lo->p_mw);
    } else if (have_before) {
        const PowerSample& next = have_inside ? *lo : *hi;
        p0 = lerp_p(*(lo - 1), next, t0_us);
    } else {
        // Window starts before the first sample: extend the first interior
        // sample's value to t0.
        p0 = static_cast<double>(lo->p_mw);
    }

    double p1;
    bool exact1 = have_inside && (hi - 1)->t_us == t1_us;
    if (exact1) {
        p1 = static_cast<double>((hi - 1)->p_mw);
    } else if (have_after) {
        const PowerSample& prev = have_inside ? *(hi - 1) : *(lo - 1);
        p1 = lerp_p(prev, *hi, t1_us);
    } else {
        p1 = static_cast<double>((hi - 1)->p_mw);
    }

    w.nodes.push_back({static_cast<double>(t0_us), p0});
    for (auto it = lo; it != hi; ++it) {
        if (it->t_us > t0_us && it->t_us < t1_us) {
            w.nodes.push_back({static_cast<double>(it->t_us),
                               static_cast<double>(it->p_mw)});
        }
    }
    w.nodes.push_back({static_cast<double>(t1_us), p1});
    w.interpolated = !exact0 || !exact1;
    return w;
}

// Trapezoid over the node chain; mW·µs summed pairwise, one 1e-9 factor at
// the end turns it into joules.
double trapezoid_joules(const std::vector<Node>& nodes) {
    if (nodes.size() < 2) {
        return 0.0;
    }
    std::vector<double> terms(nodes.size() - 1);
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        terms[i] = 0.5 * (nodes[i].p_mw + nodes[i + 1].p_mw) *
                   (nodes[i + 1].t_us - nodes[i].t_us);
    }
    return pairwise_sum(terms) * 1e-9;
}

} // namespace

double integrate_region(std::span<const PowerSample> samples, int64_t t0_us,
                        int64_t t1_us) {
    return trapezoid_joules(window_nodes(samples, t0_us, t1_us).nodes);
}

RegionReport region_report(std::span<const PowerSample> samples,
                           const LogRegion& region) {
    WindowNodes w;
    try {
        w = window_nodes(samples, region.t_begin_us, region.t_end_us);
    } catch (const DomainError& e) {
        throw DomainError("region '" + region.name + "': " + e.what());
    }

    RegionReport rep;
    rep.name = region.name;
    rep.duration_s = static_cast<double>(region.t_end_us - region.t_begin_us) * 1e-6;
    rep.energy_j = trapezoid_joules(w.nodes);
    rep.sample_count = static_cast<int64_t>(w.inside_count);
    rep.boundary_interpolated = w.interpolated;

    double mn = w.nodes.front().p_mw;
    double mx = mn;
    for (const Node& n : w.nodes) {
        mn = std::min(mn, n.p_mw);
        mx = std::max(mx, n.p_mw);
    }
    rep.min_power_w = mn * 1e-3;
    rep.max_power_w = mx * 1e-3;
    rep.avg_power_w = rep.duration_s > 0.0 ? rep.energy_j / rep.duration_s
                                           : w.nodes.front().p_mw * 1e-3;
    return rep;
}

RegionReport region_report(const ParsedLog& log, std::string_view name) {
    for (const LogRegion& r : log.regions) {
        if (r.name == name) {
            return region_report(log.samples, r);
        }
    }
    throw LookupError("region '" + std::string(name) + "' not found in log");
}

std::string region_report_json(const RegionReport& rep) {
    nlohmann::ordered_json j;
    j["name"] = rep.name;
    j["duration_s"] = rep.duration_s;
    j["energy_j"] = rep.energy_j;
    j["avg_power_w"] = rep.avg_power_w;
    j["min_power_w"] = rep.min_power_w;
    j["max_power_w"] = rep.max_power_w;
    j["sample_count"] = rep.sample_count;
    j["boundary_interpolated"] = rep.boundary_interpolated;
    return j.dump(2);
}

MeasurementRecord to_measurement_record(const RegionReport& rep, double work_flop,
                                        double traffic_bytes, std::string kernel,
                                        std::string config, Precision precision) {
    if (work_flop < 0.0 || traffic_bytes < 0.0) {
        throw DomainError("to_measurement_record: W and Q must be non-negative");
    }
    if (work_flop == 0.0 && traffic_bytes == 0.0) {
        throw DomainError("to_measurement_record: unplaceable record, both W and Q zero");
    }
    MeasurementRecord rec;
    rec.kernel_name = kernel.empty() ? rep.name : std::move(kernel);
    rec.config_label = std::move(config);
    rec.precision = precision;
    rec.work_flop = work_flop;
    rec.traffic_bytes = traffic_bytes;
    rec.time_s = rep.duration_s;
    rec.energy_j = rep.energy_j;
    validate(rec);
    return rec;
}

} // namespace wattline
