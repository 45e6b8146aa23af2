#include "wattline/roofline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wattline/errors.hpp"

namespace wattline {

DerivedMetrics derive_metrics(const MeasurementRecord& rec) {
    validate(rec);
    DerivedMetrics m;
    m.power_w = rec.energy_j / rec.time_s;
    m.perf_flops = rec.work_flop / rec.time_s;
    m.bandwidth_bps = rec.traffic_bytes / rec.time_s;
    if (rec.work_flop > 0.0) {
        m.e_w = rec.energy_j / rec.work_flop;
    }
    if (rec.traffic_bytes > 0.0) {
        m.e_q = rec.energy_j / rec.traffic_bytes;
    }
    if (rec.energy_j > 0.0) {
        m.ee_comp = rec.work_flop / rec.energy_j;
        m.ee_mem = rec.traffic_bytes / rec.energy_j;
    }
    return m;
}

double ridge_point(double p_peak_w, double rate) {
    if (!(p_peak_w > 0.0) || !std::isfinite(p_peak_w)) {
        throw DomainError("ridge_point: p_peak_w must be positive and finite");
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw DomainError("ridge_point: rate must be positive and finite");
    }
    return p_peak_w / rate;
}

double attainable_power(const RooflineModel& model, std::string_view ceiling_name,
                        double e_per_unit) {
    const Ceiling& c = model.find_ceiling(ceiling_name);
    if (!(e_per_unit > 0.0) || !std::isfinite(e_per_unit)) {
        throw DomainError("attainable_power: e_per_unit must be positive and finite");
    }
    return std::min(e_per_unit * c.rate, model.p_peak_w());
}

Boundedness classify(const RooflineModel& model, std::string_view ceiling_name,
                     double e_per_unit, double tol) {
    const Ceiling& c = model.find_ceiling(ceiling_name);
    if (!(e_per_unit > 0.0) || !std::isfinite(e_per_unit)) {
        throw DomainError("classify: e_per_unit must be positive and finite");
    }
    if (!(tol >= 0.0) || !std::isfinite(tol)) {
        throw DomainError("classify: tol must be non-negative and finite");
    }
    double ridge = model.p_peak_w() / c.rate;
    if (std::abs(e_per_unit - ridge) <= tol * ridge) {
        return Boundedness::on_ridge;
    }
    return e_per_unit < ridge ? Boundedness::compute_bound : Boundedness::power_bound;
}

Boundedness classify(const RooflineModel& model, double e_per_unit, double tol) {
    return classify(model, model.top_ceiling().name, e_per_unit, tol);
}

double gap_to_roofline(const RooflineModel& model, std::string_view ceiling_name,
                       double e_per_unit, double power_w) {
    if (!(power_w > 0.0) || !std::isfinite(power_w)) {
        throw DomainError("gap_to_roofline: power_w must be positive and finite");
    }
    return power_w / attainable_power(model, ceiling_name, e_per_unit);
}

} // namespace wattline
