#include "wattline/types.hpp"

#include <cmath>
#include <set>

#include "wattline/errors.hpp"

namespace wattline {

std::string_view to_string(Precision p) {
    switch (p) {
    case Precision::sp: return "sp";
    case Precision::dp: return "dp";
    case Precision::na: return "na";
    }
    return "na";
}

std::string_view to_string(CeilingKind k) {
    return k == CeilingKind::compute ? "compute" : "memory";
}

std::string_view to_string(Boundedness b) {
    switch (b) {
    case Boundedness::compute_bound: return "compute_bound";
    case Boundedness::power_bound: return "power_bound";
    case Boundedness::on_ridge: return "on_ridge";
    }
    return "on_ridge";
}

Precision precision_from_string(std::string_view s) {
    if (s == "sp") return Precision::sp;
    if (s == "dp") return Precision::dp;
    if (s == "na") return Precision::na;
    throw FormatError("unknown precision '" + std::string(s) +
                      "' (expected sp, dp or na)");
}

CeilingKind ceiling_kind_from_string(std::string_view s) {
    if (s == "compute") return CeilingKind::compute;
    if (s == "memory") return CeilingKind::memory;
    throw FormatError("unknown kind '" + std::string(s) +
                      "' (expected compute or memory)");
}

static void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw DomainError(std::string(what) + " must be finite");
}

void validate(const MeasurementRecord& rec) {
    require_finite(rec.work_flop, "W");
    require_finite(rec.traffic_bytes, "Q");
    require_finite(rec.time_s, "t");
    require_finite(rec.energy_j, "E");
    if (!(rec.time_s > 0.0))
        throw DomainError("record '" + rec.kernel_name + "': t must be > 0");
    if (rec.energy_j < 0.0)
        throw DomainError("record '" + rec.kernel_name + "': E must be >= 0");
    if (rec.work_flop < 0.0)
        throw DomainError("record '" + rec.kernel_name + "': W must be >= 0");
    if (rec.traffic_bytes < 0.0)
        throw DomainError("record '" + rec.kernel_name + "': Q must be >= 0");
    if (rec.work_flop == 0.0 && rec.traffic_bytes == 0.0)
        throw DomainError("record '" + rec.kernel_name +
                          "': at least one of W, Q must be > 0");
}

RooflineModel RooflineModel::create(std::string platform, double p_peak_w,
                                    CeilingKind kind, Precision precision,
                                    std::vector<Ceiling> ceilings) {
    require_finite(p_peak_w, "p_peak");
    if (!(p_peak_w > 0.0))
        throw DomainError("model '" + platform + "': p_peak must be > 0");
    if (ceilings.empty())
        throw DomainError("model '" + platform + "': needs at least one ceiling");

    std::set<std::string> names;
    for (std::size_t i = 0; i < ceilings.size(); ++i) {
        const Ceiling& c = ceilings[i];
        require_finite(c.rate, "ceiling rate");
        if (!(c.rate > 0.0))
            throw DomainError("ceiling '" + c.name + "': rate must be > 0");
        if (c.kind != kind)
            throw DomainError("ceiling '" + c.name + "': kind does not match model");
        if (c.precision != precision)
            throw DomainError("ceiling '" + c.name +
                              "': precision does not match model");
        if (!names.insert(c.name).second)
            throw DomainError("duplicate ceiling name '" + c.name + "'");
        if (i > 0) {
            if (c.rate == ceilings[i - 1].rate)
                throw DomainError("ceilings '" + ceilings[i - 1].name + "' and '" +
                                  c.name + "' have equal rates");
            if (c.rate > ceilings[i - 1].rate)
                throw DomainError("ceilings not sorted by descending rate ('" +
                                  ceilings[i - 1].name + "' before '" + c.name +
                                  "')");
        }
    }

    RooflineModel m;
    m.platform_ = std::move(platform);
    m.p_peak_w_ = p_peak_w;
    m.kind_ = kind;
    m.precision_ = precision;
    m.ceilings_ = std::move(ceilings);
    return m;
}

const Ceiling& RooflineModel::find_ceiling(std::string_view name) const {
    for (const Ceiling& c : ceilings_)
        if (c.name == name) return c;
    throw LookupError("no ceiling named '" + std::string(name) + "' in model '" +
                      platform_ + "'");
}

bool operator==(const Ceiling& a, const Ceiling& b) {
    return a.name == b.name && a.kind == b.kind && a.rate == b.rate &&
           a.precision == b.precision;
}

bool operator==(const RooflineModel& a, const RooflineModel& b) {
    return a.platform() == b.platform() && a.p_peak_w() == b.p_peak_w() &&
           a.kind() == b.kind() && a.precision() == b.precision() &&
           a.ceilings() == b.ceilings();
}

} // namespace wattline
