#pragma once

#include <string>
#include <vector>

#include "wattline/types.hpp"

namespace wattline {

struct PlotOptions {
    int width = 820;
    int height = 560;
};

// Log-log roofline plot: energy per operation on X (displayed as J/GFLOP or
// J/GB), power in watts on Y. One polyline per ceiling rising to the roof
// at its ridge, one roof line at p_peak, records as labeled points. Output
// is deterministic byte-for-byte for identical inputs; elements carry
// classes (grid/ceiling/roof/point) so tests can assert structure. Records
// lacking the coordinate the model kind needs (e.g. W=0 on a compute plot)
// raise DomainError.
std::string render_roofline_svg(const RooflineModel& model,
                                const std::vector<MeasurementRecord>& records = {},
                                const PlotOptions& opts = {});

} // namespace wattline
