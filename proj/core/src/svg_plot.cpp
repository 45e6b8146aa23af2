#include "wattline/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wattline/errors.hpp"
#include "wattline/roofline.hpp"

namespace wattline {

namespace {

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

struct PlotPoint {
    std::string label;
    double e = 0.0; // J per unit
    double p_w = 0.0;
};

} // namespace

std::string render_roofline_svg(const RooflineModel& model,
                                const std::vector<MeasurementRecord>& records,
                                const PlotOptions& opts) {
    const bool compute = model.kind() == CeilingKind::compute;

    std::vector<PlotPoint> points;
    points.reserve(records.size());
    for (const auto& rec : records) {
        DerivedMetrics m = derive_metrics(rec);
        const auto& e = compute ? m.e_w : m.e_q;
        if (!e.has_value() || !(*e > 0.0)) {
            throw DomainError("plot: record '" + rec.kernel_name + "' has no " +
                              (compute ? "energy-per-flop" : "energy-per-byte") +
                              " coordinate for a " +
                              std::string(to_string(model.kind())) + " model");
        }
        points.push_back({rec.kernel_name + "/" + rec.config_label, *e, m.power_w});
    }

    // The top ceiling has the smallest ridge; ridges ascend as rates drop.
    double min_ridge = ridge_point(model.p_peak_w(), model.top_ceiling().rate);
    double max_ridge = ridge_point(model.p_peak_w(), model.ceilings().back().rate);

    double x_min = min_ridge / 10.0;
    double x_max = max_ridge;
    double y_min = model.p_peak_w() / 1000.0;
    double y_max = model.p_peak_w() * 2.0;
    for (const auto& pt : points) {
        x_max = std::max(x_max, pt.e);
        y_min = std::min(y_min, pt.p_w / 2.0);
        y_max = std::max(y_max, pt.p_w * 2.0);
    }
    x_max *= 10.0;

    const double ml = 70.0;
    const double mr = 170.0;
    const double mt = 46.0;
    const double mb = 56.0;
    const double pw = opts.width - ml - mr;
    const double ph = opts.height - mt - mb;
    const double lx0 = std::log10(x_min);
    const double lx1 = std::log10(x_max);
    const double ly0 = std::log10(y_min);
    const double ly1 = std::log10(y_max);

    auto px = [&](double x) { return ml + (std::log10(x) - lx0) / (lx1 - lx0) * pw; };
    auto py = [&](double y) { return mt + (ly1 - std::log10(y)) / (ly1 - ly0) * ph; };

    // Display scale: SI J/FLOP (or J/byte) shown as J/GFLOP (or J/GB).
    const double disp = 1e9;
    const char* x_unit = compute ? "J/GFLOP" : "J/GB";
    const char* rate_unit = compute ? "GFLOP/s" : "GB/s";

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(opts.width) + "\" height=\"" + std::to_string(opts.height) +
         "\" viewBox=\"0 0 " + std::to_string(opts.width) + " " +
         std::to_string(opts.height) + "\">\n";
    s += "<title>" + xml_escape(model.platform()) + " (" +
         std::string(to_string(model.kind())) + ", " +
         std::string(to_string(model.precision())) + ")</title>\n";
    s += "<style>\n"
         "text{font-family:sans-serif;font-size:12px;fill:#222}\n"
         ".bg{fill:#ffffff}\n"
         ".grid{stroke:#dddddd;stroke-width:1}\n"
         ".axis{stroke:#222222;stroke-width:1.5}\n"
         ".ceiling{stroke:#1f6fb2;stroke-width:1.5;fill:none}\n"
         ".roof{stroke:#b22222;stroke-width:2}\n"
         ".point{fill:#2a7d2a}\n"
         ".title{font-size:14px;font-weight:bold}\n"
         "</style>\n";
    s += "<rect class=\"bg\" x=\"0\" y=\"0\" width=\"" + std::to_string(opts.width) +
         "\" height=\"" + std::to_string(opts.height) + "\"/>\n";
    s += "<text class=\"title\" x=\"" + fmt2(ml) + "\" y=\"24\">" +
         xml_escape(model.platform()) + " \xE2\x80\x94 power roofline (" +
         std::string(to_string(model.precision())) + ")</text>\n";

    // Decade grid.
    s += "<g class=\"gridlines\">\n";
    for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1));
         ++d) {
        double x = std::pow(10.0, d);
        s += "<line class=\"grid\" x1=\"" + fmt2(px(x)) + "\" y1=\"" + fmt2(mt) +
             "\" x2=\"" + fmt2(px(x)) + "\" y2=\"" + fmt2(mt + ph) + "\"/>\n";
        s += "<text x=\"" + fmt2(px(x)) + "\" y=\"" + fmt2(mt + ph + 16.0) +
             "\" text-anchor=\"middle\">" + fmtg(x * disp) + "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1));
         ++d) {
        double y = std::pow(10.0, d);
        s += "<line class=\"grid\" x1=\"" + fmt2(ml) + "\" y1=\"" + fmt2(py(y)) +
             "\" x2=\"" + fmt2(ml + pw) + "\" y2=\"" + fmt2(py(y)) + "\"/>\n";
        s += "<text x=\"" + fmt2(ml - 8.0) + "\" y=\"" + fmt2(py(y) + 4.0) +
             "\" text-anchor=\"end\">" + fmtg(y) + "</text>\n";
    }
    s += "</g>\n";

    // Axes and labels.
    s += "<line class=\"axis\" x1=\"" + fmt2(ml) + "\" y1=\"" + fmt2(mt + ph) +
         "\" x2=\"" + fmt2(ml + pw) + "\" y2=\"" + fmt2(mt + ph) + "\"/>\n";
    s += "<line class=\"axis\" x1=\"" + fmt2(ml) + "\" y1=\"" + fmt2(mt) + "\" x2=\"" +
         fmt2(ml) + "\" y2=\"" + fmt2(mt + ph) + "\"/>\n";
    s += "<text x=\"" + fmt2(ml + pw / 2.0) + "\" y=\"" +
         fmt2(static_cast<double>(opts.height) - 12.0) +
         "\" text-anchor=\"middle\">energy per operation [" + std::string(x_unit) +
         "]</text>\n";
    s += "<text x=\"18\" y=\"" + fmt2(mt + ph / 2.0) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + fmt2(mt + ph / 2.0) +
         ")\">power [W]</text>\n";

    // Sloped ceilings: each rises at slope 1 (log-log) and meets the roof
    // at its ridge. The roof's y-coordinate is computed by the same py()
    // call, so the meeting point is exact in the emitted coordinates.
    const std::string roof_y = fmt2(py(model.p_peak_w()));
    s += "<g class=\"ceilings\">\n";
    for (const Ceiling& c : model.ceilings()) {
        double ridge = ridge_point(model.p_peak_w(), c.rate);
        double x_start = std::max(x_min, y_min / c.rate);
        double p_start = x_start * c.rate;
        s += "<polyline class=\"ceiling\" points=\"" + fmt2(px(x_start)) + "," +
             fmt2(py(p_start)) + " " + fmt2(px(ridge)) + "," + roof_y + "\"/>\n";
        double label_x = std::sqrt(x_start * ridge); // log-midpoint of the segment
        double label_p = label_x * c.rate;
        s += "<text class=\"ceiling-label\" x=\"" + fmt2(px(label_x) + 6.0) + "\" y=\"" +
             fmt2(py(label_p)) + "\">" + xml_escape(c.name) + " (" +
             fmtg(c.rate / 1e9) + " " + rate_unit + ")</text>\n";
    }
    s += "</g>\n";
    s += "<line class=\"roof\" x1=\"" + fmt2(px(min_ridge)) + "\" y1=\"" + roof_y +
         "\" x2=\"" + fmt2(ml + pw) + "\" y2=\"" + roof_y + "\"/>\n";
    s += "<text x=\"" + fmt2(ml + pw - 4.0) + "\" y=\"" +
         fmt2(py(model.p_peak_w()) - 6.0) + "\" text-anchor=\"end\">P_peak " +
         fmtg(model.p_peak_w()) + " W</text>\n";

    // Kernel points.
    s += "<g class=\"points\">\n";
    for (const auto& pt : points) {
        s += "<circle class=\"point\" cx=\"" + fmt2(px(pt.e)) + "\" cy=\"" +
             fmt2(py(pt.p_w)) + "\" r=\"4\"/>\n";
        s += "<text class=\"point-label\" x=\"" + fmt2(px(pt.e) + 7.0) + "\" y=\"" +
             fmt2(py(pt.p_w) - 7.0) + "\">" + xml_escape(pt.label) + "</text>\n";
    }
    s += "</g>\n";
    s += "</svg>\n";
    return s;
}

} // namespace wattline
