// wattline: region-scoped power sampling, energy accounting and
// power-roofline analysis from the command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "wattline/energy_model.hpp"
#include "wattline/errors.hpp"
#include "wattline/integrate.hpp"
#include "wattline/model_builder.hpp"
#include "wattline/model_io.hpp"
#include "wattline/records_io.hpp"
#include "wattline/roofline.hpp"
#include "wattline/sample_log.hpp"
#include "wattline/sampler.hpp"
#include "wattline/subprocess.hpp"
#include "wattline/svg_plot.hpp"

namespace {

using nlohmann::ordered_json;
using namespace wattline;

// Exit codes, kept stable: 0 ok; 1 domain/fit/other; 2 source; 3 format;
// 4 lifecycle; 5 lookup; 64 usage; 127 child could not be executed;
// 128+N child killed by signal N; a child's nonzero exit is passed through.
constexpr int kExitUsage = 64;
constexpr int kExitSpawn = 127;

bool use_color() {
    static const bool v = isatty(STDERR_FILENO) != 0 &&
                          std::getenv("WATTLINE_NO_COLOR") == nullptr;
    return v;
}

void report_error(const std::string& msg) {
    if (use_color()) {
        std::cerr << "\x1b[31merror:\x1b[0m " << msg << '\n';
    } else {
        std::cerr << "error: " << msg << '\n';
    }
}

template <typename F> int guarded(F&& f) {
    try {
        return f();
    } catch (const SpawnError& e) {
        report_error(e.what());
        return kExitSpawn;
    } catch (const SourceError& e) {
        report_error(e.what());
        return 2;
    } catch (const FormatError& e) {
        report_error(e.what());
        return 3;
    } catch (const LifecycleError& e) {
        report_error(e.what());
        return 4;
    } catch (const LookupError& e) {
        report_error(e.what());
        return 5;
    } catch (const std::exception& e) {
        report_error(e.what());
        return 1;
    }
}

std::string slurp(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// `-` means stdin for records tables.
std::vector<MeasurementRecord> read_records(const std::string& path, bool lenient) {
    if (path == "-") {
        return records_from_csv_text(slurp(std::cin), lenient);
    }
    return load_records(path, lenient);
}

struct SampleArgs {
    std::string source;
    double period_ms = 2.0;
    std::string out;
    std::string region_name;
    size_t buffer_capacity = 1024;
    double virtual_ms = 0.0;
    bool json = false;
    std::vector<std::string> child;
};

ordered_json summary_json(const LogSummary& s) {
    ordered_json j;
    j["sample_count"] = s.sample_count;
    j["region_count"] = s.region_count;
    j["dropped_samples"] = s.dropped_samples;
    j["read_errors"] = s.read_errors;
    j["flush_count"] = s.flush_count;
    j["truncated"] = s.truncated;
    j["source_ended"] = s.source_ended;
    return j;
}

void print_summary_warnings(const LogSummary& s) {
    if (s.source_ended) {
        std::cerr << "warning: power source ended mid-run; later samples are missing\n";
    }
    if (s.dropped_samples > 0) {
        std::cerr << "warning: " << s.dropped_samples << " samples dropped on flush\n";
    }
    if (s.read_errors > 0) {
        std::cerr << "warning: " << s.read_errors << " failed source reads\n";
    }
    if (s.truncated) {
        std::cerr << "warning: active region auto-closed at finalize\n";
    }
}

int cmd_sample(const SampleArgs& a) {
    if (a.period_ms <= 0.0) {
        throw DomainError("sample: --period-ms must be > 0");
    }
    const bool virt = a.virtual_ms > 0.0;
    if (!virt && a.child.empty()) {
        report_error("sample: no child command given (use `-- <command...>`, or "
                     "--virtual-ms to synthesize a run)");
        return kExitUsage;
    }

    std::string region = a.region_name;
    if (region.empty()) {
        region = a.child.empty()
                     ? "virtual"
                     : std::filesystem::path(a.child.front()).filename().string();
    }

    SamplerConfig cfg;
    cfg.source = parse_source_spec(a.source);
    cfg.out_path = a.out;
    cfg.period_us = static_cast<int64_t>(a.period_ms * 1000.0);
    cfg.buffer_capacity = a.buffer_capacity;
    if (virt) {
        cfg.clock = std::make_shared<VirtualClock>();
    }

    Sampler sampler(cfg);
    int child_exit = 0;
    int child_signal = 0;

    if (virt) {
        // Deterministic timeline: one region spanning exactly the requested
        // duration, the child (if any) run outside virtual time.
        sampler.region_start(region);
        sampler.advance_virtual(static_cast<int64_t>(a.virtual_ms * 1000.0));
        sampler.region_stop(region);
        if (!a.child.empty()) {
            RunStatus rs = run_passthrough(a.child);
            child_exit = rs.exit_code;
            child_signal = rs.term_signal;
        }
    } else {
        sampler.region_start(region);
        try {
            RunStatus rs = run_passthrough(a.child);
            child_exit = rs.exit_code;
            child_signal = rs.term_signal;
        } catch (...) {
            // Leave a parseable log behind even when the child never ran.
            sampler.region_stop(region);
            sampler.finalize();
            throw;
        }
        sampler.region_stop(region);
    }
    LogSummary s = sampler.finalize();

    if (a.json) {
        ordered_json j = summary_json(s);
        j["log"] = a.out;
        j["region"] = region;
        j["child_exit"] = child_exit;
        j["child_signal"] = child_signal;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "wrote " << a.out << ": " << s.sample_count << " samples, "
                  << s.region_count << " region" << (s.region_count == 1 ? "" : "s")
                  << " (region '" << region << "')\n";
        print_summary_warnings(s);
    }
    if (child_signal != 0) {
        return 128 + child_signal;
    }
    return child_exit;
}

struct IntegrateArgs {
    std::string log;
    std::string region;
    bool json = false;
};

void print_report_human(const RegionReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s: %.6g s, %.6g J, avg %.6g W (min %.6g, max %.6g), %lld samples%s\n",
                  r.name.c_str(), r.duration_s, r.energy_j, r.avg_power_w, r.min_power_w,
                  r.max_power_w, static_cast<long long>(r.sample_count),
                  r.boundary_interpolated ? ", boundary interpolated" : "");
    std::cout << buf;
}

int cmd_integrate(const IntegrateArgs& a) {
    ParsedLog log = parse_log(a.log);
    if (!a.region.empty()) {
        RegionReport r = region_report(log, a.region);
        if (a.json) {
            std::cout << region_report_json(r) << '\n';
        } else {
            print_report_human(r);
        }
        return 0;
    }
    if (a.json) {
        std::string out = "[";
        for (size_t i = 0; i < log.regions.size(); ++i) {
            out += i == 0 ? "\n" : ",\n";
            out += region_report_json(region_report(log.samples, log.regions[i]));
        }
        out += log.regions.empty() ? "]" : "\n]";
        std::cout << out << '\n';
    } else {
        if (log.regions.empty()) {
            std::cout << "no regions in " << a.log << '\n';
        }
        for (const auto& reg : log.regions) {
            print_report_human(region_report(log.samples, reg));
        }
    }
    return 0;
}

struct ModelBuildArgs {
    std::string platform;
    std::string records;
    std::string kind = "compute";
    std::string precision;
    std::string out;
    std::string stat = "median";
    bool lenient = false;
    bool json = false;
};

int cmd_model_build(const ModelBuildArgs& a) {
    PlatformSpec platform = load_platform(a.platform, a.lenient);
    CeilingKind kind = ceiling_kind_from_string(a.kind);
    Precision precision = precision_from_string(a.precision);
    RateStatistic stat;
    if (a.stat == "median") {
        stat = RateStatistic::median;
    } else if (a.stat == "max") {
        stat = RateStatistic::max;
    } else {
        throw DomainError("model build: --stat must be median or max");
    }

    std::vector<MeasurementRecord> records = read_records(a.records, a.lenient);
    // One group per config label, first-appearance order (the built model
    // sorts by rate regardless).
    std::vector<CeilingRecordGroup> groups;
    for (auto& rec : records) {
        if (rec.precision != precision) {
            continue;
        }
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
            return g.config_label == rec.config_label;
        });
        if (it == groups.end()) {
            groups.push_back({rec.config_label, kind, precision, {}});
            it = groups.end() - 1;
        }
        it->records.push_back(std::move(rec));
    }
    if (groups.empty()) {
        throw DomainError("model build: no records with precision '" + a.precision +
                          "' in " + a.records);
    }

    RooflineModel model = build_model(platform, groups, stat);
    save_model(model, a.out);

    if (a.json) {
        std::cout << model_to_json(model);
    } else {
        std::cout << "wrote " << a.out << ": " << model.platform() << " ("
                  << to_string(model.kind()) << ", " << to_string(model.precision())
                  << "), p_peak " << model.p_peak_w() << " W\n";
        for (const auto& c : model.ceilings()) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "  %-24s %10.4g G%s  ridge %.4g %s\n",
                          c.name.c_str(), c.rate / 1e9,
                          kind == CeilingKind::compute ? "FLOP/s" : "B/s",
                          ridge_point(model.p_peak_w(), c.rate) * 1e9,
                          kind == CeilingKind::compute ? "J/GFLOP" : "J/GB");
            std::cout << buf;
        }
    }
    return 0;
}

struct AnalyzeArgs {
    std::string model;
    std::string memory_model;
    std::string records;
    std::string compare;
    bool fit = false;
    bool lenient = false;
    bool json = false;
};

ordered_json placement_json(const KernelPlacement& p) {
    ordered_json j;
    j["kernel"] = p.kernel_name;
    j["config"] = p.config_label;
    j["precision"] = std::string(to_string(p.precision));
    if (p.compute_point) {
        j["e_w"] = p.compute_point->e_per_unit;
    }
    if (p.memory_point) {
        j["e_q"] = p.memory_point->e_per_unit;
    }
    if (p.compute_point || p.memory_point) {
        j["power_w"] =
            p.compute_point ? p.compute_point->power_w : p.memory_point->power_w;
    }
    if (p.classification) {
        j["classification"] = std::string(to_string(*p.classification));
        j["gap"] = p.gap;
    }
    j["warnings"] = p.warnings;
    return j;
}

ordered_json delta_json(const ConfigDelta& d) {
    ordered_json j;
    j["kernel"] = d.kernel_name;
    j["config_before"] = d.config_before;
    j["config_after"] = d.config_after;
    j["delta_power_w"] = d.delta_power_w;
    j["ee_ratio"] = d.ee_ratio;
    j["gap_ratio_change"] = d.gap_ratio_change;
    j["crossed_ridge"] = d.crossed_ridge;
    return j;
}

int cmd_analyze(const AnalyzeArgs& a) {
    std::vector<MeasurementRecord> records = read_records(a.records, a.lenient);

    if (a.fit) {
        EnergyCoefficients c = fit_energy_coefficients(records);
        ordered_json j;
        j["eps_flop"] = c.eps_flop;
        j["eps_mem"] = c.eps_mem;
        j["e0"] = c.e0;
        j["residual_rms"] = c.residual_rms;
        j["clamped"] = c.clamped;
        if (a.json) {
            std::cout << j.dump(2) << '\n';
        } else {
            char buf[200];
            std::snprintf(buf, sizeof(buf),
                          "eps_flop %.6e J/FLOP, eps_mem %.6e J/B, E0 %.6e J "
                          "(residual rms %.3e J%s)\n",
                          c.eps_flop, c.eps_mem, c.e0, c.residual_rms,
                          c.clamped ? ", clamped" : "");
            std::cout << buf;
        }
        return 0;
    }

    RooflineModel primary = load_model(a.model, a.lenient);
    std::optional<RooflineModel> secondary;
    if (!a.memory_model.empty()) {
        secondary = load_model(a.memory_model, a.lenient);
        if (secondary->kind() != CeilingKind::memory) {
            throw DomainError("analyze: --memory-model must hold a memory-kind model");
        }
        if (primary.kind() != CeilingKind::compute) {
            throw DomainError(
                "analyze: --model must be compute-kind when --memory-model is given");
        }
    }
    const RooflineModel* cm =
        primary.kind() == CeilingKind::compute ? &primary : nullptr;
    const RooflineModel* mm = secondary ? &*secondary
                              : primary.kind() == CeilingKind::memory ? &primary
                                                                      : nullptr;

    std::vector<KernelPlacement> placements = place_kernels(cm, mm, records);

    std::vector<ConfigDelta> deltas;
    if (!a.compare.empty()) {
        auto comma = a.compare.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 == a.compare.size()) {
            throw DomainError("analyze: --compare wants '<configA>,<configB>'");
        }
        std::string before = a.compare.substr(0, comma);
        std::string after = a.compare.substr(comma + 1);
        for (const auto& pb : placements) {
            if (pb.config_label != before) {
                continue;
            }
            for (const auto& pa : placements) {
                if (pa.config_label == after && pa.kernel_name == pb.kernel_name &&
                    pa.precision == pb.precision) {
                    deltas.push_back(compare_configs(pb, pa));
                }
            }
        }
        if (deltas.empty()) {
            throw LookupError("analyze: no kernel appears in both config '" + before +
                              "' and config '" + after + "'");
        }
    }

    if (a.json) {
        if (deltas.empty() && a.compare.empty()) {
            ordered_json arr = ordered_json::array();
            for (const auto& p : placements) {
                arr.push_back(placement_json(p));
            }
            std::cout << arr.dump(2) << '\n';
        } else {
            ordered_json j;
            j["placements"] = ordered_json::array();
            for (const auto& p : placements) {
                j["placements"].push_back(placement_json(p));
            }
            j["deltas"] = ordered_json::array();
            for (const auto& d : deltas) {
                j["deltas"].push_back(delta_json(d));
            }
            std::cout << j.dump(2) << '\n';
        }
    } else {
        for (const auto& p : placements) {
            std::cout << p.kernel_name << "/" << p.config_label << " ["
                      << to_string(p.precision) << "]";
            char buf[200];
            if (p.compute_point) {
                std::snprintf(buf, sizeof(buf), "  e_w %.4g J/GFLOP",
                              p.compute_point->e_per_unit * 1e9);
                std::cout << buf;
            }
            if (p.memory_point) {
                std::snprintf(buf, sizeof(buf), "  e_q %.4g J/GB",
                              p.memory_point->e_per_unit * 1e9);
                std::cout << buf;
            }
            if (p.compute_point || p.memory_point) {
                std::snprintf(buf, sizeof(buf), "  P %.4g W",
                              p.compute_point ? p.compute_point->power_w
                                              : p.memory_point->power_w);
                std::cout << buf;
            }
            if (p.classification) {
                std::snprintf(buf, sizeof(buf), "  -> %s (gap %.3g)",
                              std::string(to_string(*p.classification)).c_str(), p.gap);
                std::cout << buf;
            }
            std::cout << '\n';
            for (const auto& w : p.warnings) {
                std::cout << "  warning: " << w << '\n';
            }
        }
        for (const auto& d : deltas) {
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "%s: %s -> %s: delta P %+.4g W, EE ratio %.4g%s\n",
                          d.kernel_name.c_str(), d.config_before.c_str(),
                          d.config_after.c_str(), d.delta_power_w, d.ee_ratio,
                          d.crossed_ridge ? ", crossed ridge" : "");
            std::cout << buf;
        }
    }
    return 0;
}

struct PlotArgs {
    std::string model;
    std::string records;
    std::string out;
    int width = 820;
    int height = 560;
    bool lenient = false;
    bool json = false;
};

int cmd_plot(const PlotArgs& a) {
    RooflineModel model = load_model(a.model, a.lenient);
    std::vector<MeasurementRecord> records;
    if (!a.records.empty()) {
        records = read_records(a.records, a.lenient);
    }
    PlotOptions opts;
    opts.width = a.width;
    opts.height = a.height;
    std::string svg = render_roofline_svg(model, records, opts);

    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + a.out + "' for writing");
    }
    out << svg;
    out.flush();
    if (!out) {
        throw Error("failed writing plot to '" + a.out + "'");
    }
    if (a.json) {
        ordered_json j;
        j["out"] = a.out;
        j["bytes"] = svg.size();
        j["ceilings"] = model.ceilings().size();
        j["points"] = records.size();
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "wrote " << a.out << " (" << model.ceilings().size()
                  << " ceilings, " << records.size() << " points)\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    // Everything after a literal `--` is the child command for `sample`;
    // split it off before CLI11 can interpret the child's own flags.
    std::vector<std::string> child;
    int own_argc = argc;
    for (int i = 1; i < argc; ++i) {
        if (std::string_view(argv[i]) == "--") {
            for (int j = i + 1; j < argc; ++j) {
                child.emplace_back(argv[j]);
            }
            own_argc = i;
            break;
        }
    }

    CLI::App app{"region-scoped power sampling and power-roofline analysis"};
    app.require_subcommand(1);

    SampleArgs sa;
    sa.child = child;
    auto* sample = app.add_subcommand(
        "sample", "sample power around a child command into a log");
    sample->add_option("--source", sa.source,
                       "power source spec (synthetic:constant:<mw>, "
                       "synthetic:ramp:<mw0>:<mw1>:<ms>, "
                       "synthetic:sinusoid:<mean>:<amp>:<period_ms>, trace:<path>, "
                       "rapl:<path>[:max_uj], cmd:<exe>[:<arg>...])")
        ->required();
    sample->add_option("--period-ms", sa.period_ms, "sampling period in ms [2]");
    sample->add_option("--out", sa.out, "log file to write")->required();
    sample->add_option("--region-name", sa.region_name,
                       "region name [child executable basename]");
    sample->add_option("--buffer-capacity", sa.buffer_capacity,
                       "samples buffered between flushes [1024]");
    sample->add_option("--virtual-ms", sa.virtual_ms,
                       "run on a virtual clock: synthesize a region of this many ms");
    sample->add_flag("--json", sa.json, "machine-readable summary");

    IntegrateArgs ia;
    auto* integrate =
        app.add_subcommand("integrate", "compute per-region energy from a log");
    integrate->add_option("--log", ia.log, "sample log file")->required();
    integrate->add_option("--region", ia.region, "only this region");
    integrate->add_flag("--json", ia.json, "machine-readable reports");

    auto* model = app.add_subcommand("model", "roofline model operations");
    model->require_subcommand(1);
    ModelBuildArgs ma;
    auto* model_build =
        model->add_subcommand("build", "build a model from grouped records");
    model_build->add_option("--platform", ma.platform, "platform JSON file")->required();
    model_build->add_option("--records", ma.records, "records CSV (or - for stdin)")
        ->required();
    model_build->add_option("--kind", ma.kind, "compute|memory [compute]");
    model_build->add_option("--precision", ma.precision, "sp|dp|na")->required();
    model_build->add_option("--out", ma.out, "model JSON to write")->required();
    model_build->add_option("--stat", ma.stat, "rate statistic: median|max [median]");
    model_build->add_flag("--lenient", ma.lenient, "ignore unknown keys/columns");
    model_build->add_flag("--json", ma.json, "print the model document");

    AnalyzeArgs aa;
    auto* analyze =
        app.add_subcommand("analyze", "place records on a model, compare configs, fit");
    analyze->add_option("--model", aa.model, "model JSON");
    analyze->add_option("--memory-model", aa.memory_model,
                        "additional memory-kind model JSON");
    analyze->add_option("--records", aa.records, "records CSV (or - for stdin)")
        ->required();
    analyze->add_option("--compare", aa.compare, "<configA>,<configB> deltas");
    analyze->add_flag("--fit", aa.fit, "fit the linear energy model instead");
    analyze->add_flag("--lenient", aa.lenient, "ignore unknown keys/columns");
    analyze->add_flag("--json", aa.json, "machine-readable output");

    PlotArgs pa;
    auto* plot = app.add_subcommand("plot", "render a model (and records) to SVG");
    plot->add_option("--model", pa.model, "model JSON")->required();
    plot->add_option("--records", pa.records, "records CSV to overlay");
    plot->add_option("--out", pa.out, "SVG file to write")->required();
    plot->add_option("--width", pa.width, "canvas width [820]");
    plot->add_option("--height", pa.height, "canvas height [560]");
    plot->add_flag("--lenient", pa.lenient, "ignore unknown keys/columns");
    plot->add_flag("--json", pa.json, "machine-readable output");

    try {
        app.parse(own_argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (sample->parsed()) {
        return guarded([&] { return cmd_sample(sa); });
    }
    if (integrate->parsed()) {
        return guarded([&] { return cmd_integrate(ia); });
    }
    if (model->parsed() && model_build->parsed()) {
        return guarded([&] { return cmd_model_build(ma); });
    }
    if (analyze->parsed()) {
        if (aa.model.empty() && !aa.fit) {
            report_error("analyze: --model is required unless --fit is given");
            return kExitUsage;
        }
        return guarded([&] { return cmd_analyze(aa); });
    }
    if (plot->parsed()) {
        return guarded([&] { return cmd_plot(pa); });
    }
    return kExitUsage;
}
