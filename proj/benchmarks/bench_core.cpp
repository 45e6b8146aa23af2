#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wattline/energy_model.hpp"
#include "wattline/integrate.hpp"
#include "wattline/model_builder.hpp"
#include "wattline/roofline.hpp"
#include "wattline/sample_log.hpp"
#include "wattline/svg_plot.hpp"

using namespace wattline;

namespace {

std::vector<PowerSample> make_samples(int64_t n, int64_t period_us) {
    std::vector<PowerSample> s;
    s.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i * period_us);
        s.push_back({i * period_us,
                     100'000 + std::llround(20'000.0 * std::sin(t / 50'000.0))});
    }
    return s;
}

std::string make_log_text(int64_t samples_per_region, int64_t regions) {
    std::ostringstream out;
    out << "# wattline-log v1, period_us=2000, source=synthetic, epoch_unix_us=0\n";
    int64_t t = 0;
    for (int64_t r = 0; r < regions; ++r) {
        out << "B," << ++t << ",k" << r << '\n';
        for (int64_t i = 0; i < samples_per_region; ++i) {
            t += 2000;
            out << "S," << t << ",50000\n";
        }
        out << "E," << ++t << ",k" << r << '\n';
    }
    return out.str();
}

RooflineModel make_model(int ceilings) {
    std::vector<Ceiling> cs;
    for (int i = 0; i < ceilings; ++i) {
        cs.push_back({"cfg" + std::to_string(i), CeilingKind::compute,
                      1e12 / std::pow(2.0, i), Precision::na});
    }
    return RooflineModel::create("bench", 200.0, CeilingKind::compute, Precision::na,
                                 std::move(cs));
}

std::vector<MeasurementRecord> make_records(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> w(1e8, 1e11), q(1e7, 1e10);
    std::vector<MeasurementRecord> out;
    for (int i = 0; i < n; ++i) {
        double wf = w(rng), qb = q(rng);
        out.push_back({"k" + std::to_string(i), "base", Precision::na, wf, qb, 1.0,
                       1e-9 * wf + 5e-9 * qb + 2.0});
    }
    return out;
}

void bm_integrate_region(benchmark::State& state) {
    auto samples = make_samples(state.range(0), 2000);
    int64_t t1 = samples.back().t_us;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_region(samples, 0, t1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_integrate_region)->Range(64, 1 << 18);

void bm_region_report(benchmark::State& state) {
    auto samples = make_samples(state.range(0), 2000);
    LogRegion region{"k", samples.front().t_us, samples.back().t_us};
    for (auto _ : state) {
        benchmark::DoNotOptimize(region_report(samples, region));
    }
}
BENCHMARK(bm_region_report)->Range(64, 1 << 18);

void bm_parse_log(benchmark::State& state) {
    std::string text = make_log_text(state.range(0), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_log_text(text));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(bm_parse_log)->Range(64, 1 << 14);

void bm_fit_coefficients(benchmark::State& state) {
    auto records = make_records(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_energy_coefficients(records));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_fit_coefficients)->Range(8, 1 << 12);

void bm_classify(benchmark::State& state) {
    RooflineModel m = make_model(4);
    double e = 1.0;
    for (auto _ : state) {
        e = e >= 1e3 ? 1.0 : e * 1.1; // sweep both sides of the ridge
        benchmark::DoNotOptimize(classify(m, e * 1e-12));
        benchmark::DoNotOptimize(attainable_power(m, m.top_ceiling().name, e * 1e-12));
    }
}
BENCHMARK(bm_classify);

void bm_build_model(benchmark::State& state) {
    std::vector<CeilingRecordGroup> groups;
    for (int g = 0; g < 6; ++g) {
        CeilingRecordGroup grp;
        grp.config_label = "cfg" + std::to_string(g);
        grp.kind = CeilingKind::compute;
        grp.precision = Precision::na;
        double rate = 1e11 * (g + 1);
        for (int64_t i = 0; i < state.range(0); ++i) {
            double t = 0.5 + 0.001 * static_cast<double>(i);
            grp.records.push_back({"probe", grp.config_label, Precision::na, rate * t,
                                   0.0, t, 1.0});
        }
        groups.push_back(std::move(grp));
    }
    PlatformSpec plat{"bench", 200.0, ""};
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_model(plat, groups));
    }
}
BENCHMARK(bm_build_model)->Range(8, 1 << 10);

void bm_render_svg(benchmark::State& state) {
    RooflineModel m = make_model(4);
    auto records = make_records(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_roofline_svg(m, records));
    }
}
BENCHMARK(bm_render_svg)->Range(0, 64);

} // namespace

BENCHMARK_MAIN();
