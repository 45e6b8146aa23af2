#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wattline {

struct PowerReading {
    int64_t p_mw = 0;
    // True while the source cannot yet produce a meaningful value (e.g. the
    // first read of a cumulative energy counter). Callers skip such reads.
    bool warmup = false;
};

struct SyntheticSpec {
    enum class Waveform { constant, ramp, sinusoid };
    Waveform waveform = Waveform::constant;
    // constant: level | ramp: start | sinusoid: mean
    double p0_mw = 0.0;
    // ramp: end | sinusoid: amplitude
    double p1_mw = 0.0;
    // ramp: rise time | sinusoid: period
    int64_t duration_us = 0;
};

struct TraceSpec {
    std::string path;
};

struct RaplSpec {
    std::string path;
    // Counter range for wraparound correction, µJ. 0 means "resolve from a
    // sibling max_energy_range_uj file at init".
    int64_t max_range_uj = 0;
};

struct CommandSpec {
    std::vector<std::string> argv;
};

using PowerSourceSpec = std::variant<SyntheticSpec, TraceSpec, RaplSpec, CommandSpec>;

// One-string CLI syntax:
//   synthetic:constant:<mw>
//   synthetic:ramp:<mw0>:<mw1>:<ms>
//   synthetic:sinusoid:<mean>:<amp>:<period_ms>
//   trace:<path>
//   rapl:<path>[:max_uj]
//   cmd:<executable>[:<arg>...]
// Throws FormatError on anything else.
PowerSourceSpec parse_source_spec(std::string_view text);

// Short kind tag for the log header: synthetic | trace | rapl | cmd.
std::string source_kind(const PowerSourceSpec& spec);

class PowerSource {
public:
    virtual ~PowerSource() = default;

    // Instantaneous power at monotonic time t_us (same timeline the sampler
    // clock uses). Stateful sources (rapl) difference against the previous
    // call. Throws SourceError on a failed read, SourceEnd when a trace has
    // run out past its hold grace.
    virtual PowerReading read(int64_t t_us) = 0;

    virtual std::string kind() const = 0;
};

// Validates the spec (waveform non-negativity, file reachability, command
// resolvability) and returns a ready source. Throws DomainError for invalid
// waveform parameters, SourceError for an unreachable source, FormatError
// for a malformed trace file.
std::unique_ptr<PowerSource> make_power_source(const PowerSourceSpec& spec);

} // namespace wattline
