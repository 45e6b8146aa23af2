#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "wattline/clock.hpp"
#include "wattline/power_source.hpp"

namespace wattline {

struct SamplerConfig {
    PowerSourceSpec source;
    std::string out_path;
    int64_t period_us = 2000;
    // Samples buffered in memory before being appended to the log file.
    size_t buffer_capacity = 1024;
    // Shared so tests can keep driving a virtual clock they also handed to
    // the sampler. Null means "use a real steady clock".
    std::shared_ptr<Clock> clock;
};

struct LogSummary {
    int64_t sample_count = 0;    // sample lines written to the log
    int64_t region_count = 0;    // completed begin/end pairs
    int64_t dropped_samples = 0; // lost to failed flush writes
    int64_t read_errors = 0;     // failed source reads (sample skipped)
    int64_t flush_count = 0;     // buffer flushes that wrote anything
    bool truncated = false;      // finalize had to auto-close an active region
    bool source_ended = false;   // source ran out mid-run; sampling stopped
};

// Region-scoped power sampler. Construction opens the log, writes its
// header, and (on a real clock) starts a background thread that polls an
// atomic recording flag every period; region_start/region_stop toggle the
// flag and log begin/end events; finalize drains the buffer, stops the
// thread and completes the file.
//
// The handle is owned by one application thread at a time; region calls and
// finalize must not race each other. On a virtual clock no thread runs:
// advance_virtual() ticks the sampling loop synchronously, which is what
// makes replayed logs byte-identical.
class Sampler {
public:
    explicit Sampler(SamplerConfig cfg);
    ~Sampler();

    Sampler(Sampler&&) noexcept;
    Sampler& operator=(Sampler&&) noexcept;
    Sampler(const Sampler&) = delete;
    Sampler& operator=(const Sampler&) = delete;

    // Logs a begin event and starts sampling. Throws LifecycleError if a
    // region is already active or the sampler is finalized, DomainError if
    // the name is empty or contains ',' or newline.
    void region_start(const std::string& name);

    // Logs an end event and stops sampling. Throws LifecycleError unless
    // `name` is the active region.
    void region_stop(const std::string& name);

    // Flushes everything, stops the background activity and closes the log.
    // Throws LifecycleError on a second call.
    LogSummary finalize();

    // Virtual-clock mode only: advance time by dt_us, taking every sample
    // that falls due. Throws DomainError on a real clock.
    void advance_virtual(int64_t dt_us);

    bool is_virtual() const;
    int64_t period_us() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace wattline
