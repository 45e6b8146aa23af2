#include "wattline/sampler.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include "wattline/errors.hpp"

namespace wattline {

namespace {

struct PendingEvent {
    char tag; // 'B' or 'E'
    int64_t t_us;
    std::string name;
};

struct BufferedSample {
    int64_t t_us;
    int64_t p_mw;
};

} // namespace

struct Sampler::Impl {
    SamplerConfig cfg;
    std::shared_ptr<Clock> clock;
    std::unique_ptr<PowerSource> source;
    std::ofstream out;

    std::thread worker;
    std::atomic<bool> recording{false};
    std::atomic<bool> stop{false};

    // Sampler-side state: touched only by the sampling activity (the worker
    // thread, or advance_virtual on a virtual clock) and by finalize after
    // the worker has joined.
    std::vector<BufferedSample> buffer;
    int64_t next_tick_us = 0; // virtual mode: next due sample time
    int64_t read_errors = 0;
    bool source_ended = false;

    // Everything the log file sees goes through this lock: pending events,
    // the stream, and the last written timestamp. Event timestamps are
    // captured inside the lock so nothing older can be appended later.
    std::mutex io_mu;
    std::vector<PendingEvent> events;
    int64_t last_written_us = -1;
    int64_t sample_count = 0;
    int64_t dropped_samples = 0;
    int64_t flush_count = 0;

    // Application-side region state (single owning thread).
    std::string active_region;
    int64_t region_count = 0;
    bool truncated = false;
    bool finalized = false;

    void take_sample() {
        if (source_ended) {
            return;
        }
        int64_t t = clock->now_us(); // timestamp at read start
        try {
            PowerReading r = source->read(t);
            if (r.warmup) {
                return;
            }
            buffer.push_back({t, r.p_mw});
            if (buffer.size() >= cfg.buffer_capacity) {
                flush();
            }
        } catch (const SourceEnd&) {
            source_ended = true;
        } catch (const std::exception&) {
            ++read_errors;
        }
    }

    // Drains buffered samples and pending events into the file in timestamp
    // order (events first on ties), nudging any non-increasing timestamp
    // forward by 1 µs so the log stays strictly monotone.
    void flush() {
        std::lock_guard<std::mutex> lock(io_mu);
        if (buffer.empty() && events.empty()) {
            return;
        }
        size_t ei = 0;
        size_t si = 0;
        int64_t samples_here = 0;
        while (ei < events.size() || si < buffer.size()) {
            bool pick_event = ei < events.size() &&
                              (si >= buffer.size() || events[ei].t_us <= buffer[si].t_us);
            int64_t t;
            if (pick_event) {
                t = emit_t(events[ei].t_us);
                out << events[ei].tag << ',' << t << ',' << events[ei].name << '\n';
                ++ei;
            } else {
                t = emit_t(buffer[si].t_us);
                out << 'S' << ',' << t << ',' << buffer[si].p_mw << '\n';
                ++si;
                ++samples_here;
            }
            last_written_us = t;
        }
        out.flush();
        if (!out) {
            dropped_samples += samples_here;
        } else {
            sample_count += samples_here;
        }
        events.clear();
        buffer.clear();
        ++flush_count;
    }

    int64_t emit_t(int64_t t) const {
        return t > last_written_us ? t : last_written_us + 1;
    }

    void run() {
        while (!stop.load(std::memory_order_acquire)) {
            int64_t t = clock->now_us();
            clock->sleep_until_us(t + cfg.period_us);
            if (stop.load(std::memory_order_acquire)) {
                break;
            }
            if (recording.load(std::memory_order_acquire)) {
                take_sample();
            }
        }
    }
};

Sampler::Sampler(SamplerConfig cfg) : impl_(std::make_unique<Impl>()) {
    if (cfg.period_us <= 0) {
        throw DomainError("sampler: period must be > 0 µs");
    }
    if (cfg.buffer_capacity == 0) {
        throw DomainError("sampler: buffer capacity must be > 0");
    }
    impl_->cfg = cfg;
    impl_->source = make_power_source(cfg.source);
    impl_->clock = cfg.clock ? cfg.clock : std::make_shared<SteadyClock>();
    impl_->out.open(cfg.out_path, std::ios::out | std::ios::trunc);
    if (!impl_->out) {
        throw Error("sampler: cannot open '" + cfg.out_path + "' for writing");
    }
    impl_->out << "# wattline-log v1, period_us=" << cfg.period_us
               << ", source=" << impl_->source->kind()
               << ", epoch_unix_us=" << impl_->clock->epoch_unix_us() << '\n';
    impl_->out.flush();
    if (!impl_->out) {
        throw Error("sampler: cannot write header to '" + cfg.out_path + "'");
    }
    if (impl_->clock->is_virtual()) {
        impl_->next_tick_us = impl_->clock->now_us() + cfg.period_us;
    } else {
        impl_->worker = std::thread([p = impl_.get()] { p->run(); });
    }
}

Sampler::~Sampler() {
    if (impl_ && !impl_->finalized) {
        try {
            finalize();
        } catch (...) {
            // Destructor cleanup must not throw; the summary is lost but the
            // worker is stopped either way.
        }
    }
}

Sampler::Sampler(Sampler&&) noexcept = default;
Sampler& Sampler::operator=(Sampler&&) noexcept = default;

void Sampler::region_start(const std::string& name) {
    Impl* p = impl_.get();
    if (p == nullptr || p->finalized) {
        throw LifecycleError("region_start: sampler already finalized");
    }
    if (!p->active_region.empty()) {
        throw LifecycleError("region_start('" + name + "'): region '" +
                             p->active_region + "' is still active (nesting rejected)");
    }
    if (name.empty() || name.find(',') != std::string::npos ||
        name.find('\n') != std::string::npos) {
        throw DomainError("region_start: name must be non-empty, without ',' or newline");
    }
    {
        std::lock_guard<std::mutex> lock(p->io_mu);
        p->events.push_back({'B', p->clock->now_us(), name});
    }
    p->active_region = name;
    p->recording.store(true, std::memory_order_release);
}

void Sampler::region_stop(const std::string& name) {
    Impl* p = impl_.get();
    if (p == nullptr || p->finalized) {
        throw LifecycleError("region_stop: sampler already finalized");
    }
    if (p->active_region.empty()) {
        throw LifecycleError("region_stop('" + name + "'): no active region");
    }
    if (p->active_region != name) {
        throw LifecycleError("region_stop('" + name + "'): active region is '" +
                             p->active_region + "'");
    }
    {
        std::lock_guard<std::mutex> lock(p->io_mu);
        p->events.push_back({'E', p->clock->now_us(), name});
    }
    p->recording.store(false, std::memory_order_release);
    p->active_region.clear();
    ++p->region_count;
}

LogSummary Sampler::finalize() {
    Impl* p = impl_.get();
    if (p == nullptr || p->finalized) {
        throw LifecycleError("finalize: sampler already finalized");
    }
    if (!p->active_region.empty()) {
        {
            std::lock_guard<std::mutex> lock(p->io_mu);
            p->events.push_back({'E', p->clock->now_us(), p->active_region});
        }
        p->recording.store(false, std::memory_order_release);
        p->active_region.clear();
        ++p->region_count;
        p->truncated = true;
    }
    p->stop.store(true, std::memory_order_release);
    if (p->worker.joinable()) {
        p->worker.join();
    }
    p->flush();
    p->out.close();
    p->finalized = true;

    LogSummary s;
    s.sample_count = p->sample_count;
    s.region_count = p->region_count;
    s.dropped_samples = p->dropped_samples;
    s.read_errors = p->read_errors;
    s.flush_count = p->flush_count;
    s.truncated = p->truncated;
    s.source_ended = p->source_ended;
    return s;
}

void Sampler::advance_virtual(int64_t dt_us) {
    Impl* p = impl_.get();
    if (p == nullptr || p->finalized) {
        throw LifecycleError("advance_virtual: sampler already finalized");
    }
    if (!p->clock->is_virtual()) {
        throw DomainError("advance_virtual: sampler is on a real clock");
    }
    if (dt_us < 0) {
        throw DomainError("advance_virtual: negative step");
    }
    auto* vc = static_cast<VirtualClock*>(p->clock.get());
    int64_t target = vc->now_us() + dt_us;
    while (p->next_tick_us <= target) {
        vc->sleep_until_us(p->next_tick_us);
        if (p->recording.load(std::memory_order_acquire)) {
            p->take_sample();
        }
        p->next_tick_us += p->cfg.period_us;
    }
    vc->sleep_until_us(target);
}

bool Sampler::is_virtual() const {
    return impl_ != nullptr && impl_->clock->is_virtual();
}

int64_t Sampler::period_us() const {
    if (impl_ == nullptr) {
        throw LifecycleError("period_us: moved-from sampler");
    }
    return impl_->cfg.period_us;
}

} // namespace wattline
