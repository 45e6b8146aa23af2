#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace wattline {

// Time source for the sampler. All timestamps are microseconds since the
// clock's own origin (construction for the steady clock, zero for the
// virtual one), so logs always start near t=0.
class Clock {
public:
    virtual ~Clock() = default;

    virtual int64_t now_us() = 0;

    // Block until now_us() >= t_us. The virtual clock jumps instead of
    // blocking, which keeps a sampling loop usable synchronously.
    virtual void sleep_until_us(int64_t t_us) = 0;

    virtual bool is_virtual() const = 0;

    // Wall-clock time of the origin, for the log header. Zero in virtual
    // mode so replays are byte-identical.
    virtual int64_t epoch_unix_us() const = 0;
};

class SteadyClock final : public Clock {
public:
    SteadyClock();
    int64_t now_us() override;
    void sleep_until_us(int64_t t_us) override;
    bool is_virtual() const override { return false; }
    int64_t epoch_unix_us() const override { return epoch_unix_us_; }

private:
    std::chrono::steady_clock::time_point origin_;
    int64_t epoch_unix_us_ = 0;
};

class VirtualClock final : public Clock {
public:
    int64_t now_us() override { return now_.load(std::memory_order_relaxed); }
    void sleep_until_us(int64_t t_us) override;
    bool is_virtual() const override { return true; }
    int64_t epoch_unix_us() const override { return 0; }

    void advance_us(int64_t dt_us);

private:
    std::atomic<int64_t> now_{0};
};

} // namespace wattline
