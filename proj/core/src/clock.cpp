#include "wattline/clock.hpp"

#include <thread>

#include "wattline/errors.hpp"

namespace wattline {

SteadyClock::SteadyClock() {
    origin_ = std::chrono::steady_clock::now();
    epoch_unix_us_ = std::chrono::duration_cast<std::chrono::microseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
}

int64_t SteadyClock::now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::steady_clock::now() - origin_)
        .count();
}

void SteadyClock::sleep_until_us(int64_t t_us) {
    std::this_thread::sleep_until(origin_ + std::chrono::microseconds(t_us));
}

void VirtualClock::sleep_until_us(int64_t t_us) {
    int64_t cur = now_.load(std::memory_order_relaxed);
    while (cur < t_us &&
           !now_.compare_exchange_weak(cur, t_us, std::memory_order_relaxed)) {
    }
}

void VirtualClock::advance_us(int64_t dt_us) {
    if (dt_us < 0) {
        throw DomainError("VirtualClock::advance_us: negative step");
    }
    now_.fetch_add(dt_us, std::memory_order_relaxed);
}

} // namespace wattline
