#include "wattline/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "wattline/errors.hpp"

namespace wattline {

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double median(std::vector<double> values) {
    if (values.empty()) throw DomainError("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double round_sig(double value, int figures) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    const double mag = std::floor(std::log10(std::fabs(value)));
    const double scale = std::pow(10.0, figures - 1 - mag);
    return std::round(value * scale) / scale;
}

} // namespace wattline
