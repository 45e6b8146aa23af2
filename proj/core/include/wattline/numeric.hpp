#pragma once

#include <span>
#include <vector>

namespace wattline {

// Pairwise summation; error grows O(log n) instead of O(n).
double pairwise_sum(std::span<const double> values);

// Median of an unsorted sample; mean of the two middle values for even sizes.
// Throws DomainError on an empty input.
double median(std::vector<double> values);

// Round to n significant figures (n >= 1).
double round_sig(double value, int figures);

} // namespace wattline
