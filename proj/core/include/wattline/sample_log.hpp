#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wattline {

struct PowerSample {
    int64_t t_us = 0;
    int64_t p_mw = 0;
};

struct LogHeader {
    int64_t period_us = 0;
    std::string source_kind;
    int64_t epoch_unix_us = 0;
};

struct LogRegion {
    std::string name;
    int64_t t_begin_us = 0;
    int64_t t_end_us = 0;
};

struct ParsedLog {
    LogHeader header;
    std::vector<PowerSample> samples; // strictly increasing t_us
    std::vector<LogRegion> regions;   // non-overlapping, in time order
};

// Parse a sample log. Malformed lines, non-monotone timestamps and broken
// begin/end alternation all raise FormatError carrying the line number.
ParsedLog parse_log(const std::string& path);
ParsedLog parse_log_text(std::string_view text);

} // namespace wattline
