#include "wattline/sample_log.hpp"

#include <fstream>
#include <sstream>

#include "wattline/errors.hpp"

namespace wattline {

namespace {

constexpr std::string_view kHeaderLead = "# wattline-log v1, period_us=";
constexpr std::string_view kHeaderSource = ", source=";
constexpr std::string_view kHeaderEpoch = ", epoch_unix_us=";

int64_t take_int(std::string_view& s, int lineno, const char* what) {
    size_t n = 0;
    while (n < s.size() && (std::isdigit(static_cast<unsigned char>(s[n])) != 0 ||
                            (n == 0 && s[n] == '-'))) {
        ++n;
    }
    if (n == 0 || (n == 1 && s[0] == '-')) {
        throw FormatError(lineno, std::string(what) + " is not an integer");
    }
    int64_t v = 0;
    try {
        v = std::stoll(std::string(s.substr(0, n)));
    } catch (const std::exception&) {
        throw FormatError(lineno, std::string(what) + " out of range");
    }
    s.remove_prefix(n);
    return v;
}

void expect(std::string_view& s, std::string_view prefix, int lineno) {
    if (s.substr(0, prefix.size()) != prefix) {
        throw FormatError(lineno, "malformed header (want '# wattline-log v1, "
                                  "period_us=<int>, source=<kind>, epoch_unix_us=<int>')");
    }
    s.remove_prefix(prefix.size());
}

LogHeader parse_header(std::string_view line) {
    LogHeader h;
    expect(line, kHeaderLead, 1);
    h.period_us = take_int(line, 1, "period_us");
    expect(line, kHeaderSource, 1);
    size_t comma = line.find(',');
    if (comma == std::string_view::npos || comma == 0) {
        throw FormatError(1, "malformed header: missing source kind");
    }
    h.source_kind = std::string(line.substr(0, comma));
    line.remove_prefix(comma);
    expect(line, kHeaderEpoch, 1);
    h.epoch_unix_us = take_int(line, 1, "epoch_unix_us");
    if (!line.empty()) {
        throw FormatError(1, "trailing content after header");
    }
    if (h.period_us <= 0) {
        throw FormatError(1, "period_us must be > 0");
    }
    return h;
}

} // namespace

ParsedLog parse_log_text(std::string_view text) {
    ParsedLog log;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    int64_t last_t = -1;
    bool region_open = false;
    std::string open_name;
    int64_t open_t = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            throw FormatError(lineno, "CRLF line ending; logs are LF-only");
        }
        if (lineno == 1) {
            log.header = parse_header(line);
            continue;
        }
        if (line.size() < 2 || line[1] != ',') {
            throw FormatError(lineno, "malformed line '" + line + "'");
        }
        char tag = line[0];
        std::string_view rest = std::string_view(line).substr(2);
        int64_t t = take_int(rest, lineno, "timestamp");
        if (t < 0) {
            throw FormatError(lineno, "negative timestamp");
        }
        if (t <= last_t) {
            throw FormatError(lineno, "timestamps must be strictly increasing (" +
                                          std::to_string(t) + " after " +
                                          std::to_string(last_t) + ")");
        }
        last_t = t;
        if (rest.empty() || rest[0] != ',') {
            throw FormatError(lineno, "malformed line '" + line + "'");
        }
        rest.remove_prefix(1);

        switch (tag) {
        case 'S': {
            int64_t p = take_int(rest, lineno, "power");
            if (!rest.empty()) {
                throw FormatError(lineno, "trailing content after sample");
            }
            if (p < 0) {
                throw FormatError(lineno, "negative power");
            }
            log.samples.push_back({t, p});
            break;
        }
        case 'B': {
            if (rest.empty() || rest.find(',') != std::string_view::npos) {
                throw FormatError(lineno, "bad region name");
            }
            if (region_open) {
                throw FormatError(lineno, "begin '" + std::string(rest) +
                                              "' while region '" + open_name +
                                              "' is open");
            }
            region_open = true;
            open_name = std::string(rest);
            open_t = t;
            break;
        }
        case 'E': {
            if (rest.empty() || rest.find(',') != std::string_view::npos) {
                throw FormatError(lineno, "bad region name");
            }
            if (!region_open) {
                throw FormatError(lineno, "end '" + std::string(rest) +
                                              "' without a matching begin");
            }
            if (open_name != rest) {
                throw FormatError(lineno, "end '" + std::string(rest) +
                                              "' does not match open region '" +
                                              open_name + "'");
            }
            log.regions.push_back({open_name, open_t, t});
            region_open = false;
            open_name.clear();
            break;
        }
        default:
            throw FormatError(lineno, std::string("unknown line tag '") + tag + "'");
        }
    }
    if (lineno == 0) {
        throw FormatError(1, "empty file (missing header)");
    }
    if (region_open) {
        throw FormatError(lineno, "region '" + open_name + "' never ends");
    }
    return log;
}

ParsedLog parse_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open log '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_log_text(buf.str());
}

} // namespace wattline
