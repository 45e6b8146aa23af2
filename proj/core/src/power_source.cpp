#include "wattline/power_source.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "wattline/errors.hpp"
#include "wattline/subprocess.hpp"

namespace wattline {

namespace {

// How long a trace keeps returning its last value after running out before
// reads start failing with SourceEnd.
constexpr int64_t kTraceHoldGraceUs = 1'000'000;

constexpr int kCommandTimeoutMs = 100;

int64_t parse_i64(std::string_view s, const char* what) {
    try {
        size_t pos = 0;
        std::string t(s);
        long long v = std::stoll(t, &pos);
        if (pos != t.size()) {
            throw std::invalid_argument("trailing");
        }
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("bad source spec: ") + what + " '" +
                          std::string(s) + "' is not an integer");
    }
}

double parse_f64(std::string_view s, const char* what) {
    try {
        size_t pos = 0;
        std::string t(s);
        double v = std::stod(t, &pos);
        if (pos != t.size()) {
            throw std::invalid_argument("trailing");
        }
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("bad source spec: ") + what + " '" +
                          std::string(s) + "' is not a number");
    }
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t p = s.find(sep, start);
        if (p == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            break;
        }
        parts.emplace_back(s.substr(start, p - start));
        start = p + 1;
    }
    return parts;
}

class SyntheticSource final : public PowerSource {
public:
    explicit SyntheticSource(const SyntheticSpec& spec) : spec_(spec) {
        using W = SyntheticSpec::Waveform;
        switch (spec_.waveform) {
        case W::constant:
            if (spec_.p0_mw < 0.0) {
                throw DomainError("synthetic constant: level must be >= 0 mW");
            }
            break;
        case W::ramp:
            if (spec_.p0_mw < 0.0 || spec_.p1_mw < 0.0) {
                throw DomainError("synthetic ramp: endpoints must be >= 0 mW");
            }
            if (spec_.duration_us <= 0) {
                throw DomainError("synthetic ramp: duration must be > 0");
            }
            break;
        case W::sinusoid:
            if (spec_.p1_mw < 0.0 || spec_.p0_mw < spec_.p1_mw) {
                throw DomainError(
                    "synthetic sinusoid: need amplitude >= 0 and mean >= amplitude "
                    "(waveform must stay non-negative)");
            }
            if (spec_.duration_us <= 0) {
                throw DomainError("synthetic sinusoid: period must be > 0");
            }
            break;
        }
    }

    PowerReading read(int64_t t_us) override {
        using W = SyntheticSpec::Waveform;
        double p = 0.0;
        switch (spec_.waveform) {
        case W::constant:
            p = spec_.p0_mw;
            break;
        case W::ramp: {
            double x = std::clamp(static_cast<double>(t_us) /
                                      static_cast<double>(spec_.duration_us),
                                  0.0, 1.0);
            p = spec_.p0_mw + (spec_.p1_mw - spec_.p0_mw) * x;
            break;
        }
        case W::sinusoid: {
            double phase = 2.0 * std::numbers::pi * static_cast<double>(t_us) /
                           static_cast<double>(spec_.duration_us);
            p = spec_.p0_mw + spec_.p1_mw * std::sin(phase);
            break;
        }
        }
        return {static_cast<int64_t>(std::llround(std::max(p, 0.0))), false};
    }

    std::string kind() const override { return "synthetic"; }

private:
    SyntheticSpec spec_;
};

class TraceSource final : public PowerSource {
public:
    explicit TraceSource(const TraceSpec& spec) {
        std::ifstream in(spec.path);
        if (!in) {
            throw SourceError("trace: cannot open '" + spec.path + "'");
        }
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) {
                continue;
            }
            auto comma = line.find(',');
            if (comma == std::string::npos) {
                throw FormatError(lineno, "trace line needs '<t_us>,<p_mw>'");
            }
            int64_t t;
            int64_t p;
            try {
                size_t pos = 0;
                t = std::stoll(line.substr(0, comma), &pos);
                if (pos != comma) {
                    throw std::invalid_argument("trailing");
                }
                std::string rest = line.substr(comma + 1);
                p = std::stoll(rest, &pos);
                if (pos != rest.size()) {
                    throw std::invalid_argument("trailing");
                }
            } catch (const FormatError&) {
                throw;
            } catch (const std::exception&) {
                throw FormatError(lineno, "trace line needs integer '<t_us>,<p_mw>'");
            }
            if (!t_.empty() && t <= t_.back()) {
                throw FormatError(lineno, "trace timestamps must be strictly increasing");
            }
            if (p < 0) {
                throw FormatError(lineno, "trace power must be >= 0 mW");
            }
            t_.push_back(t);
            p_.push_back(p);
        }
        if (t_.empty()) {
            throw FormatError(1, "trace file '" + spec.path + "' has no samples");
        }
    }

    PowerReading read(int64_t t_us) override {
        if (t_us > t_.back() + kTraceHoldGraceUs) {
            throw SourceEnd("trace: replay exhausted at t=" + std::to_string(t_us) +
                            "us (last sample " + std::to_string(t_.back()) + "us)");
        }
        // Zero-order hold: last value at or before t; leading times take the
        // first value.
        auto it = std::upper_bound(t_.begin(), t_.end(), t_us);
        size_t idx = it == t_.begin() ? 0 : static_cast<size_t>(it - t_.begin()) - 1;
        return {p_[idx], false};
    }

    std::string kind() const override { return "trace"; }

private:
    std::vector<int64_t> t_;
    std::vector<int64_t> p_;
};

int64_t read_counter_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SourceError("rapl: cannot read '" + path + "'");
    }
    long long v = 0;
    in >> v;
    if (in.fail()) {
        throw SourceError("rapl: '" + path + "' does not hold a decimal µJ value");
    }
    if (v < 0) {
        throw SourceError("rapl: negative counter value in '" + path + "'");
    }
    return v;
}

class RaplSource final : public PowerSource {
public:
    explicit RaplSource(const RaplSpec& spec) : path_(spec.path), max_range_uj_(spec.max_range_uj) {
        if (max_range_uj_ == 0) {
            auto sibling =
                std::filesystem::path(path_).parent_path() / "max_energy_range_uj";
            std::ifstream in(sibling);
            if (!(in >> max_range_uj_) || max_range_uj_ <= 0) {
                throw SourceError("rapl: max_range not given and '" + sibling.string() +
                                  "' is unreadable");
            }
        }
        if (max_range_uj_ <= 0) {
            throw DomainError("rapl: max_range must be > 0 µJ");
        }
        // Priming read: validates reachability up front.
        read_counter_file(path_);
    }

    PowerReading read(int64_t t_us) override {
        int64_t uj = read_counter_file(path_);
        if (!have_prev_) {
            have_prev_ = true;
            prev_uj_ = uj;
            prev_t_us_ = t_us;
            return {0, true};
        }
        int64_t de = uj - prev_uj_;
        if (de < 0) {
            de += max_range_uj_;
        }
        int64_t dt = t_us - prev_t_us_;
        prev_uj_ = uj;
        prev_t_us_ = t_us;
        if (dt <= 0) {
            // Two reads on the same tick carry no rate information.
            return {0, true};
        }
        double p_mw = static_cast<double>(de) / static_cast<double>(dt) * 1000.0;
        return {static_cast<int64_t>(std::llround(p_mw)), false};
    }

    std::string kind() const override { return "rapl"; }

private:
    std::string path_;
    int64_t max_range_uj_ = 0;
    bool have_prev_ = false;
    int64_t prev_uj_ = 0;
    int64_t prev_t_us_ = 0;
};

bool executable_resolvable(const std::string& name) {
    if (name.find('/') != std::string::npos) {
        return access(name.c_str(), X_OK) == 0;
    }
    const char* path_env = std::getenv("PATH");
    if (path_env == nullptr) {
        return false;
    }
    for (const auto& dir : split(path_env, ':')) {
        if (dir.empty()) {
            continue;
        }
        if (access((dir + "/" + name).c_str(), X_OK) == 0) {
            return true;
        }
    }
    return false;
}

class CommandSource final : public PowerSource {
public:
    explicit CommandSource(const CommandSpec& spec) : argv_(spec.argv) {
        if (argv_.empty() || argv_[0].empty()) {
            throw SourceError("cmd: empty command line");
        }
        if (!executable_resolvable(argv_[0])) {
            throw SourceError("cmd: executable '" + argv_[0] + "' not found");
        }
    }

    PowerReading read(int64_t /*t_us*/) override {
        CaptureResult res = run_capture(argv_, kCommandTimeoutMs);
        if (res.timed_out) {
            throw SourceError("cmd: '" + argv_[0] + "' exceeded " +
                              std::to_string(kCommandTimeoutMs) + " ms");
        }
        if (res.term_signal != 0 || res.exit_code != 0) {
            throw SourceError("cmd: '" + argv_[0] + "' failed (exit " +
                              std::to_string(res.exit_code) + ")");
        }
        std::istringstream in(res.out);
        double p = 0.0;
        in >> p;
        if (in.fail() || !std::isfinite(p)) {
            throw SourceError("cmd: output of '" + argv_[0] +
                              "' is not a milliwatt value: '" + res.out + "'");
        }
        std::string extra;
        if (in >> extra) {
            throw SourceError("cmd: expected a single milliwatt value, got '" + res.out +
                              "'");
        }
        if (p < 0.0) {
            throw SourceError("cmd: negative power from '" + argv_[0] + "'");
        }
        return {static_cast<int64_t>(std::llround(p)), false};
    }

    std::string kind() const override { return "cmd"; }

private:
    std::vector<std::string> argv_;
};

} // namespace

PowerSourceSpec parse_source_spec(std::string_view text) {
    auto colon = text.find(':');
    std::string_view head = text.substr(0, colon);
    std::string_view rest =
        colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    if (head == "synthetic") {
        auto parts = split(rest, ':');
        if (parts.empty() || parts[0].empty()) {
            throw FormatError("bad source spec: synthetic needs a waveform");
        }
        SyntheticSpec s;
        if (parts[0] == "constant") {
            if (parts.size() != 2) {
                throw FormatError("bad source spec: want synthetic:constant:<mw>");
            }
            s.waveform = SyntheticSpec::Waveform::constant;
            s.p0_mw = parse_f64(parts[1], "level");
        } else if (parts[0] == "ramp") {
            if (parts.size() != 4) {
                throw FormatError("bad source spec: want synthetic:ramp:<mw0>:<mw1>:<ms>");
            }
            s.waveform = SyntheticSpec::Waveform::ramp;
            s.p0_mw = parse_f64(parts[1], "mw0");
            s.p1_mw = parse_f64(parts[2], "mw1");
            s.duration_us = parse_i64(parts[3], "duration_ms") * 1000;
        } else if (parts[0] == "sinusoid") {
            if (parts.size() != 4) {
                throw FormatError(
                    "bad source spec: want synthetic:sinusoid:<mean>:<amp>:<period_ms>");
            }
            s.waveform = SyntheticSpec::Waveform::sinusoid;
            s.p0_mw = parse_f64(parts[1], "mean");
            s.p1_mw = parse_f64(parts[2], "amplitude");
            s.duration_us = parse_i64(parts[3], "period_ms") * 1000;
        } else {
            throw FormatError("bad source spec: unknown waveform '" + parts[0] + "'");
        }
        return s;
    }
    if (head == "trace") {
        if (rest.empty()) {
            throw FormatError("bad source spec: want trace:<path>");
        }
        return TraceSpec{std::string(rest)};
    }
    if (head == "rapl") {
        if (rest.empty()) {
            throw FormatError("bad source spec: want rapl:<path>[:max_uj]");
        }
        // The last segment is max_uj only when it parses as a plain integer,
        // so paths containing ':' still work without it.
        RaplSpec r;
        auto last_colon = rest.rfind(':');
        if (last_colon != std::string_view::npos) {
            std::string_view tail = rest.substr(last_colon + 1);
            bool digits = !tail.empty() &&
                          std::all_of(tail.begin(), tail.end(),
                                      [](unsigned char c) { return std::isdigit(c); });
            if (digits) {
                r.path = std::string(rest.substr(0, last_colon));
                r.max_range_uj = parse_i64(tail, "max_uj");
                if (r.max_range_uj <= 0) {
                    throw FormatError("bad source spec: max_uj must be > 0");
                }
                return r;
            }
        }
        r.path = std::string(rest);
        return r;
    }
    if (head == "cmd") {
        auto parts = split(rest, ':');
        if (parts.empty() || parts[0].empty()) {
            throw FormatError("bad source spec: want cmd:<executable>[:<arg>...]");
        }
        return CommandSpec{std::move(parts)};
    }
    throw FormatError("bad source spec: unknown source kind '" + std::string(head) + "'");
}

std::string source_kind(const PowerSourceSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SyntheticSpec>) {
                return "synthetic";
            } else if constexpr (std::is_same_v<T, TraceSpec>) {
                return "trace";
            } else if constexpr (std::is_same_v<T, RaplSpec>) {
                return "rapl";
            } else {
                return "cmd";
            }
        },
        spec);
}

std::unique_ptr<PowerSource> make_power_source(const PowerSourceSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::unique_ptr<PowerSource> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SyntheticSpec>) {
                return std::make_unique<SyntheticSource>(s);
            } else if constexpr (std::is_same_v<T, TraceSpec>) {
                return std::make_unique<TraceSource>(s);
            } else if constexpr (std::is_same_v<T, RaplSpec>) {
                return std::make_unique<RaplSource>(s);
            } else {
                return std::make_unique<CommandSource>(s);
            }
        },
        spec);
}

} // namespace wattline
