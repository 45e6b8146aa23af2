#include "wattline/records_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "wattline/errors.hpp"

namespace wattline {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t p = line.find(',', start);
        if (p == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, p - start));
        start = p + 1;
    }
    return fields;
}

double parse_double_field(std::string_view s, size_t lineno, const char* col) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(lineno, std::string("column ") + col + ": '" + std::string(s) +
                                      "' is not a number");
    }
    return v;
}

void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

} // namespace

std::vector<MeasurementRecord> records_from_csv_text(std::string_view text, bool lenient) {
    std::istringstream in{std::string(text)};
    std::string line;
    size_t lineno = 0;
    std::vector<MeasurementRecord> records;
    size_t ncols = 7;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (lineno == 1) {
            if (line == kRecordsCsvHeader) {
                continue;
            }
            if (lenient && line.rfind(std::string(kRecordsCsvHeader) + ",", 0) == 0) {
                ncols = split_fields(line).size();
                continue;
            }
            throw FormatError(1, "bad records header; want '" +
                                     std::string(kRecordsCsvHeader) + "', got '" + line +
                                     "'");
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != ncols && !(lenient && fields.size() > 7)) {
            throw FormatError(lineno, "expected " + std::to_string(ncols) +
                                          " columns, got " +
                                          std::to_string(fields.size()));
        }
        MeasurementRecord rec;
        rec.kernel_name = std::string(fields[0]);
        rec.config_label = std::string(fields[1]);
        try {
            rec.precision = precision_from_string(fields[2]);
        } catch (const Error& e) {
            throw FormatError(lineno, e.what());
        }
        rec.work_flop = parse_double_field(fields[3], lineno, "W_flop");
        rec.traffic_bytes = parse_double_field(fields[4], lineno, "Q_byte");
        rec.time_s = parse_double_field(fields[5], lineno, "t_s");
        rec.energy_j = parse_double_field(fields[6], lineno, "E_j");
        if (rec.kernel_name.empty()) {
            throw FormatError(lineno, "empty kernel name");
        }
        try {
            validate(rec);
        } catch (const Error& e) {
            throw FormatError(lineno, e.what());
        }
        records.push_back(std::move(rec));
    }
    if (lineno == 0) {
        throw FormatError(1, "empty records file (missing header)");
    }
    return records;
}

std::vector<MeasurementRecord> load_records(const std::string& path, bool lenient) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open records file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return records_from_csv_text(buf.str(), lenient);
}

std::string records_to_csv(const std::vector<MeasurementRecord>& records) {
    std::string out{kRecordsCsvHeader};
    out += '\n';
    for (const auto& r : records) {
        out += r.kernel_name;
        out += ',';
        out += r.config_label;
        out += ',';
        out += to_string(r.precision);
        out += ',';
        append_double(out, r.work_flop);
        out += ',';
        append_double(out, r.traffic_bytes);
        out += ',';
        append_double(out, r.time_s);
        out += ',';
        append_double(out, r.energy_j);
        out += '\n';
    }
    return out;
}

} // namespace wattline
