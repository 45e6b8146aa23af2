#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wattline/types.hpp"

namespace wattline {

inline constexpr std::string_view kRecordsCsvHeader =
    "kernel,config,precision,W_flop,Q_byte,t_s,E_j";

// Parse the records table. The header must match kRecordsCsvHeader exactly;
// in lenient mode extra trailing columns are ignored instead of rejected.
// Every row must form a valid MeasurementRecord; violations raise
// FormatError with the line number.
std::vector<MeasurementRecord> records_from_csv_text(std::string_view text,
                                                     bool lenient = false);
std::vector<MeasurementRecord> load_records(const std::string& path,
                                            bool lenient = false);

// Inverse: header plus one row per record, doubles in shortest
// round-trip form.
std::string records_to_csv(const std::vector<MeasurementRecord>& records);

} // namespace wattline
