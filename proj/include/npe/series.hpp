#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "npe/diagnostics.hpp"

namespace npe {

// Fixed column order matching DiagnosticsRecord; values printed with
// %.17g so a parse-back reproduces the record exactly.
std::string series_header();
std::string series_row(const DiagnosticsRecord& r);
DiagnosticsRecord parse_series_row(const std::string& line);

// One CSV row per record; writes the header first when the file is empty
// or missing.
void append_series_row(const DiagnosticsRecord& r, const std::string& path);

std::vector<DiagnosticsRecord> read_series(const std::string& path);

// Buffered writer used by the run loop; one writer per output file.
class SeriesWriter {
public:
    explicit SeriesWriter(const std::string& path);
    void append(const DiagnosticsRecord& r);

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace npe
