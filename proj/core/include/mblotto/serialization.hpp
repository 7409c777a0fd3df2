#pragma once

#include "mblotto/ensemble.hpp"
#include "mblotto/spectra.hpp"

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace mblotto {

inline constexpr int kCsvSchemaVersion = 1;

// Shortest text that parses back to the same double; "inf", "-inf" and "nan" for the rest.
std::string format_double(double x);
double parse_double(const std::string& s);

using CsvMeta = std::vector<std::pair<std::string, std::string>>;

// Metadata lines look like "# key: value"; the first one carries the schema version.
void write_csv_meta(std::ostream& os, const std::string& kind, const CsvMeta& meta);

// One row per grid point.
void write_grid_csv(std::ostream& os, const EnsembleSummary& s, const CsvMeta& meta = {});

// One row per realization of a grid point.
void write_records_csv(std::ostream& os, const std::vector<CycleRecord>& records, const CsvMeta& meta = {});

void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& bins, const CsvMeta& meta = {});

void write_samples_csv(std::ostream& os, const std::vector<std::pair<std::string, const std::vector<double>*>>& columns,
                       const CsvMeta& meta = {});

} // namespace mblotto
