#include "mblotto/serialization.hpp"

#include "mblotto/errors.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <system_error>

namespace mblotto {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double x = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc() || res.ptr != last) throw ParameterError("not a number: '" + s + "'");
    return x;
}

void write_csv_meta(std::ostream& os, const std::string& kind, const CsvMeta& meta) {
    os << "# " << kind << " csv v" << kCsvSchemaVersion << '\n';
    for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
}

void write_grid_csv(std::ostream& os, const EnsembleSummary& s, const CsvMeta& meta) {
    CsvMeta m = meta;
    m.emplace_back("columns", "value=swept parameter as given; wb=absolute bandwidth; *_err=standard error; "
                              "eta=ratio of means (empty if undefined); used=realizations kept");
    m.emplace_back("mean_gap", format_double(s.mean_gap));
    write_csv_meta(os, "grid", m);
    os << "value,wb,beta_c,beta_h,speed,W1,W1_err,Q2,Q2_err,W3,W3_err,Q4,Q4_err,Wtot,Wtot_err,eta,used\n";
    for (const auto& p : s.points) {
        os << format_double(p.value) << ',' << format_double(p.params.wb) << ',' << format_double(p.params.beta_c)
           << ',' << format_double(p.params.beta_h) << ',' << format_double(p.params.speed);
        for (const Stat* st : {&p.w1, &p.q2, &p.w3, &p.q4, &p.w_tot})
            os << ',' << format_double(st->mean) << ',' << format_double(st->err);
        os << ',' << (p.eta ? format_double(*p.eta) : std::string()) << ',' << p.used << '\n';
    }
}

void write_records_csv(std::ostream& os, const std::vector<CycleRecord>& records, const CsvMeta& meta) {
    write_csv_meta(os, "records", meta);
    os << "realization_id,W1,Q2,W3,Q4,Wtot\n";
    for (const auto& r : records)
        os << r.realization_id << ',' << format_double(r.w1) << ',' << format_double(r.q2) << ','
           << format_double(r.w3) << ',' << format_double(r.q4) << ',' << format_double(r.w_tot) << '\n';
}

void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& bins, const CsvMeta& meta) {
    write_csv_meta(os, "histogram", meta);
    os << "bin_left,bin_right,count,density\n";
    for (const auto& b : bins)
        os << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << ','
           << format_double(b.density) << '\n';
}

void write_samples_csv(std::ostream& os, const std::vector<std::pair<std::string, const std::vector<double>*>>& cols,
                       const CsvMeta& meta) {
    write_csv_meta(os, "samples", meta);
    std::size_t rows = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        os << (c ? "," : "") << cols[c].first;
        rows = std::max(rows, cols[c].second->size());
    }
    os << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) os << ',';
            if (r < cols[c].second->size()) os << format_double((*cols[c].second)[r]);
        }
        os << '\n';
    }
}

} // namespace mblotto
