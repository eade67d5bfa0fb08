#pragma once

#include <span>
#include <string>
#include <vector>

namespace lactose {

/// Writes numeric CSV with a fixed header. Values are printed with 17
/// significant digits so a write/read round trip is lossless for doubles.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) {
        row(std::span<const double>(values.begin(), values.size()));
    }

  private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double v);

/// In-memory numeric CSV table keyed by column name.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;  // column-major

    static CsvTable load(const std::string& path);
    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

}  // namespace lactose
