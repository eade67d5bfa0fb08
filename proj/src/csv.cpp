#include "lactose/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lactose/errors.hpp"

namespace lactose {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::size_t width;
    std::string path;
};

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : impl_(new Impl{std::ofstream(path), header.size(), path}) {
    if (!impl_->out)
        throw ConfigError("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) impl_->out << ',';
        impl_->out << header[i];
    }
    impl_->out << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != impl_->width)
        throw ConfigError("csv row width mismatch in '" + impl_->path + "'");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) impl_->out << ',';
        impl_->out << format_double(values[i]);
    }
    impl_->out << '\n';
}

CsvTable CsvTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("'" + path + "' is empty");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    table.columns.resize(table.header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            if (col >= table.columns.size())
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": too many columns");
            try {
                table.columns[col].push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": bad number '" + cell + "'");
            }
            ++col;
        }
        if (col != table.columns.size())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected " +
                              std::to_string(table.columns.size()) +
                              " columns, got " + std::to_string(col));
    }
    return table;
}

bool CsvTable::has_column(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw ConfigError("csv column '" + name + "' not found");
}

}  // namespace lactose
