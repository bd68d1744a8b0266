#include "vmci/sample_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vmci {

SampleMatrix::SampleMatrix(std::vector<std::string> names, std::size_t rows)
    : names_(std::move(names)), rows_(rows), data_(rows * names_.size(), 0.0) {
    if (names_.empty()) throw std::invalid_argument("SampleMatrix needs at least one column");
}

SampleMatrix::SampleMatrix(std::vector<std::string> names, std::vector<double> row_major)
    : names_(std::move(names)), data_(std::move(row_major)) {
    if (names_.empty()) throw std::invalid_argument("SampleMatrix needs at least one column");
    if (data_.size() % names_.size() != 0)
        throw std::invalid_argument("SampleMatrix data size is not a multiple of the column count");
    rows_ = data_.size() / names_.size();
}

std::size_t SampleMatrix::column_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw std::invalid_argument("unknown column '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

bool SampleMatrix::has_column(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

SampleMatrix SampleMatrix::select_columns(std::span<const std::size_t> cols) const {
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (auto c : cols) {
        if (c >= this->cols()) throw std::out_of_range("column index out of range");
        names.push_back(names_[c]);
    }
    SampleMatrix out(std::move(names), rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
    return out;
}

SampleMatrix SampleMatrix::select_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(column_index(n));
    return select_columns(idx);
}

SampleMatrix SampleMatrix::select_rows(std::span<const std::size_t> rows) const {
    SampleMatrix out(names_, rows.size());
    const std::size_t d = cols();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= rows_) throw std::out_of_range("row index out of range");
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(rows[i] * d), d,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    return out;
}

bool SampleMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const SampleMatrix& m) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m.names()[c];
    out << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const SampleMatrix& m) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(f, m);
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

SampleMatrix read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV input is empty");
    auto names = split_fields(line);
    if (names.empty() || std::any_of(names.begin(), names.end(), [](auto& s) { return s.empty(); }))
        throw std::runtime_error("CSV header has an empty column name");

    std::vector<double> data;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_fields(line);
        if (fields.size() != names.size())
            throw std::runtime_error("CSV line " + std::to_string(lineno) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(names.size()));
        for (const auto& f : fields) {
            double v = 0.0;
            auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
                throw std::runtime_error("CSV line " + std::to_string(lineno) + ": bad number '" + f + "'");
            data.push_back(v);
        }
    }
    return SampleMatrix(std::move(names), std::move(data));
}

SampleMatrix read_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return read_csv(f);
}

}  // namespace vmci
