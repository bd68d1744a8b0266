#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vmci {

/// n x d table of real observations with named columns, stored row-major.
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(std::vector<std::string> names, std::size_t rows);
    SampleMatrix(std::vector<std::string> names, std::vector<double> row_major);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols(), cols()};
    }
    std::span<const double> values() const { return data_; }

    /// Index of a named column; throws std::invalid_argument when absent.
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    /// New matrix holding the given columns in the given order.
    SampleMatrix select_columns(std::span<const std::size_t> cols) const;
    SampleMatrix select_columns(const std::vector<std::string>& names) const;
    /// New matrix holding the given rows in the given order.
    SampleMatrix select_rows(std::span<const std::size_t> rows) const;

    bool all_finite() const;

    friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

private:
    std::vector<std::string> names_;
    std::size_t rows_ = 0;
    std::vector<double> data_;
};

// CSV: header row of column names, one observation per line. Values are
// written in shortest round-trip form, so read(write(m)) == m bit for bit.
void write_csv(std::ostream& out, const SampleMatrix& m);
void write_csv_file(const std::string& path, const SampleMatrix& m);
SampleMatrix read_csv(std::istream& in);
SampleMatrix read_csv_file(const std::string& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace vmci
