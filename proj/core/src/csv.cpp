#include "oscphase/csv.hpp"

#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace oscphase {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_waveform_csv(std::ostream& os, const PeriodicWaveform& w,
                        const std::vector<std::string>& column_names) {
    const int d = w.dim();
    os << "theta";
    if (column_names.empty()) {
        for (int c = 0; c < d; ++c)
            os << ",v" << c;
    } else {
        if (static_cast<int>(column_names.size()) != d)
            throw std::invalid_argument("write_waveform_csv: column name count mismatch");
        for (const std::string& name : column_names)
            os << ',' << name;
    }
    os << '\n';
    const int n = w.num_samples();
    for (int k = 0; k < n; ++k) {
        os << format_double(static_cast<double>(k) / n);
        for (int c = 0; c < d; ++c)
            os << ',' << format_double(w.samples()(k, c));
        os << '\n';
    }
}

PeriodicWaveform read_waveform_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("read_waveform_csv: empty input");
    if (line.rfind("theta", 0) != 0)
        throw std::invalid_argument("read_waveform_csv: missing 'theta,...' header");

    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::invalid_argument("read_waveform_csv: no sample rows");
    const std::size_t width = rows.front().size();
    if (width < 2)
        throw std::invalid_argument("read_waveform_csv: need at least one value column");
    Eigen::MatrixXd samples(static_cast<int>(rows.size()), static_cast<int>(width - 1));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw std::invalid_argument("read_waveform_csv: ragged row " + std::to_string(r));
        for (std::size_t c = 1; c < width; ++c)
            samples(static_cast<int>(r), static_cast<int>(c - 1)) = rows[r][c];
    }
    return PeriodicWaveform::from_samples(samples);
}

void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& header,
                          const std::vector<double>& t, const Eigen::MatrixXd& columns) {
    if (static_cast<int>(header.size()) != columns.cols() + 1)
        throw std::invalid_argument("write_trajectory_csv: header size mismatch");
    if (static_cast<int>(t.size()) != columns.rows())
        throw std::invalid_argument("write_trajectory_csv: row count mismatch");
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << '\n';
    for (int r = 0; r < columns.rows(); ++r) {
        os << format_double(t[r]);
        for (int c = 0; c < columns.cols(); ++c)
            os << ',' << format_double(columns(r, c));
        os << '\n';
    }
}

} // namespace oscphase
