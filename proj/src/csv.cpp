#include "mvembed/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mvembed/errors.hpp"

namespace mvembed::csv {

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path, int line_no) {
    std::vector<double> values;
    const char* cursor = line.c_str();
    while (true) {
        char* end = nullptr;
        const double v = std::strtod(cursor, &end);
        if (end == cursor) {
            throw CsvFormatError(path + ":" + std::to_string(line_no) + ": expected a number");
        }
        values.push_back(v);
        cursor = end;
        while (*cursor == ' ' || *cursor == '\t') ++cursor;
        if (*cursor == '\0' || *cursor == '\r') break;
        if (*cursor != ',') {
            throw CsvFormatError(path + ":" + std::to_string(line_no) + ": expected ','");
        }
        ++cursor;
    }
    return values;
}

}  // namespace

Eigen::MatrixXd read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        rows.push_back(parse_row(line, path, line_no));
        if (rows.back().size() != rows.front().size()) {
            throw CsvFormatError(path + ":" + std::to_string(line_no) + ": ragged row, expected " +
                                 std::to_string(rows.front().size()) + " columns");
        }
    }
    if (rows.empty() || rows.front().empty()) {
        throw EmptyViewError(path + ": no data");
    }

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!std::isfinite(v)) {
                throw NonFiniteEntryError(path + ": non-finite value at row " + std::to_string(i) +
                                          ", column " + std::to_string(j));
            }
            m(i, j) = v;
        }
    }
    return m;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw MissingFileError("cannot write " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace mvembed::csv
