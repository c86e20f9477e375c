#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mvembed::csv {

// Numeric CSV: one sample per row, comma separated, '.' decimal, no header.
Eigen::MatrixXd read_matrix(const std::string& path);

// Values written with 17 significant digits so a read-back round-trips.
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);

std::vector<std::string> read_lines(const std::string& path);

std::string format_double(double value);

}  // namespace mvembed::csv
