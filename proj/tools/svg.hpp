#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace dlqr::tools {

struct Series {
  std::string label;
  std::vector<double> y;
};

/// Line plot of one or more series over t.
void WriteLinePlot(const std::filesystem::path& file, const std::string& title,
                   const std::vector<double>& t, const std::vector<Series>& series);

/// Space-time heatmap; values(i, k) at position x[i] and time t[k]. Time is
/// thinned to at most max_columns columns.
void WriteHeatmap(const std::filesystem::path& file, const std::string& title,
                  const std::vector<double>& t, const Eigen::VectorXd& x,
                  const Eigen::MatrixXd& values, int max_columns = 240);

}  // namespace dlqr::tools
