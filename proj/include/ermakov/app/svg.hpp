#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ermakov/app/csv.hpp"

namespace ermakov::app {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

std::string render_svg(const Chart& chart);
void write_svg(const std::filesystem::path& path, const Chart& chart);

/// sigma against t; thermal tables get one line per beta (at most eight).
Chart chart_from_table(const Table& table, const std::string& title);

}  // namespace ermakov::app
