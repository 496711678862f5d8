#pragma once

#include <string>
#include <vector>

namespace skytier::svg {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Minimal deterministic line chart writer (fixed canvas, no external deps).
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

}  // namespace skytier::svg
