#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nocsynth {

/// FNV-1a 64-bit content digest, hex-encoded.
std::string digest(const std::string& content);

struct BarGroup {
  std::string label;                 // metric name
  std::vector<double> values;        // one value per series
};

/// Static grouped bar chart. Series are architectures, groups are metrics;
/// values are normalized per group so unlike units share one plot.
std::string render_bar_chart_svg(const std::string& title,
                                 const std::vector<std::string>& series,
                                 const std::vector<BarGroup>& groups);

}  // namespace nocsynth
