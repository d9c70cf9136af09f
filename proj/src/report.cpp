#include "nocsynth/report.hpp"

#include <algorithm>
#include <sstream>

#include "nocsynth/graph.hpp"

namespace nocsynth {

std::string digest(const std::string& content) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string render_bar_chart_svg(const std::string& title,
                                 const std::vector<std::string>& series,
                                 const std::vector<BarGroup>& groups) {
  const int width = 640, height = 360;
  const int margin_left = 60, margin_bottom = 60, margin_top = 50;
  const double plot_w = width - margin_left - 20;
  const double plot_h = height - margin_top - margin_bottom;
  const char* palette[] = {"#4878cf", "#ee854a", "#6acc64", "#d65f5f"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";

  if (!groups.empty() && !series.empty()) {
    double group_w = plot_w / groups.size();
    double bar_w = group_w * 0.7 / series.size();
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const BarGroup& g = groups[gi];
      double peak = 0;
      for (double v : g.values) peak = std::max(peak, v);
      if (peak <= 0) peak = 1;
      double gx = margin_left + gi * group_w + group_w * 0.15;
      for (std::size_t si = 0; si < g.values.size() && si < series.size(); ++si) {
        double h = plot_h * (g.values[si] / peak);
        double x = gx + si * bar_w;
        double y = margin_top + (plot_h - h);
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w * 0.9
            << "\" height=\"" << h << "\" fill=\"" << palette[si % 4] << "\"/>\n";
        svg << "<text x=\"" << x + bar_w * 0.45 << "\" y=\"" << y - 4
            << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">"
            << format_number(g.values[si]) << "</text>\n";
      }
      svg << "<text x=\"" << margin_left + gi * group_w + group_w / 2 << "\" y=\""
          << height - margin_bottom + 18
          << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << g.label
          << "</text>\n";
    }
    // Legend.
    for (std::size_t si = 0; si < series.size(); ++si) {
      double lx = margin_left + si * 150.0;
      double ly = height - 18;
      svg << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\""
          << palette[si % 4] << "\"/>\n";
      svg << "<text x=\"" << lx + 16 << "\" y=\"" << ly
          << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[si] << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace nocsynth
