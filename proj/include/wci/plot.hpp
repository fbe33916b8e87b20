#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wci {

/// One polyline with point markers.
struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::uint32_t rgb = 0x1f77b4;
};

/// Minimal static chart: axes, ticks with numeric labels, one or more
/// series. Layout is fixed; the sibling CSV is the authoritative data.
/// Returns false instead of throwing - plotting must never fail a run.
bool write_line_plot_png(const std::string& path,
                         const std::vector<PlotSeries>& series,
                         bool log_x = false, bool log_y = false);

}  // namespace wci
