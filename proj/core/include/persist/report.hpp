#pragma once

#include <string>
#include <utility>
#include <vector>

#include "persist/critical.hpp"
#include "persist/simulator.hpp"

namespace persist {

// Locale-independent shortest round-trip decimal form of a double.
std::string format_number(double value);

// Sweep table as CSV: one column per grid variable, then t_c, residual,
// status. t_c is empty for rows whose status is not "ok".
std::string sweep_csv(const SweepTable& table);

// Recorded trajectory as CSV with columns t, n, r, event.
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct AxesSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 420;
};

// Valid sweep rows as plot series. With one grid variable there is a single
// series; with two, one series per value of the second variable, plotted
// against the first.
std::vector<Series> sweep_series(const SweepTable& table);

// Self-contained SVG line chart with linear axes, one polyline per series.
// Series with fewer than two points are skipped; throws TooFewPoints when
// nothing is left to draw. Output bytes depend only on the input.
std::string emit_svg(const std::vector<Series>& series, const AxesSpec& axes);

}  // namespace persist
