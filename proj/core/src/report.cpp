#include "persist/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "persist/error.hpp"

namespace persist {

namespace {

std::string fixed(double value, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string tick_label(double value) {
  if (std::abs(value) < 1e-12) value = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  for (SweepVar v : table.vars) out << to_string(v) << ',';
  out << "t_c,residual,status\n";
  for (const SweepRow& row : table.rows) {
    for (double c : row.coords) out << format_number(c) << ',';
    out << (row.t_c ? format_number(*row.t_c) : "") << ',' << format_number(row.residual) << ','
        << row.status << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream out;
  out << "t,n,r,event\n";
  for (const TrajectoryRow& row : rows) {
    out << format_number(row.t) << ',' << row.n << ',' << row.r << ',' << to_string(row.event) << '\n';
  }
  return out.str();
}

std::vector<Series> sweep_series(const SweepTable& table) {
  std::vector<Series> out;
  if (table.vars.size() == 1) {
    Series s{std::string(to_string(table.vars[0])), {}};
    for (const SweepRow& row : table.rows) {
      if (row.t_c) s.points.emplace_back(row.coords[0], *row.t_c);
    }
    out.push_back(std::move(s));
    return out;
  }
  // Keep series in first-appearance order of the second coordinate.
  std::map<double, std::size_t> index;
  for (const SweepRow& row : table.rows) {
    const double key = row.coords[1];
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({std::string(to_string(table.vars[1])) + "=" + format_number(key), {}});
    }
    if (row.t_c) out[it->second].points.emplace_back(row.coords[0], *row.t_c);
  }
  return out;
}

std::string emit_svg(const std::vector<Series>& series, const AxesSpec& axes) {
  std::vector<const Series*> drawn;
  for (const Series& s : series) {
    if (s.points.size() >= 2) drawn.push_back(&s);
  }
  if (drawn.empty()) throw Error(ErrorCode::TooFewPoints, "need at least two points to draw a curve");

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const Series* s : drawn) {
    for (const auto& [x, y] : s->points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  auto pad = [](double& lo, double& hi) {
    if (hi - lo <= 0.0) {
      const double d = std::max(std::abs(lo) * 0.05, 0.5);
      lo -= d;
      hi += d;
    }
  };
  pad(x_min, x_max);
  pad(y_min, y_max);
  if (y_min > 0.0 && y_min < 0.25 * y_max) y_min = 0.0;

  const double left = 70.0, right = 20.0, top = 40.0, bottom = 55.0;
  const double plot_w = axes.width - left - right;
  const double plot_h = axes.height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << axes.width << "\" height=\"" << axes.height
      << "\" viewBox=\"0 0 " << axes.width << ' ' << axes.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << axes.width << "\" height=\"" << axes.height << "\" fill=\"white\"/>\n";
  if (!axes.title.empty()) {
    svg << "<text x=\"" << fixed(axes.width / 2.0, 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape_xml(axes.title) << "</text>\n";
  }
  const std::string x0 = fixed(left, 2), x1 = fixed(left + plot_w, 2);
  const std::string y0 = fixed(top + plot_h, 2), y1 = fixed(top, 2);
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
      << "</g>\n";

  constexpr int kTicks = 5;
  svg << "<g class=\"ticks\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / kTicks;
    const double fy = y_min + (y_max - y_min) * i / kTicks;
    const std::string px = fixed(sx(fx), 2), py = fixed(sy(fy), 2);
    svg << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << fixed(top + plot_h + 5, 2)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << fixed(top + plot_h + 18, 2) << "\" text-anchor=\"middle\">"
        << tick_label(fx) << "</text>\n"
        << "<line x1=\"" << fixed(left - 5, 2) << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(left - 8, 2) << "\" y=\"" << fixed(sy(fy) + 4, 2) << "\" text-anchor=\"end\">"
        << tick_label(fy) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << fixed(left + plot_w / 2, 2) << "\" y=\"" << fixed(axes.height - 12.0, 2)
      << "\" text-anchor=\"middle\">" << escape_xml(axes.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << fixed(top + plot_h / 2, 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(top + plot_h / 2, 2) << ")\">" << escape_xml(axes.y_label) << "</text>\n";

  for (std::size_t k = 0; k < drawn.size(); ++k) {
    const char* colour = kPalette[k % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" data-label=\""
        << escape_xml(drawn[k]->label) << "\" points=\"";
    for (std::size_t i = 0; i < drawn[k]->points.size(); ++i) {
      const auto& [x, y] = drawn[k]->points[i];
      svg << (i ? " " : "") << fixed(sx(x), 2) << ',' << fixed(sy(y), 2);
    }
    svg << "\"/>\n";
    const double ly = top + 12.0 + 16.0 * static_cast<double>(k);
    const double lx = left + plot_w - 120.0;
    svg << "<line x1=\"" << fixed(lx, 2) << "\" y1=\"" << fixed(ly, 2) << "\" x2=\"" << fixed(lx + 20, 2)
        << "\" y2=\"" << fixed(ly, 2) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(lx + 26, 2) << "\" y=\"" << fixed(ly + 4, 2) << "\">" << escape_xml(drawn[k]->label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace persist
