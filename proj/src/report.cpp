#include "mycelogic/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mycelogic/error.hpp"

namespace mycelogic {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move output into place: " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const std::array<const char*, 7> kColors = {"#1f77b4", "#2ca02c", "#d62728", "#000000",
                                            "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;  // data ranges

  double px(double x) const {
    const double w = kWidth - kLeft - kRight;
    return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.0) * w;
  }
  double py(double y) const {
    const double h = kHeight - kTop - kBottom;
    return kTop + h - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.0) * h;
  }
};

std::string open_svg(std::string_view title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                  "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(title) + "</text>\n";
  return s;
}

std::string axes(const Frame& f, std::string_view xlabel, std::string_view ylabel) {
  std::string s;
  const double bx = f.px(f.x0), by = f.py(f.y0);
  s += "<line x1=\"" + num(bx) + "\" y1=\"" + num(by) + "\" x2=\"" + num(f.px(f.x1)) + "\" y2=\"" +
       num(by) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(bx) + "\" y1=\"" + num(by) + "\" x2=\"" + num(bx) + "\" y2=\"" +
       num(f.py(f.y1)) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(by + 16) + "\" text-anchor=\"middle\">" +
         label(xv) + "</text>\n";
    s += "<text x=\"" + num(bx - 6) + "\" y=\"" + num(f.py(yv) + 4) + "\" text-anchor=\"end\">" +
         label(yv) + "</text>\n";
  }
  s += "<text x=\"" + num((f.px(f.x0) + f.px(f.x1)) / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((f.py(f.y0) + f.py(f.y1)) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num((f.py(f.y0) + f.py(f.y1)) / 2) +
       ")\">" + escape(ylabel) + "</text>\n";
  return s;
}

std::string legend(const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 18.0 * static_cast<double>(i);
    const double x = kWidth - kRight + 15.0;
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"12\" height=\"12\" fill=\"" +
         kColors[i % kColors.size()] + "\"/>\n";
    s += "<text x=\"" + num(x + 18) + "\" y=\"" + num(y + 10) + "\">" + escape(names[i]) + "</text>\n";
  }
  return s;
}

}  // namespace

std::string gate_ratio_svg(std::span<const RatioSeries> substrates) {
  std::string s = open_svg("Gate ratios");
  const Frame f{0.0, static_cast<double>(kGateCount - 1), 0.0, 1.0};
  s += axes(f, "", "ratio");
  for (std::size_t g = 0; g < kGateCount; ++g) {
    s += "<text x=\"" + num(f.px(static_cast<double>(g))) + "\" y=\"" + num(kHeight - 30) +
         "\" text-anchor=\"middle\">" + escape(gate_label(kRatioOrder[g])) + "</text>\n";
  }
  std::vector<std::string> names;
  for (std::size_t k = 0; k < substrates.size(); ++k) {
    names.push_back(substrates[k].substrate);
    const char* color = kColors[k % kColors.size()];
    std::string pts;
    for (std::size_t g = 0; g < kGateCount; ++g) {
      const double x = f.px(static_cast<double>(g));
      const double y = f.py(std::clamp(substrates[k].ratios[g], 0.0, 1.0));
      pts += num(x) + "," + num(y) + " ";
      s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"" + pts + "\"/>\n";
  }
  s += legend(names);
  s += "</svg>\n";
  return s;
}

std::string sweep_svg(const SweepResult& sweep, std::string_view title) {
  sweep.validate();
  double ymax = 1.0;
  for (const auto& row : sweep.counts)
    for (auto c : row) ymax = std::max(ymax, static_cast<double>(c));
  const Frame f{sweep.theta.empty() ? 0.0 : sweep.theta.front(),
                sweep.theta.empty() ? 1.0 : sweep.theta.back(), 0.0, ymax};
  std::string s = open_svg(title);
  s += axes(f, "theta (V)", "gates");
  std::vector<std::string> names;
  for (std::size_t k = 0; k < kRcGateCount; ++k) {
    names.emplace_back(rc_gate_name(kRcGates[k]));
    std::string pts;
    for (std::size_t i = 0; i < sweep.theta.size(); ++i)
      pts += num(f.px(sweep.theta[i])) + "," + num(f.py(static_cast<double>(sweep.counts[i][k]))) + " ";
    s += "<polyline fill=\"none\" stroke=\"" + std::string(kColors[k]) + "\" points=\"" + pts + "\"/>\n";
  }
  s += legend(names);
  s += "</svg>\n";
  return s;
}

std::string function_census_svg(const FunctionCensus& c) {
  double ymax = 1.0;
  for (const auto& [bits, n] : c.histogram) ymax = std::max(ymax, static_cast<double>(n));
  const Frame f{0.0, 65535.0, 0.0, ymax};
  std::string s = open_svg("Function census (" + std::to_string(c.total) + " tables, " +
                           std::to_string(c.unique()) + " unique)");
  s += axes(f, "truth table (decimal)", "count");
  for (const auto& [bits, n] : c.histogram) {
    const double x = f.px(bits);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(f.py(0.0)) + "\" x2=\"" + num(x) + "\" y2=\"" +
         num(f.py(static_cast<double>(n))) + "\" stroke=\"#1f77b4\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace mycelogic
