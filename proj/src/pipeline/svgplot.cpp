// pipeline/svgplot.cpp

// Copyright 2026  Cantus Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cantus/svgplot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cantus {

std::string render_f0_svg(const std::vector<PlotSeries>& series,
                          const std::string& title) {
  const double width = 1000.0, height = 400.0;
  const double margin_l = 60.0, margin_r = 15.0, margin_t = 30.0, margin_b = 30.0;

  std::size_t frames = 0;
  double lo = 1e300, hi = -1e300;
  for (const auto& s : series) {
    frames = std::max(frames, s.values.size());
    for (double v : s.values) {
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (frames == 0 || lo > hi) {
    lo = -100.0;
    hi = 100.0;
    frames = 1;
  }
  double pad = std::max(10.0, 0.05 * (hi - lo));
  lo -= pad;
  hi += pad;

  auto x_of = [&](std::size_t t) {
    return margin_l + (width - margin_l - margin_r) *
                          (frames > 1 ? static_cast<double>(t) / (frames - 1) : 0.0);
  };
  auto y_of = [&](double v) {
    return margin_t + (height - margin_t - margin_b) * (1.0 - (v - lo) / (hi - lo));
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 400\">\n";
  out << "<style>\n"
         ".note-pitch { fill: none; stroke: #888; stroke-width: 1.5; stroke-dasharray: 4 2; }\n"
         ".f0 { fill: none; stroke: #d62728; stroke-width: 1.2; }\n"
         ".f0-novib { fill: none; stroke: #1f77b4; stroke-width: 1.2; }\n"
         ".f0-ref { fill: none; stroke: #2ca02c; stroke-width: 1.0; }\n"
         ".axis { stroke: #333; stroke-width: 1; }\n"
         ".label { font: 12px sans-serif; fill: #333; }\n"
         "</style>\n";
  out << "<text class=\"label\" x=\"15\" y=\"20\">" << title << "</text>\n";

  char buf[64];
  // y-axis with a few cent gridline labels
  out << "<line class=\"axis\" x1=\"" << margin_l << "\" y1=\"" << margin_t
      << "\" x2=\"" << margin_l << "\" y2=\"" << height - margin_b << "\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double v = lo + (hi - lo) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.0f", v);
    out << "<text class=\"label\" x=\"8\" y=\"" << y_of(v) + 4 << "\">" << buf
        << "</text>\n";
  }

  for (const auto& s : series) {
    bool open = false;
    std::ostringstream points;
    auto flush = [&]() {
      if (open) {
        out << "<polyline class=\"" << s.css_class << "\" points=\"" << points.str()
            << "\"/>\n";
        points.str("");
        open = false;
      }
    };
    for (std::size_t t = 0; t < s.values.size(); ++t) {
      if (std::isnan(s.values[t])) {
        flush();
        continue;
      }
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x_of(t), y_of(s.values[t]));
      points << buf;
      open = true;
    }
    flush();
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cantus
