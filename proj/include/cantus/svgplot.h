// cantus/svgplot.h

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

#ifndef CANTUS_SVGPLOT_H_
#define CANTUS_SVGPLOT_H_

#include <string>
#include <vector>

namespace cantus {

// F0-contour plot: fixed viewBox (0 0 1000 400), one polyline per series
// with its css_class, shared cents axis. Values are per frame; NaN breaks
// the line (used for unvoiced gaps).
struct PlotSeries {
  std::string css_class;
  std::vector<double> values;
};

std::string render_f0_svg(const std::vector<PlotSeries>& series,
                          const std::string& title);

}  // namespace cantus

#endif  // CANTUS_SVGPLOT_H_
