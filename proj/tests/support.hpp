/*
 * Copyright 2026 The glassboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GLASSBOOST_TESTS_SUPPORT_HPP_
#define GLASSBOOST_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glassboost/frame.hpp"
#include "glassboost/random.hpp"

namespace gbtest {

using glassboost::ColumnKind;
using glassboost::ColumnSchema;
using glassboost::CounterRng;
using glassboost::TabularFrame;

inline TabularFrame numeric_frame(const std::vector<std::vector<double>>& cols,
                                  const std::vector<std::uint8_t>& y) {
  std::vector<ColumnSchema> schema;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    ColumnSchema s;
    s.name = "x" + std::to_string(c);
    for (double v : cols[c]) s.missing_count += glassboost::is_missing(v) ? 1 : 0;
    schema.push_back(s);
  }
  return TabularFrame(schema, cols, y, {"y", "0", "1"});
}

// Two uniform features; the label is their quadrant parity.
inline TabularFrame xor_frame(std::size_t n, std::uint64_t seed) {
  CounterRng rng = CounterRng::stream(seed, {0x40});
  std::vector<std::vector<double>> cols(2, std::vector<double>(n));
  std::vector<std::uint8_t> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    cols[0][r] = rng.uniform();
    cols[1][r] = rng.uniform();
    y[r] = static_cast<std::uint8_t>((cols[0][r] > 0.5) != (cols[1][r] > 0.5));
  }
  return numeric_frame(cols, y);
}

// Three numeric columns (one with missing cells), one categorical column and a
// binary sensitive attribute; labels follow a logistic model of the features.
inline TabularFrame mixed_frame(std::size_t n, std::uint64_t seed) {
  CounterRng rng = CounterRng::stream(seed, {0x41});
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<std::uint8_t> y(n);
  std::vector<int> group(n);
  std::size_t missing = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double a = rng.normal();
    const double b = rng.uniform() * 10.0;
    const double c = rng.normal();
    const auto cat = static_cast<double>(rng.uniform_int(3));
    const int g = static_cast<int>(rng.uniform_int(2));
    const double z = 1.2 * a + 0.3 * (b - 5.0) - 0.8 * (cat == 2.0) + 0.7 * g + 0.5 * a * c;
    y[r] = rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
    cols[0][r] = a;
    cols[1][r] = b;
    cols[2][r] = (r % 17 == 3) ? glassboost::kMissing : c;
    missing += (r % 17 == 3) ? 1 : 0;
    cols[3][r] = cat;
    group[r] = g;
  }
  std::vector<ColumnSchema> schema(4);
  schema[0].name = "a";
  schema[1].name = "b";
  schema[2].name = "c";
  schema[2].missing_count = missing;
  schema[3].name = "color";
  schema[3].kind = ColumnKind::kCategorical;
  schema[3].categories = {"red", "green", "blue"};
  glassboost::SensitiveAttribute s{"group", {"g0", "g1"}, group};
  return TabularFrame(schema, cols, y, {"y", "0", "1"}, s);
}

inline std::string mixed_csv(std::size_t n, std::uint64_t seed) {
  const TabularFrame f = mixed_frame(n, seed);
  std::string out = "a,b,c,color,group,y\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out += f.cell_text(r, c) + ",";
    out += f.sensitive().groups[static_cast<std::size_t>(f.sensitive().group_of_row[r])] + ",";
    out += f.target()[r] ? "yes\n" : "no\n";
  }
  return out;
}

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("glassboost_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gbtest

#endif  // GLASSBOOST_TESTS_SUPPORT_HPP_
