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

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "glassboost/error.hpp"
#include "glassboost/frame.hpp"
#include "support.hpp"

using namespace glassboost;

namespace {

CsvLoadOptions target_only(const std::string& target) {
  CsvLoadOptions o;
  o.target_column = target;
  return o;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_SUITE("dataio") {

TEST_CASE("column kinds are inferred and missing tokens recognised") {
  const std::string csv =
      "age,city,income,label\n"
      "30,Paris,1.5,no\n"
      "?,Rome,,yes\n"
      " 41 ,\"Paris\",2.5,no\n"
      "25,\"New York, NY\",?,yes\n";
  const TabularFrame f = parse_csv(csv, target_only("label"));
  REQUIRE(f.rows() == 4);
  REQUIRE(f.cols() == 3);
  CHECK(f.column(0).kind == ColumnKind::kNumeric);
  CHECK(f.column(1).kind == ColumnKind::kCategorical);
  CHECK(f.column(2).kind == ColumnKind::kNumeric);
  CHECK(is_missing(f.cell(1, 0)));
  CHECK(f.cell(2, 0) == 41.0);
  CHECK(f.column(0).missing_count == 1);
  CHECK(f.column(2).missing_count == 2);
  CHECK(f.column(1).categories == std::vector<std::string>{"Paris", "Rome", "New York, NY"});
  CHECK(f.cell_text(3, 1) == "New York, NY");
}

TEST_CASE("binary target maps the larger label to 1 unless overridden") {
  const std::string csv = "x,t\n1,b\n2,a\n3,b\n";
  const TabularFrame f = parse_csv(csv, target_only("t"));
  CHECK(f.target_labels().positive == "b");
  CHECK(std::vector<std::uint8_t>(f.target().begin(), f.target().end()) ==
        std::vector<std::uint8_t>{1, 0, 1});

  CsvLoadOptions o = target_only("t");
  o.positive_labels = {"a"};
  const TabularFrame g = parse_csv(csv, o);
  CHECK(std::vector<std::uint8_t>(g.target().begin(), g.target().end()) ==
        std::vector<std::uint8_t>{0, 1, 0});

  const std::string multi = "x,t\n1,<=50K\n2,>50K\n3,<=50K.\n4,>50K.\n";
  o.positive_labels = {">50K", ">50K."};
  const TabularFrame h = parse_csv(multi, o);
  CHECK(h.positives() == 2);
}

TEST_CASE("overrides, drops and the sensitive attribute") {
  const std::string csv = "zip,id,sex,t\n75001,1,F,0\n75002,2,M,1\n75001,3,F,1\n";
  CsvLoadOptions o = target_only("t");
  o.kind_overrides["zip"] = ColumnKind::kCategorical;
  o.drop_columns = {"id"};
  o.sensitive_column = "sex";
  const TabularFrame f = parse_csv(csv, o);
  REQUIRE(f.cols() == 2);
  CHECK(f.column(0).kind == ColumnKind::kCategorical);
  CHECK(f.column(1).name == "sex");
  REQUIRE(f.has_sensitive());
  CHECK(f.sensitive().groups == std::vector<std::string>{"F", "M"});
  CHECK(f.sensitive().group_of_row == std::vector<int>{0, 1, 0});
}

TEST_CASE("malformed inputs report data and io errors") {
  CHECK(code_of([] { parse_csv("", target_only("t")); }) == ErrorCode::kData);
  CHECK(code_of([] { parse_csv("x,t\n", target_only("t")); }) == ErrorCode::kData);
  CHECK(code_of([] { parse_csv("x,y\n1,0\n", target_only("t")); }) == ErrorCode::kData);
  CHECK(code_of([] { parse_csv("x,t\n1,0\n2\n", target_only("t")); }) == ErrorCode::kData);
  CHECK(code_of([] { parse_csv("x,t\n1,0\n2,1\n3,2\n", target_only("t")); }) == ErrorCode::kData);
  CHECK(code_of([] { parse_csv("x,t\n1,?\n2,1\n", target_only("t")); }) == ErrorCode::kData);
  CHECK(code_of([] { parse_csv("x,t\n\"1,0\n", target_only("t")); }) == ErrorCode::kData);
  CHECK(code_of([] { load_csv("/definitely/not/here.csv", target_only("t")); }) == ErrorCode::kIo);
}

TEST_CASE("csv round trip preserves the frame") {
  const TabularFrame f = gbtest::mixed_frame(60, 3);
  const auto dir = gbtest::scratch_dir("roundtrip");
  write_csv(f, dir / "f.csv");
  CsvLoadOptions o = target_only("y");
  o.kind_overrides["color"] = ColumnKind::kCategorical;
  o.sensitive_column = "group";
  o.drop_columns = {"group"};
  const TabularFrame g = load_csv(dir / "f.csv", o);
  CHECK(g.sensitive().group_of_row == f.sensitive().group_of_row);
  REQUIRE(g.cols() == f.cols());
  for (std::size_t c = 0; c < f.cols(); ++c) {
    for (std::size_t r = 0; r < f.rows(); ++r) CHECK(g.cell_text(r, c) == f.cell_text(r, c));
  }
  CHECK(std::equal(f.target().begin(), f.target().end(), g.target().begin()));
}

TEST_CASE("stratified splits are disjoint, exhaustive, balanced and seeded") {
  const TabularFrame f = gbtest::mixed_frame(403, 11);
  SplitSpec spec;
  spec.n_repeats = 3;
  const auto splits = stratified_splits(f, spec);
  REQUIRE(splits.size() == 3);
  const double rate = static_cast<double>(f.positives()) / static_cast<double>(f.rows());
  for (const auto& s : splits) {
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    for (auto r : s.test) CHECK(all.insert(r).second);
    CHECK(all.size() == f.rows());
    std::size_t pos = 0;
    for (auto r : s.test) pos += f.target()[r];
    const double test_rate = static_cast<double>(pos) / static_cast<double>(s.test.size());
    CHECK(std::abs(test_rate - rate) < 0.01);
    CHECK(std::abs(static_cast<double>(s.test.size()) - 0.25 * 403) <= 1.0);
  }
  CHECK(splits[0].test != splits[1].test);
  CHECK(stratified_splits(f, spec)[2].test == splits[2].test);
  spec.seed = 7;
  CHECK(stratified_splits(f, spec)[0].test != splits[0].test);
  CHECK(splits_from_json(splits_to_json(splits))[1].train == splits[1].train);
}

TEST_CASE("label subsets keep both classes") {
  const TabularFrame f = gbtest::mixed_frame(303, 5);
  const auto rows = stratified_label_subset(f, 30, 99);
  CHECK(rows.size() == 30);
  CHECK(std::is_sorted(rows.begin(), rows.end()));
  std::size_t pos = 0;
  for (auto r : rows) pos += f.target()[r];
  CHECK(pos > 0);
  CHECK(pos < 30);
  CHECK(stratified_label_subset(f, 30, 99) == rows);
  CHECK_THROWS_AS(stratified_label_subset(f, 1, 99), Error);
}

TEST_CASE("subset and with_sensitive keep schema") {
  const TabularFrame f = gbtest::mixed_frame(50, 8);
  const std::vector<std::size_t> rows{4, 2, 9};
  const TabularFrame s = f.subset(rows);
  CHECK(s.rows() == 3);
  CHECK(s.cell(0, 0) == f.cell(4, 0));
  CHECK(s.column(3).categories == f.column(3).categories);
  CHECK(s.sensitive().group_of_row[1] == f.sensitive().group_of_row[2]);
  const TabularFrame w = f.with_sensitive("color");
  CHECK(w.sensitive().column == "color");
  CHECK(w.sensitive().groups.size() == 3);
  const auto schema = schema_to_json(f);
  CHECK(schema["rows"] == 50);
}

}  // TEST_SUITE
