// Copyright 2026 The BBM92 Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "bbm92/table.hpp"

namespace bbm92 {
namespace {

Table sample() {
  Table t{{"x", "label", "count", "quoted,name"}, {}};
  t.add_row({0.1, std::string("plain"), std::uint64_t{18446744073709551615ULL}, std::string("a\"b")});
  t.add_row({std::nan(""), std::string("3.5"), std::uint64_t{0}, std::string("")});
  t.add_row({-0.0, std::string("line\nbreak"), std::uint64_t{7}, std::string("x,y")});
  t.add_row({std::numeric_limits<double>::infinity(), std::string("nan"), std::uint64_t{1},
             std::string("1e5")});
  t.add_row({1.0 / 3.0, std::string("a b"), std::uint64_t{2}, std::string("-inf")});
  return t;
}

TEST(FormatNumber, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-HUGE_VAL), "-inf");
}

TEST(Csv, RoundTripIsIdempotent) {
  const Table t = sample();
  const std::string once = to_csv(t);
  const Table back = parse_csv(once);
  EXPECT_EQ(to_csv(back), once);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  EXPECT_EQ(back.columns, t.columns);
  // Text stays text even when it looks numeric; numbers and counts are exact.
  EXPECT_EQ(back.text(1, "label"), "3.5");
  EXPECT_EQ(back.text(3, "label"), "nan");
  EXPECT_EQ(back.text(3, "quoted,name"), "1e5");
  EXPECT_EQ(back.text(1, "quoted,name"), "");
  EXPECT_EQ(back.text(2, "label"), "line\nbreak");
  EXPECT_EQ(back.text(0, "quoted,name"), "a\"b");
  EXPECT_EQ(std::get<std::uint64_t>(back.rows[0][2]), 18446744073709551615ULL);
  EXPECT_TRUE(std::isnan(back.number(1, "x")));
  EXPECT_TRUE(std::isinf(back.number(3, "x")));
  EXPECT_EQ(back.number(0, "x"), 0.1);
}

TEST(Csv, NumbersSurviveAtTwelveDigits) {
  Table t{{"v"}, {}};
  for (int i = 1; i < 200; ++i) t.add_row({std::pow(1.37, i) * (i % 2 ? 1 : -1) * 1e-30});
  const Table back = parse_csv(to_csv(t));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double a = std::get<double>(t.rows[i][0]), b = back.number(i, "v");
    EXPECT_LE(std::abs(a - b), 1e-11 * std::abs(a));
  }
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv(""), InvalidArgument);
  EXPECT_THROW(parse_csv("a,b\n1\n"), InvalidArgument);
  EXPECT_THROW(parse_csv("a\n\"open\n"), InvalidArgument);
  Table t{{"a"}, {}};
  EXPECT_THROW(t.add_row({1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(t.column("b"), InvalidArgument);
}

TEST(Json, RowsAndMeta) {
  const auto j = to_json(sample(), {{"command", "test"}});
  EXPECT_EQ(j["meta"]["command"], "test");
  ASSERT_EQ(j["rows"].size(), 5u);
  EXPECT_TRUE(j["rows"][1]["x"].is_null());
  EXPECT_EQ(j["rows"][0]["count"].get<std::uint64_t>(), 18446744073709551615ULL);
  EXPECT_EQ(j["rows"][1]["label"], "3.5");
  // Column order is preserved.
  EXPECT_EQ(j["rows"][0].begin().key(), "x");
}

}  // namespace
}  // namespace bbm92
