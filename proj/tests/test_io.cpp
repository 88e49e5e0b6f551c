#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "bubble/io.hpp"
#include "bubble/random.hpp"

using namespace bubble;

namespace
{

PriceSeries parse(const std::string & text)
{
  std::istringstream in(text);
  return io::read_prices(in, "test.csv");
}

std::string parse_error(const std::string & text)
{
  try {
    parse(text);
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

}  // namespace

TEST(ReadPrices, TwoRowFile)
{
  const auto s = parse("date,price\n2016-01-01,433\n2017-12-10,14371.62\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dates()[1], "2017-12-10");
  EXPECT_EQ(s.prices()[0], 433.0);
  EXPECT_EQ(s.prices()[1], 14371.62);
}

TEST(ReadPrices, EmptyInputHasNoDataRows)
{
  EXPECT_NE(parse_error("").find("no data rows"), std::string::npos);
  EXPECT_NE(parse_error("date,price\n\n").find("no data rows"), std::string::npos);
}

TEST(ReadPrices, UnsortedRowsAreSorted)
{
  const auto sorted = parse("date,price\n2020-01-01,1\n2020-01-02,2\n2020-01-03,3\n");
  const auto shuffled = parse("date,price\n2020-01-03,3\n2020-01-01,1\n2020-01-02,2\n");
  EXPECT_EQ(shuffled.dates(), sorted.dates());
  EXPECT_EQ(shuffled.prices(), sorted.prices());
}

TEST(ReadPrices, AcceptsCrlfBomAndHeaderCase)
{
  const auto s = parse("\xEF\xBB\xBF" "Date,Price\r\n2020-01-01,1.5\r\n\r\n2020-01-02,2.5\r\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.prices()[1], 2.5);
}

TEST(ReadPrices, ErrorsNameTheLine)
{
  EXPECT_NE(parse_error("date,price\n2020-01-01,1\n2020-01-02,abc\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("date,price\n2020-01-01,1\n2020-13-02,2\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("date,price\n2020-01-01,1,2\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("date,price\n2020-01-01,-4\n2020-01-02,1\n").find("non-positive"), std::string::npos);
  EXPECT_NE(parse_error("day,close\n2020-01-01,1\n").find("line 1"), std::string::npos);
  const auto dup = parse_error("date,price\n2020-01-01,1\n2020-01-02,2\n2020-01-01,3\n");
  EXPECT_NE(dup.find("duplicate"), std::string::npos);
  EXPECT_NE(dup.find("line 4"), std::string::npos);
  EXPECT_NE(parse_error("date,price\n2020-01-01,1\n").find("at least 2"), std::string::npos);
}

TEST(IngestCsv, MissingFile)
{
  try {
    io::ingest_csv("/nonexistent/prices.csv");
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    EXPECT_EQ(exit_code(e.kind()), 2);
  }
}

TEST(WritePrices, RoundTrip)
{
  const auto s = parse("date,price\n2016-01-01,433\n2017-12-10,14371.62\n");
  std::ostringstream out;
  io::write_prices(out, s);
  EXPECT_EQ(out.str(), "date,price\n2016-01-01,433\n2017-12-10,14371.62\n");
  const auto again = parse(out.str());
  EXPECT_EQ(again.prices(), s.prices());
}

TEST(Table, RoundTripIsByteIdentical)
{
  Rng rng(17, 0);
  io::Table table{{"t", "density", "left_tail"}, {}};
  for (int i = 0; i < 200; ++i) {
    const double scale = std::pow(10.0, 12.0 * rng.uniform() - 9.0);
    table.rows.push_back({0.01 * (i + 1), scale * rng.normal(), i % 7 == 0 ? 0.0 : rng.uniform()});
  }
  table.rows.push_back({1.0, HUGE_VAL, -0.0});
  std::ostringstream first;
  io::write_table(first, table);
  std::istringstream in(first.str());
  const auto parsed = io::read_table(in);
  std::ostringstream second;
  io::write_table(second, parsed);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(parsed.values("t").size(), 201u);
  EXPECT_THROW(parsed.column("missing"), Error);
}

TEST(Formatting, SignificantDigitsAndPercent)
{
  EXPECT_EQ(io::round_significant(0.512345678), 0.512346);
  EXPECT_EQ(io::round_significant(14371.6249), 14371.6);
  EXPECT_EQ(io::round_significant(0.0), 0.0);
  EXPECT_EQ(io::format_percent(0.178654), "17.87");
  EXPECT_EQ(io::format_percent(1.0), "100.00");
  EXPECT_EQ(io::format_number(0.0), "0");
  EXPECT_EQ(io::format_number(-0.0), "0");
  EXPECT_EQ(io::format_number(0.25), "0.25");
}
