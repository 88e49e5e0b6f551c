#ifndef BUBBLE_IO_HPP_
#define BUBBLE_IO_HPP_

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/model.hpp"

namespace bubble::io
{

namespace detail
{

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) { s.remove_prefix(1); }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) { s.remove_suffix(1); }
  return s;
}

inline std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',')
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline bool parse_double(std::string_view text, double & out)
{
  if (text.empty()) { return false; }
  const std::string buf(text);
  char * end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return errno == 0 && end == buf.c_str() + buf.size() && std::isfinite(out);
}

/// YYYY-MM-DD with plausible month and day.
inline bool is_iso_date(std::string_view d)
{
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') { return false; }
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(d[i]))) { return false; }
  }
  const int month = (d[5] - '0') * 10 + (d[6] - '0');
  const int day = (d[8] - '0') * 10 + (d[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

inline std::string line_error(std::size_t line_no, const std::string & what)
{
  return "line " + std::to_string(line_no) + ": " + what;
}

}  // namespace detail

/**
 * @brief Reads a `date,price` CSV into a PriceSeries.
 *
 * Accepts LF or CRLF, a UTF-8 byte-order mark and blank lines. Rows are sorted
 * by date; duplicate dates and malformed rows are errors that name the line.
 */
inline PriceSeries read_prices(std::istream & in, const std::string & source = "<input>")
{
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  struct Row
  {
    std::string date;
    double price;
    std::size_t line;
  };
  std::vector<Row> rows;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) { view.remove_prefix(3); }
    view = detail::trim(view);
    if (view.empty()) { continue; }
    const auto fields = detail::split(view);
    if (!header_seen) {
      if (fields.size() != 2 || detail::lower(fields[0]) != "date" || detail::lower(fields[1]) != "price") {
        throw Error(ErrorKind::invalid_input, source + ": " + detail::line_error(line_no, "expected header 'date,price'"));
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2) {
      throw Error(ErrorKind::invalid_input, source + ": " + detail::line_error(line_no, "expected 2 fields"));
    }
    if (!detail::is_iso_date(fields[0])) {
      throw Error(ErrorKind::invalid_input,
                  source + ": " + detail::line_error(line_no, "bad date '" + std::string(fields[0]) + "'"));
    }
    double price = 0.0;
    if (!detail::parse_double(fields[1], price)) {
      throw Error(ErrorKind::invalid_input,
                  source + ": " + detail::line_error(line_no, "bad price '" + std::string(fields[1]) + "'"));
    }
    if (price <= 0.0) {
      throw Error(ErrorKind::invalid_input, source + ": " + detail::line_error(line_no, "non-positive price"));
    }
    rows.push_back(Row{std::string(fields[0]), price, line_no});
  }
  if (rows.empty()) { throw Error(ErrorKind::invalid_input, source + ": no data rows"); }

  std::stable_sort(rows.begin(), rows.end(), [](const Row & a, const Row & b) { return a.date < b.date; });
  std::vector<std::string> dates;
  std::vector<double> prices;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].date == rows[i - 1].date) {
      throw Error(ErrorKind::invalid_input,
                  source + ": " + detail::line_error(rows[i].line, "duplicate date " + rows[i].date));
    }
    dates.push_back(rows[i].date);
    prices.push_back(rows[i].price);
  }
  if (prices.size() < 2) { throw Error(ErrorKind::invalid_input, source + ": need at least 2 data rows"); }
  return PriceSeries(std::move(dates), std::move(prices));
}

inline PriceSeries ingest_csv(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw Error(ErrorKind::invalid_input, "cannot open " + path); }
  return read_prices(in, path);
}

inline void write_prices(std::ostream & out, const PriceSeries & series)
{
  out << "date,price\n";
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", series.prices()[i]);
    out << series.dates()[i] << ',' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Numeric tables

/// Canonical text form of a table entry; parsing and re-formatting reproduces it.
inline std::string format_number(double v)
{
  if (v == 0.0) { return "0"; }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// v rounded to `digits` significant digits, for JSON output.
inline double round_significant(double v, int digits = 6)
{
  if (v == 0.0 || !std::isfinite(v)) { return v; }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

/// Probability rendered as a percentage with two decimals, e.g. 17.87.
inline std::string format_percent(double p)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * p);
  return buf;
}

struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string & name) const
  {
    const auto it = std::find(columns.begin(), columns.end(), name);
    bubble::detail::require(it != columns.end(), ErrorKind::invalid_input, "no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }

  std::vector<double> values(const std::string & name) const
  {
    const std::size_t j = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto & r : rows) { out.push_back(r[j]); }
    return out;
  }
};

inline void write_table(std::ostream & out, const Table & table)
{
  for (std::size_t j = 0; j < table.columns.size(); ++j) { out << (j ? "," : "") << table.columns[j]; }
  out << '\n';
  for (const auto & row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) { out << (j ? "," : "") << format_number(row[j]); }
    out << '\n';
  }
}

inline Table read_table(std::istream & in)
{
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    if (view.empty()) { continue; }
    const auto fields = detail::split(view);
    if (table.columns.empty()) {
      for (auto f : fields) { table.columns.emplace_back(f); }
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw Error(ErrorKind::invalid_input, detail::line_error(line_no, "wrong number of fields"));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!detail::parse_double(fields[j], row[j]) && fields[j] != "inf") {
        throw Error(ErrorKind::invalid_input, detail::line_error(line_no, "bad number '" + std::string(fields[j]) + "'"));
      }
      if (fields[j] == "inf") { row[j] = HUGE_VAL; }
    }
    table.rows.push_back(std::move(row));
  }
  bubble::detail::require(!table.columns.empty(), ErrorKind::invalid_input, "empty table");
  return table;
}

}  // namespace bubble::io

#endif  // BUBBLE_IO_HPP_
