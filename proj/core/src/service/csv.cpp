#include "prefel/service/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace prefel::service {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false, after_quote = false;
  int line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = after_quote = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
    ++line;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    if (ch == ',') {
      end_field();
    } else if (ch == '\n') {
      end_row();
    } else if (ch == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      end_row();
    } else if (ch == '"') {
      if (field_started) throw CsvError("line " + std::to_string(line) + ": quote inside an unquoted field");
      quoted = true;
      field_started = true;
    } else {
      if (after_quote) throw CsvError("line " + std::to_string(line) + ": text after a closing quote");
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw CsvError("line " + std::to_string(line) + ": unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

namespace {

double parse_decimal(const std::string& s, int line, size_t col) {
  auto bad = [&] {
    return CsvError("record " + std::to_string(line) + ", column " + std::to_string(col + 1) + ": '" + s +
                    "' is not a decimal number");
  };
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) throw bad();
  const auto last = s.find_last_not_of(" \t");
  const char* b = s.data() + first;
  const char* e = s.data() + last + 1;
  if (*b == '+') ++b;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(b, e, v, std::chars_format::general);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) throw bad();
  return v;
}

}  // namespace

ScenarioTable parse_scenarios(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw CsvError("scenario file is empty");
  ScenarioTable t;
  t.tickers = rows.front();
  for (const std::string& h : t.tickers)
    if (h.empty()) throw CsvError("record 1: empty ticker name");
  if (rows.size() < 2) throw CsvError("scenario file has a header but no returns");
  const size_t n = t.tickers.size();
  t.returns.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(n));
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != n)
      throw CsvError("record " + std::to_string(r + 1) + ": expected " + std::to_string(n) + " fields, found " +
                     std::to_string(rows[r].size()));
    for (size_t c = 0; c < n; ++c)
      t.returns(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
          parse_decimal(rows[r][c], static_cast<int>(r + 1), c);
  }
  return t;
}

ScenarioTable load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenarios(ss.str());
}

}  // namespace prefel::service
