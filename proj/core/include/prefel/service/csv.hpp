#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prefel/numerics.hpp"

namespace prefel::service {

struct CsvError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// RFC 4180 records: quoted fields with "" escapes, CRLF or LF line ends.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Header of tickers, then one row of decimal returns per period.
struct ScenarioTable {
  std::vector<std::string> tickers;
  Mat returns;  // periods x assets
};

ScenarioTable parse_scenarios(std::string_view text);
ScenarioTable load_scenarios(const std::filesystem::path& path);

}  // namespace prefel::service
