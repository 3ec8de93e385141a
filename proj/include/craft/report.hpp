#pragma once

#include <string>
#include <vector>

#include "craft/types.hpp"

namespace craft::report {

struct ResultRow {
  std::string method;       // PPO, PPO+DR, PPO+OODSI, PPO+DR+OODSI, ...
  std::string task;
  std::string environment;  // sync | async
  double mean = 0.0;        // success rate, percent
  double stddev = 0.0;      // over seeds
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

// Rows sorted into canonical order: method (PPO, PPO+DR, PPO+OODSI,
// PPO+DR+OODSI, then others alphabetically), task, environment (sync first).
ResultTable canonical_order(ResultTable table);

// Aligned human-readable table (mean ± std per row).
std::string format_table(const ResultTable& table);

// Tab-delimited machine twin carrying the identical numbers.
std::string format_delimited(const ResultTable& table);

}  // namespace craft::report
