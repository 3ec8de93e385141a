#include "craft/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace craft::report {

namespace {

int method_rank(const std::string& m) {
  if (m == "PPO") return 0;
  if (m == "PPO+DR") return 1;
  if (m == "PPO+OODSI") return 2;
  if (m == "PPO+DR+OODSI") return 3;
  return 4;
}

int env_rank(const std::string& e) { return e == "sync" ? 0 : 1; }

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void validate(const ResultTable& table) {
  if (table.rows.empty()) throw ContractError("result table is empty");
  for (const auto& r : table.rows) {
    if (r.mean < 0.0 || r.mean > 100.0)
      throw ContractError("success rate out of [0, 100]: " + pct(r.mean));
    if (r.stddev < 0.0) throw ContractError("negative standard deviation");
  }
}

}  // namespace

ResultTable canonical_order(ResultTable table) {
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     const int ra = method_rank(a.method);
                     const int rb = method_rank(b.method);
                     if (ra != rb) return ra < rb;
                     if (a.method != b.method) return a.method < b.method;
                     if (a.task != b.task) return a.task < b.task;
                     return env_rank(a.environment) < env_rank(b.environment);
                   });
  return table;
}

std::string format_table(const ResultTable& table) {
  validate(table);
  const ResultTable t = canonical_order(table);

  std::vector<std::array<std::string, 4>> cells;
  cells.push_back({"method", "task", "environment", "success"});
  for (const auto& r : t.rows)
    cells.push_back(
        {r.method, r.task, r.environment, pct(r.mean) + " +- " + pct(r.stddev)});

  std::array<size_t, 4> w{};
  for (const auto& row : cells)
    for (size_t c = 0; c < 4; ++c) w[c] = std::max(w[c], row[c].size());

  std::ostringstream os;
  for (size_t i = 0; i < cells.size(); ++i) {
    for (size_t c = 0; c < 4; ++c) {
      os << cells[i][c];
      if (c + 1 < 4)
        os << std::string(w[c] - cells[i][c].size() + 2, ' ');
    }
    os << '\n';
    if (i == 0) {
      size_t total = w[0] + w[1] + w[2] + w[3] + 6;
      os << std::string(total, '-') << '\n';
    }
  }
  return os.str();
}

std::string format_delimited(const ResultTable& table) {
  validate(table);
  const ResultTable t = canonical_order(table);
  std::ostringstream os;
  os << "method\ttask\tenvironment\tmean\tstd\n";
  for (const auto& r : t.rows)
    os << r.method << '\t' << r.task << '\t' << r.environment << '\t'
       << pct(r.mean) << '\t' << pct(r.stddev) << '\n';
  return os.str();
}

}  // namespace craft::report
