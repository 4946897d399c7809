#include "mmdp/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "mmdp/core/errors.hpp"

namespace mmdp {
namespace {

std::string number(double x, const char* format = "%.10g") {
  if (std::isnan(x)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, x);
  return buffer;
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

TableFormat parse_table_format(const std::string& name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "md") return TableFormat::kMarkdown;
  if (name == "json") return TableFormat::kJson;
  throw DimensionMismatch("unknown table format '" + name + "'");
}

nlohmann::json to_json(const Policy& policy) {
  nlohmann::json j;
  j["kind"] = policy.is_deterministic() ? "deterministic" : "randomized";
  j["horizon"] = policy.horizon();
  j["n_states"] = policy.n_states();
  j["n_actions"] = policy.n_actions();
  nlohmann::json layers = nlohmann::json::array();
  for (int t = 0; t < policy.horizon(); ++t) {
    nlohmann::json layer = nlohmann::json::array();
    for (int s = 0; s < policy.n_states(); ++s) {
      if (policy.is_deterministic()) {
        layer.push_back(policy.action(t, s));
      } else {
        const auto row = policy.row(t, s);
        layer.push_back(std::vector<double>(row.begin(), row.end()));
      }
    }
    layers.push_back(std::move(layer));
  }
  j[policy.is_deterministic() ? "actions" : "probabilities"] = std::move(layers);
  return j;
}

nlohmann::json to_json(const SolveReport& report) {
  nlohmann::json j;
  j["algorithm"] = report.algorithm;
  j["return"] = report.return_value;
  j["iterations"] = report.iterations;
  j["termination"] = to_string(report.termination);
  j["wall_time_s"] = report.wall_time.count();
  j["iterate_returns"] = report.iterate_returns;
  if (report.initial_return) j["initial_return"] = *report.initial_return;
  if (report.randomized_return) j["randomized_return"] = *report.randomized_return;
  j["policy"] = to_json(report.policy);
  return j;
}

nlohmann::json to_json(const GradCheckReport& report) {
  return {{"max_rel_err", report.max_rel_err},
          {"mean_rel_err", report.mean_rel_err},
          {"h", report.h},
          {"checks", report.checks}};
}

nlohmann::json to_json(const RegretReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const RegretRow& row : report.rows) {
    rows.push_back({{"T", row.horizon},
                    {"markov_best", finite_or_null(row.markov_best)},
                    {"history_best", row.history_best},
                    {"achieved", row.achieved},
                    {"regret", row.regret},
                    {"bound", row.bound},
                    {"clairvoyant_regret", row.clairvoyant_regret}});
  }
  return {{"source", report.source}, {"lambda", report.lambda}, {"slope", report.slope}, {"rows", rows}};
}

nlohmann::json to_json(const ComparisonTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ComparisonRow& row : table.rows) {
    nlohmann::json r{{"algorithm", row.algorithm}, {"ok", row.ok}};
    if (row.ok) {
      r["mean_return"] = row.mean_return;
      r["std_return"] = row.std_return;
      r["wall_time_s"] = row.wall_time_s;
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  return {{"domain", table.domain},
          {"horizon", table.horizon},
          {"episodes", table.episodes},
          {"seed", table.seed},
          {"rows", rows}};
}

void write_policy_csv(std::ostream& out, const Policy& policy) {
  out << (policy.is_deterministic() ? "idtime,idstate,idaction\n" : "idtime,idstate,idaction,probability\n");
  for (int t = 0; t < policy.horizon(); ++t) {
    for (int s = 0; s < policy.n_states(); ++s) {
      if (policy.is_deterministic()) {
        out << t << ',' << s << ',' << policy.action(t, s) << '\n';
        continue;
      }
      for (int a = 0; a < policy.n_actions(); ++a) {
        const double p = policy.prob(t, s, a);
        if (p > 0.0) out << t << ',' << s << ',' << a << ',' << number(p, "%.17g") << '\n';
      }
    }
  }
}

void write_trace_csv(std::ostream& out, const SolveReport& report) {
  out << "iteration,return\n";
  for (std::size_t i = 0; i < report.iterate_returns.size(); ++i) {
    out << i + 1 << ',' << number(report.iterate_returns[i], "%.17g") << '\n';
  }
}

void write_regret_csv(std::ostream& out, const RegretReport& report) {
  out << "T,markov_best,history_best,regret,bound\n";
  for (const RegretRow& row : report.rows) {
    out << row.horizon << ',' << number(row.markov_best) << ',' << number(row.history_best) << ','
        << number(row.regret) << ',' << number(row.bound) << '\n';
  }
}

void write_table(std::ostream& out, const ComparisonTable& table, TableFormat format) {
  if (format == TableFormat::kJson) {
    out << to_json(table).dump(2) << '\n';
    return;
  }
  std::vector<std::vector<std::string>> cells;
  for (const ComparisonRow& row : table.rows) {
    if (!row.ok) {
      cells.push_back({row.algorithm, "--", "--", "--"});
    } else if (format == TableFormat::kCsv) {
      cells.push_back({row.algorithm, number(row.mean_return), number(row.std_return), number(row.wall_time_s)});
    } else {
      cells.push_back({row.algorithm, number(row.mean_return, "%.2f"), number(row.std_return, "%.2f"),
                       number(row.wall_time_s, "%.3f")});
    }
  }
  const std::vector<std::string> header{"algorithm", "mean_return", "std_return", "wall_time_s"};
  if (format == TableFormat::kCsv) {
    out << "algorithm,mean_return,std_return,wall_time_s\n";
    for (const auto& r : cells) out << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << '\n';
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : cells) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    out << '|';
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      out << ' ' << (c == 0 ? r[c] + pad : pad + r[c]) << " |";
    }
    out << '\n';
  };
  line(header);
  out << '|';
  for (std::size_t c = 0; c < header.size(); ++c) out << std::string(width[c] + 1, '-') << (c == 0 ? "-|" : ":|");
  out << '\n';
  for (const auto& r : cells) line(r);
}

}  // namespace mmdp
