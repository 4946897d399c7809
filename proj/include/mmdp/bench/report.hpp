#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mmdp/bandit/bandit.hpp"
#include "mmdp/bench/compare.hpp"
#include "mmdp/core/policy.hpp"
#include "mmdp/dp/solvers.hpp"
#include "mmdp/gradient/gradient.hpp"

namespace mmdp {

enum class TableFormat { kCsv, kMarkdown, kJson };

/// Parses "csv", "md" or "json"; throws DimensionMismatch otherwise.
TableFormat parse_table_format(const std::string& name);

nlohmann::json to_json(const Policy& policy);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const GradCheckReport& report);
nlohmann::json to_json(const RegretReport& report);
nlohmann::json to_json(const ComparisonTable& table);

/// `idtime,idstate,idaction` rows; randomized policies add a `probability`
/// column and list every positive entry.
void write_policy_csv(std::ostream& out, const Policy& policy);
/// `iteration,return` rows of iterate_returns (iteration starts at 1).
void write_trace_csv(std::ostream& out, const SolveReport& report);
/// `T,markov_best,history_best,regret,bound` rows.
void write_regret_csv(std::ostream& out, const RegretReport& report);
/// Failed rows print `--` in every numeric column.
void write_table(std::ostream& out, const ComparisonTable& table, TableFormat format);

}  // namespace mmdp
