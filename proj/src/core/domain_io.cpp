#include "mmdp/core/domain_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "mmdp/core/errors.hpp"

namespace fs = std::filesystem;

namespace mmdp {
namespace {

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '"')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r' || text.back() == '"')) {
    text.remove_suffix(1);
  }
  return text;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("cannot open " + path.string());
  CsvTable table;
  table.file = path.filename().string();
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw SchemaError(table.file + ":" + std::to_string(line_number) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_number);
  }
  if (table.header.empty()) throw SchemaError(table.file + ": missing header row");
  return table;
}

/// Maps the required (and optional) column names to positions; any other
/// column is a schema error.
std::map<std::string, std::size_t> columns(const CsvTable& table, const std::vector<std::string>& required,
                                           const std::vector<std::string>& optional = {}) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& name = table.header[i];
    const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                       std::find(optional.begin(), optional.end(), name) != optional.end();
    if (!known) throw SchemaError(table.file + ": unknown column '" + name + "'");
    if (index.count(name) != 0) throw SchemaError(table.file + ": duplicate column '" + name + "'");
    index[name] = i;
  }
  for (const auto& name : required) {
    if (index.count(name) == 0) throw SchemaError(table.file + ": missing column '" + name + "'");
  }
  return index;
}

double parse_double(const CsvTable& table, std::size_t row, const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw SchemaError(table.file + ":" + std::to_string(table.line_numbers[row]) + ": '" + text +
                      "' is not a number");
  }
  return value;
}

int parse_id(const CsvTable& table, std::size_t row, const std::string& text) {
  const double value = parse_double(table, row, text);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    throw SchemaError(table.file + ":" + std::to_string(table.line_numbers[row]) + ": id '" + text +
                      "' is not an integer");
  }
  if (value < 0) {
    throw IndexError(table.file + ":" + std::to_string(table.line_numbers[row]) + ": negative id " + text);
  }
  return static_cast<int>(value);
}

struct TransitionRow {
  int from, action, to, model;
  double probability, reward;
  std::optional<double> weight;
};

struct ModelFile {
  std::string file;
  std::vector<TransitionRow> rows;
  bool has_weight = false;
  int max_state = -1;
  int max_action = -1;
  int max_model = -1;
};

ModelFile read_models(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const auto col = columns(table, {"idstatefrom", "idaction", "idstateto", "idoutcome", "probability", "reward"},
                           {"weight"});
  ModelFile file;
  file.file = table.file;
  file.has_weight = col.count("weight") != 0;
  file.rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    TransitionRow row{parse_id(table, i, f[col.at("idstatefrom")]),
                      parse_id(table, i, f[col.at("idaction")]),
                      parse_id(table, i, f[col.at("idstateto")]),
                      parse_id(table, i, f[col.at("idoutcome")]),
                      parse_double(table, i, f[col.at("probability")]),
                      parse_double(table, i, f[col.at("reward")]),
                      std::nullopt};
    if (file.has_weight) row.weight = parse_double(table, i, f[col.at("weight")]);
    file.max_state = std::max({file.max_state, row.from, row.to});
    file.max_action = std::max(file.max_action, row.action);
    file.max_model = std::max(file.max_model, row.model);
    file.rows.push_back(row);
  }
  if (file.rows.empty()) throw SchemaError(file.file + ": no transitions");
  return file;
}

Mmdp build_models(const ModelFile& file, int n_states, int n_actions, int horizon, double discount,
                  const std::vector<double>& initial, double tolerance) {
  const int n_models = file.max_model + 1;
  std::vector<char> seen(static_cast<std::size_t>(n_models), 0);
  for (const auto& row : file.rows) seen[static_cast<std::size_t>(row.model)] = 1;
  for (int m = 0; m < n_models; ++m) {
    if (!seen[static_cast<std::size_t>(m)]) {
      throw IndexError(file.file + ": model ids are not contiguous, model " + std::to_string(m) + " is missing");
    }
  }

  // Per (m,s,a) sums for normalization and expected reward.
  const std::size_t groups = static_cast<std::size_t>(n_models) * static_cast<std::size_t>(n_states) *
                             static_cast<std::size_t>(n_actions);
  auto group_of = [&](const TransitionRow& row) {
    return (static_cast<std::size_t>(row.model) * static_cast<std::size_t>(n_states) +
            static_cast<std::size_t>(row.from)) *
               static_cast<std::size_t>(n_actions) +
           static_cast<std::size_t>(row.action);
  };
  std::vector<double> mass(groups, 0.0);
  std::vector<double> weighted_reward(groups, 0.0);
  for (const auto& row : file.rows) {
    mass[group_of(row)] += row.probability;
    weighted_reward[group_of(row)] += row.probability * row.reward;
  }

  MmdpBuilder builder(n_states, n_actions, n_models);
  builder.horizon(horizon).discount(discount).initial_distribution(initial);
  for (const auto& row : file.rows) {
    const double total = mass[group_of(row)];
    const bool normalize = std::abs(total - 1.0) <= tolerance && total > 0.0;
    builder.add_transition(row.model, row.from, row.action, row.to, normalize ? row.probability / total : row.probability);
  }
  for (int m = 0; m < n_models; ++m) {
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        const std::size_t g = (static_cast<std::size_t>(m) * static_cast<std::size_t>(n_states) +
                               static_cast<std::size_t>(s)) *
                                  static_cast<std::size_t>(n_actions) +
                              static_cast<std::size_t>(a);
        const bool normalize = std::abs(mass[g] - 1.0) <= tolerance && mass[g] > 0.0;
        builder.set_reward(m, s, a, normalize ? weighted_reward[g] / mass[g] : weighted_reward[g]);
      }
    }
  }

  if (file.has_weight) {
    std::vector<double> weights(static_cast<std::size_t>(n_models), -1.0);
    for (const auto& row : file.rows) {
      double& w = weights[static_cast<std::size_t>(row.model)];
      if (w >= 0.0 && w != *row.weight) {
        throw SchemaError(file.file + ": conflicting weights for model " + std::to_string(row.model));
      }
      w = *row.weight;
    }
    builder.model_weights(std::move(weights));
  }
  try {
    return builder.build();
  } catch (const IndexError& e) {
    throw IndexError(file.file + ": " + e.what());
  }
}

DomainBundle read_bundle(const fs::path& dir, int horizon, const LoadOptions& options) {
  auto warn = options.on_warning ? options.on_warning
                                 : std::function<void(const std::string&)>(
                                       [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; });

  for (const char* name : {"initial.csv", "parameters.csv", "training.csv", "test.csv"}) {
    if (!fs::exists(dir / name)) throw MissingFileError("missing " + (dir / name).string());
  }

  double discount = 1.0;
  {
    const CsvTable table = read_csv(dir / "parameters.csv");
    const auto col = columns(table, {"parameter", "value"});
    bool found = false;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const std::string& name = table.rows[i][col.at("parameter")];
      if (name == "discount") {
        discount = parse_double(table, i, table.rows[i][col.at("value")]);
        found = true;
      } else {
        warn("parameters.csv: ignoring unknown parameter '" + name + "'");
      }
    }
    if (!found) warn("parameters.csv: no discount given, using 1");
  }

  const ModelFile training = read_models(dir / "training.csv");
  const ModelFile test = read_models(dir / "test.csv");

  const CsvTable initial_table = read_csv(dir / "initial.csv");
  const auto initial_col = columns(initial_table, {"idstate", "probability"});
  std::vector<std::pair<int, double>> initial_rows;
  int max_state = std::max(training.max_state, test.max_state);
  for (std::size_t i = 0; i < initial_table.rows.size(); ++i) {
    const int s = parse_id(initial_table, i, initial_table.rows[i][initial_col.at("idstate")]);
    initial_rows.emplace_back(s, parse_double(initial_table, i, initial_table.rows[i][initial_col.at("probability")]));
    max_state = std::max(max_state, s);
  }
  const int n_states = max_state + 1;
  const int n_actions = std::max(training.max_action, test.max_action) + 1;

  std::vector<double> initial(static_cast<std::size_t>(n_states), 0.0);
  double initial_mass = 0.0;
  for (const auto& [s, p] : initial_rows) {
    initial[static_cast<std::size_t>(s)] += p;
    initial_mass += p;
  }
  if (std::abs(initial_mass - 1.0) <= options.probability_tolerance && initial_mass > 0.0) {
    for (double& p : initial) p /= initial_mass;
  }

  DomainBundle bundle{
      build_models(training, n_states, n_actions, horizon, discount, initial, options.probability_tolerance),
      build_models(test, n_states, n_actions, horizon, discount, initial, options.probability_tolerance)};
  return bundle;
}

void write_number(std::FILE* out, double x) { std::fprintf(out, "%.17g", x); }

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_for_write(const fs::path& path) {
  File file(std::fopen(path.string().c_str(), "w"));
  if (!file) throw MissingFileError("cannot write " + path.string());
  return file;
}

void write_models(const fs::path& path, const Mmdp& mmdp) {
  File file = open_for_write(path);
  bool uniform = true;
  for (double w : mmdp.model_weights()) uniform = uniform && w == 1.0 / mmdp.n_models();
  std::fputs(uniform ? "idstatefrom,idaction,idstateto,idoutcome,probability,reward\n"
                     : "idstatefrom,idaction,idstateto,idoutcome,probability,reward,weight\n",
             file.get());
  for (int m = 0; m < mmdp.n_models(); ++m) {
    for (int s = 0; s < mmdp.n_states(); ++s) {
      for (int a = 0; a < mmdp.n_actions(); ++a) {
        for (const Transition& tr : mmdp.transitions(m, s, a)) {
          std::fprintf(file.get(), "%d,%d,%d,%d,", s, a, tr.next, m);
          write_number(file.get(), tr.probability);
          std::fputc(',', file.get());
          write_number(file.get(), mmdp.base_reward(m, s, a));
          if (!uniform) {
            std::fputc(',', file.get());
            write_number(file.get(), mmdp.model_weight(m));
          }
          std::fputc('\n', file.get());
        }
      }
    }
  }
}

}  // namespace

DomainBundle read_domain(const fs::path& dir, int horizon, const LoadOptions& options) {
  if (horizon < 1) throw DimensionMismatch("horizon must be positive, got " + std::to_string(horizon));
  return read_bundle(dir, horizon, options);
}

DomainBundle load_domain(const fs::path& dir, int horizon, const LoadOptions& options) {
  DomainBundle bundle = read_domain(dir, horizon, options);
  const ValidationReport report = validate(bundle, 1e-9);
  for (const auto& issue : report.issues) {
    if (issue.kind == IssueKind::kTransition || issue.kind == IssueKind::kInitial ||
        issue.kind == IssueKind::kWeights) {
      throw ProbabilityError(issue.location + ": " + issue.message);
    }
  }
  if (!report.ok()) throw SchemaError(report.issues.front().location + ": " + report.issues.front().message);
  return bundle;
}

void write_domain(const fs::path& dir, const DomainBundle& bundle) {
  fs::create_directories(dir);
  {
    File file = open_for_write(dir / "initial.csv");
    std::fputs("idstate,probability\n", file.get());
    const auto initial = bundle.training.initial_distribution();
    for (std::size_t s = 0; s < initial.size(); ++s) {
      if (initial[s] == 0.0) continue;
      std::fprintf(file.get(), "%zu,", s);
      write_number(file.get(), initial[s]);
      std::fputc('\n', file.get());
    }
  }
  {
    File file = open_for_write(dir / "parameters.csv");
    std::fputs("parameter,value\ndiscount,", file.get());
    write_number(file.get(), bundle.training.discount() * bundle.training.reward_decay());
    std::fputc('\n', file.get());
  }
  write_models(dir / "training.csv", bundle.training);
  write_models(dir / "test.csv", bundle.test);
}

}  // namespace mmdp
