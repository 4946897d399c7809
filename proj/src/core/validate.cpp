#include "mmdp/core/validate.hpp"

#include <cmath>
#include <sstream>

namespace mmdp {
namespace {

std::string num(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

std::string where(const std::string& label, const std::string& what) {
  return label.empty() ? what : label + " " + what;
}

void check_distribution(std::span<const double> values, double tolerance, IssueKind kind, const std::string& label,
                        const std::string& noun, const std::string& item, ValidationReport& report) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double p = values[i];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      report.issues.push_back({kind, where(label, "(" + item + " " + std::to_string(i) + ")"),
                               noun + " has invalid entry " + num(p) + " for " + item + " " + std::to_string(i)});
    }
    sum += p;
  }
  if (!(std::abs(sum - 1.0) <= tolerance)) {
    report.issues.push_back({kind, where(label, "(" + noun + ")"), noun + " sum " + num(sum)});
  }
}

}  // namespace

bool ValidationReport::has(IssueKind kind) const {
  for (const auto& issue : issues) {
    if (issue.kind == kind) return true;
  }
  return false;
}

std::string ValidationReport::to_string() const {
  std::string text;
  for (const auto& issue : issues) text += issue.location + ": " + issue.message + "\n";
  return text;
}

ValidationReport validate(const Mmdp& mmdp, double tolerance, const std::string& label) {
  ValidationReport report;
  for (int m = 0; m < mmdp.n_models(); ++m) {
    for (int s = 0; s < mmdp.n_states(); ++s) {
      for (int a = 0; a < mmdp.n_actions(); ++a) {
        const std::string loc =
            "(model " + std::to_string(m) + ", state " + std::to_string(s) + ", action " + std::to_string(a) + ")";
        const auto row = mmdp.transitions(m, s, a);
        if (row.empty()) {
          report.issues.push_back({IssueKind::kTransition, where(label, loc), "missing transition row"});
          continue;
        }
        double sum = 0.0;
        for (const Transition& tr : row) {
          if (!(tr.probability >= 0.0)) {
            report.issues.push_back({IssueKind::kTransition, where(label, loc),
                                     "negative probability " + num(tr.probability) + " to state " +
                                         std::to_string(tr.next)});
          }
          sum += tr.probability;
        }
        if (!(std::abs(sum - 1.0) <= tolerance)) {
          report.issues.push_back(
              {IssueKind::kTransition, where(label, loc), "transition probabilities sum " + num(sum)});
        }
        if (!std::isfinite(mmdp.base_reward(m, s, a))) {
          report.issues.push_back({IssueKind::kReward, where(label, loc), "reward is not finite"});
        }
      }
    }
  }
  check_distribution(mmdp.initial_distribution(), tolerance, IssueKind::kInitial, label, "initial distribution",
                     "state", report);
  check_distribution(mmdp.model_weights(), tolerance, IssueKind::kWeights, label, "model weights", "model", report);
  if (!(mmdp.discount() >= 0.0 && mmdp.discount() <= 1.0)) {
    report.issues.push_back(
        {IssueKind::kDiscount, where(label, "(discount)"), "discount " + num(mmdp.discount()) + " outside [0, 1]"});
  }
  return report;
}

ValidationReport validate(const DomainBundle& bundle, double tolerance) {
  ValidationReport report = validate(bundle.training, tolerance, "training");
  ValidationReport test = validate(bundle.test, tolerance, "test");
  report.issues.insert(report.issues.end(), test.issues.begin(), test.issues.end());

  const Mmdp& train = bundle.training;
  const Mmdp& other = bundle.test;
  if (train.n_states() != other.n_states() || train.n_actions() != other.n_actions()) {
    report.issues.push_back({IssueKind::kBundle, "bundle", "training and test disagree on states or actions"});
  } else {
    const auto mu_train = train.initial_distribution();
    const auto mu_test = other.initial_distribution();
    for (std::size_t s = 0; s < mu_train.size(); ++s) {
      if (mu_train[s] != mu_test[s]) {
        report.issues.push_back({IssueKind::kBundle, "bundle (state " + std::to_string(s) + ")",
                                 "training and test initial distributions differ"});
        break;
      }
    }
  }
  if (train.discount() != other.discount()) {
    report.issues.push_back({IssueKind::kBundle, "bundle", "training and test discounts differ"});
  }
  return report;
}

}  // namespace mmdp
