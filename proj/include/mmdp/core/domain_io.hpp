#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "mmdp/core/mmdp.hpp"
#include "mmdp/core/validate.hpp"

namespace mmdp {

struct LoadOptions {
  /// Row groups whose sum is within this distance of 1 are renormalized;
  /// larger deviations are kept as-is and reported.
  double probability_tolerance = 1e-6;
  /// Receives non-fatal diagnostics such as unknown parameter names.
  /// Defaults to printing on stderr.
  std::function<void(const std::string&)> on_warning;
};

/**
 * Reads a domain directory holding `initial.csv`, `parameters.csv`,
 * `training.csv` and `test.csv`.
 *
 * Transition files use the columns
 * `idstatefrom,idaction,idstateto,idoutcome,probability,reward` plus an
 * optional `weight` column giving the weight of model `idoutcome`; without it
 * the model weights are uniform. Per-transition rewards are collapsed into the
 * expected immediate reward r^m(s,a) = sum_s' p^m(s'|s,a) reward(s,a,s',m).
 *
 * Throws MissingFileError, SchemaError, IndexError, or ProbabilityError (the
 * latter naming the first offending (model, state, action) row group). The
 * returned bundle carries the discount unfolded.
 */
DomainBundle load_domain(const std::filesystem::path& dir, int horizon, const LoadOptions& options = {});

/// Same parsing as load_domain but without the probability check; pair it
/// with validate() to list every violation.
DomainBundle read_domain(const std::filesystem::path& dir, int horizon, const LoadOptions& options = {});

/// Writes a bundle in the load_domain schema using round-trip exact numbers.
/// A folded instance is written with its reward decay as the discount.
void write_domain(const std::filesystem::path& dir, const DomainBundle& bundle);

}  // namespace mmdp
