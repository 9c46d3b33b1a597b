#pragma once

#include <string>
#include <vector>

#include "bmdlimits/minimax.hpp"
#include "bmdlimits/table.hpp"
#include "bmdlimits_cli/reference.hpp"

namespace bmdlimits::cli {

struct TrainingCell {
  reference::TrainingRow row;
  minimax::BoundReport report;
  double millions() const { return static_cast<double>(report.min_training_n) / 1e6; }
  double ratio() const { return millions() / row.millions; }
};

// Solves every row of the training-sample grid with the query's
// conventions (r, alpha and tests are taken from each row).
std::vector<TrainingCell> training_grid(const minimax::MinimaxQuery& conventions);

// Orderings the grid must respect: non-increasing in r, 99% >= 95%, and a
// finite test budget >= unlimited. Returns descriptions of violations.
std::vector<std::string> ordering_violations(const std::vector<TrainingCell>& cells);
std::size_t ordering_checks(const std::vector<TrainingCell>& cells);

// Classes: MATCH-EXACT, MATCH-TOL, MATCH-FACTOR, DOCUMENTED-DIFF.
struct ManifestRow {
  std::string id;
  std::string quantity;
  std::string value;
  std::string reference;
  std::string rule;
  std::string tolerance;
  bool pass = false;
  bool required = true;
};

std::vector<ManifestRow> build_manifest();
Table manifest_table(const std::vector<ManifestRow>& rows);
// Every required row passes.
bool manifest_ok(const std::vector<ManifestRow>& rows);

}  // namespace bmdlimits::cli
