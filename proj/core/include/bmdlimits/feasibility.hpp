#pragma once

// Turnout data and where passive testing can work at all. The input is a
// CSV with header `state,jurisdiction,turnout`; fields may be quoted with
// backslash escapes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bmdlimits/passive.hpp"

namespace bmdlimits::feasibility {

struct JurisdictionRecord {
  std::string state;
  std::string jurisdiction;
  std::uint64_t turnout = 0;

  friend bool operator==(const JurisdictionRecord&, const JurisdictionRecord&) = default;
};

// Throws ParseError naming the line on a bad header, a wrong field count, a
// non-numeric turnout or a repeated (state, jurisdiction) pair.
std::vector<JurisdictionRecord> parse_turnout(std::istream& in, const std::string& source = "<csv>");
std::vector<JurisdictionRecord> load_turnout(const std::filesystem::path& path);

// Canonical form: header, one record per line, fields quoted only when they
// contain a comma, quote, backslash or surrounding space.
void emit_turnout(std::ostream& out, const std::vector<JurisdictionRecord>& records);

struct ThresholdSummary {
  std::uint64_t threshold = 0;
  std::size_t below = 0;  // jurisdictions with turnout < threshold
  double fraction_below = 0.0;
  std::size_t states_majority_below = 0;  // more than half below
  double fraction_states_majority_below = 0.0;
};

struct StateSummary {
  std::string state;
  std::size_t jurisdictions = 0;
  std::vector<std::size_t> below;  // per threshold, same order as the query
};

struct FeasibilitySummary {
  std::size_t jurisdictions = 0;
  std::size_t states = 0;
  std::uint64_t median_turnout = 0;  // lower median
  std::vector<ThresholdSummary> thresholds;
  std::vector<StateSummary> per_state;  // sorted by state
};

// Throws DomainError on empty input.
FeasibilitySummary summarize(const std::vector<JurisdictionRecord>& records,
                             const std::vector<std::uint64_t>& thresholds);

struct JurisdictionFeasibility {
  JurisdictionRecord record;
  bool feasible = false;  // turnout >= required voters
};

struct StateFeasibility {
  std::string state;
  std::size_t jurisdictions = 0;
  std::size_t infeasible = 0;
  bool majority_infeasible = false;
};

struct FeasibilityJoin {
  std::uint64_t required_voters = 0;
  std::uint64_t alarm_threshold = 0;
  std::vector<JurisdictionFeasibility> rows;  // input order
  std::vector<StateFeasibility> per_state;    // sorted by state
  std::size_t infeasible = 0;
  double fraction_infeasible = 0.0;
  std::size_t states_majority_infeasible = 0;
  double fraction_states_majority_infeasible = 0.0;
};

FeasibilityJoin join_against_size(const std::vector<JurisdictionRecord>& records,
                                  std::uint64_t required_voters);

// Solves the design and joins; solver errors propagate.
FeasibilityJoin passive_feasibility_join(const std::vector<JurisdictionRecord>& records,
                                         const passive::PassiveDesign& design);

}  // namespace bmdlimits::feasibility
