#include "bmdlimits/feasibility.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <boost/tokenizer.hpp>

#include "bmdlimits/errors.hpp"

namespace bmdlimits::feasibility {
namespace {

std::vector<std::string> split_csv(const std::string& line, const std::string& source, std::size_t lineno) {
  using Sep = boost::escaped_list_separator<char>;
  try {
    boost::tokenizer<Sep> tok(line, Sep('\\', ',', '"'));
    return {tok.begin(), tok.end()};
  } catch (const boost::escaped_list_error& e) {
    throw ParseError(source, lineno, std::string("malformed field: ") + e.what());
  }
}

std::string quote_if_needed(const std::string& s) {
  const bool plain = s.find_first_of(",\"\\") == std::string::npos &&
                     (s.empty() || (s.front() != ' ' && s.back() != ' '));
  if (plain) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::vector<JurisdictionRecord> parse_turnout(std::istream& in, const std::string& source) {
  std::vector<JurisdictionRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line, source, lineno);
    if (!header_seen) {
      if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        fields = split_csv(line.substr(3), source, lineno);
      }
      if (fields != std::vector<std::string>{"state", "jurisdiction", "turnout"}) {
        throw ParseError(source, lineno, "expected header 'state,jurisdiction,turnout'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ParseError(source, lineno,
                       "expected 3 fields, found " + std::to_string(fields.size()));
    }
    JurisdictionRecord r{fields[0], fields[1], 0};
    const std::string& t = fields[2];
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), r.turnout);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
      throw ParseError(source, lineno, "turnout '" + t + "' is not a non-negative integer");
    }
    if (!seen.emplace(r.state, r.jurisdiction).second) {
      throw ParseError(source, lineno,
                       "duplicate jurisdiction '" + r.jurisdiction + "' in state '" + r.state + "'");
    }
    out.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(source, 0, "missing header 'state,jurisdiction,turnout'");
  return out;
}

std::vector<JurisdictionRecord> load_turnout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_turnout(in, path.string());
}

void emit_turnout(std::ostream& out, const std::vector<JurisdictionRecord>& records) {
  out << "state,jurisdiction,turnout\n";
  for (const auto& r : records) {
    out << quote_if_needed(r.state) << ',' << quote_if_needed(r.jurisdiction) << ',' << r.turnout
        << '\n';
  }
}

FeasibilitySummary summarize(const std::vector<JurisdictionRecord>& records,
                             const std::vector<std::uint64_t>& thresholds) {
  if (records.empty()) throw DomainError("cannot summarize an empty turnout dataset");
  FeasibilitySummary s;
  s.jurisdictions = records.size();

  std::vector<std::uint64_t> turnout;
  turnout.reserve(records.size());
  for (const auto& r : records) turnout.push_back(r.turnout);
  const auto mid = turnout.begin() + static_cast<std::ptrdiff_t>((turnout.size() - 1) / 2);
  std::nth_element(turnout.begin(), mid, turnout.end());
  s.median_turnout = *mid;

  std::map<std::string, StateSummary> states;
  for (const auto& r : records) {
    auto& st = states[r.state];
    st.state = r.state;
    st.below.resize(thresholds.size(), 0);
    ++st.jurisdictions;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (r.turnout < thresholds[i]) ++st.below[i];
    }
  }
  s.states = states.size();
  for (auto& [name, st] : states) s.per_state.push_back(std::move(st));

  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    ThresholdSummary t;
    t.threshold = thresholds[i];
    for (const auto& st : s.per_state) {
      t.below += st.below[i];
      if (2 * st.below[i] > st.jurisdictions) ++t.states_majority_below;
    }
    t.fraction_below = static_cast<double>(t.below) / static_cast<double>(s.jurisdictions);
    t.fraction_states_majority_below =
        static_cast<double>(t.states_majority_below) / static_cast<double>(s.states);
    s.thresholds.push_back(t);
  }
  return s;
}

FeasibilityJoin join_against_size(const std::vector<JurisdictionRecord>& records,
                                  std::uint64_t required_voters) {
  FeasibilityJoin j;
  j.required_voters = required_voters;
  std::map<std::string, StateFeasibility> states;
  for (const auto& r : records) {
    const bool ok = r.turnout >= required_voters;
    j.rows.push_back({r, ok});
    auto& st = states[r.state];
    st.state = r.state;
    ++st.jurisdictions;
    if (!ok) {
      ++st.infeasible;
      ++j.infeasible;
    }
  }
  for (auto& [name, st] : states) {
    st.majority_infeasible = 2 * st.infeasible > st.jurisdictions;
    if (st.majority_infeasible) ++j.states_majority_infeasible;
    j.per_state.push_back(st);
  }
  if (!records.empty()) {
    j.fraction_infeasible = static_cast<double>(j.infeasible) / static_cast<double>(records.size());
    j.fraction_states_majority_infeasible =
        static_cast<double>(j.states_majority_infeasible) / static_cast<double>(j.per_state.size());
  }
  return j;
}

FeasibilityJoin passive_feasibility_join(const std::vector<JurisdictionRecord>& records,
                                         const passive::PassiveDesign& design) {
  const auto sol = passive::min_contest_size(design);
  auto j = join_against_size(records, sol.contest_size);
  j.alarm_threshold = sol.alarm_threshold;
  return j;
}

}  // namespace bmdlimits::feasibility
