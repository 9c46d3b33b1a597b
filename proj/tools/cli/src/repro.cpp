#include "bmdlimits_cli/repro.hpp"

#include <cmath>
#include <cstdio>

#include "bmdlimits/parallel.hpp"
#include "bmdlimits/passive.hpp"
#include "bmdlimits/transaction_space.hpp"

namespace bmdlimits::cli {
namespace {

std::string pct(double x) { return format_number(x * 100.0) + "%"; }

std::string tests_label(const std::optional<std::uint64_t>& t) {
  return t ? std::to_string(*t) : "inf";
}

std::string cell_label(const reference::TrainingRow& r) {
  return "conf=" + pct(r.confidence) + " T=" + tests_label(r.tests) + " r=" + pct(r.r);
}

void add_exact(std::vector<ManifestRow>& rows, std::string id, std::string quantity,
               const std::string& value, const std::string& ref) {
  rows.push_back({std::move(id), std::move(quantity), value, ref, "MATCH-EXACT", "0", value == ref, true});
}

void add_tol(std::vector<ManifestRow>& rows, std::string id, std::string quantity, double value,
             double ref, double tol, bool relative) {
  const double err = relative ? std::fabs(value - ref) / std::fabs(ref) : std::fabs(value - ref);
  rows.push_back({std::move(id), std::move(quantity), format_number(value), format_number(ref),
                  "MATCH-TOL", (relative ? "rel " : "abs ") + format_number(tol), err <= tol, true});
}

void add_diff(std::vector<ManifestRow>& rows, std::string id, std::string quantity,
              const std::string& value, const std::string& ref, std::string note) {
  rows.push_back({std::move(id), std::move(quantity), value, ref, "DOCUMENTED-DIFF", std::move(note),
                  value == ref, false});
}

void passive_rows(std::vector<ManifestRow>& rows, double budget,
                  const std::uint64_t (&ref)[5][2][3], const std::string& tag) {
  using namespace reference;
  const std::vector<double> m(kMargins.begin(), kMargins.end());
  const std::vector<double> d(kDetectRates.begin(), kDetectRates.end());
  const std::vector<double> b(kBaseRates.begin(), kBaseRates.end());
  const auto table = passive::table_passive(budget, m, d, b);
  for (std::size_t mi = 0; mi < m.size(); ++mi) {
    for (std::size_t di = 0; di < d.size(); ++di) {
      for (std::size_t bi = 0; bi < b.size(); ++bi) {
        const auto& cell = table.at(mi, di, bi);
        const double got = cell.solution ? static_cast<double>(cell.solution->contest_size) : NAN;
        add_tol(rows, tag + ".m" + pct(m[mi]) + ".d" + pct(d[di]) + ".b" + pct(b[bi]),
                "min contest size, fp=fn=" + pct(budget), got, static_cast<double>(ref[mi][di][bi]),
                0.01, true);
      }
    }
  }
}

}  // namespace

std::vector<TrainingCell> training_grid(const minimax::MinimaxQuery& conventions) {
  std::vector<TrainingCell> out;
  for (const auto& row : reference::kTraining) {
    minimax::MinimaxQuery q = conventions;
    q.r = row.r;
    q.alpha = 1.0 - row.confidence;
    q.tests = row.tests;
    out.push_back({row, minimax::min_training_sample(q)});
  }
  return out;
}

namespace {

template <class Visit>
void for_each_ordering(const std::vector<TrainingCell>& cells, Visit visit) {
  const auto find = [&](double conf, std::optional<std::uint64_t> t, double r) -> const TrainingCell* {
    for (const auto& c : cells) {
      if (c.row.confidence == conf && c.row.tests == t && c.row.r == r) return &c;
    }
    return nullptr;
  };
  const std::optional<std::uint64_t> budgets[] = {2000, std::nullopt};
  for (double conf : {0.99, 0.95}) {
    for (const auto& t : budgets) {
      for (std::size_t i = 0; i + 1 < reference::kTrainingR.size(); ++i) {
        const auto* a = find(conf, t, reference::kTrainingR[i]);
        const auto* b = find(conf, t, reference::kTrainingR[i + 1]);
        if (a && b) visit(*a, *b, "non-increasing in r");
      }
    }
  }
  for (const auto& t : budgets) {
    for (double r : reference::kTrainingR) {
      const auto* a = find(0.99, t, r);
      const auto* b = find(0.95, t, r);
      if (a && b) visit(*a, *b, "99% >= 95%");
    }
  }
  for (double conf : {0.99, 0.95}) {
    for (double r : reference::kTrainingR) {
      const auto* a = find(conf, 2000, r);
      const auto* b = find(conf, std::nullopt, r);
      if (a && b) visit(*a, *b, "finite T >= unlimited");
    }
  }
}

}  // namespace

std::vector<std::string> ordering_violations(const std::vector<TrainingCell>& cells) {
  std::vector<std::string> out;
  for_each_ordering(cells, [&](const TrainingCell& hi, const TrainingCell& lo, const char* what) {
    if (hi.report.min_training_n < lo.report.min_training_n) {
      out.push_back(std::string(what) + ": " + cell_label(hi.row) + " < " + cell_label(lo.row));
    }
  });
  return out;
}

std::size_t ordering_checks(const std::vector<TrainingCell>& cells) {
  std::size_t n = 0;
  for_each_ordering(cells, [&](const TrainingCell&, const TrainingCell&, const char*) { ++n; });
  return n;
}

std::vector<ManifestRow> build_manifest() {
  std::vector<ManifestRow> rows;

  add_exact(rows, "cardinality.optimistic", "transaction space size",
            txn::cardinality(txn::optimistic_preset()).str(),
            std::to_string(reference::kOptimisticCardinality));
  add_tol(rows, "cardinality.realistic", "transaction space size",
          txn::cardinality(txn::realistic_preset()).convert_to<double>(),
          reference::kRealisticCardinality, 0.05, true);

  const auto oracle = parallel::oracle_min_samples({2980, 15, 0.95});
  add_diff(rows, "oracle.v2980.f15", "printouts to inspect, 95%", std::to_string(oracle.samples),
           std::to_string(reference::kOracleSamples),
           "miss probability at " + std::to_string(oracle.samples) + " is " +
               format_fixed(oracle.miss_at_samples, 6));

  add_exact(rows, "tests.p25.c95", "tests for 95% detection, p=25%",
            std::to_string(parallel::min_tests_iid(0.25, 0.95)), "11");
  add_tol(rows, "detect.p25.n11", "detection probability", parallel::detection_prob_iid(0.25, 11),
          0.958, 5e-4, false);
  add_tol(rows, "detect.p50.n5", "detection probability", parallel::detection_prob_iid(0.5, 5),
          0.968, 1e-3, false);
  add_diff(rows, "tests.p1.c95", "tests for 95% detection, p=1%",
           std::to_string(parallel::min_tests_iid(0.01, 0.95)),
           std::to_string(reference::kTestsAtOnePercent), "0.99^299 = 0.04953 already meets 5%");

  for (auto conv : {parallel::SamplingConvention::kWithReplacement,
                    parallel::SamplingConvention::kWithoutReplacement}) {
    parallel::BudgetedTestQuery q;
    q.convention = conv;
    const auto e = parallel::min_electorate_for_budget(q);
    const std::string tag = conv == parallel::SamplingConvention::kWithReplacement ? "iid" : "srs";
    add_diff(rows, "electorate." + tag, "machines / voters at 13 tests, 140 voters per machine",
             std::to_string(e.bmds) + "/" + std::to_string(e.voters),
             std::to_string(reference::kElectorateBmds) + "/" + std::to_string(reference::kElectorateVoters),
             parallel::to_string(conv) + "; detection " + format_fixed(e.achieved_detection, 5));
  }

  add_tol(rows, "leverage.1.100.30", "margin shift", parallel::margin_leverage(0.01, 1.0, 0.3),
          0.02 / 0.7, 1e-12, false);
  add_tol(rows, "leverage.1.10.0", "margin shift", parallel::margin_leverage(0.01, 0.1, 0.0), 0.2,
          1e-12, false);
  add_tol(rows, "leverage.1.10.30", "margin shift", parallel::margin_leverage(0.01, 0.1, 0.3),
          0.02 / 0.07, 1e-12, false);

  passive_rows(rows, 0.05, reference::kPassive5, "passive5");
  passive_rows(rows, 0.01, reference::kPassive1, "passive1");

  const auto grid = training_grid({});
  for (const auto& c : grid) {
    const double ratio = std::max(c.ratio(), 1.0 / c.ratio());
    rows.push_back({"training." + cell_label(c.row), "training sample (millions)",
                    format_fixed(c.millions(), 3), format_number(c.row.millions), "MATCH-FACTOR",
                    "x" + format_number(reference::kTrainingFactor) + " (ratio " + format_fixed(c.ratio(), 3) + ")",
                    ratio <= reference::kTrainingFactor, true});
  }
  const auto violations = ordering_violations(grid);
  rows.push_back({"training.orderings", "monotone orderings holding",
                  std::to_string(ordering_checks(grid) - violations.size()),
                  std::to_string(ordering_checks(grid)), "MATCH-EXACT", "0", violations.empty(), true});

  const auto costs = parallel::tester_time({{"english-long-bob", 1, 50.0, 5},
                                            {"english-mid-carol", 1, 55.0, 5},
                                            {"other-language-long", 1, 55.0, 5}});
  const char* expect[] = {"4h10m", "8h45m", "13h20m"};
  for (std::size_t i = 0; i < costs.size(); ++i) {
    add_exact(rows, "tester-time." + costs[i].label, "cumulative tester time",
              parallel::hours_minutes(costs[i].cumulative_minutes), expect[i]);
  }
  return rows;
}

Table manifest_table(const std::vector<ManifestRow>& rows) {
  Table t;
  t.columns = {"id", "quantity", "value", "reference", "class", "tolerance", "status", "required"};
  for (const auto& r : rows) {
    std::string status = r.pass ? "PASS" : "FAIL";
    if (!r.required) status = r.pass ? "PASS" : "DIFF";
    t.add_row({r.id, r.quantity, r.value, r.reference, r.rule, r.tolerance, status, r.required});
  }
  return t;
}

bool manifest_ok(const std::vector<ManifestRow>& rows) {
  for (const auto& r : rows) {
    if (r.required && !r.pass) return false;
  }
  return true;
}

}  // namespace bmdlimits::cli
