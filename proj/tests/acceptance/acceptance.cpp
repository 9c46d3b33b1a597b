// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bmdlimits/feasibility.hpp"
#include "bmdlimits/minimax.hpp"
#include "bmdlimits/parallel.hpp"
#include "bmdlimits/passive.hpp"
#include "bmdlimits/sim.hpp"
#include "bmdlimits/stats.hpp"
#include "bmdlimits/transaction_space.hpp"
#include "bmdlimits_cli/cli.hpp"
#include "bmdlimits_cli/reference.hpp"
#include "bmdlimits_cli/repro.hpp"
#include "oracles.hpp"

using namespace bmdlimits;
namespace ref = bmdlimits::reference;

namespace {

const std::string kData = BMDLIMITS_TEST_DATA;
constexpr double kTableTol = 0.01;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Criterion {
 public:
  explicit Criterion(std::string id) : id_(std::move(id)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_.push_back(what);
    }
    ++checks_;
  }
  void note(const std::string& text) { notes_.push_back(text); }

  bool report() const {
    std::cout << id_ << ' ' << (pass_ ? "PASS" : "FAIL") << " (" << checks_ << " checks";
    for (const auto& n : notes_) std::cout << "; " << n;
    std::cout << ")\n";
    for (const auto& f : failures_) std::cout << "  failed: " << f << '\n';
    return pass_;
  }

 private:
  std::string id_;
  bool pass_ = true;
  std::size_t checks_ = 0;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

bool within_rel(double value, double reference, double tol) {
  return std::fabs(value - reference) <= tol * std::fabs(reference);
}

Criterion passive_table(const char* id, double budget, const std::uint64_t (&want)[5][2][3]) {
  Criterion c(id);
  const auto t0 = Clock::now();
  const auto table = passive::table_passive(
      budget, {ref::kMargins.begin(), ref::kMargins.end()},
      {ref::kDetectRates.begin(), ref::kDetectRates.end()},
      {ref::kBaseRates.begin(), ref::kBaseRates.end()}, passive::ThresholdConvention::kBoundaryExcluded);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t m = 0; m < 5; ++m) {
    for (std::size_t d = 0; d < 2; ++d) {
      for (std::size_t b = 0; b < 3; ++b) {
        const auto& cell = table.at(m, d, b);
        const double reference = static_cast<double>(want[m][d][b]);
        if (!cell.solution) {
          c.check(false, "cell infeasible: " + cell.error);
          continue;
        }
        const double got = static_cast<double>(cell.solution->contest_size);
        worst = std::max(worst, std::fabs(got - reference) / reference);
        c.check(within_rel(got, reference, kTableTol),
                "(" + num(cell.margin) + ", " + num(cell.detect_rate) + ", " + num(cell.base_rate) +
                    ") got " + num(got) + " want " + num(reference));
      }
    }
  }
  c.check(elapsed < 10.0, "runtime " + num(elapsed) + " s exceeds 10 s");
  c.note("max relative deviation " + num(worst));
  c.note("runtime " + num(elapsed) + " s");
  return c;
}

Criterion oracle_bounds() {
  Criterion c("AC3");
  const auto o = parallel::oracle_min_samples({2980, 15, 0.95});
  c.check(o.samples == ref::kOracleSamples,
          "oracle_min_samples(2980, 15, 0.95) = " + std::to_string(o.samples) + ", want " +
              std::to_string(ref::kOracleSamples));
  const auto exact_miss = [](std::uint64_t n) {
    return oracle::no_replacement_miss(2980, 15, n);
  };
  c.check(exact_miss(o.samples) <= oracle::Rational(1, 20),
          "exact miss probability at the returned n exceeds 0.05");
  c.check(exact_miss(o.samples - 1) > oracle::Rational(1, 20),
          "exact miss probability at n-1 does not exceed 0.05");
  c.check(exact_miss(ref::kOracleSamples - 1) > oracle::Rational(1, 20),
          "certificate at n=" + std::to_string(ref::kOracleSamples - 1) + " does not fail");

  c.check(parallel::min_tests_iid(0.25, 0.95) == 11, "min_tests_iid(0.25, 0.95) != 11");
  const double d11 = parallel::detection_prob_iid(0.25, 11);
  c.check(std::fabs(d11 - 0.9578) < 5e-5, "detection at 11 tests = " + num(d11));
  c.check(std::fabs(d11 - 0.958) < 5e-4, "detection at 11 tests does not round to 0.958");
  c.check(parallel::detection_prob_iid(0.5, 5) == 0.96875, "detection_prob_iid(0.5, 5) != 0.96875");
  const auto t1 = parallel::min_tests_iid(0.01, 0.95);
  c.check(t1 == 299, "min_tests_iid(0.01, 0.95) = " + std::to_string(t1));
  c.note("min_tests_iid(0.01, 0.95) = " + std::to_string(t1) + " vs reference " +
         std::to_string(ref::kTestsAtOnePercent) + " (documented difference)");
  const auto manifest = cli::build_manifest();
  bool diff_row = false;
  for (const auto& r : manifest) {
    diff_row |= r.rule == "DOCUMENTED-DIFF" && r.reference == std::to_string(ref::kTestsAtOnePercent);
  }
  c.check(diff_row, "no documented-difference manifest row for the 1% test count");
  return c;
}

Criterion electorate() {
  Criterion c("AC4");
  parallel::BudgetedTestQuery q;  // 13 tests, 140 voters per machine, 0.5%, 95%
  const auto e = parallel::min_electorate_for_budget(q);
  const bool reference_size = e.bmds == ref::kElectorateBmds && e.voters == ref::kElectorateVoters;
  const bool off_by_one = e.bmds + 1 == ref::kElectorateBmds && e.voters + q.bmd_daily_capacity == ref::kElectorateVoters;
  c.check(reference_size || off_by_one, "got " + std::to_string(e.bmds) + " machines / " +
                                            std::to_string(e.voters) + " voters");
  const std::string printed = parallel::to_string(e.convention);
  c.check(!printed.empty(), "convention not printed");
  c.note(std::to_string(e.bmds) + " machines / " + std::to_string(e.voters) + " voters, convention " + printed);

  // First-principles check at the returned size and one machine fewer.
  const auto detection = [&](std::uint64_t bmds) {
    oracle::Real miss = 1;
    const oracle::Real keep = oracle::Real(1) - oracle::Real(q.altered_fraction);
    for (std::uint64_t i = 0; i < bmds * q.tests_per_bmd_per_day; ++i) miss *= keep;
    return oracle::Real(1) - miss;
  };
  c.check(detection(e.bmds) >= oracle::Real(q.confidence), "achieved detection below 0.95");
  c.check(detection(e.bmds - 1) < oracle::Real(q.confidence), "one machine fewer already reaches 0.95");
  c.check(std::fabs(detection(e.bmds).convert_to<double>() - e.achieved_detection) < 1e-12,
          "reported detection disagrees with the extended-precision value");

  std::ostringstream out;
  std::ostringstream err;
  const char* argv[] = {"bmdlimits", "parallel", "electorate"};
  c.check(cli::run(3, argv, out, err) == 0 && out.str().find(printed) != std::string::npos,
          "CLI does not print the convention");
  return c;
}

Criterion leverage() {
  Criterion c("AC5");
  struct Case {
    double altered, share, undervote;
    oracle::Rational want;
  };
  const std::vector<Case> cases{{0.01, 1.0, 0.3, oracle::Rational(2, 70)},
                                {0.01, 0.1, 0.0, oracle::Rational(1, 5)},
                                {0.01, 0.1, 0.3, oracle::Rational(2, 7)}};
  for (const auto& k : cases) {
    const double got = parallel::margin_leverage(k.altered, k.share, k.undervote);
    const double want = static_cast<double>(k.want);
    c.check(std::fabs(got - want) <= 1e-12 * want, "leverage(" + num(k.altered) + ", " + num(k.share) + ", " +
                                                       num(k.undervote) + ") = " + num(got));
    c.note(num(std::round(got * 1e5) / 1e3) + "%");
  }
  return c;
}

Criterion cardinalities() {
  Criterion c("AC6");
  const auto opt = txn::cardinality(txn::optimistic_preset());
  c.check(opt == txn::BigInt(ref::kOptimisticCardinality), "optimistic = " + opt.str());
  const auto real = txn::cardinality(txn::realistic_preset());
  const double r = real.convert_to<double>();
  c.check(within_rel(r, ref::kRealisticCardinality, 0.05), "realistic = " + txn::scientific(real));
  c.note("optimistic " + opt.str() + ", realistic " + txn::scientific(real));
  return c;
}

Criterion training() {
  Criterion c("AC7");
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> log_s(std::log(2.0), std::log(1e9));
  std::uniform_real_distribution<double> log_ratio(std::log(1e-4), std::log(100.0));
  std::uniform_real_distribution<double> zd(0.001, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double s = std::round(std::exp(log_s(gen)));
    const double n = std::max(1.0, std::round(s * std::exp(log_ratio(gen))));
    const double z = zd(gen);
    const double want =
        oracle::hjw_lower_bound(oracle::Real(n), oracle::Real(s), oracle::Real(z)).convert_to<double>();
    worst = std::max(worst, std::fabs(minimax::hjw_lower_bound(n, s, z) - want));
  }
  c.check(worst <= 1e-12, "formula deviates from the oracle by " + num(worst));
  c.note("formula max abs error " + num(worst));

  const auto grid = cli::training_grid({});
  const auto violations = cli::ordering_violations(grid);
  for (const auto& v : violations) c.check(false, "ordering: " + v);
  c.check(violations.empty(), "orderings");
  c.note(std::to_string(cli::ordering_checks(grid)) + " orderings checked");

  std::size_t within = 0;
  for (const auto& cell : grid) {
    const double ratio = cell.ratio();
    const bool ok = ratio <= ref::kTrainingFactor && ratio >= 1.0 / ref::kTrainingFactor;
    within += ok;
    std::cout << "  AC7 cell conf=" << cell.row.confidence << " tests="
              << (cell.row.tests ? std::to_string(*cell.row.tests) : std::string("unlimited"))
              << " r=" << cell.row.r << " got=" << num(cell.millions()) << "M ref=" << cell.row.millions
              << "M ratio=" << num(ratio) << (ok ? " ok" : " OUTSIDE") << '\n';
    c.check(ok, "cell (" + num(cell.row.confidence) + ", " +
                    (cell.row.tests ? std::to_string(*cell.row.tests) : std::string("unlimited")) + ", " +
                    num(cell.row.r) + ") ratio " + num(ratio));
  }
  c.note(std::to_string(within) + "/" + std::to_string(grid.size()) + " cells within factor 3");
  return c;
}

Criterion simulator() {
  Criterion c("AC8");
  const auto t0 = Clock::now();
  const auto whole = sim::run_scenario(sim::load_scenario(kData + "/scenarios/whole_space_half.json"));
  const auto uniform = sim::run_scenario(sim::load_scenario(kData + "/scenarios/uniform_one_percent.json"));
  const auto disjoint = sim::run_scenario(sim::load_scenario(kData + "/scenarios/disjoint_support.json"));
  const double elapsed = seconds_since(t0);
  for (const auto* r : {&whole, &uniform, &disjoint}) {
    c.check(r->trials == 100000, r->scenario + " ran " + std::to_string(r->trials) + " trials");
    c.check(r->parallel.has_value(), r->scenario + " has no parallel report");
  }
  if (whole.parallel && uniform.parallel && disjoint.parallel) {
    const double a = whole.parallel->detection.value;
    const double b = uniform.parallel->detection.value;
    const double d = disjoint.parallel->detection.value;
    c.check(std::fabs(a - 0.96875) <= 0.006, "whole-space detection " + num(a));
    c.check(std::fabs(b - 0.9503) <= 0.007, "uniform 1% detection " + num(b));
    c.check(d == 0.0, "disjoint-support detection " + num(d));
    c.note("whole-space " + num(a) + ", uniform " + num(b) + ", disjoint " + num(d));
  }
  c.check(elapsed < 60.0, "runtime " + num(elapsed) + " s exceeds 60 s");
  c.note("runtime " + num(elapsed) + " s");
  return c;
}

Criterion passive_sim() {
  Criterion c("AC9");
  const auto scenario = sim::load_scenario(kData + "/scenarios/passive_50k.json");
  const auto report = sim::run_scenario(scenario);
  c.check(report.trials == 100000, "trials " + std::to_string(report.trials));
  c.check(scenario.n_voters == 50000, "contest size");
  c.check(report.passive.has_value(), "no passive report");
  if (!report.passive) return c;
  const auto& p = *report.passive;
  // The simulator alarms at spoils >= k, which is the strict convention.
  const passive::PassiveDesign design{0.05, 0.25, 0.005, 0.05, 0.05, passive::ThresholdConvention::kStrict};
  const auto model = passive::passive_power(scenario.n_voters, design, p.alarm_threshold);
  c.check(std::fabs(p.fp.value - model.fp) <= 0.01, "fp " + num(p.fp.value) + " vs " + num(model.fp));
  c.check(std::fabs(p.fn.value - model.fn) <= 0.01, "fn " + num(p.fn.value) + " vs " + num(model.fn));
  c.note("k=" + std::to_string(p.alarm_threshold) + " fp " + num(p.fp.value) + " vs " + num(model.fp) + ", fn " +
         num(p.fn.value) + " vs " + num(model.fn));
  return c;
}

Criterion determinism() {
  Criterion c("AC10");
  const std::vector<std::string> scenarios{"whole_space_half",       "uniform_one_percent", "disjoint_support",
                                           "passive_50k",            "passive_solver_size", "exclusive_scripts",
                                           "estimation_three_points"};
  const auto simulate = [](const std::string& path, const std::string& workers) {
    const std::vector<std::string> args{"bmdlimits", "--format", "jsonl", "simulate", "--scenario", path,
                                        "--trials",  "3000",     "--workers", workers};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::make_pair(code, out.str());
  };
  for (const auto& name : scenarios) {
    const std::string path = kData + "/scenarios/" + name + ".json";
    const auto one = simulate(path, "1");
    c.check(one.first == 0 && !one.second.empty(), name + " did not run");
    for (const char* w : {"2", "5"}) {
      c.check(simulate(path, w) == one, name + " differs with " + w + " workers");
    }
  }
  c.note(std::to_string(scenarios.size()) + " scenarios at 1, 2 and 5 workers");
  return c;
}

Criterion feasibility_fixture() {
  Criterion c("AC11");
  const auto records = feasibility::load_turnout(kData + "/turnout_synthetic.csv");
  const auto summary = feasibility::summarize(records, {43000});
  c.check(summary.median_turnout == 2980, "median " + std::to_string(summary.median_turnout));
  const double below = summary.thresholds.at(0).fraction_below;
  c.check(below > 2.0 / 3.0, "fraction below 43000 is " + num(below));
  c.note("median " + std::to_string(summary.median_turnout) + ", below 43000 " + num(below));
  for (double b : ref::kBaseRates) {
    const passive::PassiveDesign design{0.01, 0.07, b};
    const auto join = feasibility::passive_feasibility_join(records, design);
    std::size_t small = 0;
    std::size_t flagged = 0;
    for (const auto& row : join.rows) {
      if (row.record.turnout < 100000) {
        ++small;
        flagged += !row.feasible;
      }
    }
    c.check(small > 0 && flagged == small, "base rate " + num(b) + ": " + std::to_string(flagged) + "/" +
                                               std::to_string(small) + " flagged");
    c.note("b=" + num(b) + " N=" + std::to_string(join.required_voters) + " flags " + std::to_string(flagged) +
           "/" + std::to_string(small));
  }
  return c;
}

}  // namespace

int main() {
  bool ok = true;
  ok &= passive_table("AC1", 0.05, ref::kPassive5).report();
  ok &= passive_table("AC2", 0.01, ref::kPassive1).report();
  ok &= oracle_bounds().report();
  ok &= electorate().report();
  ok &= leverage().report();
  ok &= cardinalities().report();
  ok &= training().report();
  ok &= simulator().report();
  ok &= passive_sim().report();
  ok &= determinism().report();
  ok &= feasibility_fixture().report();
  std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << '\n';
  return ok ? 0 : 1;
}
