#include "bmdlimits_cli/cli.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmdlimits/errors.hpp"
#include "bmdlimits/feasibility.hpp"
#include "bmdlimits/minimax.hpp"
#include "bmdlimits/parallel.hpp"
#include "bmdlimits/passive.hpp"
#include "bmdlimits/sim.hpp"
#include "bmdlimits/table.hpp"
#include "bmdlimits/transaction_space.hpp"
#include "bmdlimits_cli/reference.hpp"
#include "bmdlimits_cli/repro.hpp"

namespace bmdlimits::cli {
namespace {

// Raised by a subcommand for an input problem CLI11 cannot see (e.g. an
// inconsistent flag combination).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, passive::ThresholdConvention> kConventions{
    {"boundary", passive::ThresholdConvention::kBoundaryExcluded},
    {"strict", passive::ThresholdConvention::kStrict}};

const std::map<std::string, parallel::SamplingConvention> kSampling{
    {"iid", parallel::SamplingConvention::kWithReplacement},
    {"srs", parallel::SamplingConvention::kWithoutReplacement}};

Cell opt_cell(const std::optional<double>& x) { return x ? Cell{*x} : Cell{}; }

struct PassiveArgs {
  double margin = 0.0;
  double detect_rate = 0.0;
  double base_rate = 0.0;
  double fp = 0.05;
  double fn = 0.05;
  std::string convention = "boundary";
  bool grid = false;

  passive::PassiveDesign design() const {
    return {margin, detect_rate, base_rate, fp, fn, kConventions.at(convention)};
  }
};

void add_design_flags(CLI::App* sub, PassiveArgs& a, bool required) {
  auto* m = sub->add_option("--margin", a.margin, "Margin as a fraction of valid votes");
  auto* d = sub->add_option("--detect-rate", a.detect_rate, "Share of affected voters who spoil");
  auto* b = sub->add_option("--base-rate", a.base_rate, "Benign per-voter spoil probability");
  if (required) {
    m->required();
    d->required();
    b->required();
  }
  sub->add_option("--fp", a.fp, "False-positive budget")->capture_default_str();
  sub->add_option("--fn", a.fn, "False-negative budget")->capture_default_str();
  sub->add_option("--convention", a.convention, "Threshold convention")
      ->check(CLI::IsMember({"boundary", "strict"}))
      ->capture_default_str();
}

Table passive_table_of(const std::vector<passive::PassiveCell>& cells, double fp, double fn,
                       passive::ThresholdConvention conv) {
  Table t;
  t.columns = {"margin",      "detect_rate", "base_rate",   "fp_budget",   "fn_budget", "convention",
               "contest_size", "alarm_threshold", "achieved_fp", "achieved_fn", "certified"};
  for (const auto& c : cells) {
    if (!c.solution) {
      t.add_row({c.margin, c.detect_rate, c.base_rate, fp, fn, passive::to_string(conv), {}, {}, {}, {},
                 c.error});
      continue;
    }
    const auto& s = *c.solution;
    t.add_row({c.margin, c.detect_rate, c.base_rate, fp, fn, passive::to_string(conv), s.contest_size,
               s.alarm_threshold, s.achieved_fp, s.achieved_fn, s.minimality_certified});
  }
  return t;
}

Table run_passive(const PassiveArgs& a) {
  const auto conv = kConventions.at(a.convention);
  if (a.grid) {
    if (a.fp != a.fn) throw UsageError("--grid needs --fp equal to --fn");
    using namespace reference;
    const auto table = passive::table_passive(
        a.fp, {kMargins.begin(), kMargins.end()}, {kDetectRates.begin(), kDetectRates.end()},
        {kBaseRates.begin(), kBaseRates.end()}, conv);
    return passive_table_of(table.cells, a.fp, a.fn, conv);
  }
  const auto design = a.design();
  passive::PassiveCell cell{a.margin, a.detect_rate, a.base_rate, passive::min_contest_size(design), {}};
  return passive_table_of({cell}, a.fp, a.fn, conv);
}

struct MinimaxArgs {
  std::optional<double> r;
  double confidence = 0.99;
  std::optional<std::uint64_t> tests;
  double support = reference::kTrainingSupport;
  std::optional<double> beta;
  std::string beta_policy = "maximize";
  double zeta = 1.0;
  std::size_t zeta_grid = 0;
  double zeta_lo = 0.01;

  minimax::MinimaxQuery query() const {
    minimax::MinimaxQuery q;
    q.r = r.value_or(0.005);
    q.alpha = 1.0 - confidence;
    q.tests = tests;
    q.support = support;
    q.beta = beta;
    q.beta_policy = beta_policy == "half" ? minimax::BetaPolicy::kHalfAlpha
                                          : minimax::BetaPolicy::kMaximizeThreshold;
    if (zeta_grid > 0) {
      q.zeta = minimax::ZetaGrid{zeta_grid, zeta_lo};
    } else {
      q.zeta = minimax::FixedZeta{zeta};
    }
    return q;
  }

  std::string zeta_label() const {
    return zeta_grid > 0 ? "grid-max(" + std::to_string(zeta_grid) + ")" : "fixed";
  }
};

Table run_minimax(const MinimaxArgs& a) {
  Table t;
  const auto q = a.query();
  if (!a.r) {
    t.columns = {"confidence", "tests",       "r",         "bound_millions", "reference_millions",
                 "ratio",      "within_x3",   "zeta_used", "beta",           "threshold"};
    for (const auto& c : training_grid(q)) {
      const double ratio = c.ratio();
      t.add_row({c.row.confidence, c.row.tests ? Cell{*c.row.tests} : Cell{std::string("inf")}, c.row.r,
                 format_fixed(c.millions(), 6), c.row.millions, format_fixed(ratio, 4),
                 std::max(ratio, 1.0 / ratio) <= reference::kTrainingFactor, c.report.zeta_used,
                 opt_cell(c.report.beta_used), c.report.threshold});
    }
    return t;
  }
  const auto rep = minimax::min_training_sample(q);
  t.columns = {"r",        "alpha",     "tests",      "support",          "zeta_strategy",
               "zeta_used", "beta",     "threshold",  "min_training_n",   "bound_at_n",
               "bound_at_previous", "vacuous", "formula"};
  t.add_row({q.r, q.alpha, q.tests ? Cell{*q.tests} : Cell{std::string("inf")}, q.support,
             a.zeta_label(), rep.zeta_used, opt_cell(rep.beta_used), rep.threshold, rep.min_training_n,
             rep.bound_at_n, rep.bound_at_previous, rep.vacuous, rep.formula});
  return t;
}

Table sim_table(const std::vector<sim::SimReport>& reports) {
  Table t;
  t.columns = {"scenario",     "seed",          "trials",       "detection",   "detection_se",
               "analytic_detection", "trigger_mass_tests", "tests", "altered_fraction",
               "fp",           "fp_se",         "analytic_fp",  "fn",          "fn_se",
               "analytic_fn",  "alarm_threshold"};
  for (const auto& r : reports) {
    std::vector<Cell> row{r.scenario, r.seed, r.trials};
    if (r.parallel) {
      const auto& p = *r.parallel;
      row.insert(row.end(), {p.detection.value, p.detection.std_error, opt_cell(p.analytic_detection),
                             p.trigger_mass_pat, p.tests, p.altered_fraction.value});
    } else {
      row.insert(row.end(), {{}, {}, {}, {}, {}, r.passive ? Cell{r.passive->altered_fraction.value} : Cell{}});
    }
    if (r.passive) {
      const auto& p = *r.passive;
      row.insert(row.end(), {p.fp.value, p.fp.std_error, p.analytic_fp, p.fn.value, p.fn.std_error,
                             p.analytic_fn, p.alarm_threshold});
    } else {
      row.insert(row.end(), {{}, {}, {}, {}, {}, {}, {}});
    }
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detection limits for tampering with ballot-marking devices", "bmdlimits"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "csv";
  app.add_option("--format", format, "Output format")
      ->envname("BMDLIMITS_FORMAT")
      ->check(CLI::IsMember({"csv", "markdown", "md", "jsonl", "json-lines"}))
      ->capture_default_str();

  std::optional<Table> result;
  int status = kExitOk;

  // passive
  PassiveArgs pa;
  auto* passive_cmd = app.add_subcommand("passive", "Minimum contest size for passive testing");
  add_design_flags(passive_cmd, pa, false);
  passive_cmd->add_flag("--grid", pa.grid, "Solve the standard margin x detect x base-rate grid");
  passive_cmd->callback([&] {
    if (!pa.grid && (passive_cmd->count("--margin") == 0 || passive_cmd->count("--detect-rate") == 0 ||
                     passive_cmd->count("--base-rate") == 0)) {
      throw UsageError("passive needs --margin, --detect-rate and --base-rate (or --grid)");
    }
    result = run_passive(pa);
  });

  // parallel
  auto* par = app.add_subcommand("parallel", "Parallel-testing calculators");
  par->require_subcommand(1);

  double p = 0.0;
  double confidence = 0.95;
  auto* tests_cmd = par->add_subcommand("tests", "Tests needed to reach a detection probability");
  tests_cmd->add_option("--p", p, "Per-test probability of hitting an altered transaction")->required();
  tests_cmd->add_option("--confidence", confidence)->capture_default_str();
  tests_cmd->callback([&] {
    const auto n = parallel::min_tests_iid(p, confidence);
    result = Table{{"p", "confidence", "tests", "detection", "detection_one_fewer"},
                   {{p, confidence, n, parallel::detection_prob_iid(p, n),
                     parallel::detection_prob_iid(p, n - 1)}}};
  });

  std::uint64_t tests = 0;
  auto* detect_cmd = par->add_subcommand("detection", "Detection probability of n IID tests");
  detect_cmd->add_option("--p", p)->required();
  detect_cmd->add_option("--tests", tests)->required();
  detect_cmd->callback([&] {
    result = Table{{"p", "tests", "detection"}, {{p, tests, parallel::detection_prob_iid(p, tests)}}};
  });

  parallel::BudgetedTestQuery bq;
  std::string sampling = "iid";
  auto* elect_cmd = par->add_subcommand("electorate", "Smallest electorate a per-machine test budget covers");
  elect_cmd->add_option("--tests-per-bmd", bq.tests_per_bmd_per_day)->capture_default_str();
  elect_cmd->add_option("--bmd-capacity", bq.bmd_daily_capacity)->capture_default_str();
  elect_cmd->add_option("--altered", bq.altered_fraction)->capture_default_str();
  elect_cmd->add_option("--confidence", bq.confidence)->capture_default_str();
  elect_cmd->add_option("--convention", sampling)->check(CLI::IsMember({"iid", "srs"}))->capture_default_str();
  elect_cmd->callback([&] {
    bq.convention = kSampling.at(sampling);
    const auto e = parallel::min_electorate_for_budget(bq);
    result = Table{{"convention", "bmds", "voters", "tests", "flawed", "detection", "detection_one_fewer_bmd"},
                   {{parallel::to_string(e.convention), e.bmds, e.voters, e.tests, e.flawed,
                     e.achieved_detection, e.detection_with_one_fewer_bmd}}};
  });

  double altered = 0.0;
  double share = 1.0;
  double undervote = 0.0;
  auto* lev_cmd = par->add_subcommand("leverage", "Margin shift from altering a fraction of ballots");
  lev_cmd->add_option("--altered", altered)->required();
  lev_cmd->add_option("--share", share, "Fraction of ballots showing the contest")->capture_default_str();
  lev_cmd->add_option("--undervote", undervote)->capture_default_str();
  lev_cmd->callback([&] {
    result = Table{{"altered", "share", "undervote", "margin_shift"},
                   {{altered, share, undervote, parallel::margin_leverage(altered, share, undervote)}}};
  });

  double r = 0.0;
  double epsilon = 0.0;
  double alpha = 0.05;
  double beta = 0.0;
  auto* est_cmd = par->add_subcommand("estimation", "Tests needed when the test distribution is estimated");
  est_cmd->add_option("--r", r)->required();
  est_cmd->add_option("--epsilon", epsilon, "L1 error of the estimated distribution")->required();
  est_cmd->add_option("--alpha", alpha)->capture_default_str();
  est_cmd->add_option("--beta", beta)->capture_default_str();
  est_cmd->callback([&] {
    result = Table{{"r", "epsilon", "alpha", "beta", "tests"},
                   {{r, epsilon, alpha, beta, parallel::min_tests_with_estimation_error(r, epsilon, alpha, beta)}}};
  });

  std::vector<std::string> campaigns;
  auto* time_cmd = par->add_subcommand("tester-time", "Tester time for scripted campaigns");
  time_cmd->add_option("--campaign", campaigns, "label:tests:minutes:variants")->required();
  time_cmd->callback([&] {
    std::vector<parallel::TestCampaign> cs;
    for (const auto& spec : campaigns) {
      std::vector<std::string> parts;
      std::stringstream ss(spec);
      for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
      if (parts.size() != 4) throw UsageError("--campaign expects label:tests:minutes:variants, got '" + spec + "'");
      try {
        cs.push_back({parts[0], std::stoull(parts[1]), std::stod(parts[2]), std::stoull(parts[3])});
      } catch (const std::logic_error&) {
        throw UsageError("--campaign has a non-numeric field: '" + spec + "'");
      }
    }
    Table t{{"campaign", "minutes", "cumulative_minutes", "cumulative"}, {}};
    for (const auto& c : parallel::tester_time(cs)) {
      t.add_row({c.label, c.minutes, c.cumulative_minutes, parallel::hours_minutes(c.cumulative_minutes)});
    }
    result = std::move(t);
  });

  // oracle
  parallel::OracleBoundQuery oq;
  auto* oracle_cmd = app.add_subcommand("oracle", "Printouts to inspect when errors are directly visible");
  oracle_cmd->add_option("--population", oq.population)->required();
  oracle_cmd->add_option("--flawed", oq.flawed)->required();
  oracle_cmd->add_option("--confidence", oq.confidence)->capture_default_str();
  oracle_cmd->callback([&] {
    const auto b = parallel::oracle_min_samples(oq);
    result = Table{{"population", "flawed", "confidence", "samples", "miss_at_samples", "miss_at_previous"},
                   {{oq.population, oq.flawed, oq.confidence, b.samples, b.miss_at_samples, b.miss_at_previous}}};
  });

  // minimax
  MinimaxArgs ma;
  auto* mm_cmd = app.add_subcommand("minimax", "Training-sample lower bounds (whole grid when --r is omitted)");
  mm_cmd->add_option("--r", ma.r, "Altered-transaction fraction");
  mm_cmd->add_option("--confidence", ma.confidence)->capture_default_str();
  mm_cmd->add_option("--tests", ma.tests, "Test budget (omit for unlimited)");
  mm_cmd->add_option("--support", ma.support)->capture_default_str();
  mm_cmd->add_option("--beta", ma.beta, "Estimation-failure budget (finite --tests)");
  mm_cmd->add_option("--beta-policy", ma.beta_policy)
      ->check(CLI::IsMember({"maximize", "half"}))
      ->capture_default_str();
  mm_cmd->add_option("--zeta", ma.zeta)->capture_default_str();
  mm_cmd->add_option("--zeta-grid", ma.zeta_grid, "Maximize over this many log-spaced zeta values")
      ->capture_default_str();
  mm_cmd->add_option("--zeta-grid-lo", ma.zeta_lo)->capture_default_str();
  mm_cmd->callback([&] { result = run_minimax(ma); });

  // cardinality
  std::string preset_name;
  std::string config_path;
  auto* card_cmd = app.add_subcommand("cardinality", "Number of distinct voting transactions");
  auto* preset_opt = card_cmd->add_option("--preset", preset_name)->check(CLI::IsMember({"optimistic", "realistic"}));
  auto* config_opt = card_cmd->add_option("--config", config_path)->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  card_cmd->callback([&] {
    if (preset_name.empty() && config_path.empty()) throw UsageError("cardinality needs --preset or --config");
    const auto space = config_path.empty() ? txn::preset(preset_name) : txn::load_space_config(config_path).space;
    const auto n = txn::cardinality(space);
    result = Table{{"space", "attributes", "cardinality", "scientific"},
                   {{config_path.empty() ? preset_name : config_path, std::uint64_t{space.size()}, n.str(),
                     txn::scientific(n)}}};
  });

  // simulate
  std::vector<std::string> scenario_paths;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  unsigned workers = 1;
  std::optional<std::uint64_t> estimate_n;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo runs of scenario files");
  sim_cmd->add_option("--scenario", scenario_paths)->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", seed, "Override the scenario seed");
  sim_cmd->add_option("--trials", trials, "Override the scenario trial count");
  sim_cmd->add_option("--workers", workers, "Worker threads (0: all cores)")->capture_default_str();
  sim_cmd->add_option("--estimate-n", estimate_n,
                      "Run a plug-in estimation study with this training size instead");
  sim_cmd->callback([&] {
    if (estimate_n) {
      Table t{{"scenario", "seed", "trials", "n_train", "support", "mean_l1", "sd_l1", "min_l1", "max_l1",
               "lower_bound_zeta1"},
              {}};
      for (const auto& path : scenario_paths) {
        const auto s = sim::load_scenario(path);
        const std::uint64_t sd = seed.value_or(s.seed);
        const std::uint64_t tr = trials.value_or(s.trials);
        const auto e = sim::run_estimation_study(s.voter_dist, *estimate_n, tr, sd, {workers});
        t.add_row({s.name, sd, tr, e.n_train, e.support, e.mean_l1, e.sd_l1, e.min_l1, e.max_l1,
                   e.lower_bound_zeta1});
      }
      result = std::move(t);
      return;
    }
    std::vector<sim::SimReport> reports;
    for (const auto& path : scenario_paths) {
      auto s = sim::load_scenario(path);
      if (seed) s.seed = *seed;
      if (trials) s.trials = *trials;
      reports.push_back(sim::run_scenario(s, {workers}));
    }
    result = sim_table(reports);
  });

  // feasibility
  std::string data_path;
  std::vector<std::uint64_t> thresholds{30000, 43000};
  PassiveArgs fa;
  bool per_jurisdiction = false;
  auto* feas_cmd = app.add_subcommand("feasibility", "Turnout summaries and passive-testing feasibility");
  feas_cmd->add_option("--data", data_path, "CSV with state,jurisdiction,turnout")->required()->check(CLI::ExistingFile);
  feas_cmd->add_option("--threshold", thresholds, "Turnout thresholds to summarize")->capture_default_str();
  add_design_flags(feas_cmd, fa, false);
  feas_cmd->add_flag("--per-jurisdiction", per_jurisdiction, "List every jurisdiction's feasibility");
  feas_cmd->callback([&] {
    const auto records = feasibility::load_turnout(data_path);
    const std::size_t design_flags = feas_cmd->count("--margin") + feas_cmd->count("--detect-rate") +
                                     feas_cmd->count("--base-rate");
    if (design_flags != 0 && design_flags != 3) {
      throw UsageError("a feasibility join needs all of --margin, --detect-rate and --base-rate");
    }
    std::optional<feasibility::FeasibilityJoin> join;
    if (design_flags == 3) join = feasibility::passive_feasibility_join(records, fa.design());

    if (per_jurisdiction) {
      if (!join) throw UsageError("--per-jurisdiction needs a design (--margin, --detect-rate, --base-rate)");
      Table t{{"state", "jurisdiction", "turnout", "feasible"}, {}};
      for (const auto& row : join->rows) {
        t.add_row({row.record.state, row.record.jurisdiction, row.record.turnout, row.feasible});
      }
      result = std::move(t);
      return;
    }
    const auto s = feasibility::summarize(records, thresholds);
    Table t{{"measure", "voters", "jurisdictions", "fraction", "states", "states_fraction"}, {}};
    t.add_row({std::string("total"), {}, std::uint64_t{s.jurisdictions}, 1.0, std::uint64_t{s.states}, 1.0});
    t.add_row({std::string("median_turnout"), s.median_turnout, {}, {}, {}, {}});
    for (const auto& th : s.thresholds) {
      t.add_row({std::string("below_threshold"), th.threshold, std::uint64_t{th.below}, th.fraction_below,
                 std::uint64_t{th.states_majority_below}, th.fraction_states_majority_below});
    }
    if (join) {
      t.add_row({std::string("infeasible_passive"), join->required_voters, std::uint64_t{join->infeasible},
                 join->fraction_infeasible, std::uint64_t{join->states_majority_infeasible},
                 join->fraction_states_majority_infeasible});
    }
    result = std::move(t);
  });

  // repro
  auto* repro_cmd = app.add_subcommand("repro", "Regenerate every published quantity with a pass/fail manifest");
  repro_cmd->callback([&] {
    const auto rows = build_manifest();
    result = manifest_table(rows);
    if (!manifest_ok(rows)) status = kExitDomain;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (result) write_table(out, *result, parse_format(format));
  return status;
}

}  // namespace bmdlimits::cli
