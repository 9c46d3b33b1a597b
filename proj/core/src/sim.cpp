#include "bmdlimits/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "bmdlimits/errors.hpp"
#include "bmdlimits/minimax.hpp"
#include "bmdlimits/rng.hpp"
#include "bmdlimits/stats.hpp"
#include "config_json.hpp"

namespace bmdlimits::sim {
namespace {

constexpr std::uint64_t kTestTag = 1;
constexpr std::uint64_t kVoterTag = 2;

template <class Fn>
void for_each_trial(std::uint64_t trials, unsigned workers, Fn fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));
  std::atomic<std::uint64_t> next{0};
  const auto work = [&] {
    for (std::uint64_t i = next++; i < trials; i = next++) fn(i);
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
}

double mass_under_uniform(const txn::TransactionSpace& space, const AttributeBox& box) {
  return txn::TransactionDistribution::uniform(space).box_mass(box);
}

// Number of voters Mallory alters in one replication.
std::uint64_t draw_altered(RngStream& rng, const SimScenario& s, double voter_mass) {
  const std::uint64_t triggered = rng.binomial(s.n_voters, voter_mass);
  if (s.mallory.exact_count) {
    return static_cast<std::uint64_t>(std::floor(s.mallory.flip_prob * static_cast<double>(triggered)));
  }
  return rng.binomial(triggered, s.mallory.flip_prob);
}

Estimate mean_estimate(const std::vector<double>& xs) {
  Estimate e;
  e.trials = xs.size();
  if (xs.empty()) return e;
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.value = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.value) * (x - e.value);
    e.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return e;
}

}  // namespace

bool matches(const AttributeBox& box, const txn::Transaction& t) {
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (box[i].empty()) continue;
    if (std::find(box[i].begin(), box[i].end(), t.coordinates.at(i)) == box[i].end()) return false;
  }
  return true;
}

void validate(const SimScenario& s) {
  const auto& space = s.voter_dist.space();
  if (s.trials == 0) throw DomainError("trials must be at least 1");
  if (s.mallory.trigger.size() != space.size()) {
    throw DomainError("trigger has " + std::to_string(s.mallory.trigger.size()) +
                      " attribute sets, space has " + std::to_string(space.size()));
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (auto v : s.mallory.trigger[i]) {
      if (v >= space.attribute(i).cardinality) {
        throw DomainError("trigger value " + std::to_string(v) + " out of range for attribute '" +
                          space.attribute(i).name + "'");
      }
    }
  }
  if (!(s.mallory.flip_prob >= 0.0 && s.mallory.flip_prob <= 1.0)) {
    throw DomainError("flip probability must lie in [0, 1]");
  }
  if (s.pat) {
    if (s.pat->mode == PatMode::kDistribution) {
      if (!s.pat->distribution) throw DomainError("distribution mode needs a test distribution");
      if (!(s.pat->distribution->space() == space)) {
        throw DomainError("test distribution lives on a different space");
      }
    }
    if (s.pat->mode == PatMode::kScript) {
      for (const auto& t : s.pat->script) {
        if (!space.contains(t)) throw DomainError("script transaction outside the space");
      }
    }
  }
  if (s.passive) {
    if (!(s.passive->base_rate > 0.0 && s.passive->base_rate < 1.0)) {
      throw DomainError("base rate must lie in (0, 1)");
    }
    if (!(s.passive->detect_rate >= 0.0 && s.passive->detect_rate <= 1.0)) {
      throw DomainError("detection rate must lie in [0, 1]");
    }
    if (s.passive->alarm_threshold == 0) throw DomainError("alarm threshold must be at least 1");
    if (s.n_voters == 0) throw DomainError("passive runs need a positive voter count");
  }
}

Estimate proportion(std::uint64_t successes, std::uint64_t trials) {
  Estimate e;
  e.trials = trials;
  if (trials == 0) return e;
  e.value = static_cast<double>(successes) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
  return e;
}

SimReport run_parallel_sim(const SimScenario& s, const SimOptions& opt) {
  validate(s);
  if (!s.pat) throw DomainError("scenario has no test strategy");
  const PatStrategy& pat = *s.pat;
  const auto& space = s.voter_dist.space();
  const auto& box = s.mallory.trigger;
  const double q = s.mallory.flip_prob;

  ParallelReport rep;
  rep.trigger_mass_voters = s.voter_dist.box_mass(box);
  std::uint64_t script_hits = 0;
  switch (pat.mode) {
    case PatMode::kUniform:
      rep.trigger_mass_pat = mass_under_uniform(space, box);
      rep.tests = pat.test_count;
      break;
    case PatMode::kDistribution:
      rep.trigger_mass_pat = pat.distribution->box_mass(box);
      rep.tests = pat.test_count;
      break;
    case PatMode::kScript:
      for (const auto& t : pat.script) script_hits += matches(box, t) ? 1 : 0;
      rep.tests = pat.script.size();
      rep.trigger_mass_pat =
          rep.tests == 0 ? 0.0 : static_cast<double>(script_hits) / static_cast<double>(rep.tests);
      break;
  }
  if (!s.mallory.exact_count) {
    const double miss_per_test = pat.mode == PatMode::kScript ? 1.0 - q : 1.0 - rep.trigger_mass_pat * q;
    const std::uint64_t exposures = pat.mode == PatMode::kScript ? script_hits : rep.tests;
    rep.analytic_detection = 1.0 - std::pow(miss_per_test, static_cast<double>(exposures));
  }

  // Uniform tests only need the coordinates the trigger looks at.
  std::vector<std::size_t> constrained;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!box[i].empty()) constrained.push_back(i);
  }

  std::vector<std::uint8_t> detected(s.trials, 0);
  std::vector<double> altered(s.trials, 0.0);
  for_each_trial(s.trials, opt.workers, [&](std::uint64_t trial) {
    RngStream rng(s.seed, trial, kTestTag);
    std::uint64_t triggered = 0;
    bool caught = false;
    const auto on_test = [&](const txn::Transaction& t) {
      if (!matches(box, t)) return;
      ++triggered;
      if (!s.mallory.exact_count && rng.bernoulli(q)) caught = true;
    };
    if (pat.mode == PatMode::kUniform) {
      txn::Transaction t;
      t.coordinates.assign(space.size(), 0);
      for (std::uint64_t i = 0; i < pat.test_count && !caught; ++i) {
        for (auto a : constrained) t.coordinates[a] = rng.uniform_index(space.attribute(a).cardinality);
        on_test(t);
      }
    } else if (pat.mode == PatMode::kDistribution) {
      for (std::uint64_t i = 0; i < pat.test_count && !caught; ++i) on_test(pat.distribution->sample(rng));
    } else {
      for (const auto& t : pat.script) {
        if (caught) break;
        on_test(t);
      }
    }
    if (s.mallory.exact_count) caught = std::floor(q * static_cast<double>(triggered)) >= 1.0;
    detected[trial] = caught ? 1 : 0;

    if (s.n_voters > 0) {
      RngStream vr(s.seed, trial, kVoterTag);
      altered[trial] = static_cast<double>(draw_altered(vr, s, rep.trigger_mass_voters)) /
                       static_cast<double>(s.n_voters);
    }
  });

  std::uint64_t hits = 0;
  for (auto d : detected) hits += d;
  rep.detection = proportion(hits, s.trials);
  rep.altered_fraction = mean_estimate(altered);

  SimReport out;
  out.scenario = s.name;
  out.seed = s.seed;
  out.trials = s.trials;
  out.parallel = rep;
  return out;
}

SimReport run_passive_sim(const SimScenario& s, const SimOptions& opt) {
  validate(s);
  if (!s.passive) throw DomainError("scenario has no passive parameters");
  const PassiveParams& pp = *s.passive;
  const double voter_mass = s.voter_dist.box_mass(s.mallory.trigger);
  const double n = static_cast<double>(s.n_voters);
  const std::uint64_t k = pp.alarm_threshold;

  PassiveReport rep;
  rep.alarm_threshold = k;
  const double attack_rate = voter_mass * s.mallory.flip_prob * pp.detect_rate;
  rep.analytic_fp = stats::poisson_sf({n * pp.base_rate}, k);
  rep.analytic_fn =
      stats::poisson_cdf({n * (pp.base_rate + attack_rate)}, static_cast<std::int64_t>(k) - 1);

  std::vector<std::uint8_t> false_alarm(s.trials, 0);
  std::vector<std::uint8_t> missed(s.trials, 0);
  std::vector<double> altered(s.trials, 0.0);
  for_each_trial(s.trials, opt.workers, [&](std::uint64_t trial) {
    RngStream rng(s.seed, trial, kVoterTag);
    const std::uint64_t benign = rng.binomial(s.n_voters, pp.base_rate);
    false_alarm[trial] = benign >= k ? 1 : 0;

    const std::uint64_t hit = draw_altered(rng, s, voter_mass);
    const std::uint64_t spoils = rng.binomial(s.n_voters, pp.base_rate) + rng.binomial(hit, pp.detect_rate);
    missed[trial] = spoils < k ? 1 : 0;
    altered[trial] = static_cast<double>(hit) / n;
  });

  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  for (std::uint64_t i = 0; i < s.trials; ++i) {
    fp += false_alarm[i];
    fn += missed[i];
  }
  rep.fp = proportion(fp, s.trials);
  rep.fn = proportion(fn, s.trials);
  rep.altered_fraction = mean_estimate(altered);

  SimReport out;
  out.scenario = s.name;
  out.seed = s.seed;
  out.trials = s.trials;
  out.passive = rep;
  return out;
}

SimReport run_scenario(const SimScenario& s, const SimOptions& opt) {
  if (!s.pat && !s.passive) throw DomainError("scenario configures neither tests nor passive monitoring");
  SimReport out;
  if (s.pat) out = run_parallel_sim(s, opt);
  if (s.passive) {
    SimReport p = run_passive_sim(s, opt);
    if (!out.parallel) return p;
    out.passive = p.passive;
  }
  return out;
}

EstimationReport run_estimation_study(const txn::TransactionDistribution& truth,
                                      std::uint64_t n_train, std::uint64_t trials,
                                      std::uint64_t seed, const SimOptions& opt) {
  if (n_train == 0) throw DomainError("training sample size must be positive");
  if (trials == 0) throw DomainError("trials must be at least 1");
  EstimationReport rep;
  rep.n_train = n_train;
  rep.trials = trials;
  rep.per_trial.assign(trials, 0.0);
  const auto& space = truth.space();
  for_each_trial(trials, opt.workers, [&](std::uint64_t trial) {
    RngStream rng(seed, trial, kEstimationTag);
    std::map<txn::Transaction, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < n_train; ++i) ++counts[truth.sample(rng)];
    rep.per_trial[trial] = txn::l1_distance(txn::estimate_from_counts(space, counts), truth);
  });

  double sum = 0.0;
  rep.min_l1 = rep.per_trial.front();
  rep.max_l1 = rep.per_trial.front();
  for (double x : rep.per_trial) {
    sum += x;
    rep.min_l1 = std::min(rep.min_l1, x);
    rep.max_l1 = std::max(rep.max_l1, x);
  }
  rep.mean_l1 = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double x : rep.per_trial) ss += (x - rep.mean_l1) * (x - rep.mean_l1);
    rep.sd_l1 = std::sqrt(ss / static_cast<double>(trials - 1));
  }
  rep.support = txn::cardinality(space).convert_to<double>();
  rep.lower_bound_zeta1 = minimax::hjw_lower_bound(static_cast<double>(n_train), rep.support, 1.0);
  return rep;
}

SimScenario parse_scenario(const std::string& json_text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  try {
    const auto& space_json = j.at("space");
    txn::SpaceConfig cfg = txn::detail::space_config_from_json(space_json, source);
    const txn::TransactionSpace& space = cfg.space;

    MalloryStrategy mallory;
    mallory.trigger.assign(space.size(), {});
    if (j.contains("mallory")) {
      const auto& m = j.at("mallory");
      if (m.contains("trigger")) {
        for (const auto& [name, values] : m.at("trigger").items()) {
          const auto idx = space.find(name);
          if (!idx) throw ParseError(source, 0, "trigger names unknown attribute '" + name + "'");
          mallory.trigger[*idx] = values.get<std::vector<std::uint64_t>>();
          if (mallory.trigger[*idx].empty()) {
            throw ParseError(source, 0, "trigger for '" + name + "' allows no values");
          }
        }
      }
      mallory.flip_prob = m.value("flip_prob", 0.0);
      mallory.label = m.value("label", std::string{});
      mallory.exact_count = m.value("exact_count", false);
    }

    std::optional<PatStrategy> pat;
    if (j.contains("pat")) {
      const auto& p = j.at("pat");
      PatStrategy ps;
      const auto mode = p.value("mode", std::string{"uniform"});
      ps.test_count = p.value("tests", std::uint64_t{0});
      if (mode == "uniform") {
        ps.mode = PatMode::kUniform;
      } else if (mode == "distribution") {
        ps.mode = PatMode::kDistribution;
        if (p.contains("distribution")) {
          nlohmann::json merged = space_json;
          merged["distribution"] = p.at("distribution");
          ps.distribution = txn::detail::space_config_from_json(merged, source).distribution;
        } else {
          ps.distribution = cfg.distribution ? *cfg.distribution
                                             : txn::TransactionDistribution::uniform(space);
        }
      } else if (mode == "script") {
        ps.mode = PatMode::kScript;
        for (const auto& pt : p.at("script")) ps.script.push_back({pt.get<std::vector<std::uint64_t>>()});
      } else {
        throw ParseError(source, 0, "unknown test mode '" + mode + "'");
      }
      pat = std::move(ps);
    }

    std::optional<PassiveParams> passive;
    if (j.contains("passive")) {
      const auto& p = j.at("passive");
      passive = PassiveParams{p.at("detect_rate").get<double>(), p.at("base_rate").get<double>(),
                              p.at("alarm_threshold").get<std::uint64_t>()};
    }

    SimScenario s{
        .name = j.value("name", std::string{}),
        .voter_dist = cfg.distribution ? *cfg.distribution : txn::TransactionDistribution::uniform(space),
        .n_voters = j.value("n_voters", std::uint64_t{0}),
        .mallory = std::move(mallory),
        .pat = std::move(pat),
        .passive = passive,
        .trials = j.value("trials", std::uint64_t{1}),
        .seed = j.value("seed", std::uint64_t{0}),
    };
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const DomainError& e) {
    throw ParseError(source, 0, e.what());
  }
}

SimScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

}  // namespace bmdlimits::sim
