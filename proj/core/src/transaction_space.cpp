#include "bmdlimits/transaction_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "bmdlimits/errors.hpp"
#include "config_json.hpp"

namespace bmdlimits::txn {
namespace {

constexpr double kMassTolerance = 1e-9;
constexpr std::uint64_t kDenseLimit = 10'000'000;

std::vector<double> cumulate(const std::vector<double>& weights) {
  std::vector<double> out(weights.size());
  std::partial_sum(weights.begin(), weights.end(), out.begin());
  return out;
}

void check_weights(const std::vector<double>& w, const std::string& what) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError(what + ": weights must be finite and non-negative");
    }
    total += x;
  }
  if (std::fabs(total - 1.0) > kMassTolerance) {
    throw DomainError(what + ": weights sum to " + std::to_string(total) + ", expected 1");
  }
}

void normalize(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
}

// Index i with cumulative[i-1] <= u < cumulative[i], skipping zero-weight
// entries; u is scaled by the last cumulative value to absorb rounding.
std::size_t pick(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace

TransactionSpace::TransactionSpace(std::vector<AttributeSpec> attributes)
    : attributes_(std::move(attributes)) {
  if (attributes_.empty()) throw DomainError("a transaction space needs at least one attribute");
  std::set<std::string> names;
  for (const auto& a : attributes_) {
    if (a.cardinality == 0) throw DomainError("attribute '" + a.name + "' has cardinality 0");
    if (!names.insert(a.name).second) {
      throw DomainError("duplicate attribute name '" + a.name + "'");
    }
  }
}

std::optional<std::size_t> TransactionSpace::find(const std::string& name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

bool TransactionSpace::contains(const Transaction& t) const {
  if (t.coordinates.size() != attributes_.size()) return false;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (t.coordinates[i] >= attributes_[i].cardinality) return false;
  }
  return true;
}

BigInt cardinality(const TransactionSpace& space) {
  BigInt product = 1;
  for (const auto& a : space.attributes()) product *= a.cardinality;
  return product;
}

std::string scientific(const BigInt& value, int digits) {
  std::string s = value.str();
  const int exponent = static_cast<int>(s.size()) - 1;
  if (static_cast<int>(s.size()) < digits) s.append(static_cast<std::size_t>(digits) - s.size(), '0');
  // Round to `digits` significant figures.
  std::string head = s.substr(0, static_cast<std::size_t>(digits));
  if (static_cast<int>(s.size()) > digits && s[static_cast<std::size_t>(digits)] >= '5') {
    BigInt rounded(head);
    rounded += 1;
    head = rounded.str();
  }
  const int exp_adj = exponent + (static_cast<int>(head.size()) > digits ? 1 : 0);
  head.resize(static_cast<std::size_t>(digits));
  std::string mantissa = head.substr(0, 1);
  if (digits > 1) mantissa += "." + head.substr(1);
  return mantissa + "e" + std::to_string(exp_adj);
}

TransactionSpace optimistic_preset() {
  return TransactionSpace({
      {"Contests", 3},
      {"Candidates per Contest", 2},
      {"Languages", 2},
      {"Time of day", 10},
      {"Number of previous voters", 5},
      {"Undervotes", 1ULL << 3},
      {"Changed selections", 1ULL << 3},
      {"Review", 2},
      {"Time per selection", 2},
      {"Font Size", 2},
      {"Audio Use", 2},
      {"Volume", 5},
      {"Inactivity warning", 2},
  });
}

TransactionSpace realistic_preset() {
  std::uint64_t five_pow_20 = 1;
  for (int i = 0; i < 20; ++i) five_pow_20 *= 5;
  return TransactionSpace({
      {"Contests", 20},
      {"Candidates per Contest", 4},
      {"Languages", 13},
      {"Time of day", 20},
      {"Number of previous voters", 10},
      {"Undervotes", 1ULL << 20},
      {"Changed selections", 1ULL << 20},
      {"Review", 2},
      {"Time per selection", five_pow_20},
      {"Contrast/saturation", 4},
      {"Font Size", 4},
      {"Audio Use", 2},
      {"Audio tempo", 4},
      {"Volume", 10},
      {"Audio pause", 1ULL << 20},
      {"Audio + video", 2},
      {"Inactivity warning", 1ULL << 20},
  });
}

TransactionSpace preset(const std::string& name) {
  if (name == "optimistic") return optimistic_preset();
  if (name == "realistic") return realistic_preset();
  throw DomainError("unknown preset '" + name + "' (expected optimistic or realistic)");
}

TransactionDistribution::TransactionDistribution(TransactionSpace space, FactoredForm form)
    : space_(std::move(space)), form_(std::move(form)) {
  auto& f = std::get<FactoredForm>(form_);
  if (f.weights.empty()) f.weights.resize(space_.size());
  if (f.weights.size() != space_.size()) {
    throw DomainError("factored distribution needs one weight vector per attribute");
  }
  for (std::size_t i = 0; i < space_.size(); ++i) {
    auto& w = f.weights[i];
    if (w.empty()) continue;
    const auto& attr = space_.attribute(i);
    if (w.size() != attr.cardinality) {
      throw DomainError("attribute '" + attr.name + "' has cardinality " +
                        std::to_string(attr.cardinality) + " but " + std::to_string(w.size()) +
                        " weights");
    }
    check_weights(w, "attribute '" + attr.name + "'");
    normalize(w);
  }
  build_tables();
}

TransactionDistribution::TransactionDistribution(TransactionSpace space, SparseForm form)
    : space_(std::move(space)), form_(std::move(form)) {
  auto& s = std::get<SparseForm>(form_);
  if (s.support.empty()) throw DomainError("sparse distribution has empty support");
  if (s.support.size() != s.weights.size()) {
    throw DomainError("sparse distribution: support and weights differ in length");
  }
  for (const auto& t : s.support) {
    if (!space_.contains(t)) throw DomainError("sparse support point lies outside the space");
  }
  check_weights(s.weights, "sparse distribution");
  normalize(s.weights);
  build_tables();
}

TransactionDistribution TransactionDistribution::uniform(TransactionSpace space) {
  return TransactionDistribution(std::move(space), FactoredForm{});
}

TransactionDistribution TransactionDistribution::point_mass(TransactionSpace space, Transaction t) {
  return TransactionDistribution(std::move(space), SparseForm{{std::move(t)}, {1.0}});
}

void TransactionDistribution::build_tables() {
  cumulative_.clear();
  if (const auto* f = factored()) {
    for (const auto& w : f->weights) cumulative_.push_back(w.empty() ? std::vector<double>{} : cumulate(w));
  } else {
    cumulative_.push_back(cumulate(sparse()->weights));
  }
}

double TransactionDistribution::probability(const Transaction& t) const {
  if (!space_.contains(t)) return 0.0;
  if (const auto* f = factored()) {
    double p = 1.0;
    for (std::size_t i = 0; i < space_.size(); ++i) {
      const auto& w = f->weights[i];
      p *= w.empty() ? 1.0 / static_cast<double>(space_.attribute(i).cardinality)
                     : w[t.coordinates[i]];
    }
    return p;
  }
  const auto& s = *sparse();
  double p = 0.0;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    if (s.support[i] == t) p += s.weights[i];
  }
  return p;
}

double TransactionDistribution::box_mass(
    const std::vector<std::vector<std::uint64_t>>& allowed) const {
  if (allowed.size() != space_.size()) {
    throw DomainError("box has " + std::to_string(allowed.size()) + " attribute sets, space has " +
                      std::to_string(space_.size()));
  }
  if (const auto* f = factored()) {
    double p = 1.0;
    for (std::size_t i = 0; i < space_.size(); ++i) {
      if (allowed[i].empty()) continue;
      const auto& w = f->weights[i];
      const auto card = space_.attribute(i).cardinality;
      double m = 0.0;
      for (auto v : std::set<std::uint64_t>(allowed[i].begin(), allowed[i].end())) {
        if (v < card) m += w.empty() ? 1.0 / static_cast<double>(card) : w[v];
      }
      p *= m;
    }
    return p;
  }
  const auto& s = *sparse();
  double p = 0.0;
  for (std::size_t j = 0; j < s.support.size(); ++j) {
    bool inside = true;
    for (std::size_t i = 0; i < space_.size() && inside; ++i) {
      if (allowed[i].empty()) continue;
      inside = std::find(allowed[i].begin(), allowed[i].end(), s.support[j].coordinates[i]) !=
               allowed[i].end();
    }
    if (inside) p += s.weights[j];
  }
  return p;
}

Transaction TransactionDistribution::sample(RngStream& rng) const {
  if (const auto* f = factored()) {
    Transaction t;
    t.coordinates.resize(space_.size());
    for (std::size_t i = 0; i < space_.size(); ++i) {
      t.coordinates[i] = f->weights[i].empty()
                             ? rng.uniform_index(space_.attribute(i).cardinality)
                             : pick(cumulative_[i], rng.uniform01());
    }
    return t;
  }
  return sparse()->support[pick(cumulative_.front(), rng.uniform01())];
}

TransactionDistribution estimate_from_counts(const TransactionSpace& space,
                                             const std::map<Transaction, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [t, c] : counts) total += c;
  if (total == 0) throw DomainError("cannot estimate a distribution from an empty sample");
  SparseForm form;
  for (const auto& [t, c] : counts) {
    if (!space.contains(t)) throw DomainError("training transaction lies outside the space");
    if (c == 0) continue;
    form.support.push_back(t);
    form.weights.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  return TransactionDistribution(space, std::move(form));
}

TransactionDistribution estimate(const TransactionSpace& space,
                                 const std::vector<Transaction>& training) {
  if (training.empty()) throw DomainError("cannot estimate a distribution from an empty sample");
  std::map<Transaction, std::uint64_t> counts;
  for (const auto& t : training) ++counts[t];
  return estimate_from_counts(space, counts);
}

namespace {

// p sparse, q anything: pointwise over supp(p) plus q's mass elsewhere.
double l1_sparse_vs(const TransactionDistribution& p, const TransactionDistribution& q) {
  std::map<Transaction, double> pm;
  for (std::size_t i = 0; i < p.sparse()->support.size(); ++i) {
    pm[p.sparse()->support[i]] += p.sparse()->weights[i];
  }
  double sum = 0.0;
  double q_inside = 0.0;
  for (const auto& [t, w] : pm) {
    const double qt = q.probability(t);
    q_inside += qt;
    sum += std::fabs(w - qt);
  }
  return sum + std::max(0.0, 1.0 - q_inside);
}

}  // namespace

double l1_distance(const TransactionDistribution& p, const TransactionDistribution& q) {
  if (!(p.space() == q.space())) throw DomainError("l1_distance: distributions over different spaces");
  if (p.is_sparse() && q.is_sparse()) {
    std::map<Transaction, std::pair<double, double>> both;
    for (std::size_t i = 0; i < p.sparse()->support.size(); ++i) {
      both[p.sparse()->support[i]].first += p.sparse()->weights[i];
    }
    for (std::size_t i = 0; i < q.sparse()->support.size(); ++i) {
      both[q.sparse()->support[i]].second += q.sparse()->weights[i];
    }
    double sum = 0.0;
    for (const auto& [t, w] : both) sum += std::fabs(w.first - w.second);
    return std::min(sum, 2.0);
  }
  if (p.is_sparse()) return std::min(l1_sparse_vs(p, q), 2.0);
  if (q.is_sparse()) return std::min(l1_sparse_vs(q, p), 2.0);

  if (cardinality(p.space()) > kDenseLimit) {
    throw DomainError("l1_distance between two factored distributions needs a space of at most 1e7 points");
  }
  const auto& space = p.space();
  Transaction t;
  t.coordinates.assign(space.size(), 0);
  double sum = 0.0;
  while (true) {
    sum += std::fabs(p.probability(t) - q.probability(t));
    std::size_t i = 0;
    for (; i < space.size(); ++i) {
      if (++t.coordinates[i] < space.attribute(i).cardinality) break;
      t.coordinates[i] = 0;
    }
    if (i == space.size()) break;
  }
  return std::min(sum, 2.0);
}

namespace detail {

SpaceConfig space_config_from_json(const nlohmann::json& j, const std::string& source) {
  try {
    std::optional<TransactionSpace> space;
    if (j.contains("preset")) {
      space = preset(j.at("preset").get<std::string>());
    } else if (j.contains("attributes")) {
      std::vector<AttributeSpec> attrs;
      for (const auto& a : j.at("attributes")) {
        attrs.push_back({a.at("name").get<std::string>(), a.at("cardinality").get<std::uint64_t>()});
      }
      space.emplace(std::move(attrs));
    } else {
      throw ParseError(source, 0, "expected a 'preset' or an 'attributes' entry");
    }

    SpaceConfig out{*space, std::nullopt};
    if (!j.contains("distribution")) return out;
    const auto& d = j.at("distribution");
    const auto type = d.at("type").get<std::string>();
    if (type == "uniform") {
      out.distribution = TransactionDistribution::uniform(*space);
    } else if (type == "factored") {
      FactoredForm form;
      form.weights.resize(space->size());
      for (const auto& [name, w] : d.at("weights").items()) {
        const auto idx = space->find(name);
        if (!idx) throw ParseError(source, 0, "weights given for unknown attribute '" + name + "'");
        form.weights[*idx] = w.get<std::vector<double>>();
      }
      out.distribution.emplace(*space, std::move(form));
    } else if (type == "sparse") {
      SparseForm form;
      for (const auto& pt : d.at("support")) {
        form.support.push_back({pt.get<std::vector<std::uint64_t>>()});
      }
      form.weights = d.at("weights").get<std::vector<double>>();
      out.distribution.emplace(*space, std::move(form));
    } else {
      throw ParseError(source, 0, "unknown distribution type '" + type + "'");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const DomainError& e) {
    throw ParseError(source, 0, e.what());
  }
}

}  // namespace detail

SpaceConfig parse_space_config(const std::string& json_text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  return detail::space_config_from_json(j, source);
}

SpaceConfig load_space_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_space_config(ss.str(), path.string());
}

}  // namespace bmdlimits::txn
