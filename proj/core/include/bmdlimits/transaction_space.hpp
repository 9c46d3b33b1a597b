#pragma once

// The factored space of voting transactions: every transaction is one value
// per attribute (language, time of day, font size, ...). Spaces and
// distributions are immutable once built; sampling takes an explicit stream.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bmdlimits/rng.hpp"

namespace bmdlimits::txn {

using BigInt = boost::multiprecision::cpp_int;

struct AttributeSpec {
  std::string name;
  std::uint64_t cardinality = 1;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

struct Transaction {
  std::vector<std::uint64_t> coordinates;

  friend auto operator<=>(const Transaction&, const Transaction&) = default;
};

class TransactionSpace {
 public:
  // Throws DomainError on an empty attribute list, a zero cardinality or a
  // repeated name.
  explicit TransactionSpace(std::vector<AttributeSpec> attributes);

  const std::vector<AttributeSpec>& attributes() const noexcept { return attributes_; }
  std::size_t size() const noexcept { return attributes_.size(); }
  const AttributeSpec& attribute(std::size_t i) const { return attributes_.at(i); }

  // Index of the attribute with this name, if any.
  std::optional<std::size_t> find(const std::string& name) const;

  bool contains(const Transaction& t) const;

  friend bool operator==(const TransactionSpace&, const TransactionSpace&) = default;

 private:
  std::vector<AttributeSpec> attributes_;
};

// Exact product of all attribute cardinalities.
BigInt cardinality(const TransactionSpace& space);

// Base-10 exponent and 3-significant-figure mantissa, e.g. "1.23e47".
std::string scientific(const BigInt& value, int digits = 3);

// Built-in configurations, one per column of the transaction-parameter table.
// The optimistic space omits rows with no optimistic value.
TransactionSpace optimistic_preset();
TransactionSpace realistic_preset();
// Looks up "optimistic" or "realistic"; throws DomainError otherwise.
TransactionSpace preset(const std::string& name);

// Per-attribute independent categorical weights. An empty weight vector
// means uniform over that attribute.
struct FactoredForm {
  std::vector<std::vector<double>> weights;
};

// Explicit support points with weights.
struct SparseForm {
  std::vector<Transaction> support;
  std::vector<double> weights;
};

class TransactionDistribution {
 public:
  // Validates weights (non-negative, total mass 1 within 1e-9) and support
  // membership; normalizes away the residual rounding.
  TransactionDistribution(TransactionSpace space, FactoredForm form);
  TransactionDistribution(TransactionSpace space, SparseForm form);

  static TransactionDistribution uniform(TransactionSpace space);
  static TransactionDistribution point_mass(TransactionSpace space, Transaction t);

  const TransactionSpace& space() const noexcept { return space_; }
  bool is_sparse() const noexcept { return std::holds_alternative<SparseForm>(form_); }
  const FactoredForm* factored() const noexcept { return std::get_if<FactoredForm>(&form_); }
  const SparseForm* sparse() const noexcept { return std::get_if<SparseForm>(&form_); }

  // Probability of a single transaction.
  double probability(const Transaction& t) const;

  // Probability of the attribute-wise box: allowed[i] empty means any value.
  double box_mass(const std::vector<std::vector<std::uint64_t>>& allowed) const;

  Transaction sample(RngStream& rng) const;

 private:
  void build_tables();

  TransactionSpace space_;
  std::variant<FactoredForm, SparseForm> form_;
  // Cumulative weights per attribute (factored) or over the support (sparse).
  std::vector<std::vector<double>> cumulative_;
};

// Plug-in estimate: the empirical distribution over the observed points,
// ordered lexicographically. Throws DomainError on an empty sample or a
// transaction outside the space.
TransactionDistribution estimate(const TransactionSpace& space,
                                 const std::vector<Transaction>& training);
TransactionDistribution estimate_from_counts(const TransactionSpace& space,
                                             const std::map<Transaction, std::uint64_t>& counts);

// Sum over the union of supports of |p(x) - q(x)|. Two factored
// distributions are compared by enumeration, allowed only when the space has
// at most 10^7 points.
double l1_distance(const TransactionDistribution& p, const TransactionDistribution& q);

// Declarative configuration (JSON):
//   {"preset": "optimistic"}  or
//   {"attributes": [{"name": "Languages", "cardinality": 13}, ...],
//    "distribution": {"type": "uniform"}
//                  | {"type": "factored", "weights": {"Languages": [..], ...}}
//                  | {"type": "sparse", "support": [[0,1,..], ...], "weights": [..]}}
struct SpaceConfig {
  TransactionSpace space;
  std::optional<TransactionDistribution> distribution;
};

// Malformed or inconsistent content raises ParseError.
SpaceConfig parse_space_config(const std::string& json_text, const std::string& source = "<config>");
SpaceConfig load_space_config(const std::filesystem::path& path);

}  // namespace bmdlimits::txn
