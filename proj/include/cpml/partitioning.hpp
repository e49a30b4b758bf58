#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cpml {

struct LabeledKey {
  std::string id;
  int label = 0;
};

/// Random train/validation partition. Both id lists keep dataset order.
struct Split {
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::uint64_t seed = 0;
  double train_fraction = 0.5;

  bool operator==(const Split&) const = default;
};

/// Split after prevalence adjustment. `moved_ids` are the training negatives
/// removed by downsampling; they are appended to `validation_ids`.
struct BalancedSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::vector<std::string> moved_ids;

  bool operator==(const BalancedSplit&) const = default;
};

/// Uniform random partition with |train| = round(train_fraction * n).
/// Requires 0 < train_fraction < 1, both classes present and non-empty sides.
Split split(std::span<const LabeledKey> records, double train_fraction, std::uint64_t seed);

/// Downsamples training negatives to the number of training positives.
/// No-op when negatives do not outnumber positives. Throws if the training
/// side has no positives.
BalancedSplit balance_training(const Split& split, const std::unordered_map<std::string, int>& labels,
                               std::uint64_t seed);

/// Manifest CSV: id,assignment with assignment in {train, validation}.
void write_manifest(std::ostream& out, const BalancedSplit& split);
BalancedSplit read_manifest(std::istream& in, const std::string& source);

} // namespace cpml
