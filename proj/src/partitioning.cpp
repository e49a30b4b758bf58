#include "cpml/partitioning.hpp"

#include "cpml/csv.hpp"
#include "cpml/error.hpp"
#include "cpml/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace cpml {

Split split(std::span<const LabeledKey> records, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error("split: train_fraction must lie in (0, 1)");
  }
  std::size_t n_pos = 0;
  for (const auto& r : records) {
    if (r.label != 0 && r.label != 1) {
      throw Error("split: label of '" + r.id + "' is not 0/1");
    }
    n_pos += static_cast<std::size_t>(r.label);
  }
  if (n_pos == 0 || n_pos == records.size()) {
    throw Error("split: dataset must contain both classes");
  }

  const std::size_t n = records.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw Error("split: train fraction leaves one side empty for n = " + std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) {
    in_train[order[i]] = true;
  }

  Split out;
  out.seed = seed;
  out.train_fraction = train_fraction;
  out.train_ids.reserve(n_train);
  out.validation_ids.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? out.train_ids : out.validation_ids).push_back(records[i].id);
  }
  return out;
}

BalancedSplit balance_training(const Split& split, const std::unordered_map<std::string, int>& labels,
                               std::uint64_t seed) {
  auto label_of = [&](const std::string& id) {
    auto it = labels.find(id);
    if (it == labels.end()) {
      throw Error("balance_training: no label for id '" + id + "'");
    }
    return it->second;
  };

  std::vector<std::size_t> negatives; // positions within train_ids
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < split.train_ids.size(); ++i) {
    if (label_of(split.train_ids[i]) == 1) {
      ++n_pos;
    } else {
      negatives.push_back(i);
    }
  }
  if (n_pos == 0) {
    throw Error("balance_training: training set has no positive records");
  }

  BalancedSplit out;
  out.validation_ids = split.validation_ids;
  if (negatives.size() <= n_pos) {
    out.train_ids = split.train_ids;
    return out;
  }

  Rng rng(seed);
  rng.shuffle(negatives);
  std::vector<bool> drop(split.train_ids.size(), false);
  for (std::size_t k = n_pos; k < negatives.size(); ++k) {
    drop[negatives[k]] = true;
  }
  for (std::size_t i = 0; i < split.train_ids.size(); ++i) {
    (drop[i] ? out.moved_ids : out.train_ids).push_back(split.train_ids[i]);
  }
  out.validation_ids.insert(out.validation_ids.end(), out.moved_ids.begin(), out.moved_ids.end());
  return out;
}

void write_manifest(std::ostream& out, const BalancedSplit& split) {
  out << "id,assignment\n";
  for (const auto& id : split.train_ids) {
    out << csv::escape(id) << ",train\n";
  }
  for (const auto& id : split.validation_ids) {
    out << csv::escape(id) << ",validation\n";
  }
}

BalancedSplit read_manifest(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  csv::expect_header(reader, {"id", "assignment"});
  BalancedSplit out;
  csv::Row row;
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].value.empty()) {
      continue;
    }
    if (row.fields.size() != 2) {
      throw ParseError(source, row.line, "", "expected 2 fields");
    }
    const std::string& where = row.fields[1].value;
    if (where == "train") {
      out.train_ids.push_back(row.fields[0].value);
    } else if (where == "validation") {
      out.validation_ids.push_back(row.fields[0].value);
    } else {
      throw ParseError(source, row.line, "assignment", "unknown assignment '" + where + "'");
    }
  }
  return out;
}

} // namespace cpml
