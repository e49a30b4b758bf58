#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cpml {

using TokenList = std::vector<std::string>;

/// Lowercase tokens excluded from the vocabulary.
class StopWordList {
public:
  StopWordList() = default;
  /// Throws if an entry is not lowercase or contains whitespace.
  explicit StopWordList(std::span<const std::string> terms);

  /// The built-in English function-word list (includes "the", "or", "and").
  static StopWordList english();

  /// Adds more terms; same validation as the constructor.
  void extend(std::span<const std::string> terms);
  bool contains(std::string_view term) const { return terms_.find(std::string(term)) != terms_.end(); }
  const std::set<std::string>& terms() const { return terms_; }

private:
  std::set<std::string> terms_;
};

/// Column space of a document-term matrix. Column order is descending corpus
/// frequency with lexicographic tie-break.
class Vocabulary {
public:
  static constexpr std::size_t kDefaultMaxFeatures = 3000;

  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::size_t max_features);

  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  std::size_t max_features() const { return max_features_; }
  std::optional<std::size_t> find(std::string_view term) const;

  /// One term per line, in column order.
  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in, std::size_t max_features = kDefaultMaxFeatures);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t max_features_ = kDefaultMaxFeatures;
};

/// Sparse counts; row i holds (column, count) pairs sorted by column.
struct DocumentTermMatrix {
  using Entry = std::pair<std::uint32_t, std::uint32_t>;

  std::vector<std::vector<Entry>> rows;
  Vocabulary vocabulary;
  std::vector<std::string> doc_ids;

  std::size_t n_docs() const { return rows.size(); }
  std::size_t n_terms() const { return vocabulary.size(); }
  std::uint32_t count(std::size_t doc, std::size_t term) const;
  Eigen::MatrixXd to_dense() const;
  /// Dense copy of the selected rows, in the given order.
  Eigen::MatrixXd to_dense(std::span<const std::size_t> row_indices) const;

  /// Sparse triplet CSV: doc_id,term_index,count (zero entries omitted).
  void write_triplets(std::ostream& out) const;
};

struct TermCount {
  std::string term;
  std::size_t document_frequency = 0;
  std::size_t total_count = 0;

  bool operator==(const TermCount&) const = default;
};

/// Replaces every run of CR/LF characters with a single space; an absent note
/// becomes " ". Nothing else is touched.
std::string clean_text(const std::optional<std::string>& raw);

/// Lowercased maximal runs of ASCII letters; anything else separates tokens.
/// Tokens shorter than two letters are dropped.
TokenList tokenize(std::string_view text);

/// Token frequency table ordered by total count desc, then term asc.
std::vector<TermCount> term_histogram(std::span<const TokenList> corpus);
void write_histogram(std::ostream& out, std::span<const TermCount> table);

/// Keeps the `max_features` most frequent non-stop tokens.
/// Throws when max_features is 0 or no non-stop token exists.
Vocabulary build_vocabulary(std::span<const TokenList> corpus, const StopWordList& stop_words,
                            std::size_t max_features = Vocabulary::kDefaultMaxFeatures);

/// Counts vocabulary terms per document; other tokens are ignored.
DocumentTermMatrix vectorize(std::span<const TokenList> corpus, const Vocabulary& vocabulary,
                             std::vector<std::string> doc_ids = {});

} // namespace cpml
