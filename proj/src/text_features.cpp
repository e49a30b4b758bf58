#include "cpml/text_features.hpp"

#include "cpml/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

namespace cpml {

namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

void validate_stop_word(const std::string& term) {
  if (term.empty()) {
    throw Error("stop word list: empty entry");
  }
  for (char c : term) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      throw Error("stop word list: entry '" + term + "' contains whitespace");
    }
    if (c >= 'A' && c <= 'Z') {
      throw Error("stop word list: entry '" + term + "' is not lowercase");
    }
  }
}

// Ordering shared by the histogram and the vocabulary: count desc, term asc.
bool frequency_order(const TermCount& a, const TermCount& b) {
  if (a.total_count != b.total_count) {
    return a.total_count > b.total_count;
  }
  return a.term < b.term;
}

} // namespace

StopWordList::StopWordList(std::span<const std::string> terms) { extend(terms); }

void StopWordList::extend(std::span<const std::string> terms) {
  for (const auto& t : terms) {
    validate_stop_word(t);
    terms_.insert(t);
  }
}

StopWordList StopWordList::english() {
  static const std::vector<std::string> kTerms{
      "a",    "about", "after", "all",   "also",  "an",    "and",   "any",   "are",  "as",
      "at",   "be",    "been",  "but",   "by",    "can",   "could", "did",   "do",   "for",
      "from", "had",   "has",   "have",  "he",    "her",   "his",   "if",    "in",   "into",
      "is",   "it",    "its",   "may",   "of",    "on",    "or",    "she",   "so",   "than",
      "that", "the",   "their", "then",  "there", "these", "they",  "this",  "to",   "was",
      "were", "which", "will",  "with",  "would",
  };
  return StopWordList(kTerms);
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::size_t max_features)
    : terms_(std::move(terms)), max_features_(max_features) {
  if (terms_.size() > max_features_) {
    throw Error("vocabulary: " + std::to_string(terms_.size()) + " terms exceed max_features " +
                std::to_string(max_features_));
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) {
      throw Error("vocabulary: duplicate term '" + terms_[i] + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

void Vocabulary::write(std::ostream& out) const {
  for (const auto& t : terms_) {
    out << t << '\n';
  }
}

Vocabulary Vocabulary::read(std::istream& in, std::size_t max_features) {
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!line.empty()) {
      terms.push_back(line);
    }
  }
  const std::size_t cap = std::max(max_features, terms.size());
  return Vocabulary(std::move(terms), cap);
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  write(out);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path.string() + "' for reading");
  }
  return read(in);
}

std::uint32_t DocumentTermMatrix::count(std::size_t doc, std::size_t term) const {
  const auto& row = rows.at(doc);
  auto it = std::lower_bound(row.begin(), row.end(), Entry{static_cast<std::uint32_t>(term), 0},
                             [](const Entry& a, const Entry& b) { return a.first < b.first; });
  return (it != row.end() && it->first == term) ? it->second : 0;
}

Eigen::MatrixXd DocumentTermMatrix::to_dense() const {
  std::vector<std::size_t> all(rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = i;
  }
  return to_dense(all);
}

Eigen::MatrixXd DocumentTermMatrix::to_dense(std::span<const std::size_t> row_indices) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(row_indices.size()),
                                            static_cast<Eigen::Index>(n_terms()));
  for (std::size_t r = 0; r < row_indices.size(); ++r) {
    for (const auto& [col, cnt] : rows.at(row_indices[r])) {
      m(static_cast<Eigen::Index>(r), col) = cnt;
    }
  }
  return m;
}

void DocumentTermMatrix::write_triplets(std::ostream& out) const {
  out << "doc_id,term_index,count\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string id = i < doc_ids.size() ? doc_ids[i] : std::to_string(i);
    for (const auto& [col, cnt] : rows[i]) {
      out << id << ',' << col << ',' << cnt << '\n';
    }
  }
}

std::string clean_text(const std::optional<std::string>& raw) {
  if (!raw) {
    return " ";
  }
  std::string out;
  out.reserve(raw->size());
  bool in_break = false;
  for (char c : *raw) {
    if (c == '\n' || c == '\r') {
      if (!in_break) {
        out.push_back(' ');
      }
      in_break = true;
    } else {
      out.push_back(c);
      in_break = false;
    }
  }
  return out;
}

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (char c : text) {
    if (is_ascii_alpha(c)) {
      current.push_back(to_lower_ascii(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<TermCount> term_histogram(std::span<const TokenList> corpus) {
  std::map<std::string, TermCount> table;
  for (const auto& doc : corpus) {
    std::set<std::string_view> in_doc;
    for (const auto& tok : doc) {
      auto& entry = table[tok];
      entry.total_count += 1;
      if (in_doc.insert(tok).second) {
        entry.document_frequency += 1;
      }
    }
  }
  std::vector<TermCount> out;
  out.reserve(table.size());
  for (auto& [term, entry] : table) {
    entry.term = term;
    out.push_back(std::move(entry));
  }
  std::stable_sort(out.begin(), out.end(), frequency_order);
  return out;
}

void write_histogram(std::ostream& out, std::span<const TermCount> table) {
  out << "term,document_frequency,total_count\n";
  for (const auto& e : table) {
    out << e.term << ',' << e.document_frequency << ',' << e.total_count << '\n';
  }
}

Vocabulary build_vocabulary(std::span<const TokenList> corpus, const StopWordList& stop_words,
                            std::size_t max_features) {
  if (max_features == 0) {
    throw Error("build_vocabulary: max_features must be >= 1");
  }
  std::vector<std::string> terms;
  for (const auto& entry : term_histogram(corpus)) {
    if (terms.size() == max_features) {
      break;
    }
    if (!stop_words.contains(entry.term)) {
      terms.push_back(entry.term);
    }
  }
  if (terms.empty()) {
    throw Error("build_vocabulary: corpus has no tokens outside the stop-word list");
  }
  return Vocabulary(std::move(terms), max_features);
}

DocumentTermMatrix vectorize(std::span<const TokenList> corpus, const Vocabulary& vocabulary,
                             std::vector<std::string> doc_ids) {
  if (!doc_ids.empty() && doc_ids.size() != corpus.size()) {
    throw Error("vectorize: doc_ids length does not match corpus");
  }
  DocumentTermMatrix dtm;
  dtm.vocabulary = vocabulary;
  dtm.doc_ids = std::move(doc_ids);
  dtm.rows.reserve(corpus.size());
  for (const auto& doc : corpus) {
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& tok : doc) {
      if (auto col = vocabulary.find(tok)) {
        counts[static_cast<std::uint32_t>(*col)] += 1;
      }
    }
    dtm.rows.emplace_back(counts.begin(), counts.end());
  }
  return dtm;
}

} // namespace cpml
