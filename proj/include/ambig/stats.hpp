#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ambig/data_model.hpp"

namespace ambig {

// Distribution of answers-per-question over {1, 2, 3, 4+}. When an example
// has several accepted annotations the minimum pair count is used.
struct QaCountHistogram {
  std::array<std::size_t, 4> buckets{};  // 1, 2, 3, 4+
  std::size_t total = 0;
  std::array<double, 4> percent() const;
};

QaCountHistogram qa_count_distribution(std::span<const AnnotatedExample> dataset);

// Signed edit token -> count. Keys look like "+wrote", "-made", "+D4".
using EditFrequencyTable = std::map<std::string, std::int64_t>;

// Counts signed unigram edits between every disambiguated question and its
// prompt, across all annotations. Stopwords are dropped (wh-words kept) and
// all-digit tokens are grouped as Dk by digit count.
EditFrequencyTable edit_distribution(std::span<const AnnotatedExample> dataset);

// (k, fraction of all edit occurrences covered by the k most frequent edits),
// for k = 1..#distinct edits. Ties order by token string.
std::vector<std::pair<std::size_t, double>> coverage_curve(const EditFrequencyTable& table);

bool is_edit_stopword(std::string_view token);
std::string edit_class_token(std::string_view token);

}  // namespace ambig
