#include "ambig/stats.hpp"

#include <algorithm>
#include <unordered_set>

#include "ambig/similarity.hpp"

namespace ambig {
namespace {

// Standard English stopword list with the wh-words kept as content; matches
// tokenizer output (lowercase, no apostrophes).
const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "youre", "youve",
      "youll", "youd", "your", "yours", "yourself", "yourselves", "he", "him", "his",
      "himself", "she", "shes", "her", "hers", "herself", "it", "its", "itself", "they",
      "them", "their", "theirs", "themselves", "this", "that", "thatll", "these", "those",
      "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
      "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
      "because", "as", "until", "while", "of", "at", "by", "for", "with", "about",
      "against", "between", "into", "through", "during", "before", "after", "above",
      "below", "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
      "again", "further", "then", "once", "here", "there", "all", "any", "both", "each",
      "few", "more", "most", "other", "some", "such", "no", "nor", "not", "only", "own",
      "same", "so", "than", "too", "very", "can", "will", "just", "dont", "should",
      "shouldve", "now", "aint", "arent", "couldnt", "didnt", "doesnt", "hadnt", "hasnt",
      "havent", "isnt", "mightnt", "mustnt", "neednt", "shant", "shouldnt", "wasnt",
      "werent", "wont", "wouldnt",
  };
  return words;
}

bool is_wh_word(std::string_view token) {
  return token == "who" || token == "what" || token == "when" || token == "where" ||
         token == "which" || token == "why" || token == "how" || token == "whom" ||
         token == "whose";
}

bool all_digits(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

void count_bag_side(const std::map<std::string, int>& side, char sign, EditFrequencyTable& table) {
  for (const auto& [token, count] : side) {
    if (is_edit_stopword(token)) continue;
    table[sign + edit_class_token(token)] += count;
  }
}

}  // namespace

std::array<double, 4> QaCountHistogram::percent() const {
  std::array<double, 4> out{};
  if (total == 0) return out;
  for (std::size_t k = 0; k < buckets.size(); ++k)
    out[k] = 100.0 * static_cast<double>(buckets[k]) / static_cast<double>(total);
  return out;
}

QaCountHistogram qa_count_distribution(std::span<const AnnotatedExample> dataset) {
  QaCountHistogram histogram;
  for (const auto& example : dataset) {
    std::size_t count = 0;
    for (const auto& annotation : example.annotations) {
      const std::size_t pairs = annotation.pairs.size();
      if (count == 0 || pairs < count) count = pairs;
    }
    if (count == 0) continue;
    histogram.buckets[std::min<std::size_t>(count, 4) - 1] += 1;
    histogram.total += 1;
  }
  return histogram;
}

EditFrequencyTable edit_distribution(std::span<const AnnotatedExample> dataset) {
  EditFrequencyTable table;
  for (const auto& example : dataset) {
    for (const auto& annotation : example.annotations) {
      for (const auto& pair : annotation.pairs) {
        const EditBag bag = extract_edits(example.prompt, pair.question);
        count_bag_side(bag.added, '+', table);
        count_bag_side(bag.deleted, '-', table);
      }
    }
  }
  return table;
}

std::vector<std::pair<std::size_t, double>> coverage_curve(const EditFrequencyTable& table) {
  if (table.empty()) throw std::invalid_argument("coverage_curve: empty frequency table");
  std::vector<std::pair<std::string_view, std::int64_t>> entries(table.begin(), table.end());
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::int64_t total = 0;
  for (const auto& [token, count] : entries) total += count;

  std::vector<std::pair<std::size_t, double>> curve;
  curve.reserve(entries.size());
  std::int64_t running = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    running += entries[k].second;
    curve.emplace_back(k + 1, static_cast<double>(running) / static_cast<double>(total));
  }
  return curve;
}

bool is_edit_stopword(std::string_view token) {
  if (is_wh_word(token)) return false;
  return stopwords().count(token) > 0;
}

std::string edit_class_token(std::string_view token) {
  if (all_digits(token)) return "D" + std::to_string(token.size());
  return std::string(token);
}

}  // namespace ambig
