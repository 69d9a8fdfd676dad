#include "ambig/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ambig/text_norm.hpp"

namespace ambig {
namespace {

std::map<std::string, int> token_counts(std::string_view text) {
  std::map<std::string, int> counts;
  for (auto& token : tokenize_question(text)) ++counts[token];
  return counts;
}

std::map<std::string, int> multiset_minus(const std::map<std::string, int>& a,
                                          const std::map<std::string, int>& b) {
  std::map<std::string, int> out;
  for (const auto& [token, count] : a) {
    const auto it = b.find(token);
    const int extra = count - (it == b.end() ? 0 : it->second);
    if (extra > 0) out.emplace(token, extra);
  }
  return out;
}

int overlap(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
  int total = 0;
  for (const auto& [token, count] : a) {
    const auto it = b.find(token);
    if (it != b.end()) total += std::min(count, it->second);
  }
  return total;
}

}  // namespace

int EditBag::size() const {
  int n = 0;
  for (const auto& [token, count] : added) n += count;
  for (const auto& [token, count] : deleted) n += count;
  return n;
}

EditBag extract_edits(std::string_view prompt, std::string_view question) {
  const auto prompt_counts = token_counts(prompt);
  const auto question_counts = token_counts(question);
  EditBag bag;
  bag.added = multiset_minus(question_counts, prompt_counts);
  bag.deleted = multiset_minus(prompt_counts, question_counts);
  return bag;
}

double edit_f1(const EditBag& predicted, const EditBag& gold) {
  if (predicted.empty() && gold.empty()) return 1.0;
  if (predicted.empty() || gold.empty()) return 0.0;
  const int shared = overlap(predicted.added, gold.added) + overlap(predicted.deleted, gold.deleted);
  const double precision = static_cast<double>(shared) / predicted.size();
  const double recall = static_cast<double>(shared) / gold.size();
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double sentence_bleu(std::span<const std::string> pred, std::span<const std::string> ref) {
  if (pred.empty() && ref.empty()) return 1.0;
  if (pred.empty() || ref.empty()) return 0.0;

  const std::size_t max_order = std::min<std::size_t>(4, pred.size());
  const auto ngram_counts = [](std::span<const std::string> tokens, std::size_t n) {
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        gram.push_back('\x1f');
        gram += tokens[i + k];
      }
      ++counts[gram];
    }
    return counts;
  };

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_order; ++n) {
    const auto pred_grams = ngram_counts(pred, n);
    const auto ref_grams = ngram_counts(ref, n);
    int clipped = 0;
    int total = 0;
    for (const auto& [gram, count] : pred_grams) {
      total += count;
      const auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) clipped += std::min(count, it->second);
    }
    double numerator = clipped;
    double denominator = total;
    if (n >= 2) {  // add-one smoothing for higher orders
      numerator += 1.0;
      denominator += 1.0;
    }
    if (numerator == 0.0) return 0.0;
    log_sum += std::log(numerator / denominator);
  }

  const double brevity = pred.size() < ref.size()
                             ? std::exp(1.0 - static_cast<double>(ref.size()) / pred.size())
                             : 1.0;
  return brevity * std::exp(log_sum / static_cast<double>(max_order));
}

double similarity(SimilarityKind kind, std::string_view prompt,
                  std::string_view predicted_question, std::string_view gold_question) {
  switch (kind) {
    case SimilarityKind::kAnswer:
      return 1.0;
    case SimilarityKind::kBleu: {
      const auto pred = tokenize_question(predicted_question);
      const auto gold = tokenize_question(gold_question);
      return sentence_bleu(pred, gold);
    }
    case SimilarityKind::kEditF1:
      return edit_f1(extract_edits(prompt, predicted_question),
                     extract_edits(prompt, gold_question));
  }
  return 0.0;
}

}  // namespace ambig
