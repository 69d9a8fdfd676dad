#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

namespace ambig {

// Signed unigram edits of a question relative to its prompt, kept as two
// disjoint multisets. Built by multiset difference, so a token never appears
// on both sides.
struct EditBag {
  std::map<std::string, int> added;
  std::map<std::string, int> deleted;

  bool empty() const { return added.empty() && deleted.empty(); }
  int size() const;  // total count of signed items
  bool operator==(const EditBag&) const = default;
};

enum class SimilarityKind { kAnswer, kBleu, kEditF1 };

EditBag extract_edits(std::string_view prompt, std::string_view question);

// F1 overlap between two signed edit multisets. Two empty bags score 1 (a
// prediction that echoes the prompt against an unedited reference is a
// perfect disambiguation); exactly one empty bag scores 0.
double edit_f1(const EditBag& predicted, const EditBag& gold);

// Sentence-level BLEU: modified n-gram precisions for n = 1..min(4, |pred|)
// with uniform weights, add-one smoothing on numerator and denominator for
// n >= 2, and the standard brevity penalty when the prediction is shorter.
double sentence_bleu(std::span<const std::string> pred, std::span<const std::string> ref);

// Question-similarity term of the correctness score. kAnswer ignores the
// questions and yields 1.
double similarity(SimilarityKind kind, std::string_view prompt,
                  std::string_view predicted_question, std::string_view gold_question);

}  // namespace ambig
