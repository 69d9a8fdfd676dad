#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ambig/data_model.hpp"
#include "ambig/similarity.hpp"

namespace ambig {

struct Assignment {
  double total = 0.0;
  std::vector<std::pair<int, int>> pairs;  // (row, column); zero-weight edges omitted
};

// Maximum-weight one-to-one matching between rows and columns. Entries must
// be finite. Among equally heavy matchings the result prefers the lowest
// (row, column) pairs. Throws std::invalid_argument on an empty or ragged
// matrix or non-finite entries.
Assignment max_weight_assignment(const std::vector<std::vector<double>>& weights);

struct MatchedPair {
  int prediction = 0;
  int reference = 0;
  double weight = 0.0;
};

struct ExampleScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<MatchedPair> assignment;
};

// Correctness-weighted F1 of one prediction against one reference annotation.
// Credit per matched pair is [answer correct] x question similarity; pairs
// are matched one-to-one so duplicated answers earn credit once.
ExampleScore score_example(const PredictedExample& prediction, const ReferenceAnnotation& reference,
                           SimilarityKind kind, std::string_view prompt);

// Best score across the example's accepted annotations; ties keep the
// earliest annotation. `chosen` (optional) receives the winning index.
ExampleScore score_against_annotations(const PredictedExample& prediction, const AnnotatedExample& example,
                                       SimilarityKind kind, std::size_t* chosen = nullptr);

struct AggregateOptions {
  bool ans = true;
  bool bleu = true;
  bool edit = true;
  unsigned threads = 0;  // 0 -> hardware concurrency
};

struct AggregateReport {
  double f1_ans_all = 0.0;
  double f1_ans_multi = 0.0;
  double f1_bleu = 0.0;
  double f1_edit = 0.0;
  std::size_t n_all = 0;
  std::size_t n_multi = 0;
  std::size_t n_missing = 0;
};

// Macro-averages per-example F1 over the whole dataset and over the multi
// subset (examples whose answer-selected annotation has >= 2 pairs). Gold ids
// without a prediction score 0 and are counted in n_missing; prediction ids
// absent from the dataset raise an error.
AggregateReport aggregate(std::span<const AnnotatedExample> dataset,
                          std::span<const PredictedExample> predictions,
                          const AggregateOptions& options = {});

// Answer-only F1 of one annotator's pairs read as a prediction (first surface
// form of each answer set) against another annotator's reference.
double pairwise_agreement(const ReferenceAnnotation& a, const ReferenceAnnotation& b,
                          std::string_view prompt);

// Machine report with reals at 4 decimal places; omits the f1 keys of
// disabled metrics.
std::string report_to_json(const AggregateReport& report, const AggregateOptions& options);

}  // namespace ambig
