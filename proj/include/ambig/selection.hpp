#pragma once

#include <span>
#include <string>
#include <vector>

#include "ambig/data_model.hpp"

namespace ambig {

struct ThresholdConfig {
  double gamma = 0.0;
  bool fallback_top1 = true;  // emit the best candidate when nothing clears gamma
};

// Keeps candidates with score > gamma (strict), merges candidates that
// normalize to the same answer keeping the highest-scored surface form, and
// orders by descending score.
std::vector<std::string> select_answers(const CandidateSet& candidates, const ThresholdConfig& config);

struct TuneOptions {
  bool multi_mode = false;  // tune on the multi subset instead of all examples
  unsigned threads = 0;     // sweep workers; 0 -> hardware concurrency
};

struct TuneResult {
  double gamma = 0.0;
  double dev_f1_ans = 0.0;
};

// Sweeps gamma over midpoints between consecutive distinct scores (plus one
// value below the minimum and one above the maximum) and returns the gamma
// maximizing macro answer F1, ties toward the largest gamma. The sweep scores
// raw thresholding: no top-1 fallback, an empty selection counts as F1 = 0.
TuneResult tune_gamma(std::span<const CandidateSet> dev_candidates,
                      std::span<const AnnotatedExample> gold,
                      const TuneOptions& options = {});

}  // namespace ambig
