#include "ambig/selection.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ambig/metrics.hpp"
#include "ambig/text_norm.hpp"

namespace ambig {
namespace {

std::vector<const Candidate*> by_descending_score(const CandidateSet& candidates) {
  std::vector<const Candidate*> sorted;
  sorted.reserve(candidates.candidates.size());
  for (const auto& candidate : candidates.candidates) sorted.push_back(&candidate);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Candidate* a, const Candidate* b) { return a->score > b->score; });
  return sorted;
}

double mean_f1_at(double gamma, std::span<const CandidateSet> dev,
                  const std::unordered_map<std::string_view, const AnnotatedExample*>& gold_by_id,
                  bool multi_mode) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& set : dev) {
    const AnnotatedExample& example = *gold_by_id.at(set.id);
    const auto answers = select_answers(set, {gamma, /*fallback_top1=*/false});
    double f1 = 0.0;
    bool multi = example.annotations.front().pairs.size() >= 2;
    if (!answers.empty()) {
      PredictedExample prediction;
      prediction.id = set.id;
      for (const auto& answer : answers) prediction.pairs.push_back({example.prompt, answer});
      std::size_t chosen = 0;
      f1 = score_against_annotations(prediction, example, SimilarityKind::kAnswer, &chosen).f1;
      multi = example.annotations[chosen].pairs.size() >= 2;
    }
    if (multi_mode && !multi) continue;
    sum += f1;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

std::vector<std::string> select_answers(const CandidateSet& candidates, const ThresholdConfig& config) {
  if (candidates.candidates.empty())
    throw std::invalid_argument("select_answers: empty candidate list");

  const auto sorted = by_descending_score(candidates);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const Candidate* candidate : sorted) {
    if (!(candidate->score > config.gamma)) continue;
    if (!seen.insert(normalize_answer(candidate->answer)).second) continue;
    out.push_back(candidate->answer);
  }
  if (out.empty() && config.fallback_top1) out.push_back(sorted.front()->answer);
  return out;
}

TuneResult tune_gamma(std::span<const CandidateSet> dev_candidates,
                      std::span<const AnnotatedExample> gold,
                      const TuneOptions& options) {
  if (dev_candidates.empty()) throw std::invalid_argument("tune_gamma: empty development set");

  std::unordered_map<std::string_view, const AnnotatedExample*> gold_by_id;
  for (const auto& example : gold) gold_by_id[example.id] = &example;
  for (const auto& set : dev_candidates) {
    if (!gold_by_id.count(set.id))
      throw std::runtime_error("candidate id \"" + set.id + "\" not present in the gold dataset");
  }

  std::set<double> scores;
  for (const auto& set : dev_candidates)
    for (const auto& candidate : set.candidates) scores.insert(candidate.score);

  std::vector<double> thresholds;
  thresholds.push_back(*scores.begin() - 1.0);
  for (auto it = scores.begin(); std::next(it) != scores.end(); ++it)
    thresholds.push_back((*it + *std::next(it)) / 2.0);
  thresholds.push_back(*scores.rbegin() + 1.0);

  // sweep in parallel, then reduce by (f1, gamma) lexicographic max
  std::vector<double> f1s(thresholds.size());
  const auto sweep = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      f1s[k] = mean_f1_at(thresholds[k], dev_candidates, gold_by_id, options.multi_mode);
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(thresholds.size())));
  if (threads <= 1) {
    sweep(0, thresholds.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (thresholds.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(thresholds.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(sweep, begin, end);
    }
    for (auto& worker : pool) worker.join();
  }

  TuneResult best{thresholds.front(), f1s.front()};
  for (std::size_t k = 1; k < thresholds.size(); ++k) {  // ascending: ties keep the largest gamma
    if (f1s[k] >= best.dev_f1_ans) best = {thresholds[k], f1s[k]};
  }
  return best;
}

}  // namespace ambig
