#include "ambig/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ambig/format.hpp"
#include "ambig/text_norm.hpp"

namespace ambig {
namespace {

constexpr double kTieTolerance = 1e-9;

// Max total weight of a one-to-one matching between the listed rows and
// columns. O(n^3) assignment with potentials on the square zero-padded
// matrix.
double assignment_max_total(const std::vector<std::vector<double>>& weights,
                            const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.empty() || cols.empty()) return 0.0;
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(cols.size());
  const int n = std::max(nr, nc);
  const auto cost = [&](int i, int j) -> double {
    if (i < nr && j < nc) return -weights[rows[i]][cols[j]];
    return 0.0;
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  double total = 0.0;
  for (int j = 1; j <= nc; ++j) {
    const int i = match[j];
    if (i >= 1 && i <= nr) total += weights[rows[i - 1]][cols[j - 1]];
  }
  return total;
}

}  // namespace

Assignment max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  if (weights.empty() || weights.front().empty())
    throw std::invalid_argument("max_weight_assignment: need at least one row and one column");
  const std::size_t m = weights.size();
  const std::size_t n = weights.front().size();
  for (const auto& row : weights) {
    if (row.size() != n) throw std::invalid_argument("max_weight_assignment: ragged matrix");
    for (const double w : row)
      if (!std::isfinite(w)) throw std::invalid_argument("max_weight_assignment: non-finite weight");
  }

  std::vector<int> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  std::vector<int> all_rows(m);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  Assignment result;
  result.total = assignment_max_total(weights, all_rows, cols);

  // Fix pairs greedily in (row, column) order: keep (i, j) whenever some
  // optimal completion still reaches the remaining total. Zero-weight edges
  // stay unmatched.
  double remaining = result.total;
  for (int i = 0; i < static_cast<int>(m); ++i) {
    if (remaining <= kTieTolerance) break;
    std::vector<int> rows_after;
    for (int r = i + 1; r < static_cast<int>(m); ++r) rows_after.push_back(r);

    bool matched = false;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const int j = cols[c];
      if (weights[i][j] <= 0.0) continue;
      std::vector<int> rest_cols = cols;
      rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(c));
      const double rest = assignment_max_total(weights, rows_after, rest_cols);
      if (weights[i][j] + rest + kTieTolerance >= remaining) {
        result.pairs.emplace_back(i, j);
        cols = std::move(rest_cols);
        remaining = rest;
        matched = true;
        break;
      }
    }
    if (!matched) remaining = assignment_max_total(weights, rows_after, cols);
  }
  return result;
}

ExampleScore score_example(const PredictedExample& prediction, const ReferenceAnnotation& reference,
                           SimilarityKind kind, std::string_view prompt) {
  const std::size_t m = prediction.pairs.size();
  const std::size_t n = reference.pairs.size();
  if (m == 0 || n == 0)
    throw std::invalid_argument("score_example: empty prediction or reference");

  const std::string prompt_text(prompt);
  std::vector<std::string> predicted_norms;
  predicted_norms.reserve(m);
  for (const auto& pair : prediction.pairs) predicted_norms.push_back(normalize_answer(pair.answer));
  std::vector<std::vector<std::string>> gold_norms(n);
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& answer : reference.pairs[j].answers)
      gold_norms[j].push_back(normalize_answer(answer));

  std::vector<std::vector<double>> weights(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& pair = prediction.pairs[i];
    const std::string& question = pair.question ? *pair.question : prompt_text;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& forms = gold_norms[j];
      if (std::find(forms.begin(), forms.end(), predicted_norms[i]) == forms.end()) continue;
      weights[i][j] = similarity(kind, prompt, question, reference.pairs[j].question);
    }
  }

  const Assignment assignment = max_weight_assignment(weights);
  ExampleScore score;
  for (const auto& [i, j] : assignment.pairs)
    score.assignment.push_back({i, j, weights[i][j]});
  score.precision = assignment.total / static_cast<double>(m);
  score.recall = assignment.total / static_cast<double>(n);
  score.f1 = (score.precision + score.recall == 0.0)
                 ? 0.0
                 : 2.0 * score.precision * score.recall / (score.precision + score.recall);
  return score;
}

ExampleScore score_against_annotations(const PredictedExample& prediction, const AnnotatedExample& example,
                                       SimilarityKind kind, std::size_t* chosen) {
  if (example.annotations.empty())
    throw std::invalid_argument("score_against_annotations: example has no annotations");
  ExampleScore best;
  std::size_t best_index = 0;
  for (std::size_t k = 0; k < example.annotations.size(); ++k) {
    ExampleScore score = score_example(prediction, example.annotations[k], kind, example.prompt);
    if (k == 0 || score.f1 > best.f1) {
      best = std::move(score);
      best_index = k;
    }
  }
  if (chosen) *chosen = best_index;
  return best;
}

AggregateReport aggregate(std::span<const AnnotatedExample> dataset,
                          std::span<const PredictedExample> predictions,
                          const AggregateOptions& options) {
  std::unordered_set<std::string_view> dataset_ids;
  for (const auto& example : dataset) dataset_ids.insert(example.id);
  std::unordered_map<std::string_view, const PredictedExample*> by_id;
  for (const auto& prediction : predictions) {
    if (!dataset_ids.count(prediction.id))
      throw std::runtime_error("prediction id \"" + prediction.id + "\" not present in the dataset");
    by_id[prediction.id] = &prediction;
  }

  struct Row {
    double ans = 0.0, bleu = 0.0, edit = 0.0;
    bool multi = false;
    bool missing = false;
  };
  std::vector<Row> rows(dataset.size());

  const auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto& example = dataset[k];
      Row row;
      const auto it = by_id.find(example.id);
      if (it == by_id.end()) {
        row.missing = true;
        row.multi = example.annotations.front().pairs.size() >= 2;
      } else {
        const auto& prediction = *it->second;
        std::size_t chosen = 0;
        row.ans = score_against_annotations(prediction, example, SimilarityKind::kAnswer, &chosen).f1;
        row.multi = example.annotations[chosen].pairs.size() >= 2;
        if (options.bleu)
          row.bleu = score_against_annotations(prediction, example, SimilarityKind::kBleu).f1;
        if (options.edit)
          row.edit = score_against_annotations(prediction, example, SimilarityKind::kEditF1).f1;
      }
      rows[k] = row;
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(rows.size(), 1))));
  if (threads <= 1 || rows.size() < 2) {
    score_range(0, rows.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (rows.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(rows.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(score_range, begin, end);
    }
    for (auto& worker : pool) worker.join();
  }

  // reduce in index order so results are identical for any thread count
  AggregateReport report;
  report.n_all = rows.size();
  double sum_ans = 0.0, sum_ans_multi = 0.0, sum_bleu = 0.0, sum_edit = 0.0;
  for (const auto& row : rows) {
    if (row.missing) ++report.n_missing;
    if (row.multi) {
      ++report.n_multi;
      sum_ans_multi += row.ans;
    }
    sum_ans += row.ans;
    sum_bleu += row.bleu;
    sum_edit += row.edit;
  }
  if (report.n_all > 0) {
    report.f1_ans_all = sum_ans / static_cast<double>(report.n_all);
    report.f1_bleu = sum_bleu / static_cast<double>(report.n_all);
    report.f1_edit = sum_edit / static_cast<double>(report.n_all);
  }
  if (report.n_multi > 0)
    report.f1_ans_multi = sum_ans_multi / static_cast<double>(report.n_multi);
  return report;
}

double pairwise_agreement(const ReferenceAnnotation& a, const ReferenceAnnotation& b,
                          std::string_view prompt) {
  if (a.pairs.empty() || b.pairs.empty())
    throw std::invalid_argument("pairwise_agreement: empty annotation");
  PredictedExample as_prediction;
  as_prediction.id = "agreement";
  for (const auto& pair : a.pairs)
    as_prediction.pairs.push_back({pair.question, pair.answers.front()});
  return score_example(as_prediction, b, SimilarityKind::kAnswer, prompt).f1;
}

std::string report_to_json(const AggregateReport& report, const AggregateOptions& options) {
  std::string out = "{";
  if (options.ans) {
    out += "\"f1_ans\":{\"all\":" + fixed4(report.f1_ans_all) +
           ",\"multi\":" + fixed4(report.f1_ans_multi) + "},";
  }
  if (options.bleu) out += "\"f1_bleu\":" + fixed4(report.f1_bleu) + ",";
  if (options.edit) out += "\"f1_edit_f1\":" + fixed4(report.f1_edit) + ",";
  out += "\"n_all\":" + std::to_string(report.n_all) +
         ",\"n_multi\":" + std::to_string(report.n_multi) +
         ",\"n_missing\":" + std::to_string(report.n_missing) + "}";
  return out;
}

}  // namespace ambig
