#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ambig/cotrain.hpp"
#include "ambig/data_model.hpp"
#include "ambig/format.hpp"
#include "ambig/metrics.hpp"
#include "ambig/selection.hpp"
#include "ambig/stats.hpp"

namespace {

using ambig::fixed4;
using json = nlohmann::ordered_json;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + out_path);
  out << text << '\n';
}

unsigned resolve_threads(unsigned flag_value) {
  if (flag_value != 0) return flag_value;
  if (const char* env = std::getenv("AMBIG_EVAL_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) return static_cast<unsigned>(parsed);
  }
  return 0;  // library default: hardware concurrency
}

ambig::AggregateOptions parse_metrics(const std::string& csv) {
  ambig::AggregateOptions options;
  options.ans = options.bleu = options.edit = false;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item == "ans")
      options.ans = true;
    else if (item == "bleu")
      options.bleu = true;
    else if (item == "edit")
      options.edit = true;
    else
      throw CLI::ValidationError("--metrics", "unknown metric \"" + item + "\" (use ans, bleu, edit)");
  }
  if (!options.ans && !options.bleu && !options.edit)
    throw CLI::ValidationError("--metrics", "no metrics selected");
  return options;
}

int run_evaluate(const std::string& gold_path, const std::string& pred_path,
                 const std::string& metrics_csv, unsigned threads, bool pretty,
                 const std::string& out_path) {
  ambig::AggregateOptions options = parse_metrics(metrics_csv);
  options.threads = resolve_threads(threads);

  const auto dataset = ambig::parse_dataset(ambig::read_file(gold_path));
  const auto predictions = ambig::parse_predictions(ambig::read_file(pred_path));

  std::size_t substituted = 0;
  for (const auto& prediction : predictions)
    if (prediction.pairs.size() == 1 && !prediction.pairs.front().question) ++substituted;
  if (substituted > 0)
    std::cerr << "note: substituted the prompt question for " << substituted
              << " single-pair prediction(s)\n";

  const ambig::AggregateReport report = ambig::aggregate(dataset, predictions, options);
  if (pretty) {
    std::ostringstream out;
    out << "examples:   " << report.n_all << " (multi: " << report.n_multi
        << ", missing: " << report.n_missing << ")\n";
    if (options.ans)
      out << "F1 answers: " << fixed4(report.f1_ans_all) << " (all)   "
          << fixed4(report.f1_ans_multi) << " (multi)\n";
    if (options.bleu) out << "F1 BLEU:    " << fixed4(report.f1_bleu) << '\n';
    if (options.edit) out << "F1 edit-F1: " << fixed4(report.f1_edit) << '\n';
    std::string text = out.str();
    text.pop_back();
    write_output(text, out_path);
  } else {
    write_output(ambig::report_to_json(report, options), out_path);
  }
  return 0;
}

int run_validate(const std::string& data_path, const std::string& out_path) {
  const auto dataset = ambig::parse_dataset(ambig::read_file(data_path));
  const auto report = ambig::validate_dataset(dataset);

  json violations = json::array();
  for (const auto& violation : report)
    violations.push_back(
        {{"id", violation.id}, {"rule", violation.rule}, {"detail", violation.detail}});
  json out = {{"n_examples", dataset.size()},
              {"n_violations", report.size()},
              {"violations", std::move(violations)}};
  write_output(out.dump(), out_path);
  return report.empty() ? 0 : 1;
}

int run_stats(const std::string& data_path, std::size_t top_k, const std::string& out_path) {
  const auto dataset = ambig::parse_dataset(ambig::read_file(data_path));
  const auto histogram = ambig::qa_count_distribution(dataset);
  const auto table = ambig::edit_distribution(dataset);
  const auto percent = histogram.percent();

  std::int64_t edit_total = 0;
  for (const auto& [token, count] : table) edit_total += count;

  std::vector<std::pair<std::string, std::int64_t>> ranked(table.begin(), table.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  const char* bucket_names[4] = {"1", "2", "3", "4+"};
  std::string out = "{\"n_examples\":" + std::to_string(histogram.total) + ",\"qa_counts\":{";
  for (std::size_t k = 0; k < 4; ++k) {
    out += std::string("\"") + bucket_names[k] + "\":" + std::to_string(histogram.buckets[k]);
    if (k != 3) out += ',';
  }
  out += "},\"qa_percent\":{";
  for (std::size_t k = 0; k < 4; ++k) {
    out += std::string("\"") + bucket_names[k] + "\":" + fixed4(percent[k]);
    if (k != 3) out += ',';
  }
  out += "},\"edit_total\":" + std::to_string(edit_total) + ",\"top_edits\":[";
  for (std::size_t k = 0; k < std::min(top_k, ranked.size()); ++k) {
    if (k) out += ',';
    out += "{\"edit\":" + json(ranked[k].first).dump() +
           ",\"count\":" + std::to_string(ranked[k].second) + "}";
  }
  out += "],\"coverage\":{";
  const std::size_t marks[3] = {10, 100, 1000};
  std::vector<std::pair<std::size_t, double>> curve;
  if (!table.empty()) curve = ambig::coverage_curve(table);
  for (std::size_t k = 0; k < 3; ++k) {
    double value = 0.0;
    if (!curve.empty()) value = curve[std::min(marks[k], curve.size()) - 1].second;
    out += "\"" + std::to_string(marks[k]) + "\":" + fixed4(value);
    if (k != 2) out += ',';
  }
  out += "}}";
  write_output(out, out_path);
  return 0;
}

int run_agreement(const std::string& data_path, const std::string& out_path) {
  const auto dataset = ambig::parse_dataset(ambig::read_file(data_path));
  double sum = 0.0;
  std::size_t compared = 0;
  std::size_t pair_count = 0;
  for (const auto& example : dataset) {
    const auto& annotations = example.annotations;
    if (annotations.size() < 2) continue;
    double example_sum = 0.0;
    std::size_t example_pairs = 0;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
      for (std::size_t j = i + 1; j < annotations.size(); ++j) {
        example_sum += ambig::pairwise_agreement(annotations[i], annotations[j], example.prompt);
        ++example_pairs;
      }
    }
    sum += example_sum / static_cast<double>(example_pairs);
    ++compared;
    pair_count += example_pairs;
  }
  const double mean = compared ? sum / static_cast<double>(compared) : 0.0;
  std::string out = "{\"agreement_f1_ans\":" + fixed4(mean) +
                    ",\"n_examples\":" + std::to_string(dataset.size()) +
                    ",\"n_compared\":" + std::to_string(compared) +
                    ",\"n_pairs\":" + std::to_string(pair_count) + "}";
  write_output(out, out_path);
  return 0;
}

int run_select(const std::string& candidates_path, double gamma, bool no_fallback,
               const std::string& data_path, const std::string& out_path) {
  const auto candidates = ambig::parse_candidates(ambig::read_file(candidates_path));

  std::map<std::string, std::string> prompts;
  if (!data_path.empty()) {
    const auto dataset = ambig::parse_dataset(ambig::read_file(data_path));
    for (const auto& example : dataset) prompts[example.id] = example.prompt;
    for (const auto& set : candidates)
      if (!prompts.count(set.id))
        throw std::runtime_error("candidate id \"" + set.id + "\" not present in the dataset");
  }

  const ambig::ThresholdConfig config{gamma, !no_fallback};
  json out = json::object();
  for (const auto& set : candidates) {
    const std::string prompt = data_path.empty() ? std::string() : prompts.at(set.id);
    json pairs = json::array();
    for (const auto& answer : ambig::select_answers(set, config))
      pairs.push_back({{"question", prompt}, {"answer", answer}});
    out[set.id] = std::move(pairs);
  }
  write_output(out.dump(), out_path);
  return 0;
}

int run_tune(const std::string& candidates_path, const std::string& gold_path,
             const std::string& mode, unsigned threads, const std::string& out_path) {
  const auto candidates = ambig::parse_candidates(ambig::read_file(candidates_path));
  const auto gold = ambig::parse_dataset(ambig::read_file(gold_path));
  const ambig::TuneResult result = ambig::tune_gamma(
      candidates, gold, {.multi_mode = mode == "multi", .threads = resolve_threads(threads)});
  write_output("{\"gamma\":" + fixed4(result.gamma) +
                   ",\"dev_f1_ans\":" + fixed4(result.dev_f1_ans) + "}",
               out_path);
  return 0;
}

int run_cotrain(const std::string& full_path, const std::string& partial_path,
                const std::vector<std::string>& predictor_commands, int iterations,
                double timeout_seconds, const std::string& out_path,
                const std::string& audit_path) {
  const auto full = ambig::parse_dataset(ambig::read_file(full_path));
  const auto partial = ambig::parse_partial_examples(ambig::read_file(partial_path));

  ambig::CotrainConfig config;
  config.iterations = iterations;
  config.model_count = static_cast<int>(predictor_commands.size());
  config.predictor_commands = predictor_commands;
  config.timeout_seconds = timeout_seconds;

  std::vector<std::unique_ptr<ambig::Predictor>> models;
  for (const auto& command : predictor_commands)
    models.push_back(std::make_unique<ambig::ProcessPredictor>(command, timeout_seconds));

  const ambig::CotrainState state = ambig::democratic_cotrain(full, partial, config, models);
  write_output(ambig::serialize_full_entries(state.d_full_hat), out_path);
  if (!audit_path.empty()) {
    std::ofstream audit(audit_path, std::ios::binary);
    if (!audit) throw std::runtime_error("cannot write file: " + audit_path);
    audit << ambig::audit_to_jsonl(state.audit_log);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-answer open-domain QA: evaluation, threshold selection and co-training"};
  app.require_subcommand(1);

  std::string gold_path, pred_path, data_path, candidates_path, full_path, partial_path;
  std::string out_path, audit_path;
  std::string metrics_csv = "ans,bleu,edit";
  std::string mode = "all";
  std::vector<std::string> predictor_commands;
  unsigned threads = 0;
  std::size_t top_k = 50;
  double gamma = 0.0;
  double timeout_seconds = 600.0;
  int iterations = 1;
  bool pretty = false;
  bool no_fallback = false;

  const auto metrics_check = [](const std::string& csv) -> std::string {
    std::stringstream stream(csv);
    std::string item;
    bool any = false;
    while (std::getline(stream, item, ',')) {
      if (item != "ans" && item != "bleu" && item != "edit")
        return "unknown metric \"" + item + "\" (use ans, bleu, edit)";
      any = true;
    }
    return any ? std::string{} : std::string{"no metrics selected"};
  };

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a gold dataset");
  evaluate->add_option("--gold", gold_path, "gold dataset JSON")->required();
  evaluate->add_option("--pred", pred_path, "predictions JSON (id -> [{question, answer}...])")->required();
  evaluate->add_option("--metrics", metrics_csv, "comma list among ans,bleu,edit")
      ->check(metrics_check)
      ->capture_default_str();
  evaluate->add_option("--threads", threads, "worker threads (default: cores, or AMBIG_EVAL_THREADS)");
  evaluate->add_option("--out", out_path, "write the report here instead of stdout");
  evaluate->add_flag("--pretty", pretty, "human-readable summary instead of JSON");

  auto* validate = app.add_subcommand(
      "validate", "Report dataset invariant violations (exit 1 when any are found)");
  validate->add_option("--data", data_path, "dataset JSON")->required();
  validate->add_option("--out", out_path, "write the report here instead of stdout");

  auto* stats = app.add_subcommand("stats", "Answer-count and question-edit statistics");
  stats->add_option("--data", data_path, "dataset JSON")->required();
  stats->add_option("--top-k", top_k, "edits to list")->capture_default_str();
  stats->add_option("--out", out_path, "write the report here instead of stdout");

  auto* agreement = app.add_subcommand(
      "agreement", "Answer F1 between accepted annotations of the same example");
  agreement->add_option("--data", data_path, "dataset JSON")->required();
  agreement->add_option("--out", out_path, "write the report here instead of stdout");

  auto* select = app.add_subcommand("select", "Threshold scored candidates into predictions");
  select->add_option("--candidates", candidates_path, "candidates JSON (id -> [{answer, score}...])")
      ->required();
  select->add_option("--gamma", gamma, "keep candidates with score > gamma")->required();
  select->add_option("--data", data_path, "dataset JSON supplying prompt questions");
  select->add_flag("--no-fallback", no_fallback, "emit nothing when no candidate clears gamma");
  select->add_option("--out", out_path, "write predictions here instead of stdout");

  auto* tune = app.add_subcommand("tune-threshold", "Pick the gamma maximizing answer F1 on a dev set");
  tune->add_option("--candidates", candidates_path, "candidates JSON")->required();
  tune->add_option("--gold", gold_path, "gold dataset JSON")->required();
  tune->add_option("--mode", mode, "tune on all examples or the multi subset")
      ->check(CLI::IsMember({"all", "multi"}))
      ->capture_default_str();
  tune->add_option("--threads", threads, "sweep workers (default: cores, or AMBIG_EVAL_THREADS)");
  tune->add_option("--out", out_path, "write the result here instead of stdout");

  auto* cotrain = app.add_subcommand(
      "cotrain", "Grow a training set from single-answer examples by majority vote");
  cotrain->add_option("--full", full_path, "fully-labeled dataset JSON")->required();
  cotrain->add_option("--partial", partial_path, "partial examples JSON ([{id, question, answer}...])")
      ->required();
  cotrain->add_option("--predictor", predictor_commands, "predictor command (repeat once per model)")
      ->required();
  cotrain->add_option("--iters", iterations, "co-training iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cotrain->add_option("--timeout", timeout_seconds, "per-request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cotrain->add_option("--out", out_path, "write the grown dataset here instead of stdout");
  cotrain->add_option("--audit", audit_path, "write per-example verdicts here (JSON lines)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*evaluate) return run_evaluate(gold_path, pred_path, metrics_csv, threads, pretty, out_path);
    if (*validate) return run_validate(data_path, out_path);
    if (*stats) return run_stats(data_path, top_k, out_path);
    if (*agreement) return run_agreement(data_path, out_path);
    if (*select) return run_select(candidates_path, gamma, no_fallback, data_path, out_path);
    if (*tune) return run_tune(candidates_path, gold_path, mode, threads, out_path);
    if (*cotrain)
      return run_cotrain(full_path, partial_path, predictor_commands, iterations, timeout_seconds,
                         out_path, audit_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
