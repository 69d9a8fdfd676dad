// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Numeric oracles are checked at 1e-9; each randomized suite runs at
// least 1000 cases.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ambig/cotrain.hpp"
#include "ambig/data_model.hpp"
#include "ambig/metrics.hpp"
#include "ambig/selection.hpp"
#include "ambig/similarity.hpp"
#include "ambig/text_norm.hpp"

#include "oracles.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ambig;

namespace {

constexpr double kTol = 1e-9;

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& note = "") {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), note.empty() ? "" : " — ",
              note.c_str());
  if (!ok) ++g_failures;
}

void check(const std::string& name, const std::function<bool(std::string&)>& body) {
  std::string note;
  bool ok = false;
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note = e.what();
  }
  report(name, ok, note);
}

bool near(double actual, double expected) { return std::fabs(actual - expected) <= kTol; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ReferenceAnnotation annotation(std::vector<ReferencePair> pairs) {
  ReferenceAnnotation out;
  out.kind = pairs.size() > 1 ? AnnotationKind::kMultiple : AnnotationKind::kSingle;
  out.pairs = std::move(pairs);
  return out;
}

PredictedExample prediction(std::vector<PredictedPair> pairs) {
  return PredictedExample{"example", std::move(pairs)};
}

// ---------------------------------------------------------------------------
// 1. metric oracles

void metric_oracles() {
  const auto start = std::chrono::steady_clock::now();

  check("1.1 edit-f1 of disjoint edit bags is zero", [](std::string&) {
    const char* prompt = "Who made the play the crucible?";
    const EditBag pred = extract_edits(prompt, "Who made the play the crucible in 2012?");
    const EditBag gold = extract_edits(prompt, "Who wrote the play the crucible?");
    return edit_f1(pred, gold) == 0.0;
  });

  const char* film_prompt = "Where was snow white and the huntsman filmed?";
  const ReferenceAnnotation film_gold = annotation({
      {"Where were beach scenes for snow white and huntsman predominantly filmed?",
       {"Marloes Sands Beach"}},
      {"Where was principal photography for snow white and huntsman filmed?", {"United Kingdom"}},
      {"Where was castle in snow white and huntsman filmed?", {"Gateholm island"}},
  });

  check("1.2 two correct answers out of three gold pairs score 0.8", [&](std::string& note) {
    const auto pred = prediction(
        {{"Where was snow white and huntsman principal photography filmed", "United Kingdom"},
         {"Where were beach scenes for snow white and huntsman mostly filmed",
          "Marloes Sands Beach"}});
    const double f1 = score_example(pred, film_gold, SimilarityKind::kAnswer, film_prompt).f1;
    note = "f1 = " + std::to_string(f1);
    return near(f1, 0.8);
  });

  check("1.3 duplicated answer earns one-to-one credit only (0.4)", [&](std::string& note) {
    const auto pred = prediction(
        {{"Where was snow white and the huntsman filmed in 2017?", "Marloes Sands Beach"},
         {"Where was snow white and the huntsman filmed during the filming of Season 1 of the TV "
          "series?",
          "Marloes Sands Beach"}});
    const double f1 = score_example(pred, film_gold, SimilarityKind::kAnswer, film_prompt).f1;
    note = "f1 = " + std::to_string(f1);
    return near(f1, 0.4);
  });

  check("1.4 over-generated prediction scores 2/3", [](std::string& note) {
    const char* prompt = "How many times csk reached final in ipl?";
    const auto gold = annotation({{prompt, {"eight"}}});
    const auto pred = prediction({{prompt, "eight"}, {prompt, "seven"}});
    const double f1 = score_example(pred, gold, SimilarityKind::kAnswer, prompt).f1;
    note = "f1 = " + std::to_string(f1);
    return near(f1, 2.0 / 3.0);
  });

  check("1.5 one of four gold answers scores 0.4", [](std::string& note) {
    const char* prompt = "Who played kelly on the drew carey show?";
    const auto gold = annotation({{"Who played kellie n?", {"Cynthia Watros"}},
                                  {"Who played m kelly?", {"Jenny McCarthy"}},
                                  {"Who played g kelly?", {"Brett Butler"}},
                                  {"Who played kelly w?", {"Anna Gunn"}}});
    const auto pred = prediction({{prompt, "Brett Butler"}});
    const double f1 = score_example(pred, gold, SimilarityKind::kAnswer, prompt).f1;
    note = "f1 = " + std::to_string(f1);
    return near(f1, 0.4);
  });

  check("1.6 alias surface form hits one of two gold pairs (2/3)", [](std::string& note) {
    const char* prompt = "Who has won the most trophies man utd or liverpool?";
    const auto gold = annotation({{"Who has won the most trophies?", {"Man utd", "Manchester United"}},
                                  {"Who has won the most FIFA and UEFA cups?", {"Liverpool"}}});
    const auto pred = prediction({{prompt, "Manchester United"}});
    const double f1 = score_example(pred, gold, SimilarityKind::kAnswer, prompt).f1;
    note = "f1 = " + std::to_string(f1);
    return near(f1, 2.0 / 3.0);
  });

  const double elapsed = seconds_since(start);
  report("1.7 metric oracles finish within 1 s", elapsed < 1.0,
         "took " + std::to_string(elapsed) + " s");
}

// ---------------------------------------------------------------------------
// 2. property suites

void property_suites() {
  const auto start = std::chrono::steady_clock::now();

  check("2.1 assignment total equals brute force (binary and fractional)", [](std::string& note) {
    std::mt19937 rng(9001);
    std::uniform_int_distribution<int> size_dist(1, 5);
    std::uniform_real_distribution<double> weight_dist(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int k = 0; k < 2000; ++k) {
      const bool binary = k < 1000;
      std::vector<std::vector<double>> weights(size_dist(rng),
                                               std::vector<double>(size_dist(rng)));
      for (auto& row : weights)
        for (auto& w : row) w = binary ? static_cast<double>(coin(rng)) : weight_dist(rng);
      const double expected = testing::brute_force_max_total(weights);
      const double actual = max_weight_assignment(weights).total;
      if (!near(actual, expected)) {
        note = "case " + std::to_string(k);
        return false;
      }
    }
    note = "2000 cases";
    return true;
  });

  check("2.2 score_example equals brute-force assignment enumeration", [](std::string& note) {
    std::mt19937 rng(9002);
    const SimilarityKind kinds[] = {SimilarityKind::kAnswer, SimilarityKind::kBleu,
                                    SimilarityKind::kEditF1};
    for (int k = 0; k < 1200; ++k) {
      const auto test_case = testing::random_case(rng, 5);
      const auto kind = kinds[k % 3];
      const double expected = testing::brute_force_f1(
          test_case.prediction, test_case.example.annotations.front(), kind,
          test_case.example.prompt);
      const double actual =
          score_example(test_case.prediction, test_case.example.annotations.front(), kind,
                        test_case.example.prompt)
              .f1;
      if (!near(actual, expected)) {
        note = "case " + std::to_string(k);
        return false;
      }
    }
    note = "1200 cases";
    return true;
  });

  check("2.3 bounds, metric ordering and pair-order invariance", [](std::string& note) {
    std::mt19937 rng(9003);
    for (int k = 0; k < 1000; ++k) {
      auto test_case = testing::random_case(rng, 5);
      const auto& example = test_case.example;
      const auto& reference = example.annotations.front();
      const double ans =
          score_example(test_case.prediction, reference, SimilarityKind::kAnswer, example.prompt).f1;
      const double bleu =
          score_example(test_case.prediction, reference, SimilarityKind::kBleu, example.prompt).f1;
      const double edit =
          score_example(test_case.prediction, reference, SimilarityKind::kEditF1, example.prompt).f1;
      for (const double value : {ans, bleu, edit}) {
        if (value < 0.0 || value > 1.0) {
          note = "out of range in case " + std::to_string(k);
          return false;
        }
      }
      if (bleu > ans + kTol || edit > ans + kTol) {
        note = "ordering violated in case " + std::to_string(k);
        return false;
      }
      std::shuffle(test_case.prediction.pairs.begin(), test_case.prediction.pairs.end(), rng);
      auto shuffled = reference;
      std::shuffle(shuffled.pairs.begin(), shuffled.pairs.end(), rng);
      const double again =
          score_example(test_case.prediction, shuffled, SimilarityKind::kAnswer, example.prompt).f1;
      if (!near(ans, again)) {
        note = "permutation changed the score in case " + std::to_string(k);
        return false;
      }
    }
    note = "1000 cases";
    return true;
  });

  check("2.4 extract_edits equals count-map subtraction", [](std::string& note) {
    std::mt19937 rng(9004);
    for (int k = 0; k < 1000; ++k) {
      const auto prompt_tokens = testing::random_tokens(rng, 8);
      const auto question_tokens = testing::random_tokens(rng, 8);
      const EditBag expected = testing::count_map_edits(prompt_tokens, question_tokens);
      const EditBag actual = extract_edits(testing::join_tokens(prompt_tokens),
                                           testing::join_tokens(question_tokens));
      if (!(actual == expected)) {
        note = "bag mismatch in case " + std::to_string(k);
        return false;
      }
      int added = 0, deleted = 0;
      for (const auto& [t, c] : actual.added) added += c;
      for (const auto& [t, c] : actual.deleted) deleted += c;
      if (added - deleted !=
          static_cast<int>(question_tokens.size()) - static_cast<int>(prompt_tokens.size())) {
        note = "size identity broken in case " + std::to_string(k);
        return false;
      }
    }
    note = "1000 cases";
    return true;
  });

  check("2.5 selection shrinks as gamma grows; fallback yields top-1", [](std::string& note) {
    std::mt19937 rng(9005);
    std::uniform_real_distribution<double> score_dist(0.0, 1.0);
    std::uniform_int_distribution<int> count_dist(1, 8);
    for (int k = 0; k < 1000; ++k) {
      CandidateSet set{"q", {}};
      const int n = count_dist(rng);
      for (int i = 0; i < n; ++i)
        set.candidates.push_back({"answer " + std::to_string(i % 5), score_dist(rng)});
      double g1 = score_dist(rng), g2 = score_dist(rng);
      if (g1 > g2) std::swap(g1, g2);
      const auto wide = select_answers(set, {g1, false});
      const auto narrow = select_answers(set, {g2, false});
      for (const auto& answer : narrow) {
        if (std::find(wide.begin(), wide.end(), answer) == wide.end()) {
          note = "not a subset in case " + std::to_string(k);
          return false;
        }
      }
      const auto fallback = select_answers(set, {2.0, true});
      if (fallback.size() != 1) {
        note = "fallback failed in case " + std::to_string(k);
        return false;
      }
    }
    note = "1000 cases";
    return true;
  });

  check("2.6 tuned f1 equals a re-evaluation at the returned gamma", [](std::string& note) {
    std::mt19937 rng(9006);
    std::uniform_real_distribution<double> score_dist(0.0, 1.0);
    std::uniform_int_distribution<int> count_dist(1, 5);
    std::uniform_int_distribution<int> pick(0, 3);
    const std::vector<std::string> pool = {"red", "green", "blue", "gold"};
    for (int k = 0; k < 1000; ++k) {
      std::vector<AnnotatedExample> gold_set;
      std::vector<CandidateSet> dev;
      const int examples = count_dist(rng);
      for (int e = 0; e < examples; ++e) {
        AnnotatedExample example;
        example.id = "q" + std::to_string(e);
        example.prompt = "prompt " + std::to_string(e);
        std::vector<ReferencePair> pairs = {{example.prompt, {pool[pick(rng)]}}};
        if (pick(rng) == 0 && pairs[0].answers[0] != pool[1])
          pairs.push_back({example.prompt + " v", {pool[1]}});
        example.annotations.push_back(annotation(std::move(pairs)));
        gold_set.push_back(example);

        CandidateSet set{example.id, {}};
        const int n = count_dist(rng);
        for (int i = 0; i < n; ++i) set.candidates.push_back({pool[pick(rng)], score_dist(rng)});
        dev.push_back(std::move(set));
      }
      const TuneResult result = tune_gamma(dev, gold_set);
      double sum = 0.0;
      for (const auto& set : dev) {
        const auto answers = select_answers(set, {result.gamma, false});
        if (answers.empty()) continue;
        const AnnotatedExample* example = nullptr;
        for (const auto& e : gold_set)
          if (e.id == set.id) example = &e;
        PredictedExample pred;
        pred.id = set.id;
        for (const auto& answer : answers) pred.pairs.push_back({example->prompt, answer});
        sum += score_against_annotations(pred, *example, SimilarityKind::kAnswer).f1;
      }
      if (!near(result.dev_f1_ans, sum / static_cast<double>(dev.size()))) {
        note = "mismatch in case " + std::to_string(k);
        return false;
      }
    }
    note = "1000 cases";
    return true;
  });

  const double elapsed = seconds_since(start);
  report("2.7 property suites finish within 30 s", elapsed < 30.0,
         "took " + std::to_string(elapsed) + " s");
}

// ---------------------------------------------------------------------------
// 3. co-training fixture

fs::path make_temp_dir() {
  const fs::path dir = fs::temp_directory_path() / ("ambig_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

void cotraining_fixture(const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();

  check("3.1 six-example co-training run reproduces the hand trace", [&](std::string& note) {
    const json tables[3] = {
        {{"p1", {{"prefixed", {"October 1, 2017", "September 25, 2016"}}, {"plain", {"October 1, 2017"}}}},
         {"p2", {{"prefixed", {"Leonardo da Vinci"}}, {"plain", {"Leonardo da Vinci"}}}},
         {"p3", {{"prefixed", {"K2"}}, {"plain", {"Mount Everest", "K2"}}}},
         {"p4", {{"prefixed", {"Saturn"}}, {"plain", {"Jupiter"}}}},
         {"p5", {{"prefixed", json::array()}, {"plain", {"Alexander Fleming"}}}},
         {"p6", {{"prefixed", {"21 April 753 BC"}}, {"plain", {"753 BC"}}}}},
        {{"p1", {{"prefixed", {"september 25 2016"}}, {"plain", {"October 1, 2017"}}}},
         {"p2", {{"prefixed", json::array()}, {"plain", {"leonardo da vinci"}}}},
         {"p3", {{"prefixed", {"Mount Everest"}}, {"plain", {"Mount Everest"}}}},
         {"p4", {{"prefixed", {"Saturn", "Neptune"}}, {"plain", {"Jupiter"}}}},
         {"p5", {{"prefixed", json::array()}, {"plain", {"alexander fleming"}}}},
         {"p6", {{"prefixed", {"753 bc"}}, {"plain", {"753 BC", "April 21 753 BC"}}}}},
        {{"p1", {{"prefixed", {"September 25, 2016"}}, {"plain", {"October 1, 2017"}}}},
         {"p2", {{"prefixed", {"leonardo da vinci"}}, {"plain", json::array()}}},
         {"p3", {{"prefixed", json::array()}, {"plain", {"mount everest"}}}},
         {"p4", {{"prefixed", {"jupiter"}}, {"plain", {"Jupiter"}}}},
         {"p5", {{"prefixed", json::array()}, {"plain", {"Alexander Fleming"}}}},
         {"p6", {{"prefixed", {"the 753 bc"}}, {"plain", {"753 bc"}}}}},
    };

    std::vector<std::unique_ptr<Predictor>> models;
    for (int i = 0; i < 3; ++i) {
      const fs::path table_path = dir / ("table" + std::to_string(i) + ".json");
      write_text(table_path, tables[i].dump());
      models.push_back(std::make_unique<ProcessPredictor>(
          std::string(MOCK_PREDICTOR_BIN) + " --table " + table_path.string(), 30.0));
    }

    std::vector<AnnotatedExample> full;
    {
      AnnotatedExample f1;
      f1.id = "f1";
      f1.prompt = "who wrote hamlet";
      f1.annotations.push_back(
          {AnnotationKind::kSingle, {{"who wrote hamlet", {"William Shakespeare"}}}});
      AnnotatedExample f2;
      f2.id = "f2";
      f2.prompt = "what is the capital of france";
      f2.annotations.push_back({AnnotationKind::kMultiple,
                                {{"what is the modern capital of france", {"Paris"}},
                                 {"what was the roman capital of gaul", {"Lyon"}}}});
      full = {f1, f2};
    }

    const std::vector<PartialExample> partial = {
        {"p1", "when does the family guy season come out", "October 1, 2017"},
        {"p2", "who painted the mona lisa", "Leonardo da Vinci"},
        {"p3", "what is the tallest mountain in the world", "Mount Everest"},
        {"p4", "what is the largest planet", "Jupiter"},
        {"p5", "who discovered penicillin", "Alexander Fleming"},
        {"p6", "when was rome founded", "753 BC"},
    };

    CotrainConfig config;
    config.iterations = 2;
    config.model_count = 3;
    config.timeout_seconds = 30.0;

    const CotrainState state = democratic_cotrain(full, partial, config, models);

    const std::vector<FullEntry> expected = {
        {"who wrote hamlet", {"William Shakespeare"}},
        {"what is the capital of france", {"Paris", "Lyon"}},
        {"when does the family guy season come out", {"October 1, 2017", "September 25, 2016"}},
        {"who painted the mona lisa", {"Leonardo da Vinci"}},
        {"what is the largest planet", {"Jupiter", "Saturn"}},
        {"who discovered penicillin", {"Alexander Fleming"}},
    };
    if (state.d_full_hat != expected) {
      note = "grown set differs: " + serialize_full_entries(state.d_full_hat);
      return false;
    }

    const std::vector<std::string> expected_verdicts = {"multi", "single", "skip",
                                                        "multi", "single", "skip"};
    if (state.audit_log.size() != 12) {
      note = "expected 12 audit records, got " + std::to_string(state.audit_log.size());
      return false;
    }
    for (std::size_t k = 0; k < state.audit_log.size(); ++k) {
      if (state.audit_log[k].verdict != expected_verdicts[k % 6]) {
        note = "verdict mismatch at record " + std::to_string(k);
        return false;
      }
    }
    return true;
  });

  check("3.2 strict majority boundary at six models", [](std::string& note) {
    std::vector<std::vector<std::string>> three_of_six(6);
    three_of_six[0] = {"x"};
    three_of_six[1] = {"x"};
    three_of_six[2] = {"x"};
    if (!vote_additional_answers(three_of_six, "y").empty()) {
      note = "3 of 6 votes must be rejected";
      return false;
    }
    std::vector<std::vector<std::string>> four_of_six = three_of_six;
    four_of_six[3] = {"x"};
    if (vote_additional_answers(four_of_six, "y") != std::vector<std::string>{"x"}) {
      note = "4 of 6 votes must be accepted";
      return false;
    }
    return true;
  });

  const double elapsed = seconds_since(start);
  report("3.3 co-training fixture finishes within 5 s", elapsed < 5.0,
         "took " + std::to_string(elapsed) + " s");
}

// ---------------------------------------------------------------------------
// 4 & 5. throughput and end-to-end smoke

// 2,002 examples averaging 2.1 gold pairs, with hit/miss/alias variety.
void write_synthetic_dev(const fs::path& gold_path, const fs::path& pred_path) {
  std::vector<AnnotatedExample> dataset;
  std::vector<PredictedExample> predictions;
  // per 20 examples: 8x1, 5x2, 4x3, 3x4 pairs -> mean 2.1
  const int sizes[20] = {1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4};
  for (int i = 0; i < 2002; ++i) {
    AnnotatedExample example;
    example.id = "s" + std::to_string(i);
    example.prompt =
        "when did event " + std::to_string(i) + " happen in city " + std::to_string(i % 13);
    const int n = sizes[i % 20];
    ReferenceAnnotation ann;
    ann.kind = n > 1 ? AnnotationKind::kMultiple : AnnotationKind::kSingle;
    for (int j = 0; j < n; ++j) {
      ReferencePair pair;
      pair.question = n == 1 ? example.prompt
                             : example.prompt + " during year " + std::to_string(1990 + j);
      pair.answers = {"answer " + std::to_string(i) + " " + std::to_string(j)};
      if (j % 2 == 0) pair.answers.push_back("the answer " + std::to_string(i) + " " + std::to_string(j));
      ann.pairs.push_back(std::move(pair));
    }
    example.annotations.push_back(std::move(ann));

    PredictedExample pred;
    pred.id = example.id;
    for (int j = 0; j < n; ++j) {
      PredictedPair pair;
      pair.question = example.prompt + " in " + std::to_string(1990 + j);
      pair.answer = (i + j) % 3 == 0 ? "wrong " + std::to_string(j)
                                     : "answer " + std::to_string(i) + " " + std::to_string(j);
      pred.pairs.push_back(std::move(pair));
      if (i % 11 == 0) break;  // under-generation every 11th example
    }
    dataset.push_back(std::move(example));
    predictions.push_back(std::move(pred));
  }
  write_text(gold_path, serialize_dataset(dataset));
  write_text(pred_path, serialize_predictions(predictions));
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "cli_stdout.txt";
  const std::string command =
      std::string(AMBIG_EVAL_BIN) + " " + args + " > " + out_file.string() + " 2>/dev/null";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = read_file(out_file.string());
  return result;
}

void throughput_and_smoke(const fs::path& dir) {
  const fs::path gold_path = dir / "synthetic_gold.json";
  const fs::path pred_path = dir / "synthetic_pred.json";
  write_synthetic_dev(gold_path, pred_path);

  check("4.1 evaluate processes a dev-scale file within 5 s", [&](std::string& note) {
    const auto start = std::chrono::steady_clock::now();
    const RunResult result =
        run_cli("evaluate --gold " + gold_path.string() + " --pred " + pred_path.string(), dir);
    const double elapsed = seconds_since(start);
    note = "took " + std::to_string(elapsed) + " s";
    if (result.exit_code != 0) {
      note += ", exit code " + std::to_string(result.exit_code);
      return false;
    }
    const json report = json::parse(result.output, nullptr, false);
    if (report.is_discarded() || !report.contains("f1_ans")) {
      note += ", malformed report";
      return false;
    }
    return elapsed < 5.0;
  });

  check("5.1 stats runs end-to-end and emits a well-formed report", [&](std::string& note) {
    const RunResult result = run_cli("stats --data " + gold_path.string(), dir);
    if (result.exit_code != 0) {
      note = "exit code " + std::to_string(result.exit_code);
      return false;
    }
    const json report = json::parse(result.output, nullptr, false);
    if (report.is_discarded()) {
      note = "output is not JSON";
      return false;
    }
    for (const char* key : {"n_examples", "qa_counts", "qa_percent", "top_edits", "coverage"}) {
      if (!report.contains(key)) {
        note = std::string("missing key ") + key;
        return false;
      }
    }
    return report["n_examples"] == 2002;
  });

  check("5.2 agreement runs end-to-end and emits a well-formed report", [&](std::string& note) {
    const RunResult result = run_cli("agreement --data " + gold_path.string(), dir);
    if (result.exit_code != 0) {
      note = "exit code " + std::to_string(result.exit_code);
      return false;
    }
    const json report = json::parse(result.output, nullptr, false);
    if (report.is_discarded() || !report.contains("agreement_f1_ans")) {
      note = "malformed report";
      return false;
    }
    return true;
  });

  if (const char* released = std::getenv("AMBIGNQ_DATA")) {
    check("5.3 stats and agreement run on the released dataset", [&](std::string& note) {
      const RunResult stats = run_cli("stats --data " + std::string(released), dir);
      const RunResult agreement = run_cli("agreement --data " + std::string(released), dir);
      note = "exit codes " + std::to_string(stats.exit_code) + ", " +
             std::to_string(agreement.exit_code);
      return stats.exit_code == 0 && agreement.exit_code == 0 &&
             !json::parse(stats.output, nullptr, false).is_discarded() &&
             !json::parse(agreement.output, nullptr, false).is_discarded();
    });
  }
}

}  // namespace

int main() {
  const fs::path dir = make_temp_dir();
  metric_oracles();
  property_suites();
  cotraining_fixture(dir);
  throughput_and_smoke(dir);
  fs::remove_all(dir);
  std::printf("%s: %d failure(s)\n", g_failures ? "FAILED" : "OK", g_failures);
  return g_failures ? 1 : 0;
}
