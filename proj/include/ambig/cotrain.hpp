#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ambig/data_model.hpp"

namespace ambig {

// A question with exactly one annotated answer, to be promoted by co-training.
struct PartialExample {
  std::string id;
  std::string question;
  std::string answer;
};

struct CotrainConfig {
  int iterations = 1;
  int model_count = 0;  // 0 -> take the number of models as given
  std::vector<std::string> predictor_commands;
  double timeout_seconds = 600.0;  // per request
};

// A (question, answer list) training entry as carried by the wire protocol.
struct FullEntry {
  std::string question;
  std::vector<std::string> answers;
  bool operator==(const FullEntry&) const = default;
};

class CotrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One black-box QA model. Requests are two-phase so the orchestrator can
// issue a round to every model before awaiting any response; responses are
// then folded in model-index order, keeping results schedule-independent.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual void begin_train(int iteration, const std::vector<FullEntry>& dataset) = 0;
  virtual void finish_train() = 0;
  virtual void begin_predict(const std::string& id, const std::string& question,
                             const std::optional<std::string>& prefix) = 0;
  virtual std::vector<std::string> finish_predict() = 0;
};

// Runs an external command and speaks line-delimited JSON over its standard
// input/output:
//   {"op":"train","iteration":k,"dataset":[{"question":q,"answers":[...]},...]}
//     -> {"ok":true}
//   {"op":"predict","id":i,"question":q,"prefix":p|null}
//     -> {"id":i,"answers":[...]}
class ProcessPredictor final : public Predictor {
 public:
  ProcessPredictor(std::string command, double timeout_seconds);
  ~ProcessPredictor() override;
  ProcessPredictor(const ProcessPredictor&) = delete;
  ProcessPredictor& operator=(const ProcessPredictor&) = delete;

  void begin_train(int iteration, const std::vector<FullEntry>& dataset) override;
  void finish_train() override;
  void begin_predict(const std::string& id, const std::string& question,
                     const std::optional<std::string>& prefix) override;
  std::vector<std::string> finish_predict() override;

 private:
  void write_line(const std::string& line);
  std::string read_line();

  std::string command_;
  double timeout_seconds_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string expected_id_;
};

struct AuditRecord {
  int iteration = 0;
  std::string id;
  std::string question;
  std::string known_answer;
  std::vector<std::vector<std::string>> prefixed;    // raw answers per model
  std::vector<std::vector<std::string>> unprefixed;  // raw answers per model
  std::string verdict;                               // "multi" | "single" | "skip"
  std::vector<std::string> added_answers;
};

struct CotrainState {
  std::vector<FullEntry> d_full_hat;
  std::vector<AuditRecord> audit_log;
};

// Answers distinct from the known answer (under normalization) predicted by a
// strict majority of the models. Surfaces keep first-appearance order.
std::vector<std::string> vote_additional_answers(const std::vector<std::vector<std::string>>& responses,
                                                 const std::string& known_answer);

// True iff every model's prediction set minus the known answer is empty.
bool single_answer_consensus(const std::vector<std::vector<std::string>>& responses,
                             const std::string& known_answer);

// Training entries for a dataset: first accepted annotation, first surface
// form of each distinct answer.
std::vector<FullEntry> to_full_entries(std::span<const AnnotatedExample> dataset);

std::vector<PartialExample> parse_partial_examples(std::string_view json_text);
std::string serialize_full_entries(std::span<const FullEntry> entries);
std::string audit_to_jsonl(std::span<const AuditRecord> records);

// Democratic co-training: per iteration, trains every model on the current
// set, then promotes each partial example whose extra answers win a strict
// majority vote (multi case) or whose models unanimously predict nothing but
// the known answer (single case). Each iteration's additions rebase on the
// seed set. Aborts with the model index and request id on a predictor
// failure, protocol violation or timeout.
CotrainState democratic_cotrain(std::span<const AnnotatedExample> d_full,
                                std::span<const PartialExample> d_partial,
                                const CotrainConfig& config,
                                std::span<const std::unique_ptr<Predictor>> models);

}  // namespace ambig
