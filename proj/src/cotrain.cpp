#include "ambig/cotrain.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>
#include <mutex>
#include <set>
#include <unordered_set>

#include "json.hpp"

#include "ambig/text_norm.hpp"

namespace ambig {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

[[noreturn]] void protocol_fail(const std::string& message) { throw CotrainError(message); }

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return static_cast<int>(std::max<std::int64_t>(0, left.count()));
}

json dataset_to_json(const std::vector<FullEntry>& dataset) {
  json out = json::array();
  for (const auto& entry : dataset)
    out.push_back({{"question", entry.question}, {"answers", entry.answers}});
  return out;
}

std::vector<std::string> answers_from_response(const json& response, const std::string& raw) {
  const auto it = response.find("answers");
  if (it == response.end() || !it->is_array())
    protocol_fail("response has no \"answers\" array: " + raw);
  std::vector<std::string> answers;
  for (const auto& item : *it) {
    if (!item.is_string()) protocol_fail("non-string answer in response: " + raw);
    answers.push_back(item.get<std::string>());
  }
  return answers;
}

}  // namespace

ProcessPredictor::ProcessPredictor(std::string command, double timeout_seconds)
    : command_(std::move(command)), timeout_seconds_(timeout_seconds) {
  ignore_sigpipe();
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
    throw CotrainError(std::string("pipe failed: ") + std::strerror(errno));

  const pid_t pid = ::fork();
  if (pid < 0) throw CotrainError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);  // own process group so teardown reaches grandchildren
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

ProcessPredictor::~ProcessPredictor() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    // closing stdin asks the child to exit; escalate if it lingers
    int status = 0;
    for (int i = 0; i < 100; ++i) {
      const pid_t reaped = ::waitpid(pid_, &status, WNOHANG);
      if (reaped == pid_ || (reaped < 0 && errno == ECHILD)) return;
      ::usleep(10000);
    }
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
}

void ProcessPredictor::write_line(const std::string& line) {
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double>(timeout_seconds_));
  std::string data = line;
  data.push_back('\n');
  std::size_t offset = 0;
  while (offset < data.size()) {
    struct pollfd pfd = {to_child_, POLLOUT, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready == 0) protocol_fail("request timed out after " + std::to_string(timeout_seconds_) + "s");
    if (ready < 0) {
      if (errno == EINTR) continue;
      protocol_fail(std::string("poll failed: ") + std::strerror(errno));
    }
    const ssize_t written = ::write(to_child_, data.data() + offset, data.size() - offset);
    if (written < 0) {
      if (errno == EINTR) continue;
      protocol_fail(std::string("predictor not accepting input: ") + std::strerror(errno));
    }
    offset += static_cast<std::size_t>(written);
  }
}

std::string ProcessPredictor::read_line() {
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double>(timeout_seconds_));
  for (;;) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return line;
    }
    struct pollfd pfd = {from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready == 0) protocol_fail("request timed out after " + std::to_string(timeout_seconds_) + "s");
    if (ready < 0) {
      if (errno == EINTR) continue;
      protocol_fail(std::string("poll failed: ") + std::strerror(errno));
    }
    char chunk[4096];
    const ssize_t got = ::read(from_child_, chunk, sizeof(chunk));
    if (got == 0) protocol_fail("predictor exited before responding");
    if (got < 0) {
      if (errno == EINTR) continue;
      protocol_fail(std::string("read failed: ") + std::strerror(errno));
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

void ProcessPredictor::begin_train(int iteration, const std::vector<FullEntry>& dataset) {
  json request = {{"op", "train"}, {"iteration", iteration}, {"dataset", dataset_to_json(dataset)}};
  write_line(request.dump());
}

void ProcessPredictor::finish_train() {
  const std::string raw = read_line();
  const json response = json::parse(raw, nullptr, false);
  if (response.is_discarded() || !response.is_object() || response.value("ok", false) != true)
    protocol_fail("train not acknowledged: " + raw);
}

void ProcessPredictor::begin_predict(const std::string& id, const std::string& question,
                                     const std::optional<std::string>& prefix) {
  expected_id_ = id;
  json request = {{"op", "predict"}, {"id", id}, {"question", question}};
  if (prefix)
    request["prefix"] = *prefix;
  else
    request["prefix"] = nullptr;
  write_line(request.dump());
}

std::vector<std::string> ProcessPredictor::finish_predict() {
  const std::string raw = read_line();
  const json response = json::parse(raw, nullptr, false);
  if (response.is_discarded() || !response.is_object())
    protocol_fail("response is not a JSON object: " + raw);
  if (response.value("id", "") != expected_id_)
    protocol_fail("response id does not match request \"" + expected_id_ + "\": " + raw);
  return answers_from_response(response, raw);
}

std::vector<std::string> vote_additional_answers(const std::vector<std::vector<std::string>>& responses,
                                                 const std::string& known_answer) {
  const int model_count = static_cast<int>(responses.size());
  const std::string known = normalize_answer(known_answer);

  std::map<std::string, int> votes;
  std::map<std::string, std::string> surface;  // normalized form -> first surface seen
  std::vector<std::string> order;
  for (const auto& answers : responses) {
    std::set<std::string> seen_in_model;
    for (const auto& answer : answers) {
      std::string norm = normalize_answer(answer);
      if (norm == known) continue;
      if (!seen_in_model.insert(norm).second) continue;
      if (votes.find(norm) == votes.end()) {
        surface[norm] = answer;
        order.push_back(norm);
      }
      ++votes[norm];
    }
  }

  std::vector<std::string> out;
  for (const auto& norm : order) {
    if (2 * votes[norm] > model_count) out.push_back(surface[norm]);  // strict majority
  }
  return out;
}

bool single_answer_consensus(const std::vector<std::vector<std::string>>& responses,
                             const std::string& known_answer) {
  const std::string known = normalize_answer(known_answer);
  for (const auto& answers : responses) {
    for (const auto& answer : answers) {
      if (normalize_answer(answer) != known) return false;
    }
  }
  return true;
}

std::vector<FullEntry> to_full_entries(std::span<const AnnotatedExample> dataset) {
  std::vector<FullEntry> out;
  out.reserve(dataset.size());
  for (const auto& example : dataset) {
    FullEntry entry;
    entry.question = example.prompt;
    for (const auto& pair : example.annotations.front().pairs)
      entry.answers.push_back(pair.answers.front());
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<PartialExample> parse_partial_examples(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("partial examples: invalid JSON at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!root.is_array()) throw ParseError("partial examples: top level must be an array");

  std::vector<PartialExample> out;
  for (std::size_t k = 0; k < root.size(); ++k) {
    const json& item = root[k];
    const std::string where = "partial[" + std::to_string(k) + "]";
    if (!item.is_object()) throw ParseError(where + ": must be an object");
    PartialExample partial;
    for (const char* field : {"id", "question", "answer"}) {
      const auto it = item.find(field);
      if (it == item.end() || !it->is_string())
        throw ParseError(where + ": missing string field \"" + field + "\"");
    }
    partial.id = item["id"].get<std::string>();
    partial.question = item["question"].get<std::string>();
    partial.answer = item["answer"].get<std::string>();
    if (partial.answer.empty()) throw ParseError(where + ": field \"answer\" must be non-empty");
    out.push_back(std::move(partial));
  }
  return out;
}

std::string serialize_full_entries(std::span<const FullEntry> entries) {
  json out = json::array();
  for (const auto& entry : entries)
    out.push_back({{"question", entry.question}, {"answers", entry.answers}});
  return out.dump();
}

std::string audit_to_jsonl(std::span<const AuditRecord> records) {
  std::string out;
  for (const auto& record : records) {
    json line = {{"iteration", record.iteration},
                 {"id", record.id},
                 {"question", record.question},
                 {"known_answer", record.known_answer},
                 {"prefixed", record.prefixed},
                 {"unprefixed", record.unprefixed},
                 {"verdict", record.verdict},
                 {"added_answers", record.added_answers}};
    out += line.dump();
    out.push_back('\n');
  }
  return out;
}

CotrainState democratic_cotrain(std::span<const AnnotatedExample> d_full,
                                std::span<const PartialExample> d_partial,
                                const CotrainConfig& config,
                                std::span<const std::unique_ptr<Predictor>> models) {
  if (config.iterations < 1) throw std::invalid_argument("cotrain: iterations must be >= 1");
  if (models.empty()) throw std::invalid_argument("cotrain: no predictors");
  if (config.model_count != 0 && static_cast<std::size_t>(config.model_count) != models.size())
    throw std::invalid_argument("cotrain: model_count does not match the number of predictors");
  if (d_full.empty()) throw std::invalid_argument("cotrain: empty full dataset");

  std::unordered_set<std::string_view> full_ids;
  for (const auto& example : d_full) full_ids.insert(example.id);
  std::unordered_set<std::string_view> partial_ids;
  for (const auto& partial : d_partial) {
    if (!partial_ids.insert(partial.id).second)
      throw std::invalid_argument("cotrain: duplicate partial id \"" + partial.id + "\"");
    if (full_ids.count(partial.id))
      throw std::invalid_argument("cotrain: partial id \"" + partial.id +
                                  "\" also present in the full dataset");
  }

  const std::size_t model_count = models.size();
  const auto wrap = [&](std::size_t index, const std::string& request_id, auto&& action) {
    try {
      return action();
    } catch (const std::exception& e) {
      throw CotrainError("predictor " + std::to_string(index) + ", request \"" + request_id +
                         "\": " + e.what());
    }
  };

  const std::vector<FullEntry> seed = to_full_entries(d_full);
  CotrainState state;
  state.d_full_hat = seed;

  const auto predict_round = [&](const PartialExample& partial,
                                 const std::optional<std::string>& prefix) {
    for (std::size_t i = 0; i < model_count; ++i)
      wrap(i, partial.id, [&] { models[i]->begin_predict(partial.id, partial.question, prefix); return 0; });
    std::vector<std::vector<std::string>> responses(model_count);
    for (std::size_t i = 0; i < model_count; ++i)
      responses[i] = wrap(i, partial.id, [&] { return models[i]->finish_predict(); });
    return responses;
  };

  for (int iteration = 1; iteration <= config.iterations; ++iteration) {
    const std::string train_id = "train#" + std::to_string(iteration);
    for (std::size_t i = 0; i < model_count; ++i)
      wrap(i, train_id, [&] { models[i]->begin_train(iteration, state.d_full_hat); return 0; });
    for (std::size_t i = 0; i < model_count; ++i)
      wrap(i, train_id, [&] { models[i]->finish_train(); return 0; });

    // additions rebase on the seed set each iteration
    std::vector<FullEntry> additions;
    for (const auto& partial : d_partial) {
      AuditRecord record;
      record.iteration = iteration;
      record.id = partial.id;
      record.question = partial.question;
      record.known_answer = partial.answer;
      record.prefixed = predict_round(partial, partial.answer);
      record.unprefixed = predict_round(partial, std::nullopt);

      const auto extra = vote_additional_answers(record.prefixed, partial.answer);
      if (!extra.empty()) {
        FullEntry entry;
        entry.question = partial.question;
        entry.answers.push_back(partial.answer);
        entry.answers.insert(entry.answers.end(), extra.begin(), extra.end());
        additions.push_back(std::move(entry));
        record.verdict = "multi";
        record.added_answers = extra;
      } else if (single_answer_consensus(record.unprefixed, partial.answer)) {
        additions.push_back({partial.question, {partial.answer}});
        record.verdict = "single";
      } else {
        record.verdict = "skip";
      }
      state.audit_log.push_back(std::move(record));
    }
    state.d_full_hat = seed;
    state.d_full_hat.insert(state.d_full_hat.end(), additions.begin(), additions.end());
  }
  return state;
}

}  // namespace ambig
