#include "ambig/data_model.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "ambig/text_norm.hpp"

namespace ambig {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ParseError(message); }

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string(what) + ": invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

const json& require_field(const json& object, const char* field, const std::string& where) {
  const auto it = object.find(field);
  if (it == object.end() || it->is_null()) fail(where + ": missing field \"" + field + "\"");
  return *it;
}

std::string require_string(const json& object, const char* field, const std::string& where) {
  const json& value = require_field(object, field, where);
  if (!value.is_string()) fail(where + ": field \"" + field + "\" must be a string");
  return value.get<std::string>();
}

std::vector<std::string> require_string_array(const json& object, const char* field,
                                              const std::string& where) {
  const json& value = require_field(object, field, where);
  if (!value.is_array() || value.empty())
    fail(where + ": field \"" + field + "\" must be a non-empty array");
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) fail(where + ": field \"" + field + "\" must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string trimmed(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

std::vector<AnnotatedExample> parse_dataset(std::string_view json_text) {
  const json root = parse_json(json_text, "dataset");
  if (!root.is_array()) fail("dataset: top level must be an array");

  std::vector<AnnotatedExample> out;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t k = 0; k < root.size(); ++k) {
    const json& item = root[k];
    const std::string slot = "dataset[" + std::to_string(k) + "]";
    if (!item.is_object()) fail(slot + ": must be an object");

    AnnotatedExample example;
    example.id = require_string(item, "id", slot);
    const std::string where = "example \"" + example.id + "\"";
    if (!seen_ids.insert(example.id).second) fail("duplicate example id \"" + example.id + "\"");
    example.prompt = require_string(item, "question", where);

    const json& annotations = require_field(item, "annotations", where);
    if (!annotations.is_array() || annotations.empty())
      fail(where + ": field \"annotations\" must be a non-empty array");

    for (std::size_t a = 0; a < annotations.size(); ++a) {
      const json& ann = annotations[a];
      const std::string ann_where = where + ".annotations[" + std::to_string(a) + "]";
      if (!ann.is_object()) fail(ann_where + ": must be an object");
      const std::string type = require_string(ann, "type", ann_where);

      ReferenceAnnotation reference;
      if (type == "singleAnswer") {
        reference.kind = AnnotationKind::kSingle;
        ReferencePair pair;
        pair.question = example.prompt;
        pair.answers = require_string_array(ann, "answer", ann_where);
        reference.pairs.push_back(std::move(pair));
      } else if (type == "multipleQAs") {
        reference.kind = AnnotationKind::kMultiple;
        const json& qa_pairs = require_field(ann, "qaPairs", ann_where);
        if (!qa_pairs.is_array() || qa_pairs.empty())
          fail(ann_where + ": field \"qaPairs\" must be a non-empty array");
        for (std::size_t p = 0; p < qa_pairs.size(); ++p) {
          const json& qa = qa_pairs[p];
          const std::string qa_where = ann_where + ".qaPairs[" + std::to_string(p) + "]";
          if (!qa.is_object()) fail(qa_where + ": must be an object");
          ReferencePair pair;
          pair.question = require_string(qa, "question", qa_where);
          pair.answers = require_string_array(qa, "answer", qa_where);
          reference.pairs.push_back(std::move(pair));
        }
      } else {
        fail(ann_where + ": unknown annotation type \"" + type + "\"");
      }
      example.annotations.push_back(std::move(reference));
    }
    out.push_back(std::move(example));
  }
  return out;
}

std::string serialize_dataset(const std::vector<AnnotatedExample>& dataset) {
  json root = json::array();
  for (const auto& example : dataset) {
    json annotations = json::array();
    for (const auto& annotation : example.annotations) {
      json ann;
      if (annotation.kind == AnnotationKind::kSingle) {
        ann["type"] = "singleAnswer";
        ann["answer"] = annotation.pairs.empty() ? std::vector<std::string>{}
                                                 : annotation.pairs.front().answers;
      } else {
        ann["type"] = "multipleQAs";
        json qa_pairs = json::array();
        for (const auto& pair : annotation.pairs)
          qa_pairs.push_back({{"question", pair.question}, {"answer", pair.answers}});
        ann["qaPairs"] = std::move(qa_pairs);
      }
      annotations.push_back(std::move(ann));
    }
    root.push_back({{"id", example.id},
                    {"question", example.prompt},
                    {"annotations", std::move(annotations)}});
  }
  return root.dump();
}

std::vector<PredictedExample> parse_predictions(std::string_view json_text) {
  const json root = parse_json(json_text, "predictions");
  if (!root.is_object()) fail("predictions: top level must be an object mapping id to pairs");

  std::vector<PredictedExample> out;
  for (const auto& [id, pairs] : root.items()) {
    const std::string where = "prediction \"" + id + "\"";
    if (!pairs.is_array()) fail(where + ": must be an array of {question, answer}");
    if (pairs.empty()) fail(where + ": empty prediction");

    PredictedExample prediction;
    prediction.id = id;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const json& entry = pairs[k];
      const std::string pair_where = where + "[" + std::to_string(k) + "]";
      if (!entry.is_object()) fail(pair_where + ": must be an object");
      PredictedPair pair;
      pair.answer = require_string(entry, "answer", pair_where);
      if (pair.answer.empty()) fail(pair_where + ": field \"answer\" must be non-empty");
      const auto question = entry.find("question");
      if (question != entry.end() && !question->is_null()) {
        if (!question->is_string()) fail(pair_where + ": field \"question\" must be a string");
        pair.question = question->get<std::string>();
      } else if (pairs.size() > 1) {
        // the prompt stands in only when the prediction has a single pair
        fail(pair_where + ": missing field \"question\"");
      }
      prediction.pairs.push_back(std::move(pair));
    }
    out.push_back(std::move(prediction));
  }
  return out;
}

std::string serialize_predictions(const std::vector<PredictedExample>& predictions) {
  json root = json::object();
  for (const auto& prediction : predictions) {
    json pairs = json::array();
    for (const auto& pair : prediction.pairs) {
      json entry = json::object();
      if (pair.question) entry["question"] = *pair.question;
      entry["answer"] = pair.answer;
      pairs.push_back(std::move(entry));
    }
    root[prediction.id] = std::move(pairs);
  }
  return root.dump();
}

std::vector<CandidateSet> parse_candidates(std::string_view json_text) {
  const json root = parse_json(json_text, "candidates");
  if (!root.is_object()) fail("candidates: top level must be an object mapping id to candidates");

  std::vector<CandidateSet> out;
  for (const auto& [id, items] : root.items()) {
    const std::string where = "candidates \"" + id + "\"";
    if (!items.is_array() || items.empty()) fail(where + ": must be a non-empty array");
    CandidateSet set;
    set.id = id;
    for (std::size_t k = 0; k < items.size(); ++k) {
      const json& entry = items[k];
      const std::string entry_where = where + "[" + std::to_string(k) + "]";
      if (!entry.is_object()) fail(entry_where + ": must be an object");
      Candidate candidate;
      candidate.answer = require_string(entry, "answer", entry_where);
      const json& score = require_field(entry, "score", entry_where);
      if (!score.is_number()) fail(entry_where + ": field \"score\" must be a number");
      candidate.score = score.get<double>();
      if (!std::isfinite(candidate.score)) fail(entry_where + ": field \"score\" must be finite");
      set.candidates.push_back(std::move(candidate));
    }
    out.push_back(std::move(set));
  }
  return out;
}

ValidationReport validate_dataset(const std::vector<AnnotatedExample>& dataset) {
  ValidationReport report;
  for (const auto& example : dataset) {
    if (trimmed(example.prompt).empty())
      report.push_back({example.id, "empty prompt", ""});

    for (std::size_t a = 0; a < example.annotations.size(); ++a) {
      const auto& annotation = example.annotations[a];
      const std::string where = "annotations[" + std::to_string(a) + "]";

      if (annotation.kind == AnnotationKind::kMultiple && annotation.pairs.size() < 2)
        report.push_back({example.id, "multipleQAs with fewer than 2 pairs", where});

      std::vector<std::set<std::string>> normalized_sets;
      for (std::size_t p = 0; p < annotation.pairs.size(); ++p) {
        const auto& pair = annotation.pairs[p];
        const std::string pair_where = where + ".pairs[" + std::to_string(p) + "]";
        if (annotation.kind == AnnotationKind::kMultiple && pair.question == example.prompt)
          report.push_back({example.id, "question equals prompt", pair_where});
        std::set<std::string> forms;
        for (const auto& answer : pair.answers) {
          if (trimmed(answer).empty())
            report.push_back({example.id, "empty answer string", pair_where});
          forms.insert(normalize_answer(answer));
        }
        normalized_sets.push_back(std::move(forms));
      }

      for (std::size_t i = 0; i < normalized_sets.size(); ++i) {
        for (std::size_t j = i + 1; j < normalized_sets.size(); ++j) {
          for (const auto& form : normalized_sets[i]) {
            if (normalized_sets[j].count(form)) {
              report.push_back({example.id, "overlapping answer sets",
                                where + ": pairs " + std::to_string(i) + " and " +
                                    std::to_string(j) + " share \"" + form + "\""});
              break;
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace ambig
