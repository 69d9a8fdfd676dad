#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ambig {

// One distinct answer: the disambiguated question that selects it plus the
// acceptable surface forms. For single-answer annotations the question equals
// the prompt.
struct ReferencePair {
  std::string question;
  std::vector<std::string> answers;
  bool operator==(const ReferencePair&) const = default;
};

enum class AnnotationKind { kSingle, kMultiple };

struct ReferenceAnnotation {
  AnnotationKind kind = AnnotationKind::kSingle;
  std::vector<ReferencePair> pairs;
  bool operator==(const ReferenceAnnotation&) const = default;
};

struct AnnotatedExample {
  std::string id;
  std::string prompt;
  std::vector<ReferenceAnnotation> annotations;  // one per accepted annotator
  bool operator==(const AnnotatedExample&) const = default;
};

struct PredictedPair {
  std::optional<std::string> question;  // may be absent for single-pair predictions
  std::string answer;
  bool operator==(const PredictedPair&) const = default;
};

struct PredictedExample {
  std::string id;
  std::vector<PredictedPair> pairs;  // order exactly as produced by the system
  bool operator==(const PredictedExample&) const = default;
};

struct Candidate {
  std::string answer;
  double score = 0.0;  // any monotone confidence (likelihood, log-likelihood)
};

struct CandidateSet {
  std::string id;
  std::vector<Candidate> candidates;
};

struct Violation {
  std::string id;
  std::string rule;
  std::string detail;
};
using ValidationReport = std::vector<Violation>;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);

std::vector<AnnotatedExample> parse_dataset(std::string_view json_text);
std::string serialize_dataset(const std::vector<AnnotatedExample>& dataset);

std::vector<PredictedExample> parse_predictions(std::string_view json_text);
std::string serialize_predictions(const std::vector<PredictedExample>& predictions);

std::vector<CandidateSet> parse_candidates(std::string_view json_text);

// Reports semantic defects (overlapping answer sets, rewrites equal to the
// prompt, ...) as data instead of failing, so imperfect third-party files
// stay auditable. Empty report iff all invariants hold.
ValidationReport validate_dataset(const std::vector<AnnotatedExample>& dataset);

}  // namespace ambig
