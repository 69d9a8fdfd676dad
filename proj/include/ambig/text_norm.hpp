#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ambig {

// Canonical answer form used everywhere answers are compared: folds
// typographic punctuation to ASCII, lowercases, strips punctuation, removes
// the articles "a"/"an"/"the" as whole words and collapses whitespace.
std::string normalize_answer(std::string_view text);

// Lowercased, punctuation-free question tokens. Articles and other function
// words are kept; question edits such as determiner changes carry meaning.
std::vector<std::string> tokenize_question(std::string_view text);

// True iff the prediction equals one of the gold surface forms after
// normalization.
bool answer_match(std::string_view prediction, std::span<const std::string> gold);

}  // namespace ambig
