#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ontomatch {

/// Canonical text cleanup applied to every concept string before it is
/// embedded, indexed or substituted into a prompt: ASCII lowercasing, each
/// ASCII punctuation character replaced by a space, whitespace runs collapsed
/// to a single space, leading/trailing whitespace stripped. Bytes outside the
/// ASCII range pass through untouched, so UTF-8 sequences stay intact.
/// Idempotent and total.
std::string normalize_text(std::string_view raw);

/// normalize_text followed by splitting on single spaces. Empty input yields
/// an empty token list.
std::vector<std::string> tokenize(std::string_view raw);

}  // namespace ontomatch
