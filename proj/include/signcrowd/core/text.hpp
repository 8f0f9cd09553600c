#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace signcrowd {

/// Unicode NFC normalization of UTF-8 text.
std::string nfc(std::string_view text);

/// NFC, every run of Unicode whitespace collapsed to one ASCII space, trimmed.
std::string normalize_text(std::string_view text);

/// Full Unicode case folding (after NFC). Scripts without case pass through.
std::string case_fold(std::string_view text);

/// Splits after `।`, `?`, `!` or `.` when followed by whitespace or end of text.
/// Terminators stay on their sentence; sentences are trimmed; empty ones dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// Whitespace split with leading/trailing `। ? ! . , ; :` stripped from each token.
std::vector<std::string> tokenize_words(std::string_view text);

using SentenceSplitter = std::function<std::vector<std::string>(std::string_view)>;

/// Per-language sentence splitting; languages without an override use `split_sentences`.
class SentenceSplitters {
public:
    void set(std::string language, SentenceSplitter splitter);
    std::vector<std::string> split(std::string_view text, std::string_view language) const;

private:
    std::map<std::string, SentenceSplitter, std::less<>> overrides_;
};

}  // namespace signcrowd
