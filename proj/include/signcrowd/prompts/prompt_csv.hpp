#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/core/types.hpp"
#include "signcrowd/error.hpp"

namespace signcrowd {

inline constexpr std::size_t kDefaultCsvMaxBytes = 10u << 20;

struct PromptDraft {
    std::size_t row_number = 0;  // header is row 1
    std::string content;
    ContentType content_type = ContentType::Text;
    std::string language;

    bool operator==(const PromptDraft&) const = default;
};

struct RowError {
    std::size_t row_number = 0;
    ErrorCode code = ErrorCode::BadColumnCount;
    std::string detail;

    bool operator==(const RowError&) const = default;
};

struct PromptCsv {
    std::vector<PromptDraft> drafts;
    std::vector<RowError> errors;
    std::size_t data_rows = 0;
};

/// Parses an admin prompt upload. The header must be `content,content_type,language`
/// (case-insensitive); every data row yields either a draft or one RowError.
/// Throws E_BAD_HEADER for a missing/mismatched header or undecodable input and
/// E_TOO_LARGE above `max_bytes`.
PromptCsv parse_prompt_csv(std::string_view bytes, std::size_t max_bytes = kDefaultCsvMaxBytes);

/// Writes drafts back out with a header, quoting fields per RFC 4180 where needed.
std::string serialize_prompt_csv(const std::vector<PromptDraft>& drafts);

/// Raw RFC 4180 record splitting (quoted fields, doubled quotes, CRLF or LF).
std::vector<std::vector<std::string>> parse_csv_records(std::string_view bytes);

bool is_valid_utf8(std::string_view bytes);

}  // namespace signcrowd
