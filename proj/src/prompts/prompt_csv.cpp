#include "signcrowd/prompts/prompt_csv.hpp"

#include <algorithm>
#include <cctype>

#include <unicode/utf8.h>

#include "signcrowd/core/text.hpp"

namespace signcrowd {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim_ascii(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool needs_quotes(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos ||
           (!field.empty() && (field.front() == ' ' || field.back() == ' '));
}

void write_field(std::string& out, std::string_view field) {
    if (!needs_quotes(field)) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

bool blank_record(const std::vector<std::string>& record) {
    return record.size() == 1 && record.front().empty();
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) {
    const auto* p = reinterpret_cast<const uint8_t*>(bytes.data());
    const auto n = static_cast<int32_t>(bytes.size());
    int32_t i = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c < 0) return false;
    }
    return true;
}

std::vector<std::vector<std::string>> parse_csv_records(std::string_view bytes) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any = false;

    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        any = false;
    };

    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const char c = bytes[i];
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                break;
            case '\r':
                if (i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field += c;
        }
    }
    if (any) end_record();
    return records;
}

PromptCsv parse_prompt_csv(std::string_view bytes, std::size_t max_bytes) {
    if (bytes.size() > max_bytes) {
        throw Error(ErrorCode::TooLarge, "CSV exceeds " + std::to_string(max_bytes) + " bytes");
    }
    if (!is_valid_utf8(bytes)) throw Error(ErrorCode::BadHeader, "input is not valid UTF-8");
    if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);

    const auto records = parse_csv_records(bytes);
    if (records.empty()) throw Error(ErrorCode::BadHeader, "missing header row");

    const auto& header = records.front();
    const bool header_ok = header.size() == 3 && ascii_lower(trim_ascii(header[0])) == "content" &&
                           ascii_lower(trim_ascii(header[1])) == "content_type" &&
                           ascii_lower(trim_ascii(header[2])) == "language";
    if (!header_ok) {
        throw Error(ErrorCode::BadHeader, "header must be content,content_type,language");
    }

    PromptCsv out;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& record = records[r];
        if (blank_record(record)) continue;
        const std::size_t row = r + 1;
        ++out.data_rows;
        if (record.size() != 3) {
            out.errors.push_back({row, ErrorCode::BadColumnCount,
                                  "expected 3 columns, got " + std::to_string(record.size())});
            continue;
        }
        const auto content = std::string(trim_ascii(record[0]));
        const auto type_name = ascii_lower(trim_ascii(record[1]));
        const auto language = std::string(trim_ascii(record[2]));
        if (normalize_text(content).empty()) {
            out.errors.push_back({row, ErrorCode::EmptyContent, "content is empty"});
            continue;
        }
        const auto type = enum_from_string<ContentType>(type_name);
        if (!type) {
            out.errors.push_back(
                {row, ErrorCode::BadType, "content_type must be text or topic, got '" + type_name + "'"});
            continue;
        }
        if (!is_valid_language_code(language)) {
            out.errors.push_back({row, ErrorCode::BadLanguage, "malformed language '" + language + "'"});
            continue;
        }
        out.drafts.push_back({row, content, *type, language});
    }
    return out;
}

std::string serialize_prompt_csv(const std::vector<PromptDraft>& drafts) {
    std::string out = "content,content_type,language\n";
    for (const auto& d : drafts) {
        write_field(out, d.content);
        out += ',';
        out += to_string(d.content_type);
        out += ',';
        write_field(out, d.language);
        out += '\n';
    }
    return out;
}

}  // namespace signcrowd
