#include "signcrowd/core/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "signcrowd/error.hpp"

namespace signcrowd {

namespace {

constexpr UChar32 kDanda = 0x0964;

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_sentence_terminator(UChar32 c) { return c == kDanda || c == '?' || c == '!' || c == '.'; }

bool is_token_punct(UChar32 c) {
    switch (c) {
        case kDanda:
        case '?':
        case '!':
        case '.':
        case ',':
        case ';':
        case ':':
            return true;
        default:
            return false;
    }
}

std::u32string decode(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(bytes, i, length, c);
        out.push_back(c < 0 ? 0xFFFD : static_cast<char32_t>(c));
    }
    return out;
}

std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t c : cps) {
        uint8_t buf[4];
        int32_t n = 0;
        UBool error = false;
        U8_APPEND(buf, n, 4, static_cast<UChar32>(c), error);
        if (error) continue;
        out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
    }
    return out;
}

std::u32string_view trim(std::u32string_view s) {
    while (!s.empty() && is_space(static_cast<UChar32>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<UChar32>(s.back()))) s.remove_suffix(1);
    return s;
}

const icu::Normalizer2& nfc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || norm == nullptr) {
        throw Error(ErrorCode::Io, std::string("ICU NFC unavailable: ") + u_errorName(status));
    }
    return *norm;
}

}  // namespace

std::string nfc(std::string_view text) {
    const auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    UErrorCode status = U_ZERO_ERROR;
    const auto normalized = nfc_instance().normalize(src, status);
    if (U_FAILURE(status)) throw Error(ErrorCode::BadRequest, "text cannot be normalized");
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::string normalize_text(std::string_view text) {
    const auto cps = decode(nfc(text));
    std::u32string out;
    out.reserve(cps.size());
    bool pending_space = false;
    for (char32_t c : cps) {
        if (is_space(static_cast<UChar32>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(U' ');
        pending_space = false;
        out.push_back(c);
    }
    return encode(out);
}

std::string case_fold(std::string_view text) {
    const auto normalized = nfc(text);
    auto str = icu::UnicodeString::fromUTF8(
        icu::StringPiece(normalized.data(), static_cast<int32_t>(normalized.size())));
    str.foldCase();
    std::string out;
    str.toUTF8String(out);
    return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
    const auto cps = decode(text);
    std::vector<std::string> sentences;
    std::size_t begin = 0;
    auto emit = [&](std::size_t end) {
        const auto piece = trim(std::u32string_view(cps).substr(begin, end - begin));
        if (!piece.empty()) sentences.push_back(encode(piece));
        begin = end;
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (!is_sentence_terminator(static_cast<UChar32>(cps[i]))) continue;
        const bool at_end = i + 1 == cps.size();
        if (at_end || is_space(static_cast<UChar32>(cps[i + 1]))) emit(i + 1);
    }
    emit(cps.size());
    return sentences;
}

std::vector<std::string> tokenize_words(std::string_view text) {
    const auto cps = decode(text);
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_space(static_cast<UChar32>(cps[i]))) ++i;
        std::size_t j = i;
        while (j < cps.size() && !is_space(static_cast<UChar32>(cps[j]))) ++j;
        std::size_t b = i;
        std::size_t e = j;
        while (b < e && is_token_punct(static_cast<UChar32>(cps[b]))) ++b;
        while (e > b && is_token_punct(static_cast<UChar32>(cps[e - 1]))) --e;
        if (e > b) tokens.push_back(encode(std::u32string_view(cps).substr(b, e - b)));
        i = j;
    }
    return tokens;
}

void SentenceSplitters::set(std::string language, SentenceSplitter splitter) {
    overrides_[std::move(language)] = std::move(splitter);
}

std::vector<std::string> SentenceSplitters::split(std::string_view text,
                                                  std::string_view language) const {
    if (auto it = overrides_.find(language); it != overrides_.end()) return it->second(text);
    return split_sentences(text);
}

}  // namespace signcrowd
