#include "oracles.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace signcrowd::oracle {

const std::map<std::pair<std::string, std::string>, std::string>& transition_table() {
    static const std::map<std::pair<std::string, std::string>, std::string> table{
        {{"PendingVideoValidation", "VideoVerdictCorrect"}, "PendingAnnotation"},
        {{"PendingVideoValidation", "VideoVerdictIncorrect"}, "VideoRejected"},
        {{"PendingAnnotation", "AnnotationSubmitted"}, "PendingAnnotationValidation"},
        {{"PendingAnnotationValidation", "AnnotationVerdictAccepted"}, "AnnotationValidated"},
        {{"PendingAnnotationValidation", "AnnotationVerdictCorrected"}, "AnnotationValidated"},
        {{"VideoRejected", "Requeue"}, "PendingVideoValidation"},
    };
    return table;
}

std::string sha256_hex(const std::string& bytes) {
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
    unsigned char out[crypto_hash_sha256_BYTES];
    crypto_hash_sha256(out, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
    std::string hex;
    char buf[3];
    for (unsigned char b : out) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        hex += buf;
    }
    return hex;
}

std::string srt_time(std::int64_t ms) {
    std::int64_t h = 0, m = 0, s = 0;
    while (ms >= 3'600'000) {
        ms -= 3'600'000;
        ++h;
    }
    while (ms >= 60'000) {
        ms -= 60'000;
        ++m;
    }
    while (ms >= 1000) {
        ms -= 1000;
        ++s;
    }
    auto two = [](std::int64_t v) { return (v < 10 ? "0" : "") + std::to_string(v); };
    std::string milli = std::to_string(ms);
    while (milli.size() < 3) milli.insert(milli.begin(), '0');
    return two(h) + ":" + two(m) + ":" + two(s) + "," + milli;
}

std::string srt_text(const std::vector<Segment>& segments, std::int64_t offset) {
    std::string out;
    int n = 0;
    for (const auto& s : segments) {
        out += std::to_string(++n) + "\n" + srt_time(s.start_ms - offset) + " --> " + srt_time(s.end_ms - offset) +
               "\n" + s.text + "\n\n";
    }
    return out;
}

const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> words{
        "আমি", "আগামীকাল", "বেড়াতে", "যাবো", "সব", "কিছু", "ঠিক", "আছে", "তো", "ভালো", "বই", "পড়ি",
        "hello", "World", "world", "sign", "Language", "data", "video", "good", "Morning", "morning",
    };
    return words;
}

namespace {

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& v) {
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

std::string collapse_spaces(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

bool has_space(const std::string& s) { return s.find_first_of(" \t\n\r") != std::string::npos; }

const std::vector<std::string> kTerminators{"।", "?", "!", "."};

}  // namespace

TrackCase generate_track_case(std::mt19937_64& rng) {
    TrackCase c;
    const int sentences = static_cast<int>(uniform(rng, 1, 4));
    for (int i = 0; i < sentences; ++i) {
        const int n = static_cast<int>(uniform(rng, 1, 5));
        std::string sentence;
        for (int w = 0; w < n; ++w) {
            const auto& word = pick(rng, vocabulary());
            c.words.push_back(word);
            if (w > 0) sentence += ' ';
            sentence += word;
        }
        sentence += pick(rng, kTerminators);
        c.sentences.push_back(sentence);
        if (i > 0) c.reference += ' ';
        c.reference += sentence;
    }

    c.track.kind = uniform(rng, 0, 1) == 0 ? TrackKind::Sentence : TrackKind::Gloss;
    const auto& units = c.track.kind == TrackKind::Sentence ? c.sentences : c.words;
    c.trim.start_ms = uniform(rng, 0, 3000);
    std::int64_t cursor = c.trim.start_ms + uniform(rng, 0, 500);
    for (const auto& u : units) {
        Segment s{cursor, cursor + uniform(rng, 100, 2000), u};
        cursor = s.end_ms + uniform(rng, 0, 300);
        c.track.segments.push_back(s);
    }
    c.trim.end_ms = cursor + uniform(rng, 1, 1000);
    c.mutation = "none";
    if (uniform(rng, 0, 1) == 0) return c;

    auto& segs = c.track.segments;
    const auto last = segs.size() - 1;
    const bool gloss = c.track.kind == TrackKind::Gloss;
    switch (uniform(rng, 0, 10)) {
        case 0:
            if (segs.size() < 2) break;
            {
                const auto i = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(last)));
                segs[i].start_ms = segs[i - 1].end_ms - 1;
                c.mutation = "overlap";
            }
            break;
        case 1:
            if (segs.size() < 2) break;
            {
                const auto i = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(last)));
                std::swap(segs[i - 1], segs[i]);
                c.mutation = "swap";
            }
            break;
        case 2:
            segs[0].start_ms = c.trim.start_ms - uniform(rng, 1, 200);
            c.mutation = "before-trim";
            break;
        case 3:
            segs[last].end_ms = c.trim.end_ms + uniform(rng, 1, 200);
            c.mutation = "after-trim";
            break;
        case 4: {
            auto& s = segs[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(last)))];
            if (gloss) {
                std::string other;
                do other = pick(rng, vocabulary());
                while (other == s.text);
                s.text = other;
            } else {
                s.text = "zzz " + s.text;
            }
            c.mutation = "text";
            break;
        }
        case 5:
            segs.erase(segs.begin() + uniform(rng, 0, static_cast<std::int64_t>(last)));
            c.mutation = "drop";
            break;
        case 6: {
            Segment extra{c.trim.end_ms, c.trim.end_ms + 100, segs[last].text};
            c.trim.end_ms += 100;
            segs.push_back(extra);
            c.mutation = "extra";
            break;
        }
        case 7:
            if (gloss) {
                segs[0].text += " " + pick(rng, vocabulary());
                c.mutation = "multiword";
            } else {
                std::string spaced = "  ";
                for (char ch : segs[0].text) {
                    spaced += ch;
                    if (ch == ' ') spaced += "  ";
                }
                segs[0].text = spaced + " ";
                c.mutation = "respaced";
            }
            break;
        case 8:
            segs[last].end_ms = segs[last].start_ms;
            c.mutation = "zero-length";
            break;
        case 9:
            segs[0].text = uniform(rng, 0, 1) == 0 ? "" : "   ";
            c.mutation = "blank";
            break;
        case 10: {
            // Move one segment inside its free gap; still valid.
            const auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(last)));
            const auto lo = i == 0 ? c.trim.start_ms : segs[i - 1].end_ms;
            const auto hi = (i == last ? c.trim.end_ms : segs[i + 1].start_ms) - segs[i].end_ms;
            const auto shift_back = segs[i].start_ms - lo;
            const auto delta = uniform(rng, -shift_back, hi);
            segs[i].start_ms += delta;
            segs[i].end_ms += delta;
            c.mutation = "shift";
            break;
        }
    }
    return c;
}

bool track_acceptable(const TrackCase& c) {
    const auto& segs = c.track.segments;
    if (segs.empty()) return false;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        if (s.start_ms >= s.end_ms) return false;
        if (s.start_ms < c.trim.start_ms || s.end_ms > c.trim.end_ms) return false;
        if (collapse_spaces(s.text).empty()) return false;
        if (s.text.find_first_of("\r\n") != std::string::npos) return false;
        if (i > 0 && s.start_ms < segs[i - 1].end_ms) return false;
    }
    const auto& units = c.track.kind == TrackKind::Sentence ? c.sentences : c.words;
    if (segs.size() != units.size()) return false;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (c.track.kind == TrackKind::Sentence) {
            if (collapse_spaces(segs[i].text) != units[i]) return false;
        } else {
            if (has_space(segs[i].text) || segs[i].text != units[i]) return false;
        }
    }
    return true;
}

AnnotationTrack random_valid_track(std::mt19937_64& rng, TrimWindow& trim) {
    AnnotationTrack t;
    t.kind = uniform(rng, 0, 1) == 0 ? TrackKind::Sentence : TrackKind::Gloss;
    t.recording_id = "r";
    t.annotator_id = "a";
    // Occasionally push into multi-hour territory.
    trim.start_ms = uniform(rng, 0, 1) == 0 ? uniform(rng, 0, 5000) : uniform(rng, 0, 400'000'000);
    std::int64_t cursor = trim.start_ms + uniform(rng, 0, 999);
    const int n = static_cast<int>(uniform(rng, 1, 12));
    for (int i = 0; i < n; ++i) {
        std::string text = pick(rng, vocabulary());
        const int extra = static_cast<int>(uniform(rng, 0, 3));
        for (int k = 0; k < extra; ++k) text += (uniform(rng, 0, 4) == 0 ? "\n" : " ") + pick(rng, vocabulary());
        if (uniform(rng, 0, 3) == 0) text += pick(rng, kTerminators);
        Segment s{cursor, cursor + uniform(rng, 1, 9999), text};
        cursor = s.end_ms + uniform(rng, 0, 2500);
        t.segments.push_back(s);
    }
    trim.end_ms = cursor + uniform(rng, 0, 500) + 1;
    return t;
}

std::vector<std::vector<std::string>> read_csv(const std::string& bytes) {
    enum class St { FieldStart, Plain, Quoted, QuoteInQuoted };
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    St st = St::FieldStart;
    bool pending = false;
    auto finish_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto finish_row = [&] {
        finish_field();
        rows.push_back(row);
        row.clear();
        pending = false;
    };
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const char ch = bytes[i];
        pending = true;
        switch (st) {
            case St::Quoted:
                if (ch == '"') st = St::QuoteInQuoted;
                else field += ch;
                break;
            case St::QuoteInQuoted:
                if (ch == '"') {
                    field += '"';
                    st = St::Quoted;
                    break;
                }
                st = St::Plain;
                [[fallthrough]];
            case St::FieldStart:
            case St::Plain:
                if (ch == '"') {
                    st = St::Quoted;
                } else if (ch == ',') {
                    finish_field();
                    st = St::FieldStart;
                } else if (ch == '\n' || ch == '\r') {
                    if (ch == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
                    finish_row();
                    st = St::FieldStart;
                } else {
                    field += ch;
                    st = St::Plain;
                }
                break;
        }
    }
    if (pending) finish_row();
    return rows;
}

namespace {

std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string lower(std::string s) {
    for (auto& ch : s) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return s;
}

bool language_shaped(const std::string& code) {
    const auto dash = code.find('-');
    if (dash == std::string::npos) return false;
    const auto spoken = code.substr(0, dash);
    const auto sign = code.substr(dash + 1);
    if (spoken.size() < 2 || spoken.size() > 3 || sign.size() < 2 || sign.size() > 8) return false;
    for (char ch : spoken)
        if (ch < 'a' || ch > 'z') return false;
    for (char ch : sign)
        if (!((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z'))) return false;
    return true;
}

}  // namespace

std::vector<CsvRowVerdict> classify_ingest(const std::string& bytes, const std::set<std::string>& languages,
                                           std::set<std::tuple<std::string, std::string, std::string>>& seen) {
    std::vector<CsvRowVerdict> out;
    const auto rows = read_csv(bytes);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        CsvRowVerdict v{r + 1, {}};
        if (row.size() != 3) {
            v.outcome = "E_BAD_COLUMN_COUNT";
        } else {
            const auto content = collapse_spaces(trim_ws(row[0]));
            const auto type = lower(trim_ws(row[1]));
            const auto lang = trim_ws(row[2]);
            if (content.empty()) v.outcome = "E_EMPTY_CONTENT";
            else if (type != "text" && type != "topic") v.outcome = "E_BAD_TYPE";
            else if (!language_shaped(lang)) v.outcome = "E_BAD_LANGUAGE";
            else if (!languages.contains(lang)) v.outcome = "E_UNKNOWN_LANGUAGE";
            else v.outcome = seen.insert({content, type, lang}).second ? "accepted" : "duplicate";
        }
        out.push_back(v);
    }
    return out;
}

namespace {

std::vector<std::string> words_of(const std::string& transcript) {
    static const std::vector<std::string> punct{"।", "?", "!", ".", ",", ";", ":"};
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        bool stripped = true;
        while (stripped && !cur.empty()) {
            stripped = false;
            for (const auto& p : punct) {
                if (cur.size() >= p.size() && cur.compare(cur.size() - p.size(), p.size(), p) == 0) {
                    cur.erase(cur.size() - p.size());
                    stripped = true;
                }
                if (cur.size() >= p.size() && cur.compare(0, p.size(), p) == 0) {
                    cur.erase(0, p.size());
                    stripped = true;
                }
            }
        }
        if (!cur.empty()) words.push_back(cur);
        cur.clear();
    };
    for (char ch : transcript) {
        if (ch == ' ' || ch == '\n' || ch == '\t') flush();
        else cur += ch;
    }
    flush();
    return words;
}

}  // namespace

StatsRecount recount_stats(const std::vector<ManifestEntry>& entries) {
    StatsRecount s;
    std::set<std::string> unique;
    std::int64_t total_ms = 0;
    for (const auto& e : entries) {
        ++s.count;
        const bool topic = e.content_type == ContentType::Topic;
        (topic ? s.spontaneous : s.scripted) += 1;
        const auto words = words_of(topic ? e.script.value_or("") : e.prompt_content);
        s.total_words += static_cast<std::int64_t>(words.size());
        for (const auto& w : words) unique.insert(lower(w));
        total_ms += e.trim.end_ms - e.trim.start_ms;
    }
    s.unique_words = static_cast<std::int64_t>(unique.size());
    s.total_hours = static_cast<double>(total_ms) / 3'600'000.0;
    if (s.count > 0) {
        s.avg_words = static_cast<double>(s.total_words) / static_cast<double>(s.count);
        s.avg_duration_s = static_cast<double>(total_ms) / 1000.0 / static_cast<double>(s.count);
    }
    return s;
}

WorldCase random_world(std::mt19937_64& rng) {
    WorldCase w;
    static const std::vector<std::string> languages{"bn-BdSL", "en-ASL"};
    const auto users = uniform(rng, 1, 5);
    for (std::int64_t i = 0; i < users; ++i) {
        UserProfile u;
        u.id = "u" + std::to_string(i);
        u.username = u.id;
        u.selected_language = pick(rng, languages);
        u.roles = RoleSet(static_cast<unsigned>(uniform(rng, 0, 15)));
        w.users.push_back(u);
    }
    const auto prompts = uniform(rng, 0, 5);
    for (std::int64_t i = 0; i < prompts; ++i) {
        w.world.prompts.push_back({"p" + std::to_string(i), "prompt " + std::to_string(i),
                                   uniform(rng, 0, 1) ? ContentType::Text : ContentType::Topic,
                                   pick(rng, languages)});
    }
    if (w.world.prompts.empty()) return w;
    const auto recordings = uniform(rng, 0, 8);
    for (std::int64_t i = 0; i < recordings; ++i) {
        RecordingFacts r;
        r.id = "r" + std::to_string(i);
        const auto& p = w.world.prompts[static_cast<std::size_t>(
            uniform(rng, 0, static_cast<std::int64_t>(w.world.prompts.size()) - 1))];
        r.prompt_id = p.id;
        r.language = p.language;
        r.signer_id = w.users[static_cast<std::size_t>(uniform(rng, 0, users - 1))].id;
        r.state = static_cast<LifecycleState>(uniform(rng, 0, 4));
        if (r.state == LifecycleState::PendingAnnotationValidation || r.state == LifecycleState::AnnotationValidated) {
            r.annotator_id = w.users[static_cast<std::size_t>(uniform(rng, 0, users - 1))].id;
        }
        for (const auto& u : w.users) {
            if (u.id != r.signer_id && uniform(rng, 0, 3) == 0) r.current_round_voters.insert(u.id);
        }
        w.world.recordings.push_back(r);
    }
    return w;
}

bool eligible(const UserProfile& user, const TaskItem& item, TaskKind kind, const World& world,
              bool allow_repeat_recordings) {
    if (kind == TaskKind::Record) {
        if (!std::holds_alternative<Prompt>(item)) return false;
        const auto& p = std::get<Prompt>(item);
        if (p.language != user.selected_language) return false;
        if (allow_repeat_recordings) return true;
        for (const auto& r : world.recordings) {
            if (r.prompt_id == p.id && r.signer_id == user.id) return false;
        }
        return true;
    }
    if (!std::holds_alternative<RecordingFacts>(item)) return false;
    const auto& r = std::get<RecordingFacts>(item);
    if (r.language != user.selected_language) return false;
    const char* want = kind == TaskKind::ValidateVideo ? "PendingVideoValidation"
                       : kind == TaskKind::Annotate    ? "PendingAnnotation"
                                                       : "PendingAnnotationValidation";
    if (to_string(r.state) != want) return false;
    if (kind == TaskKind::Annotate) return true;
    if (r.signer_id == user.id) return false;
    if (kind == TaskKind::ValidateVideo) return !r.current_round_voters.contains(user.id);
    return !(r.annotator_id && *r.annotator_id == user.id);
}

}  // namespace signcrowd::oracle
