#include "logeff/event.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "logeff/error.hpp"

namespace logeff {

namespace {

using json = nlohmann::json;

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
    if (from + count > s.size()) return false;
    for (std::size_t i = from; i < from + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

int read_int(const std::string& s, std::size_t from, std::size_t count) {
    int v = 0;
    for (std::size_t i = from; i < from + count; ++i) {
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

TimestampMs parse_timestamp(const std::string& text) {
    // Fixed layout: YYYY-MM-DDTHH:MM:SS.mmmZ (24 chars)
    bool shape_ok = text.size() == 24 && text[4] == '-' && text[7] == '-' && text[10] == 'T' &&
                    text[13] == ':' && text[16] == ':' && text[19] == '.' && text[23] == 'Z' &&
                    all_digits(text, 0, 4) && all_digits(text, 5, 2) && all_digits(text, 8, 2) &&
                    all_digits(text, 11, 2) && all_digits(text, 14, 2) &&
                    all_digits(text, 17, 2) && all_digits(text, 20, 3);
    if (!shape_ok) {
        throw Error(ErrorKind::BadTimestamp, "expected RFC3339 UTC with milliseconds, got \"" + text + "\"");
    }

    int year = read_int(text, 0, 4);
    unsigned month = static_cast<unsigned>(read_int(text, 5, 2));
    unsigned day = static_cast<unsigned>(read_int(text, 8, 2));
    int hour = read_int(text, 11, 2);
    int minute = read_int(text, 14, 2);
    int second = read_int(text, 17, 2);
    int millis = read_int(text, 20, 3);

    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
        throw Error(ErrorKind::BadTimestamp, "out-of-range calendar value in \"" + text + "\"");
    }

    auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return ((static_cast<TimestampMs>(days) * 24 + hour) * 60 + minute) * 60000 +
           static_cast<TimestampMs>(second) * 1000 + millis;
}

std::string format_timestamp(TimestampMs ts) {
    TimestampMs day_ms = 24LL * 3600 * 1000;
    TimestampMs days = ts >= 0 ? ts / day_ms : (ts - day_ms + 1) / day_ms;
    TimestampMs rem = ts - days * day_ms;

    auto ymd = std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days}}};
    int millis = static_cast<int>(rem % 1000);
    rem /= 1000;
    int second = static_cast<int>(rem % 60);
    rem /= 60;
    int minute = static_cast<int>(rem % 60);
    int hour = static_cast<int>(rem / 60);

    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), hour, minute, second, millis);
    return buf;
}

const char* to_string(EventSource source) {
    switch (source) {
    case EventSource::Network: return "network";
    case EventSource::Http: return "http";
    case EventSource::Process: return "process";
    }
    return "unknown";
}

EventSource event_source_from_string(const std::string& name) {
    if (name == "network") return EventSource::Network;
    if (name == "http") return EventSource::Http;
    if (name == "process") return EventSource::Process;
    throw Error(ErrorKind::MalformedRecord, "unknown source \"" + name + "\"");
}

const Value* RawEvent::field(const std::string& path) const {
    auto it = fields.find(path);
    return it == fields.end() ? nullptr : &it->second;
}

const std::vector<std::string>& mandatory_fields(EventSource source) {
    static const std::vector<std::string> network = {"src_ip",   "dst_ip", "src_port",
                                                     "dst_port", "proto",  "bytes_in",
                                                     "bytes_out"};
    static const std::vector<std::string> http = {"method", "url_path", "status", "user_agent"};
    static const std::vector<std::string> process = {"pid", "ppid", "exe", "cmdline", "user"};
    switch (source) {
    case EventSource::Network: return network;
    case EventSource::Http: return http;
    case EventSource::Process: return process;
    }
    return network;
}

bool valid_field_path(const std::string& path) {
    if (path.empty()) return false;
    // Dot-delimited, every segment non-empty.
    std::size_t start = 0;
    while (true) {
        std::size_t dot = path.find('.', start);
        std::size_t len = (dot == std::string::npos ? path.size() : dot) - start;
        if (len == 0) return false;
        if (dot == std::string::npos) return true;
        start = dot + 1;
    }
}

void validate_event(const RawEvent& event) {
    for (const auto& [path, value] : event.fields) {
        (void)value;
        if (!valid_field_path(path)) {
            throw Error(ErrorKind::MalformedRecord, "bad field path \"" + path + "\"");
        }
    }
    for (const auto& name : mandatory_fields(event.source)) {
        if (event.fields.find(name) == event.fields.end()) {
            throw Error(ErrorKind::MissingMandatoryField,
                        std::string(to_string(event.source)) + " event lacks \"" + name + "\"");
        }
    }
}

RawEvent parse_raw_event(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedRecord, e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorKind::MalformedRecord, "record is not a JSON object");
    }
    for (const char* key : {"ts", "host", "source", "fields"}) {
        if (!j.contains(key)) {
            throw Error(ErrorKind::MalformedRecord, std::string("missing envelope key \"") + key + "\"");
        }
    }
    if (!j["ts"].is_string() || !j["host"].is_string() || !j["source"].is_string() ||
        !j["fields"].is_object()) {
        throw Error(ErrorKind::MalformedRecord, "envelope value has wrong type");
    }

    RawEvent event;
    event.ts = parse_timestamp(j["ts"].get<std::string>());
    event.host = j["host"].get<std::string>();
    event.source = event_source_from_string(j["source"].get<std::string>());
    for (auto it = j["fields"].begin(); it != j["fields"].end(); ++it) {
        event.fields.emplace(it.key(), value_from_json(it.value(), it.key()));
    }
    validate_event(event);
    return event;
}

std::string serialize_event(const RawEvent& event) {
    json fields = json::object();
    for (const auto& [path, value] : event.fields) {
        fields[path] = value_to_json(value);
    }
    json j;
    j["ts"] = format_timestamp(event.ts);
    j["host"] = event.host;
    j["source"] = to_string(event.source);
    j["fields"] = fields;
    return j.dump();
}

namespace {

EventCorpus corpus_from_stream(std::istream& in, const std::string& origin) {
    EventCorpus corpus;
    corpus.origin = origin;

    struct Numbered {
        RawEvent event;
        std::size_t line_no;
    };
    std::vector<Numbered> parsed;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;  // blank lines are not records
        }
        try {
            parsed.push_back({parse_raw_event(line), line_no});
        } catch (const Error&) {
            ++corpus.skipped;
        }
    }

    std::stable_sort(parsed.begin(), parsed.end(),
                     [](const Numbered& a, const Numbered& b) { return a.event.ts < b.event.ts; });

    corpus.events.reserve(parsed.size());
    for (auto& n : parsed) {
        corpus.events.push_back(std::move(n.event));
    }
    if (corpus.events.empty()) {
        throw Error(ErrorKind::CorpusEmpty, origin + " contains no valid events");
    }
    return corpus;
}

}  // namespace

EventCorpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open " + path);
    }
    return corpus_from_stream(in, path);
}

EventCorpus parse_corpus(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    return corpus_from_stream(in, origin);
}

}  // namespace logeff
