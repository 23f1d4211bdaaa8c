#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace logeff {

/// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

/// Parses an RFC3339 timestamp with millisecond precision, UTC only,
/// e.g. "2024-01-01T00:00:00.000Z". Throws BadTimestamp on anything else.
TimestampMs parse_timestamp(const std::string& text);

/// Renders a timestamp back to the fixed "YYYY-MM-DDTHH:MM:SS.mmmZ" form.
std::string format_timestamp(TimestampMs ts);

enum class EventSource { Network, Http, Process };

const char* to_string(EventSource source);
EventSource event_source_from_string(const std::string& name);

/// Scalar field value: string, integer, or boolean.
using Value = std::variant<std::string, std::int64_t, bool>;

using FieldMap = std::map<std::string, Value>;

/// One timestamped telemetry record from a network, HTTP, or process source.
struct RawEvent {
    TimestampMs ts = 0;
    std::string host;
    EventSource source = EventSource::Network;
    FieldMap fields;

    const Value* field(const std::string& path) const;
    bool operator==(const RawEvent&) const = default;
};

/// Mandatory field paths for a source (the per-source invariant set).
const std::vector<std::string>& mandatory_fields(EventSource source);

/// Field paths are dot-delimited with non-empty segments, e.g. "headers.cookie".
bool valid_field_path(const std::string& path);

/// Checks the per-source invariants and field-path syntax.
/// Throws MissingMandatoryField or MalformedRecord.
void validate_event(const RawEvent& event);

/// Parses one JSONL record with envelope keys ts/host/source/fields.
/// Unknown extra fields are preserved verbatim in the field map.
RawEvent parse_raw_event(const std::string& line);

/// Canonical single-line JSON rendering (sorted keys, lossless).
std::string serialize_event(const RawEvent& event);

/// Time-ordered sequence of validated events.
struct EventCorpus {
    std::vector<RawEvent> events;
    std::string origin;
    std::size_t skipped = 0;  // malformed input lines
};

/// Loads a JSONL file, skipping (and counting) malformed lines. The result is
/// sorted stably by (ts, original line number).
EventCorpus load_corpus(const std::string& path);

/// Same as load_corpus but over in-memory text (one record per line).
EventCorpus parse_corpus(const std::string& text, const std::string& origin);

}  // namespace logeff
