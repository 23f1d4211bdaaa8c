#pragma once

#include <map>
#include <string>
#include <vector>

#include "logeff/event.hpp"

namespace logeff {

/// How a raw field value is carried into the normalized record.
struct Transform {
    enum class Kind { Copy, Truncate, Lowercase, Drop };
    Kind kind = Kind::Copy;
    std::size_t limit = 0;  // Truncate only, >= 1

    Value apply(const Value& value) const;
    bool operator==(const Transform&) const = default;
};

/// Parses "copy" | "lowercase" | "drop" | "truncate:N". Throws UnknownTransform.
Transform parse_transform(const std::string& text);
std::string to_string(const Transform& transform);

struct FieldRule {
    std::string raw_path;
    std::string target_path;  // empty for Drop rules
    bool required = false;
    Transform transform;
    bool operator==(const FieldRule&) const = default;
};

/// A logging standard's per-source field mappings, loaded from a data file.
struct SchemaTemplate {
    std::string schema_id;
    std::string version;
    std::map<EventSource, std::vector<FieldRule>> classes;

    const std::vector<FieldRule>* class_rules(EventSource source) const;

    /// Target paths a raw path maps to under the given class. Empty when the
    /// path is unmapped or only dropped.
    std::vector<std::string> targets_for(EventSource source, const std::string& raw_path) const;

    bool operator==(const SchemaTemplate&) const = default;
};

/// Throws TemplateParse (no classes, bad paths), DuplicateTarget, or
/// UnknownTransform (truncate limit < 1).
void validate_template(const SchemaTemplate& tpl);

SchemaTemplate parse_template(const std::string& text, const std::string& origin);
SchemaTemplate load_template(const std::string& path);
std::string serialize_template(const SchemaTemplate& tpl);

struct NormalizedEvent {
    std::string schema_id;
    EventSource source = EventSource::Network;
    TimestampMs ts = 0;
    std::string host;
    std::map<std::string, Value> fields;  // target path -> transformed value
    std::vector<std::string> dropped;     // raw paths no output rule consumed
    bool unmapped_source = false;         // template had no class for this source
    std::string session;                  // tag label, empty when untagged
    bool operator==(const NormalizedEvent&) const = default;
};

/// Pure and total: lossiness is recorded in `dropped`, never raised.
NormalizedEvent normalize(const RawEvent& event, const SchemaTemplate& tpl);

struct ConformanceReport {
    std::string schema_id;
    std::vector<std::string> missing;  // required target paths absent from fields
    bool conformant() const { return missing.empty(); }
};

/// Throws TemplateMismatch when the event was normalized under another schema.
ConformanceReport conformance(const NormalizedEvent& normalized, const SchemaTemplate& tpl);

/// Built-in approximations of CIM 6.0.3, OCSF 1.6.0, and ECS 9.0.0. The same
/// JSON ships under data/templates/ for editing.
const std::vector<std::string>& builtin_schema_ids();  // {"cim", "ocsf", "ecs"}
const std::string& builtin_template_json(const std::string& schema_id);
SchemaTemplate builtin_template(const std::string& schema_id);

/// Copies every field path seen in the corpus one-to-one; the lossless
/// baseline against which the standards are measured.
SchemaTemplate identity_template(const EventCorpus& corpus, const std::string& schema_id = "identity");

}  // namespace logeff
