#include "logeff/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "logeff/error.hpp"

namespace logeff {

namespace {

using json = nlohmann::json;

}  // namespace

Value Transform::apply(const Value& value) const {
    switch (kind) {
    case Kind::Copy:
    case Kind::Drop:
        return value;
    case Kind::Lowercase:
        if (const auto* s = std::get_if<std::string>(&value)) {
            std::string lowered = *s;
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            return lowered;
        }
        return value;
    case Kind::Truncate:
        if (const auto* s = std::get_if<std::string>(&value)) {
            return s->size() <= limit ? *s : s->substr(0, limit);
        }
        return value;
    }
    return value;
}

Transform parse_transform(const std::string& text) {
    Transform t;
    if (text == "copy") return t;
    if (text == "lowercase") {
        t.kind = Transform::Kind::Lowercase;
        return t;
    }
    if (text == "drop") {
        t.kind = Transform::Kind::Drop;
        return t;
    }
    const std::string prefix = "truncate:";
    if (text.rfind(prefix, 0) == 0) {
        const char* first = text.data() + prefix.size();
        const char* last = text.data() + text.size();
        std::size_t limit = 0;
        auto [ptr, ec] = std::from_chars(first, last, limit);
        if (ec == std::errc() && ptr == last && limit >= 1) {
            t.kind = Transform::Kind::Truncate;
            t.limit = limit;
            return t;
        }
    }
    throw Error(ErrorKind::UnknownTransform, "bad transform \"" + text + "\"");
}

std::string to_string(const Transform& transform) {
    switch (transform.kind) {
    case Transform::Kind::Copy: return "copy";
    case Transform::Kind::Lowercase: return "lowercase";
    case Transform::Kind::Drop: return "drop";
    case Transform::Kind::Truncate: return "truncate:" + std::to_string(transform.limit);
    }
    return "copy";
}

const std::vector<FieldRule>* SchemaTemplate::class_rules(EventSource source) const {
    auto it = classes.find(source);
    return it == classes.end() ? nullptr : &it->second;
}

std::vector<std::string> SchemaTemplate::targets_for(EventSource source,
                                                     const std::string& raw_path) const {
    std::vector<std::string> targets;
    const auto* rules = class_rules(source);
    if (!rules) return targets;
    for (const auto& rule : *rules) {
        if (rule.transform.kind == Transform::Kind::Drop) continue;
        if (rule.raw_path == raw_path) targets.push_back(rule.target_path);
    }
    return targets;
}

void validate_template(const SchemaTemplate& tpl) {
    if (tpl.schema_id.empty()) {
        throw Error(ErrorKind::TemplateParse, "template has empty schema_id");
    }
    if (tpl.classes.empty()) {
        throw Error(ErrorKind::TemplateParse, tpl.schema_id + ": template has no classes");
    }
    for (const auto& [source, rules] : tpl.classes) {
        std::set<std::string> targets;
        for (const auto& rule : rules) {
            const std::string where =
                tpl.schema_id + "/" + to_string(source) + " rule \"" + rule.raw_path + "\"";
            if (!valid_field_path(rule.raw_path)) {
                throw Error(ErrorKind::TemplateParse, where + ": bad raw path");
            }
            if (rule.transform.kind == Transform::Kind::Truncate && rule.transform.limit < 1) {
                throw Error(ErrorKind::UnknownTransform, where + ": truncate limit must be >= 1");
            }
            if (rule.transform.kind == Transform::Kind::Drop) {
                if (!rule.target_path.empty()) {
                    throw Error(ErrorKind::TemplateParse, where + ": drop rule sets target_path");
                }
                continue;
            }
            if (!valid_field_path(rule.target_path)) {
                throw Error(ErrorKind::TemplateParse, where + ": bad target path");
            }
            if (!targets.insert(rule.target_path).second) {
                throw Error(ErrorKind::DuplicateTarget,
                            where + ": target \"" + rule.target_path + "\" mapped twice");
            }
        }
    }
}

namespace {

FieldRule rule_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw Error(ErrorKind::TemplateParse, where + ": rule is not an object");
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "raw_path" && key != "target_path" && key != "required" && key != "transform") {
            throw Error(ErrorKind::TemplateParse, where + ": unknown rule key \"" + key + "\"");
        }
    }
    if (!j.contains("raw_path") || !j["raw_path"].is_string()) {
        throw Error(ErrorKind::TemplateParse, where + ": rule needs string raw_path");
    }
    if (!j.contains("transform") || !j["transform"].is_string()) {
        throw Error(ErrorKind::TemplateParse, where + ": rule needs string transform");
    }
    FieldRule rule;
    rule.raw_path = j["raw_path"].get<std::string>();
    rule.transform = parse_transform(j["transform"].get<std::string>());
    if (j.contains("target_path")) {
        if (!j["target_path"].is_string()) {
            throw Error(ErrorKind::TemplateParse, where + ": target_path must be a string");
        }
        rule.target_path = j["target_path"].get<std::string>();
    }
    if (j.contains("required")) {
        if (!j["required"].is_boolean()) {
            throw Error(ErrorKind::TemplateParse, where + ": required must be a boolean");
        }
        rule.required = j["required"].get<bool>();
    }
    if (rule.transform.kind == Transform::Kind::Drop && rule.required) {
        throw Error(ErrorKind::TemplateParse,
                    where + ": rule \"" + rule.raw_path + "\" is both required and dropped");
    }
    return rule;
}

}  // namespace

SchemaTemplate parse_template(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::TemplateParse, origin + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("schema_id") || !j["schema_id"].is_string() ||
        !j.contains("version") || !j["version"].is_string() || !j.contains("classes") ||
        !j["classes"].is_object()) {
        throw Error(ErrorKind::TemplateParse,
                    origin + ": template needs schema_id, version, and classes object");
    }
    SchemaTemplate tpl;
    tpl.schema_id = j["schema_id"].get<std::string>();
    tpl.version = j["version"].get<std::string>();
    for (const auto& [name, rules_json] : j["classes"].items()) {
        EventSource source;
        try {
            source = event_source_from_string(name);
        } catch (const Error&) {
            throw Error(ErrorKind::TemplateParse, origin + ": unknown class \"" + name + "\"");
        }
        if (!rules_json.is_array()) {
            throw Error(ErrorKind::TemplateParse, origin + ": class \"" + name + "\" is not an array");
        }
        std::vector<FieldRule> rules;
        for (const auto& rule_json : rules_json) {
            rules.push_back(rule_from_json(rule_json, origin + "/" + name));
        }
        tpl.classes[source] = std::move(rules);
    }
    validate_template(tpl);
    return tpl;
}

SchemaTemplate load_template(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_template(buf.str(), path);
}

std::string serialize_template(const SchemaTemplate& tpl) {
    json j;
    j["schema_id"] = tpl.schema_id;
    j["version"] = tpl.version;
    j["classes"] = json::object();
    for (const auto& [source, rules] : tpl.classes) {
        json arr = json::array();
        for (const auto& rule : rules) {
            json r;
            r["raw_path"] = rule.raw_path;
            r["transform"] = to_string(rule.transform);
            if (rule.transform.kind != Transform::Kind::Drop) {
                r["target_path"] = rule.target_path;
                r["required"] = rule.required;
            }
            arr.push_back(std::move(r));
        }
        j["classes"][to_string(source)] = std::move(arr);
    }
    return j.dump(2);
}

NormalizedEvent normalize(const RawEvent& event, const SchemaTemplate& tpl) {
    NormalizedEvent out;
    out.schema_id = tpl.schema_id;
    out.source = event.source;
    out.ts = event.ts;
    out.host = event.host;

    const auto* rules = tpl.class_rules(event.source);
    if (!rules) {
        out.unmapped_source = true;
        for (const auto& [path, value] : event.fields) {
            (void)value;
            out.dropped.push_back(path);
        }
        return out;
    }

    std::set<std::string> consumed;
    for (const auto& rule : *rules) {
        if (rule.transform.kind == Transform::Kind::Drop) continue;
        const Value* value = event.field(rule.raw_path);
        if (!value) continue;
        out.fields[rule.target_path] = rule.transform.apply(*value);
        consumed.insert(rule.raw_path);
    }
    for (const auto& [path, value] : event.fields) {
        (void)value;
        if (!consumed.count(path)) out.dropped.push_back(path);
    }
    return out;
}

ConformanceReport conformance(const NormalizedEvent& normalized, const SchemaTemplate& tpl) {
    if (normalized.schema_id != tpl.schema_id) {
        throw Error(ErrorKind::TemplateMismatch, "event normalized under \"" + normalized.schema_id +
                                                     "\", checked against \"" + tpl.schema_id + "\"");
    }
    ConformanceReport report;
    report.schema_id = tpl.schema_id;
    const auto* rules = tpl.class_rules(normalized.source);
    if (!rules) return report;
    for (const auto& rule : *rules) {
        if (!rule.required || rule.transform.kind == Transform::Kind::Drop) continue;
        if (!normalized.fields.count(rule.target_path)) {
            report.missing.push_back(rule.target_path);
        }
    }
    return report;
}

namespace {

// Approximations of the three standards: every default maps the HTTP request
// line, process identity, and the network flow 5-tuple with byte counts, and
// none carries HTTP request bodies or network payloads. Only CIM maps the
// query string and the common request headers.
const std::string kCimTemplate = R"json({
  "schema_id": "cim",
  "version": "6.0.3",
  "classes": {
    "http": [
      {"raw_path": "method", "target_path": "http_method", "required": true, "transform": "copy"},
      {"raw_path": "url_path", "target_path": "url", "required": true, "transform": "copy"},
      {"raw_path": "status", "target_path": "status", "required": true, "transform": "copy"},
      {"raw_path": "user_agent", "target_path": "http_user_agent", "required": true, "transform": "copy"},
      {"raw_path": "query_string", "target_path": "uri_query", "required": false, "transform": "copy"},
      {"raw_path": "headers.cookie", "target_path": "cookie", "required": false, "transform": "copy"},
      {"raw_path": "headers.content_length", "target_path": "http_content_length", "required": false, "transform": "copy"},
      {"raw_path": "headers.content_type", "target_path": "http_content_type", "required": false, "transform": "copy"},
      {"raw_path": "request_body_len", "target_path": "bytes_in", "required": false, "transform": "copy"},
      {"raw_path": "response_body_len", "target_path": "bytes_out", "required": false, "transform": "copy"},
      {"raw_path": "request_body", "transform": "drop"}
    ],
    "network": [
      {"raw_path": "src_ip", "target_path": "src_ip", "required": true, "transform": "copy"},
      {"raw_path": "dst_ip", "target_path": "dest_ip", "required": true, "transform": "copy"},
      {"raw_path": "src_port", "target_path": "src_port", "required": true, "transform": "copy"},
      {"raw_path": "dst_port", "target_path": "dest_port", "required": true, "transform": "copy"},
      {"raw_path": "proto", "target_path": "transport", "required": true, "transform": "copy"},
      {"raw_path": "bytes_in", "target_path": "bytes_in", "required": true, "transform": "copy"},
      {"raw_path": "bytes_out", "target_path": "bytes_out", "required": true, "transform": "copy"},
      {"raw_path": "payload", "transform": "drop"}
    ],
    "process": [
      {"raw_path": "pid", "target_path": "process_id", "required": true, "transform": "copy"},
      {"raw_path": "ppid", "target_path": "parent_process_id", "required": true, "transform": "copy"},
      {"raw_path": "exe", "target_path": "process_path", "required": true, "transform": "copy"},
      {"raw_path": "cmdline", "target_path": "process", "required": true, "transform": "copy"},
      {"raw_path": "user", "target_path": "user", "required": true, "transform": "copy"}
    ]
  }
}
)json";

const std::string kOcsfTemplate = R"json({
  "schema_id": "ocsf",
  "version": "1.6.0",
  "classes": {
    "http": [
      {"raw_path": "method", "target_path": "http_request.http_method", "required": true, "transform": "copy"},
      {"raw_path": "url_path", "target_path": "http_request.url.path", "required": true, "transform": "copy"},
      {"raw_path": "status", "target_path": "http_response.code", "required": true, "transform": "copy"},
      {"raw_path": "user_agent", "target_path": "http_request.user_agent", "required": true, "transform": "copy"},
      {"raw_path": "request_body_len", "target_path": "http_request.length", "required": false, "transform": "copy"},
      {"raw_path": "response_body_len", "target_path": "http_response.length", "required": false, "transform": "copy"},
      {"raw_path": "request_body", "transform": "drop"}
    ],
    "network": [
      {"raw_path": "src_ip", "target_path": "src_endpoint.ip", "required": true, "transform": "copy"},
      {"raw_path": "dst_ip", "target_path": "dst_endpoint.ip", "required": true, "transform": "copy"},
      {"raw_path": "src_port", "target_path": "src_endpoint.port", "required": true, "transform": "copy"},
      {"raw_path": "dst_port", "target_path": "dst_endpoint.port", "required": true, "transform": "copy"},
      {"raw_path": "proto", "target_path": "connection_info.protocol_name", "required": true, "transform": "copy"},
      {"raw_path": "bytes_in", "target_path": "traffic.bytes_in", "required": true, "transform": "copy"},
      {"raw_path": "bytes_out", "target_path": "traffic.bytes_out", "required": true, "transform": "copy"},
      {"raw_path": "payload", "transform": "drop"}
    ],
    "process": [
      {"raw_path": "pid", "target_path": "process.pid", "required": true, "transform": "copy"},
      {"raw_path": "ppid", "target_path": "process.parent_process.pid", "required": true, "transform": "copy"},
      {"raw_path": "exe", "target_path": "process.file.path", "required": true, "transform": "copy"},
      {"raw_path": "cmdline", "target_path": "process.cmd_line", "required": true, "transform": "copy"},
      {"raw_path": "user", "target_path": "actor.user.name", "required": true, "transform": "copy"}
    ]
  }
}
)json";

const std::string kEcsTemplate = R"json({
  "schema_id": "ecs",
  "version": "9.0.0",
  "classes": {
    "http": [
      {"raw_path": "method", "target_path": "http.request.method", "required": true, "transform": "copy"},
      {"raw_path": "url_path", "target_path": "url.path", "required": true, "transform": "copy"},
      {"raw_path": "status", "target_path": "http.response.status_code", "required": true, "transform": "copy"},
      {"raw_path": "user_agent", "target_path": "user_agent.original", "required": true, "transform": "copy"},
      {"raw_path": "request_body_len", "target_path": "http.request.body.bytes", "required": false, "transform": "copy"},
      {"raw_path": "response_body_len", "target_path": "http.response.body.bytes", "required": false, "transform": "copy"},
      {"raw_path": "request_body", "transform": "drop"}
    ],
    "network": [
      {"raw_path": "src_ip", "target_path": "source.ip", "required": true, "transform": "copy"},
      {"raw_path": "dst_ip", "target_path": "destination.ip", "required": true, "transform": "copy"},
      {"raw_path": "src_port", "target_path": "source.port", "required": true, "transform": "copy"},
      {"raw_path": "dst_port", "target_path": "destination.port", "required": true, "transform": "copy"},
      {"raw_path": "proto", "target_path": "network.transport", "required": true, "transform": "copy"},
      {"raw_path": "bytes_in", "target_path": "source.bytes", "required": true, "transform": "copy"},
      {"raw_path": "bytes_out", "target_path": "destination.bytes", "required": true, "transform": "copy"},
      {"raw_path": "payload", "transform": "drop"}
    ],
    "process": [
      {"raw_path": "pid", "target_path": "process.pid", "required": true, "transform": "copy"},
      {"raw_path": "ppid", "target_path": "process.parent.pid", "required": true, "transform": "copy"},
      {"raw_path": "exe", "target_path": "process.executable", "required": true, "transform": "copy"},
      {"raw_path": "cmdline", "target_path": "process.command_line", "required": true, "transform": "copy"},
      {"raw_path": "user", "target_path": "user.name", "required": true, "transform": "copy"}
    ]
  }
}
)json";

}  // namespace

const std::vector<std::string>& builtin_schema_ids() {
    static const std::vector<std::string> ids = {"cim", "ocsf", "ecs"};
    return ids;
}

const std::string& builtin_template_json(const std::string& schema_id) {
    if (schema_id == "cim") return kCimTemplate;
    if (schema_id == "ocsf") return kOcsfTemplate;
    if (schema_id == "ecs") return kEcsTemplate;
    throw Error(ErrorKind::TemplateParse, "no built-in template \"" + schema_id + "\"");
}

SchemaTemplate builtin_template(const std::string& schema_id) {
    return parse_template(builtin_template_json(schema_id), "builtin:" + schema_id);
}

SchemaTemplate identity_template(const EventCorpus& corpus, const std::string& schema_id) {
    std::map<EventSource, std::set<std::string>> paths;
    for (const auto& event : corpus.events) {
        for (const auto& [path, value] : event.fields) {
            (void)value;
            paths[event.source].insert(path);
        }
    }
    SchemaTemplate tpl;
    tpl.schema_id = schema_id;
    tpl.version = "1";
    for (const auto& [source, names] : paths) {
        auto& rules = tpl.classes[source];
        for (const auto& name : names) {
            FieldRule rule;
            rule.raw_path = name;
            rule.target_path = name;
            rules.push_back(rule);
        }
    }
    validate_template(tpl);
    return tpl;
}

}  // namespace logeff
