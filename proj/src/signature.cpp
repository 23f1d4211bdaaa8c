#include "logeff/signature.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "logeff/error.hpp"

namespace logeff {

namespace {

using json = nlohmann::json;

}  // namespace

const char* to_string(Phase phase) {
    switch (phase) {
    case Phase::InitialAccess: return "initial_access";
    case Phase::Execution: return "execution";
    case Phase::CommandAndControl: return "c2";
    }
    return "initial_access";
}

Phase phase_from_string(const std::string& name) {
    if (name == "initial_access") return Phase::InitialAccess;
    if (name == "execution") return Phase::Execution;
    if (name == "c2") return Phase::CommandAndControl;
    throw Error(ErrorKind::SignatureParse, "unknown phase \"" + name + "\"");
}

const std::vector<Phase>& all_phases() {
    static const std::vector<Phase> phases = {Phase::InitialAccess, Phase::Execution,
                                              Phase::CommandAndControl};
    return phases;
}

const char* to_string(Fidelity fidelity) {
    return fidelity == Fidelity::High ? "high" : "low";
}

Fidelity fidelity_from_string(const std::string& name) {
    if (name == "high") return Fidelity::High;
    if (name == "low") return Fidelity::Low;
    throw Error(ErrorKind::SignatureParse, "unknown fidelity \"" + name + "\"");
}

const char* to_string(Matcher::Op op) {
    switch (op) {
    case Matcher::Op::Equals: return "equals";
    case Matcher::Op::Contains: return "contains";
    case Matcher::Op::Regex: return "regex";
    case Matcher::Op::Gt: return "gt";
    case Matcher::Op::Lt: return "lt";
    case Matcher::Op::Exists: return "exists";
    }
    return "exists";
}

Matcher make_matcher(Matcher::Op op, Value value) {
    Matcher m;
    m.op = op;
    m.value = std::move(value);
    if (op == Matcher::Op::Regex) {
        const auto* pattern = std::get_if<std::string>(&m.value);
        if (!pattern) {
            throw Error(ErrorKind::SignatureParse, "regex matcher needs a string pattern");
        }
        try {
            m.compiled = std::make_shared<const std::regex>(*pattern);
        } catch (const std::regex_error& e) {
            throw Error(ErrorKind::BadRegex, "pattern \"" + *pattern + "\": " + e.what());
        }
    }
    if ((op == Matcher::Op::Contains) && !std::holds_alternative<std::string>(m.value)) {
        throw Error(ErrorKind::SignatureParse, "contains matcher needs a string value");
    }
    if ((op == Matcher::Op::Gt || op == Matcher::Op::Lt) &&
        !std::holds_alternative<std::int64_t>(m.value)) {
        throw Error(ErrorKind::SignatureParse, "numeric matcher needs an integer value");
    }
    return m;
}

bool Matcher::matches(const Value* value) const {
    if (!value) return false;
    switch (op) {
    case Op::Exists:
        return true;
    case Op::Equals:
        return *value == this->value;
    case Op::Contains: {
        const auto* haystack = std::get_if<std::string>(value);
        const auto* needle = std::get_if<std::string>(&this->value);
        return haystack && needle && haystack->find(*needle) != std::string::npos;
    }
    case Op::Regex: {
        const auto* text = std::get_if<std::string>(value);
        return text && compiled && std::regex_search(*text, *compiled);
    }
    case Op::Gt: {
        const auto* lhs = std::get_if<std::int64_t>(value);
        const auto* rhs = std::get_if<std::int64_t>(&this->value);
        return lhs && rhs && *lhs > *rhs;
    }
    case Op::Lt: {
        const auto* lhs = std::get_if<std::int64_t>(value);
        const auto* rhs = std::get_if<std::int64_t>(&this->value);
        return lhs && rhs && *lhs < *rhs;
    }
    }
    return false;
}

Predicate p_all(std::vector<Predicate> children) {
    Predicate p;
    p.kind = Predicate::Kind::All;
    p.children = std::move(children);
    return p;
}

Predicate p_any(std::vector<Predicate> children) {
    Predicate p;
    p.kind = Predicate::Kind::Any;
    p.children = std::move(children);
    return p;
}

Predicate p_match(std::string path, Matcher matcher) {
    Predicate p;
    p.kind = Predicate::Kind::Match;
    p.path = std::move(path);
    p.matcher = std::move(matcher);
    return p;
}

bool eval_predicate_raw(const Predicate& predicate, const RawEvent& event) {
    switch (predicate.kind) {
    case Predicate::Kind::All:
        return std::all_of(predicate.children.begin(), predicate.children.end(),
                           [&](const Predicate& c) { return eval_predicate_raw(c, event); });
    case Predicate::Kind::Any:
        return std::any_of(predicate.children.begin(), predicate.children.end(),
                           [&](const Predicate& c) { return eval_predicate_raw(c, event); });
    case Predicate::Kind::Match:
        return predicate.matcher.matches(event.field(predicate.path));
    }
    return false;
}

bool eval_predicate_normalized(const Predicate& predicate, const NormalizedEvent& normalized,
                               const SchemaTemplate& tpl) {
    switch (predicate.kind) {
    case Predicate::Kind::All:
        return std::all_of(
            predicate.children.begin(), predicate.children.end(),
            [&](const Predicate& c) { return eval_predicate_normalized(c, normalized, tpl); });
    case Predicate::Kind::Any:
        return std::any_of(
            predicate.children.begin(), predicate.children.end(),
            [&](const Predicate& c) { return eval_predicate_normalized(c, normalized, tpl); });
    case Predicate::Kind::Match: {
        for (const auto& target : tpl.targets_for(normalized.source, predicate.path)) {
            auto it = normalized.fields.find(target);
            if (it != normalized.fields.end() && predicate.matcher.matches(&it->second)) {
                return true;
            }
        }
        return false;
    }
    }
    return false;
}

void validate_signature(const Signature& sig) {
    if (sig.id.empty()) {
        throw Error(ErrorKind::SignatureParse, "signature with empty id");
    }
    if (!valid_cve(sig.cve)) {
        throw Error(ErrorKind::SignatureParse, sig.id + ": bad CVE id \"" + sig.cve + "\"");
    }
    if (sig.applicable_sources.empty()) {
        throw Error(ErrorKind::SignatureParse, sig.id + ": no applicable sources");
    }
}

const Signature* SignatureSet::find(const std::string& id) const {
    for (const auto& sig : signatures) {
        if (sig.id == id) return &sig;
    }
    return nullptr;
}

std::vector<const Signature*> SignatureSet::for_cve(const std::string& cve) const {
    std::vector<const Signature*> out;
    for (const auto& sig : signatures) {
        if (sig.cve == cve) out.push_back(&sig);
    }
    return out;
}

namespace {

Predicate predicate_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || j.size() != 1) {
        throw Error(ErrorKind::SignatureParse,
                    where + ": predicate node must be one of {all|any|match}");
    }
    if (j.contains("all") || j.contains("any")) {
        const bool is_all = j.contains("all");
        const json& arr = is_all ? j["all"] : j["any"];
        if (!arr.is_array()) {
            throw Error(ErrorKind::SignatureParse, where + ": all/any takes an array");
        }
        std::vector<Predicate> children;
        for (const auto& child : arr) {
            children.push_back(predicate_from_json(child, where));
        }
        return is_all ? p_all(std::move(children)) : p_any(std::move(children));
    }
    if (!j.contains("match")) {
        throw Error(ErrorKind::SignatureParse,
                    where + ": predicate node must be one of {all|any|match}");
    }
    const json& m = j["match"];
    if (!m.is_object() || !m.contains("path") || !m["path"].is_string() || !m.contains("op") ||
        !m["op"].is_string()) {
        throw Error(ErrorKind::SignatureParse, where + ": match needs string path and op");
    }
    const std::string path = m["path"].get<std::string>();
    if (!valid_field_path(path)) {
        throw Error(ErrorKind::SignatureParse, where + ": bad match path \"" + path + "\"");
    }
    const std::string op_name = m["op"].get<std::string>();
    Matcher::Op op;
    if (op_name == "equals") op = Matcher::Op::Equals;
    else if (op_name == "contains") op = Matcher::Op::Contains;
    else if (op_name == "regex") op = Matcher::Op::Regex;
    else if (op_name == "gt") op = Matcher::Op::Gt;
    else if (op_name == "lt") op = Matcher::Op::Lt;
    else if (op_name == "exists") op = Matcher::Op::Exists;
    else throw Error(ErrorKind::SignatureParse, where + ": unknown op \"" + op_name + "\"");

    if (op == Matcher::Op::Exists) {
        if (m.contains("value")) {
            throw Error(ErrorKind::SignatureParse, where + ": exists takes no value");
        }
        return p_match(path, make_matcher(op));
    }
    if (!m.contains("value")) {
        throw Error(ErrorKind::SignatureParse, where + ": op \"" + op_name + "\" needs a value");
    }
    Value value;
    try {
        value = value_from_json(m["value"], path);
    } catch (const Error&) {
        throw Error(ErrorKind::SignatureParse, where + ": match value must be a scalar");
    }
    return p_match(path, make_matcher(op, std::move(value)));
}

json predicate_to_json(const Predicate& p) {
    json j;
    switch (p.kind) {
    case Predicate::Kind::All:
    case Predicate::Kind::Any: {
        json arr = json::array();
        for (const auto& child : p.children) arr.push_back(predicate_to_json(child));
        j[p.kind == Predicate::Kind::All ? "all" : "any"] = std::move(arr);
        return j;
    }
    case Predicate::Kind::Match: {
        json m;
        m["path"] = p.path;
        m["op"] = to_string(p.matcher.op);
        if (p.matcher.op != Matcher::Op::Exists) {
            m["value"] = value_to_json(p.matcher.value);
        }
        j["match"] = std::move(m);
        return j;
    }
    }
    return j;
}

Signature signature_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw Error(ErrorKind::SignatureParse, where + ": signature is not an object");
    }
    for (const char* key : {"id", "cve", "phase", "fidelity", "description"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw Error(ErrorKind::SignatureParse,
                        where + ": signature needs string key \"" + key + "\"");
        }
    }
    if (!j.contains("sources") || !j["sources"].is_array() || j["sources"].empty()) {
        throw Error(ErrorKind::SignatureParse, where + ": signature needs non-empty sources array");
    }
    if (!j.contains("predicate")) {
        throw Error(ErrorKind::SignatureParse, where + ": signature needs a predicate");
    }
    Signature sig;
    sig.id = j["id"].get<std::string>();
    sig.cve = j["cve"].get<std::string>();
    sig.phase = phase_from_string(j["phase"].get<std::string>());
    sig.fidelity = fidelity_from_string(j["fidelity"].get<std::string>());
    sig.description = j["description"].get<std::string>();
    for (const auto& s : j["sources"]) {
        if (!s.is_string()) {
            throw Error(ErrorKind::SignatureParse, where + ": sources must be strings");
        }
        try {
            sig.applicable_sources.insert(event_source_from_string(s.get<std::string>()));
        } catch (const Error&) {
            throw Error(ErrorKind::SignatureParse,
                        where + ": unknown source \"" + s.get<std::string>() + "\"");
        }
    }
    sig.predicate = predicate_from_json(j["predicate"], where + "/" + sig.id);
    validate_signature(sig);
    return sig;
}

}  // namespace

SignatureSet parse_signatures(const std::string& text, const std::string& origin) {
    SignatureSet set;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        return set;
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SignatureParse, origin + ": " + e.what());
    }
    if (!j.is_array()) {
        throw Error(ErrorKind::SignatureParse, origin + ": signature file must be a JSON array");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        Signature sig = signature_from_json(j[i], origin + "[" + std::to_string(i) + "]");
        if (!seen.insert(sig.id).second) {
            throw Error(ErrorKind::DuplicateId, origin + ": duplicate signature id \"" + sig.id + "\"");
        }
        set.signatures.push_back(std::move(sig));
    }
    return set;
}

SignatureSet load_signatures(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_signatures(buf.str(), path);
}

std::string serialize_signatures(const SignatureSet& set) {
    json arr = json::array();
    for (const auto& sig : set.signatures) {
        json j;
        j["id"] = sig.id;
        j["cve"] = sig.cve;
        j["phase"] = to_string(sig.phase);
        j["fidelity"] = to_string(sig.fidelity);
        j["description"] = sig.description;
        json sources = json::array();
        for (EventSource s : sig.applicable_sources) sources.push_back(to_string(s));
        j["sources"] = std::move(sources);
        j["predicate"] = predicate_to_json(sig.predicate);
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

EvalResult evaluate_raw(const Signature& sig, const ExploitSession& session,
                        const EventCorpus& corpus) {
    EvalResult result;
    for (std::size_t idx : session.event_idx) {
        const RawEvent& event = corpus.events.at(idx);
        if (!sig.applicable_sources.count(event.source)) continue;
        if (eval_predicate_raw(sig.predicate, event)) {
            result.matched = true;
            result.event_idx.push_back(idx);
        }
    }
    return result;
}

EvalResult evaluate_normalized(const Signature& sig, const ExploitSession& session,
                               const EventCorpus& corpus, const SchemaTemplate& tpl) {
    EvalResult result;
    for (std::size_t idx : session.event_idx) {
        const RawEvent& event = corpus.events.at(idx);
        if (!sig.applicable_sources.count(event.source)) continue;
        const NormalizedEvent normalized = normalize(event, tpl);
        if (eval_predicate_normalized(sig.predicate, normalized, tpl)) {
            result.matched = true;
            result.event_idx.push_back(idx);
        }
    }
    return result;
}

}  // namespace logeff
