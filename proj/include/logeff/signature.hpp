#pragma once

#include <memory>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "logeff/event.hpp"
#include "logeff/schema.hpp"
#include "logeff/session.hpp"

namespace logeff {

/// Kill-chain phase a signature belongs to.
enum class Phase { InitialAccess, Execution, CommandAndControl };

const char* to_string(Phase phase);
Phase phase_from_string(const std::string& name);
const std::vector<Phase>& all_phases();

/// High-fidelity signatures pin the exploit; low-fidelity ones only corroborate.
enum class Fidelity { High, Low };

const char* to_string(Fidelity fidelity);
Fidelity fidelity_from_string(const std::string& name);

struct Matcher {
    enum class Op { Equals, Contains, Regex, Gt, Lt, Exists };
    Op op = Op::Exists;
    Value value;  // pattern string for Regex, unused for Exists
    std::shared_ptr<const std::regex> compiled;

    /// Total: a type mismatch or absent value is false, never an error.
    bool matches(const Value* value) const;
};

const char* to_string(Matcher::Op op);

Matcher make_matcher(Matcher::Op op, Value value = false);

struct Predicate {
    enum class Kind { All, Any, Match };
    Kind kind = Kind::All;
    std::vector<Predicate> children;  // All / Any
    std::string path;                 // Match: raw field path
    Matcher matcher;                  // Match
};

Predicate p_all(std::vector<Predicate> children);
Predicate p_any(std::vector<Predicate> children);
Predicate p_match(std::string path, Matcher matcher);

/// All([]) is true, Any([]) is false, absent field is false.
bool eval_predicate_raw(const Predicate& predicate, const RawEvent& event);

/// Match paths are raw paths resolved through the template: a path with no
/// target mapping is false; one mapped to several targets matches if any does.
bool eval_predicate_normalized(const Predicate& predicate, const NormalizedEvent& normalized,
                               const SchemaTemplate& tpl);

struct Signature {
    std::string id;
    std::string cve;
    Phase phase = Phase::InitialAccess;
    Fidelity fidelity = Fidelity::Low;
    std::string description;
    std::set<EventSource> applicable_sources;
    Predicate predicate;
};

void validate_signature(const Signature& sig);

struct SignatureSet {
    std::vector<Signature> signatures;  // file order

    const Signature* find(const std::string& id) const;
    std::vector<const Signature*> for_cve(const std::string& cve) const;
};

/// Parses the JSON signature array. Throws SignatureParse, DuplicateId, or
/// BadRegex. An empty or whitespace-only file is an empty set.
SignatureSet parse_signatures(const std::string& text, const std::string& origin);
SignatureSet load_signatures(const std::string& path);
std::string serialize_signatures(const SignatureSet& set);

struct EvalResult {
    bool matched = false;
    std::vector<std::size_t> event_idx;  // corpus indices of matching events
};

/// True iff the predicate matches at least one session event whose source is
/// in applicable_sources.
EvalResult evaluate_raw(const Signature& sig, const ExploitSession& session,
                        const EventCorpus& corpus);

/// Same, but each event is normalized under the template first.
EvalResult evaluate_normalized(const Signature& sig, const ExploitSession& session,
                               const EventCorpus& corpus, const SchemaTemplate& tpl);

}  // namespace logeff
