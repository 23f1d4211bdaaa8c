#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "logeff/session.hpp"
#include "logeff/signature.hpp"

namespace logeff {

/// How the exploit payload reaches the target.
enum class AttackVector { HttpGet, HttpPost, HttpMixed, ServicePayload };

const char* to_string(AttackVector vector);
AttackVector attack_vector_from_string(const std::string& name);

TimestampMs default_scenario_start();

/// Deterministic recipe for one synthetic attack chain. Equal specs produce
/// byte-identical corpora.
struct ScenarioSpec {
    std::string cve = "CVE-2024-10001";
    AttackVector vector = AttackVector::HttpGet;
    int c2_port = 4444;
    std::string payload_marker = "ZDAYPAYLOAD";
    std::uint64_t seed = 1;
    TimestampMs start_ts = default_scenario_start();
    std::map<EventSource, std::size_t> event_counts;  // optional per-source totals
    std::size_t benign_noise = 6;                     // events outside the window
};

/// Throws InvalidSpec.
void validate_spec(const ScenarioSpec& spec);

/// Ground truth emitted next to a synthetic corpus: which signature is
/// carried by which events. Carrier indices refer to the emitted corpus.
struct ScenarioManifest {
    std::string cve;
    AttackVector vector = AttackVector::HttpGet;
    VulnClass vuln_class = VulnClass::Web;
    std::string payload_marker;
    std::string payload_name;  // 5-char /tmp implant name
    std::string attacker_ip;
    std::string target_ip;
    int c2_port = 4444;
    std::map<EventSource, std::size_t> event_counts;  // in-window, per source
    std::size_t benign_noise = 0;
    std::map<std::string, std::vector<std::size_t>> planted;  // sig id -> carriers
};

std::string serialize_manifest(const ScenarioManifest& manifest);
ScenarioManifest parse_manifest(const std::string& text, const std::string& origin);
ScenarioManifest load_manifest(const std::string& path);

struct SynthResult {
    EventCorpus corpus;
    AttackRecord record;
    ScenarioManifest manifest;
};

/// Emits the three-phase chain (payload delivery, /tmp implant execution,
/// reverse-TCP egress) plus markerless filler and out-of-window noise.
SynthResult synthesize(const ScenarioSpec& spec);

/// The five signatures every synthesized chain plants: a high-fidelity
/// payload-marker match per vector, the /tmp drop and execution pair, and
/// the reverse-TCP plus connection-state pair.
SignatureSet scenario_signatures(const ScenarioManifest& manifest);

struct ShellshockFixture {
    EventCorpus corpus;
    AttackRecord record;
    SignatureSet signatures;  // 12 signatures: 3 initial access, 4 execution, 5 c2
    ScenarioManifest manifest;
};

/// The hand-built CVE-2014-6271 worked example: header-borne bash payload
/// against /victim.cgi, staged /tmp implant, callback on port 4444.
ShellshockFixture shellshock_fixture();

}  // namespace logeff
