#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "logeff/event.hpp"

namespace logeff {

/// One attack-host timing entry: who exploited what, when.
struct AttackRecord {
    std::string cve;
    TimestampMs start_ts = 0;
    TimestampMs end_ts = 0;
    std::string attacker_host;
    std::string target_host;
    std::string service;  // free-text label, e.g. "HTTP", "Samba"
};

/// "CVE-" + 4-digit year + id of 4+ digits.
bool valid_cve(const std::string& id);

/// Throws MalformedRecord unless start < end and the CVE id is well-formed.
void validate_attack_record(const AttackRecord& record);

AttackRecord parse_attack_record(const std::string& line);
std::string serialize_attack_record(const AttackRecord& record);

/// Loads an attack-record JSONL file. Malformed lines are fatal here: the
/// attack log is ground truth, not telemetry.
std::vector<AttackRecord> load_attack_records(const std::string& path);

enum class VulnClass { Web, Service };
const char* to_string(VulnClass vuln_class);

/// Slack applied around each record's window before matching events.
struct SlackWindow {
    TimestampMs pre_ms = 2000;
    TimestampMs post_ms = 5000;
};

/// The time-windowed, host-scoped set of events attributed to one CVE run.
struct ExploitSession {
    std::string cve;
    TimestampMs window_start = 0;  // start_ts - pre slack
    TimestampMs window_end = 0;    // end_ts + post slack
    std::string attacker_host;
    std::string target_host;
    std::string service;
    VulnClass vuln_class = VulnClass::Service;
    std::vector<std::size_t> event_idx;  // indices into the corpus, ts order
};

struct SessionBuildResult {
    std::vector<ExploitSession> sessions;  // sorted by (cve, window_start)
    std::vector<std::size_t> untagged;     // corpus indices outside every window
    std::vector<std::string> overlap_warnings;
};

/// Assigns each corpus event to at most one session. An event belongs to the
/// record with the earliest start_ts whose slack-extended window contains its
/// timestamp and whose host pair includes its host.
SessionBuildResult build_sessions(const std::vector<AttackRecord>& records,
                                  const EventCorpus& corpus, SlackWindow slack = {});

/// Web iff the service label equals "HTTP" (case-insensitive).
VulnClass classify_vuln_class(const std::string& service_label);

}  // namespace logeff
