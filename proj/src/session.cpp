#include "logeff/session.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

#include <nlohmann/json.hpp>

#include "logeff/error.hpp"

namespace logeff {

namespace {

using json = nlohmann::json;

const std::regex kCvePattern(R"(CVE-\d{4}-\d{4,})");

}  // namespace

bool valid_cve(const std::string& id) {
    return std::regex_match(id, kCvePattern);
}

void validate_attack_record(const AttackRecord& record) {
    if (!valid_cve(record.cve)) {
        throw Error(ErrorKind::MalformedRecord, "bad CVE id \"" + record.cve + "\"");
    }
    if (record.start_ts >= record.end_ts) {
        throw Error(ErrorKind::MalformedRecord,
                    record.cve + ": start_ts must precede end_ts");
    }
    if (record.attacker_host.empty() || record.target_host.empty()) {
        throw Error(ErrorKind::MalformedRecord, record.cve + ": empty host name");
    }
}

AttackRecord parse_attack_record(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedRecord, e.what());
    }
    for (const char* key : {"cve", "start_ts", "end_ts", "attacker_host", "target_host", "service"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw Error(ErrorKind::MalformedRecord,
                        std::string("attack record needs string key \"") + key + "\"");
        }
    }
    AttackRecord record;
    record.cve = j["cve"].get<std::string>();
    record.start_ts = parse_timestamp(j["start_ts"].get<std::string>());
    record.end_ts = parse_timestamp(j["end_ts"].get<std::string>());
    record.attacker_host = j["attacker_host"].get<std::string>();
    record.target_host = j["target_host"].get<std::string>();
    record.service = j["service"].get<std::string>();
    validate_attack_record(record);
    return record;
}

std::string serialize_attack_record(const AttackRecord& record) {
    json j;
    j["cve"] = record.cve;
    j["start_ts"] = format_timestamp(record.start_ts);
    j["end_ts"] = format_timestamp(record.end_ts);
    j["attacker_host"] = record.attacker_host;
    j["target_host"] = record.target_host;
    j["service"] = record.service;
    return j.dump();
}

std::vector<AttackRecord> load_attack_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open " + path);
    }
    std::vector<AttackRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(parse_attack_record(line));
        } catch (const Error& e) {
            throw Error(ErrorKind::MalformedRecord,
                        path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

const char* to_string(VulnClass vuln_class) {
    return vuln_class == VulnClass::Web ? "web" : "service";
}

VulnClass classify_vuln_class(const std::string& service_label) {
    if (service_label.size() != 4) return VulnClass::Service;
    std::string lowered = service_label;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lowered == "http" ? VulnClass::Web : VulnClass::Service;
}

SessionBuildResult build_sessions(const std::vector<AttackRecord>& records,
                                  const EventCorpus& corpus, SlackWindow slack) {
    if (records.empty()) {
        throw Error(ErrorKind::MalformedRecord, "no attack records given");
    }
    for (const auto& record : records) {
        validate_attack_record(record);
    }

    // Earlier start_ts claims contested events; ties fall back to end/cve order.
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = records[a];
        const auto& rb = records[b];
        return std::tie(ra.start_ts, ra.end_ts, ra.cve) < std::tie(rb.start_ts, rb.end_ts, rb.cve);
    });

    SessionBuildResult result;
    result.sessions.reserve(records.size());
    for (std::size_t idx : order) {
        const auto& record = records[idx];
        ExploitSession session;
        session.cve = record.cve;
        session.window_start = record.start_ts - slack.pre_ms;
        session.window_end = record.end_ts + slack.post_ms;
        session.attacker_host = record.attacker_host;
        session.target_host = record.target_host;
        session.service = record.service;
        session.vuln_class = classify_vuln_class(record.service);
        result.sessions.push_back(std::move(session));
    }

    for (std::size_t i = 0; i < result.sessions.size(); ++i) {
        for (std::size_t k = i + 1; k < result.sessions.size(); ++k) {
            const auto& a = result.sessions[i];
            const auto& b = result.sessions[k];
            bool same_pair = (a.attacker_host == b.attacker_host && a.target_host == b.target_host) ||
                             (a.attacker_host == b.target_host && a.target_host == b.attacker_host);
            bool overlap = a.window_start <= b.window_end && b.window_start <= a.window_end;
            if (same_pair && overlap) {
                result.overlap_warnings.push_back(
                    "slack-extended windows of " + a.cve + " and " + b.cve +
                    " overlap on host pair (" + a.attacker_host + ", " + a.target_host + ")");
            }
        }
    }

    for (std::size_t e = 0; e < corpus.events.size(); ++e) {
        const RawEvent& event = corpus.events[e];
        bool assigned = false;
        for (auto& session : result.sessions) {
            if (event.ts < session.window_start || event.ts > session.window_end) continue;
            if (event.host != session.attacker_host && event.host != session.target_host) continue;
            session.event_idx.push_back(e);
            assigned = true;
            break;
        }
        if (!assigned) {
            result.untagged.push_back(e);
        }
    }

    std::stable_sort(result.sessions.begin(), result.sessions.end(),
                     [](const ExploitSession& a, const ExploitSession& b) {
                         return std::tie(a.cve, a.window_start) < std::tie(b.cve, b.window_start);
                     });
    return result;
}

}  // namespace logeff
