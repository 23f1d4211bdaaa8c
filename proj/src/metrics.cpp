#include "logeff/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "logeff/error.hpp"

namespace logeff {

int round_percent(std::size_t numerator, std::size_t denominator) {
    internal_check(denominator >= 1, "round_percent with zero denominator");
    // Exact integer form of round-half-away-from-zero(100 * num / den).
    const unsigned long long n = numerator;
    const unsigned long long d = denominator;
    return static_cast<int>((200ULL * n + d) / (2ULL * d));
}

EffectivenessScore effectiveness(std::size_t preserved, std::size_t total) {
    if (total == 0) {
        throw Error(ErrorKind::ZeroDenominator, "effectiveness over zero raw signatures");
    }
    if (preserved > total) {
        throw Error(ErrorKind::PreservedExceedsTotal,
                    std::to_string(preserved) + " preserved > " + std::to_string(total) + " total");
    }
    EffectivenessScore score;
    score.preserved = preserved;
    score.total = total;
    score.percent = round_percent(preserved, total);
    return score;
}

EffectivenessScore phase_effectiveness(const SignatureLedger& ledger, const std::string& schema_id,
                                       std::optional<Phase> phase,
                                       std::optional<VulnClass> group) {
    std::size_t total = 0;
    std::size_t preserved = 0;
    for (const auto& row : ledger.rows) {
        if (!row.in_raw) continue;
        if (phase && row.phase != *phase) continue;
        if (group && row.vuln_class != *group) continue;
        ++total;
        auto it = row.preserved.find(schema_id);
        if (it != row.preserved.end() && it->second) ++preserved;
    }
    return effectiveness(preserved, total);
}

bool DetectionVerdict::phase_flag(Phase phase) const {
    switch (phase) {
    case Phase::InitialAccess: return initial_access;
    case Phase::Execution: return execution;
    case Phase::CommandAndControl: return c2;
    }
    return false;
}

DetectionVerdict detection(const SignatureLedger& ledger, const ExploitSession& session,
                           std::size_t session_idx, const std::string& schema_id) {
    DetectionVerdict verdict;
    verdict.cve = session.cve;
    verdict.session_idx = session_idx;
    verdict.vuln_class = session.vuln_class;
    verdict.schema_id = schema_id;
    for (const auto& row : ledger.rows) {
        if (row.session_idx != session_idx || row.fidelity != Fidelity::High) continue;
        auto it = row.preserved.find(schema_id);
        if (it == row.preserved.end() || !it->second) continue;
        switch (row.phase) {
        case Phase::InitialAccess: verdict.initial_access = true; break;
        case Phase::Execution: verdict.execution = true; break;
        case Phase::CommandAndControl: verdict.c2 = true; break;
        }
    }
    verdict.full = verdict.initial_access && verdict.execution && verdict.c2;
    return verdict;
}

std::vector<DetectionVerdict> all_detections(const SignatureLedger& ledger,
                                             const std::vector<ExploitSession>& sessions,
                                             const std::string& schema_id) {
    std::vector<DetectionVerdict> verdicts;
    verdicts.reserve(sessions.size());
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        verdicts.push_back(detection(ledger, sessions[i], i, schema_id));
    }
    return verdicts;
}

DetectionRate detection_rate(const std::vector<DetectionVerdict>& verdicts,
                             std::optional<Phase> phase) {
    if (verdicts.empty()) {
        throw Error(ErrorKind::ZeroDenominator, "detection rate over zero sessions");
    }
    DetectionRate rate;
    rate.total = verdicts.size();
    for (const auto& v : verdicts) {
        if (phase ? v.phase_flag(*phase) : v.full) ++rate.detected;
    }
    rate.percent = round_percent(rate.detected, rate.total);
    return rate;
}

namespace {

VolumeLine line_from_counts(const std::vector<std::size_t>& counts) {
    VolumeLine line;
    line.min = *std::min_element(counts.begin(), counts.end());
    line.max = *std::max_element(counts.begin(), counts.end());
    double sum = 0.0;
    for (std::size_t c : counts) sum += static_cast<double>(c);
    line.mean = sum / static_cast<double>(counts.size());
    double sq = 0.0;
    for (std::size_t c : counts) {
        const double d = static_cast<double>(c) - line.mean;
        sq += d * d;
    }
    line.stdev = std::sqrt(sq / static_cast<double>(counts.size()));
    return line;
}

}  // namespace

VolumeStats volume_stats(const std::vector<ExploitSession>& sessions, const EventCorpus& corpus) {
    if (sessions.empty()) {
        throw Error(ErrorKind::ZeroDenominator, "volume stats over zero sessions");
    }
    VolumeStats stats;
    stats.session_count = sessions.size();
    std::map<EventSource, std::vector<std::size_t>> per_source;
    std::vector<std::size_t> combined;
    for (const auto& session : sessions) {
        std::map<EventSource, std::size_t> counts = {{EventSource::Network, 0},
                                                     {EventSource::Http, 0},
                                                     {EventSource::Process, 0}};
        for (std::size_t idx : session.event_idx) {
            ++counts[corpus.events.at(idx).source];
        }
        for (const auto& [source, count] : counts) {
            per_source[source].push_back(count);
        }
        combined.push_back(session.event_idx.size());
    }
    for (const auto& [source, counts] : per_source) {
        stats.per_source[source] = line_from_counts(counts);
    }
    stats.combined = line_from_counts(combined);
    return stats;
}

namespace {

ScoreCell eff_cell(const SignatureLedger& ledger, const std::string& schema_id,
                   std::optional<Phase> phase, std::optional<VulnClass> group) {
    ScoreCell cell;
    try {
        EffectivenessScore score = phase_effectiveness(ledger, schema_id, phase, group);
        cell.defined = true;
        cell.num = score.preserved;
        cell.den = score.total;
        cell.percent = score.percent;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroDenominator) throw;
    }
    return cell;
}

ScoreCell det_cell(const std::vector<DetectionVerdict>& verdicts, std::optional<Phase> phase) {
    ScoreCell cell;
    try {
        DetectionRate rate = detection_rate(verdicts, phase);
        cell.defined = true;
        cell.num = rate.detected;
        cell.den = rate.total;
        cell.percent = rate.percent;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroDenominator) throw;
    }
    return cell;
}

ScoreRow make_row(const SignatureLedger& ledger, const std::vector<ExploitSession>& sessions,
                  const std::string& group, std::optional<VulnClass> vuln_class,
                  const std::string& schema_id) {
    ScoreRow row;
    row.group = group;
    row.schema_id = schema_id;
    row.overall = eff_cell(ledger, schema_id, std::nullopt, vuln_class);
    row.initial_access = eff_cell(ledger, schema_id, Phase::InitialAccess, vuln_class);
    row.execution = eff_cell(ledger, schema_id, Phase::Execution, vuln_class);
    row.c2 = eff_cell(ledger, schema_id, Phase::CommandAndControl, vuln_class);

    std::vector<DetectionVerdict> verdicts;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        if (vuln_class && sessions[i].vuln_class != *vuln_class) continue;
        verdicts.push_back(detection(ledger, sessions[i], i, schema_id));
    }
    row.det_full = det_cell(verdicts, std::nullopt);
    row.det_initial_access = det_cell(verdicts, Phase::InitialAccess);
    row.det_execution = det_cell(verdicts, Phase::Execution);
    row.det_c2 = det_cell(verdicts, Phase::CommandAndControl);
    return row;
}

}  // namespace

ScoreTable aggregate(const SignatureLedger& ledger, const std::vector<ExploitSession>& sessions,
                     GroupBy group_by) {
    ScoreTable table;
    if (group_by == GroupBy::VulnClass) {
        for (const auto& schema_id : ledger.schema_ids) {
            table.rows.push_back(make_row(ledger, sessions, "web", VulnClass::Web, schema_id));
        }
        for (const auto& schema_id : ledger.schema_ids) {
            table.rows.push_back(
                make_row(ledger, sessions, "service", VulnClass::Service, schema_id));
        }
    }
    for (const auto& schema_id : ledger.schema_ids) {
        table.rows.push_back(make_row(ledger, sessions, "combined", std::nullopt, schema_id));
    }
    return table;
}

}  // namespace logeff
