#pragma once

#include <optional>

#include "logeff/ledger.hpp"

namespace logeff {

/// Integer percent of num/den, rounded half away from zero. den >= 1.
int round_percent(std::size_t numerator, std::size_t denominator);

/// Share of raw-present signatures that survive normalization.
struct EffectivenessScore {
    std::size_t preserved = 0;
    std::size_t total = 0;
    int percent = 0;
};

/// Throws ZeroDenominator (total == 0) or PreservedExceedsTotal.
EffectivenessScore effectiveness(std::size_t preserved, std::size_t total);

/// Effectiveness for one schema over the rows in scope: one phase or, with
/// nullopt, all phases together. Optional group filter narrows to one
/// vulnerability class. Throws ZeroDenominator when nothing is in_raw.
EffectivenessScore phase_effectiveness(const SignatureLedger& ledger, const std::string& schema_id,
                                       std::optional<Phase> phase,
                                       std::optional<VulnClass> group = std::nullopt);

/// Whether one session keeps at least one high-fidelity signature per phase
/// after normalization. full requires all three phases.
struct DetectionVerdict {
    std::string cve;
    std::size_t session_idx = 0;
    VulnClass vuln_class = VulnClass::Service;
    std::string schema_id;
    bool initial_access = false;
    bool execution = false;
    bool c2 = false;
    bool full = false;

    bool phase_flag(Phase phase) const;
};

DetectionVerdict detection(const SignatureLedger& ledger, const ExploitSession& session,
                           std::size_t session_idx, const std::string& schema_id);

/// One verdict per session, in session order.
std::vector<DetectionVerdict> all_detections(const SignatureLedger& ledger,
                                             const std::vector<ExploitSession>& sessions,
                                             const std::string& schema_id);

struct DetectionRate {
    std::size_t detected = 0;
    std::size_t total = 0;
    int percent = 0;
};

/// Share of verdicts with the selected flag true: one phase, or full-chain
/// detection with nullopt. Throws ZeroDenominator on an empty verdict list.
DetectionRate detection_rate(const std::vector<DetectionVerdict>& verdicts,
                             std::optional<Phase> phase);

/// Events-per-session spread. stdev is the population form.
struct VolumeLine {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    double stdev = 0.0;
};

struct VolumeStats {
    std::map<EventSource, VolumeLine> per_source;  // all three sources always present
    VolumeLine combined;
    std::size_t session_count = 0;
};

/// Throws ZeroDenominator when there are no sessions.
VolumeStats volume_stats(const std::vector<ExploitSession>& sessions, const EventCorpus& corpus);

/// Rendered as "-" when undefined (empty scope).
struct ScoreCell {
    bool defined = false;
    std::size_t num = 0;
    std::size_t den = 0;
    int percent = 0;
};

struct ScoreRow {
    std::string group;  // "web" | "service" | "combined"
    std::string schema_id;
    // signature effectiveness
    ScoreCell overall, initial_access, execution, c2;
    // session detection rates
    ScoreCell det_full, det_initial_access, det_execution, det_c2;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;  // groups ordered web, service, combined
};

enum class GroupBy { None, VulnClass };

/// With GroupBy::None only the combined rows are produced; with
/// GroupBy::VulnClass the web and service splits come first. Empty scopes
/// yield undefined cells, never errors.
ScoreTable aggregate(const SignatureLedger& ledger, const std::vector<ExploitSession>& sessions,
                     GroupBy group_by);

}  // namespace logeff
