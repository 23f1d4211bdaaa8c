#pragma once

#include "logeff/metrics.hpp"
#include "logeff/scenario.hpp"

namespace logeff {

enum class GapCause { UnmappedField, TransformLoss, NotInRaw };
const char* to_string(GapCause cause);

/// Why one raw-present signature failed to survive one schema.
struct GapEntry {
    std::string signature_id;
    std::string cve;
    std::size_t session_idx = 0;
    Phase phase = Phase::InitialAccess;
    std::string schema_id;  // empty for NotInRaw
    GapCause cause = GapCause::UnmappedField;
    std::vector<std::string> paths;  // offending raw paths, sorted
};

struct GapReport {
    std::vector<GapEntry> lost;        // in_raw and not preserved
    std::vector<GapEntry> not_in_raw;  // absent from raw, excluded from scoring
};

/// Attributes each loss to the raw paths whose Match flipped from true on the
/// raw event to false after normalization: unmapped paths win over lossy
/// transforms when both occur.
GapReport gap_report(const SignatureLedger& ledger, const EventCorpus& corpus,
                     const SignatureSet& sigs, const std::vector<SchemaTemplate>& templates);

std::string render_gap_text(const GapReport& report);
std::string render_gap_csv(const GapReport& report);
std::string render_gap_json(const GapReport& report);

/// Per-session scores for the report head: one line per schema.
struct SessionScore {
    std::string cve;
    std::size_t session_idx = 0;
    VulnClass vuln_class = VulnClass::Service;
    std::map<std::string, ScoreCell> overall;  // schema_id -> effectiveness
    std::map<std::string, bool> detection;     // schema_id -> full-chain verdict
};

struct ScoreReport {
    std::vector<SessionScore> sessions;
    ScoreTable table;
    std::vector<std::string> warnings;
};

ScoreReport build_score_report(const SignatureLedger& ledger,
                               const std::vector<ExploitSession>& sessions, GroupBy group_by);

std::string render_score_text(const ScoreReport& report);
std::string render_score_csv(const ScoreReport& report);
std::string render_score_json(const ScoreReport& report);

std::string render_volumes_text(const VolumeStats& stats);
std::string render_volumes_csv(const VolumeStats& stats);
std::string render_volumes_json(const VolumeStats& stats);

/// Detect / partial / undetect split of the web sessions by delivery vector.
struct DetectBranch {
    std::size_t n = 0;
    std::size_t detect = 0;    // all three phases
    std::size_t partial = 0;   // at least one but not all
    std::size_t undetect = 0;  // none
};

struct DetectTree {
    std::string schema_id;
    std::size_t total = 0;
    DetectBranch get, mixed, post;
    std::vector<std::string> unclassified;  // web sessions with no http events
};

/// Vector ground truth per session: manifests matched by CVE first, then
/// inference from the session's http method mix (GET only, POST only, both).
std::map<std::size_t, AttackVector> session_vectors(const std::vector<ExploitSession>& sessions,
                                                    const EventCorpus& corpus,
                                                    const std::vector<ScenarioManifest>& manifests);

DetectTree detect_tree(const SignatureLedger& ledger, const std::vector<ExploitSession>& sessions,
                       const std::string& schema_id,
                       const std::map<std::size_t, AttackVector>& vectors);

std::string render_tree_text(const DetectTree& tree);
std::string render_tree_json(const std::vector<DetectTree>& trees);

}  // namespace logeff
