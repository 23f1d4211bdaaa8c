#include "logeff/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "logeff/error.hpp"

namespace logeff {

namespace {

using json = nlohmann::json;

std::string cell_text(const ScoreCell& cell) {
    if (!cell.defined) return "-";
    return std::to_string(cell.percent) + "% (" + std::to_string(cell.num) + "/" +
           std::to_string(cell.den) + ")";
}

json cell_json(const ScoreCell& cell) {
    if (!cell.defined) return nullptr;
    json j;
    j["percent"] = cell.percent;
    j["preserved"] = cell.num;
    j["total"] = cell.den;
    j["text"] = cell_text(cell);
    return j;
}

/// Aligns rows into columns separated by two spaces.
std::string table_text(const std::vector<std::vector<std::string>>& rows, int indent) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c >= widths.size()) widths.push_back(0);
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        out << std::string(indent, ' ');
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size()) {
                out << std::string(widths[c] - row[c].size() + 2, ' ');
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string one_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

/// Collects Match paths that hold on the raw event but fail after
/// normalization, split by why they fail.
void collect_flips(const Predicate& predicate, const RawEvent& event,
                   const NormalizedEvent& normalized, const SchemaTemplate& tpl,
                   std::set<std::string>& unmapped, std::set<std::string>& lossy) {
    switch (predicate.kind) {
    case Predicate::Kind::All:
    case Predicate::Kind::Any:
        for (const auto& child : predicate.children) {
            collect_flips(child, event, normalized, tpl, unmapped, lossy);
        }
        return;
    case Predicate::Kind::Match: {
        if (!predicate.matcher.matches(event.field(predicate.path))) return;
        if (eval_predicate_normalized(predicate, normalized, tpl)) return;
        if (tpl.targets_for(event.source, predicate.path).empty()) {
            unmapped.insert(predicate.path);
        } else {
            lossy.insert(predicate.path);
        }
        return;
    }
    }
}

}  // namespace

const char* to_string(GapCause cause) {
    switch (cause) {
    case GapCause::UnmappedField: return "unmapped_field";
    case GapCause::TransformLoss: return "transform_loss";
    case GapCause::NotInRaw: return "not_in_raw";
    }
    return "unmapped_field";
}

GapReport gap_report(const SignatureLedger& ledger, const EventCorpus& corpus,
                     const SignatureSet& sigs, const std::vector<SchemaTemplate>& templates) {
    std::map<std::string, const SchemaTemplate*> by_id;
    for (const auto& tpl : templates) by_id[tpl.schema_id] = &tpl;

    GapReport report;
    for (const auto& row : ledger.rows) {
        const Signature* sig = sigs.find(row.signature_id);
        internal_check(sig != nullptr, "ledger row for unknown signature " + row.signature_id);
        if (!row.in_raw) {
            GapEntry entry;
            entry.signature_id = row.signature_id;
            entry.cve = row.cve;
            entry.session_idx = row.session_idx;
            entry.phase = row.phase;
            entry.cause = GapCause::NotInRaw;
            report.not_in_raw.push_back(std::move(entry));
            continue;
        }
        for (const auto& schema_id : ledger.schema_ids) {
            if (row.preserved.at(schema_id)) continue;
            const SchemaTemplate* tpl = by_id.at(schema_id);
            std::set<std::string> unmapped;
            std::set<std::string> lossy;
            for (std::size_t idx : row.raw_matches) {
                const RawEvent& event = corpus.events.at(idx);
                const NormalizedEvent normalized = normalize(event, *tpl);
                collect_flips(sig->predicate, event, normalized, *tpl, unmapped, lossy);
            }
            GapEntry entry;
            entry.signature_id = row.signature_id;
            entry.cve = row.cve;
            entry.session_idx = row.session_idx;
            entry.phase = row.phase;
            entry.schema_id = schema_id;
            if (!unmapped.empty()) {
                entry.cause = GapCause::UnmappedField;
                entry.paths.assign(unmapped.begin(), unmapped.end());
            } else {
                entry.cause = GapCause::TransformLoss;
                entry.paths.assign(lossy.begin(), lossy.end());
            }
            report.lost.push_back(std::move(entry));
        }
    }

    auto order = [](const GapEntry& a, const GapEntry& b) {
        return std::tie(a.cve, a.session_idx, a.schema_id, a.signature_id) <
               std::tie(b.cve, b.session_idx, b.schema_id, b.signature_id);
    };
    std::sort(report.lost.begin(), report.lost.end(), order);
    std::sort(report.not_in_raw.begin(), report.not_in_raw.end(), order);
    return report;
}

namespace {

std::string joined_paths(const GapEntry& entry) {
    std::string out;
    for (const auto& path : entry.paths) {
        if (!out.empty()) out += ",";
        out += path;
    }
    return out;
}

}  // namespace

std::string render_gap_text(const GapReport& report) {
    std::ostringstream out;
    out << "signature gaps (present in raw, lost in normalization)\n";
    if (report.lost.empty()) {
        out << "  none\n";
    } else {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"cve", "signature", "phase", "schema", "cause", "paths"});
        for (const auto& e : report.lost) {
            rows.push_back({e.cve, e.signature_id, to_string(e.phase), e.schema_id,
                            to_string(e.cause), "(" + joined_paths(e) + ")"});
        }
        out << table_text(rows, 2);
    }
    if (!report.not_in_raw.empty()) {
        out << "not present in raw telemetry (excluded from scoring)\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : report.not_in_raw) {
            rows.push_back({e.cve, e.signature_id, to_string(e.phase)});
        }
        out << table_text(rows, 2);
    }
    return out.str();
}

std::string render_gap_csv(const GapReport& report) {
    std::ostringstream out;
    out << "cve,session,signature,phase,schema,cause,paths\n";
    auto emit = [&out](const GapEntry& e) {
        out << e.cve << ',' << e.session_idx << ',' << e.signature_id << ',' << to_string(e.phase)
            << ',' << e.schema_id << ',' << to_string(e.cause) << ',';
        for (std::size_t i = 0; i < e.paths.size(); ++i) {
            if (i) out << ';';
            out << e.paths[i];
        }
        out << '\n';
    };
    for (const auto& e : report.lost) emit(e);
    for (const auto& e : report.not_in_raw) emit(e);
    return out.str();
}

namespace {

json gap_entry_json(const GapEntry& e) {
    json j;
    j["cve"] = e.cve;
    j["session"] = e.session_idx;
    j["signature"] = e.signature_id;
    j["phase"] = to_string(e.phase);
    if (!e.schema_id.empty()) j["schema"] = e.schema_id;
    j["cause"] = to_string(e.cause);
    j["paths"] = e.paths;
    return j;
}

}  // namespace

std::string render_gap_json(const GapReport& report) {
    json j;
    j["lost"] = json::array();
    for (const auto& e : report.lost) j["lost"].push_back(gap_entry_json(e));
    j["not_in_raw"] = json::array();
    for (const auto& e : report.not_in_raw) j["not_in_raw"].push_back(gap_entry_json(e));
    return j.dump(2) + "\n";
}

ScoreReport build_score_report(const SignatureLedger& ledger,
                               const std::vector<ExploitSession>& sessions, GroupBy group_by) {
    ScoreReport report;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        SessionScore score;
        score.cve = sessions[i].cve;
        score.session_idx = i;
        score.vuln_class = sessions[i].vuln_class;
        std::size_t total = 0;
        std::map<std::string, std::size_t> preserved;
        for (const auto& row : ledger.rows) {
            if (row.session_idx != i || !row.in_raw) continue;
            ++total;
            for (const auto& [schema_id, kept] : row.preserved) {
                if (kept) ++preserved[schema_id];
            }
        }
        for (const auto& schema_id : ledger.schema_ids) {
            ScoreCell cell;
            if (total > 0) {
                cell.defined = true;
                cell.num = preserved[schema_id];
                cell.den = total;
                cell.percent = round_percent(cell.num, cell.den);
            }
            score.overall[schema_id] = cell;
            score.detection[schema_id] = detection(ledger, sessions[i], i, schema_id).full;
        }
        report.sessions.push_back(std::move(score));
    }
    report.table = aggregate(ledger, sessions, group_by);
    for (const auto& warning : ledger.unknown_cves) {
        report.warnings.push_back("no session for signature " + warning);
    }
    return report;
}

std::string render_score_text(const ScoreReport& report) {
    std::ostringstream out;
    out << "sessions\n";
    if (report.sessions.empty()) {
        out << "  none\n";
    } else {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"cve", "class", "schema", "effectiveness", "detection"});
        for (const auto& s : report.sessions) {
            for (const auto& [schema_id, cell] : s.overall) {
                rows.push_back({s.cve, to_string(s.vuln_class), schema_id, cell_text(cell),
                                s.detection.at(schema_id) ? "true" : "false"});
            }
        }
        out << table_text(rows, 2);
    }

    out << "\nsignature effectiveness\n";
    std::vector<std::vector<std::string>> eff;
    eff.push_back({"group", "schema", "overall", "initial_access", "execution", "c2"});
    for (const auto& row : report.table.rows) {
        eff.push_back({row.group, row.schema_id, cell_text(row.overall),
                       cell_text(row.initial_access), cell_text(row.execution),
                       cell_text(row.c2)});
    }
    out << table_text(eff, 2);

    out << "\ndetection rates\n";
    std::vector<std::vector<std::string>> det;
    det.push_back({"group", "schema", "full", "initial_access", "execution", "c2"});
    for (const auto& row : report.table.rows) {
        det.push_back({row.group, row.schema_id, cell_text(row.det_full),
                       cell_text(row.det_initial_access), cell_text(row.det_execution),
                       cell_text(row.det_c2)});
    }
    out << table_text(det, 2);

    if (!report.warnings.empty()) {
        out << "\nwarnings\n";
        for (const auto& w : report.warnings) out << "  " << w << '\n';
    }
    return out.str();
}

std::string render_score_csv(const ScoreReport& report) {
    std::ostringstream out;
    out << "group,schema,overall,initial_access,execution,c2,det_full,det_initial_access,"
           "det_execution,det_c2\n";
    for (const auto& row : report.table.rows) {
        out << row.group << ',' << row.schema_id << ',' << cell_text(row.overall) << ','
            << cell_text(row.initial_access) << ',' << cell_text(row.execution) << ','
            << cell_text(row.c2) << ',' << cell_text(row.det_full) << ','
            << cell_text(row.det_initial_access) << ',' << cell_text(row.det_execution) << ','
            << cell_text(row.det_c2) << '\n';
    }
    return out.str();
}

std::string render_score_json(const ScoreReport& report) {
    json j;
    j["sessions"] = json::array();
    for (const auto& s : report.sessions) {
        json js;
        js["cve"] = s.cve;
        js["session"] = s.session_idx;
        js["vuln_class"] = to_string(s.vuln_class);
        js["schemas"] = json::object();
        for (const auto& [schema_id, cell] : s.overall) {
            json sch;
            sch["effectiveness"] = cell_json(cell);
            sch["detection"] = s.detection.at(schema_id);
            js["schemas"][schema_id] = std::move(sch);
        }
        j["sessions"].push_back(std::move(js));
    }
    j["table"] = json::array();
    for (const auto& row : report.table.rows) {
        json jr;
        jr["group"] = row.group;
        jr["schema"] = row.schema_id;
        jr["effectiveness"] = {{"overall", cell_json(row.overall)},
                               {"initial_access", cell_json(row.initial_access)},
                               {"execution", cell_json(row.execution)},
                               {"c2", cell_json(row.c2)}};
        jr["detection"] = {{"full", cell_json(row.det_full)},
                           {"initial_access", cell_json(row.det_initial_access)},
                           {"execution", cell_json(row.det_execution)},
                           {"c2", cell_json(row.det_c2)}};
        j["table"].push_back(std::move(jr));
    }
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> volume_row(const std::string& label, const VolumeLine& line) {
    return {label, std::to_string(line.min), std::to_string(line.max), one_decimal(line.mean),
            std::to_string(static_cast<long long>(std::llround(line.stdev)))};
}

json volume_json(const VolumeLine& line) {
    json j;
    j["min"] = line.min;
    j["max"] = line.max;
    j["mean"] = line.mean;
    j["stdev"] = line.stdev;
    return j;
}

const std::vector<EventSource>& volume_order() {
    static const std::vector<EventSource> order = {EventSource::Http, EventSource::Network,
                                                   EventSource::Process};
    return order;
}

}  // namespace

std::string render_volumes_text(const VolumeStats& stats) {
    std::ostringstream out;
    out << "events per session (" << stats.session_count << " sessions)\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"source", "min", "max", "mean", "stdev"});
    for (EventSource source : volume_order()) {
        rows.push_back(volume_row(to_string(source), stats.per_source.at(source)));
    }
    rows.push_back(volume_row("combined", stats.combined));
    out << table_text(rows, 2);
    return out.str();
}

std::string render_volumes_csv(const VolumeStats& stats) {
    std::ostringstream out;
    out << "source,min,max,mean,stdev\n";
    auto emit = [&out](const std::string& label, const VolumeLine& line) {
        out << label << ',' << line.min << ',' << line.max << ',' << one_decimal(line.mean) << ','
            << std::llround(line.stdev) << '\n';
    };
    for (EventSource source : volume_order()) {
        emit(to_string(source), stats.per_source.at(source));
    }
    emit("combined", stats.combined);
    return out.str();
}

std::string render_volumes_json(const VolumeStats& stats) {
    json j;
    j["sessions"] = stats.session_count;
    for (EventSource source : volume_order()) {
        j["per_source"][to_string(source)] = volume_json(stats.per_source.at(source));
    }
    j["combined"] = volume_json(stats.combined);
    return j.dump(2) + "\n";
}

std::map<std::size_t, AttackVector> session_vectors(const std::vector<ExploitSession>& sessions,
                                                    const EventCorpus& corpus,
                                                    const std::vector<ScenarioManifest>& manifests) {
    std::map<std::string, AttackVector> by_cve;
    for (const auto& m : manifests) by_cve[m.cve] = m.vector;

    std::map<std::size_t, AttackVector> vectors;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        auto it = by_cve.find(sessions[i].cve);
        if (it != by_cve.end()) {
            vectors[i] = it->second;
            continue;
        }
        bool has_get = false;
        bool has_post = false;
        for (std::size_t idx : sessions[i].event_idx) {
            const RawEvent& event = corpus.events.at(idx);
            if (event.source != EventSource::Http) continue;
            const Value* method = event.field("method");
            const auto* text = method ? std::get_if<std::string>(method) : nullptr;
            if (!text) continue;
            if (*text == "GET") has_get = true;
            if (*text == "POST") has_post = true;
        }
        if (has_get && has_post) {
            vectors[i] = AttackVector::HttpMixed;
        } else if (has_get) {
            vectors[i] = AttackVector::HttpGet;
        } else if (has_post) {
            vectors[i] = AttackVector::HttpPost;
        }
        // No http traffic at all: left unclassified.
    }
    return vectors;
}

DetectTree detect_tree(const SignatureLedger& ledger, const std::vector<ExploitSession>& sessions,
                       const std::string& schema_id,
                       const std::map<std::size_t, AttackVector>& vectors) {
    DetectTree tree;
    tree.schema_id = schema_id;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        if (sessions[i].vuln_class != VulnClass::Web) continue;
        auto it = vectors.find(i);
        if (it == vectors.end()) {
            tree.unclassified.push_back(sessions[i].cve);
            continue;
        }
        DetectBranch* branch = nullptr;
        switch (it->second) {
        case AttackVector::HttpGet: branch = &tree.get; break;
        case AttackVector::HttpMixed: branch = &tree.mixed; break;
        case AttackVector::HttpPost:
        case AttackVector::ServicePayload: branch = &tree.post; break;
        }
        const DetectionVerdict v = detection(ledger, sessions[i], i, schema_id);
        const int phases = (v.initial_access ? 1 : 0) + (v.execution ? 1 : 0) + (v.c2 ? 1 : 0);
        ++branch->n;
        ++tree.total;
        if (phases == 3) {
            ++branch->detect;
        } else if (phases > 0) {
            ++branch->partial;
        } else {
            ++branch->undetect;
        }
    }
    return tree;
}

namespace {

void render_branch(std::ostringstream& out, const std::string& label, const DetectBranch& branch,
                   bool last) {
    const char* stem = last ? "`- " : "+- ";
    const char* pad = last ? "   " : "|  ";
    out << stem << label << " n=" << branch.n << '\n';
    std::vector<std::pair<const char*, std::size_t>> leaves;
    if (branch.detect) leaves.push_back({"detect", branch.detect});
    if (branch.partial) leaves.push_back({"partial", branch.partial});
    if (branch.undetect) leaves.push_back({"undetect", branch.undetect});
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        out << pad << (i + 1 == leaves.size() ? "`- " : "+- ") << leaves[i].first
            << " n=" << leaves[i].second << '\n';
    }
}

}  // namespace

std::string render_tree_text(const DetectTree& tree) {
    std::ostringstream out;
    out << tree.schema_id << " web sessions n=" << tree.total << '\n';
    render_branch(out, "GET", tree.get, false);
    render_branch(out, "Mixed", tree.mixed, false);
    render_branch(out, "POST", tree.post, true);
    if (!tree.unclassified.empty()) {
        out << "unclassified (no http traffic):";
        for (const auto& cve : tree.unclassified) out << ' ' << cve;
        out << '\n';
    }
    return out.str();
}

std::string render_tree_json(const std::vector<DetectTree>& trees) {
    json arr = json::array();
    for (const auto& tree : trees) {
        json j;
        j["schema"] = tree.schema_id;
        j["total"] = tree.total;
        auto branch = [](const DetectBranch& b) {
            json jb;
            jb["n"] = b.n;
            jb["detect"] = b.detect;
            jb["partial"] = b.partial;
            jb["undetect"] = b.undetect;
            return jb;
        };
        j["branches"] = {
            {"get", branch(tree.get)}, {"mixed", branch(tree.mixed)}, {"post", branch(tree.post)}};
        j["unclassified"] = tree.unclassified;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

}  // namespace logeff
