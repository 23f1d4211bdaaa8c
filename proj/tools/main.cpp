#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "logeff/error.hpp"
#include "logeff/ledger.hpp"
#include "logeff/metrics.hpp"
#include "logeff/report.hpp"
#include "logeff/scenario.hpp"

namespace {

using namespace logeff;
using json = nlohmann::json;

struct PipelineFlags {
    std::string raw;
    std::string attack_log;
    std::string signatures;
    std::string templates_dir;
    std::string schemas = "cim,ocsf,ecs";
    std::string group_by = "none";
    std::string format = "text";
    std::string out;
    long long slack_pre = 2;   // seconds
    long long slack_post = 5;  // seconds
};

std::vector<std::string> split_schemas(const std::string& text) {
    std::vector<std::string> ids;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            if (!current.empty()) ids.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) ids.push_back(current);
    if (ids.empty()) {
        throw Error(ErrorKind::TemplateParse, "--schemas lists no schema ids");
    }
    return ids;
}

std::vector<SchemaTemplate> load_template_set(const PipelineFlags& flags) {
    std::vector<SchemaTemplate> templates;
    for (const auto& id : split_schemas(flags.schemas)) {
        if (flags.templates_dir.empty()) {
            templates.push_back(builtin_template(id));
        } else {
            templates.push_back(load_template(flags.templates_dir + "/" + id + ".json"));
        }
    }
    return templates;
}

SlackWindow slack_of(const PipelineFlags& flags) {
    SlackWindow slack;
    slack.pre_ms = flags.slack_pre * 1000;
    slack.post_ms = flags.slack_post * 1000;
    return slack;
}

GroupBy group_by_of(const PipelineFlags& flags) {
    if (flags.group_by == "none") return GroupBy::None;
    if (flags.group_by == "vuln-class") return GroupBy::VulnClass;
    throw Error(ErrorKind::InvalidSpec, "unknown --group-by \"" + flags.group_by + "\"");
}

void check_format(const std::string& format) {
    if (format != "text" && format != "csv" && format != "json") {
        throw Error(ErrorKind::InvalidSpec, "unknown --format \"" + format + "\"");
    }
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::IoFailure, "cannot write " + out_path);
    }
    out << text;
}

struct Pipeline {
    EventCorpus corpus;
    std::vector<AttackRecord> records;
    SessionBuildResult build;
    SignatureSet sigs;
    std::vector<SchemaTemplate> templates;
    SignatureLedger ledger;
};

Pipeline run_pipeline(const PipelineFlags& flags, bool with_signatures) {
    Pipeline p;
    p.corpus = load_corpus(flags.raw);
    p.records = load_attack_records(flags.attack_log);
    p.build = build_sessions(p.records, p.corpus, slack_of(flags));
    if (with_signatures) {
        p.sigs = load_signatures(flags.signatures);
        p.templates = load_template_set(flags);
        p.ledger = build_ledger(p.build.sessions, p.corpus, p.sigs, p.templates);
    }
    return p;
}

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags, bool with_signatures) {
    cmd->add_option("--raw", flags.raw, "raw telemetry JSONL")->required();
    cmd->add_option("--attack-log", flags.attack_log, "attack record JSONL")->required();
    if (with_signatures) {
        cmd->add_option("--signatures", flags.signatures, "signature JSON file")->required();
        cmd->add_option("--templates", flags.templates_dir,
                        "directory with <schema>.json templates (default: built-ins)");
        cmd->add_option("--schemas", flags.schemas, "comma-separated schema ids");
    }
    cmd->add_option("--format", flags.format, "text|csv|json");
    cmd->add_option("--out", flags.out, "output path (default: stdout)");
    cmd->add_option("--slack-pre", flags.slack_pre, "seconds of pre-window slack");
    cmd->add_option("--slack-post", flags.slack_post, "seconds of post-window slack");
}

int cmd_ingest(const PipelineFlags& flags) {
    check_format(flags.format);
    Pipeline p = run_pipeline(flags, false);

    std::map<EventSource, std::size_t> by_source;
    for (const auto& e : p.corpus.events) ++by_source[e.source];

    std::ostringstream text;
    if (flags.format == "json") {
        json j;
        j["events"] = p.corpus.events.size();
        for (const auto& [source, count] : by_source) {
            j["by_source"][to_string(source)] = count;
        }
        j["skipped_lines"] = p.corpus.skipped;
        j["untagged"] = p.build.untagged.size();
        j["sessions"] = json::array();
        for (const auto& s : p.build.sessions) {
            json js;
            js["cve"] = s.cve;
            js["vuln_class"] = to_string(s.vuln_class);
            js["service"] = s.service;
            js["events"] = s.event_idx.size();
            js["window_start"] = format_timestamp(s.window_start);
            js["window_end"] = format_timestamp(s.window_end);
            j["sessions"].push_back(std::move(js));
        }
        j["warnings"] = p.build.overlap_warnings;
        text << j.dump(2) << '\n';
    } else if (flags.format == "csv") {
        text << "cve,vuln_class,service,events,window_start,window_end\n";
        for (const auto& s : p.build.sessions) {
            text << s.cve << ',' << to_string(s.vuln_class) << ',' << s.service << ','
                 << s.event_idx.size() << ',' << format_timestamp(s.window_start) << ','
                 << format_timestamp(s.window_end) << '\n';
        }
    } else {
        text << "corpus: " << p.corpus.events.size() << " events (";
        bool first = true;
        for (const auto& [source, count] : by_source) {
            if (!first) text << ", ";
            text << to_string(source) << " " << count;
            first = false;
        }
        text << "), " << p.corpus.skipped << " malformed lines skipped\n";
        text << "sessions: " << p.build.sessions.size() << "\n";
        for (const auto& s : p.build.sessions) {
            text << "  " << s.cve << " " << to_string(s.vuln_class) << " (" << s.service << ") "
                 << s.event_idx.size() << " events, " << format_timestamp(s.window_start) << " .. "
                 << format_timestamp(s.window_end) << "\n";
        }
        text << "untagged events: " << p.build.untagged.size() << "\n";
        for (const auto& w : p.build.overlap_warnings) {
            text << "warning: " << w << "\n";
        }
    }
    write_output(text.str(), flags.out);
    return 0;
}

int cmd_score(const PipelineFlags& flags) {
    check_format(flags.format);
    Pipeline p = run_pipeline(flags, true);
    ScoreReport report = build_score_report(p.ledger, p.build.sessions, group_by_of(flags));
    for (const auto& w : p.build.overlap_warnings) report.warnings.push_back(w);
    std::string text;
    if (flags.format == "json") {
        text = render_score_json(report);
    } else if (flags.format == "csv") {
        text = render_score_csv(report);
    } else {
        text = render_score_text(report);
    }
    write_output(text, flags.out);
    return 0;
}

int cmd_gaps(const PipelineFlags& flags) {
    check_format(flags.format);
    Pipeline p = run_pipeline(flags, true);
    GapReport report = gap_report(p.ledger, p.corpus, p.sigs, p.templates);
    std::string text;
    if (flags.format == "json") {
        text = render_gap_json(report);
    } else if (flags.format == "csv") {
        text = render_gap_csv(report);
    } else {
        text = render_gap_text(report);
    }
    write_output(text, flags.out);
    return 0;
}

int cmd_tree(const PipelineFlags& flags, const std::vector<std::string>& manifest_paths) {
    check_format(flags.format);
    if (flags.format == "csv") {
        throw Error(ErrorKind::InvalidSpec, "tree output is text or json");
    }
    Pipeline p = run_pipeline(flags, true);
    std::vector<ScenarioManifest> manifests;
    for (const auto& path : manifest_paths) {
        manifests.push_back(load_manifest(path));
    }
    const auto vectors = session_vectors(p.build.sessions, p.corpus, manifests);
    std::vector<DetectTree> trees;
    for (const auto& tpl : p.templates) {
        trees.push_back(detect_tree(p.ledger, p.build.sessions, tpl.schema_id, vectors));
    }
    std::string text;
    if (flags.format == "json") {
        text = render_tree_json(trees);
    } else {
        std::ostringstream out;
        for (std::size_t i = 0; i < trees.size(); ++i) {
            if (i) out << '\n';
            out << render_tree_text(trees[i]);
        }
        text = out.str();
    }
    write_output(text, flags.out);
    return 0;
}

int cmd_volumes(const PipelineFlags& flags) {
    check_format(flags.format);
    Pipeline p = run_pipeline(flags, false);
    VolumeStats stats = volume_stats(p.build.sessions, p.corpus);
    std::string text;
    if (flags.format == "json") {
        text = render_volumes_json(stats);
    } else if (flags.format == "csv") {
        text = render_volumes_csv(stats);
    } else {
        text = render_volumes_text(stats);
    }
    write_output(text, flags.out);
    return 0;
}

struct SynthFlags {
    std::string cve = "CVE-2024-10001";
    std::string vector = "http_get";
    std::uint64_t seed = 1;
    int c2_port = 4444;
    std::string marker = "ZDAYPAYLOAD";
    std::string start_ts;
    std::size_t benign_noise = 6;
    std::size_t count_network = 0;
    std::size_t count_http = 0;
    std::size_t count_process = 0;
    bool shellshock = false;
    std::string out_dir;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
    }
    out << text;
}

int cmd_synth(const SynthFlags& flags) {
    EventCorpus corpus;
    AttackRecord record;
    SignatureSet sigs;
    ScenarioManifest manifest;

    if (flags.shellshock) {
        ShellshockFixture fx = shellshock_fixture();
        corpus = std::move(fx.corpus);
        record = fx.record;
        sigs = std::move(fx.signatures);
        manifest = std::move(fx.manifest);
    } else {
        ScenarioSpec spec;
        spec.cve = flags.cve;
        spec.vector = attack_vector_from_string(flags.vector);
        spec.seed = flags.seed;
        spec.c2_port = flags.c2_port;
        spec.payload_marker = flags.marker;
        spec.benign_noise = flags.benign_noise;
        if (!flags.start_ts.empty()) spec.start_ts = parse_timestamp(flags.start_ts);
        if (flags.count_network) spec.event_counts[EventSource::Network] = flags.count_network;
        if (flags.count_http) spec.event_counts[EventSource::Http] = flags.count_http;
        if (flags.count_process) spec.event_counts[EventSource::Process] = flags.count_process;
        SynthResult result = synthesize(spec);
        corpus = std::move(result.corpus);
        record = result.record;
        manifest = std::move(result.manifest);
        sigs = scenario_signatures(manifest);
    }

    std::error_code ec;
    std::filesystem::create_directories(flags.out_dir, ec);
    if (ec) {
        throw Error(ErrorKind::IoFailure, "cannot create " + flags.out_dir + ": " + ec.message());
    }
    const std::filesystem::path dir(flags.out_dir);
    std::ostringstream raw;
    for (const auto& e : corpus.events) raw << serialize_event(e) << '\n';
    write_file(dir / "raw.jsonl", raw.str());
    write_file(dir / "attack_log.jsonl", serialize_attack_record(record) + "\n");
    write_file(dir / "signatures.json", serialize_signatures(sigs) + "\n");
    write_file(dir / "manifest.json", serialize_manifest(manifest) + "\n");
    std::cout << "wrote " << corpus.events.size() << " events, " << sigs.signatures.size()
              << " signatures to " << flags.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"logging-standard efficacy measurement toolkit"};
    app.require_subcommand(1);

    PipelineFlags ingest_flags, score_flags, gaps_flags, tree_flags, volumes_flags;
    SynthFlags synth_flags;
    std::vector<std::string> manifest_paths;

    CLI::App* ingest = app.add_subcommand("ingest", "load and tag a corpus, print a summary");
    add_pipeline_flags(ingest, ingest_flags, false);

    CLI::App* synth = app.add_subcommand("synth", "emit a deterministic scenario corpus");
    synth->add_option("--cve", synth_flags.cve, "CVE id for the scenario");
    synth->add_option("--vector", synth_flags.vector,
                      "http_get|http_post|http_mixed|service_payload");
    synth->add_option("--seed", synth_flags.seed, "generator seed");
    synth->add_option("--c2-port", synth_flags.c2_port, "callback port");
    synth->add_option("--marker", synth_flags.marker, "payload marker string");
    synth->add_option("--start-ts", synth_flags.start_ts, "window start timestamp");
    synth->add_option("--benign-noise", synth_flags.benign_noise, "out-of-window noise events");
    synth->add_option("--count-network", synth_flags.count_network, "network events in window");
    synth->add_option("--count-http", synth_flags.count_http, "http events in window");
    synth->add_option("--count-process", synth_flags.count_process, "process events in window");
    synth->add_flag("--shellshock", synth_flags.shellshock, "emit the worked-example fixture");
    synth->add_option("--out", synth_flags.out_dir, "output directory")->required();

    CLI::App* score = app.add_subcommand("score", "effectiveness and detection tables");
    add_pipeline_flags(score, score_flags, true);
    score->add_option("--group-by", score_flags.group_by, "none|vuln-class");

    CLI::App* gaps = app.add_subcommand("gaps", "per-signature loss attribution");
    add_pipeline_flags(gaps, gaps_flags, true);

    CLI::App* tree = app.add_subcommand("tree", "web detectability breakdown by vector");
    add_pipeline_flags(tree, tree_flags, true);
    tree->add_option("--manifest", manifest_paths, "scenario manifest (repeatable)");

    CLI::App* volumes = app.add_subcommand("volumes", "events-per-session statistics");
    add_pipeline_flags(volumes, volumes_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_flags);
        if (synth->parsed()) return cmd_synth(synth_flags);
        if (score->parsed()) return cmd_score(score_flags);
        if (gaps->parsed()) return cmd_gaps(gaps_flags);
        if (tree->parsed()) return cmd_tree(tree_flags, manifest_paths);
        if (volumes->parsed()) return cmd_volumes(volumes_flags);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
