#include <doctest.h>

#include <functional>

#include "logeff/error.hpp"
#include "logeff/ledger.hpp"
#include "logeff/signature.hpp"

using namespace logeff;

namespace {

ErrorKind kind_of_throw(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& err) {
        return err.kind();
    }
    return ErrorKind::InvalidSpec;  // sentinel: no throw
}

RawEvent http_event(TimestampMs ts = 1000, const std::string& host = "target") {
    RawEvent e;
    e.ts = ts;
    e.host = host;
    e.source = EventSource::Http;
    e.fields["method"] = std::string("GET");
    e.fields["url_path"] = std::string("/victim.cgi");
    e.fields["status"] = std::int64_t{200};
    e.fields["user_agent"] = std::string("() { :; }; /bin/bash -c 'id'");
    return e;
}

RawEvent net_event(TimestampMs ts = 2000, const std::string& host = "target") {
    RawEvent e;
    e.ts = ts;
    e.host = host;
    e.source = EventSource::Network;
    e.fields["src_ip"] = std::string("192.0.2.10");
    e.fields["dst_ip"] = std::string("198.51.100.9");
    e.fields["src_port"] = std::int64_t{52011};
    e.fields["dst_port"] = std::int64_t{4444};
    e.fields["proto"] = std::string("tcp");
    e.fields["bytes_in"] = std::int64_t{96};
    e.fields["bytes_out"] = std::int64_t{1488};
    return e;
}

Signature ua_signature() {
    Signature sig;
    sig.id = "sig-ua";
    sig.cve = "CVE-2014-6271";
    sig.phase = Phase::InitialAccess;
    sig.fidelity = Fidelity::High;
    sig.description = "function-definition user agent";
    sig.applicable_sources = {EventSource::Http};
    sig.predicate = p_match("user_agent", make_matcher(Matcher::Op::Contains,
                                                       std::string("() { :; };")));
    return sig;
}

ExploitSession session_over(const EventCorpus& corpus) {
    ExploitSession s;
    s.cve = "CVE-2014-6271";
    s.window_start = 0;
    s.window_end = 100000;
    s.attacker_host = "attacker";
    s.target_host = "target";
    s.service = "HTTP";
    s.vuln_class = VulnClass::Web;
    for (std::size_t i = 0; i < corpus.events.size(); ++i) s.event_idx.push_back(i);
    return s;
}

}  // namespace

TEST_CASE("phase and fidelity names round-trip") {
    for (Phase phase : all_phases()) {
        CHECK(phase_from_string(to_string(phase)) == phase);
    }
    CHECK(std::string(to_string(Phase::CommandAndControl)) == "c2");
    CHECK(fidelity_from_string("high") == Fidelity::High);
    CHECK(fidelity_from_string("low") == Fidelity::Low);
    CHECK(kind_of_throw([] { phase_from_string("exfil"); }) == ErrorKind::SignatureParse);
    CHECK(kind_of_throw([] { fidelity_from_string("medium"); }) == ErrorKind::SignatureParse);
}

TEST_CASE("matchers are total over absent values and type mismatches") {
    Value text{std::string("hello world")};
    Value num{std::int64_t{42}};
    Value flag{true};

    CHECK(make_matcher(Matcher::Op::Exists).matches(&text));
    CHECK_FALSE(make_matcher(Matcher::Op::Exists).matches(nullptr));

    auto eq = make_matcher(Matcher::Op::Equals, std::string("hello world"));
    CHECK(eq.matches(&text));
    CHECK_FALSE(eq.matches(&num));   // type mismatch, not an error
    CHECK_FALSE(eq.matches(&flag));
    CHECK_FALSE(eq.matches(nullptr));
    CHECK(make_matcher(Matcher::Op::Equals, std::int64_t{42}).matches(&num));
    CHECK(make_matcher(Matcher::Op::Equals, true).matches(&flag));

    auto contains = make_matcher(Matcher::Op::Contains, std::string("lo wo"));
    CHECK(contains.matches(&text));
    CHECK_FALSE(contains.matches(&num));  // contains never applies to integers

    auto rex = make_matcher(Matcher::Op::Regex, std::string("^hel+o"));
    CHECK(rex.matches(&text));
    CHECK_FALSE(rex.matches(&num));

    auto gt = make_matcher(Matcher::Op::Gt, std::int64_t{40});
    auto lt = make_matcher(Matcher::Op::Lt, std::int64_t{40});
    CHECK(gt.matches(&num));
    CHECK_FALSE(lt.matches(&num));
    CHECK_FALSE(gt.matches(&text));  // numeric ops ignore strings
}

TEST_CASE("matcher construction rejects ill-typed operands") {
    CHECK(kind_of_throw([] { make_matcher(Matcher::Op::Regex, std::string("[")); }) ==
          ErrorKind::BadRegex);
    CHECK(kind_of_throw([] { make_matcher(Matcher::Op::Regex, std::int64_t{1}); }) ==
          ErrorKind::SignatureParse);
    CHECK(kind_of_throw([] { make_matcher(Matcher::Op::Contains, std::int64_t{1}); }) ==
          ErrorKind::SignatureParse);
    CHECK(kind_of_throw([] { make_matcher(Matcher::Op::Gt, std::string("9")); }) ==
          ErrorKind::SignatureParse);
}

TEST_CASE("predicate combinators follow all/any identities") {
    RawEvent e = http_event();
    auto yes = p_match("method", make_matcher(Matcher::Op::Equals, std::string("GET")));
    auto no = p_match("method", make_matcher(Matcher::Op::Equals, std::string("POST")));

    CHECK(eval_predicate_raw(p_all({}), e));        // vacuous truth
    CHECK_FALSE(eval_predicate_raw(p_any({}), e));  // empty disjunction
    CHECK(eval_predicate_raw(p_all({yes, yes}), e));
    CHECK_FALSE(eval_predicate_raw(p_all({yes, no}), e));
    CHECK(eval_predicate_raw(p_any({no, yes}), e));
    CHECK_FALSE(eval_predicate_raw(p_any({no, no}), e));
    CHECK(eval_predicate_raw(p_any({p_all({yes, yes}), no}), e));
    // Absent fields are false.
    CHECK_FALSE(eval_predicate_raw(
        p_match("nonexistent", make_matcher(Matcher::Op::Exists)), e));
}

TEST_CASE("normalized evaluation resolves raw paths through the template") {
    SchemaTemplate tpl;
    tpl.schema_id = "t";
    tpl.version = "1";
    tpl.classes[EventSource::Http] = {
        {"method", "http.method", true, parse_transform("copy")},
        {"user_agent", "", false, parse_transform("drop")},
    };

    RawEvent e = http_event();
    NormalizedEvent n = normalize(e, tpl);

    auto method = p_match("method", make_matcher(Matcher::Op::Equals, std::string("GET")));
    auto agent = p_match("user_agent",
                         make_matcher(Matcher::Op::Contains, std::string("() { :; };")));

    CHECK(eval_predicate_raw(method, e));
    CHECK(eval_predicate_normalized(method, n, tpl));
    CHECK(eval_predicate_raw(agent, e));
    // The dropped path translates to no targets, so the normalized view is blind.
    CHECK_FALSE(eval_predicate_normalized(agent, n, tpl));

    // A second target for the same raw path rescues the match (any-target wins).
    tpl.classes[EventSource::Http].push_back(
        {"user_agent", "agent.extra", false, parse_transform("copy")});
    n = normalize(e, tpl);
    CHECK(eval_predicate_normalized(agent, n, tpl));
}

TEST_CASE("transforms can flip a normalized match that held on raw") {
    SchemaTemplate tpl;
    tpl.schema_id = "t";
    tpl.version = "1";
    tpl.classes[EventSource::Http] = {
        {"user_agent", "agent", false, parse_transform("truncate:5")},
    };
    RawEvent e = http_event();
    NormalizedEvent n = normalize(e, tpl);
    auto agent = p_match("user_agent",
                         make_matcher(Matcher::Op::Contains, std::string("/bin/bash")));
    CHECK(eval_predicate_raw(agent, e));
    CHECK_FALSE(eval_predicate_normalized(agent, n, tpl));  // cut off by truncation
}

TEST_CASE("signatures round-trip through the JSON array format") {
    SignatureSet set;
    set.signatures.push_back(ua_signature());
    Signature second;
    second.id = "sig-port";
    second.cve = "CVE-2014-6271";
    second.phase = Phase::CommandAndControl;
    second.fidelity = Fidelity::Low;
    second.description = "callback port";
    second.applicable_sources = {EventSource::Network, EventSource::Process};
    second.predicate = p_all({
        p_match("dst_port", make_matcher(Matcher::Op::Gt, std::int64_t{1024})),
        p_any({p_match("dst_ip", make_matcher(Matcher::Op::Exists)),
               p_match("proto", make_matcher(Matcher::Op::Regex, std::string("tc?p")))}),
    });
    set.signatures.push_back(second);

    SignatureSet back = parse_signatures(serialize_signatures(set), "mem");
    REQUIRE(back.signatures.size() == 2);
    CHECK(serialize_signatures(back) == serialize_signatures(set));
    CHECK(back.signatures[0].id == "sig-ua");
    CHECK(back.signatures[1].applicable_sources ==
          std::set<EventSource>{EventSource::Network, EventSource::Process});
    CHECK(back.signatures[1].predicate.children.size() == 2);

    CHECK(back.find("sig-ua") != nullptr);
    CHECK(back.find("missing") == nullptr);
    CHECK(back.for_cve("CVE-2014-6271").size() == 2);
    CHECK(back.for_cve("CVE-2099-9999").empty());
}

TEST_CASE("an empty signature file is an empty set, not an error") {
    CHECK(parse_signatures("", "mem").signatures.empty());
    CHECK(parse_signatures("  \n\t\n", "mem").signatures.empty());
    CHECK(parse_signatures("[]", "mem").signatures.empty());
}

TEST_CASE("signature parsing rejects malformed input with specific kinds") {
    auto parse = [](const std::string& text) { return parse_signatures(text, "mem"); };
    CHECK(kind_of_throw([&] { parse("{"); }) == ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse("{}"); }) == ErrorKind::SignatureParse);

    const std::string valid = R"([{
      "id": "a", "cve": "CVE-2014-6271", "phase": "initial_access", "fidelity": "high",
      "description": "", "sources": ["http"],
      "predicate": {"match": {"path": "method", "op": "equals", "value": "GET"}}
    }])";
    CHECK_NOTHROW(parse(valid));

    auto mutate = [&](const std::string& from, const std::string& to) {
        std::string text = valid;
        text.replace(text.find(from), from.size(), to);
        return text;
    };
    CHECK(kind_of_throw([&] { parse(mutate("CVE-2014-6271", "badid")); }) ==
          ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("initial_access", "lateral")); }) ==
          ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("high", "medium")); }) == ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("[\"http\"]", "[]")); }) == ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("[\"http\"]", "[\"syslog\"]")); }) ==
          ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("equals", "matches")); }) == ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("\"path\": \"method\"", "\"path\": \"a..b\"")); }) ==
          ErrorKind::SignatureParse);
    // exists must not carry a value; other ops must.
    CHECK(kind_of_throw([&] { parse(mutate("\"op\": \"equals\", \"value\": \"GET\"",
                                           "\"op\": \"exists\", \"value\": \"GET\"")); }) ==
          ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("\"op\": \"equals\", \"value\": \"GET\"",
                                           "\"op\": \"equals\"")); }) ==
          ErrorKind::SignatureParse);
    CHECK(kind_of_throw([&] { parse(mutate("\"value\": \"GET\"", "\"value\": [1]")); }) ==
          ErrorKind::SignatureParse);
    // Duplicate ids poison the whole set.
    std::string doubled = valid;
    doubled.insert(doubled.rfind(']'), "," + valid.substr(1, valid.rfind(']') - 1));
    CHECK(kind_of_throw([&] { parse(doubled); }) == ErrorKind::DuplicateId);
    // Bad regexes are their own failure kind.
    CHECK(kind_of_throw([&] { parse(mutate("\"op\": \"equals\", \"value\": \"GET\"",
                                           "\"op\": \"regex\", \"value\": \"[\"")); }) ==
          ErrorKind::BadRegex);
}

TEST_CASE("evaluation respects applicable sources and reports matching events") {
    EventCorpus corpus;
    corpus.events = {http_event(1000), net_event(2000), http_event(3000)};
    ExploitSession session = session_over(corpus);

    Signature sig = ua_signature();
    EvalResult raw = evaluate_raw(sig, session, corpus);
    CHECK(raw.matched);
    CHECK(raw.event_idx == std::vector<std::size_t>{0, 2});

    // The same predicate restricted to network events can't see HTTP fields.
    sig.applicable_sources = {EventSource::Network};
    CHECK_FALSE(evaluate_raw(sig, session, corpus).matched);

    // Events outside the session's index list are invisible.
    sig = ua_signature();
    session.event_idx = {1};
    CHECK_FALSE(evaluate_raw(sig, session, corpus).matched);
}

TEST_CASE("normalized evaluation loses exactly the unmapped predicates") {
    EventCorpus corpus;
    corpus.events = {http_event(1000), net_event(2000)};
    ExploitSession session = session_over(corpus);
    SchemaTemplate cim = builtin_template("cim");

    Signature ua = ua_signature();  // user_agent is mapped by every standard
    CHECK(evaluate_raw(ua, session, corpus).matched);
    CHECK(evaluate_normalized(ua, session, corpus, cim).matched);

    Signature state;
    state.id = "sig-state";
    state.cve = "CVE-2014-6271";
    state.phase = Phase::CommandAndControl;
    state.fidelity = Fidelity::Low;
    state.applicable_sources = {EventSource::Network};
    state.predicate = p_match("conn_state", make_matcher(Matcher::Op::Exists));
    RawEvent with_state = net_event(2500);
    with_state.fields["conn_state"] = std::string("S1");
    corpus.events.push_back(with_state);
    session = session_over(corpus);

    CHECK(evaluate_raw(state, session, corpus).matched);
    // No standard maps socket state, so the normalized view goes blind.
    CHECK_FALSE(evaluate_normalized(state, session, corpus, cim).matched);
}

TEST_CASE("the ledger preserves only what raw detection already found") {
    EventCorpus corpus;
    corpus.events = {http_event(1000), net_event(2000)};
    corpus.events[1].fields["conn_state"] = std::string("S1");

    std::vector<ExploitSession> sessions = {session_over(corpus)};

    SignatureSet sigs;
    sigs.signatures.push_back(ua_signature());  // matches raw and normalized
    Signature state;
    state.id = "sig-state";
    state.cve = "CVE-2014-6271";
    state.phase = Phase::CommandAndControl;
    state.fidelity = Fidelity::Low;
    state.applicable_sources = {EventSource::Network};
    state.predicate = p_match("conn_state", make_matcher(Matcher::Op::Exists));
    sigs.signatures.push_back(state);           // matches raw only
    Signature absent;
    absent.id = "sig-absent";
    absent.cve = "CVE-2014-6271";
    absent.phase = Phase::Execution;
    absent.fidelity = Fidelity::High;
    absent.applicable_sources = {EventSource::Process};
    absent.predicate = p_match("exe", make_matcher(Matcher::Op::Exists));
    sigs.signatures.push_back(absent);          // matches nothing
    Signature foreign;
    foreign.id = "sig-foreign";
    foreign.cve = "CVE-2099-9999";
    foreign.phase = Phase::Execution;
    foreign.fidelity = Fidelity::High;
    foreign.applicable_sources = {EventSource::Http};
    foreign.predicate = p_match("method", make_matcher(Matcher::Op::Exists));
    sigs.signatures.push_back(foreign);         // no session for its CVE

    std::vector<SchemaTemplate> templates = {builtin_template("cim"), builtin_template("ocsf")};
    SignatureLedger ledger = build_ledger(sessions, corpus, sigs, templates);

    CHECK(ledger.schema_ids == std::vector<std::string>{"cim", "ocsf"});
    REQUIRE(ledger.rows.size() == 3);  // sig-foreign excluded
    CHECK(ledger.unknown_cves == std::vector<std::string>{"sig-foreign (CVE-2099-9999)"});

    // Rows sort by (cve, session, signature id).
    CHECK(ledger.rows[0].signature_id == "sig-absent");
    CHECK(ledger.rows[1].signature_id == "sig-state");
    CHECK(ledger.rows[2].signature_id == "sig-ua");

    const LedgerRow& absent_row = ledger.rows[0];
    CHECK_FALSE(absent_row.in_raw);
    CHECK(absent_row.raw_matches.empty());
    CHECK_FALSE(absent_row.preserved.at("cim"));
    CHECK_FALSE(absent_row.preserved.at("ocsf"));

    const LedgerRow& state_row = ledger.rows[1];
    CHECK(state_row.in_raw);
    CHECK(state_row.raw_matches == std::vector<std::size_t>{1});
    CHECK_FALSE(state_row.preserved.at("cim"));   // lost: conn_state unmapped
    CHECK_FALSE(state_row.preserved.at("ocsf"));

    const LedgerRow& ua_row = ledger.rows[2];
    CHECK(ua_row.in_raw);
    CHECK(ua_row.preserved.at("cim"));
    CHECK(ua_row.preserved.at("ocsf"));
    CHECK(ua_row.vuln_class == VulnClass::Web);

    for (const auto& row : ledger.rows) {
        for (const auto& [schema, kept] : row.preserved) {
            (void)schema;
            if (kept) CHECK(row.in_raw);  // normalization never invents a detection
        }
    }
}

TEST_CASE("duplicate schema ids in the template list are rejected") {
    EventCorpus corpus;
    corpus.events = {http_event(1000)};
    std::vector<ExploitSession> sessions = {session_over(corpus)};
    SignatureSet sigs;
    sigs.signatures.push_back(ua_signature());
    std::vector<SchemaTemplate> twice = {builtin_template("cim"), builtin_template("cim")};
    CHECK(kind_of_throw([&] { build_ledger(sessions, corpus, sigs, twice); }) ==
          ErrorKind::TemplateParse);
}
