#include <doctest.h>

#include <functional>

#include "logeff/error.hpp"
#include "logeff/metrics.hpp"

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

LedgerRow row(std::size_t session_idx, const std::string& cve, const std::string& id, Phase phase,
              Fidelity fidelity, VulnClass vuln_class, bool in_raw, bool keep_s1, bool keep_s2) {
    LedgerRow r;
    r.session_idx = session_idx;
    r.cve = cve;
    r.signature_id = id;
    r.phase = phase;
    r.fidelity = fidelity;
    r.vuln_class = vuln_class;
    r.in_raw = in_raw;
    r.preserved = {{"s1", keep_s1}, {"s2", keep_s2}};
    return r;
}

/// Two sessions, seven signatures, two schemas, with every count checkable by
/// hand. Schema s1 keeps everything raw found except the web C2 pair; s2 also
/// loses the web initial-access hit and the service execution hit.
SignatureLedger hand_ledger() {
    SignatureLedger ledger;
    ledger.schema_ids = {"s1", "s2"};
    ledger.rows = {
        row(0, "CVE-2024-1111", "a-ia", Phase::InitialAccess, Fidelity::High, VulnClass::Web,
            true, true, false),
        row(0, "CVE-2024-1111", "a-ex", Phase::Execution, Fidelity::High, VulnClass::Web,
            true, true, true),
        row(0, "CVE-2024-1111", "a-c2h", Phase::CommandAndControl, Fidelity::High, VulnClass::Web,
            false, false, false),
        row(0, "CVE-2024-1111", "a-c2l", Phase::CommandAndControl, Fidelity::Low, VulnClass::Web,
            true, false, false),
        row(1, "CVE-2024-2222", "b-ia", Phase::InitialAccess, Fidelity::High, VulnClass::Service,
            true, true, true),
        row(1, "CVE-2024-2222", "b-ex", Phase::Execution, Fidelity::High, VulnClass::Service,
            true, true, false),
        row(1, "CVE-2024-2222", "b-c2", Phase::CommandAndControl, Fidelity::High,
            VulnClass::Service, true, true, true),
    };
    return ledger;
}

std::vector<ExploitSession> hand_sessions() {
    ExploitSession web;
    web.cve = "CVE-2024-1111";
    web.vuln_class = VulnClass::Web;
    web.service = "HTTP";
    ExploitSession service;
    service.cve = "CVE-2024-2222";
    service.vuln_class = VulnClass::Service;
    service.service = "Samba";
    return {web, service};
}

}  // namespace

TEST_CASE("integer percent rounds half away from zero") {
    // Frozen values, including the .5 boundary in both directions of the scale.
    CHECK(round_percent(0, 7) == 0);
    CHECK(round_percent(7, 7) == 100);
    CHECK(round_percent(1, 3) == 33);
    CHECK(round_percent(2, 3) == 67);
    CHECK(round_percent(8, 12) == 67);
    CHECK(round_percent(9, 12) == 75);
    CHECK(round_percent(13, 40) == 33);   // 32.5 rounds up
    CHECK(round_percent(31, 40) == 78);   // 77.5 rounds up
    CHECK(round_percent(1, 200) == 1);    // 0.5 rounds up
    CHECK(round_percent(1, 201) == 0);    // 0.497... rounds down
    CHECK(round_percent(3, 200) == 2);    // 1.5 rounds up
    CHECK(round_percent(468, 743) == 63);
    CHECK(round_percent(161, 242) == 67);
    CHECK(round_percent(427, 743) == 57);
    CHECK(round_percent(13, 240) == 5);
}

TEST_CASE("integer percent agrees with the floor-plus-half derivation everywhere") {
    // Independent derivation: floor(100n/d), plus one when the remainder is
    // at least half the denominator.
    for (std::size_t den = 1; den <= 400; ++den) {
        for (std::size_t num = 0; num <= den; ++num) {
            const std::size_t q = 100 * num / den;
            const std::size_t rem = 100 * num % den;
            const int expected = static_cast<int>(q) + (2 * rem >= den ? 1 : 0);
            REQUIRE(round_percent(num, den) == expected);
        }
    }
}

TEST_CASE("effectiveness guards its domain") {
    EffectivenessScore score = effectiveness(8, 12);
    CHECK(score.preserved == 8);
    CHECK(score.total == 12);
    CHECK(score.percent == 67);
    CHECK(kind_of_throw([] { effectiveness(0, 0); }) == ErrorKind::ZeroDenominator);
    CHECK(kind_of_throw([] { effectiveness(3, 2); }) == ErrorKind::PreservedExceedsTotal);
    CHECK(effectiveness(0, 5).percent == 0);
}

TEST_CASE("phase effectiveness slices the ledger by phase and class") {
    SignatureLedger ledger = hand_ledger();

    // s1 keeps 5 of the 6 raw-present signatures.
    EffectivenessScore overall = phase_effectiveness(ledger, "s1", std::nullopt);
    CHECK(overall.preserved == 5);
    CHECK(overall.total == 6);
    CHECK(overall.percent == 83);

    CHECK(phase_effectiveness(ledger, "s1", Phase::InitialAccess).percent == 100);
    CHECK(phase_effectiveness(ledger, "s1", Phase::Execution).percent == 100);
    EffectivenessScore c2 = phase_effectiveness(ledger, "s1", Phase::CommandAndControl);
    CHECK(c2.preserved == 1);  // the web C2 signature is lost, the service one kept
    CHECK(c2.total == 2);
    CHECK(c2.percent == 50);

    CHECK(phase_effectiveness(ledger, "s2", std::nullopt).preserved == 3);
    CHECK(phase_effectiveness(ledger, "s2", std::nullopt).percent == 50);

    EffectivenessScore web = phase_effectiveness(ledger, "s1", std::nullopt, VulnClass::Web);
    CHECK(web.preserved == 2);
    CHECK(web.total == 3);
    CHECK(web.percent == 67);
    CHECK(phase_effectiveness(ledger, "s1", std::nullopt, VulnClass::Service).percent == 100);

    // Rows that never matched raw telemetry don't enter the denominator, so an
    // unknown schema id scores zero over the same total rather than erroring.
    EffectivenessScore unknown = phase_effectiveness(ledger, "zzz", std::nullopt);
    CHECK(unknown.preserved == 0);
    CHECK(unknown.total == 6);

    CHECK(kind_of_throw([&] {
              phase_effectiveness(SignatureLedger{}, "s1", std::nullopt);
          }) == ErrorKind::ZeroDenominator);
}

TEST_CASE("detection demands a preserved high-fidelity signature per phase") {
    SignatureLedger ledger = hand_ledger();
    auto sessions = hand_sessions();

    DetectionVerdict web_s1 = detection(ledger, sessions[0], 0, "s1");
    CHECK(web_s1.initial_access);
    CHECK(web_s1.execution);
    // The only high-fidelity C2 signature never matched raw telemetry; the
    // low-fidelity one that did match cannot carry detection.
    CHECK_FALSE(web_s1.c2);
    CHECK_FALSE(web_s1.full);

    DetectionVerdict service_s1 = detection(ledger, sessions[1], 1, "s1");
    CHECK(service_s1.initial_access);
    CHECK(service_s1.execution);
    CHECK(service_s1.c2);
    CHECK(service_s1.full);

    DetectionVerdict service_s2 = detection(ledger, sessions[1], 1, "s2");
    CHECK(service_s2.initial_access);
    CHECK_FALSE(service_s2.execution);  // lost under s2
    CHECK(service_s2.c2);
    CHECK_FALSE(service_s2.full);

    CHECK(web_s1.phase_flag(Phase::InitialAccess) == web_s1.initial_access);
    CHECK(web_s1.phase_flag(Phase::CommandAndControl) == web_s1.c2);
}

TEST_CASE("detection rates count sessions, not signatures") {
    SignatureLedger ledger = hand_ledger();
    auto sessions = hand_sessions();
    auto verdicts = all_detections(ledger, sessions, "s1");
    REQUIRE(verdicts.size() == 2);

    DetectionRate full = detection_rate(verdicts, std::nullopt);
    CHECK(full.detected == 1);
    CHECK(full.total == 2);
    CHECK(full.percent == 50);
    CHECK(detection_rate(verdicts, Phase::InitialAccess).percent == 100);
    CHECK(detection_rate(verdicts, Phase::Execution).percent == 100);
    CHECK(detection_rate(verdicts, Phase::CommandAndControl).detected == 1);

    CHECK(kind_of_throw([] { detection_rate({}, std::nullopt); }) == ErrorKind::ZeroDenominator);
}

TEST_CASE("volume statistics use the population spread over sessions") {
    EventCorpus corpus;
    auto push = [&](EventSource source) {
        RawEvent e;
        e.ts = static_cast<TimestampMs>(corpus.events.size());
        e.host = "target";
        e.source = source;
        corpus.events.push_back(e);
    };
    push(EventSource::Http);     // 0 \ session A
    push(EventSource::Http);     // 1 |
    push(EventSource::Network);  // 2 /
    push(EventSource::Network);  // 3 \ session B
    push(EventSource::Network);  // 4 |
    push(EventSource::Network);  // 5 |
    push(EventSource::Process);  // 6 |
    push(EventSource::Process);  // 7 |
    push(EventSource::Process);  // 8 |
    push(EventSource::Process);  // 9 /

    auto sessions = hand_sessions();
    sessions[0].event_idx = {0, 1, 2};
    sessions[1].event_idx = {3, 4, 5, 6, 7, 8, 9};

    VolumeStats stats = volume_stats(sessions, corpus);
    CHECK(stats.session_count == 2);
    REQUIRE(stats.per_source.size() == 3);  // every source reported, even at zero

    const VolumeLine& http = stats.per_source.at(EventSource::Http);      // counts 2, 0
    CHECK(http.min == 0);
    CHECK(http.max == 2);
    CHECK(http.mean == doctest::Approx(1.0));
    CHECK(http.stdev == doctest::Approx(1.0));

    const VolumeLine& net = stats.per_source.at(EventSource::Network);    // counts 1, 3
    CHECK(net.mean == doctest::Approx(2.0));
    CHECK(net.stdev == doctest::Approx(1.0));

    const VolumeLine& proc = stats.per_source.at(EventSource::Process);   // counts 0, 4
    CHECK(proc.min == 0);
    CHECK(proc.max == 4);
    CHECK(proc.mean == doctest::Approx(2.0));
    CHECK(proc.stdev == doctest::Approx(2.0));

    const VolumeLine& combined = stats.combined;                          // counts 3, 7
    CHECK(combined.min == 3);
    CHECK(combined.max == 7);
    CHECK(combined.mean == doctest::Approx(5.0));
    CHECK(combined.stdev == doctest::Approx(2.0));

    CHECK(kind_of_throw([&] { volume_stats({}, corpus); }) == ErrorKind::ZeroDenominator);
}

TEST_CASE("aggregation orders groups web, service, combined") {
    SignatureLedger ledger = hand_ledger();
    auto sessions = hand_sessions();

    ScoreTable flat = aggregate(ledger, sessions, GroupBy::None);
    REQUIRE(flat.rows.size() == 2);  // one per schema, combined only
    CHECK(flat.rows[0].group == "combined");
    CHECK(flat.rows[0].schema_id == "s1");
    CHECK(flat.rows[1].schema_id == "s2");
    CHECK(flat.rows[0].overall.num == 5);
    CHECK(flat.rows[0].overall.den == 6);
    CHECK(flat.rows[0].overall.percent == 83);
    CHECK(flat.rows[0].det_full.num == 1);
    CHECK(flat.rows[0].det_full.den == 2);

    ScoreTable split = aggregate(ledger, sessions, GroupBy::VulnClass);
    REQUIRE(split.rows.size() == 6);
    CHECK(split.rows[0].group == "web");
    CHECK(split.rows[1].group == "web");
    CHECK(split.rows[2].group == "service");
    CHECK(split.rows[3].group == "service");
    CHECK(split.rows[4].group == "combined");
    CHECK(split.rows[5].group == "combined");

    const ScoreRow& web_s1 = split.rows[0];
    CHECK(web_s1.overall.num == 2);
    CHECK(web_s1.overall.den == 3);
    CHECK(web_s1.overall.percent == 67);
    CHECK(web_s1.c2.defined);
    CHECK(web_s1.c2.num == 0);  // the low-fidelity C2 hit is counted but lost
    CHECK(web_s1.c2.den == 1);
    CHECK(web_s1.det_full.den == 1);
    CHECK(web_s1.det_full.num == 0);
    CHECK(web_s1.det_initial_access.num == 1);

    const ScoreRow& service_s1 = split.rows[2];
    CHECK(service_s1.overall.percent == 100);
    CHECK(service_s1.det_full.num == 1);
}

TEST_CASE("empty scopes yield undefined cells instead of errors") {
    // A ledger and session list with no web entries at all.
    SignatureLedger ledger;
    ledger.schema_ids = {"s1"};
    ledger.rows = {row(0, "CVE-2024-2222", "b-ia", Phase::InitialAccess, Fidelity::High,
                       VulnClass::Service, true, true, false)};
    std::vector<ExploitSession> sessions = {hand_sessions()[1]};

    ScoreTable table = aggregate(ledger, sessions, GroupBy::VulnClass);
    REQUIRE(table.rows.size() == 3);
    const ScoreRow& web = table.rows[0];
    CHECK(web.group == "web");
    CHECK_FALSE(web.overall.defined);
    CHECK_FALSE(web.initial_access.defined);
    CHECK_FALSE(web.det_full.defined);

    const ScoreRow& service = table.rows[1];
    CHECK(service.overall.defined);
    CHECK(service.overall.percent == 100);
    // No execution or c2 signatures exist: those phase cells are undefined
    // while the session detection cells stay defined (and score zero).
    CHECK_FALSE(service.execution.defined);
    CHECK_FALSE(service.c2.defined);
    CHECK(service.det_execution.defined);
    CHECK(service.det_execution.num == 0);
    CHECK_FALSE(detection(ledger, sessions[0], 0, "s1").full);
}
