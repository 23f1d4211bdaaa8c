#include "logeff/ledger.hpp"

#include <algorithm>
#include <set>

#include "logeff/error.hpp"

namespace logeff {

SignatureLedger build_ledger(const std::vector<ExploitSession>& sessions,
                             const EventCorpus& corpus, const SignatureSet& sigs,
                             const std::vector<SchemaTemplate>& templates) {
    SignatureLedger ledger;
    std::set<std::string> schema_seen;
    for (const auto& tpl : templates) {
        if (!schema_seen.insert(tpl.schema_id).second) {
            throw Error(ErrorKind::TemplateParse,
                        "two templates share schema_id \"" + tpl.schema_id + "\"");
        }
        ledger.schema_ids.push_back(tpl.schema_id);
    }

    std::set<std::string> session_cves;
    for (const auto& session : sessions) session_cves.insert(session.cve);
    for (const auto& sig : sigs.signatures) {
        if (!session_cves.count(sig.cve)) {
            ledger.unknown_cves.push_back(sig.id + " (" + sig.cve + ")");
        }
    }

    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const auto& session = sessions[i];
        auto cve_sigs = sigs.for_cve(session.cve);
        std::sort(cve_sigs.begin(), cve_sigs.end(),
                  [](const Signature* a, const Signature* b) { return a->id < b->id; });
        for (const Signature* sig : cve_sigs) {
            LedgerRow row;
            row.session_idx = i;
            row.cve = session.cve;
            row.signature_id = sig->id;
            row.phase = sig->phase;
            row.fidelity = sig->fidelity;
            row.vuln_class = session.vuln_class;
            EvalResult raw = evaluate_raw(*sig, session, corpus);
            row.in_raw = raw.matched;
            row.raw_matches = std::move(raw.event_idx);
            for (const auto& tpl : templates) {
                row.preserved[tpl.schema_id] =
                    row.in_raw && evaluate_normalized(*sig, session, corpus, tpl).matched;
            }
            ledger.rows.push_back(std::move(row));
        }
    }

    std::stable_sort(ledger.rows.begin(), ledger.rows.end(),
                     [](const LedgerRow& a, const LedgerRow& b) {
                         return std::tie(a.cve, a.session_idx, a.signature_id) <
                                std::tie(b.cve, b.session_idx, b.signature_id);
                     });
    return ledger;
}

}  // namespace logeff
