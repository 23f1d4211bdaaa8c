#pragma once

#include <map>
#include <string>
#include <vector>

#include "logeff/signature.hpp"

namespace logeff {

/// One (session, signature) judgment: present in raw telemetry, and whether
/// it survives each schema's normalization. preserved implies in_raw by
/// construction; the normalized view is never credited with a signature the
/// raw view lacks.
struct LedgerRow {
    std::size_t session_idx = 0;  // position in the sessions vector
    std::string cve;
    std::string signature_id;
    Phase phase = Phase::InitialAccess;
    Fidelity fidelity = Fidelity::Low;
    VulnClass vuln_class = VulnClass::Service;
    bool in_raw = false;
    std::vector<std::size_t> raw_matches;   // corpus indices, audit trail
    std::map<std::string, bool> preserved;  // schema_id -> survives normalization
};

struct SignatureLedger {
    std::vector<LedgerRow> rows;            // sorted by (cve, session_idx, signature_id)
    std::vector<std::string> schema_ids;    // template order as given
    std::vector<std::string> unknown_cves;  // "<sig id> (<cve>)" with no session, skipped
};

/// Evaluates the full (session x signature x schema) cross-product.
SignatureLedger build_ledger(const std::vector<ExploitSession>& sessions,
                             const EventCorpus& corpus, const SignatureSet& sigs,
                             const std::vector<SchemaTemplate>& templates);

}  // namespace logeff
