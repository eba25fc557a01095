#ifndef HSLAB_RUNNER_HPP
#define HSLAB_RUNNER_HPP

#include "hslab/manifest.hpp"

namespace hslab {

struct RunOutcome {
    std::vector<IdentityReport> reports;
    int verdict_failures = 0;
    int computation_errors = 0;
    std::vector<std::string> messages;
};

// executes the manifest: the p=2 isometry gate runs first for every entry
// that supports it; HS_BASE / HS_CONDITIONAL verdicts whose gate failed are
// reported as blocked instead of being computed. Failures never abort the
// remaining entries.
RunOutcome run_suite(const RunConfig& rc);

// per-entry report for a single entry (used by run_suite and the tests)
IdentityReport run_entry(const EntryDesc& e);
// the isometry gate report for an entry (empty optional when not applicable)
std::optional<IdentityReport> run_iso_gate(const EntryDesc& e);

std::string describe(const RunConfig& rc);

std::string report_to_json_string(const IdentityReport& rep, bool with_timestamp);
void write_reports(const RunConfig& rc, const RunOutcome& out);
std::string reports_to_csv(const RunConfig& rc, const RunOutcome& out);

// 0 = all pass, 1 = verdict failure, 2 = config error, 3 = computation error
int exit_code(const RunOutcome& out);

}  // namespace hslab

#endif
