#include "hslab/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hslab {

namespace {

struct BuiltEntry {
    HarmonicFunction u;
    std::optional<HarmonicFunction> h;
    std::optional<ConvexSpec> phi;
};

BuiltEntry build_entry(const EntryDesc& e) {
    BuiltEntry b{build_harmonic(e.u_desc, e.model, e.D), {}, {}};
    if (!e.h_desc.is_null()) b.h = build_harmonic(e.h_desc, e.model, e.D);
    if (!e.phi_desc.is_null()) b.phi = parse_phi(e.phi_desc);
    return b;
}

}  // namespace

std::optional<IdentityReport> run_iso_gate(const EntryDesc& e) {
    bool gated = e.identity == IdentityId::HS_BASE || e.identity == IdentityId::HS_GENERAL ||
                 e.identity == IdentityId::HS_CONDITIONAL ||
                 e.identity == IdentityId::MARTINGALE_ISO;
    if (!gated || !e.U) return std::nullopt;
    if (!KernelSet::available(e.model, *e.U)) return std::nullopt;
    BuiltEntry b = build_entry(e);
    VerifyOptions iso_opts = e.opts;
    iso_opts.pathway = Pathway::Quad;  // the gate is a deterministic closure
    IdentityReport rep =
        verify_martingale_isometry(e.model, e.D, *e.U, e.x, b.u, iso_opts);
    rep.entry_id = e.id + ":iso";
    return rep;
}

IdentityReport run_entry(const EntryDesc& e) {
    BuiltEntry b = build_entry(e);
    IdentityReport rep;
    switch (e.identity) {
        case IdentityId::HS_BASE:
            rep = verify_hardy_stein(e.model, e.D, *e.U, e.x, b.u, *b.phi, e.opts);
            break;
        case IdentityId::MARTINGALE_ISO:
            rep = verify_martingale_isometry(e.model, e.D, *e.U, e.x, b.u, e.opts);
            break;
        case IdentityId::HS_GENERAL:
            rep = verify_general_convex(e.model, e.D, *e.U, e.x, b.u, *b.phi, e.opts);
            break;
        case IdentityId::HS_CONDITIONAL:
            rep = verify_conditional(e.model, e.D, *e.U, e.x, b.u, *b.h, *b.phi, e.opts);
            break;
        case IdentityId::LOCALTIME_CHAR:
            rep = verify_localtime_characterization(e.model, *e.U, e.x, b.u, e.level, e.opts);
            break;
        case IdentityId::HARDY_NORM:
            rep = hardy_norm(e.model, e.D, e.x, b.u, *b.phi, e.exhaustion, e.opts);
            break;
        case IdentityId::COND_HARDY_NORM:
            rep = conditional_hardy_norm(e.model, e.D, e.x, b.u, *b.h, *b.phi, e.exhaustion,
                                         e.opts);
            break;
        case IdentityId::P1_EXAMPLE:
            rep = p1_example(e.model, e.D, e.x, b.u, e.exhaustion, e.opts);
            break;
        case IdentityId::LP_SQUARE: {
            rep.id = IdentityId::LP_SQUARE;
            rep.seed = e.opts.paths.seed;
            rep.pass = true;
            double worst = 0.0;
            for (double p : e.p_list) {
                LpCheckRow row = lp_estimate_check(e.model, e.D, e.x, b.u, p,
                                                   b.h ? &*b.h : nullptr, e.opts);
                std::ostringstream nm;
                nm << "ratio_p" << p;
                rep.terms.push_back({nm.str(), "quad", row.ratio, 0.0});
                rep.terms.push_back({"q_p" + std::to_string(p), "quad", row.q_value, 0.0});
                rep.terms.push_back({"norm_p" + std::to_string(p), "quad", row.norm, 0.0});
                double cap = lp_frozen_constant(p) + 0.005;
                Comparison c{nm.str() + " <= frozen constant", row.ratio,
                             lp_frozen_constant(p), cap - lp_frozen_constant(p), false};
                c.pass = row.finite && row.ratio <= cap;
                rep.checks.push_back(c);
                rep.pass = rep.pass && c.pass;
                worst = std::max(worst, row.ratio);
            }
            rep.lhs_total = worst;
            rep.rhs_total = lp_frozen_constant(2.0);
            rep.margin = rep.rhs_total + 0.005 - worst;
            rep.notes = "littlewood-paley ratios against the frozen constant";
            break;
        }
    }
    rep.entry_id = e.id;
    return rep;
}

RunOutcome run_suite(const RunConfig& rc) {
    RunOutcome out;
    // gate pass: isometry closures first
    std::vector<bool> gate_ok(rc.entries.size(), true);
    for (size_t i = 0; i < rc.entries.size(); ++i) {
        const EntryDesc& e = rc.entries[i];
        try {
            auto iso = run_iso_gate(e);
            if (iso) {
                iso->config_hash = rc.config_hash;
                gate_ok[i] = iso->pass;
                out.reports.push_back(std::move(*iso));
                if (!out.reports.back().pass) ++out.verdict_failures;
            }
        } catch (const ComputationError& err) {
            ++out.computation_errors;
            gate_ok[i] = false;
            out.messages.push_back(e.id + ":iso: " + err.what());
        }
    }
    for (size_t i = 0; i < rc.entries.size(); ++i) {
        const EntryDesc& e = rc.entries[i];
        bool gated = e.identity == IdentityId::HS_BASE ||
                     e.identity == IdentityId::HS_CONDITIONAL;
        if (gated && !gate_ok[i]) {
            IdentityReport rep;
            rep.entry_id = e.id;
            rep.id = e.identity;
            rep.pass = false;
            rep.notes = "blocked: the p=2 isometry gate failed for this entry";
            rep.config_hash = rc.config_hash;
            rep.seed = rc.seed;
            out.reports.push_back(std::move(rep));
            ++out.verdict_failures;
            out.messages.push_back(e.id + ": blocked by the isometry gate");
            continue;
        }
        try {
            IdentityReport rep = run_entry(e);
            rep.config_hash = rc.config_hash;
            if (!rep.pass) ++out.verdict_failures;
            out.reports.push_back(std::move(rep));
        } catch (const ComputationError& err) {
            ++out.computation_errors;
            out.messages.push_back(e.id + ": " + err.what());
            IdentityReport rep;
            rep.entry_id = e.id;
            rep.id = e.identity;
            rep.pass = false;
            rep.notes = std::string("computation error: ") + err.what();
            rep.config_hash = rc.config_hash;
            out.reports.push_back(std::move(rep));
        }
    }
    return out;
}

std::string describe(const RunConfig& rc) {
    std::ostringstream os;
    os << "seed " << rc.seed << ", config " << rc.config_hash << ", " << rc.entries.size()
       << " entries\n";
    for (const auto& e : rc.entries) {
        os << "  " << e.id << ": " << identity_name(e.identity) << " | " << e.model.describe()
           << " | D=" << e.D.describe();
        if (e.U) os << " U=" << e.U->describe();
        os << " | x=" << e.x[0];
        os << " | pathway="
           << (e.opts.pathway == Pathway::Both ? "both"
               : e.opts.pathway == Pathway::Mc ? "mc"
                                               : "quad");
        if (e.opts.pathway != Pathway::Quad) os << " n_paths=" << e.opts.paths.n_paths;
        os << "\n";
    }
    return os.str();
}

std::string report_to_json_string(const IdentityReport& rep, bool with_timestamp) {
    nlohmann::ordered_json j;
    j["entry_id"] = rep.entry_id;
    j["identity"] = identity_name(rep.id);
    j["pass"] = rep.pass;
    j["lhs_total"] = rep.lhs_total;
    j["rhs_total"] = rep.rhs_total;
    j["lhs_uncertainty"] = rep.lhs_uncertainty;
    j["rhs_uncertainty"] = rep.rhs_uncertainty;
    j["margin"] = rep.margin;
    j["seed"] = rep.seed;
    j["config_hash"] = rep.config_hash;
    j["notes"] = rep.notes;
    j["terms"] = nlohmann::ordered_json::array();
    for (const auto& t : rep.terms) {
        nlohmann::ordered_json tj;
        tj["name"] = t.name;
        tj["pathway"] = t.pathway;
        tj["value"] = t.value;
        tj["uncertainty"] = t.uncertainty;
        j["terms"].push_back(tj);
    }
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["a"] = c.a;
        cj["b"] = c.b;
        cj["threshold"] = c.threshold;
        cj["pass"] = c.pass;
        j["checks"].push_back(cj);
    }
    if (with_timestamp)
        j["generated_unix"] = static_cast<long>(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
    return j.dump(2);
}

std::string reports_to_csv(const RunConfig& rc, const RunOutcome& out) {
    std::ostringstream os;
    os << "# hslab-report schema=1\n";
    os << "entry_id,identity_id,term,pathway,value,uncertainty,verdict,seed,config_hash\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& rep : out.reports) {
        for (const auto& t : rep.terms) {
            os << rep.entry_id << "," << identity_name(rep.id) << "," << t.name << ","
               << t.pathway << "," << fmt(t.value) << "," << fmt(t.uncertainty) << ","
               << (rep.pass ? "pass" : "fail") << "," << rc.seed << "," << rc.config_hash
               << "\n";
        }
        os << rep.entry_id << "," << identity_name(rep.id) << ",lhs_total,report,"
           << fmt(rep.lhs_total) << "," << fmt(rep.lhs_uncertainty) << ","
           << (rep.pass ? "pass" : "fail") << "," << rc.seed << "," << rc.config_hash << "\n";
        os << rep.entry_id << "," << identity_name(rep.id) << ",rhs_total,report,"
           << fmt(rep.rhs_total) << "," << fmt(rep.rhs_uncertainty) << ","
           << (rep.pass ? "pass" : "fail") << "," << rc.seed << "," << rc.config_hash << "\n";
    }
    return os.str();
}

void write_reports(const RunConfig& rc, const RunOutcome& out) {
    std::filesystem::create_directories(rc.out_dir);
    if (rc.write_csv) {
        std::ofstream csv(rc.out_dir + "/report.csv");
        csv << reports_to_csv(rc, out);
    }
    if (rc.write_json) {
        for (const auto& rep : out.reports) {
            std::string name = rep.entry_id;
            for (auto& ch : name)
                if (ch == '/' || ch == ':') ch = '_';
            std::ofstream js(rc.out_dir + "/" + name + ".json");
            js << report_to_json_string(rep, true) << "\n";
        }
    }
}

int exit_code(const RunOutcome& out) {
    if (out.computation_errors > 0) return 3;
    if (out.verdict_failures > 0) return 1;
    return 0;
}

}  // namespace hslab
