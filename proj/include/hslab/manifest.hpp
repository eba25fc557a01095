#ifndef HSLAB_MANIFEST_HPP
#define HSLAB_MANIFEST_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hslab/verify.hpp"

namespace hslab {

using json = nlohmann::json;

struct EntryDesc {
    std::string id;
    IdentityId identity = IdentityId::HS_BASE;
    OperatorModel model;
    DomainGeometry D;
    std::optional<DomainGeometry> U;
    Point x;
    json u_desc;
    json h_desc;  // null unless conditional
    json phi_desc;
    double level = 0.0;            // LOCALTIME_CHAR
    ExhaustionSpec exhaustion;     // HARDY / P1
    std::vector<double> p_list;    // LP_SQUARE
    VerifyOptions opts;            // resolved (defaults + per-entry overrides)
};

struct CliOverrides {
    std::optional<uint64_t> seed;
    std::optional<long> n_paths;
    std::optional<std::string> pathway;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
};

struct RunConfig {
    std::vector<EntryDesc> entries;
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;
    uint64_t seed = 1;
    std::string config_hash;
};

OperatorModel parse_model(const json& j);
DomainGeometry parse_domain(const json& j);
ConvexSpec parse_phi(const json& j);
HarmonicFunction build_harmonic(const json& j, const OperatorModel& model,
                                const DomainGeometry& D);
Pathway parse_pathway(const std::string& s);

// parses the config file (optionally referencing a separate manifest file),
// applies CLI/env overrides and validates every entry
RunConfig load_config(const std::string& config_path, const CliOverrides& cli);
// convenience used by tests: config given as a json document (manifest
// entries inline); base_dir resolves a relative "manifest" reference
RunConfig load_config_json(const json& cfg, const std::string& base_dir,
                           const CliOverrides& cli);

void validate_entry(const EntryDesc& e);

}  // namespace hslab

#endif
