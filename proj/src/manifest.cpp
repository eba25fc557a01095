#include "hslab/manifest.hpp"

#include <cstdlib>
#include <fstream>

namespace hslab {

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("parse error in " + path + ": " + e.what());
    }
    return j;
}

template <class T>
T get_or(const json& j, const char* key, T def) {
    if (!j.contains(key)) return def;
    return j.at(key).get<T>();
}

}  // namespace

Pathway parse_pathway(const std::string& s) {
    if (s == "mc") return Pathway::Mc;
    if (s == "quad") return Pathway::Quad;
    if (s == "both") return Pathway::Both;
    throw ConfigError("pathway must be one of mc|quad|both, got '" + s + "'");
}

OperatorModel parse_model(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    int dim = get_or(j, "dim", 1);
    if (kind == "brownian") return OperatorModel::brownian(j.at("sigma2").get<double>(), dim);
    if (kind == "stable")
        return OperatorModel::stable(j.at("alpha").get<double>(), dim,
                                     get_or(j, "scale", 1.0));
    if (kind == "mixed")
        return OperatorModel::mixed(j.at("sigma2").get<double>(), j.at("alpha").get<double>(),
                                    dim, get_or(j, "jump_scale", 1.0));
    if (kind == "radial_levy")
        return OperatorModel::radial_levy(j.at("alpha").get<double>(),
                                          j.at("tempering").get<double>(),
                                          get_or(j, "scale", 1.0), dim);
    throw ConfigError("unknown model kind '" + kind + "'");
}

DomainGeometry parse_domain(const json& j) {
    std::string shape = j.at("shape").get<std::string>();
    if (shape == "interval")
        return DomainGeometry::interval(j.at("l").get<double>(), j.at("r").get<double>());
    if (shape == "ball") {
        auto c = j.at("center").get<std::vector<double>>();
        Point p;
        p.dim = static_cast<int>(c.size());
        for (size_t i = 0; i < c.size(); ++i) p[static_cast<int>(i)] = c[i];
        return DomainGeometry::ball(p, j.at("radius").get<double>());
    }
    throw ConfigError("unknown domain shape '" + shape + "'");
}

ConvexSpec parse_phi(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") return ConvexSpec::power(j.at("p").get<double>());
    if (kind == "abs") return ConvexSpec::abs_value();
    if (kind == "piecewise") {
        auto breaks = j.at("breakpoints").get<std::vector<double>>();
        std::vector<QuadraticPiece> pieces;
        for (const auto& pj : j.at("pieces")) {
            auto v = pj.get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("piece must be [c0,c1,c2]");
            pieces.push_back({v[0], v[1], v[2]});
        }
        return ConvexSpec::piecewise(breaks, pieces);
    }
    throw ConfigError("unknown phi kind '" + kind + "'");
}

HarmonicFunction build_harmonic(const json& j, const OperatorModel& model,
                                const DomainGeometry& D) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return constant_function(j.at("c").get<double>(), model.dim);
    if (kind == "affine") {
        double c0 = get_or(j, "c0", 0.0);
        Point slope;
        slope.dim = model.dim;
        if (j.contains("slope")) {
            if (j.at("slope").is_number())
                slope[0] = j.at("slope").get<double>();
            else {
                auto v = j.at("slope").get<std::vector<double>>();
                for (size_t i = 0; i < v.size(); ++i) slope[static_cast<int>(i)] = v[i];
            }
        }
        return affine_function(c0, slope);
    }
    if (kind == "boundary_interp")
        return poisson_extension_brownian_interval(D, j.at("f_left").get<double>(),
                                                   j.at("f_right").get<double>(),
                                                   get_or(j, "singular", false));
    if (kind == "poisson_extension") {
        std::vector<DataWindow> windows;
        for (const auto& wj : j.at("windows"))
            windows.push_back({wj.at("a").get<double>(), wj.at("b").get<double>(),
                               wj.at("value").get<double>()});
        return poisson_extension_stable(model, D, windows);
    }
    if (kind == "martin_symmetric") return martin_symmetric_stable(model, D);
    if (kind == "martin_onesided") return martin_onesided_stable(model, D);
    throw ConfigError("unknown harmonic function kind '" + kind + "'");
}

void validate_entry(const EntryDesc& e) {
    if (e.id.empty()) throw ValidationError("entry without id");
    if (e.U) {
        if (!strictly_inside(*e.U, e.D))
            throw ValidationError("entry " + e.id + ": U is not strictly inside D (margin " +
                                  std::to_string(containment_margin(*e.U, e.D)) + ")");
        if (!e.U->contains(e.x))
            throw ValidationError("entry " + e.id + ": x is outside U");
    } else if (!e.D.contains(e.x)) {
        throw ValidationError("entry " + e.id + ": x is outside D");
    }
    if (e.opts.pathway != Pathway::Quad && !e.model.simulable())
        throw ValidationError("entry " + e.id +
                              ": Monte Carlo pathway requested for a non-simulable model");
    bool needs_U =
        e.identity == IdentityId::HS_BASE || e.identity == IdentityId::HS_GENERAL ||
        e.identity == IdentityId::HS_CONDITIONAL || e.identity == IdentityId::MARTINGALE_ISO ||
        e.identity == IdentityId::LOCALTIME_CHAR;
    if (needs_U && !e.U) throw ValidationError("entry " + e.id + ": U required");
    bool needs_h = e.identity == IdentityId::HS_CONDITIONAL ||
                   e.identity == IdentityId::COND_HARDY_NORM;
    if (needs_h && e.h_desc.is_null())
        throw ValidationError("entry " + e.id + ": h required for conditional identities");
    if (e.identity == IdentityId::LP_SQUARE) {
        if (e.p_list.empty()) throw ValidationError("entry " + e.id + ": p_list required");
        for (double p : e.p_list)
            if (!(p >= 2.0))
                throw ValidationError("entry " + e.id + ": p >= 2 required in p_list");
    }
    // growth-tag admissibility of the exit functional for jump models
    if (e.model.has_jumps() && !e.phi_desc.is_null()) {
        ConvexSpec spec = parse_phi(e.phi_desc);
        HarmonicFunction u = build_harmonic(e.u_desc, e.model, e.D);
        double q = u.growth == GrowthTag::Bounded ? 0.0
                   : u.growth == GrowthTag::Linear ? 1.0
                                                   : u.growth_exponent;
        if (std::isfinite(u.support_radius)) q = 0.0;
        double pg = phi_growth_exponent(spec);
        if (q * pg >= e.model.jump.alpha)
            throw ValidationError("entry " + e.id + ": phi(u) growth exponent " +
                                  std::to_string(q * pg) + " is not integrable for alpha = " +
                                  std::to_string(e.model.jump.alpha));
    }
}

namespace {

VerifyOptions options_from(const json& root, const json& overrides, uint64_t seed) {
    VerifyOptions o;
    auto pick = [&](const char* key, auto def) {
        using T = decltype(def);
        T v = get_or<T>(root, key, def);
        return get_or<T>(overrides, key, v);
    };
    o.pathway = parse_pathway(pick("pathway", std::string("both")));
    o.k_sigma = pick("k_sigma", 3.0);
    o.rel_tol_limit = pick("rel_tol_limit", 0.02);
    o.paths.n_paths = pick("n_paths", static_cast<long>(200000));
    o.paths.step = pick("step", 1e-3);
    o.paths.delta_j = pick("delta_j", 0.0);
    o.paths.workers = pick("workers", 0);
    o.paths.eps_wos_rel = pick("eps_wos", 1e-6);
    o.paths.ess_floor = pick("ess_floor", 1e-3);
    o.paths.seed = seed;
    double abs_tol = pick("quad_abs_tol", 1e-11);
    double rel_tol = pick("quad_rel_tol", 1e-10);
    int max_sub = pick("max_subdivisions", 4000);
    o.quad.outer = QuadratureOptions{abs_tol, rel_tol, max_sub, true};
    o.quad.inner = QuadratureOptions{abs_tol * 0.1, rel_tol, max_sub, true};
    o.quad.delta_split = pick("delta_split", 0.25);
    return o;
}

EntryDesc parse_entry(const json& je, const json& root, uint64_t seed) {
    EntryDesc e;
    e.id = je.at("id").get<std::string>();
    e.identity = identity_from_name(je.at("identity").get<std::string>());
    e.model = parse_model(je.at("model"));
    e.D = parse_domain(je.at("D"));
    if (je.contains("U")) e.U = parse_domain(je.at("U"));
    if (je.contains("x")) {
        if (je.at("x").is_number()) {
            e.x = Point(je.at("x").get<double>());
            e.x.dim = e.model.dim;
        } else {
            auto v = je.at("x").get<std::vector<double>>();
            e.x.dim = static_cast<int>(v.size());
            for (size_t i = 0; i < v.size(); ++i) e.x[static_cast<int>(i)] = v[i];
        }
    }
    e.u_desc = je.at("u");
    e.h_desc = je.contains("h") ? je.at("h") : json();
    e.phi_desc = je.contains("phi") ? je.at("phi") : json();
    e.level = get_or(je, "level", 0.0);
    if (je.contains("exhaustion")) {
        const json& ex = je.at("exhaustion");
        e.exhaustion.levels = get_or(ex, "levels", 5);
        e.exhaustion.first_margin = get_or(ex, "first_margin", 0.5);
        e.exhaustion.decay = get_or(ex, "decay", 8.0);
    }
    if (je.contains("p_list")) e.p_list = je.at("p_list").get<std::vector<double>>();
    json overrides = je.contains("overrides") ? je.at("overrides") : json::object();
    e.opts = options_from(root, overrides, seed);
    return e;
}

}  // namespace

RunConfig load_config_json(const json& cfg, const std::string& base_dir,
                           const CliOverrides& cli) {
    json root = cfg;
    if (get_or(root, "schema", 1) != 1) throw ConfigError("unsupported config schema");

    uint64_t seed = get_or(root, "seed", static_cast<uint64_t>(1));
    if (const char* env = std::getenv("HSLAB_SEED")) seed = std::strtoull(env, nullptr, 10);
    if (cli.seed) seed = *cli.seed;
    root["seed"] = seed;
    if (cli.n_paths) root["n_paths"] = *cli.n_paths;
    if (cli.pathway) root["pathway"] = *cli.pathway;
    if (cli.workers) root["workers"] = *cli.workers;

    json entries = json::array();
    if (root.contains("manifest")) {
        std::string mpath = root.at("manifest").get<std::string>();
        if (!mpath.empty() && mpath[0] != '/' && !base_dir.empty())
            mpath = base_dir + "/" + mpath;
        json m = load_json_file(mpath);
        entries = m.at("entries");
    }
    if (root.contains("entries"))
        for (const auto& e : root.at("entries")) entries.push_back(e);

    RunConfig rc;
    rc.seed = seed;
    rc.out_dir = get_or(root, "out_dir", std::string("out"));
    if (cli.out_dir) rc.out_dir = *cli.out_dir;
    if (root.contains("formats")) {
        rc.write_csv = rc.write_json = false;
        for (const auto& f : root.at("formats")) {
            if (f == "csv") rc.write_csv = true;
            else if (f == "json") rc.write_json = true;
            else throw ConfigError("unknown report format");
        }
    }
    // fingerprint: canonical dump of the fully resolved configuration
    json canon = root;
    canon["entries"] = entries;
    canon.erase("out_dir");
    rc.config_hash = hex64(fnv1a64(canon.dump()));

    for (const auto& je : entries) {
        EntryDesc e = parse_entry(je, root, seed);
        validate_entry(e);
        rc.entries.push_back(std::move(e));
    }
    return rc;
}

RunConfig load_config(const std::string& config_path, const CliOverrides& cli) {
    json cfg = load_json_file(config_path);
    std::string dir;
    auto slash = config_path.find_last_of('/');
    if (slash != std::string::npos) dir = config_path.substr(0, slash);
    return load_config_json(cfg, dir, cli);
}

}  // namespace hslab
