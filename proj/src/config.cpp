#include "stepfloq/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stepfloq/errors.hpp"

namespace stepfloq {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

double positive(double x, const char* what) {
    if (!std::isfinite(x) || !(x > 0)) throw ConfigError(std::string(what) + " must be a positive number");
    return x;
}

std::complex<double> parse_complex(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("complex entries must be [re, im]");
}

HermitianOperatord parse_matrix(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw ConfigError("potential matrices must be non-empty row lists");
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrixd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw ConfigError("potential matrices must be square");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = parse_complex(row[static_cast<std::size_t>(c)]);
    }
    try {
        return HermitianOperatord(m);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("potential matrix: ") + e.what());
    }
}

std::vector<double> number_list(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(std::string(what) + " must be a list of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

PathComponent parse_component(const json& j) {
    if (j.is_number()) return PathComponent::constant(j.get<double>());
    if (!j.is_object()) throw ConfigError("path component must be a number or an object");
    PathComponent c;
    if (j.contains("poly")) c.poly = number_list(j["poly"], "poly");
    if (j.contains("cos")) {
        for (const auto& t : j["cos"]) {
            const auto v = number_list(t, "cos term");
            if (v.size() != 3) throw ConfigError("cos terms are [amplitude, frequency, phase]");
            c.cosines.push_back({v[0], v[1], v[2]});
        }
    }
    if (j.contains("sqrt")) {
        for (const auto& t : j["sqrt"]) {
            if (!t.is_array() || t.size() != 2 || !t[0].is_number())
                throw ConfigError("sqrt terms are [scale, [poly]]");
            c.roots.push_back({t[0].get<double>(), number_list(t[1], "sqrt poly")});
        }
    }
    return c;
}

json component_json(const PathComponent& c) {
    json j = json::object();
    j["poly"] = c.poly;
    json cos = json::array();
    for (const auto& t : c.cosines) cos.push_back({t.amplitude, t.frequency, t.phase});
    j["cos"] = cos;
    json roots = json::array();
    for (const auto& r : c.roots) roots.push_back(json::array({r.scale, r.poly}));
    j["sqrt"] = roots;
    return j;
}

ParameterPath parse_path_object(const json& j, const std::string& fallback_name) {
    const std::string name = j.contains("name") ? j["name"].get<std::string>() : fallback_name;
    if (!j.contains("segments") || !j["segments"].is_array())
        throw ConfigError("explicit path needs a 'segments' list");
    std::vector<PathSegment> segs;
    for (const auto& s : j["segments"]) {
        const auto tau = number_list(s.at("tau"), "segment tau");
        if (tau.size() != 2) throw ConfigError("segment tau must be [begin, end]");
        segs.push_back({tau[0], tau[1], parse_component(s.at("alpha")), parse_component(s.at("beta"))});
    }
    try {
        return ParameterPath(name, std::move(segs));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("path: ") + e.what());
    }
}

json path_json(const ParameterPath& p) {
    json segs = json::array();
    for (const auto& s : p.segments())
        segs.push_back({{"tau", {s.tau_begin, s.tau_end}},
                        {"alpha", component_json(s.alpha)},
                        {"beta", component_json(s.beta)}});
    return {{"name", p.name()}, {"segments", segs}};
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace

StepProtocold ProtocolDescriptor::build() const {
    std::vector<HermitianOperatord> v;
    if (spin_constants) {
        const auto s = spin_potentials(constants);
        v.assign(s.begin(), s.end());
    } else {
        v = potentials;
    }
    if (type == Type::FourStep) {
        if (v.size() != 4) throw ConfigError("four-step protocol needs exactly four potentials");
        return four_step_protocol(alpha, beta, v[0], v[1], v[2], v[3]);
    }
    return generalized_protocol(PartitionParams<double>{alphas}, std::move(v));
}

ParameterPath RunConfig::resolve_path() const {
    if (path) return *path;
    try {
        return builtin_path(path_name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

const DriveConstants& RunConfig::spin_constants() const {
    if (!protocol.spin_constants) throw ConfigError("this command needs a spin-c protocol with drive constants");
    return protocol.constants;
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg;
    try {
        if (j.contains("protocol")) {
            const auto& p = j["protocol"];
            auto& d = cfg.protocol;
            const auto type = get_or<std::string>(p, "type", "four-step");
            if (type == "four-step")
                d.type = ProtocolDescriptor::Type::FourStep;
            else if (type == "generalized")
                d.type = ProtocolDescriptor::Type::Generalized;
            else
                throw ConfigError("protocol type must be four-step or generalized");
            d.alpha = get_or(p, "alpha", d.alpha);
            d.beta = get_or(p, "beta", d.beta);
            if (p.contains("alphas")) d.alphas = number_list(p["alphas"], "alphas");
            if (p.contains("potentials") && p["potentials"].is_array()) {
                d.spin_constants = false;
                for (const auto& m : p["potentials"]) d.potentials.push_back(parse_matrix(m));
            } else {
                const auto kind = get_or<std::string>(p, "potentials", "spin-c");
                if (kind != "spin-c") throw ConfigError("potentials must be \"spin-c\" or a list of matrices");
                if (p.contains("constants")) {
                    const auto c = number_list(p["constants"], "constants");
                    if (c.size() != 4) throw ConfigError("constants must have four entries");
                    d.constants = DriveConstants(c[0], c[1], c[2], c[3]);
                }
            }
        }
        cfg.omega = get_or(j, "omega", cfg.omega);
        cfg.inertia = get_or(j, "inertia", cfg.inertia);
        cfg.grid_n = get_or(j, "grid_n", cfg.grid_n);
        if (j.contains("path")) {
            const auto& p = j["path"];
            if (p.is_string()) {
                cfg.path_name = p.get<std::string>();
            } else {
                cfg.path = parse_path_object(p, "custom");
                cfg.path_name = cfg.path->name();
                cfg.path_json = path_json(*cfg.path).dump();
            }
        }
        cfg.samples = get_or(j, "samples", cfg.samples);
        cfg.out = get_or(j, "out", cfg.out);
        const auto mode = get_or<std::string>(j, "mode", "paper");
        if (mode == "paper")
            cfg.averaging = Averaging::Paper;
        else if (mode == "corrected")
            cfg.averaging = Averaging::Corrected;
        else
            throw ConfigError("mode must be paper or corrected");
        const auto state = get_or<std::string>(j, "state", "ground");
        if (state == "ground")
            cfg.state.mode = StateMode::Ground;
        else if (state == "fixed")
            cfg.state.mode = StateMode::Fixed;
        else
            throw ConfigError("state must be fixed or ground");
        if (j.contains("fixed_state")) {
            const auto& s = j["fixed_state"];
            if (!s.is_array() || s.size() != 2) throw ConfigError("fixed_state must be two complex entries");
            cfg.state.fixed = Eigen::Vector2cd(parse_complex(s[0]), parse_complex(s[1]));
        }
        if (j.contains("fast_point")) {
            const auto v = number_list(j["fast_point"], "fast_point");
            if (v.size() != 2) throw ConfigError("fast_point must be [alpha, beta]");
            cfg.fast_point = std::array<double, 2>{v[0], v[1]};
        }
        cfg.threads = get_or(j, "threads", cfg.threads);
        cfg.seed = get_or(j, "seed", cfg.seed);
        if (j.contains("verify")) {
            const auto& v = j["verify"];
            auto& s = cfg.verify;
            s.samples = get_or(v, "samples", s.samples);
            s.j_max_h = get_or(v, "j_max_h", s.j_max_h);
            if (v.contains("j_max")) s.j_max_h = v["j_max"].get<std::size_t>();
            s.j_max_k = get_or(v, "j_max_k", s.j_max_k);
            s.omega = get_or(v, "omega", s.omega);
            if (v.contains("oracle_omegas")) s.oracle_omegas = number_list(v["oracle_omegas"], "oracle_omegas");
            s.oracle_alpha = get_or(v, "oracle_alpha", s.oracle_alpha);
            s.oracle_beta = get_or(v, "oracle_beta", s.oracle_beta);
            s.anchor_constants = get_or(v, "anchor_constants", s.anchor_constants);
            s.diagonal_samples = get_or(v, "diagonal_samples", s.diagonal_samples);
            s.segment_samples = get_or(v, "segment_samples", s.segment_samples);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg) {
    positive(cfg.omega, "omega");
    positive(cfg.inertia, "inertia");
    if (cfg.grid_n < 2) throw ConfigError("grid_n must be at least 2");
    if (cfg.samples < 2) throw ConfigError("samples must be at least 2");
    const auto& p = cfg.protocol;
    try {
        if (p.type == ProtocolDescriptor::Type::FourStep) {
            detail::require_unit(p.alpha, "alpha");
            detail::require_unit(p.beta, "beta");
        } else {
            for (double a : p.alphas) detail::require_unit(a, "alphas");
        }
        (void)p.build();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("protocol: ") + e.what());
    }
    if (!cfg.path) {
        const auto names = builtin_path_names();
        if (std::find(names.begin(), names.end(), cfg.path_name) == names.end())
            throw ConfigError("unknown builtin path: " + cfg.path_name);
    }
    if (cfg.state.mode == StateMode::Fixed && std::abs(cfg.state.fixed.norm() - 1) > 1e-10)
        throw ConfigError("fixed_state must be normalized");
    if (cfg.fast_point)
        for (double x : *cfg.fast_point)
            if (!(x >= 0 && x <= 1)) throw ConfigError("fast_point must lie in the unit square");
    const auto& v = cfg.verify;
    if (v.samples < 1 || v.j_max_h < 1 || v.j_max_k < 1 || v.anchor_constants < 1 || v.diagonal_samples < 2 ||
        v.segment_samples < 3)
        throw ConfigError("verify sizes must be positive");
    positive(v.omega, "verify.omega");
    if (v.oracle_omegas.size() < 2) throw ConfigError("verify.oracle_omegas needs at least two values");
    for (double w : v.oracle_omegas) positive(w, "verify.oracle_omegas");
    if (!(v.oracle_alpha >= 0 && v.oracle_alpha <= 1 && v.oracle_beta >= 0 && v.oracle_beta <= 1))
        throw ConfigError("verify oracle point must lie in the unit square");
}

std::string canonical_config(const RunConfig& cfg) {
    json proto;
    const auto& p = cfg.protocol;
    proto["type"] = p.type == ProtocolDescriptor::Type::FourStep ? "four-step" : "generalized";
    proto["alpha"] = p.alpha;
    proto["beta"] = p.beta;
    proto["alphas"] = p.alphas;
    if (p.spin_constants) {
        proto["potentials"] = "spin-c";
        const auto c = p.constants.as_array();
        proto["constants"] = std::vector<double>(c.begin(), c.end());
    } else {
        json mats = json::array();
        for (const auto& m : p.potentials) {
            json rows = json::array();
            for (Eigen::Index r = 0; r < m.matrix().rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < m.matrix().cols(); ++c) row.push_back(complex_json(m.matrix()(r, c)));
                rows.push_back(row);
            }
            mats.push_back(rows);
        }
        proto["potentials"] = mats;
    }
    json j;
    j["protocol"] = proto;
    j["omega"] = cfg.omega;
    j["inertia"] = cfg.inertia;
    j["grid_n"] = cfg.grid_n;
    j["path"] = cfg.path ? json::parse(cfg.path_json) : json(cfg.path_name);
    j["samples"] = cfg.samples;
    j["mode"] = to_string(cfg.averaging);
    j["state"] = to_string(cfg.state.mode);
    j["fixed_state"] = {complex_json(cfg.state.fixed(0)), complex_json(cfg.state.fixed(1))};
    j["fast_point"] = cfg.fast_point ? json{(*cfg.fast_point)[0], (*cfg.fast_point)[1]} : json(nullptr);
    j["seed"] = cfg.seed;
    const auto& v = cfg.verify;
    j["verify"] = {{"samples", v.samples},
                   {"j_max_h", v.j_max_h},
                   {"j_max_k", v.j_max_k},
                   {"omega", v.omega},
                   {"oracle_omegas", v.oracle_omegas},
                   {"oracle_alpha", v.oracle_alpha},
                   {"oracle_beta", v.oracle_beta},
                   {"anchor_constants", v.anchor_constants},
                   {"diagonal_samples", v.diagonal_samples},
                   {"segment_samples", v.segment_samples}};
    return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical_config(cfg)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ParameterPath parse_path_json(const std::string& text, const std::string& name) {
    try {
        return parse_path_object(json::parse(text), name);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("path: ") + e.what());
    }
}

}  // namespace stepfloq
