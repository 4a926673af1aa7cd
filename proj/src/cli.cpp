#include "stepfloq/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "stepfloq/adiabatic.hpp"
#include "stepfloq/config.hpp"
#include "stepfloq/errors.hpp"
#include "stepfloq/output.hpp"
#include "stepfloq/verify.hpp"

namespace stepfloq {

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> grid, samples;
    std::optional<double> omega;
    std::optional<std::string> mode, state;
    std::optional<unsigned> threads;
};

RunConfig assemble(const Overrides& o) {
    RunConfig cfg = o.config.empty() ? parse_config("{}") : load_config(o.config);
    if (o.out) cfg.out = *o.out;
    if (o.grid) cfg.grid_n = *o.grid;
    if (o.samples) cfg.samples = *o.samples;
    if (o.omega) cfg.omega = *o.omega;
    if (o.mode) {
        if (*o.mode == "paper")
            cfg.averaging = Averaging::Paper;
        else if (*o.mode == "corrected")
            cfg.averaging = Averaging::Corrected;
        else
            throw ConfigError("--mode must be paper or corrected");
    }
    if (o.state) {
        if (*o.state == "fixed")
            cfg.state.mode = StateMode::Fixed;
        else if (*o.state == "ground")
            cfg.state.mode = StateMode::Ground;
        else
            throw ConfigError("--state must be fixed or ground");
    }
    if (o.threads) cfg.threads = *o.threads;
    validate_config(cfg);
    return cfg;
}

OutputMeta meta_for(const RunConfig& cfg) { return {config_hash(cfg), cfg.averaging, cfg.state.mode}; }

std::string out_file(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out) / name).string();
}

int cmd_bands(const RunConfig& cfg, std::ostream& out) {
    const auto& c = cfg.spin_constants();
    const auto surf = band_surface(c, cfg.grid_n, cfg.omega, cfg.inertia, cfg.threads, cfg.averaging);
    const auto meta = meta_for(cfg);
    write_text_file(out_file(cfg, "bands.csv"), bands_csv(surf, meta));
    write_text_file(out_file(cfg, "bands.svg"), heatmap_svg(surf));
    const auto best = std::max_element(surf.nodes.begin(), surf.nodes.end(),
                                       [](const BandNode& a, const BandNode& b) { return a.b_mag < b.b_mag; });
    out << "bands: " << surf.nodes.size() << " nodes, max |B| " << format_double(best->b_mag) << " at ("
        << format_double(best->alpha) << ", " << format_double(best->beta) << ")\n";
    return exit_ok;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
    const auto& c = cfg.spin_constants();
    const auto scan = diabolical_scan(c, cfg.grid_n, 1e-10, cfg.threads);
    const auto meta = meta_for(cfg);
    write_text_file(out_file(cfg, "scan.csv"), scan_csv(scan, meta));
    write_text_file(out_file(cfg, "scan.json"), scan_json(scan, c, meta));
    out << "scan: " << scan.points.size() << " points, " << scan.loci.size() << " curve components"
        << (scan.degenerate_everywhere ? ", degenerate everywhere" : "") << "\n";
    return exit_ok;
}

int cmd_path(const RunConfig& cfg, std::ostream& out) {
    const auto& c = cfg.spin_constants();
    const auto path = cfg.resolve_path();
    const auto rep = analyze_path(path, c, cfg.omega, cfg.samples, cfg.state, cfg.threads);
    const auto meta = meta_for(cfg);
    write_text_file(out_file(cfg, "trajectory.csv"), trajectory_csv(rep.trajectory, meta));
    write_text_file(out_file(cfg, "report.json"), report_json(rep, path, meta));
    write_text_file(out_file(cfg, "path_params.svg"), parameter_svg(path, rep.crossings));
    write_text_file(out_file(cfg, "path_bloch.svg"), bloch_svg(rep.trajectory));
    out << "path " << path.name() << ": loop_count ";
    if (rep.loop_count)
        out << *rep.loop_count;
    else
        out << "n/a (image not closed)";
    if (rep.berry_phase) out << ", berry_phase " << format_double(*rep.berry_phase);
    out << "\n";
    return exit_ok;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const auto rep = run_verification(cfg);
    write_text_file(out_file(cfg, "verify.json"), verify_json(rep, meta_for(cfg)));
    for (const auto& c : rep.checks)
        out << c.id << " " << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " (" << c.detail << ")\n";
    return rep.all_pass() ? exit_ok : exit_verify_failed;
}

int cmd_energies(const RunConfig& cfg, std::ostream& out) {
    const auto& c = cfg.spin_constants();
    const auto path = cfg.resolve_path();
    Eigen::Vector2d p0 = path.point(path.tau_begin());
    if (cfg.fast_point) p0 = {(*cfg.fast_point)[0], (*cfg.fast_point)[1]};
    Eigen::Vector2cd psi = cfg.state.fixed;
    if (cfg.state.mode == StateMode::Ground) {
        const auto b = synthetic_field(p0.x(), p0.y(), c);
        if (b.magnitude < default_diabolical_guard) throw NearDiabolical(path.tau_begin(), b.magnitude);
        psi = aligned_spinor(b.b / b.magnitude);
    }
    const auto fast = delta_e_fast(psi, p0.x(), p0.y(), c);
    const double slow = delta_e_slow(cfg.state, path, c, cfg.omega, cfg.samples);
    const auto check = adiabatic_check(fast.value, slow);
    write_text_file(out_file(cfg, "energies.json"),
                    energies_json(fast, h0_expectation(cfg.inertia), slow, check, p0.x(), p0.y(), meta_for(cfg)));
    out << "energies: delta_e_fast " << format_double(fast.value) << ", delta_e_slow " << format_double(slow)
        << ", ratio " << format_double(check.ratio) << (check.separated ? "" : " (timescales not separated)")
        << "\n";
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Effective Hamiltonians and adiabatic paths for step-driven spin systems", "stepfloq"};
    app.require_subcommand(1, 1);
    Overrides o;
    app.add_option("--config", o.config, "JSON run configuration");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--grid", o.grid, "grid resolution");
    app.add_option("--samples", o.samples, "path sample count");
    app.add_option("--omega", o.omega, "drive frequency");
    app.add_option("--mode", o.mode, "averaging: paper or corrected");
    app.add_option("--state", o.state, "state mode: fixed or ground");
    app.add_option("--threads", o.threads, "worker threads (0 = all cores)");

    std::string chosen;
    for (const char* name : {"bands", "scan", "path", "verify", "energies"}) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->callback([&chosen, name] { chosen = name; });
    }
    static const std::map<std::string, std::string> descriptions = {
        {"bands", "band surface CSV and |B| heatmap"},
        {"scan", "degeneracy points and loci"},
        {"path", "Bloch trajectory, phase and loop analysis for a path"},
        {"verify", "self-checks of the effective model"},
        {"energies", "fast and slow energy costs"}};
    for (auto* sub : app.get_subcommands({})) sub->description(descriptions.at(sub->get_name()));

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }

    try {
        const RunConfig cfg = assemble(o);
        if (chosen == "bands") return cmd_bands(cfg, out);
        if (chosen == "scan") return cmd_scan(cfg, out);
        if (chosen == "path") return cmd_path(cfg, out);
        if (chosen == "verify") return cmd_verify(cfg, out);
        return cmd_energies(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return exit_io;
    } catch (const NearDiabolical& e) {
        err << "numerical guard: " << e.what() << "\n";
        return exit_numerical;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

}  // namespace stepfloq
