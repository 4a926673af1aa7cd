#include "stepfloq/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stepfloq/errors.hpp"

namespace stepfloq {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_comment(const OutputMeta& meta, const std::string& extra) {
    std::string s = "# config_hash=" + meta.config_hash + " averaging=" + to_string(meta.averaging) +
                    " state=" + to_string(meta.state);
    if (!extra.empty()) s += " " + extra;
    return s + "\n";
}

namespace {

ordered_json meta_json(const OutputMeta& meta) {
    return {{"config_hash", meta.config_hash},
            {"averaging", to_string(meta.averaging)},
            {"state", to_string(meta.state)}};
}

ordered_json vec_json(const Eigen::Vector3d& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

std::string csv_row(std::initializer_list<double> xs) {
    std::string s;
    bool first = true;
    for (double x : xs) {
        if (!first) s += ',';
        s += format_double(x);
        first = false;
    }
    return s + "\n";
}

/// Five-stop viridis ramp.
std::string color(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops = {
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * 4;
    const int k = std::min(3, static_cast<int>(t));
    const double f = t - k;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                  static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                  static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
    return buf;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

}  // namespace

std::string bands_csv(const BandSurface& s, const OutputMeta& meta) {
    std::string out = csv_comment(meta, "grid=" + std::to_string(s.resolution));
    out += "alpha,beta,e_minus,e_plus,b_mag\n";
    for (const auto& n : s.nodes) out += csv_row({n.alpha, n.beta, n.e_minus, n.e_plus, n.b_mag});
    return out;
}

std::string scan_csv(const DiabolicalScan& scan, const OutputMeta& meta) {
    std::string out = csv_comment(meta, std::string("degenerate_everywhere=") +
                                            (scan.degenerate_everywhere ? "true" : "false"));
    out += "kind,component,alpha,beta,b_mag\n";
    for (const auto& p : scan.points)
        out += std::string(p.corner ? "corner" : "point") + ",-1," + format_double(p.alpha) + "," +
               format_double(p.beta) + "," + format_double(p.b_mag) + "\n";
    for (const auto& l : scan.loci)
        for (const auto& q : l.polyline)
            out += "locus," + std::to_string(l.component) + "," + format_double(q.x()) + "," + format_double(q.y()) +
                   ",\n";
    return out;
}

std::string scan_json(const DiabolicalScan& scan, const DriveConstants& c, const OutputMeta& meta) {
    ordered_json j;
    j["meta"] = meta_json(meta);
    const auto cs = c.as_array();
    j["constants"] = std::vector<double>(cs.begin(), cs.end());
    j["degenerate_everywhere"] = scan.degenerate_everywhere;
    ordered_json pts = ordered_json::array();
    for (const auto& p : scan.points)
        pts.push_back({{"alpha", p.alpha}, {"beta", p.beta}, {"b_mag", p.b_mag}, {"corner", p.corner}});
    j["points"] = pts;
    ordered_json loci = ordered_json::array();
    for (const auto& l : scan.loci) {
        const auto& a = l.polyline.front();
        const auto& b = l.polyline.back();
        loci.push_back({{"component", l.component},
                        {"points", l.polyline.size()},
                        {"start", {a.x(), a.y()}},
                        {"end", {b.x(), b.y()}}});
    }
    j["loci"] = loci;
    j["isolated_points"] = scan.points.size();
    j["curve_components"] = scan.loci.size();
    return j.dump(2) + "\n";
}

std::string trajectory_csv(const BlochTrajectory& traj, const OutputMeta& meta) {
    std::string out = csv_comment(meta);
    out += "tau,alpha,beta,nx,ny,nz\n";
    for (const auto& s : traj.samples) out += csv_row({s.tau, s.alpha, s.beta, s.n.x(), s.n.y(), s.n.z()});
    return out;
}

std::string report_json(const AdiabaticReport& rep, const ParameterPath& path, const OutputMeta& meta) {
    ordered_json j;
    j["meta"] = meta_json(meta);
    j["path"] = path.name();
    j["path_closed"] = path.closed();
    j["image_closed"] = rep.image_closed;
    j["samples"] = rep.trajectory.samples.size();
    j["berry_phase"] = rep.berry_phase ? ordered_json(*rep.berry_phase) : ordered_json(nullptr);
    j["solid_angle"] = rep.solid_angle ? ordered_json(*rep.solid_angle) : ordered_json(nullptr);
    if (rep.berry_phase && rep.solid_angle)
        j["phase_mismatch"] = std::abs(wrap_phase(*rep.berry_phase + *rep.solid_angle / 2));
    ordered_json cr = ordered_json::array();
    for (const auto& c : rep.crossings)
        cr.push_back({{"tau", c.tau},
                      {"alpha", c.alpha},
                      {"beta", c.beta},
                      {"segment", to_string(c.segment)},
                      {"type", to_string(c.type)},
                      {"endpoint", c.at_endpoint}});
    j["crossings"] = cr;
    j["self_intersections"] = rep.self_intersections.count;
    ordered_json sp = ordered_json::array();
    for (const auto& p : rep.self_intersections.points) sp.push_back(vec_json(p));
    j["self_intersection_points"] = sp;
    j["loop_count"] = rep.loop_count ? ordered_json(*rep.loop_count) : ordered_json(nullptr);
    j["delta_e_fast"] = rep.fast.value;
    j["b_f"] = vec_json(rep.fast.b_f);
    j["delta_e_slow"] = rep.delta_e_slow;
    j["ratio"] = rep.check.ratio;
    j["separated"] = rep.check.separated;
    j["omega"] = rep.trajectory.omega;
    return j.dump(2) + "\n";
}

std::string energies_json(const FastEnergy& fast, double h0, double slow, const AdiabaticCheck& check,
                          double alpha0, double beta0, const OutputMeta& meta) {
    ordered_json j;
    j["meta"] = meta_json(meta);
    j["alpha0"] = alpha0;
    j["beta0"] = beta0;
    j["delta_e_fast"] = fast.value;
    j["b_f"] = vec_json(fast.b_f);
    j["h0_expectation"] = h0;
    j["delta_e_slow"] = slow;
    j["ratio"] = check.ratio;
    j["separated"] = check.separated;
    j["flag"] = check.separated ? "separated" : "timescales not separated";
    return j.dump(2) + "\n";
}

std::string verify_json(const VerifyReport& rep, const OutputMeta& meta) {
    ordered_json j;
    j["meta"] = meta_json(meta);
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"id", c.id},
                          {"name", c.name},
                          {"pass", c.pass},
                          {"residual", c.residual},
                          {"threshold", c.threshold},
                          {"detail", c.detail}});
    j["checks"] = checks;
    j["oracle_sweep"] = {{"omega", rep.sweep.omegas},
                         {"corrected_distance", rep.sweep.corrected_distance},
                         {"paper_distance", rep.sweep.paper_distance},
                         {"ratio_per_doubling", rep.sweep.ratios}};
    j["all_pass"] = rep.all_pass();
    return j.dump(2) + "\n";
}

std::string heatmap_svg(const BandSurface& s) {
    const int n = s.resolution;
    const double size = 512, margin = 40, cell = size / n;
    double top = 0;
    for (const auto& node : s.nodes) top = std::max(top, node.b_mag);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size + 2 * margin) << "\" height=\""
      << num(size + 2 * margin) << "\">\n";
    o << "<g shape-rendering=\"crispEdges\">\n";
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const auto& node = s.nodes[static_cast<std::size_t>(i) * n + k];
            // alpha to the right, beta upward
            o << "<rect x=\"" << num(margin + i * cell) << "\" y=\"" << num(margin + (n - 1 - k) * cell)
              << "\" width=\"" << num(cell + 0.01) << "\" height=\"" << num(cell + 0.01) << "\" fill=\""
              << color(top > 0 ? node.b_mag / top : 0) << "\"/>\n";
        }
    o << "</g>\n";
    o << "<text x=\"" << num(margin + size / 2) << "\" y=\"" << num(size + 1.7 * margin)
      << "\" text-anchor=\"middle\" font-size=\"14\">alpha</text>\n";
    o << "<text x=\"" << num(margin / 3) << "\" y=\"" << num(margin + size / 2)
      << "\" font-size=\"14\">beta</text>\n";
    o << "<text x=\"" << num(margin) << "\" y=\"" << num(margin * 0.6) << "\" font-size=\"14\">|B| max "
      << format_double(top) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::string parameter_svg(const ParameterPath& path, const std::vector<Crossing>& crossings, int samples) {
    const double size = 400, margin = 30;
    auto px = [&](double a) { return num(margin + a * size); };
    auto py = [&](double b) { return num(margin + (1 - b) * size); };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size + 2 * margin) << "\" height=\""
      << num(size + 2 * margin) << "\">\n";
    const char* dash = "stroke=\"#888\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" fill=\"none\"";
    o << "<rect x=\"" << px(0) << "\" y=\"" << py(1) << "\" width=\"" << num(size) << "\" height=\"" << num(size)
      << "\" " << dash << "/>\n";
    o << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1) << "\" "
      << dash << "/>\n";
    o << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
    for (const auto& s : sample_path(path, std::max(samples, static_cast<int>(path.segments().size()) + 1)))
        o << px(s.alpha) << "," << py(s.beta) << " ";
    o << "\"/>\n";
    for (const auto& c : crossings)
        o << "<circle cx=\"" << px(c.alpha) << "\" cy=\"" << py(c.beta) << "\" r=\"4\" fill=\""
          << (c.type == CrossingType::Transversal ? "#1f77b4" : "#2ca02c") << "\"/>\n";
    o << "</svg>\n";
    return o.str();
}

std::string bloch_svg(const BlochTrajectory& traj) {
    const double r = 200, c = 230;
    const Eigen::Vector3d view = Eigen::Vector3d(1, 0.8, 0.6).normalized();
    const Eigen::Vector3d ex = Eigen::Vector3d::UnitZ().cross(view).normalized();
    const Eigen::Vector3d ey = view.cross(ex);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"460\" height=\"460\">\n";
    o << "<circle cx=\"" << num(c) << "\" cy=\"" << num(c) << "\" r=\"" << num(r)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    // front arcs solid, back arcs dashed
    std::vector<std::pair<bool, std::string>> runs;
    for (const auto& s : traj.samples) {
        const bool front = s.n.dot(view) >= 0;
        const std::string pt = num(c + r * s.n.dot(ex)) + "," + num(c - r * s.n.dot(ey)) + " ";
        if (runs.empty() || runs.back().first != front) {
            if (!runs.empty()) runs.back().second += pt;
            runs.push_back({front, ""});
        }
        runs.back().second += pt;
    }
    for (const auto& [front, pts] : runs)
        o << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\""
          << (front ? "" : " stroke-dasharray=\"4 3\" opacity=\"0.6\"") << " points=\"" << pts << "\"/>\n";
    o << "</svg>\n";
    return o.str();
}

void write_text_file(const std::string& file, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path p(file);
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + file + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + file);
}

}  // namespace stepfloq
