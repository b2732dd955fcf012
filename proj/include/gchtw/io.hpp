#pragma once

// Serialization surface: solution JSON (schema gchtw/solution/v1), run
// manifests, CSV with 17 significant digits, and minimal static SVG plots.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gchtw/equations.hpp"
#include "gchtw/phase_plane.hpp"
#include "gchtw/series.hpp"
#include "gchtw/version.hpp"

namespace gchtw {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting helpers.

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[40];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Run manifests: enough to re-run the command and compare numeric output.

struct RunManifest {
    std::string tool_version = version_string;
    std::string command;
    std::string equation;
    double c = 0.0, g = 0.0;
    json derived;  // equilibria, classifications, series summary; command-specific
    std::string timestamp;
    std::string input_hash;
};

inline json to_json(const RunManifest& m) {
    return json{{"tool_version", m.tool_version}, {"command", m.command},
                {"equation", m.equation},         {"params", {{"c", m.c}, {"g", m.g}}},
                {"derived", m.derived},           {"timestamp", m.timestamp},
                {"input_hash", m.input_hash}};
}

inline RunManifest make_manifest(const std::string& command, const std::string& equation,
                                 double c, double g, json derived) {
    RunManifest m;
    m.command = command;
    m.equation = equation;
    m.c = c;
    m.g = g;
    m.derived = std::move(derived);
    m.timestamp = iso8601_now();
    // hash the inputs only (not the timestamp) so reruns agree
    json key{{"command", command}, {"equation", equation}, {"c", c}, {"g", g}};
    m.input_hash = hex64(fnv1a64(key.dump()));
    return m;
}

// ---------------------------------------------------------------------------
// Equilibrium and solution JSON.

inline json equilibrium_to_json(const EquilibriumInfo& e) {
    return json{{"phi", e.location[0]},
                {"y", e.location[1]},
                {"kind", to_string(e.kind)},
                {"origin", e.origin == PointOrigin::regular ? "regular" : "singular"},
                {"jacobian_determinant", e.jacobian_determinant},
                {"eigenvalues",
                 json::array({json::array({e.eigenvalues[0].real(), e.eigenvalues[0].imag()}),
                              json::array({e.eigenvalues[1].real(), e.eigenvalues[1].imag()})})}};
}

inline json branch_to_json(const SeriesBranch& b) {
    return json{{"side", to_string(b.side)},   {"x0", b.x0},
                {"exponent", b.exponent},      {"M", b.M},
                {"coefficients", b.coefficients}, {"overflow", b.overflow}};
}

inline SeriesBranch branch_from_json(const json& j, EquationId eq, Gch3Recurrence rec) {
    SeriesBranch b;
    b.side = (j.at("side").get<std::string>() == "left") ? Side::left : Side::right;
    b.x0 = j.at("x0").get<double>();
    b.exponent = j.at("exponent").get<double>();
    b.M = j.at("M").get<int>();
    b.coefficients = j.at("coefficients").get<std::vector<double>>();
    b.overflow = j.value("overflow", false);
    b.equation = eq;
    b.recurrence = rec;
    return b;
}

inline json convergence_to_json(const ConvergenceReport& r) {
    return json{{"verdict", to_string(r.verdict)},
                {"tail_ratio", r.tail_ratio},
                {"max_coefficient_index", r.max_coefficient_index}};
}

inline json solution_to_json(const HomoclinicSolution& sol) {
    json j{{"schema", "gchtw/solution/v1"},
           {"equation", to_string(sol.equation)},
           {"params", {{"c", sol.params.c}, {"g", sol.params.g}}},
           {"x0", sol.x0()},
           {"M", sol.right.M},
           {"construction", to_string(sol.construction)},
           {"recurrence", to_string(sol.recurrence)},
           {"right", branch_to_json(sol.right)},
           {"left", branch_to_json(sol.left)},
           {"junction_value", sol.junction_value},
           {"junction_jump", sol.junction_jump}};
    if (sol.exact) {
        j["exact_g0"] = json{{"family", sol.exact->family},
                             {"c", sol.exact->c},
                             {"constants", sol.exact->constants}};
    }
    if (sol.right.M >= 8) {
        j["convergence"] = json{{"right", convergence_to_json(convergence_report(sol.right))},
                                {"left", convergence_to_json(convergence_report(sol.left))}};
    }
    return j;
}

inline HomoclinicSolution solution_from_json(const json& j) {
    const auto eq = parse_equation_id(j.at("equation").get<std::string>());
    if (!eq) throw std::invalid_argument("solution JSON: unknown equation tag");
    const WaveParams p(j.at("params").at("c").get<double>(),
                       j.at("params").at("g").get<double>());
    HomoclinicSolution sol;
    sol.equation = *eq;
    sol.params = p;
    sol.recurrence = (j.value("recurrence", "standard") == std::string("negated"))
                         ? Gch3Recurrence::negated
                         : Gch3Recurrence::standard;
    sol.right = branch_from_json(j.at("right"), *eq, sol.recurrence);
    sol.left = branch_from_json(j.at("left"), *eq, sol.recurrence);
    sol.junction_value = j.at("junction_value").get<double>();
    sol.junction_jump = j.at("junction_jump").get<double>();
    const auto cons = parse_construction(j.at("construction").get<std::string>());
    if (!cons) throw std::invalid_argument("solution JSON: unknown construction tag");
    sol.construction = *cons;
    if (j.contains("exact_g0")) {
        const auto& e = j.at("exact_g0");
        sol.exact = exact_g0(e.at("c").get<double>(), e.at("family").get<int>(),
                             e.at("constants").get<std::array<double, 2>>());
    }
    return sol;
}

// ---------------------------------------------------------------------------
// CSV writer: UTF-8, header row, comma-separated, LF, 17 significant digits.

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_g17(values[i]);
        }
        out_ << '\n';
    }

    void raw_row(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << values[i];
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }
    std::size_t columns() const { return cols_; }

  private:
    std::size_t cols_;
    std::ostringstream out_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Minimal SVG 1.1 plot: polylines and equilibrium markers, no dependencies.

class SvgPlot {
  public:
    SvgPlot(Window w, int width = 720, int height = 540)
        : w_(w), width_(width), height_(height) {}

    void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& color,
                  double stroke = 1.0, const std::string& dash = "") {
        if (pts.size() < 2) return;
        std::ostringstream s;
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke
          << "\"";
        if (!dash.empty()) s << " stroke-dasharray=\"" << dash << "\"";
        s << " points=\"";
        for (const auto& p : pts) s << px(p[0]) << ',' << py(p[1]) << ' ';
        s << "\"/>\n";
        body_ += s.str();
    }

    void marker(double phi, double y, const std::string& kind) {
        std::ostringstream s;
        const double cx = px(phi), cy = py(y);
        if (kind == "center") {
            s << "<circle cx=\"" << cx << "\" cy=\"" << cy
              << "\" r=\"4\" fill=\"none\" stroke=\"#0a720a\" stroke-width=\"1.5\"/>\n";
        } else {
            s << "<path d=\"M" << cx - 4 << ' ' << cy - 4 << " L" << cx + 4 << ' ' << cy + 4
              << " M" << cx - 4 << ' ' << cy + 4 << " L" << cx + 4 << ' ' << cy - 4
              << "\" stroke=\"#b00000\" stroke-width=\"1.5\"/>\n";
        }
        body_ += s.str();
    }

    std::string str() const {
        std::ostringstream s;
        s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_
          << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_
          << "\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
          << "<rect x=\"0.5\" y=\"0.5\" width=\"" << width_ - 1 << "\" height=\""
          << height_ - 1 << "\" fill=\"none\" stroke=\"#404040\"/>\n"
          << body_ << "</svg>\n";
        return s.str();
    }

  private:
    double px(double phi) const {
        return (phi - w_.phi_min) / (w_.phi_max - w_.phi_min) * width_;
    }
    double py(double y) const { return height_ - (y - w_.y_min) / (w_.y_max - w_.y_min) * height_; }

    Window w_;
    int width_, height_;
    std::string body_;
};

inline std::string portrait_svg(const Portrait& pr, const Window& w, const WaveParams& p,
                                EquationId eq) {
    SvgPlot svg(w);
    for (const auto& traj : pr.trajectories) {
        std::vector<std::array<double, 2>> pts;
        for (const auto& s : traj.samples) pts.push_back({s.phi, s.y});
        svg.polyline(pts, "#3050c8", 0.8);
    }
    // singular set overlay
    const int n = 200;
    switch (pr.singular.kind) {
        case SingularSet::Kind::vertical_line:
            svg.polyline({{pr.singular.phi_s, w.y_min}, {pr.singular.phi_s, w.y_max}},
                         "#909090", 1.0, "5,4");
            break;
        case SingularSet::Kind::straight_line: {
            std::vector<std::array<double, 2>> pts;
            for (int i = 0; i <= n; ++i) {
                const double phi = w.phi_min + (w.phi_max - w.phi_min) * i / n;
                pts.push_back({phi, (pr.singular.a * phi + pr.singular.d) / -pr.singular.b});
            }
            svg.polyline(pts, "#909090", 1.0, "5,4");
            break;
        }
        case SingularSet::Kind::hyperbola: {
            for (double sign : {+1.0, -1.0}) {
                std::vector<std::array<double, 2>> pts;
                for (int i = 0; i <= n; ++i) {
                    const double phi = w.phi_min + (w.phi_max - w.phi_min) * i / n;
                    const double y2 = phi * phi - pr.singular.c_value;
                    if (y2 < 0.0) {
                        if (pts.size() >= 2) svg.polyline(pts, "#909090", 1.0, "5,4");
                        pts.clear();
                        continue;
                    }
                    pts.push_back({phi, sign * std::sqrt(y2)});
                }
                svg.polyline(pts, "#909090", 1.0, "5,4");
            }
            break;
        }
    }
    for (const auto& e : pr.equilibrium_info)
        svg.marker(e.location[0], e.location[1],
                   e.kind == EquilibriumKind::center ? "center" : "saddle");
    (void)p;
    (void)eq;
    return svg.str();
}

}  // namespace gchtw
