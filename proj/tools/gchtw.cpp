// gchtw command-line tool: equilibria, portraits, singular-wave classification,
// homoclinic series construction, wave profiles, g* computation, solution
// verification, and parameter sweeps with reproducible run manifests.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gchtw/equations.hpp"
#include "gchtw/io.hpp"
#include "gchtw/oracle.hpp"
#include "gchtw/phase_plane.hpp"
#include "gchtw/series.hpp"
#include "gchtw/version.hpp"

namespace {

using namespace gchtw;

constexpr int exit_ok = 0;
constexpr int exit_generic = 1;
constexpr int exit_no_saddle = 2;
constexpr int exit_no_root = 3;
constexpr int exit_resonance = 4;
constexpr int exit_verification = 5;
constexpr int exit_usage = 64;

EquationId require_equation(const std::string& tag) {
    const auto eq = parse_equation_id(tag);
    if (!eq) throw CLI::ValidationError("--eq", "expected gch1, gch2 or gch3");
    return *eq;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<double> parse_range(const std::string& s, int expect) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) out.push_back(std::stod(item));
    if (static_cast<int>(out.size()) != expect)
        throw CLI::ValidationError("range", "expected " + std::to_string(expect) +
                                                " colon-separated numbers");
    return out;
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

json equilibria_json(EquationId eq, const WaveParams& p) {
    json arr = json::array();
    const auto roots = equilibria(eq, p);
    for (const auto& r : roots) {
        auto info = classify_equilibrium(eq, p, {r.value, 0.0});
        json j = equilibrium_to_json(info);
        j["multiplicity"] = r.multiplicity;
        arr.push_back(j);
    }
    for (const auto& info : singular_equilibria(eq, p)) {
        json j = equilibrium_to_json(info);
        j["multiplicity"] = 1;
        arr.push_back(j);
    }
    return arr;
}

// auto saddle selection: the regular saddle admitting a homoclinic loop,
// smallest |x0| on ties
double select_saddle(EquationId eq, const WaveParams& p) {
    std::vector<double> saddles;
    for (const auto& info : classified_equilibria(eq, p))
        if (info.kind == EquilibriumKind::saddle && info.origin == PointOrigin::regular)
            saddles.push_back(info.location[0]);
    if (saddles.empty()) throw no_saddle_error("no regular saddle for these parameters");
    std::sort(saddles.begin(), saddles.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (double s : saddles) {
        try {
            if (has_homoclinic_loop(eq, p, s, 1e-6, 1e-9)) return s;
        } catch (const std::exception&) {
        }
    }
    throw no_saddle_error("no saddle admits a homoclinic loop; pass --x0 explicitly");
}

struct SeriesArgs {
    std::string eq_tag;
    double c = 0.0, g = 0.0;
    std::string x0_spec = "auto";
    int M = default_truncation;
    std::string strategy = "continuity";
    std::optional<double> a1;
    std::optional<double> target;
    std::string recurrence = "standard";
    int family = 1;
    std::vector<double> constants{0.0, 0.0};
    std::string out = "sol.json";
};

int run_series(const SeriesArgs& a, const std::string& cmdline) {
    const EquationId eq = require_equation(a.eq_tag);
    const WaveParams p(a.c, a.g);
    const Gch3Recurrence rec =
        (a.recurrence == "negated") ? Gch3Recurrence::negated : Gch3Recurrence::standard;

    AssembleOptions opts;
    opts.recurrence = rec;
    const auto strategy = parse_construction(a.strategy);
    if (!strategy) throw CLI::ValidationError("--strategy", "unknown strategy " + a.strategy);
    opts.strategy = *strategy;
    opts.leading = a.a1;
    opts.target = a.target;
    opts.family = a.family;
    if (a.constants.size() == 2) opts.constants = {a.constants[0], a.constants[1]};

    double x0 = 0.0;
    if (opts.strategy == Construction::exact_g0_form) {
        x0 = 0.0;
    } else if (a.x0_spec == "auto") {
        x0 = select_saddle(eq, p);
    } else {
        x0 = std::stod(a.x0_spec);
        // snap to the closest equilibrium so rounded inputs stay usable
        double best = x0;
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& r : equilibria(eq, p))
            if (std::abs(r.value - x0) < dist) {
                dist = std::abs(r.value - x0);
                best = r.value;
            }
        if (dist <= 1e-3 * (1.0 + std::abs(x0))) x0 = best;
    }

    const HomoclinicSolution sol = assemble(eq, p, x0, a.M, opts);
    json j = solution_to_json(sol);

    json derived;
    derived["equilibria"] = equilibria_json(eq, p);
    derived["series"] = json{{"x0", sol.x0()},
                             {"M", sol.right.M},
                             {"a1", sol.right.coefficients.front()},
                             {"b1", sol.left.coefficients.front()},
                             {"junction_value", sol.junction_value}};
    j["manifest"] = to_json(make_manifest(cmdline, to_string(eq), p.c, p.g, derived));
    write_text_file(a.out, j.dump(2) + "\n");

    const auto cr = (sol.right.M >= 8)
                        ? convergence_report(sol.right).verdict
                        : ConvergenceReport::Verdict::inconclusive;
    std::cout << "wrote " << a.out << "  (x0=" << format_g17(sol.x0())
              << ", a1=" << format_g17(sol.right.coefficients.front())
              << ", b1=" << format_g17(sol.left.coefficients.front())
              << ", junction=" << format_g17(sol.junction_value) << ", " << to_string(cr)
              << ")\n";
    return exit_ok;
}

int run_verify(const std::string& path) {
    const json j = json::parse(read_text_file(path));
    const HomoclinicSolution sol = solution_from_json(j);
    std::vector<std::string> failures;

    if (sol.exact) {
        double worst = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double z = -5.0 + 10.0 * i / 200.0;
            worst = std::max(worst, std::abs(solution_residual_at(sol, z)));
        }
        if (worst > 1e-10)
            failures.push_back("exact-form residual " + format_g17(worst) + " > 1e-10");
    } else {
        for (const SeriesBranch* b : {&sol.right, &sol.left}) {
            const double dev = rebuild_deviation(*b, sol.params);
            if (dev > 1e-12)
                failures.push_back(std::string("branch rebuild deviation ") + format_g17(dev) +
                                   " > 1e-12 (" + to_string(b->side) + ")");
        }
        const double jtol = 1e-9 * std::max(1.0, std::abs(sol.junction_value));
        if (sol.construction != Construction::mirror && sol.junction_jump > jtol)
            failures.push_back("junction jump " + format_g17(sol.junction_jump) +
                               " exceeds tolerance");
        // residual must decay at the truncation rate in the tail
        const double aexp = std::abs(sol.right.exponent);
        const double z1 = 2.0 / aexp, z2 = 4.0 / aexp;
        const double r1 = std::abs(solution_residual_at(sol, z1));
        const double r2 = std::abs(solution_residual_at(sol, z2));
        const double expected =
            r1 * std::exp(-(sol.right.M + 0.5) * aexp * (z2 - z1)) * 10.0;
        if (r2 > std::max(expected, 1e-12))
            failures.push_back("residual does not decay at the truncation rate (r(" +
                               format_g17(z1) + ")=" + format_g17(r1) + ", r(" +
                               format_g17(z2) + ")=" + format_g17(r2) + ")");
        // spot-check the recurrence against numeric extraction
        try {
            const double mism = recurrence_mismatch(sol.equation, sol.params, sol.x0(),
                                                    sol.right.exponent, 5, sol.recurrence);
            if (mism > 1e-9)
                failures.push_back("recurrence mismatch vs numeric extraction: " +
                                   format_g17(mism));
        } catch (const std::exception& e) {
            failures.push_back(std::string("oracle extraction failed: ") + e.what());
        }
    }

    if (failures.empty()) {
        std::cout << "verify: all invariants hold\n";
        return exit_ok;
    }
    for (const auto& f : failures) std::cout << "verify: FAIL " << f << "\n";
    return exit_verification;
}

int run_sweep(const std::string& eq_tag, const std::string& c_range,
              const std::string& g_range, const std::string& job, const std::string& out_dir,
              const std::string& cmdline) {
    const EquationId eq = require_equation(eq_tag);
    std::filesystem::create_directories(out_dir);
    const auto cr = parse_range(c_range, 3);
    const auto gr = parse_range(g_range, 3);
    const int nc = static_cast<int>(cr[2]);
    const int ng = static_cast<int>(gr[2]);
    if (nc < 1 || ng < 1) throw CLI::ValidationError("range", "counts must be >= 1");

    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GCHTW_THREADS")) threads = std::max(1, std::atoi(env));
    threads = std::max(1, std::min(threads, nc * ng));

    std::atomic<int> next{0};
    std::atomic<int> failures{0};
    auto worker = [&]() {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= nc * ng) return;
            const int i = idx / ng, jg = idx % ng;
            const double c = (nc == 1) ? cr[0] : cr[0] + (cr[1] - cr[0]) * i / (nc - 1);
            const double g = (ng == 1) ? gr[0] : gr[0] + (gr[1] - gr[0]) * jg / (ng - 1);
            json cell;
            try {
                const WaveParams p(c, g);
                if (job == "equilibria") {
                    cell["equilibria"] = equilibria_json(eq, p);
                } else if (job == "classify") {
                    const auto v = classify_singular_wave(eq, p);
                    cell["label"] = to_string(v.label);
                    cell["h_s"] = v.h_s;
                    cell["geometry"] = v.geometry;
                } else if (job == "series") {
                    const double x0 = select_saddle(eq, p);
                    AssembleOptions opts;
                    opts.strategy = Construction::continuity_root;
                    const auto sol = assemble(eq, p, x0, default_truncation, opts);
                    cell["series"] = json{
                        {"x0", sol.x0()},
                        {"M", sol.right.M},
                        {"a1", sol.right.coefficients.front()},
                        {"b1", sol.left.coefficients.front()},
                        {"junction_value", sol.junction_value},
                        {"verdict",
                         to_string(convergence_report(sol.right).verdict)}};
                } else {
                    cell["error"] = "unknown job";
                }
            } catch (const std::exception& e) {
                cell["error"] = e.what();
            }
            RunManifest m = make_manifest(cmdline, to_string(eq), c, g, cell);
            const std::string path = out_dir + "/cell_" + std::to_string(i) + "_" +
                                     std::to_string(jg) + ".json";
            try {
                write_text_file(path, to_json(m).dump(2) + "\n");
            } catch (const std::exception&) {
                failures.fetch_add(1);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    std::cout << "sweep: wrote " << nc * ng - failures.load() << " cells to " << out_dir
              << "\n";
    return failures.load() == 0 ? exit_ok : exit_generic;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traveling-wave analysis for three generalized Camassa-Holm equations"};
    app.set_version_flag("--version", gchtw::version_string);
    app.require_subcommand(1);
    const std::string cmdline = command_line(argc, argv);

    std::string eq_tag, out_path, csv_path, svg_path, window_spec, x_spec, t_spec;
    std::string solution_path, job, c_range, g_range, out_dir;
    double c = 0.0, g = 0.0, tol = 1e-10;
    std::optional<double> g_query;
    int seeds = 16;
    bool as_json = false, as_csv = false;
    std::uint64_t seed = 0;
    SeriesArgs series_args;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--eq", eq_tag, "equation tag (gch1|gch2|gch3)")->required();
        sub->add_option("--c", c, "wave speed")->required();
        sub->add_option("--g", g, "integration constant")->required();
    };

    auto* eqm = app.add_subcommand("equilibria", "equilibrium points and classification");
    add_params(eqm);
    eqm->add_flag("--json", as_json, "emit JSON");
    eqm->add_flag("--csv", as_csv, "emit CSV");
    eqm->add_option("--out", out_path, "output file (default stdout)");

    auto* por = app.add_subcommand("portrait", "phase portrait trajectories");
    add_params(por);
    por->add_option("--window", window_spec, "phi_min:phi_max:y_min:y_max")->required();
    por->add_option("--seeds", seeds, "seed count (default 16)");
    por->add_option("--svg", svg_path, "write SVG plot");
    por->add_option("--csv", csv_path, "write trajectory CSV");
    por->add_option("--seed", seed, "randomness seed (default 0)");

    auto* clf = app.add_subcommand("classify", "singular traveling-wave verdict");
    add_params(clf);

    auto* ser = app.add_subcommand("series", "two-sided homoclinic series solution");
    ser->add_option("--eq", series_args.eq_tag, "equation tag")->required();
    ser->add_option("--c", series_args.c, "wave speed")->required();
    ser->add_option("--g", series_args.g, "integration constant")->required();
    ser->add_option("--x0", series_args.x0_spec, "base saddle (number or 'auto')");
    ser->add_option("--M", series_args.M, "truncation order (default 25)");
    ser->add_option("--strategy", series_args.strategy,
                    "continuity|mirror|matched|exact-g0");
    double a1_opt = 0.0, target_opt = 0.0;
    auto* a1o = ser->add_option("--a1", a1_opt, "leading coefficient for mirror/matched");
    auto* tgo = ser->add_option("--target", target_opt, "continuity target (default 0)");
    ser->add_option("--recurrence", series_args.recurrence,
                    "gch3 bracket convention: standard|negated");
    ser->add_option("--family", series_args.family, "exact-g0 family (1|2|3)");
    ser->add_option("--constants", series_args.constants, "exact-g0 constants")
        ->expected(2);
    ser->add_option("--out", series_args.out, "output JSON path (default sol.json)");

    auto* wav = app.add_subcommand("wave", "traveling profiles from a solution file");
    wav->add_option("--solution", solution_path, "solution JSON")->required();
    wav->add_option("--x", x_spec, "xmin:xmax:step")->required();
    wav->add_option("--t", t_spec, "comma-separated times")->required();
    wav->add_option("--out", out_path, "output CSV")->required();

    auto* gst = app.add_subcommand("gstar", "homoclinic-level condition for gch3");
    gst->add_option("--c", c, "wave speed (> 0)")->required();
    gst->add_option("--tol", tol, "bisection tolerance (default 1e-10)");
    double gq = 0.0;
    auto* gqo = gst->add_option("--g", gq, "also report hyperbola intersections at this g");

    auto* ver = app.add_subcommand("verify", "check a solution file against the oracle");
    ver->add_option("--solution", solution_path, "solution JSON")->required();

    auto* swp = app.add_subcommand("sweep", "grid of runs over (c, g)");
    swp->add_option("--eq", eq_tag, "equation tag")->required();
    swp->add_option("--c-range", c_range, "a:b:n")->required();
    swp->add_option("--g-range", g_range, "a:b:m")->required();
    swp->add_option("--job", job, "equilibria|classify|series")->required();
    swp->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (eqm->parsed()) {
            const EquationId eq = require_equation(eq_tag);
            const WaveParams p(c, g);
            const json arr = equilibria_json(eq, p);
            std::string payload;
            if (as_csv) {
                CsvWriter csv({"phi", "y", "kind", "origin", "eig1_re", "eig1_im", "eig2_re",
                               "eig2_im"});
                for (const auto& e : arr)
                    csv.raw_row({format_g17(e["phi"].get<double>()),
                                 format_g17(e["y"].get<double>()),
                                 e["kind"].get<std::string>(), e["origin"].get<std::string>(),
                                 format_g17(e["eigenvalues"][0][0].get<double>()),
                                 format_g17(e["eigenvalues"][0][1].get<double>()),
                                 format_g17(e["eigenvalues"][1][0].get<double>()),
                                 format_g17(e["eigenvalues"][1][1].get<double>())});
                payload = csv.str();
            } else {
                json out{{"equilibria", arr},
                         {"manifest", to_json(make_manifest(cmdline, to_string(eq), c, g,
                                                            json{{"equilibria", arr}}))}};
                payload = out.dump(2) + "\n";
            }
            if (out_path.empty())
                std::cout << payload;
            else {
                write_text_file(out_path, payload);
                write_text_file(out_path + ".manifest.json",
                                to_json(make_manifest(cmdline, to_string(eq), c, g,
                                                      json{{"equilibria", arr}}))
                                        .dump(2) +
                                    "\n");
            }
            return exit_ok;
        }
        if (por->parsed()) {
            const EquationId eq = require_equation(eq_tag);
            const WaveParams p(c, g);
            const auto wv = parse_range(window_spec, 4);
            const Window w{wv[0], wv[1], wv[2], wv[3]};
            const Portrait pr = portrait(eq, p, w, seeds, 1e-8, seed);
            if (!svg_path.empty()) write_text_file(svg_path, portrait_svg(pr, w, p, eq));
            if (!csv_path.empty()) {
                CsvWriter csv({"trajectory", "zeta", "phi", "y"});
                for (std::size_t i = 0; i < pr.trajectories.size(); ++i)
                    for (const auto& s : pr.trajectories[i].samples)
                        csv.row({static_cast<double>(i), s.zeta, s.phi, s.y});
                write_text_file(csv_path, csv.str());
            }
            json derived{{"equilibria", equilibria_json(eq, p)},
                         {"trajectories", pr.trajectories.size()}};
            const RunManifest m = make_manifest(cmdline, to_string(eq), c, g, derived);
            const std::string mpath =
                (!csv_path.empty() ? csv_path : (!svg_path.empty() ? svg_path : "portrait")) +
                ".manifest.json";
            write_text_file(mpath, to_json(m).dump(2) + "\n");
            std::cout << "portrait: " << pr.trajectories.size() << " trajectories, "
                      << pr.equilibrium_info.size() << " equilibria\n";
            return exit_ok;
        }
        if (clf->parsed()) {
            const EquationId eq = require_equation(eq_tag);
            const WaveParams p(c, g);
            const auto v = classify_singular_wave(eq, p);
            json out{{"label", to_string(v.label)},
                     {"geometry", v.geometry},
                     {"h_s", v.h_s}};
            if (v.singular_points)
                out["singular_points"] =
                    json::array({json::array({(*v.singular_points)[0][0],
                                              (*v.singular_points)[0][1]}),
                                 json::array({(*v.singular_points)[1][0],
                                              (*v.singular_points)[1][1]})});
            std::cout << out.dump(2) << "\n";
            return exit_ok;
        }
        if (ser->parsed()) {
            if (*a1o) series_args.a1 = a1_opt;
            if (*tgo) series_args.target = target_opt;
            return run_series(series_args, cmdline);
        }
        if (wav->parsed()) {
            const json j = json::parse(read_text_file(solution_path));
            const HomoclinicSolution sol = solution_from_json(j);
            const auto xr = parse_range(x_spec, 3);
            const auto times = parse_list(t_spec);
            std::vector<std::string> header{"x"};
            for (double t : times) header.push_back("u(t=" + format_g17(t) + ")");
            CsvWriter csv(header);
            for (double x = xr[0]; x <= xr[1] + 1e-12; x += xr[2]) {
                std::vector<double> row{x};
                for (double t : times) row.push_back(evaluate_wave(sol, x, t));
                csv.row(row);
            }
            write_text_file(out_path, csv.str());
            const RunManifest m =
                make_manifest(cmdline, to_string(sol.equation), sol.params.c, sol.params.g,
                              json{{"solution_file", solution_path},
                                   {"solution_hash", hex64(fnv1a64(j.dump()))}});
            write_text_file(out_path + ".manifest.json", to_json(m).dump(2) + "\n");
            std::cout << "wrote " << out_path << "\n";
            return exit_ok;
        }
        if (gst->parsed()) {
            const GStarResult r = gstar(c, tol);
            json out{{"c", c},
                     {"g_star", r.g_star},
                     {"h2", r.h2},
                     {"h2_shifted", r.h2_shifted}};
            if (*gqo) {
                const auto ix = gstar_intersections(c, gq);
                out["intersections"] = json{{"g", gq},
                                            {"exists", ix.exists},
                                            {"phi_s", ix.phi_s},
                                            {"y_s", ix.y_s}};
            }
            std::cout << out.dump(2) << "\n";
            return exit_ok;
        }
        if (ver->parsed()) return run_verify(solution_path);
        if (swp->parsed()) return run_sweep(eq_tag, c_range, g_range, job, out_dir, cmdline);
    } catch (const no_saddle_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_no_saddle;
    } catch (const not_a_saddle_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_no_saddle;
    } catch (const no_continuity_root_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_no_root;
    } catch (const resonance_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_resonance;
    } catch (const verification_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_verification;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_generic;
    }
    return exit_usage;
}
