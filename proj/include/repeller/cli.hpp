#pragma once

// Command-line front end: scales, verify, classify, preimages, dimension, render.
//
// Exit codes: 0 success (verify: all checks pass), 1 a check failed,
// 2 usage or domain error, 3 numerical failure. Errors are reported as one
// JSON object on stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "repeller/io.hpp"

namespace repeller::cli {

using io::json;

struct RunConfig {
    std::string command;
    Params params;
    bool trunc_set = false;  // otherwise M follows N + 8
    std::uint64_t seed = kDefaultSeed;
    int max_iter = 100;
    std::optional<int> depth;  // preimages: 1, dimension: 5
    double t_lo = kDefaultTLo;
    double t_hi = kDefaultTHi;
    std::optional<LogPolarWindow> window;  // default: [2^-40, s_N] x [-pi, pi]
    int nr = 64;
    int ntheta = 64;
    std::string base = "1,0";
    std::string layer = "verdict";
    std::string out;
    std::string csv;

    int effective_depth() const { return depth.value_or(command == "dimension" ? 5 : 1); }
};

/// "re,im" or "polar:log2r,theta".
inline XComplex parse_base(const std::string& s) {
    const bool polar = s.rfind("polar:", 0) == 0;
    const std::string body = polar ? s.substr(6) : s;
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw DomainError("base point must be \"re,im\" or \"polar:log2r,theta\"");
    std::size_t used1 = 0, used2 = 0;
    double x = 0, y = 0;
    try {
        x = std::stod(body.substr(0, comma), &used1);
        y = std::stod(body.substr(comma + 1), &used2);
    } catch (const std::exception&) {
        throw DomainError("base point: malformed number");
    }
    if (used1 != comma || used2 != body.size() - comma - 1) throw DomainError("base point: malformed number");
    return polar ? XComplex::from_polar(x, y) : XComplex(x, y);
}

inline std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw DomainError("");
        } catch (const std::exception&) {
            throw DomainError(std::string(what) + ": malformed number list");
        }
    }
    return v;
}

/// "lr_lo,lr_hi" or "lr_lo,lr_hi,theta_lo,theta_hi" (log2 radius, radians).
inline LogPolarWindow parse_window(const std::string& s) {
    const auto v = parse_list(s, "window");
    if (v.size() != 2 && v.size() != 4) throw DomainError("window takes 2 or 4 numbers");
    LogPolarWindow w{v[0], v[1]};
    if (v.size() == 4) {
        w.theta_lo = v[2];
        w.theta_hi = v[3];
    }
    return w;
}

/// "n" or "nr,ntheta".
inline std::pair<int, int> parse_res(const std::string& s) {
    const auto v = parse_list(s, "res");
    if (v.empty() || v.size() > 2) throw DomainError("res takes 1 or 2 integers");
    for (double x : v)
        if (x < 1 || x != std::floor(x) || x > 1 << 16) throw DomainError("res entries must be integers in [1, 65536]");
    return {static_cast<int>(v[0]), static_cast<int>(v.back())};
}

inline json to_json(const RunConfig& c) {
    json j = {{"command", c.command}, {"params", io::to_json(c.params)}, {"seed", c.seed},
              {"max_iter", c.max_iter}, {"depth", c.effective_depth()}, {"t_lo", c.t_lo},
              {"t_hi", c.t_hi}, {"res", {c.nr, c.ntheta}}, {"base", c.base},
              {"layer", c.layer}};
    if (c.window) {
        j["window"] = {c.window->log2_r_lo, c.window->log2_r_hi, c.window->theta_lo, c.window->theta_hi};
    }
    return j;
}

/// Reads a config object; a report that embeds one under "config" is accepted too.
inline void from_json(const json& in, RunConfig& c) {
    const json& j = in.contains("config") ? in.at("config") : in;
    if (j.contains("command")) c.command = j.at("command").get<std::string>();
    if (j.contains("params")) {
        io::from_json(j.at("params"), c.params);
        if (j.at("params").contains("trunc")) c.trunc_set = true;
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
    if (j.contains("depth")) c.depth = j.at("depth").get<int>();
    if (j.contains("t_lo")) c.t_lo = j.at("t_lo").get<double>();
    if (j.contains("t_hi")) c.t_hi = j.at("t_hi").get<double>();
    if (j.contains("res")) {
        c.nr = j.at("res").at(0).get<int>();
        c.ntheta = j.at("res").at(1).get<int>();
    }
    if (j.contains("base")) c.base = j.at("base").get<std::string>();
    if (j.contains("layer")) c.layer = j.at("layer").get<std::string>();
    if (j.contains("window")) {
        const auto& w = j.at("window");
        c.window = LogPolarWindow{w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
                                  w.at(3).get<double>()};
    }
}

/// Writes through a temporary file and a rename; "-" or empty means stdout.
inline void write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
        std::cout.flush();
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DomainError("cannot open output file " + path);
        f.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!f) throw DomainError("cannot write output file " + path);
    }
    std::filesystem::rename(tmp, target);
}

inline int error_exit(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
    return code;
}

inline LogPolarWindow window_for(const RunConfig& c, const Scales& sc) {
    if (c.window) return *c.window;
    return {-40.0, sc.s[sc.N()].log2(), -std::numbers::pi, std::numbers::pi};
}

/// Runs a parsed configuration and returns the exit code.
inline int run(RunConfig c) {
    if (!c.trunc_set) c.params.M = c.params.N + 8;
    const json config = to_json(c);

    if (c.command == "verify") {
        validate(c.params);
        const VerificationReport report = run_all(c.params, c.seed);
        json j = io::to_json(report);
        j["config"] = config;
        write_output(c.out, j.dump(2) + "\n");
        return report.all_pass ? 0 : 1;
    }

    // the closed-form bound has the weaker precondition (L > 1), so report it first
    const double t_star = c.command == "dimension" ? closed_form_bound(c.params.C) : 0.0;
    const Scales sc = build_scales(c.params);
    if (c.command == "scales") {
        json j = io::to_json(sc);
        j["config"] = config;
        write_output(c.out, j.dump(2) + "\n");
        return 0;
    }
    if (c.command == "classify" || c.command == "render") {
        const LogPolarWindow w = window_for(c, sc);
        if (c.command == "classify") {
            write_output(c.out, io::verdict_csv(w, c.nr, c.ntheta, classify_grid(sc, w, c.nr, c.ntheta, c.max_iter)));
            return 0;
        }
        if (c.layer == "regions") {
            write_output(c.out, io::pixmap(c.nr, c.ntheta, region_grid(sc, w, c.nr, c.ntheta), io::region_color));
        } else if (c.layer == "verdict") {
            write_output(c.out, io::pixmap(c.nr, c.ntheta, classify_grid(sc, w, c.nr, c.ntheta, c.max_iter),
                                           io::verdict_color));
        } else {
            throw DomainError("layer must be verdict or regions");
        }
        return 0;
    }
    if (c.command == "preimages") {
        const auto tree = build_tree(sc, parse_base(c.base), c.effective_depth());
        write_output(c.out, io::tree_lines(sc, tree));
        if (tree.partial) {
            std::string all;
            for (const auto& f : tree.failures) all += f + "; ";
            return error_exit("partial_tree", all, 3);
        }
        return 0;
    }
    if (c.command == "dimension") {
        const auto tree = build_tree(sc, parse_base(c.base), c.effective_depth());
        const auto seq = t_sequence(tree, c.t_lo, c.t_hi);
        const auto curve = pressure_curve(sc, tree, t_grid(c.t_lo, c.t_hi, 20));
        json pc = json::array();
        for (std::size_t i = 0; i < curve.t_values.size(); ++i) {
            pc.push_back({{"t", curve.t_values[i]},
                          {"log2_S", curve.sums[i].log2()},
                          {"P", curve.pressures[i]},
                          {"ceiling", curve.ceilings[i]}});
        }
        json ratios = json::array();
        for (double t : {t_star + 0.05, 1.0}) {
            ratios.push_back({{"t", t},
                              {"ceiling", ceiling_factor(sc.L.to_double(), t)},
                              {"ratios", cover_ratios(tree, t)}});
        }
        const json j = {{"C", c.params.C},      {"N", c.params.N},         {"n", tree.depth},
                        {"t_star", t_star},     {"t_n", seq.back()},       {"t_sequence", seq},
                        {"pressure_curve", pc}, {"cover_ratios", ratios}, {"config", config}};
        write_output(c.out, j.dump(2) + "\n");
        std::string csv = c.csv;
        if (csv.empty() && !c.out.empty() && c.out != "-") {
            csv = std::filesystem::path(c.out).replace_extension(".csv").string();
        }
        if (!csv.empty()) write_output(csv, io::pressure_csv(curve));
        return 0;
    }
    throw DomainError("unknown command " + c.command);
}

/// Parses argv (flags win over --config) and runs.
inline int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for entire functions with small bounded-orbit sets"};
    app.require_subcommand(1);

    struct Flags {
        double C = 0, tail_tol = 0, t_lo = 0, t_hi = 0;
        int N = 0, trunc = 0, samples = 0, max_iter = 0, depth = 0;
        std::uint64_t seed = 0;
        std::string window, res, base, out, csv, layer, config;
    } f;

    std::vector<std::pair<std::string, CLI::App*>> subs;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    const std::pair<const char*, const char*> commands[] = {
        {"scales", "print the scale sequence and radii"},
        {"verify", "check every inequality of the mapping scheme"},
        {"classify", "classify orbits on a log-polar grid (CSV)"},
        {"preimages", "preimage tree as JSON lines"},
        {"dimension", "pressure, Bowen zero and closed-form bound"},
        {"render", "log-polar P6 image of verdicts or regions"}};
    for (auto [name, help] : commands) {
        CLI::App* s = app.add_subcommand(name, help);
        auto& o = opts[name];
        o["C"] = s->add_option("--C", f.C, "function parameter C");
        o["N"] = s->add_option("--N", f.N, "level N");
        o["trunc"] = s->add_option("--trunc", f.trunc, "product truncation M (default N + 8)");
        o["tail_tol"] = s->add_option("--tail-tol", f.tail_tol, "evaluation error tolerance");
        o["samples"] = s->add_option("--samples", f.samples, "samples per circle");
        o["max_iter"] = s->add_option("--max-iter", f.max_iter, "orbit budget");
        o["depth"] = s->add_option("--depth", f.depth, "preimage tree depth");
        o["t_lo"] = s->add_option("--t-lo", f.t_lo, "lower end of the t range");
        o["t_hi"] = s->add_option("--t-hi", f.t_hi, "upper end of the t range");
        o["window"] = s->add_option("--window", f.window, "lr_lo,lr_hi[,theta_lo,theta_hi]");
        o["res"] = s->add_option("--res", f.res, "n or nr,ntheta");
        o["seed"] = s->add_option("--seed", f.seed, "sampling seed");
        o["out"] = s->add_option("--out", f.out, "output path (default stdout)");
        o["csv"] = s->add_option("--csv", f.csv, "pressure curve CSV path");
        o["base"] = s->add_option("--base", f.base, "base point re,im or polar:log2r,theta");
        o["layer"] = s->add_option("--layer", f.layer, "render layer: verdict or regions");
        o["config"] = s->add_option("--config", f.config, "JSON config file; flags win");
        subs.emplace_back(name, s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return error_exit("usage", e.what(), 2);
    }

    RunConfig c;
    std::string name;
    for (auto& [n, s] : subs)
        if (s->parsed()) name = n;
    auto& o = opts[name];
    auto given = [&](const char* key) { return o[key]->count() > 0; };

    try {
        if (given("config")) {
            std::ifstream in(f.config);
            if (!in) throw DomainError("cannot read config file " + f.config);
            from_json(json::parse(in), c);
        }
        c.command = name;
        if (given("C")) c.params.C = f.C;
        if (given("N")) c.params.N = f.N;
        if (given("trunc")) {
            c.params.M = f.trunc;
            c.trunc_set = true;
        }
        if (given("tail_tol")) c.params.tail_tol = f.tail_tol;
        if (given("samples")) c.params.samples_per_circle = f.samples;
        if (given("max_iter")) c.max_iter = f.max_iter;
        if (given("depth")) c.depth = f.depth;
        if (given("t_lo")) c.t_lo = f.t_lo;
        if (given("t_hi")) c.t_hi = f.t_hi;
        if (given("window")) c.window = parse_window(f.window);
        if (given("res")) std::tie(c.nr, c.ntheta) = parse_res(f.res);
        if (given("seed")) c.seed = f.seed;
        if (given("out")) c.out = f.out;
        if (given("csv")) c.csv = f.csv;
        if (given("base")) c.base = f.base;
        if (given("layer")) c.layer = f.layer;
        return run(c);
    } catch (const json::exception& e) {
        return error_exit("usage", std::string("config: ") + e.what(), 2);
    } catch (const DomainError& e) {
        return error_exit("domain_error", e.what(), 2);
    } catch (const BudgetError& e) {
        return error_exit("budget", e.what(), 2);
    } catch (const ConstructionError& e) {
        return error_exit("construction", e.what(), 3);
    } catch (const RangeError& e) {
        return error_exit("range", e.what(), 3);
    } catch (const std::exception& e) {
        return error_exit("numerical", e.what(), 3);
    }
}

}  // namespace repeller::cli
