#pragma once

// JSON, CSV and pixmap encodings of library results.

#include <cstdint>
#include <sstream>
#include <string>

#include <json.hpp>

#include "repeller/dimension.hpp"
#include "repeller/dynamics.hpp"
#include "repeller/verifier.hpp"

namespace repeller::io {

using nlohmann::json;

inline json number(const XReal& x) { return {{"decimal", to_decimal(x, 15)}, {"exact", to_exact(x)}}; }
inline json number(const XComplex& z) { return {{"decimal", to_decimal(z, 15)}, {"exact", to_exact(z)}}; }

inline json to_json(const Params& p) {
    return {{"C", p.C}, {"N", p.N}, {"trunc", p.M}, {"tail_tol", p.tail_tol}, {"samples", p.samples_per_circle}};
}

/// Fields absent from j keep their value in p.
inline void from_json(const json& j, Params& p) {
    if (j.contains("C")) p.C = j.at("C").get<double>();
    if (j.contains("N")) p.N = j.at("N").get<int>();
    if (j.contains("trunc")) p.M = j.at("trunc").get<int>();
    if (j.contains("tail_tol")) p.tail_tol = j.at("tail_tol").get<double>();
    if (j.contains("samples")) p.samples_per_circle = j.at("samples").get<int>();
}

inline json to_json(const Scales& sc) {
    json levels = json::array();
    for (int k = 0; k <= sc.M() + 1; ++k) {
        levels.push_back({{"k", k}, {"a", number(sc.a[k])}, {"r", number(sc.r[k])}, {"s", number(sc.s[k])}});
    }
    return {{"params", to_json(sc.params)}, {"L", sc.L.to_double()}, {"levels", levels}};
}

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::Greater: return ">";
        case Relation::GreaterEqual: return ">=";
        case Relation::Less: return "<";
        case Relation::LessEqual: return "<=";
    }
    return "?";
}

inline json to_json(const CheckResult& c) {
    json j = {{"name", c.name},
              {"k", c.k},
              {"relation", to_string(c.relation)},
              {"units", c.units == Units::Log2 ? "log2" : "linear"},
              {"lhs", c.lhs},
              {"rhs", c.rhs},
              {"margin", c.margin},
              {"pass", c.pass}};
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    json j = {{"params", to_json(r.params)}, {"seed", r.seed}, {"checks", checks}, {"all_pass", r.all_pass}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

/// One JSON object per node, root first, level by level.
inline std::string tree_lines(const Scales& sc, const PreimageTree& tree) {
    std::ostringstream out;
    for (const auto& level : tree.levels) {
        for (const auto& n : level) {
            json j = {{"depth", n.depth},
                      {"parent", n.parent},
                      {"region", repeller::to_string(n.region)},
                      {"point", number(value(sc, n.point))},
                      {"anchor", n.point.anchor},
                      {"offset", to_exact(n.point.offset)},
                      {"log2_derivative", n.derivative.log2()},
                      {"log2_accumulated", n.accumulated.log2()},
                      {"residual", n.residual}};
            out << j.dump() << '\n';
        }
    }
    return out.str();
}

inline std::string pressure_csv(const PressureCurve& pc) {
    std::ostringstream out;
    out << "t,log2_S,P,ceiling\n";
    char buf[160];
    for (std::size_t i = 0; i < pc.t_values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", pc.t_values[i], pc.sums[i].log2(),
                      pc.pressures[i], pc.ceilings[i]);
        out << buf;
    }
    return out.str();
}

inline std::string verdict_csv(const LogPolarWindow& w, int nr, int ntheta, const std::vector<Verdict>& grid) {
    std::ostringstream out;
    out << "row,col,log2_r,theta,verdict\n";
    char buf[160];
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < ntheta; ++j) {
            const double lr = w.log2_r_lo + (w.log2_r_hi - w.log2_r_lo) * (i + 0.5) / nr;
            const double th = w.theta_lo + (w.theta_hi - w.theta_lo) * (j + 0.5) / ntheta;
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%d\n", i, j, lr, th,
                          static_cast<int>(grid[static_cast<std::size_t>(i) * ntheta + j]));
            out << buf;
        }
    }
    return out.str();
}

struct Rgb {
    std::uint8_t r, g, b;
};

inline Rgb verdict_color(Verdict v) {
    switch (v) {
        case Verdict::BoundedWitness: return {232, 176, 36};
        case Verdict::EscapeCertified: return {28, 58, 138};
        case Verdict::Undecided: return {196, 196, 196};
    }
    return {0, 0, 0};
}

inline Rgb region_color(const RegionIndex& r) {
    if (r.is_beyond()) return {0, 0, 0};
    const auto shade = static_cast<std::uint8_t>(std::max(60, 220 - 30 * r.k));
    if (r.is_annulus()) return {40, shade, 70};
    return {shade, 60, static_cast<std::uint8_t>(shade / 2 + 80)};
}

/// Binary P6 pixmap; image row 0 is the lowest log-radius, column 0 is theta_lo.
template <class Cell, class Color>
std::string pixmap(int nr, int ntheta, const std::vector<Cell>& cells, Color color) {
    std::string out = "P6\n" + std::to_string(ntheta) + " " + std::to_string(nr) + "\n255\n";
    out.reserve(out.size() + cells.size() * 3);
    for (const auto& c : cells) {
        const Rgb px = color(c);
        out.push_back(static_cast<char>(px.r));
        out.push_back(static_cast<char>(px.g));
        out.push_back(static_cast<char>(px.b));
    }
    return out;
}

}  // namespace repeller::io
