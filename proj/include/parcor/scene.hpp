#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parcor/surface.hpp"

// Scene configuration and the surface zoo.
//
// A scene file is nested-section key/value text: sections in braces, one
// `key = value` per entry, numbers in decimal, booleans true/false, arrays
// bracketed.  One file describes one scene.  See the README for the schema.

namespace parcor {

// ---------------------------------------------------------------------------
// Config tree.

struct ConfigNode {
    std::map<std::string, std::string> values;
    std::map<std::string, std::vector<double>> arrays;
    std::map<std::string, ConfigNode> sections;

    bool has(const std::string& k) const { return values.count(k) > 0; }

    std::string str(const std::string& k, const std::string& dflt = "") const {
        auto it = values.find(k);
        return it == values.end() ? dflt : it->second;
    }
    double num(const std::string& k, std::optional<double> dflt = std::nullopt) const {
        auto it = values.find(k);
        if (it == values.end()) {
            if (dflt) return *dflt;
            throw std::runtime_error("config: missing required key '" + k + "'");
        }
        try {
            return std::stod(it->second);
        } catch (...) {
            throw std::runtime_error("config: key '" + k + "' is not a number: " + it->second);
        }
    }
    long integer(const std::string& k, std::optional<long> dflt = std::nullopt) const {
        if (!has(k) && dflt) return *dflt;
        double v = num(k);
        return std::lround(v);
    }
    bool flag(const std::string& k, bool dflt) const {
        auto it = values.find(k);
        if (it == values.end()) return dflt;
        if (it->second == "true") return true;
        if (it->second == "false") return false;
        throw std::runtime_error("config: key '" + k + "' must be true or false");
    }
    const ConfigNode& section(const std::string& k) const {
        auto it = sections.find(k);
        if (it == sections.end()) {
            static const ConfigNode empty;
            return empty;
        }
        return it->second;
    }
    std::vector<double> array(const std::string& k, std::vector<double> dflt = {}) const {
        auto it = arrays.find(k);
        return it == arrays.end() ? dflt : it->second;
    }
};

namespace detail {

struct ConfigLexer {
    std::string src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size()) {
            if (std::isspace(static_cast<unsigned char>(src[pos]))) {
                ++pos;
            } else if (src[pos] == '#') {
                while (pos < src.size() && src[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }
    bool eof() {
        skip_ws();
        return pos >= src.size();
    }
    char peek() {
        skip_ws();
        return src[pos];
    }
    char take() {
        skip_ws();
        return src[pos++];
    }
    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) &&
               src[pos] != '{' && src[pos] != '}' && src[pos] != '=' && src[pos] != '[' &&
               src[pos] != ']' && src[pos] != ',' && src[pos] != '#')
            ++pos;
        if (start == pos) throw std::runtime_error("config: parse error near offset " + std::to_string(pos));
        return src.substr(start, pos - start);
    }
};

inline void parse_section(ConfigLexer& lx, ConfigNode& node) {
    while (!lx.eof()) {
        if (lx.peek() == '}') {
            lx.take();
            return;
        }
        std::string key = lx.word();
        char c = lx.peek();
        if (c == '{') {
            lx.take();
            parse_section(lx, node.sections[key]);
        } else if (c == '=') {
            lx.take();
            if (lx.peek() == '[') {
                lx.take();
                std::vector<double> arr;
                while (lx.peek() != ']') {
                    if (lx.peek() == ',') {
                        lx.take();
                        continue;
                    }
                    arr.push_back(std::stod(lx.word()));
                }
                lx.take();
                node.arrays[key] = std::move(arr);
            } else {
                node.values[key] = lx.word();
            }
        } else {
            throw std::runtime_error("config: expected '=' or '{' after '" + key + "'");
        }
    }
}

}  // namespace detail

inline ConfigNode parse_config(const std::string& text) {
    detail::ConfigLexer lx{text, 0};
    ConfigNode root;
    while (!lx.eof()) {
        if (lx.peek() == '}') throw std::runtime_error("config: unmatched '}'");
        std::string key = lx.word();
        char c = lx.peek();
        if (c == '{') {
            lx.take();
            detail::parse_section(lx, root.sections[key]);
        } else if (c == '=') {
            lx.take();
            if (lx.peek() == '[') {
                lx.take();
                std::vector<double> arr;
                while (lx.peek() != ']') {
                    if (lx.peek() == ',') {
                        lx.take();
                        continue;
                    }
                    arr.push_back(std::stod(lx.word()));
                }
                lx.take();
                root.arrays[key] = std::move(arr);
            } else {
                root.values[key] = lx.word();
            }
        } else {
            throw std::runtime_error("config: expected '=' or '{' after '" + key + "'");
        }
    }
    return root;
}

inline ConfigNode parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Surface zoo.

struct ZooParams {
    double b = 0.2;        // amplitude / slope
    double freq = 1.0;     // spatial frequency for smooth-graph
    long J = 4;            // lacunary octave count
    double alpha = 0.5;    // lacunary per-octave amplitude ratio
    long depth = 4;        // cantor depth
    std::string path;      // point-cloud file
};

inline const std::vector<std::string>& zoo_names() {
    static const std::vector<std::string> names = {
        "hyperplane", "tilted-plane", "smooth-graph", "crease",
        "lacunary-time", "cantor-parabolic", "point-cloud"};
    return names;
}

// Load a point cloud: first line "n = <dim>", then one sample per line,
// "x_0 ... x_{n-1} t weight".
inline PointSet load_point_cloud(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("point-cloud: cannot open " + path);
    std::string header;
    std::getline(in, header);
    int n = 0;
    {
        std::string tmp;
        for (char c : header)
            if (std::isdigit(static_cast<unsigned char>(c))) tmp += c;
        if (tmp.empty()) throw std::runtime_error("point-cloud: bad header, expected 'n = <dim>'");
        n = std::stoi(tmp);
    }
    if (n < 1 || n > kMaxSpatialDim) throw std::runtime_error("point-cloud: dimension out of range");
    PointSet ps;
    ps.n = n;
    double x;
    std::vector<double> row;
    while (in >> x) {
        row.push_back(x);
        if (int(row.size()) == n + 2) {
            SpaceTimePoint p{Vec(n), row[std::size_t(n)]};
            for (int a = 0; a < n; ++a) p.x[a] = row[std::size_t(a)];
            ps.push(p, row[std::size_t(n) + 1]);
            row.clear();
        }
    }
    if (!row.empty()) throw std::runtime_error("point-cloud: trailing partial row");
    return ps;
}

// The parabolic four-corner Cantor cloud in R^1 x R: each parabolic box
// (spatial side L, time side L^2) is replaced by four children with spatial
// side L/2 and time side L^2/4, staggered so no t-independent line tracks
// the set.  Homogeneous dimension n+1 = 2, so the construction is ADR with
// per-scale separation halving parabolically.
inline PointSet cantor_parabolic_cloud(long depth) {
    struct Box {
        double x, t, L;  // corner + spatial side; time side = L^2
    };
    std::vector<Box> boxes = {{0.0, 0.0, 1.0}};
    static const int kPattern[4][2] = {{0, 0}, {1, 1}, {0, 2}, {1, 3}};
    for (long d = 0; d < depth; ++d) {
        std::vector<Box> next;
        next.reserve(boxes.size() * 4);
        for (const Box& b : boxes) {
            double L = b.L / 2, T = L * L;
            for (auto& sq : kPattern)
                next.push_back({b.x + sq[0] * L, b.t + sq[1] * T, L});
        }
        boxes.swap(next);
    }
    PointSet ps;
    ps.n = 1;
    double w = 1.0 / double(boxes.size());
    for (const Box& b : boxes) {
        SpaceTimePoint p{Vec(1), b.t + b.L * b.L / 2};
        p.x[0] = b.x + b.L / 2;
        ps.push(p, w);
    }
    return ps;
}

inline Surface surface_zoo(const std::string& name, int n, const ParabolicCylinder& window,
                           double resolution, const ZooParams& prm = {}) {
    auto need_lateral = [&](const char* who) {
        if (n < 2)
            throw std::invalid_argument(std::string(who) + " needs ambient dimension n >= 2");
    };
    if (name == "hyperplane") {
        Surface s = Surface::analytic_graph(
            n, [](const Vec&, double) { return 0.0; }, window, resolution, 0.0, 0.0);
        s.set_affine(Vec(n - 1), 0.0);
        return s;
    }
    if (name == "tilted-plane") {
        need_lateral("tilted-plane");
        double b = prm.b;
        Surface s = Surface::analytic_graph(
            n, [b](const Vec& u, double) { return b * u[0]; }, window, resolution, std::abs(b), 0.0);
        Vec g(n - 1);
        g[0] = b;
        s.set_affine(g, 0.0);
        return s;
    }
    if (name == "smooth-graph") {
        need_lateral("smooth-graph");
        double b = prm.b, f = prm.freq;
        return Surface::analytic_graph(
            n, [b, f](const Vec& u, double) { return b * std::sin(f * u[0]); }, window, resolution,
            std::abs(b * f), 0.0);
    }
    if (name == "crease") {
        need_lateral("crease");
        double b = prm.b;
        return Surface::analytic_graph(
            n, [b](const Vec& u, double) { return b * std::abs(u[0]); }, window, resolution,
            std::abs(b), 0.0);
    }
    if (name == "lacunary-time") {
        long J = prm.J;
        double alpha = prm.alpha;
        double lip_t = 0;
        for (long j = 1; j <= J; ++j) lip_t += std::pow(alpha, double(j)) * std::pow(2.0, double(j));
        auto psi = [J, alpha](const Vec&, double t) {
            double s = 0, a = 1;
            double w = 1;
            for (long j = 1; j <= J; ++j) {
                a *= alpha;
                w *= 4;
                s += a * std::cos(w * t);
            }
            return s;
        };
        return Surface::analytic_graph(n, psi, window, resolution, 0.0, lip_t);
    }
    if (name == "cantor-parabolic") {
        PointSet ps = cantor_parabolic_cloud(prm.depth);
        double spacing = std::pow(0.5, double(prm.depth));
        SpaceTimePoint c{Vec{0.5}, 0.5};
        return Surface::point_cloud(std::move(ps), ParabolicCylinder(c, 0.75), spacing);
    }
    if (name == "point-cloud") {
        PointSet ps = load_point_cloud(prm.path);
        return Surface::point_cloud(std::move(ps), window, resolution);
    }
    std::string all;
    for (const auto& z : zoo_names()) all += (all.empty() ? "" : ", ") + z;
    throw std::invalid_argument("unknown surface '" + name + "'; the zoo has: " + all);
}

// ---------------------------------------------------------------------------
// SceneConfig: everything a pipeline run needs.

struct MonteCarloConfig {
    long paths = 100000;
    double dt_divisor = 400;  // dt = delta(pole)^2 / dt_divisor
    double horizon_factor = 10;
    uint64_t seed = 0;
    bool seed_set = false;
};

struct AnalysisConfig {
    long generations = 5;
    double epsilon = 0.05;
    double k0 = 4;
    double theta = 0.1;
    double xi = 0.25;
    double tau = 1.0 / 16;
    double dilation = 2;  // Carleson A
    long L = 1;
    long anchor_descent = 2;     // N_0
    double anchor_height = 2.0;  // pole height / diam(Q_0)
    double anchor_lag = 2.0;     // pole lag / diam(Q_0)^2
    double cls_height = 8.0;     // classification pole height / diam(Q_0)
    double cls_lag = 1500.0;     // classification pole lag / diam(Q_0)^2
    long cls_paths = 1500;       // adjoint paths per field evaluation
    long corona_depth = 3;       // tree depth below the anchor cube
    long maximal_window = 3;     // dyadic dilates in the maximal-function proxy
};

struct SceneConfig {
    std::string surface_name = "hyperplane";
    int n = 2;
    double resolution = 0.01;
    ParabolicCylinder window{SpaceTimePoint{Vec{0, 0}, 0}, 1.0};
    ZooParams zoo;
    AnalysisConfig analysis;
    MonteCarloConfig mc;
    std::string out_dir = "out";
    int threads = 1;

    Surface make_surface() const { return surface_zoo(surface_name, n, window, resolution, zoo); }
};

inline SceneConfig scene_config_from(const ConfigNode& root) {
    SceneConfig sc;
    const ConfigNode& scene = root.section("scene");
    sc.surface_name = scene.str("surface", "hyperplane");
    sc.n = int(scene.integer("n", 2));
    if (sc.n < 1 || sc.n > kMaxSpatialDim)
        throw std::runtime_error("config: scene.n out of range [1," + std::to_string(kMaxSpatialDim) + "]");
    sc.resolution = scene.num("resolution", 0.01);
    if (!(sc.resolution > 0)) throw std::runtime_error("config: scene.resolution must be > 0");
    const ConfigNode& w = scene.section("window");
    std::vector<double> c = w.array("center", std::vector<double>(std::size_t(sc.n), 0.0));
    if (int(c.size()) != sc.n) throw std::runtime_error("config: window.center length != n");
    SpaceTimePoint wc{Vec(sc.n), w.num("time", 0.0)};
    for (int a = 0; a < sc.n; ++a) wc.x[a] = c[std::size_t(a)];
    sc.window = ParabolicCylinder(wc, w.num("radius", 1.0));
    const ConfigNode& p = scene.section("params");
    sc.zoo.b = p.num("b", 0.2);
    sc.zoo.freq = p.num("freq", 1.0);
    sc.zoo.J = p.integer("octaves", 4);
    sc.zoo.alpha = p.num("alpha", 0.5);
    sc.zoo.depth = p.integer("depth", 4);
    sc.zoo.path = p.str("path");

    const ConfigNode& an = root.section("analysis");
    auto& A = sc.analysis;
    A.generations = an.integer("generations", 5);
    A.epsilon = an.num("epsilon", 0.05);
    A.k0 = an.num("k0", 4);
    A.theta = an.num("theta", 0.1);
    A.xi = an.num("xi", 0.25);
    A.tau = an.num("tau", 1.0 / 16);
    A.dilation = an.num("dilation", 2);
    A.L = an.integer("levels", 1);
    A.anchor_descent = an.integer("anchor_descent", 2);
    A.anchor_height = an.num("anchor_height", 2.0);
    A.anchor_lag = an.num("anchor_lag", 2.0);
    A.cls_height = an.num("cls_height", 8.0);
    A.cls_lag = an.num("cls_lag", 1500.0);
    A.cls_paths = an.integer("cls_paths", 1500);
    A.corona_depth = an.integer("corona_depth", 3);
    A.maximal_window = an.integer("maximal_window", 3);
    if (!(A.epsilon > 0 && A.epsilon < 1)) throw std::runtime_error("config: epsilon must be in (0,1)");
    if (!(A.k0 >= 1)) throw std::runtime_error("config: k0 must be >= 1");
    if (!(A.theta > 0 && A.theta < 1)) throw std::runtime_error("config: theta must be in (0,1)");
    if (A.generations < 1 || A.generations > 24)
        throw std::runtime_error("config: generations out of range [1,24]");

    const ConfigNode& mc = root.section("mc");
    sc.mc.paths = mc.integer("paths", 100000);
    sc.mc.dt_divisor = mc.num("dt_divisor", 400);
    sc.mc.horizon_factor = mc.num("horizon_factor", 10);
    if (mc.has("seed")) {
        sc.mc.seed = uint64_t(mc.integer("seed"));
        sc.mc.seed_set = true;
    }
    if (!sc.mc.seed_set) throw std::runtime_error("config: mc.seed is mandatory");

    sc.out_dir = root.section("output").str("dir", "out");
    sc.threads = int(root.integer("threads", 1));
    return sc;
}

}  // namespace parcor
