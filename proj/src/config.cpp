#include "oulevy/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace oulevy {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

const ojson& require(const ojson& obj, const std::string& key,
                     const std::string& ctx) {
    if (!obj.is_object()) bad(ctx + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) bad("missing key: " + ctx + "." + key);
    return *it;
}

double to_num(const ojson& v, const std::string& ctx) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        double out = 0.0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        auto [p, ec] = std::from_chars(b, e, out);
        if (ec != std::errc{} || p != e) bad(ctx + ": not a number: \"" + s + "\"");
        return out;
    }
    bad(ctx + ": expected a number or decimal string");
}

long to_long(const ojson& v, const std::string& ctx) {
    double d = to_num(v, ctx);
    long l = static_cast<long>(d);
    if (static_cast<double>(l) != d) bad(ctx + ": expected an integer");
    return l;
}

std::uint64_t to_u64(const ojson& v, const std::string& ctx) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        std::uint64_t out = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || p != s.data() + s.size())
            bad(ctx + ": not an unsigned integer: \"" + s + "\"");
        return out;
    }
    bad(ctx + ": expected an unsigned integer or decimal string");
}

Eigen::VectorXd to_vector(const ojson& v, int dim, const std::string& ctx) {
    if (!v.is_array()) bad(ctx + ": expected an array");
    if (dim >= 0 && static_cast<int>(v.size()) != dim)
        bad(ctx + ": expected " + std::to_string(dim) + " entries, got " +
            std::to_string(v.size()));
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) =
            to_num(v[i], ctx + "[" + std::to_string(i) + "]");
    return out;
}

Eigen::MatrixXd to_matrix(const ojson& v, int dim, const std::string& ctx) {
    if (!v.is_array() || v.empty()) bad(ctx + ": expected an array of rows");
    const std::size_t rows = v.size();
    if (!v[0].is_array() || v[0].empty())
        bad(ctx + ": rows must be non-empty arrays");
    const std::size_t cols = v[0].size();
    if (dim >= 0 &&
        (rows != static_cast<std::size_t>(dim) || cols != static_cast<std::size_t>(dim)))
        bad(ctx + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
            " matrix");
    Eigen::MatrixXd out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string rctx = ctx + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != cols)
            bad(rctx + ": ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                to_num(v[i][j], rctx + "[" + std::to_string(j) + "]");
    }
    return out;
}

template <class M, class Reader>
FourierSeries<M> to_series(const ojson& v, double period, const std::string& ctx,
                           Reader read_one, const M& zero) {
    FourierSeries<M> s;
    s.period = period;
    s.constant = read_one(require(v, "constant", ctx), ctx + ".constant");
    auto read_list = [&](const char* key, std::vector<M>& out) {
        auto it = v.find(key);
        if (it == v.end()) return;
        if (!it->is_array()) bad(ctx + "." + key + ": expected an array");
        for (std::size_t k = 0; k < it->size(); ++k)
            out.push_back(read_one((*it)[k], ctx + "." + key + "[" +
                                                 std::to_string(k) + "]"));
    };
    read_list("cos", s.cos_coeffs);
    read_list("sin", s.sin_coeffs);
    // Evaluation walks both lists in lockstep; pad the shorter with zeros.
    while (s.cos_coeffs.size() < s.sin_coeffs.size()) s.cos_coeffs.push_back(zero);
    while (s.sin_coeffs.size() < s.cos_coeffs.size()) s.sin_coeffs.push_back(zero);
    return s;
}

JumpMeasureSpec to_jumps(const ojson& v, int dim, const std::string& ctx) {
    JumpMeasureSpec spec;
    if (v.is_null()) return spec;
    const std::string type = require(v, "type", ctx).get<std::string>();
    if (auto it = v.find("quadrature_nodes"); it != v.end())
        spec.quadrature_nodes = static_cast<int>(to_long(*it, ctx + ".quadrature_nodes"));
    if (type == "none") return spec;
    if (type == "atoms") {
        AtomList list;
        const ojson& arr = require(v, "atoms", ctx);
        if (!arr.is_array() || arr.empty())
            bad(ctx + ".atoms: expected a non-empty array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string actx = ctx + ".atoms[" + std::to_string(i) + "]";
            Atom a;
            a.location = to_vector(require(arr[i], "location", actx), dim,
                                   actx + ".location");
            a.intensity = to_num(require(arr[i], "intensity", actx),
                                 actx + ".intensity");
            list.atoms.push_back(std::move(a));
        }
        spec.measure = std::move(list);
        return spec;
    }
    if (type == "power_law") {
        PowerLawDensity pl;
        pl.c = to_num(require(v, "c", ctx), ctx + ".c");
        pl.alpha = to_num(require(v, "alpha", ctx), ctx + ".alpha");
        pl.r_max = to_num(require(v, "r_max", ctx), ctx + ".r_max");
        spec.measure = pl;
        return spec;
    }
    bad(ctx + ".type: unknown jump type \"" + type + "\"");
}

ojson num_js(double v) { return ojson(format_number(v)); }

ojson vector_js(const Eigen::VectorXd& v) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num_js(v(i)));
    return out;
}

ojson matrix_js(const Eigen::MatrixXd& m) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ojson row = ojson::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num_js(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

template <class M, class Writer>
ojson series_js(const FourierSeries<M>& s, Writer write_one) {
    ojson out;
    out["constant"] = write_one(s.constant);
    if (!s.cos_coeffs.empty()) {
        ojson cos = ojson::array(), sin = ojson::array();
        for (const M& c : s.cos_coeffs) cos.push_back(write_one(c));
        for (const M& c : s.sin_coeffs) sin.push_back(write_one(c));
        out["cos"] = std::move(cos);
        out["sin"] = std::move(sin);
    }
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

ScenarioConfig parse_config_text(const std::string& text) {
    ojson root;
    try {
        root = ojson::parse(text);
    } catch (const std::exception& e) {
        bad(std::string("json parse failure: ") + e.what());
    }
    if (!root.is_object()) bad("top level: expected an object");

    ScenarioConfig cfg;
    cfg.dimension = static_cast<int>(to_long(require(root, "dimension", "config"),
                                             "config.dimension"));
    if (cfg.dimension <= 0) bad("config.dimension: must be positive");
    cfg.period = to_num(require(root, "period", "config"), "config.period");
    if (!(cfg.period > 0.0)) bad("config.period: must be positive");

    const int d = cfg.dimension;
    const Eigen::MatrixXd mzero = Eigen::MatrixXd::Zero(d, d);
    const Eigen::VectorXd vzero = Eigen::VectorXd::Zero(d);
    auto read_mat = [d](const ojson& v, const std::string& ctx) {
        return to_matrix(v, d, ctx);
    };
    auto read_vec = [d](const ojson& v, const std::string& ctx) {
        return to_vector(v, d, ctx);
    };

    const ojson& co = require(root, "coefficients", "config");
    cfg.A = to_series<Eigen::MatrixXd>(require(co, "A", "coefficients"), cfg.period,
                                       "coefficients.A", read_mat, mzero);
    cfg.f = to_series<Eigen::VectorXd>(require(co, "f", "coefficients"), cfg.period,
                                       "coefficients.f", read_vec, vzero);
    cfg.B = to_series<Eigen::MatrixXd>(require(co, "B", "coefficients"), cfg.period,
                                       "coefficients.B", read_mat, mzero);

    const ojson& no = require(root, "noise", "config");
    cfg.noise_drift = to_vector(require(no, "drift", "noise"), d, "noise.drift");
    cfg.noise_covariance =
        to_matrix(require(no, "covariance", "noise"), d, "noise.covariance");
    if (auto it = no.find("jumps"); it != no.end())
        cfg.jumps = to_jumps(*it, d, "noise.jumps");

    if (auto it = root.find("tolerances"); it != root.end()) {
        const ojson& to = *it;
        if (auto f = to.find("ode_tol"); f != to.end())
            cfg.tols.ode_tol = to_num(*f, "tolerances.ode_tol");
        if (auto f = to.find("quad_tol"); f != to.end())
            cfg.tols.quad_tol = to_num(*f, "tolerances.quad_tol");
        if (auto f = to.find("tail_tol"); f != to.end())
            cfg.tols.tail_tol = to_num(*f, "tolerances.tail_tol");
    }
    if (!(cfg.tols.ode_tol > 0.0) || !(cfg.tols.quad_tol > 0.0) ||
        !(cfg.tols.tail_tol > 0.0))
        bad("tolerances: all tolerances must be positive");

    cfg.master_seed = to_u64(require(root, "master_seed", "config"),
                             "config.master_seed");
    if (auto it = root.find("output_dir"); it != root.end()) {
        if (!it->is_string()) bad("config.output_dir: expected a string");
        cfg.output_dir = it->get<std::string>();
    }

    if (auto it = root.find("constants"); it != root.end()) {
        if (auto f = it->find("c1_bound"); f != it->end())
            cfg.c1_bound = to_num(*f, "constants.c1_bound");
        if (auto f = it->find("c2_bound"); f != it->end())
            cfg.c2_bound = to_num(*f, "constants.c2_bound");
    }

    if (auto it = root.find("simulation"); it != root.end()) {
        SimulationBlock sim;
        sim.s = to_num(require(*it, "s", "simulation"), "simulation.s");
        sim.t = to_num(require(*it, "t", "simulation"), "simulation.t");
        sim.x0 = to_vector(require(*it, "x0", "simulation"), d, "simulation.x0");
        sim.dt = to_num(require(*it, "dt", "simulation"), "simulation.dt");
        sim.paths = to_long(require(*it, "paths", "simulation"), "simulation.paths");
        if (!(sim.dt > 0.0)) bad("simulation.dt: must be positive");
        if (sim.paths <= 0) bad("simulation.paths: must be positive");
        cfg.simulation = std::move(sim);
    }
    return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    ojson root;
    root["dimension"] = std::to_string(cfg.dimension);
    root["period"] = num_js(cfg.period);

    ojson co;
    co["A"] = series_js(cfg.A, matrix_js);
    co["f"] = series_js(cfg.f, vector_js);
    co["B"] = series_js(cfg.B, matrix_js);
    root["coefficients"] = std::move(co);

    ojson no;
    no["drift"] = vector_js(cfg.noise_drift);
    no["covariance"] = matrix_js(cfg.noise_covariance);
    ojson jm;
    if (cfg.jumps.empty()) {
        jm["type"] = "none";
    } else if (const AtomList* list = cfg.jumps.atoms()) {
        jm["type"] = "atoms";
        ojson arr = ojson::array();
        for (const Atom& a : list->atoms) {
            ojson aj;
            aj["location"] = vector_js(a.location);
            aj["intensity"] = num_js(a.intensity);
            arr.push_back(std::move(aj));
        }
        jm["atoms"] = std::move(arr);
    } else if (const PowerLawDensity* pl = cfg.jumps.power_law()) {
        jm["type"] = "power_law";
        jm["c"] = num_js(pl->c);
        jm["alpha"] = num_js(pl->alpha);
        jm["r_max"] = num_js(pl->r_max);
    }
    jm["quadrature_nodes"] = std::to_string(cfg.jumps.quadrature_nodes);
    no["jumps"] = std::move(jm);
    root["noise"] = std::move(no);

    ojson to;
    to["ode_tol"] = num_js(cfg.tols.ode_tol);
    to["quad_tol"] = num_js(cfg.tols.quad_tol);
    to["tail_tol"] = num_js(cfg.tols.tail_tol);
    root["tolerances"] = std::move(to);

    root["master_seed"] = std::to_string(cfg.master_seed);
    root["output_dir"] = cfg.output_dir;

    if (cfg.c1_bound || cfg.c2_bound) {
        ojson cs;
        if (cfg.c1_bound) cs["c1_bound"] = num_js(*cfg.c1_bound);
        if (cfg.c2_bound) cs["c2_bound"] = num_js(*cfg.c2_bound);
        root["constants"] = std::move(cs);
    }

    if (cfg.simulation) {
        const SimulationBlock& sim = *cfg.simulation;
        ojson sj;
        sj["s"] = num_js(sim.s);
        sj["t"] = num_js(sim.t);
        sj["x0"] = vector_js(sim.x0);
        sj["dt"] = num_js(sim.dt);
        sj["paths"] = std::to_string(sim.paths);
        root["simulation"] = std::move(sj);
    }
    return root.dump(2) + "\n";
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
    const std::string bytes = serialize_config(cfg);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    PeriodicCoefficients coeffs;
    coeffs.period = cfg.period;
    coeffs.A = cfg.A;
    coeffs.f = cfg.f;
    coeffs.B = cfg.B;
    if (coeffs.dimension() != cfg.dimension)
        throw std::invalid_argument("coefficients.A shape disagrees with dimension");

    LevyTriple noise;
    noise.drift = cfg.noise_drift;
    noise.covariance = cfg.noise_covariance;
    noise.jumps = cfg.jumps;
    return make_scenario(std::move(coeffs), std::move(noise), cfg.master_seed,
                         cfg.tols);
}

}  // namespace oulevy
