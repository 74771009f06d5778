#include "boxtimes/json_io.hpp"
#include "boxtimes/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

using namespace boxtimes;
using nlohmann::json;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRegion = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string csv_path;
    std::string mode = "float";
    double tol = -1;
    int order = -1;
    unsigned long long seed = 1;
};

json load_config(const CommonOpts& o) {
    if (o.config_path.empty()) return json::object();
    return load_json_file(o.config_path);
}

template <typename T>
T cfg_get(const json& cfg, const std::string& key, T fallback) {
    if (cfg.contains(key)) return cfg.at(key).get<T>();
    return fallback;
}

std::vector<Rational> parse_momenta(const std::string& s, size_t expect) {
    std::vector<Rational> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
    if (out.size() != expect)
        throw ConfigError("expected " + std::to_string(expect) + " momenta, got '" + s + "'");
    return out;
}

std::vector<double> parse_reals(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

Complex json_complex(const json& j) {
    return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

void emit(const CommonOpts& o, const json& report) {
    if (!o.out_path.empty())
        write_json_file(o.out_path, report);
    else
        std::cout << report.dump(2) << '\n';
}

PipelineConfig pipeline_config(const json& cfg, const CommonOpts& o) {
    PipelineConfig pc;
    pc.grade_cutoff = cfg_get(cfg, "G_max", pc.grade_cutoff);
    pc.series_order = o.order > 0 ? o.order : cfg_get(cfg, "M_max", pc.series_order);
    pc.coeff_order = cfg_get(cfg, "coeff_order", pc.coeff_order);
    pc.n_cap = cfg_get(cfg, "N", pc.n_cap);
    pc.enlarge_basis = cfg_get(cfg, "enlarge_basis", pc.enlarge_basis);
    if (cfg.contains("tolerances")) {
        const json& t = cfg.at("tolerances");
        pc.tol_connection = cfg_get(t, "connection", pc.tol_connection);
        pc.eig_cluster_tol = cfg_get(t, "eig_cluster", pc.eig_cluster_tol);
        pc.rank_tol = cfg_get(t, "rank", pc.rank_tol);
        pc.tol_check = cfg_get(t, "check", pc.tol_check);
    }
    if (o.tol > 0) pc.tol_check = o.tol;
    return pc;
}

std::shared_ptr<const FockTriple> triple_from_config(const json& mod_cfg, int fallback_cutoff) {
    if (!mod_cfg.contains("modules") || mod_cfg.at("modules").size() != 3)
        throw ConfigError("module config needs a 'modules' list with three fock entries");
    std::vector<Rational> mom;
    int cutoff = fallback_cutoff;
    for (const json& m : mod_cfg.at("modules")) {
        if (m.at("type").get<std::string>() != "fock")
            throw ConfigError("unsupported module type (only 'fock')");
        mom.push_back(parse_rational(m.at("momentum").get<std::string>()));
        cutoff = cfg_get(m, "grade_cutoff", cutoff);
    }
    return std::make_shared<const FockTriple>(mom[0], mom[1], mom[2], cutoff);
}

int run_series_eval(const CommonOpts& o, const std::string& input, const std::string& at) {
    json j = load_json_file(input);
    LogPowerSeries s = series_from_json(j);
    std::vector<double> pt = parse_reals(at);
    if (pt.empty() || pt.size() > 2) throw ConfigError("--at expects re[,im]");
    Complex z(pt[0], pt.size() > 1 ? pt[1] : 0.0);
    EvalResult r = s.eval(z);
    emit(o, json{{"value", json::array({r.value.real(), r.value.imag()})},
                 {"tail_bound", r.tail_bound}});
    return 0;
}

int run_fuchsian_solve(const CommonOpts& o, const std::string& input, int order) {
    json j = load_json_file(input);
    MatrixSeries a = system_from_json(j);
    SpectralOptions opt;
    opt.prefer_exact = o.mode != "float";
    FundamentalSolutionSet f = fuchsian_solve(a, order > 0 ? order : a.order(), opt);
    double res = residual(a, f);
    json out = solution_to_json(f);
    out["residual"] = res;
    emit(o, out);
    return 0;
}

int run_reduce(const CommonOpts& o, const std::string& mod_path, const std::string& quad_path,
               const std::string& flavor_name, int n_cap) {
    json cfg = load_config(o);
    json mod_cfg = load_json_file(mod_path);
    auto triple = triple_from_config(mod_cfg, cfg_get(cfg, "G_max", 12));
    BasisQuadruple q = quadruple_from_json(load_json_file(quad_path));
    if (q.tg > n_cap) throw ConfigError("quadruple dual grade exceeds N");
    Flavor flavor = flavor_name == "y" ? Flavor::y_norm : Flavor::xmy_norm;
    Rewriter rw(triple, cfg_get(cfg, "coeff_order", 64));
    const LinearCombination& lc = rw.reduce_to_basis(q, flavor);
    emit(o, combination_to_json(lc));
    return 0;
}

int run_connection_matrix(const CommonOpts& o, const std::string& mod_path,
                          const std::string& flavor_name, const std::string& basepoint,
                          int n_cap, int order) {
    json cfg = load_config(o);
    json mod_cfg = load_json_file(mod_path);
    auto triple = triple_from_config(mod_cfg, cfg_get(cfg, "G_max", 12));
    Flavor flavor = flavor_name == "y" ? Flavor::y_norm : Flavor::xmy_norm;
    Rewriter rw(triple, cfg_get(cfg, "coeff_order", 64));
    QuadBasis basis = default_quad_basis(*triple, n_cap, cfg_get(cfg, "enlarge_basis", true));
    Scalar bp(parse_rational(basepoint));
    if (o.mode == "float") bp = Scalar(bp.approx());
    MatrixSeries lambda = rw.connection_matrix(basis, flavor, bp, order);
    emit(o, system_to_json(lambda));
    return 0;
}

void write_assoc_csv(const std::string& path, const AssocReport& r) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "x_re,x_im,y_re,y_im,f_pipeline_re,f_pipeline_im,f_direct_re,f_direct_im,"
           "f_closed_re,f_closed_im,rel_dev_sides,rel_dev_closed\n";
    for (const AssocPoint& p : r.points) {
        out << p.x.real() << ',' << p.x.imag() << ',' << p.y.real() << ',' << p.y.imag()
            << ',' << p.f_pipeline.real() << ',' << p.f_pipeline.imag() << ','
            << p.f_direct.real() << ',' << p.f_direct.imag() << ',' << p.f_closed.real()
            << ',' << p.f_closed.imag() << ',' << p.rel_dev_sides << ',' << p.rel_dev_closed
            << '\n';
    }
}

std::vector<std::pair<Complex, Complex>> sample_points_near(Complex x0, Complex y0, int n,
                                                            unsigned long long seed) {
    // rational-grid perturbations keep the connection matrices exactly
    // representable; all points are validated against D^2
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-35, 35);
    std::vector<std::pair<Complex, Complex>> pts;
    pts.push_back({x0, y0});
    while (int(pts.size()) < n) {
        Complex dx(num(rng) / 100.0, num(rng) / 200.0);
        Complex dy(num(rng) / 100.0, num(rng) / 200.0);
        Complex x = x0 + dx, y = y0 + dy;
        if (in_d2(x, y)) pts.push_back({x, y});
    }
    return pts;
}

int run_assoc_check(const CommonOpts& o, const std::string& momenta,
                    const std::string& points_path, int num_points) {
    json cfg = load_config(o);
    auto m = parse_momenta(momenta, 3);
    PipelineConfig pc = pipeline_config(cfg, o);
    std::vector<std::pair<Complex, Complex>> pts;
    if (!points_path.empty()) {
        json pj = load_json_file(points_path);
        for (const json& p : pj) pts.push_back({json_complex(p.at(0)), json_complex(p.at(1))});
        if (pts.empty()) throw ConfigError("points file contains no points");
    } else {
        pts = sample_points_near(Complex(7, 0), Complex(4, 0), num_points,
                                 cfg_get(cfg, "seed", o.seed));
    }
    for (auto& [x, y] : pts)
        if (!in_d2(x, y)) throw RegionError("point outside D^2");
    AssocReport rep = check_associativity(m[0], m[1], m[2], pts, pc);
    emit(o, assoc_report_to_json(rep));
    if (!o.csv_path.empty()) write_assoc_csv(o.csv_path, rep);
    return rep.pass ? 0 : kExitCheckFailed;
}

int run_pentagon_check(const CommonOpts& o, const std::string& momenta,
                       const std::string& point) {
    json cfg = load_config(o);
    auto m = parse_momenta(momenta, 4);
    std::vector<double> p = parse_reals(point);
    if (p.size() != 3) throw ConfigError("--point expects x,y,z");
    PipelineConfig pc = pipeline_config(cfg, o);
    if (pc.tol_check == 1e-6 && o.tol <= 0) pc.tol_check = 1e-5;
    PentagonReport rep = check_pentagon(m[0], m[1], m[2], m[3], Complex(p[0], 0),
                                        Complex(p[1], 0), Complex(p[2], 0), pc);
    emit(o, pentagon_report_to_json(rep));
    return rep.pass ? 0 : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-numeric engine for log-power series, Fuchsian systems in "
                 "Levelt form, and free-boson fusion correlator checks"};
    app.require_subcommand(1);
    CommonOpts o;
    app.add_option("--config", o.config_path, "JSON run configuration");
    app.add_option("--out", o.out_path, "output path (default: stdout)");
    app.add_option("--csv", o.csv_path, "CSV export for point tables");
    app.add_option("--mode", o.mode, "arithmetic mode: exact|float")
        ->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--tol", o.tol, "override the check tolerance");
    app.add_option("--seed", o.seed, "random seed for sampled points");

    auto* series = app.add_subcommand("series", "series operations");
    auto* series_eval = series->add_subcommand("eval", "evaluate a series at a point");
    std::string series_input, series_at;
    series_eval->add_option("--input", series_input, "series JSON")->required();
    series_eval->add_option("--at", series_at, "evaluation point re[,im]")->required();

    auto* fuchs = app.add_subcommand("fuchsian", "Fuchsian system operations");
    auto* fuchs_solve = fuchs->add_subcommand("solve", "fundamental solution series");
    std::string fuchs_input;
    int fuchs_order = -1;
    fuchs_solve->add_option("--input", fuchs_input, "system JSON")->required();
    fuchs_solve->add_option("--order", fuchs_order, "truncation order");

    auto* reduce = app.add_subcommand("reduce", "reduce a correlator symbol to the basis");
    std::string red_mod, red_quad, red_flavor = "y";
    int red_n = 4;
    reduce->add_option("--module-config", red_mod, "module config JSON")->required();
    reduce->add_option("--quadruple", red_quad, "quadruple JSON")->required();
    reduce->add_option("--flavor", red_flavor, "y|xmy")
        ->check(CLI::IsMember({"y", "xmy"}));
    reduce->add_option("--N", red_n, "dual grade window");

    auto* conn = app.add_subcommand("connection-matrix", "assemble a differential system");
    std::string conn_mod, conn_flavor = "xmy", conn_base = "4";
    int conn_n = 0, conn_order = 24;
    conn->add_option("--module-config", conn_mod, "module config JSON")->required();
    conn->add_option("--flavor", conn_flavor, "y|xmy")->check(CLI::IsMember({"y", "xmy"}));
    conn->add_option("--basepoint", conn_base, "x0 (flavor y) or y0 (flavor xmy), rational");
    conn->add_option("--N", conn_n, "dual grade window");
    conn->add_option("--order", conn_order, "series order");

    auto* assoc = app.add_subcommand("assoc-check", "verify fusion associativity at points");
    std::string assoc_momenta = "1,1,1", assoc_points;
    int assoc_num = 20;
    assoc->add_option("--momenta", assoc_momenta, "a,b,c rationals");
    assoc->add_option("--points", assoc_points, "points JSON [[xr,xi],[yr,yi]]...");
    assoc->add_option("--num-points", assoc_num, "sampled points when none given");

    auto* pent = app.add_subcommand("pentagon-check", "verify the pentagon identity");
    std::string pent_momenta = "1,1,1,1", pent_point = "7,6,4";
    pent->add_option("--momenta", pent_momenta, "a,b,c,d rationals");
    pent->add_option("--point", pent_point, "x,y,z");

    CLI11_PARSE(app, argc, argv);

    try {
        if (series_eval->parsed()) return run_series_eval(o, series_input, series_at);
        if (fuchs_solve->parsed()) return run_fuchsian_solve(o, fuchs_input, fuchs_order);
        if (reduce->parsed()) return run_reduce(o, red_mod, red_quad, red_flavor, red_n);
        if (conn->parsed())
            return run_connection_matrix(o, conn_mod, conn_flavor, conn_base, conn_n,
                                         conn_order);
        if (assoc->parsed()) return run_assoc_check(o, assoc_momenta, assoc_points, assoc_num);
        if (pent->parsed()) return run_pentagon_check(o, pent_momenta, pent_point);
        std::cerr << app.help() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n' << app.help() << '\n';
        return kExitConfig;
    } catch (const RegionError& e) {
        std::cerr << "region violation: " << e.what() << '\n';
        return kExitRegion;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}
