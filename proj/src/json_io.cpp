#include "boxtimes/json_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace boxtimes {

Json scalar_to_json(const Scalar& s) {
    if (s.exact())
        return Json::array({to_string(s.rat().re), to_string(s.rat().im)});
    return Json::array({s.approx().real(), s.approx().imag()});
}

Scalar scalar_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("scalar: expected [re, im]");
    if (j[0].is_string())
        return Scalar(GaussRat(parse_rational(j[0].get<std::string>()),
                               parse_rational(j[1].get<std::string>())));
    return Scalar(Complex(j[0].get<double>(), j[1].get<double>()));
}

Json exponent_to_json(const Exponent& e) {
    if (e.exact) return Json::array({to_string(e.value.re), to_string(e.value.im)});
    return Json::array({e.approx.real(), e.approx.imag()});
}

Exponent exponent_from_json(const Json& j) {
    Scalar s = scalar_from_json(j);
    return Exponent::from_scalar(s);
}

Json series_to_json(const LogPowerSeries& s) {
    Json bases = Json::array();
    for (const Exponent& b : s.exponents().bases()) bases.push_back(exponent_to_json(b));
    Json terms = Json::array();
    for (const auto& [key, v] : s.terms()) {
        auto [bi, m, t] = key;
        Json term = scalar_to_json(v);
        terms.push_back(Json{{"base", bi}, {"offset", m}, {"logpow", t}, {"re", term[0]},
                             {"im", term[1]}});
    }
    return Json{{"variable", s.var()},
                {"bases", bases},
                {"terms", terms},
                {"M_max", s.order()},
                {"K_max", s.log_cap()}};
}

LogPowerSeries series_from_json(const Json& j) {
    LogPowerSeries s(j.at("variable").get<std::string>(), j.at("M_max").get<int>(),
                     j.at("K_max").get<int>());
    std::vector<Exponent> bases;
    for (const Json& b : j.at("bases")) bases.push_back(exponent_from_json(b));
    for (const Json& t : j.at("terms")) {
        int bi = t.at("base").get<int>();
        long m = t.at("offset").get<long>();
        int lp = t.at("logpow").get<int>();
        Scalar v = scalar_from_json(Json::array({t.at("re"), t.at("im")}));
        if (bi < 0 || bi >= int(bases.size())) throw ConfigError("series: bad base index");
        s.add_term(bases[bi] + m, lp, v);
    }
    return s;
}

Json system_to_json(const MatrixSeries& a) {
    Json coeffs = Json::array();
    for (const Mat& m : a.coeff) {
        Json rows = Json::array();
        for (int i = 0; i < a.r; ++i) {
            Json row = Json::array();
            for (int j = 0; j < a.r; ++j) row.push_back(scalar_to_json(m(i, j)));
            rows.push_back(row);
        }
        coeffs.push_back(rows);
    }
    return Json{{"r", a.r},
                {"z0", scalar_to_json(a.z0)},
                {"radius", a.radius},
                {"coeffs", coeffs}};
}

MatrixSeries system_from_json(const Json& j) {
    int r = j.at("r").get<int>();
    const Json& coeffs = j.at("coeffs");
    MatrixSeries a(r, scalar_from_json(j.at("z0")), j.at("radius").get<double>(),
                   int(coeffs.size()) - 1);
    for (int k = 0; k < int(coeffs.size()); ++k)
        for (int i = 0; i < r; ++i)
            for (int c = 0; c < r; ++c) a.coeff[k](i, c) = scalar_from_json(coeffs[k][i][c]);
    return a;
}

Json solution_to_json(const FundamentalSolutionSet& f) {
    Json cols = Json::array();
    for (const auto& col : f.columns) {
        Json comps = Json::array();
        for (const auto& s : col) comps.push_back(series_to_json(s));
        cols.push_back(comps);
    }
    Json ladder = Json::array();
    for (const Exponent& e : f.ladder.bases()) ladder.push_back(exponent_to_json(e));
    return Json{{"z0", scalar_to_json(f.z0)},
                {"radius", f.radius},
                {"variable", f.var},
                {"ladder", ladder},
                {"columns", cols}};
}

Json quadruple_to_json(const BasisQuadruple& q) {
    const auto& tab = PartitionTable::instance();
    auto parts = [&](int g, int i) {
        Json arr = Json::array();
        for (int p : tab.at(g, i).parts) arr.push_back(p);
        return arr;
    };
    return Json{{"theta", parts(q.tg, q.ti)},
                {"v", parts(q.vg, q.vi)},
                {"u", parts(q.ug, q.ui)},
                {"w", parts(q.wg, q.wi)}};
}

BasisQuadruple quadruple_from_json(const Json& j) {
    const auto& tab = PartitionTable::instance();
    auto read = [&](const Json& arr, int& g, int& i) {
        Partition p;
        for (const Json& x : arr) p.parts.push_back(x.get<int>());
        std::sort(p.parts.begin(), p.parts.end(), std::greater<int>());
        g = p.sum();
        i = tab.index_of(p);
    };
    BasisQuadruple q;
    read(j.at("theta"), q.tg, q.ti);
    read(j.at("v"), q.vg, q.vi);
    read(j.at("u"), q.ug, q.ui);
    read(j.at("w"), q.wg, q.wi);
    return q;
}

Json combination_to_json(const LinearCombination& lc) {
    Json terms = Json::array();
    for (const auto& [key, coeff] : lc.terms()) {
        Json monos = Json::array();
        for (const auto& [mk, c] : coeff.terms()) {
            monos.push_back(Json{{"x", to_string(mk.a.re)},
                                 {"y", to_string(mk.b.re)},
                                 {"xmy", to_string(mk.e.re)},
                                 {"logx", mk.h},
                                 {"logy", mk.k},
                                 {"logxmy", mk.j},
                                 {"coeff", scalar_to_json(c)}});
        }
        terms.push_back(Json{{"quadruple", quadruple_to_json(key.q)},
                             {"h", key.h},
                             {"k", key.k},
                             {"monomials", monos}});
    }
    const char* flavor = lc.flavor() == Flavor::y_norm     ? "y"
                         : lc.flavor() == Flavor::xmy_norm ? "xmy"
                                                           : "plain";
    return Json{{"flavor", flavor}, {"terms", terms}};
}

namespace {
Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }
} // namespace

Json assoc_report_to_json(const AssocReport& r) {
    Json pts = Json::array();
    for (const AssocPoint& p : r.points) {
        Json ladder = Json::array();
        for (Complex e : p.exponent_ladder) ladder.push_back(complex_to_json(e));
        pts.push_back(Json{{"x", complex_to_json(p.x)},
                           {"y", complex_to_json(p.y)},
                           {"f_pipeline", complex_to_json(p.f_pipeline)},
                           {"f_direct", complex_to_json(p.f_direct)},
                           {"f_closed", complex_to_json(p.f_closed)},
                           {"rel_dev_sides", p.rel_dev_sides},
                           {"rel_dev_closed", p.rel_dev_closed},
                           {"tail_estimate", p.tail_estimate},
                           {"connection_residual", p.connection_residual},
                           {"match_deviation", p.match_deviation},
                           {"exponent_ladder", ladder}});
    }
    return Json{{"check", "associativity"},
                {"momenta", Json::array({to_string(r.a), to_string(r.b), to_string(r.c)})},
                {"points", pts},
                {"max_rel_dev_sides", r.max_rel_dev_sides},
                {"max_rel_dev_closed", r.max_rel_dev_closed},
                {"pass", r.pass}};
}

Json pentagon_report_to_json(const PentagonReport& r) {
    return Json{{"check", "pentagon"},
                {"momenta", Json::array({to_string(r.a), to_string(r.b), to_string(r.c),
                                         to_string(r.d)})},
                {"point", Json::array({complex_to_json(r.x), complex_to_json(r.y),
                                       complex_to_json(r.z)})},
                {"values",
                 Json{{"a_b_cd", complex_to_json(r.values.a_b_cd)},
                      {"a_bc_d", complex_to_json(r.values.a_bc_d)},
                      {"abc_d", complex_to_json(r.values.abc_d)},
                      {"ab_c_d", complex_to_json(r.values.ab_c_d)},
                      {"ab_cd", complex_to_json(r.values.ab_cd)},
                      {"oracle", complex_to_json(r.values.oracle)}}},
                {"max_pair_dev", r.max_pair_dev},
                {"dev_oracle", r.dev_oracle},
                {"pass", r.pass}};
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("parse error in '" + path + "': " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace boxtimes
