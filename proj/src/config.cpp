#include "finsler/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace finsler::cli {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
    throw InvalidConfig(field + ": " + msg);
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        bad(key, "wrong type");
    }
}

psi::Phi phi_from_spec(const std::string& kind, const std::vector<double>& coef,
                       const std::string& where) {
    if (kind == "exp") return psi::Phi::exponential();
    if (kind == "poly") {
        if (coef.empty()) bad(where, "poly kind needs coefficients");
        return psi::Phi::poly(coef);
    }
    bad(where, "unknown kind '" + kind + "' (use exp or poly)");
}

} // namespace

fields::FieldExpr expr_from_json(const json& j, int dim, const std::string& where) {
    fields::FieldExpr e(dim);
    if (!j.is_object() || !j.contains("terms")) bad(where, "expected {\"terms\": [...]}");
    for (const auto& t : j.at("terms")) {
        const double coef = get_or<double>(t, "coef", 0.0);
        std::vector<int> pow = get_or<std::vector<int>>(t, "pow", std::vector<int>(dim, 0));
        std::vector<double> lin = get_or<std::vector<double>>(t, "lin", {});
        if (static_cast<int>(pow.size()) != dim) bad(where, "pow arity != dimension");
        if (!lin.empty() && static_cast<int>(lin.size()) != dim)
            bad(where, "lin arity != dimension");
        for (int p : pow)
            if (p < 0) bad(where, "negative exponent");
        e.add(coef, std::move(pow), std::move(lin));
    }
    return e;
}

RunConfig config_from_json(const json& doc) {
    RunConfig cfg;
    cfg.raw = doc;
    cfg.dimension = get_or<int>(doc, "dimension", 2);
    if (cfg.dimension < 2 || cfg.dimension > 4) bad("dimension", "must be 2..4");

    const bool has_fixture = doc.contains("fixture");
    const bool has_fields = doc.contains("fields");
    if (has_fixture == has_fields)
        bad("fixture", "exactly one of 'fixture' or 'fields' is required");
    if (has_fixture) {
        cfg.fixture = doc.at("fixture").get<std::string>();
        const auto names = fields::fixture_names();
        if (std::find(names.begin(), names.end(), cfg.fixture) == names.end())
            bad("fixture", "unknown fixture '" + cfg.fixture + "'");
    }

    if (doc.contains("kernel")) {
        const json& k = doc.at("kernel");
        cfg.kernel.family = get_or<std::string>(k, "family", "exp_gamma");
        if (cfg.kernel.family != "exp_gamma" && cfg.kernel.family != "randers3"
            && cfg.kernel.family != "alpha_beta" && cfg.kernel.family != "composed")
            bad("kernel.family", "unknown family '" + cfg.kernel.family + "'");
        cfg.kernel.b0 = get_or<double>(k, "b0", cfg.kernel.b0);
        cfg.kernel.g0 = get_or<double>(k, "g0", cfg.kernel.g0);
        if (cfg.kernel.b0 <= 0.0 || cfg.kernel.g0 <= 0.0) bad("kernel.b0", "bounds must be > 0");
        if (k.contains("phi")) {
            cfg.kernel.phi_kind = get_or<std::string>(k.at("phi"), "kind", "exp");
            cfg.kernel.phi_coef = get_or<std::vector<double>>(k.at("phi"), "coef", {});
        }
        if (k.contains("psi")) {
            cfg.kernel.psi_kind = get_or<std::string>(k.at("psi"), "kind", "poly");
            cfg.kernel.psi_coef =
                get_or<std::vector<double>>(k.at("psi"), "coef", cfg.kernel.psi_coef);
        }
    }

    if (doc.contains("samples")) {
        const json& s = doc.at("samples");
        cfg.samples.axis = get_or<std::vector<double>>(s, "axis", cfg.samples.axis);
        cfg.samples.directions = get_or<int>(s, "directions", cfg.samples.directions);
        cfg.samples.seed = get_or<std::uint32_t>(s, "seed", cfg.samples.seed);
        if (cfg.samples.axis.empty()) bad("samples.axis", "must be non-empty");
        if (cfg.samples.directions < 1) bad("samples.directions", "must be >= 1");
        for (double v : cfg.samples.axis)
            if (std::abs(v) > 1.0) bad("samples.axis", "sampling box is [-1, 1]^n");
    }

    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        cfg.tol.jet_rel = get_or<double>(t, "jet_rel", cfg.tol.jet_rel);
        cfg.tol.det_rel = get_or<double>(t, "det_rel", cfg.tol.det_rel);
        cfg.tol.inverse = get_or<double>(t, "inverse", cfg.tol.inverse);
        cfg.tol.cartan = get_or<double>(t, "cartan", cfg.tol.cartan);
        cfg.tol.cartan_y = get_or<double>(t, "cartan_y", cfg.tol.cartan_y);
        cfg.tol.spray_rel = get_or<double>(t, "spray_rel", cfg.tol.spray_rel);
        cfg.tol.identity = get_or<double>(t, "identity", cfg.tol.identity);
        cfg.tol.flat_pass = get_or<double>(t, "flat_pass", cfg.tol.flat_pass);
        cfg.tol.flat_fail = get_or<double>(t, "flat_fail", cfg.tol.flat_fail);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // convert byte offset to line/column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": "
                         + e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const RunConfig& cfg) {
    return cfg.raw;
}

namespace {

fields::FixtureSet fields_from_config(const RunConfig& cfg) {
    const int n = cfg.dimension;
    if (!cfg.fixture.empty()) return fields::fixture(cfg.fixture, n);
    const json& f = cfg.raw.at("fields");
    if (!f.contains("metric") || !f.contains("beta") || !f.contains("gamma"))
        throw InvalidConfig("fields: needs metric, beta, gamma");
    const json& mj = f.at("metric");
    if (!mj.contains("upper")) throw InvalidConfig("fields.metric: expected {\"upper\": [...]}");
    std::vector<fields::FieldExpr> upper;
    for (const auto& e : mj.at("upper")) upper.push_back(expr_from_json(e, n, "fields.metric"));
    if (static_cast<int>(upper.size()) != n * (n + 1) / 2)
        throw InvalidConfig("fields.metric.upper: needs n(n+1)/2 entries");
    auto form = [&](const char* key) {
        const json& fj = f.at(key);
        if (!fj.contains("components"))
            throw InvalidConfig(std::string("fields.") + key + ": expected components");
        std::vector<fields::FieldExpr> comps;
        for (const auto& e : fj.at("components"))
            comps.push_back(expr_from_json(e, n, std::string("fields.") + key));
        if (static_cast<int>(comps.size()) != n)
            throw InvalidConfig(std::string("fields.") + key + ": arity != dimension");
        const double bound = get_or<double>(fj, "bound", 0.45);
        return fields::OneFormField(n, std::move(comps), bound);
    };
    return fields::FixtureSet{"inline", fields::MetricField(n, std::move(upper)), form("beta"),
                              form("gamma")};
}

psi::PsiKernel kernel_from_spec(const KernelSpec& k) {
    if (k.family == "exp_gamma") return psi::PsiKernel::exp_gamma(k.b0, k.g0);
    if (k.family == "randers3") return psi::PsiKernel::randers3(k.b0, k.g0);
    if (k.family == "alpha_beta")
        return psi::PsiKernel::alpha_beta(phi_from_spec(k.phi_kind, k.phi_coef, "kernel.phi"),
                                          k.b0, k.g0);
    return psi::PsiKernel::composed(phi_from_spec(k.phi_kind, k.phi_coef, "kernel.phi"),
                                    phi_from_spec(k.psi_kind, k.psi_coef, "kernel.psi"), k.b0,
                                    k.g0);
}

} // namespace

Materialized materialize(const RunConfig& cfg) {
    fields::FixtureSet fx = fields_from_config(cfg);
    psi::PsiKernel kernel = kernel_from_spec(cfg.kernel);
    auto points = fields::sample_points(cfg.samples, cfg.dimension);

    for (const auto& p : points)
        if (!spd_check(fx.metric.value(p.x)))
            throw InvalidConfig("fields.metric: not SPD at a sample point");
    const double bmax = fields::max_form_norm(fx.metric, fx.beta, points);
    const double gmax = fields::max_form_norm(fx.metric, fx.gamma, points);
    if (bmax >= fx.beta.declared_bound())
        throw InvalidConfig("fields.beta: declared bound violated at a sample point");
    if (gmax >= fx.gamma.declared_bound())
        throw InvalidConfig("fields.gamma: declared bound violated at a sample point");
    if (bmax >= kernel.b0())
        throw InvalidConfig("kernel.b0: ||beta||_alpha = " + std::to_string(bmax)
                            + " at a sample point violates b0 = " + std::to_string(kernel.b0()));
    if (gmax >= kernel.g0())
        throw InvalidConfig("kernel.g0: ||gamma||_alpha = " + std::to_string(gmax)
                            + " at a sample point violates g0 = " + std::to_string(kernel.g0()));
    return Materialized{std::move(fx), std::move(kernel), std::move(points)};
}

void emit_json(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace finsler::cli
