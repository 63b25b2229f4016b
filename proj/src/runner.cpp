#include "finsler/runner.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "finsler/analysis.hpp"
#include "finsler/spray.hpp"
#include "finsler/tensors.hpp"

namespace finsler::cli {

namespace {

struct Check {
    std::string name;
    int point = -1; // -1: global / aggregated
    json closed;
    json oracle;
    double residual = 0.0;
    bool pass = true;
    std::string detail;
};

json vec_json(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json point_json(const fields::EvaluationPoint& p, int index) {
    json j;
    j["index"] = index;
    j["x"] = vec_json(p.x);
    j["y"] = vec_json(p.y);
    return j;
}

json digest_matrix(const Mat& m, bool full) {
    json j;
    j["frobenius"] = norm2(m.data());
    j["max_abs"] = max_abs(m.data());
    if (full) {
        json rows = json::array();
        for (int i = 0; i < m.dim(); ++i) {
            json r = json::array();
            for (int k = 0; k < m.dim(); ++k) r.push_back(m(i, k));
            rows.push_back(r);
        }
        j["entries"] = rows;
    }
    return j;
}

json digest_scalar(double v) {
    json j;
    j["value"] = v;
    return j;
}

json digest_vec(std::span<const double> v, bool full) {
    json j;
    j["norm"] = norm2(v);
    j["max_abs"] = max_abs(v);
    if (full) j["entries"] = vec_json(v);
    return j;
}

// Deterministic per-point map: results land in index order regardless of the
// thread count.
template <class F>
void parallel_for(int count, int threads, F&& body) {
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

class Collector {
public:
    explicit Collector(int points) : per_point_(points) {}
    void add(int point, Check c) {
        c.point = point;
        per_point_[point].push_back(std::move(c));
    }
    void add_global(Check c) { global_.push_back(std::move(c)); }

    void drain(std::vector<Check>& out) {
        for (auto& v : per_point_)
            for (auto& c : v) out.push_back(std::move(c));
        for (auto& c : global_) out.push_back(std::move(c));
    }

private:
    std::vector<std::vector<Check>> per_point_;
    std::vector<Check> global_;
};

void run_tensors(const Materialized& m, const RunConfig& cfg, const RunOptions& opt,
                 Collector& out) {
    const auto mf = tensors::metric_function(m.fields, m.kernel);
    const int np = static_cast<int>(m.points.size());
    parallel_for(np, opt.threads, [&](int i) {
        const auto& p = m.points[i];
        const auto st = tensors::scalar_state(m.fields.metric, m.fields.beta, m.fields.gamma,
                                              m.kernel, p);
        const auto ft = tensors::fundamental_closed(st);
        const Mat og = tensors::oracle_g(mf, p);
        const int n = st.n;

        double gres = 0.0;
        const double gscale = std::max(1.0, max_abs(og.data()));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) gres = std::max(gres, std::abs(ft.g(a, b) - og(a, b)));
        gres /= gscale;
        out.add(i, {"fundamental_vs_oracle", i, digest_matrix(ft.g, opt.full),
                    digest_matrix(og, opt.full), gres, gres <= cfg.tol.jet_rel, ""});

        const double det_num = lu_det(ft.g);
        const double dres = rel_err(ft.det, det_num);
        out.add(i, {"det_closed_vs_numeric", i, digest_scalar(ft.det), digest_scalar(det_num),
                    dres, dres <= cfg.tol.det_rel, ""});

        const Mat prod = mat_mul(ft.g, ft.ginv);
        double ires = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                ires = std::max(ires, std::abs(prod(a, b) - (a == b ? 1.0 : 0.0)));
        out.add(i, {"inverse_identity", i, digest_matrix(ft.ginv, opt.full),
                    digest_matrix(Mat::identity(n), false), ires, ires <= cfg.tol.inverse, ""});

        const auto cc = tensors::cartan_closed(st);
        const Ten3 oc = tensors::oracle_cartan(mf, p);
        double cres = 0.0;
        const double cscale = std::max(1.0, max_abs(oc.data()));
        for (std::size_t k = 0; k < oc.data().size(); ++k)
            cres = std::max(cres, std::abs(cc.C.data()[k] - oc.data()[k]));
        cres /= cscale;
        out.add(i, {"cartan_vs_oracle", i, digest_vec(cc.C.data(), opt.full),
                    digest_vec(oc.data(), opt.full), cres, cres <= cfg.tol.cartan, ""});

        double cy = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += cc.C(a, b, k) * p.y[k];
                cy = std::max(cy, std::abs(acc));
            }
        out.add(i, {"cartan_y_contraction", i, digest_scalar(cy), digest_scalar(0.0), cy,
                    cy <= cfg.tol.cartan_y, ""});
    });
}

void run_spray(const Materialized& m, const RunConfig& cfg, const RunOptions& opt,
               Collector& out) {
    const auto mf = tensors::metric_function(m.fields, m.kernel);
    const int np = static_cast<int>(m.points.size());
    parallel_for(np, opt.threads, [&](int i) {
        const auto& p = m.points[i];
        const auto pd =
            spray::make_spray_point_data(m.fields.metric, m.fields.beta, m.fields.gamma, p.x);
        const auto sol = spray::spray_closed(pd, m.kernel, p.y);
        const Vec orc = spray::spray_oracle(mf, p);
        double sres = 0.0;
        const double sscale = std::max(1.0, max_abs(orc));
        for (int a = 0; a < pd.n; ++a) sres = std::max(sres, std::abs(sol.G[a] - orc[a]));
        sres /= sscale;
        out.add(i, {"spray_closed_vs_oracle", i, digest_vec(sol.G, opt.full),
                    digest_vec(orc, opt.full), sres, sres <= cfg.tol.spray_rel, ""});

        const auto st = tensors::scalar_state(m.fields.metric, m.fields.beta, m.fields.gamma,
                                              m.kernel, p);
        const Vec ell = spray::ell_covector(st);
        const double lhs = dot(ell, sol.D);
        const double rb00 = quad_form(pd.fd_beta.r, p.y, p.y);
        const double rg00 = quad_form(pd.fd_gamma.r, p.y, p.y);
        const double rhs = st.kjet.s * rb00 + st.kjet.sb * rg00;
        const double ires = rel_err(lhs, rhs);
        out.add(i, {"ell_D_identity", i, digest_scalar(lhs), digest_scalar(rhs), ires,
                    ires <= cfg.tol.identity, ""});
    });
}

void run_hamel(const Materialized& m, const RunConfig& cfg, const RunOptions& opt,
               Collector& out) {
    const auto mf = tensors::metric_function(m.fields, m.kernel);
    const analysis::ScanThresholds th{cfg.tol.flat_pass, cfg.tol.flat_fail};
    const int np = static_cast<int>(m.points.size());
    std::vector<double> hamel(np), cond(np);
    std::vector<double> gp(np, 0.0);
    parallel_for(np, opt.threads, [&](int i) {
        const auto& p = m.points[i];
        const auto pd =
            spray::make_spray_point_data(m.fields.metric, m.fields.beta, m.fields.gamma, p.x);
        hamel[i] = analysis::hamel_rel(mf, p);
        cond[i] = analysis::condition51_rel(pd, m.kernel, p.y);
        if (hamel[i] <= th.pass_tol) {
            const auto sol = spray::spray_closed(pd, m.kernel, p.y);
            const double P = analysis::projective_factor(mf, p);
            double dev = 0.0;
            for (int a = 0; a < pd.n; ++a) dev = std::max(dev, std::abs(sol.G[a] - P * p.y[a]));
            gp[i] = dev / std::max(1.0, max_abs(sol.G));
        }
    });
    double max_h = 0.0, max_c = 0.0, max_gp = 0.0;
    bool equiv = true;
    for (int i = 0; i < np; ++i) {
        max_h = std::max(max_h, hamel[i]);
        max_c = std::max(max_c, cond[i]);
        max_gp = std::max(max_gp, gp[i]);
        const bool hf = hamel[i] <= th.pass_tol, hn = hamel[i] > th.fail_tol;
        const bool cf = cond[i] <= th.pass_tol, cn = cond[i] > th.fail_tol;
        const bool agree = !((hf && cn) || (cf && hn));
        equiv = equiv && agree;
        out.add(i, {"hamel_residual", i, digest_scalar(hamel[i]), digest_scalar(0.0), hamel[i],
                    true, "normalized"});
        out.add(i, {"condition51_residual", i, digest_scalar(cond[i]), digest_scalar(0.0),
                    cond[i], true, "normalized"});
        out.add(i, {"lemma51_agreement", i, digest_scalar(hamel[i]), digest_scalar(cond[i]), 0.0,
                    agree, ""});
    }
    double worst = std::max(max_h, max_c);
    analysis::Verdict v = worst <= th.pass_tol ? analysis::Verdict::positive
                          : worst > th.fail_tol ? analysis::Verdict::negative
                                                : analysis::Verdict::inconclusive;
    Check summary{"flatness_verdict", -1, digest_scalar(max_h), digest_scalar(max_c), worst,
                  v != analysis::Verdict::inconclusive, ""};
    summary.detail = v == analysis::Verdict::positive   ? "flat"
                     : v == analysis::Verdict::negative ? "not_flat"
                                                        : "inconclusive";
    out.add_global(summary);
    out.add_global({"lemma51_equivalence", -1, digest_scalar(max_h), digest_scalar(max_c), 0.0,
                    equiv, ""});
    if (v == analysis::Verdict::positive)
        out.add_global({"projective_factor_consistency", -1, digest_scalar(max_gp),
                        digest_scalar(0.0), max_gp, max_gp <= cfg.tol.flat_pass, "max |G - P y|"});
    if (opt.expect_flat)
        out.add_global({"expect_flat", -1, json(summary.detail),
                        json(*opt.expect_flat ? "flat" : "not_flat"), 0.0,
                        (v == analysis::Verdict::positive) == *opt.expect_flat, ""});
}

void run_douglas(const Materialized& m, const RunConfig& cfg, const RunOptions& opt,
                 Collector& out) {
    const analysis::ScanThresholds th{cfg.tol.flat_pass, cfg.tol.flat_fail};
    const int np = static_cast<int>(m.points.size());
    std::vector<double> dres(np), brecon(np), bsym(np);
    parallel_for(np, opt.threads, [&](int i) {
        const auto& p = m.points[i];
        const auto pd =
            spray::make_spray_point_data(m.fields.metric, m.fields.beta, m.fields.gamma, p.x);
        dres[i] = analysis::douglas_rel(pd, m.kernel, p.y);
        const Mat B = analysis::bij(pd, m.kernel, p.y);
        const Mat Br = analysis::bij_from_spray(pd, m.kernel, p.y);
        double rec = 0.0, sym = 0.0;
        for (int a = 0; a < pd.n; ++a)
            for (int b = 0; b < pd.n; ++b) {
                rec = std::max(rec, std::abs(B(a, b) - Br(a, b)));
                sym = std::max(sym, std::abs(B(a, b) + B(b, a)));
            }
        brecon[i] = rec;
        bsym[i] = sym;
    });
    double max_d = 0.0, max_rec = 0.0, max_sym = 0.0;
    for (int i = 0; i < np; ++i) {
        max_d = std::max(max_d, dres[i]);
        max_rec = std::max(max_rec, brecon[i]);
        max_sym = std::max(max_sym, bsym[i]);
        out.add(i, {"douglas_tensor", i, digest_scalar(dres[i]), digest_scalar(0.0), dres[i],
                    true, "normalized"});
        out.add(i, {"bij_reconstruction", i, digest_scalar(brecon[i]), digest_scalar(0.0),
                    brecon[i], brecon[i] <= cfg.tol.identity, ""});
        out.add(i, {"bij_antisymmetry", i, digest_scalar(bsym[i]), digest_scalar(0.0), bsym[i],
                    bsym[i] <= 1e-12, ""});
    }
    analysis::Verdict v = max_d <= th.pass_tol ? analysis::Verdict::positive
                          : max_d > th.fail_tol ? analysis::Verdict::negative
                                                : analysis::Verdict::inconclusive;
    Check summary{"douglas_verdict", -1, digest_scalar(max_d), digest_scalar(0.0), max_d,
                  v != analysis::Verdict::inconclusive, ""};
    summary.detail = v == analysis::Verdict::positive   ? "douglas"
                     : v == analysis::Verdict::negative ? "not_douglas"
                                                        : "inconclusive";
    out.add_global(summary);
    if (opt.expect_douglas)
        out.add_global({"expect_douglas", -1, json(summary.detail),
                        json(*opt.expect_douglas ? "douglas" : "not_douglas"), 0.0,
                        (v == analysis::Verdict::positive) == *opt.expect_douglas, ""});
}

void run_admissibility(const Materialized& m, const RunConfig& cfg, Collector& out) {
    (void)cfg;
    const psi::GridSpec grid;
    const auto rep =
        psi::admissibility(m.kernel, m.kernel.b0(), m.kernel.g0(), grid, m.fields.metric.dim());
    json closed;
    closed["verdict"] = rep.admissible ? "admissible" : "inadmissible";
    closed["nodes_checked"] = rep.nodes_checked;
    closed["min_Pi"] = rep.min_Pi;
    closed["min_Gamma"] = rep.min_Gamma;
    closed["min_psi"] = rep.min_psi;
    closed["psi_positive"] = rep.psi_positive;
    closed["grid"] = {{"ns", grid.ns}, {"nsb", grid.nsb}, {"nb", grid.nb},
                      {"ng", grid.ng},  {"ntheta", grid.ntheta}};
    if (rep.witness) {
        closed["witness"] = {{"b", rep.witness->b},   {"g", rep.witness->g},
                             {"s", rep.witness->s},   {"sbar", rep.witness->sb},
                             {"theta", rep.witness->theta}, {"Pi", rep.witness->Pi},
                             {"Gamma", rep.witness->Gamma}};
    }
    // The verdict itself is a result, not a failure.
    out.add_global({"admissibility_sweep", -1, closed, json(nullptr), 0.0, true, ""});
}

} // namespace

int thread_count_from_env() {
    const char* v = std::getenv("ABG_VERIFY_THREADS");
    if (!v) return 1;
    const int n = std::atoi(v);
    return n >= 1 ? n : 1;
}

RunResult run(const RunConfig& cfg, const std::string& command, const RunOptions& opt) {
    const Materialized m = materialize(cfg);
    Collector collector(static_cast<int>(m.points.size()));

    const bool all = command == "verify-all";
    if (!all && command != "admissibility" && command != "tensors" && command != "spray"
        && command != "hamel" && command != "douglas")
        throw InvalidConfig("command: unknown command '" + command + "'");

    if (all || command == "admissibility") run_admissibility(m, cfg, collector);
    if (all || command == "tensors") run_tensors(m, cfg, opt, collector);
    if (all || command == "spray") run_spray(m, cfg, opt, collector);
    if (all || command == "hamel") run_hamel(m, cfg, opt, collector);
    if (all || command == "douglas") run_douglas(m, cfg, opt, collector);

    std::vector<Check> checks;
    collector.drain(checks);

    RunResult res;
    json jchecks = json::array();
    double max_residual = 0.0;
    for (const auto& c : checks) {
        json j;
        j["name"] = c.name;
        j["point"] = c.point >= 0 ? point_json(m.points[c.point], c.point) : json(nullptr);
        j["closed"] = c.closed;
        j["oracle"] = c.oracle;
        j["residual"] = c.residual;
        j["verdict"] = c.pass ? "pass" : "fail";
        if (!c.detail.empty()) j["detail"] = c.detail;
        jchecks.push_back(std::move(j));
        res.checks_run += 1;
        res.failures += c.pass ? 0 : 1;
        max_residual = std::max(max_residual, c.residual);
    }

    res.report["command"] = command;
    res.report["config"] = config_to_json(cfg);
    res.report["checks"] = std::move(jchecks);
    res.report["summary"] = {{"checks_run", res.checks_run},
                             {"failures", res.failures},
                             {"max_residual", max_residual}};
    res.exit_code = res.failures == 0 ? 0 : 1;
    return res;
}

} // namespace finsler::cli
