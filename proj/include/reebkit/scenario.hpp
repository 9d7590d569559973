#pragma once

// Scenario-driven front end: parses declarative key-value scenario files,
// dispatches to the spectrum/constellation/certify/profile/plug operations,
// and writes deterministic reports. One scenario per file; a directory is a
// batch.
//
// Common keys:
//   command  = spectrum | constellation | certify | profile | plug
//   model    = sphere | ellipsoid | torus3 | cut_s2xs1 | cut_s3 | flat_torus_cosphere
//   n, k     = model parameters; weights = r_1,...,r_n (ellipsoid)
//   factor   = one | const <c> | ellipsoid <r_1,...,r_n> | cos_bump <A> | expression
//   term     = <expression term>            (repeatable, factor = expression)
//   class    = e | m,n,j ...
//   theorem  = el-sphere | prequantization | persist | t3 | s2xs1 | s3 |
//              flat-torus | katok | fast
// plus per-command keys documented in the README.

#include <filesystem>

#include "reebkit/certify.hpp"
#include "reebkit/profiles.hpp"

namespace reebkit {

struct Scenario {
    KeyValues kv;
    std::string name;
};

inline Model parse_model(const KeyValues& kv) {
    std::string m = kv.get("model");
    if (m == "sphere") return Model::sphere(static_cast<int>(kv.get_int_or("n", 2)));
    if (m == "ellipsoid") return Model::ellipsoid(parse_double_tuple(kv.get("weights")));
    if (m == "torus3") return Model::torus3(static_cast<int>(kv.get_int_or("k", 1)));
    if (m == "cut_s2xs1") return Model::cut_s2xs1(static_cast<int>(kv.get_int_or("k", 1)));
    if (m == "cut_s3") return Model::cut_s3(static_cast<int>(kv.get_int_or("k", 1)));
    if (m == "flat_torus_cosphere")
        return Model::flat_torus_cosphere(static_cast<int>(kv.get_int_or("n", 2)));
    throw ParseError("unknown model '" + m + "'");
}

inline ConformalFactor parse_factor(const KeyValues& kv, const Model& model) {
    std::string f = kv.get_or("factor", "one");
    if (f == "one") return factor_one();
    if (f.rfind("const", 0) == 0) return factor_constant(std::stod(f.substr(5)));
    if (f.rfind("ellipsoid", 0) == 0) return factor_ellipsoid(parse_double_tuple(strip(f.substr(9))));
    if (f.rfind("cos_bump", 0) == 0) {
        if (model.kind() != ModelKind::Torus3)
            throw ParseError("cos_bump preset is defined on torus3");
        return factor_cos_bump(std::stod(f.substr(8)));
    }
    if (f == "expression") {
        auto terms = kv.all("term");
        if (terms.empty()) throw ParseError("factor = expression requires term entries");
        return factor_expression(model, terms,
                                 static_cast<int>(kv.get_int_or("grid", 64)));
    }
    throw ParseError("unknown conformal factor '" + f + "'");
}

inline HomotopyClass parse_class(const KeyValues& kv, const std::string& key = "class") {
    std::string c = kv.get_or(key, "e");
    if (c == "e") return HomotopyClass::trivial();
    return HomotopyClass{parse_int_tuple(c)};
}

inline SeedGrid parse_seed_grid(const KeyValues& kv, const Model& model) {
    if (kv.has("seed_grid")) {
        auto v = parse_int_tuple(kv.get("seed_grid"));
        SeedGrid g;
        for (auto c : v) g.counts.push_back(static_cast<int>(c));
        return g;
    }
    switch (model.kind()) {
        case ModelKind::Torus3: return SeedGrid{{1, 8, 24}};
        case ModelKind::CutS2xS1:
        case ModelKind::CutS3: return SeedGrid{{2, 2, 24}};
        default: return SeedGrid{{4, 4, 4}};
    }
}

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 invalid/failed, 2 parse error
    std::string report;
    std::string name;
};

namespace scenario_detail {

inline RunResult run_spectrum(const Scenario& sc) {
    RunResult out;
    Model model = parse_model(sc.kv);
    double cap = sc.kv.get_double_or("cap", 10.0);
    if (sc.kv.get_or("provenance", "analytic") == "numeric") {
        auto f = parse_factor(sc.kv, model);
        auto alpha = parse_class(sc.kv);
        double lo = sc.kv.get_double("window_lo"), hi = sc.kv.get_double("window_hi");
        ScanOptions opts;
        opts.integ_tol = sc.kv.get_double_or("tol", opts.integ_tol);
        auto spec = numeric_spectrum(model, f, alpha, lo, hi, parse_seed_grid(sc.kv, model), opts);
        out.report = spectrum_report(spec);
    } else {
        out.report = spectrum_report(analytic_spectrum(model, cap));
    }
    return out;
}

inline RunResult run_constellation(const Scenario& sc) {
    RunResult out;
    Model model = parse_model(sc.kv);
    double T = sc.kv.get_double("T");
    double cap = sc.kv.get_double_or("cap", std::max(4 * T, 10.0));
    auto spec = analytic_spectrum(model, cap);
    auto C = build_constellation(spec, parse_class(sc.kv), T,
                                 sc.kv.get_double_or("tol", 1e-9));
    out.report = constellation_report(C);
    out.exit_code = C.rigid() ? 0 : 1;
    return out;
}

inline RunResult run_profile(const Scenario& sc) {
    RunResult out;
    double a = sc.kv.get_double("a"), b = sc.kv.get_double("b"), c = sc.kv.get_double("c");
    double kappa = sc.kv.get_double_or("kappa", 0.0);
    TunedHamiltonian H(make_profile(a, b, c), kappa);
    ReportWriter w;
    w.kv("report", std::string("profile"));
    w.kv("a", a);
    w.kv("b", b);
    w.kv("c", c);
    w.kv("kappa", kappa);
    w.kv("shape_exponent", H.profile.shape_exponent());
    w.kv("plateau", H.profile.plateau());
    if (sc.kv.has("model")) {
        Model model = parse_model(sc.kv);
        double cap = sc.kv.get_double_or("cap", 4 * b);
        auto spec = analytic_spectrum(model, cap);
        auto cl = check_c_large(H, spec);
        w.kv("c_large", cl.ok);
        w.kv("c_large_value", cl.value);
        auto recs = enumerate_negative(H, spec, 1e-9, false);
        w.kv("negative_families", static_cast<long long>(recs.size()));
        for (auto& r : recs)
            w.kv("record", "period " + fmt(r.period) + " ; level " + fmt(r.level) + " ; action " +
                               fmt(r.action) + " ; " + r.family.descriptor);
        w.kv("action_gap", action_gap(recs));
        if (sc.kv.has("T")) {
            auto C = build_constellation(spec, parse_class(sc.kv), sc.kv.get_double("T"));
            auto fine = check_finely_tuned(H, C, spec);
            w.kv("tuned", fine.tuned.tuned());
            for (auto& chk : fine.tuned.checks)
                w.kv("tuning", chk.name + " ; margin " + fmt(chk.margin) + " ; " +
                                   (chk.ok ? "ok" : "violated"));
            w.kv("finely_tuned", fine.finely_tuned());
            for (auto& chk : fine.checks)
                w.kv("fine", chk.name + " ; margin " + fmt(chk.margin) + " ; " +
                                 (chk.ok ? "ok" : "violated"));
            w.kv("delta_s", fine.delta_s_value);
            out.exit_code = fine.finely_tuned() ? 0 : 1;
        }
    }
    out.report = w.str();
    return out;
}

inline RunResult run_certify(const Scenario& sc) {
    RunResult out;
    std::string thm = sc.kv.get("theorem");
    Certificate cert;
    Model model = Model::sphere(2);
    ConformalFactor f = factor_one();
    HomotopyClass alpha = HomotopyClass::trivial();
    bool can_cross_validate = false;
    bool filled = sc.kv.get_or("filled", "false") == "true";
    if (thm == "el-sphere") {
        int n = static_cast<int>(sc.kv.get_int_or("n", 2));
        model = Model::sphere(n);
        f = parse_factor(sc.kv, model);
        cert = certify_sphere(n, f);
        can_cross_validate = true;
    } else if (thm == "prequantization") {
        f = parse_factor(sc.kv, model);
        cert = certify_prequantization(static_cast<int>(sc.kv.get_int("dimQ")),
                                       sc.kv.get_or("fibre_primitive", "true") == "true",
                                       sc.kv.get_int_or("fibre_order", 0), f, filled);
    } else if (thm == "persist") {
        model = parse_model(sc.kv);
        f = parse_factor(sc.kv, model);
        alpha = parse_class(sc.kv);
        PersistInput in{model, alpha, sc.kv.get_double("T"), filled,
                        sc.kv.get_double_or("cap", 0.0)};
        cert = certify_persist(in, f);
        can_cross_validate = true;
    } else if (thm == "t3") {
        int k = static_cast<int>(sc.kv.get_int_or("k", 1));
        auto mn = parse_int_tuple(sc.kv.get_or("class", "1,0"));
        model = Model::torus3(k);
        f = parse_factor(sc.kv, model);
        alpha = HomotopyClass{{mn[0], mn.size() > 1 ? mn[1] : 0, 0}};
        cert = certify_t3(k, mn[0], mn.size() > 1 ? mn[1] : 0, f);
        can_cross_validate = true;
    } else if (thm == "s2xs1") {
        int k = static_cast<int>(sc.kv.get_int_or("k", 1));
        bool contractible = sc.kv.get_or("variant", "fibre") == "contractible";
        model = Model::cut_s2xs1(k);
        f = parse_factor(sc.kv, model);
        alpha = contractible ? HomotopyClass{{0}} : HomotopyClass{{1}};
        cert = certify_s2xs1(k, contractible, f);
        can_cross_validate = true;
    } else if (thm == "s3") {
        int k = static_cast<int>(sc.kv.get_int_or("k", 1));
        model = Model::cut_s3(k);
        f = parse_factor(sc.kv, model);
        cert = certify_s3(k, f);
        can_cross_validate = true;
    } else if (thm == "flat-torus") {
        int n = static_cast<int>(sc.kv.get_int_or("n", 2));
        model = Model::flat_torus_cosphere(n);
        f = parse_factor(sc.kv, model);
        auto a = parse_int_tuple(sc.kv.get("class"));
        alpha = HomotopyClass{a};
        cert = certify_flattorus(n, a, f);
        can_cross_validate = true;
    } else if (thm == "katok") {
        f = parse_factor(sc.kv, Model::sphere(2));
        cert = certify_katok(static_cast<int>(sc.kv.get_int_or("n", 2)),
                             sc.kv.get_double("epsilon"), f);
    } else if (thm == "fast") {
        cert = certify_fast(sc.kv.get_double("c1"), sc.kv.get_double("c2"),
                            static_cast<int>(sc.kv.get_int_or("dim", 3)));
    } else {
        throw ParseError("unknown theorem '" + thm + "'");
    }
    if (can_cross_validate && cert.valid &&
        sc.kv.get_or("cross_validate", "true") == "true") {
        ScanOptions opts;
        opts.integ_tol = sc.kv.get_double_or("tol", opts.integ_tol);
        cross_validate(cert, model, f, alpha, parse_seed_grid(sc.kv, model), opts);
    }
    out.report = certificate_report(cert);
    bool cv_ok = cert.cv.verdict != CrossValidation::Verdict::Failed;
    out.exit_code = cert.valid && cv_ok ? 0 : 1;
    return out;
}

inline RunResult run_plug(const Scenario& sc) {
    RunResult out;
    ReportWriter w;
    int dim = static_cast<int>(sc.kv.get_int_or("dim", 3));
    if (sc.kv.has("c1")) {
        Certificate cert = certify_fast(sc.kv.get_double("c1"), sc.kv.get_double("c2"), dim);
        out.report = certificate_report(cert);
        out.exit_code = cert.valid ? 0 : 1;
        return out;
    }
    double eps = sc.kv.get_double("eps"), delta = sc.kv.get_double("delta");
    int grid = static_cast<int>(sc.kv.get_int_or("grid", 512));
    PlugSpec spec(eps, delta, dim);
    w.kv("report", std::string("plug"));
    w.kv("eps", eps);
    w.kv("delta", delta);
    w.kv("dim", dim);
    for (auto& pc : spec.checks()) w.kv("property", pc.name + (pc.ok ? " ; ok" : " ; violated"));
    auto scan = verify_contact(spec, delta, grid);
    w.kv("grid", grid);
    w.kv("min_density", scan.min_density);
    w.kv("inner_min", scan.inner_min);
    w.kv("inner_bound", scan.inner_bound);
    w.kv("contact", scan.positive && scan.inner_ok);
    w.kv("delta_cap", delta_bound(spec, std::min(grid, 512)));
    auto orb = locate_orbit(spec, delta);
    w.kv("orbit_period", orb.period_analytic);
    w.kv("orbit_period_quadrature", orb.period_quadrature);
    w.kv("kernel_residual", orb.kernel_residual);
    w.kv("unique_at_grid_scale", orb.unique_at_grid_scale);
    auto gb = gray_bounds(spec, delta, std::min(grid, 256));
    w.kv("sup_rbar", gb.sup_rbar);
    w.kv("sup_rhat", gb.sup_rhat);
    w.kv("gray_bound", gb.bound);
    w.kv("gray_grid_bound", gb.grid_bound);
    bool ok = scan.positive && scan.inner_ok && orb.unique_at_grid_scale &&
              orb.kernel_residual < 1e-8 && gb.rbar_ok && gb.rhat_ok;
    w.kv("verified", ok);
    out.report = w.str();
    out.exit_code = ok ? 0 : 1;
    return out;
}

}  // namespace scenario_detail

inline RunResult run_scenario(const Scenario& sc) {
    std::string cmd = sc.kv.get("command");
    RunResult out;
    if (cmd == "spectrum")
        out = scenario_detail::run_spectrum(sc);
    else if (cmd == "constellation")
        out = scenario_detail::run_constellation(sc);
    else if (cmd == "profile")
        out = scenario_detail::run_profile(sc);
    else if (cmd == "certify")
        out = scenario_detail::run_certify(sc);
    else if (cmd == "plug")
        out = scenario_detail::run_plug(sc);
    else
        throw ParseError("unknown command '" + cmd + "'");
    out.name = sc.name;
    return out;
}

inline RunResult run_scenario_file(const std::string& path) {
    Scenario sc;
    sc.name = std::filesystem::path(path).stem().string();
    try {
        sc.kv = parse_kv_file(path);
        return run_scenario(sc);
    } catch (const ParseError& e) {
        RunResult out;
        out.exit_code = 2;
        out.name = sc.name;
        ReportWriter w;
        w.kv("report", std::string("error"));
        w.kv("scenario", path);
        w.kv("error", std::string(e.what()));
        out.report = w.str();
        return out;
    } catch (const std::exception& e) {
        RunResult out;
        out.exit_code = 1;
        out.name = sc.name;
        ReportWriter w;
        w.kv("report", std::string("error"));
        w.kv("scenario", path);
        w.kv("error", std::string(e.what()));
        out.report = w.str();
        return out;
    }
}

}  // namespace reebkit
