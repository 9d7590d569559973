#pragma once

// Closed-orbit detection and refinement: Newton shooting against a lattice
// target in the universal cover, monodromy/Floquet classification via the
// variational equation, and recurrence-seeded scans that assemble orbit
// families deterministically.

#include <algorithm>
#include <complex>

#include "reebkit/conformal.hpp"
#include "reebkit/integrate.hpp"
#include "reebkit/report.hpp"

namespace reebkit {

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OrbitClass { Nondegenerate, MorseBott, Degenerate };

struct ClosedOrbit {
    Vec x0;                     // base point (wrapped into the chart)
    double period = 0;          // minimal period
    std::vector<long long> winding;  // windings of the periodic coordinates
    HomotopyClass cls;          // class of the (primitive) loop
    double residual = 0;        // |Phi_T(x0) - x0 - L|
    bool simple = true;
    std::vector<std::complex<double>> floquet;  // transverse multipliers
    int nullity = 0;            // dim ker(transverse monodromy - I)
    OrbitClass classification = OrbitClass::Nondegenerate;
};

struct ShootOptions {
    double tol = 1e-11;        // Newton residual target
    double orbit_tol = 1e-9;   // acceptance residual
    double integ_tol = 1e-11;
    int max_iter = 30;
    double sv_cutoff = 1e-6;   // rank-revealing cutoff (Morse-Bott detection)
    int divisor_max = 6;
    bool reduce_to_primitive = true;
};

namespace detail {

// Monodromy of the linearized flow along [0,T]: integrates the variational
// equation with the field Jacobian taken by central differences.
inline Mat monodromy(const VectorField& field, const Model* chart, const Vec& x0, double T,
                     double tol, Vec* x_end = nullptr) {
    const int d = static_cast<int>(x0.size());
    Vec z0(d + d * d);
    z0.head(d) = x0;
    Eigen::Map<Mat>(z0.data() + d, d, d) = Mat::Identity(d, d);
    const double hj = 1e-6;
    auto big = [&](const Vec& z) {
        Vec out(d + d * d);
        const Vec x = z.head(d);
        out.head(d) = field(x);
        Mat J(d, d);
        for (int i = 0; i < d; ++i) {
            Vec e = Vec::Unit(d, i);
            J.col(i) = (field(x + hj * e) - field(x - hj * e)) / (2 * hj);
        }
        Eigen::Map<const Mat> M(z.data() + d, d, d);
        Eigen::Map<Mat>(out.data() + d, d, d) = J * M;
        return out;
    };
    IntegrateOptions opt;
    opt.tol = tol;
    opt.err_dims = d;  // step control on the base trajectory; the variational
                       // block inherits its accuracy
    (void)chart;  // constraint drift over one period stays below tol; no projection here
    Vec z = integrate(big, z0, T, opt);
    if (x_end) *x_end = z.head(d);
    return Eigen::Map<Mat>(z.data() + d, d, d);
}

}  // namespace detail

// Newton iteration on (x, T) for Phi_T(x) - x - L = 0 with the phase condition
// <x - x_seed, R(x_seed)> = 0; rank-deficient Jacobians (Morse-Bott families)
// are handled by a minimum-norm SVD step and reported via the orbit's nullity.
inline ClosedOrbit shoot_closed_orbit(const VectorField& field, const Model& model, Vec x_guess,
                                      double T_guess, const std::vector<long long>& winding = {},
                                      const ShootOptions& so = {}) {
    if (!(T_guess > 0)) throw std::invalid_argument("shoot: T_guess must be positive");
    const int d = static_cast<int>(x_guess.size());
    model.project(x_guess);
    const Vec L = model.lattice(winding);
    Vec phase_dir = field(x_guess);
    phase_dir.normalize();
    const Vec x_seed = x_guess;

    Vec x = x_guess;
    double T = T_guess;
    IntegrateOptions iopt;
    iopt.tol = so.integ_tol;
    iopt.chart = &model;

    // bordered system: return-map equations, the phase condition, and one
    // row per sphere block pinning the radial direction (the linear model
    // flows have a spurious fixed point at the origin otherwise)
    const auto& blocks = model.chart_ref().spheres;
    const int rows = d + 1 + static_cast<int>(blocks.size());
    auto residual_vec = [&](const Vec& xc, const Vec& x_end) {
        Vec G(rows);
        G.head(d) = x_end - xc - L;
        G[d] = phase_dir.dot(xc - x_seed);
        for (size_t bi = 0; bi < blocks.size(); ++bi)
            G[d + 1 + bi] = 0.5 * (xc.segment(blocks[bi].begin, blocks[bi].len).squaredNorm() - 1.0);
        return G;
    };

    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < so.max_iter; ++it) {
        Vec x_end;
        Mat M = detail::monodromy(field, &model, x, T, so.integ_tol, &x_end);
        Vec G = residual_vec(x, x_end);
        res = G.head(d).norm();
        if (G.norm() < so.tol) break;
        Mat J = Mat::Zero(rows, d + 1);
        J.topLeftCorner(d, d) = M - Mat::Identity(d, d);
        J.topRightCorner(d, 1) = field(x_end);
        J.block(d, 0, 1, d) = phase_dir.transpose();
        for (size_t bi = 0; bi < blocks.size(); ++bi)
            J.block(d + 1 + bi, blocks[bi].begin, 1, blocks[bi].len) =
                x.segment(blocks[bi].begin, blocks[bi].len).transpose();
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(so.sv_cutoff);
        Vec du = svd.solve(-G);
        // damped step
        double lambda = 1.0;
        for (int half = 0; half < 5; ++half) {
            Vec xn = x + lambda * du.head(d);
            double Tn = T + lambda * du[d];
            if (Tn <= 0) {
                lambda *= 0.5;
                continue;
            }
            Vec xe = integrate(field, xn, Tn, iopt);
            Vec Gn = residual_vec(xn, xe);
            if (Gn.norm() < G.norm() || half == 4) {
                x = xn;
                T = Tn;
                break;
            }
            lambda *= 0.5;
        }
    }
    model.project(x);
    {
        Vec xe = integrate(field, x, T, iopt);
        res = (xe - x - L).norm();
    }
    if (!(res < so.orbit_tol))
        throw NoConvergence("shoot: no convergence (residual " + std::to_string(res) + ")");

    ClosedOrbit orb;
    orb.x0 = x;
    orb.period = T;
    orb.winding = winding.empty() ? model.winding_of(integrate(field, x, T, iopt) - x) : winding;
    orb.residual = res;
    orb.simple = true;

    // divisor check: minimal period and simplicity
    for (int k = so.divisor_max; k >= 2; --k) {
        bool divisible = true;
        std::vector<long long> wk;
        for (auto w : orb.winding) {
            if (w % k != 0) divisible = false;
            wk.push_back(w / k);
        }
        if (!divisible) continue;
        Vec xk = integrate(field, x, T / k, iopt);
        double dk = (xk - x - model.lattice(wk)).norm();
        if (dk < 1e-4) {
            if (so.reduce_to_primitive) {
                ShootOptions inner = so;
                inner.reduce_to_primitive = false;
                ClosedOrbit prim = shoot_closed_orbit(field, model, x, T / k, wk, inner);
                prim.simple = prim.residual < so.orbit_tol;
                return prim;
            }
            orb.simple = false;
            break;
        }
    }
    orb.cls = model.class_of_winding(orb.winding);
    Vec xw = orb.x0;
    model.wrap(xw);
    orb.x0 = xw;
    return orb;
}

// Transverse Floquet multipliers: the monodromy's quotient action modulo the
// invariant directions (flow direction, sphere-block radial directions).
// nullity counts unit multipliers of the quotient (Morse-Bott dimension).
inline void floquet(ClosedOrbit& orb, const VectorField& field, const Model& model,
                    double integ_tol = 1e-11, double sv_cutoff = 1e-6) {
    const int d = static_cast<int>(orb.x0.size());
    Mat M = detail::monodromy(field, &model, orb.x0, orb.period, integ_tol);
    // invariant subspace: flow direction + constraint radial directions
    std::vector<Vec> inv;
    Vec R = field(orb.x0);
    inv.push_back(R / R.norm());
    for (auto& b : model.chart_ref().spheres) {
        Vec rad = Vec::Zero(d);
        rad.segment(b.begin, b.len) = orb.x0.segment(b.begin, b.len).normalized();
        inv.push_back(rad);
    }
    const int r = static_cast<int>(inv.size());
    Mat S(d, d);
    for (int i = 0; i < r; ++i) S.col(i) = inv[i];
    // complete with an orthonormal complement
    Mat A(d, r);
    for (int i = 0; i < r; ++i) A.col(i) = inv[i];
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ();
    for (int i = r; i < d; ++i) S.col(i) = Q.col(i);
    // quotient block of S^{-1} M S
    Mat T = S.partialPivLu().solve(M * S);
    Mat quotient = T.bottomRightCorner(d - r, d - r);
    Eigen::EigenSolver<Mat> es(quotient);
    orb.floquet.clear();
    for (int i = 0; i < quotient.rows(); ++i)
        orb.floquet.push_back(es.eigenvalues()[i]);
    std::sort(orb.floquet.begin(), orb.floquet.end(), [](auto a, auto b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    // nullity of (quotient - I) by singular values
    Eigen::JacobiSVD<Mat> svd(quotient - Mat::Identity(quotient.rows(), quotient.cols()));
    orb.nullity = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] < sv_cutoff) ++orb.nullity;
    bool any_unit = false;
    for (auto& mu : orb.floquet)
        if (std::abs(mu - std::complex<double>(1, 0)) < 1e-4) any_unit = true;
    if (orb.nullity == 0 && !any_unit)
        orb.classification = OrbitClass::Nondegenerate;
    else if (orb.nullity > 0)
        orb.classification = OrbitClass::MorseBott;
    else
        orb.classification = OrbitClass::Degenerate;
}

// ---------------------------------------------------------------------------
// Families

enum class FamilyTopology { Point, Circle, Torus, Projective };

struct OrbitFamily {
    std::vector<ClosedOrbit> members;  // primitive representatives
    double period = 0;                 // family period (cover included)
    int cover = 1;
    HomotopyClass cls;
    int dim = 0;  // parameter-space dimension after the R/Z quotient
    FamilyTopology topology = FamilyTopology::Point;
    int topology_param = 0;  // d for Torus, n-1 for Projective
    std::string descriptor;
    bool analytic = false;

    const ClosedOrbit& representative() const { return members.front(); }
};

inline int rank_contribution(const OrbitFamily& fam) {
    switch (fam.topology) {
        case FamilyTopology::Point: return 1;
        case FamilyTopology::Circle: return 2;
        case FamilyTopology::Projective: return fam.topology_param + 1;
        case FamilyTopology::Torus: return 1 << fam.topology_param;
    }
    return 1;
}

inline std::string topology_name(const OrbitFamily& f) {
    switch (f.topology) {
        case FamilyTopology::Point: return "point";
        case FamilyTopology::Circle: return "circle";
        case FamilyTopology::Projective: return "projective(" + std::to_string(f.topology_param) + ")";
        case FamilyTopology::Torus: return "torus(" + std::to_string(f.topology_param) + ")";
    }
    return "?";
}

namespace detail {

// Arclength-uniform resampling of an orbit's image.
inline std::vector<Vec> orbit_image(const VectorField& field, const Model& model,
                                    const ClosedOrbit& orb, int npts = 256) {
    DenseTrajectory traj;
    IntegrateOptions opt;
    opt.tol = 1e-12;  // keeps the cubic dense-output error well under the
    opt.chart = &model;  // 1e-4 image-identity threshold
    integrate(field, orb.x0, orb.period, opt, &traj);
    const int fine = 8 * npts;
    std::vector<double> s(fine + 1, 0.0);
    std::vector<Vec> p(fine + 1);
    for (int i = 0; i <= fine; ++i) p[i] = traj.eval(orb.period * i / fine);
    for (int i = 1; i <= fine; ++i) s[i] = s[i - 1] + (p[i] - p[i - 1]).norm();
    std::vector<Vec> out;
    out.reserve(npts);
    for (int j = 0; j < npts; ++j) {
        double target = s[fine] * j / npts;
        auto it = std::upper_bound(s.begin(), s.end(), target);
        size_t i = std::min<size_t>(static_cast<size_t>(it - s.begin()), fine) - 1;
        double seg = s[i + 1] - s[i];
        double u = seg > 0 ? (target - s[i]) / seg : 0.0;
        Vec q = p[i] + u * (p[i + 1] - p[i]);
        model.wrap(q);
        out.push_back(q);
    }
    return out;
}

// distance from a to the closed polyline through the samples of Y (chart-aware)
inline double dist_to_polyline(const Model& model, const Vec& a, const std::vector<Vec>& Y) {
    double best = std::numeric_limits<double>::infinity();
    const size_t n = Y.size();
    for (size_t i = 0; i < n; ++i) {
        Vec u = model.displacement(a, Y[i]);
        Vec w = model.displacement(Y[i], Y[(i + 1) % n]);
        double ww = w.squaredNorm();
        double t = ww > 0 ? std::clamp(-u.dot(w) / ww, 0.0, 1.0) : 0.0;
        best = std::min(best, (u + t * w).norm());
    }
    return best;
}

inline double hausdorff(const Model& model, const std::vector<Vec>& A, const std::vector<Vec>& B) {
    auto one_sided = [&](const std::vector<Vec>& X, const std::vector<Vec>& Y) {
        double worst = 0.0;
        for (const auto& a : X) worst = std::max(worst, dist_to_polyline(model, a, Y));
        return worst;
    };
    return std::max(one_sided(A, B), one_sided(B, A));
}

inline double min_image_distance(const Model& model, const std::vector<Vec>& A,
                                 const std::vector<Vec>& B) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : A)
        for (const auto& b : B) best = std::min(best, model.distance(a, b));
    return best;
}

inline bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - 1e-12) return true;
        if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
}

}  // namespace detail

struct SeedGrid {
    std::vector<int> counts;  // per periodic/chart coordinate, model-specific
    int total() const {
        int t = 1;
        for (int c : counts) t *= c;
        return t;
    }
};

struct ScanOptions {
    ShootOptions shoot;
    double integ_tol = 1e-10;
    double accept_radius = 0.2;   // near-return acceptance for seeding
    double dedupe_hausdorff = 1e-4;
    double family_merge_radius = 0.05;
    double period_match = 1e-6;
    int image_points = 256;
    int dense_samples = 4096;
    unsigned threads = 0;
    int max_winding = 8;
};

struct ScanReport {
    int seeds = 0;
    int candidates = 0;
    int converged = 0;
    bool exhausted() const { return seeds > 0 && converged == 0; }
};

namespace detail {

inline std::vector<Vec> make_seeds(const Model& model, const SeedGrid& grid) {
    const Chart& c = model.chart_ref();
    std::vector<Vec> seeds;
    switch (model.kind()) {
        case ModelKind::Torus3:
        case ModelKind::CutS2xS1:
        case ModelKind::CutS3: {
            int nx = grid.counts.size() > 0 ? grid.counts[0] : 1;
            int ny = grid.counts.size() > 1 ? grid.counts[1] : 1;
            int nt = grid.counts.size() > 2 ? grid.counts[2] : 16;
            double lx = c.period[0], ly = c.period[1];
            double lt = c.period[2] > 0 ? c.period[2] : 2 * kPi;
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j)
                    for (int l = 0; l < nt; ++l) {
                        Vec x(3);
                        x << lx * i / nx, ly * j / ny,
                            c.period[2] > 0 ? lt * l / nt : lt * (l + 0.5) / (nt + 0.0);
                        seeds.push_back(x);
                    }
            break;
        }
        case ModelKind::Sphere:
        case ModelKind::Ellipsoid:
        case ModelKind::FlatTorusCosphere: {
            int count = 1;
            for (int g : grid.counts) count *= g;
            if (grid.counts.empty()) count = 32;
            std::mt19937_64 rng(0xa11ce5ULL);
            std::normal_distribution<double> nd;
            std::uniform_real_distribution<double> ud(0.0, 1.0);
            for (int i = 0; i < count; ++i) {
                Vec x(c.ambient_dim);
                for (int d2 = 0; d2 < c.ambient_dim; ++d2)
                    x[d2] = c.period[d2] > 0 ? c.period[d2] * ud(rng) : nd(rng);
                model.project(x);
                seeds.push_back(x);
            }
            // axis seeds help the scan land on the coordinate-plane circles
            if (model.kind() != ModelKind::FlatTorusCosphere)
                for (int j = 0; j < model.n(); ++j) {
                    Vec x = Vec::Zero(c.ambient_dim);
                    x[2 * j] = 1.0;
                    seeds.push_back(x);
                }
            break;
        }
    }
    return seeds;
}

}  // namespace detail

// Recurrence-seeded closed-orbit scan. Returns families of primitive orbits
// (optionally restricted to a class via covers) sorted by (period, base point).
inline std::vector<OrbitFamily> scan_orbits(const VectorField& field, const Model& model,
                                            const std::optional<HomotopyClass>& cls,
                                            double T_lo, double T_hi, const SeedGrid& grid,
                                            const ScanOptions& opt = {}, ScanReport* report = nullptr) {
    if (!(T_lo < T_hi) || !std::isfinite(T_hi)) throw std::invalid_argument("scan window must be finite");
    auto seeds = detail::make_seeds(model, grid);
    std::vector<std::vector<ClosedOrbit>> found(seeds.size());
    std::vector<int> cand_count(seeds.size(), 0);

    parallel_for(seeds.size(), [&](size_t si) {
        const Vec& x0 = seeds[si];
        DenseTrajectory traj;
        IntegrateOptions iopt;
        iopt.tol = opt.integ_tol;
        iopt.chart = &model;
        try {
            integrate(field, x0, T_hi * 1.12, iopt, &traj);
        } catch (const ChartExit&) {
            return;  // trajectory left a cut chart; no orbit through this seed
        } catch (const std::exception&) {
            return;
        }
        const int M = opt.dense_samples;
        double prev = std::numeric_limits<double>::infinity(), prev2 = prev;
        double t_prev = 0, t_prev2 = 0;
        for (int i = 1; i <= M; ++i) {
            double t = traj.t_end() * i / M;
            Vec disp = traj.eval(t) - x0;
            // split off nearest lattice vector in periodic coordinates
            Vec L = Vec::Zero(disp.size());
            const Chart& c = model.chart_ref();
            bool sane = true;
            for (int d2 = 0; d2 < c.ambient_dim; ++d2)
                if (c.period[d2] > 0) {
                    double w = std::round(disp[d2] / c.period[d2]);
                    if (std::abs(w) > opt.max_winding) sane = false;
                    L[d2] = c.period[d2] * w;
                }
            double r = sane ? (disp - L).norm() : std::numeric_limits<double>::infinity();
            // local minimum of the near-return residual
            if (i >= 2 && prev < r && prev < prev2 && prev < opt.accept_radius && t_prev >= T_lo * 0.85 &&
                t_prev <= T_hi * 1.1) {
                ++cand_count[si];
                Vec dprev = traj.eval(t_prev) - x0;
                std::vector<long long> w = model.winding_of(dprev);
                try {
                    ClosedOrbit orb = shoot_closed_orbit(field, model, x0, t_prev, w, opt.shoot);
                    floquet(orb, field, model, opt.shoot.integ_tol, opt.shoot.sv_cutoff);
                    found[si].push_back(std::move(orb));
                } catch (const std::exception&) {
                }
            }
            prev2 = prev;
            t_prev2 = t_prev;
            prev = r;
            t_prev = t;
        }
        (void)t_prev2;
    }, opt.threads);

    // deterministic flatten
    std::vector<ClosedOrbit> orbits;
    int cands = 0;
    for (size_t i = 0; i < found.size(); ++i) {
        cands += cand_count[i];
        for (auto& o : found[i]) orbits.push_back(std::move(o));
    }
    if (report) {
        report->seeds = static_cast<int>(seeds.size());
        report->candidates = cands;
        report->converged = static_cast<int>(orbits.size());
    }

    // dedupe identical images
    std::vector<std::vector<Vec>> images;
    std::vector<ClosedOrbit> unique_orbits;
    for (auto& o : orbits) {
        auto img = detail::orbit_image(field, model, o, opt.image_points);
        bool dup = false;
        for (size_t i = 0; i < unique_orbits.size(); ++i) {
            if (std::abs(unique_orbits[i].period - o.period) > opt.period_match) continue;
            if (detail::hausdorff(model, images[i], img) < opt.dedupe_hausdorff) {
                dup = true;
                if (detail::lex_less(o.x0, unique_orbits[i].x0)) {
                    unique_orbits[i] = o;
                    images[i] = img;
                }
                break;
            }
        }
        if (!dup) {
            unique_orbits.push_back(o);
            images.push_back(std::move(img));
        }
    }

    // group same-period orbits into Morse-Bott families by image proximity
    std::vector<OrbitFamily> families;
    std::vector<std::vector<Vec>> family_images;
    for (size_t i = 0; i < unique_orbits.size(); ++i) {
        auto& o = unique_orbits[i];
        bool merged = false;
        for (size_t fi = 0; fi < families.size(); ++fi) {
            auto& fam = families[fi];
            if (std::abs(fam.members.front().period - o.period) > opt.period_match) continue;
            if (!(fam.members.front().cls == o.cls)) continue;
            if (o.nullity > 0 && fam.members.front().nullity > 0 &&
                detail::min_image_distance(model, family_images[fi], images[i]) <
                    opt.family_merge_radius) {
                fam.members.push_back(o);
                merged = true;
                break;
            }
        }
        if (!merged) {
            OrbitFamily fam;
            fam.members.push_back(o);
            fam.cls = o.cls;
            families.push_back(std::move(fam));
            family_images.push_back(images[i]);
        }
    }

    // classify topology from the representative's nullity
    for (auto& fam : families) {
        // representative: lexicographically smallest base point
        std::sort(fam.members.begin(), fam.members.end(),
                  [](const ClosedOrbit& a, const ClosedOrbit& b) { return detail::lex_less(a.x0, b.x0); });
        const auto& rep = fam.members.front();
        fam.dim = rep.nullity;
        if (rep.nullity == 0) {
            fam.topology = FamilyTopology::Point;
        } else if ((model.kind() == ModelKind::Sphere || model.kind() == ModelKind::Ellipsoid) &&
                   rep.nullity == 2 * model.n() - 2) {
            fam.topology = FamilyTopology::Projective;
            fam.topology_param = model.n() - 1;
        } else if (rep.nullity == 1) {
            fam.topology = FamilyTopology::Circle;
        } else {
            fam.topology = FamilyTopology::Torus;
            fam.topology_param = rep.nullity;
        }
        fam.period = rep.period;
        fam.descriptor = "scan";
    }

    // expand primitive families into class-matched covers inside the window
    std::vector<OrbitFamily> out;
    for (const auto& fam : families) {
        const auto& rep = fam.representative();
        for (int k = 1; k <= opt.max_winding; ++k) {
            double Tk = k * rep.period;
            if (Tk < T_lo - 1e-9 || Tk > T_hi + 1e-9) continue;
            HomotopyClass ck = rep.cls.pow(k);
            if (cls && !(ck == *cls)) continue;
            OrbitFamily f = fam;
            f.cover = k * (rep.simple ? 1 : 1);
            f.period = Tk;
            f.cls = ck;
            out.push_back(std::move(f));
        }
    }
    std::sort(out.begin(), out.end(), [](const OrbitFamily& a, const OrbitFamily& b) {
        if (std::abs(a.period - b.period) > 1e-12) return a.period < b.period;
        return detail::lex_less(a.representative().x0, b.representative().x0);
    });
    return out;
}

// One record per family: class, period, dimension tag, representative point,
// Floquet data.
inline std::string families_report(const std::vector<OrbitFamily>& fams) {
    std::ostringstream os;
    os << "report = orbit-families\n";
    os << "count = " << fams.size() << "\n";
    for (const auto& f : fams) {
        const auto& rep = f.representative();
        os << "family = " << f.cls.str() << " ; period " << fmt(f.period) << " ; cover "
           << f.cover << " ; " << topology_name(f) << " ; dim " << f.dim << " ; x0 (";
        for (int i = 0; i < rep.x0.size(); ++i) os << (i ? "," : "") << fmt(rep.x0[i]);
        os << ") ; floquet [";
        for (size_t i = 0; i < rep.floquet.size(); ++i)
            os << (i ? ", " : "") << fmt(rep.floquet[i].real()) << (rep.floquet[i].imag() < 0 ? "-" : "+")
               << fmt(std::abs(rep.floquet[i].imag())) << "i";
        os << "] ; residual " << fmt(rep.residual) << "\n";
    }
    return os.str();
}

}  // namespace reebkit
