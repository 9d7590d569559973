#pragma once

// Conformal factors f > 0 rescaling a model's reference contact form to
// f*lambda_0, with certified min/max enclosures, the conformal pseudo-distance
// ln(max f / min f), and the numerical Reeb solver for the rescaled form.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <random>

#include "reebkit/geometry.hpp"

namespace reebkit {

struct ConformalFactor {
    std::function<double(const Vec&)> eval;
    double fmin = 1.0, fmax = 1.0;
    double enclosure_halfwidth = 0.0;  // certified slack on both extremes
    std::vector<int> symmetry;         // coordinate indices f is independent of
    std::string description = "one";

    double operator()(const Vec& x) const { return eval(x); }
    double ratio() const { return fmax / fmin; }
    // extremes widened by the enclosure (used by every certificate hypothesis)
    double fmin_lo() const { return fmin - enclosure_halfwidth; }
    double fmax_hi() const { return fmax + enclosure_halfwidth; }
};

inline ConformalFactor factor_one() {
    ConformalFactor f;
    f.eval = [](const Vec&) { return 1.0; };
    return f;
}

inline ConformalFactor factor_constant(double c) {
    if (c <= 0) throw std::invalid_argument("conformal factor must be positive");
    ConformalFactor f;
    f.eval = [c](const Vec&) { return c; };
    f.fmin = f.fmax = c;
    f.description = "const " + std::to_string(c);
    return f;
}

// f_r(z) = (sum |z_j|^2 / r_j^2)^{-1} on the round sphere; extremes are exact
// (attained on the z_1- and z_n-axes).
inline ConformalFactor factor_ellipsoid(const std::vector<double>& r) {
    for (size_t i = 0; i + 1 < r.size(); ++i)
        if (!(r[i] <= r[i + 1])) throw std::invalid_argument("ellipsoid weights must be nondecreasing");
    ConformalFactor f;
    int n = static_cast<int>(r.size());
    f.eval = [r, n](const Vec& x) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            s += (x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1]) / (r[j] * r[j]);
        return 1.0 / s;
    };
    f.fmin = r.front() * r.front();
    f.fmax = r.back() * r.back();
    f.description = "ellipsoid";
    return f;
}

// Torus3 preset: f(x,y,theta) = 1 + A cos(2 pi y) cos(theta). Breaks both
// translation symmetries; extremes 1 -+ A are exact (y=1/2,theta=0 / y=0,theta=0).
inline ConformalFactor factor_cos_bump(double amplitude) {
    if (!(std::abs(amplitude) < 1.0)) throw std::invalid_argument("cos-bump amplitude must be in (-1,1)");
    ConformalFactor f;
    f.eval = [amplitude](const Vec& x) {
        return 1.0 + amplitude * std::cos(2 * kPi * x[1]) * std::cos(x[2]);
    };
    f.fmin = 1.0 - std::abs(amplitude);
    f.fmax = 1.0 + std::abs(amplitude);
    f.symmetry = {0};
    f.description = "cos-bump " + std::to_string(amplitude);
    return f;
}

// ---------------------------------------------------------------------------
// Fixed expression grammar: sums of products of coordinate monomials and
// sin/cos of (frequency * coordinate). Coordinate names per model:
//   torus3: x y theta   cut models: x y t   sphere/ellipsoid: x1 y1 x2 y2 ...
//   cosphere: q1..qn p1..pn
// Term syntax (one term per entry):  coeff [* factor]...
//   factor := <name> | <name>^<int> | sin(<freq>*<name>) | cos(<freq>*<name>)

namespace detail {
struct ExprFactor {
    enum Kind { Pow, Sin, Cos } kind = Pow;
    int coord = 0;
    int power = 1;
    double freq = 1.0;
};
struct ExprTerm {
    double coeff = 0.0;
    std::vector<ExprFactor> factors;
};
}  // namespace detail

inline std::vector<std::string> coordinate_names(const Model& m) {
    switch (m.kind()) {
        case ModelKind::Torus3: return {"x", "y", "theta"};
        case ModelKind::CutS2xS1:
        case ModelKind::CutS3: return {"x", "y", "t"};
        case ModelKind::Sphere:
        case ModelKind::Ellipsoid: {
            std::vector<std::string> v;
            for (int j = 1; j <= m.n(); ++j) {
                v.push_back("x" + std::to_string(j));
                v.push_back("y" + std::to_string(j));
            }
            return v;
        }
        case ModelKind::FlatTorusCosphere: {
            std::vector<std::string> v;
            for (int j = 1; j <= m.n(); ++j) v.push_back("q" + std::to_string(j));
            for (int j = 1; j <= m.n(); ++j) v.push_back("p" + std::to_string(j));
            return v;
        }
    }
    return {};
}

ConformalFactor factor_enclose(const Model& m, ConformalFactor f, int grid_per_dim);

inline ConformalFactor factor_expression(const Model& m, const std::vector<std::string>& terms,
                                         int grid_per_dim = 64) {
    const auto names = coordinate_names(m);
    auto coord_of = [&](const std::string& s) {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == s) return static_cast<int>(i);
        throw std::invalid_argument("unknown coordinate '" + s + "' for model " + m.name());
    };
    std::vector<detail::ExprTerm> parsed;
    for (const auto& line : terms) {
        detail::ExprTerm term;
        std::string piece;
        std::vector<std::string> pieces;
        int depth = 0;
        for (char ch : line) {
            if (ch == '(') ++depth;
            if (ch == ')') --depth;
            if (ch == '*' && depth == 0) {
                pieces.push_back(piece);
                piece.clear();
            } else if (!isspace(static_cast<unsigned char>(ch)))
                piece += ch;
        }
        pieces.push_back(piece);
        if (pieces.empty()) throw std::invalid_argument("empty term");
        size_t pos = 0;
        term.coeff = std::stod(pieces[0], &pos);
        if (pos != pieces[0].size()) throw std::invalid_argument("bad coefficient '" + pieces[0] + "'");
        for (size_t i = 1; i < pieces.size(); ++i) {
            const std::string& p = pieces[i];
            detail::ExprFactor fac;
            if (p.rfind("sin(", 0) == 0 || p.rfind("cos(", 0) == 0) {
                fac.kind = p[0] == 's' ? detail::ExprFactor::Sin : detail::ExprFactor::Cos;
                if (p.back() != ')') throw std::invalid_argument("unbalanced '(' in '" + p + "'");
                std::string inner = p.substr(4, p.size() - 5);
                auto amp = inner.find('*');
                if (amp == std::string::npos) {
                    fac.freq = 1.0;
                    fac.coord = coord_of(inner);
                } else {
                    fac.freq = std::stod(inner.substr(0, amp));
                    fac.coord = coord_of(inner.substr(amp + 1));
                }
            } else {
                auto caret = p.find('^');
                fac.kind = detail::ExprFactor::Pow;
                if (caret == std::string::npos) {
                    fac.coord = coord_of(p);
                } else {
                    fac.coord = coord_of(p.substr(0, caret));
                    fac.power = std::stoi(p.substr(caret + 1));
                }
            }
            term.factors.push_back(fac);
        }
        parsed.push_back(term);
    }
    ConformalFactor f;
    f.eval = [parsed](const Vec& x) {
        double s = 0.0;
        for (const auto& t : parsed) {
            double v = t.coeff;
            for (const auto& fac : t.factors) {
                double c = x[fac.coord];
                switch (fac.kind) {
                    case detail::ExprFactor::Pow: v *= std::pow(c, fac.power); break;
                    case detail::ExprFactor::Sin: v *= std::sin(fac.freq * c); break;
                    case detail::ExprFactor::Cos: v *= std::cos(fac.freq * c); break;
                }
            }
            s += v;
        }
        return s;
    };
    f.description = "expression";
    return factor_enclose(m, std::move(f), grid_per_dim);
}

// ---------------------------------------------------------------------------
// Enclosure of min/max over the manifold: uniform chart grid, a projected
// gradient polish from the best candidates, and a Lipschitz slack from the
// largest sampled gradient norm. Presets carry exact extremes and skip this.

namespace detail {
// Sample points covering the manifold on a uniform grid in chart parameters.
inline std::vector<Vec> enclosure_grid(const Model& m, int g, double* spacing) {
    std::vector<Vec> pts;
    const Chart c = m.chart();
    switch (m.kind()) {
        case ModelKind::Torus3:
        case ModelKind::CutS2xS1:
        case ModelKind::CutS3: {
            double lx = c.period[0] > 0 ? c.period[0] : 1.0;
            double ly = c.period[1] > 0 ? c.period[1] : 1.0;
            double lt = c.period[2] > 0 ? c.period[2] : 2 * kPi;
            for (int i = 0; i < g; ++i)
                for (int j = 0; j < g; ++j)
                    for (int l = 0; l < g; ++l) {
                        Vec x(3);
                        x << lx * i / g, ly * j / g,
                            c.period[2] > 0 ? lt * l / g : lt * (l + 0.5) / g;
                        pts.push_back(x);
                    }
            *spacing = std::max({lx, ly, lt}) / g;
            break;
        }
        case ModelKind::Sphere:
        case ModelKind::Ellipsoid:
        case ModelKind::FlatTorusCosphere: {
            // quasi-random covering of the constrained chart
            std::mt19937_64 rng(0x5eedULL);
            std::normal_distribution<double> nd;
            std::uniform_real_distribution<double> ud(0.0, 1.0);
            int count = g * g * g;
            for (int i = 0; i < count; ++i) {
                Vec x(c.ambient_dim);
                for (int d = 0; d < c.ambient_dim; ++d)
                    x[d] = c.period[d] > 0 ? c.period[d] * ud(rng) : nd(rng);
                m.project(x);
                pts.push_back(x);
            }
            *spacing = 4.0 / std::cbrt(static_cast<double>(count));
            break;
        }
    }
    return pts;
}
}  // namespace detail

inline ConformalFactor factor_enclose(const Model& m, ConformalFactor f, int grid_per_dim = 64) {
    double spacing = 0.0;
    auto pts = detail::enclosure_grid(m, grid_per_dim, &spacing);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    Vec arg_lo, arg_hi;
    double max_grad = 0.0;
    const double h = 1e-5;
    Mat frame;
    for (const auto& x : pts) {
        double v = f(x);
        if (v < lo) {
            lo = v;
            arg_lo = x;
        }
        if (v > hi) {
            hi = v;
            arg_hi = x;
        }
    }
    // sampled tangential gradient norms (subsample for cost)
    for (size_t i = 0; i < pts.size(); i += std::max<size_t>(1, pts.size() / 2000)) {
        const Vec& x = pts[i];
        Mat B = m.tangent_frame(x);
        double g2 = 0.0;
        for (int j = 0; j < B.cols(); ++j) {
            double d = (f(x + h * B.col(j)) - f(x - h * B.col(j))) / (2 * h);
            g2 += d * d;
        }
        max_grad = std::max(max_grad, std::sqrt(g2));
    }
    // one polish pass per candidate extremum: projected gradient steps
    auto polish = [&](Vec x, double sign) {
        double step = spacing;
        double best = sign * f(x);
        for (int it = 0; it < 60; ++it) {
            Mat B = m.tangent_frame(x);
            Vec g = Vec::Zero(B.cols());
            for (int j = 0; j < B.cols(); ++j)
                g[j] = (f(x + h * B.col(j)) - f(x - h * B.col(j))) / (2 * h);
            Vec dir = B * g * sign;
            if (dir.norm() < 1e-14) break;
            Vec xn = x + step * dir / dir.norm();
            m.project(xn);
            double vn = sign * f(xn);
            if (vn > best) {
                best = vn;
                x = xn;
            } else
                step *= 0.5;
            if (step < 1e-12) break;
        }
        return sign * best;
    };
    if (arg_lo.size()) lo = std::min(lo, polish(arg_lo, -1.0));
    if (arg_hi.size()) hi = std::max(hi, polish(arg_hi, +1.0));
    f.fmin = lo;
    f.fmax = hi;
    f.enclosure_halfwidth = 0.5 * max_grad * spacing;
    if (f.fmin - f.enclosure_halfwidth <= 0)
        throw std::invalid_argument("conformal factor not certifiably positive");
    return f;
}

// Conformal pseudo-distance d(f lambda, lambda) = ln(max f / min f), with the
// propagated enclosure half-width.
struct ConformalDistance {
    double value;
    double halfwidth;
};
inline ConformalDistance conformal_distance(const ConformalFactor& f) {
    double v = std::log(f.fmax / f.fmin);
    double hw = f.enclosure_halfwidth * (1.0 / f.fmax + 1.0 / f.fmin);
    return {v, hw};
}

// ---------------------------------------------------------------------------
// Reeb field of lambda = f * lambda_model, solved pointwise from the defining
// equations  (f lambda)(R) = 1,  d(f lambda)(R, e_i) = 0  over a tangent
// frame e_i, with d(f lambda) assembled by central differences (step 1e-5).

struct ReebSolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Vec reeb_of_conformal(const Model& m, const ConformalFactor& f, const Vec& x,
                             double fd_step = 1e-5, double residual_tol = 1e-6) {
    const Mat B = m.tangent_frame(x);
    const int d = static_cast<int>(B.cols());
    auto covector = [&](const Vec& y) -> Vec { return f(y) * m.contact(y); };

    const Vec c0 = covector(x);
    // central-difference covectors along each frame direction
    std::vector<Vec> cp(d), cm(d);
    for (int i = 0; i < d; ++i) {
        cp[i] = covector(x + fd_step * B.col(i));
        cm[i] = covector(x - fd_step * B.col(i));
    }
    // A[i][j] = d(f lambda)(e_i, e_j)
    Mat A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double didj = (cp[i] - cm[i]).dot(B.col(j)) / (2 * fd_step);
            double djdi = (cp[j] - cm[j]).dot(B.col(i)) / (2 * fd_step);
            A(i, j) = didj - djdi;
        }
    Mat sys(d + 1, d);
    Vec rhs = Vec::Zero(d + 1);
    sys.row(0) = (c0.transpose() * B).eval();
    rhs[0] = 1.0;
    sys.bottomRows(d) = A;  // rows i: d(f lambda)(e_i, R) = 0
    Eigen::ColPivHouseholderQR<Mat> qr(sys);
    if (qr.rank() < d)
        throw ReebSolveError("reeb_of_conformal: singular defining system (non-contact input?)");
    Vec coef = qr.solve(rhs);
    double res = (sys * coef - rhs).norm();
    if (res > residual_tol)
        throw ReebSolveError("reeb_of_conformal: defining-equation residual " + std::to_string(res));
    return B * coef;
}

// Field object for the rescaled form, usable by the integrator.
inline std::function<Vec(const Vec&)> conformal_field(const Model& m, const ConformalFactor& f) {
    if (f.description == "one") return [m](const Vec& x) { return m.reeb_raw(x); };
    return [m, f](const Vec& x) { return reeb_of_conformal(m, f, x); };
}

}  // namespace reebkit
