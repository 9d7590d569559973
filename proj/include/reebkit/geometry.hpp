#pragma once

// Catalog of model contact manifolds with analytic contact forms and Reeb
// fields, chart bookkeeping (periodic identifications, unit-sphere
// constraints, excluded loci of the cut models) and exact free-homotopy-class
// arithmetic.
//
// Coordinate conventions:
//   Sphere(n)/Ellipsoid(r) : state in R^{2n}, pairs (x_j, y_j) = (Re z_j, Im z_j),
//                            constraint |z| = 1. Reference forms:
//                              lambda_0 = (1/2) sum (x_j dy_j - y_j dx_j),
//                              lambda_r = (sum |z_j|^2 / r_j^2)^{-1} lambda_0.
//   Torus3(k)              : (x, y, theta), x,y in R/Z, theta in R/2piZ,
//                            lambda_k = cos(k theta) dx + sin(k theta) dy.
//   CutS2xS1(k)/CutS3(k)   : (x, y, t), x,y in R/2piZ, t in (0, 2pi);
//                            eta_k  = cos(k t) dx + sin(k t) dy,
//                            zeta_k = cos((k+1/4) t) dx + sin((k+1/4) t) dy.
//                            The fibers over t = 0, 2pi are excluded from the
//                            chart and stored as distinguished orbits.
//   FlatTorusCosphere(n)   : (q_1..q_n, p_1..p_n), q in R/Z, |p| = 1,
//                            lambda = sum p_i dq_i (unit-cosphere geodesic flow).

#include <Eigen/Dense>
#include <optional>
#include <sstream>
#include <string>
#include <memory>
#include <variant>
#include <vector>

#include "reebkit/numerics.hpp"

namespace reebkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct ChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Free homotopy class. `v` is the integer representation in the model's
// class group; empty for models whose group is trivial.
struct HomotopyClass {
    std::vector<long long> v;

    static HomotopyClass trivial() { return {}; }
    bool is_identity() const {
        for (auto c : v)
            if (c != 0) return false;
        return true;
    }
    HomotopyClass pow(long long k) const {
        HomotopyClass r = *this;
        for (auto& c : r.v) c *= k;
        return r;
    }
    // primitive <=> nonzero and gcd of entries is 1
    bool is_primitive() const {
        if (is_identity()) return false;
        long long g = 0;
        for (auto c : v) g = gcdll(g, c);
        return g == 1;
    }
    // 0 = infinite order; the identity has order 1. All catalog groups are
    // free abelian, so every nontrivial class has infinite order.
    long long order() const { return is_identity() ? 1 : 0; }
    // |alpha| used in the fast-orbit thresholds: 1 for the identity,
    // infinite otherwise (represented as 0; callers treat 0 as "always").
    long long abs_order() const { return order(); }

    bool operator==(const HomotopyClass& o) const { return v == o.v; }
    std::string str() const {
        if (v.empty()) return "e";
        std::ostringstream os;
        os << "(";
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << ")";
        return os.str();
    }
};

struct Chart {
    int ambient_dim = 0;
    int manifold_dim = 0;
    std::vector<double> period;  // per coordinate, 0 = non-periodic
    struct Interval {
        int idx;
        double lo, hi;
    };
    std::vector<Interval> bounded;  // open intervals (cut models' t)
    struct SphereBlock {
        int begin, len;
    };
    std::vector<SphereBlock> spheres;
};

enum class ModelKind { Sphere, Ellipsoid, Torus3, CutS2xS1, CutS3, FlatTorusCosphere };

class Model {
  public:
    static Model sphere(int n) {
        Model m;
        m.kind_ = ModelKind::Sphere;
        m.n_ = n;
        return m;
    }
    static Model ellipsoid(const std::vector<double>& r) {
        Model m;
        m.kind_ = ModelKind::Ellipsoid;
        m.n_ = static_cast<int>(r.size());
        m.r_ = r;
        for (size_t i = 0; i + 1 < r.size(); ++i)
            if (!(r[i] < r[i + 1]))
                throw std::invalid_argument("ellipsoid weights must be strictly increasing");
        if (!r.empty() && r[0] <= 0) throw std::invalid_argument("ellipsoid weights must be positive");
        return m;
    }
    static Model torus3(int k) {
        Model m;
        m.kind_ = ModelKind::Torus3;
        m.k_ = k;
        if (k < 1) throw std::invalid_argument("torus3 requires k >= 1");
        return m;
    }
    static Model cut_s2xs1(int k) {
        Model m;
        m.kind_ = ModelKind::CutS2xS1;
        m.k_ = k;
        if (k < 1) throw std::invalid_argument("cut model requires k >= 1");
        return m;
    }
    static Model cut_s3(int k) {
        Model m;
        m.kind_ = ModelKind::CutS3;
        m.k_ = k;
        if (k < 1) throw std::invalid_argument("cut model requires k >= 1");
        return m;
    }
    static Model flat_torus_cosphere(int n) {
        Model m;
        m.kind_ = ModelKind::FlatTorusCosphere;
        m.n_ = n;
        if (n < 2) throw std::invalid_argument("cosphere requires n >= 2");
        return m;
    }

    ModelKind kind() const { return kind_; }
    int n() const { return n_; }
    int k() const { return k_; }
    const std::vector<double>& weights() const { return r_; }

    // cached chart descriptor (query helpers below are hot-path)
    const Chart& chart_ref() const {
        if (!chart_cache_) chart_cache_ = std::make_shared<Chart>(chart());
        return *chart_cache_;
    }

    int dim() const {  // 2n-1
        switch (kind_) {
            case ModelKind::Sphere:
            case ModelKind::Ellipsoid: return 2 * n_ - 1;
            case ModelKind::Torus3:
            case ModelKind::CutS2xS1:
            case ModelKind::CutS3: return 3;
            case ModelKind::FlatTorusCosphere: return 2 * n_ - 1;
        }
        return 0;
    }

    Chart chart() const {
        Chart c;
        switch (kind_) {
            case ModelKind::Sphere:
            case ModelKind::Ellipsoid:
                c.ambient_dim = 2 * n_;
                c.manifold_dim = 2 * n_ - 1;
                c.period.assign(c.ambient_dim, 0.0);
                c.spheres.push_back({0, 2 * n_});
                break;
            case ModelKind::Torus3:
                c.ambient_dim = 3;
                c.manifold_dim = 3;
                c.period = {1.0, 1.0, 2.0 * kPi};
                break;
            case ModelKind::CutS2xS1:
            case ModelKind::CutS3:
                c.ambient_dim = 3;
                c.manifold_dim = 3;
                c.period = {2.0 * kPi, 2.0 * kPi, 0.0};
                c.bounded.push_back({2, 0.0, 2.0 * kPi});
                break;
            case ModelKind::FlatTorusCosphere:
                c.ambient_dim = 2 * n_;
                c.manifold_dim = 2 * n_ - 1;
                c.period.assign(c.ambient_dim, 0.0);
                for (int i = 0; i < n_; ++i) c.period[i] = 1.0;
                c.spheres.push_back({n_, n_});
                break;
        }
        return c;
    }

    // Angular frequency of the cut-model forms: k for eta_k, k+1/4 for zeta_k.
    double cut_frequency() const {
        return kind_ == ModelKind::CutS3 ? k_ + 0.25 : static_cast<double>(k_);
    }

    // Reference contact form as an ambient covector: lambda(v) = contact(x).dot(v).
    Vec contact(const Vec& x) const {
        Vec c = Vec::Zero(x.size());
        switch (kind_) {
            case ModelKind::Sphere:
            case ModelKind::Ellipsoid: {
                for (int j = 0; j < n_; ++j) {
                    c[2 * j] = -0.5 * x[2 * j + 1];
                    c[2 * j + 1] = 0.5 * x[2 * j];
                }
                if (kind_ == ModelKind::Ellipsoid) c *= ellipsoid_factor(x);
                break;
            }
            case ModelKind::Torus3:
                c[0] = std::cos(k_ * x[2]);
                c[1] = std::sin(k_ * x[2]);
                break;
            case ModelKind::CutS2xS1:
            case ModelKind::CutS3:
                c[0] = std::cos(cut_frequency() * x[2]);
                c[1] = std::sin(cut_frequency() * x[2]);
                break;
            case ModelKind::FlatTorusCosphere:
                for (int i = 0; i < n_; ++i) c[i] = x[n_ + i];
                break;
        }
        return c;
    }

    // The ellipsoid's conformal factor relative to the round form,
    // f_r(z) = (sum |z_j|^2 / r_j^2)^{-1}; evaluable slightly off the sphere.
    double ellipsoid_factor(const Vec& x) const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) {
            double m2 = x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1];
            s += m2 / (r_[j] * r_[j]);
        }
        return 1.0 / s;
    }

    // Analytic Reeb vector field of the reference form.
    Vec reeb(const Vec& x, bool allow_pole = false) const {
        require_in_chart(x, allow_pole);
        return reeb_raw(x);
    }

    // Unchecked evaluation for integrator stages, whose intermediate points
    // may sit slightly off the constraint set; accepted steps are validated
    // by the integrator itself.
    Vec reeb_raw(const Vec& x) const {
        Vec v = Vec::Zero(x.size());
        switch (kind_) {
            case ModelKind::Sphere:
                for (int j = 0; j < n_; ++j) {
                    v[2 * j] = -2.0 * x[2 * j + 1];
                    v[2 * j + 1] = 2.0 * x[2 * j];
                }
                break;
            case ModelKind::Ellipsoid:
                for (int j = 0; j < n_; ++j) {
                    double w = 2.0 / (r_[j] * r_[j]);
                    v[2 * j] = -w * x[2 * j + 1];
                    v[2 * j + 1] = w * x[2 * j];
                }
                break;
            case ModelKind::Torus3:
                v[0] = std::cos(k_ * x[2]);
                v[1] = std::sin(k_ * x[2]);
                break;
            case ModelKind::CutS2xS1:
            case ModelKind::CutS3:
                v[0] = std::cos(cut_frequency() * x[2]);
                v[1] = std::sin(cut_frequency() * x[2]);
                break;
            case ModelKind::FlatTorusCosphere:
                for (int i = 0; i < n_; ++i) v[i] = x[n_ + i];
                break;
        }
        return v;
    }

    double contact_eval(const Vec& x, const Vec& v) const {
        if (v.size() != x.size()) throw ChartError("contact_eval: chart frame mismatch");
        return contact(x).dot(v);
    }

    // Orthonormal basis of the tangent space at x, as columns (ambient_dim x dim).
    Mat tangent_frame(const Vec& x) const {
        const Chart& c = chart_ref();
        if (c.spheres.empty()) return Mat::Identity(c.ambient_dim, c.ambient_dim);
        Mat frame(c.ambient_dim, c.manifold_dim);
        int col = 0;
        // free/periodic coordinates not inside a sphere block
        std::vector<bool> in_block(c.ambient_dim, false);
        for (auto& b : c.spheres)
            for (int i = 0; i < b.len; ++i) in_block[b.begin + i] = true;
        for (int i = 0; i < c.ambient_dim; ++i)
            if (!in_block[i]) frame.col(col++) = Vec::Unit(c.ambient_dim, i);
        for (auto& b : c.spheres) {
            Vec u = x.segment(b.begin, b.len);
            double nu = u.norm();
            if (nu == 0.0) throw ChartError("tangent_frame: degenerate sphere block");
            u /= nu;
            // complete u to an orthonormal basis of the block; columns 2..len
            // of the Householder Q span the orthogonal complement of u
            Eigen::HouseholderQR<Mat> qr(u);
            Mat Q = qr.householderQ();
            for (int i = 1; i < b.len; ++i) {
                frame.col(col).setZero();
                frame.col(col).segment(b.begin, b.len) = Q.col(i);
                ++col;
            }
        }
        return frame;
    }

    // Project sphere blocks back to the unit sphere (integrator renormalization).
    void project(Vec& x) const {
        for (auto& b : chart_ref().spheres) {
            double nu = x.segment(b.begin, b.len).norm();
            if (nu > 0) x.segment(b.begin, b.len) /= nu;
        }
    }

    // Wrap periodic coordinates into [0, period).
    void wrap(Vec& x) const {
        const Chart& c = chart_ref();
        for (int i = 0; i < c.ambient_dim; ++i)
            if (c.period[i] > 0) {
                x[i] = std::fmod(x[i], c.period[i]);
                if (x[i] < 0) x[i] += c.period[i];
            }
    }

    bool in_chart(const Vec& x, double tol = 1e-6) const {
        const Chart& c = chart_ref();
        if (x.size() != c.ambient_dim) return false;
        for (auto& b : c.bounded)
            if (!(x[b.idx] > b.lo + 0.0 && x[b.idx] < b.hi - 0.0)) return false;
        for (auto& b : c.spheres)
            if (std::abs(x.segment(b.begin, b.len).norm() - 1.0) > tol) return false;
        return true;
    }

    void require_in_chart(const Vec& x, bool allow_pole) const {
        const Chart& c = chart_ref();
        if (x.size() != c.ambient_dim) throw ChartError("point has wrong dimension for chart");
        for (auto& b : c.spheres)
            if (std::abs(x.segment(b.begin, b.len).norm() - 1.0) > 1e-6)
                throw ChartError("point outside chart: sphere constraint violated");
        for (auto& b : c.bounded) {
            bool at_pole = std::abs(x[b.idx] - b.lo) < 1e-12 || std::abs(x[b.idx] - b.hi) < 1e-12;
            bool inside = x[b.idx] > b.lo && x[b.idx] < b.hi;
            if (!inside && !(at_pole && allow_pole))
                throw ChartError(at_pole ? "pole-locus query without analytic branch"
                                         : "point outside chart");
        }
    }

    // Displacement b - a with periodic coordinates reduced to the nearest
    // representative; sphere blocks are taken verbatim.
    Vec displacement(const Vec& a, const Vec& b) const {
        const Chart& c = chart_ref();
        Vec d = b - a;
        for (int i = 0; i < c.ambient_dim; ++i)
            if (c.period[i] > 0) d[i] -= c.period[i] * std::round(d[i] / c.period[i]);
        return d;
    }
    double distance(const Vec& a, const Vec& b) const { return displacement(a, b).norm(); }

    // Lattice vector realizing the given winding numbers of the periodic
    // coordinates (used as the shooting target in the universal cover).
    Vec lattice(const std::vector<long long>& winding) const {
        const Chart& c = chart_ref();
        Vec L = Vec::Zero(c.ambient_dim);
        size_t w = 0;
        for (int i = 0; i < c.ambient_dim; ++i)
            if (c.period[i] > 0) {
                if (w < winding.size()) L[i] = c.period[i] * winding[w];
                ++w;
            }
        return L;
    }
    std::vector<long long> winding_of(const Vec& displacement) const {
        const Chart& c = chart_ref();
        std::vector<long long> w;
        for (int i = 0; i < c.ambient_dim; ++i)
            if (c.period[i] > 0) w.push_back(std::llround(displacement[i] / c.period[i]));
        return w;
    }

    // Free homotopy class of a closed loop with the given winding numbers.
    HomotopyClass class_of_winding(const std::vector<long long>& w) const {
        switch (kind_) {
            case ModelKind::Sphere:
            case ModelKind::Ellipsoid:
            case ModelKind::CutS3: return HomotopyClass::trivial();
            case ModelKind::Torus3: return {{w.size() > 0 ? w[0] : 0, w.size() > 1 ? w[1] : 0,
                                             w.size() > 2 ? w[2] : 0}};
            case ModelKind::CutS2xS1: return {{w.size() > 0 ? w[0] : 0}};
            case ModelKind::FlatTorusCosphere: {
                std::vector<long long> v(w.begin(), w.begin() + std::min<size_t>(w.size(), n_));
                v.resize(n_, 0);
                return {v};
            }
        }
        return HomotopyClass::trivial();
    }

    std::string name() const {
        std::ostringstream os;
        switch (kind_) {
            case ModelKind::Sphere: os << "sphere(" << n_ << ")"; break;
            case ModelKind::Ellipsoid: {
                os << "ellipsoid(";
                for (size_t i = 0; i < r_.size(); ++i) os << (i ? "," : "") << r_[i];
                os << ")";
                break;
            }
            case ModelKind::Torus3: os << "torus3(k=" << k_ << ")"; break;
            case ModelKind::CutS2xS1: os << "cut_s2xs1(k=" << k_ << ")"; break;
            case ModelKind::CutS3: os << "cut_s3(k=" << k_ << ")"; break;
            case ModelKind::FlatTorusCosphere: os << "flat_torus_cosphere(n=" << n_ << ")"; break;
        }
        return os.str();
    }

    // Distinguished exceptional-fiber orbits of the cut models (t = 0, 2pi),
    // stored analytically; the chart interior never reaches them.
    struct PoleFiber {
        Vec base;              // representative (x, y, t)
        HomotopyClass cls;     // class of the simple fiber orbit
        double period;         // simple period (2pi)
        std::string which;     // "t=0" or "t=2pi"
    };
    std::vector<PoleFiber> pole_fibers() const {
        std::vector<PoleFiber> out;
        if (kind_ != ModelKind::CutS2xS1 && kind_ != ModelKind::CutS3) return out;
        HomotopyClass c0 = kind_ == ModelKind::CutS2xS1 ? HomotopyClass{{1}} : HomotopyClass::trivial();
        Vec b0(3), b1(3);
        b0 << 0, 0, 0;
        b1 << 0, 0, 2 * kPi;
        out.push_back({b0, c0, 2 * kPi, "t=0"});
        out.push_back({b1, c0, 2 * kPi, "t=2pi"});
        return out;
    }

  private:
    mutable std::shared_ptr<Chart> chart_cache_;
    ModelKind kind_ = ModelKind::Sphere;
    int n_ = 2;
    int k_ = 1;
    std::vector<double> r_;
};

}  // namespace reebkit
