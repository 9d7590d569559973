#pragma once

// Period spectra T(lambda), T(lambda, alpha): exact analytic enumeration for
// the catalog models, numeric enumeration through the orbit scan, ingestion
// of externally supplied spectra, and the order statistics T_min, T_min(alpha)
// and T^+.

#include "reebkit/orbits.hpp"
#include "reebkit/report.hpp"

namespace reebkit {

enum class Provenance { Analytic, Numeric, External };

struct SpectrumEntry {
    double period = 0;
    HomotopyClass cls;
    int cover = 1;
    FamilyTopology topology = FamilyTopology::Point;
    int topology_param = 0;
    int family_dim = 0;
    std::string descriptor;
    double residual = 0.0;  // meaningful for numeric provenance
    std::optional<Vec> representative;
    std::optional<OrbitFamily> family;  // populated by the numeric path
};

struct PeriodSpectrum {
    std::optional<Model> model;
    std::vector<SpectrumEntry> entries;
    double cap = 0;
    Provenance provenance = Provenance::Analytic;
    std::string annotation;  // e.g. resonant ellipsoid weights

    bool empty() const { return entries.empty(); }
};

struct SpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void sort_entries(std::vector<SpectrumEntry>& es) {
    std::sort(es.begin(), es.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (std::abs(a.period - b.period) > 1e-12) return a.period < b.period;
        if (a.cls.v != b.cls.v) return a.cls.v < b.cls.v;
        return a.descriptor < b.descriptor;
    });
}

// rational-dependence probe for ellipsoid weights (small denominators only)
inline bool rationally_dependent(const std::vector<double>& r) {
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = i + 1; j < r.size(); ++j) {
            double q = (r[i] * r[i]) / (r[j] * r[j]);
            for (int den = 1; den <= 32; ++den) {
                double num = q * den;
                if (std::abs(num - std::round(num)) < 1e-12) return true;
            }
        }
    return false;
}

}  // namespace detail

inline PeriodSpectrum analytic_spectrum(const Model& m, double cap) {
    if (!(cap > 0)) throw std::invalid_argument("spectrum cap must be positive");
    PeriodSpectrum spec;
    spec.model = m;
    spec.cap = cap;
    spec.provenance = Provenance::Analytic;
    auto& es = spec.entries;

    switch (m.kind()) {
        case ModelKind::Sphere: {
            const int n = m.n();
            for (int k = 1; k * kPi <= cap; ++k) {
                SpectrumEntry e;
                e.period = k * kPi;
                e.cls = HomotopyClass::trivial();
                e.cover = k;
                e.topology = FamilyTopology::Projective;
                e.topology_param = n - 1;
                e.family_dim = 2 * n - 2;
                e.descriptor = "round-family cover " + std::to_string(k);
                Vec rep = Vec::Zero(2 * n);
                rep[0] = 1.0;
                e.representative = rep;
                es.push_back(e);
            }
            break;
        }
        case ModelKind::Ellipsoid: {
            const auto& r = m.weights();
            if (detail::rationally_dependent(r))
                spec.annotation =
                    "rationally dependent weights: resonant extra tori exist; period set exact, "
                    "resonant family structure not enumerated";
            for (size_t j = 0; j < r.size(); ++j) {
                double T1 = kPi * r[j] * r[j];
                for (int k = 1; k * T1 <= cap; ++k) {
                    SpectrumEntry e;
                    e.period = k * T1;
                    e.cls = HomotopyClass::trivial();
                    e.cover = k;
                    e.topology = FamilyTopology::Point;
                    e.descriptor = "Gamma_" + std::to_string(j + 1) +
                                   (k > 1 ? " cover " + std::to_string(k) : "");
                    Vec rep = Vec::Zero(2 * static_cast<int>(r.size()));
                    rep[2 * j] = 1.0;
                    e.representative = rep;
                    es.push_back(e);
                }
            }
            break;
        }
        case ModelKind::Torus3: {
            const int k = m.k();
            const long long R = static_cast<long long>(std::floor(cap));
            for (long long mm = -R; mm <= R; ++mm)
                for (long long nn = -R; nn <= R; ++nn) {
                    if (mm == 0 && nn == 0) continue;
                    double T = std::sqrt(double(mm * mm + nn * nn));
                    if (T > cap) continue;
                    long long g = gcdll(mm, nn);
                    long long m0 = mm / g, n0 = nn / g;
                    double phi0 = std::atan2(double(n0), double(m0));
                    if (phi0 < 0) phi0 += 2 * kPi;
                    for (int j = 0; j < k; ++j) {
                        double theta = (phi0 + 2 * kPi * j) / k;
                        SpectrumEntry e;
                        e.period = T;
                        e.cls = HomotopyClass{{mm, nn, 0}};
                        e.cover = static_cast<int>(g);
                        e.topology = FamilyTopology::Circle;
                        e.family_dim = 1;
                        e.descriptor = "theta=" + fmt(theta);
                        Vec rep(3);
                        rep << 0, 0, theta;
                        e.representative = rep;
                        es.push_back(e);
                    }
                }
            break;
        }
        case ModelKind::CutS2xS1:
        case ModelKind::CutS3: {
            const bool s3 = m.kind() == ModelKind::CutS3;
            const double freq = m.cut_frequency();
            // exceptional fibers over the poles: isolated simple orbits of
            // period 2pi and their covers
            for (auto& pf : m.pole_fibers()) {
                for (int j = 1; j * pf.period <= cap; ++j) {
                    SpectrumEntry e;
                    e.period = j * pf.period;
                    e.cls = pf.cls.pow(j);
                    e.cover = j;
                    e.topology = FamilyTopology::Point;
                    e.descriptor = "pole " + pf.which + (j > 1 ? " cover " + std::to_string(j) : "");
                    e.representative = pf.base;
                    es.push_back(e);
                }
            }
            // interior tori: solutions of cos(freq t) = m0/|(m0,n0)|,
            // sin(freq t) = n0/|(m0,n0)| with t in the open interval (0, 2pi)
            const double base = 2 * kPi;  // x,y circumference
            const long long R = static_cast<long long>(std::floor(cap / base)) + 1;
            for (long long m0 = -R; m0 <= R; ++m0)
                for (long long n0 = -R; n0 <= R; ++n0) {
                    if (m0 == 0 && n0 == 0) continue;
                    if (gcdll(m0, n0) != 1) continue;
                    double Tsimple = base * std::sqrt(double(m0 * m0 + n0 * n0));
                    if (Tsimple > cap) continue;
                    double phi0 = std::atan2(double(n0), double(m0));
                    if (phi0 < 0) phi0 += 2 * kPi;
                    for (long long i = 0;; ++i) {
                        double phase = phi0 + 2 * kPi * i;
                        if (!(phase < 2 * kPi * freq)) break;
                        if (phase <= 0) continue;  // t = 0 is the pole, not interior
                        double t = phase / freq;
                        if (!(t > 0 && t < 2 * kPi)) continue;
                        for (int j = 1; j * Tsimple <= cap; ++j) {
                            SpectrumEntry e;
                            e.period = j * Tsimple;
                            e.cls = s3 ? HomotopyClass::trivial() : HomotopyClass{{j * m0}};
                            e.cover = j;
                            e.topology = FamilyTopology::Circle;
                            e.family_dim = 1;
                            e.descriptor = "torus t=" + fmt(t) + " winding (" + std::to_string(m0) +
                                           "," + std::to_string(n0) + ")" +
                                           (j > 1 ? " cover " + std::to_string(j) : "");
                            Vec rep(3);
                            rep << 0, 0, t;
                            e.representative = rep;
                            es.push_back(e);
                        }
                    }
                }
            break;
        }
        case ModelKind::FlatTorusCosphere: {
            const int n = m.n();
            const long long R = static_cast<long long>(std::floor(cap));
            std::vector<long long> a(n, -R);
            // enumerate the integer lattice ball |a| <= cap
            while (true) {
                long long norm2 = 0;
                for (auto c : a) norm2 += c * c;
                if (norm2 > 0 && std::sqrt(double(norm2)) <= cap) {
                    SpectrumEntry e;
                    e.period = std::sqrt(double(norm2));
                    e.cls = HomotopyClass{a};
                    long long g = 0;
                    for (auto c : a) g = gcdll(g, c);
                    e.cover = static_cast<int>(g);
                    // the T^n-family tag reproduces the stated rank 2^n
                    e.topology = FamilyTopology::Torus;
                    e.topology_param = n;
                    e.family_dim = n;
                    std::string d = "p-direction (";
                    for (int i = 0; i < n; ++i) d += (i ? "," : "") + std::to_string(a[i]);
                    e.descriptor = d + ")";
                    Vec rep = Vec::Zero(2 * n);
                    for (int i = 0; i < n; ++i) rep[n + i] = a[i] / e.period;
                    e.representative = rep;
                    es.push_back(e);
                }
                int i = 0;
                while (i < n && a[i] == R) a[i++] = -R;
                if (i == n) break;
                ++a[i];
            }
            break;
        }
    }
    detail::sort_entries(es);
    return spec;
}

// order statistics ---------------------------------------------------------

inline double t_min(const PeriodSpectrum& spec) {
    if (spec.empty()) throw SpectrumError("t_min of an empty spectrum");
    return spec.entries.front().period;
}

inline double t_min_alpha(const PeriodSpectrum& spec, const HomotopyClass& alpha) {
    for (const auto& e : spec.entries)
        if (e.cls == alpha) return e.period;
    throw SpectrumError("spectrum has no entry in class " + alpha.str());
}

struct TPlus {
    double value = std::numeric_limits<double>::infinity();
    bool finite = false;
    bool certified = true;  // false when the cap does not exceed the query
    double cap = 0;
};

inline TPlus t_plus(const PeriodSpectrum& spec, const HomotopyClass& alpha, double T,
                    double tol = 1e-9) {
    TPlus r;
    r.cap = spec.cap;
    for (const auto& e : spec.entries)
        if (e.cls == alpha && e.period > T + tol) {
            r.value = e.period;
            r.finite = true;
            return r;
        }
    r.certified = spec.cap > T;  // "+infinity within cap"; flagged when not
    return r;
}

// numeric spectrum ----------------------------------------------------------

inline PeriodSpectrum numeric_spectrum(const Model& m, const ConformalFactor& f,
                                       const std::optional<HomotopyClass>& alpha, double T_lo,
                                       double T_hi, const SeedGrid& grid, const ScanOptions& opts = {},
                                       ScanReport* report = nullptr) {
    PeriodSpectrum spec;
    spec.model = m;
    spec.cap = T_hi;
    spec.provenance = Provenance::Numeric;
    auto field = conformal_field(m, f);
    auto fams = scan_orbits(field, m, alpha, T_lo, T_hi, grid, opts, report);
    for (auto& fam : fams) {
        SpectrumEntry e;
        e.period = fam.period;
        e.cls = fam.cls;
        e.cover = fam.cover;
        e.topology = fam.topology;
        e.topology_param = fam.topology_param;
        e.family_dim = fam.dim;
        e.residual = fam.representative().residual;
        e.representative = fam.representative().x0;
        e.descriptor = "scan";
        e.family = fam;
        spec.entries.push_back(std::move(e));
    }
    detail::sort_entries(spec.entries);
    return spec;
}

// external spectra ----------------------------------------------------------
// record format: provenance = external, cap = <real>, and repeated
//   entry = <period> ; <class tuple or e> ; <topology> ; <descriptor>

inline FamilyTopology topology_from_name(const std::string& s, int* param) {
    if (s == "point") return FamilyTopology::Point;
    if (s == "circle") return FamilyTopology::Circle;
    if (s.rfind("torus", 0) == 0) {
        *param = std::stoi(s.substr(6, s.size() - 7));
        return FamilyTopology::Torus;
    }
    if (s.rfind("projective", 0) == 0) {
        *param = std::stoi(s.substr(11, s.size() - 12));
        return FamilyTopology::Projective;
    }
    throw ParseError("unknown family topology '" + s + "'");
}

inline PeriodSpectrum load_external_spectrum(const KeyValues& kv) {
    PeriodSpectrum spec;
    spec.provenance = Provenance::External;
    spec.cap = kv.get_double("cap");
    for (const auto& line : kv.all("entry")) {
        std::vector<std::string> parts;
        std::string piece;
        std::istringstream is(line);
        while (std::getline(is, piece, ';')) parts.push_back(strip(piece));
        if (parts.size() < 3) throw ParseError("external spectrum entry needs 3+ fields: " + line);
        SpectrumEntry e;
        e.period = std::stod(parts[0]);
        std::string cls = parts[1];
        if (cls.size() >= 2 && cls.front() == '(' && cls.back() == ')')
            cls = cls.substr(1, cls.size() - 2);
        e.cls = cls == "e" ? HomotopyClass::trivial() : HomotopyClass{parse_int_tuple(cls)};
        size_t next = 2;
        if (parts[next].rfind("cover", 0) == 0) {  // the report writer's own format
            e.cover = std::stoi(parts[next].substr(6));
            ++next;
        }
        int param = 0;
        e.topology = topology_from_name(parts[next], &param);
        e.topology_param = param;
        ++next;
        e.descriptor = parts.size() > next ? parts[next] : "external";
        spec.entries.push_back(std::move(e));
    }
    detail::sort_entries(spec.entries);
    return spec;
}

inline std::string topology_label(FamilyTopology t, int param) {
    switch (t) {
        case FamilyTopology::Point: return "point";
        case FamilyTopology::Circle: return "circle";
        case FamilyTopology::Torus: return "torus(" + std::to_string(param) + ")";
        case FamilyTopology::Projective: return "projective(" + std::to_string(param) + ")";
    }
    return "?";
}

inline std::string spectrum_report(const PeriodSpectrum& spec) {
    ReportWriter w;
    w.kv("report", std::string("spectrum"));
    if (spec.model) w.kv("model", spec.model->name());
    w.kv("provenance", std::string(spec.provenance == Provenance::Analytic  ? "analytic"
                                   : spec.provenance == Provenance::Numeric ? "numeric"
                                                                            : "external"));
    w.kv("cap", spec.cap);
    if (!spec.annotation.empty()) w.kv("annotation", spec.annotation);
    w.kv("count", static_cast<long long>(spec.entries.size()));
    for (const auto& e : spec.entries) {
        std::ostringstream os;
        os << fmt(e.period) << " ; " << e.cls.str() << " ; cover " << e.cover << " ; "
           << topology_label(e.topology, e.topology_param) << " ; " << e.descriptor;
        if (spec.provenance == Provenance::Numeric) os << " ; residual " << fmt(e.residual);
        w.kv("entry", os.str());
    }
    return w.str();
}

}  // namespace reebkit
