#pragma once

// Numeric developing maps into P^2: inverse blow-up chains carried in normalized
// homogeneous coordinates, and the forward germ on projective points.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "kato/error.hpp"
#include "kato/germs.hpp"

namespace kato {

struct ProjPoint {
    std::array<Cx, 3> z{Cx(0), Cx(0), Cx(1)};

    static ProjPoint affine(const CPair& x) { return ProjPoint{{x[0], x[1], Cx(1)}}.normalized(); }

    ProjPoint normalized() const {
        double m = 0;
        size_t at = 0;
        for (size_t i = 0; i < 3; ++i)
            if (std::abs(z[i]) > m) {
                m = std::abs(z[i]);
                at = i;
            }
        if (!(m >= 1e-300) || !std::isfinite(m)) throw Error(Errc::Indeterminate, "all homogeneous coordinates vanish");
        const Cx s = z[at];
        return ProjPoint{{z[0] / s, z[1] / s, z[2] / s}};
    }
};

// max-modulus distance between normalized representatives
inline double proj_distance(const ProjPoint& a, const ProjPoint& b) {
    const auto x = a.normalized(), y = b.normalized();
    double d = 0;
    for (size_t i = 0; i < 3; ++i) d = std::max(d, std::abs(x.z[i] - y.z[i]));
    return d;
}

struct ChartPoint {
    long chart_index = 0; // <= 0
    CPair coords{Cx(0), Cx(0)};
};

// inverse of (u v + a, v), or of (v + a, u v) for the primed chart
inline CPair inverse_blowup(const CPair& pt, const Cx& a, bool generic) {
    const Cx w = pt[0] - a;
    if (generic) {
        if (std::abs(pt[1]) < 1e-300) throw Error(Errc::Indeterminate, "point on the exceptional line v = 0");
        return {w / pt[1], pt[1]};
    }
    if (std::abs(w) < 1e-300) throw Error(Errc::Indeterminate, "point on the exceptional line u = a");
    return {pt[1] / w, w};
}

inline CPair forward_blowup(const CPair& pt, const Cx& a, bool generic) {
    if (generic) return {pt[0] * pt[1] + a, pt[1]};
    return {pt[1] + a, pt[0] * pt[1]};
}

namespace detail {

// relative size of the result against the absolute size of its terms; small means cancellation
constexpr double kCancellation = 1e-6;

inline ProjPoint guarded(const std::array<Cx, 3>& z, double scale) {
    double m = 0;
    for (const auto& c : z) m = std::max(m, std::abs(c));
    if (!(m >= kCancellation * scale)) throw Error(Errc::Indeterminate, "too close to an indeterminacy point");
    return ProjPoint{z}.normalized();
}

inline ProjPoint inverse_blowup_h(const ProjPoint& P, const Cx& a, bool primed) {
    const auto& [u, v, w] = P.z;
    const Cx x = u - a * w;
    const double sx = std::abs(u) + std::abs(a) * std::abs(w);
    if (!primed) return guarded({x * w, v * v, v * w}, std::max({sx * std::abs(w), std::norm(v), std::abs(v * w)}));
    return guarded({v * w, x * x, x * w}, std::max({std::abs(v * w), sx * sx, sx * std::abs(w)}));
}

inline ProjPoint sigma_bar_inverse_h(const ProjPoint& P, const Cx& aK, long e) {
    const auto& [u, v, w] = P.z;
    const Cx we1 = spow(w, e - 1), ve = spow(v, e);
    const double s0 = std::abs(u * we1) + std::abs(aK * ve);
    return guarded({u * we1 - aK * ve, v * we1, we1 * w}, std::max({s0, std::abs(v * we1), std::abs(we1 * w)}));
}

} // namespace detail

// Dev(chart -(m n + t), x): the last t inverse blow-ups of a sheet, then m copies of G^{-1}
inline ProjPoint dev_eval(const BiratGerm<Cx>& g, const ChartPoint& pt, long depth) {
    const auto charts = blowup_charts(g);
    const long n = static_cast<long>(charts.size());
    if (pt.chart_index > 0 || pt.chart_index < -depth * n)
        throw Error(Errc::InvalidInput, "chart index outside [-depth n, 0]");
    const long m = (-pt.chart_index) / n, t = (-pt.chart_index) % n;
    const long e = g.sig.l + g.sig.K + 1;
    const Cx aK = g.effective_aK();
    ProjPoint P{{pt.coords[0], pt.coords[1], Cx(1)}};
    P = P.normalized();
    for (long i = n - t; i < n; ++i) P = detail::inverse_blowup_h(P, charts[static_cast<size_t>(i)].a, charts[static_cast<size_t>(i)].primed);
    for (long s = 0; s < m; ++s) {
        P = detail::sigma_bar_inverse_h(P, aK, e);
        for (long i = 0; i < n; ++i) P = detail::inverse_blowup_h(P, charts[static_cast<size_t>(i)].a, charts[static_cast<size_t>(i)].primed);
    }
    return P;
}

// deck shift between sheets
inline ChartPoint deck_shift(const ChartPoint& pt, long n) { return {pt.chart_index + n, pt.coords}; }

// G on P^2 through the homogenized origin form
inline ProjPoint apply_germ(const BiratGerm<Cx>& g, const ProjPoint& P) {
    const auto [g1, g2] = birat_origin_form(g);
    int D = 1;
    for (const auto* f : {&g1, &g2})
        for (const auto& [ex, v] : f->terms()) D = std::max(D, ex.first + ex.second);
    double scale = std::pow(std::abs(P.z[2]), D);
    auto hom = [&](const TruncSeries2<Cx>& f) {
        Cx acc = 0;
        double mag = 0;
        for (const auto& [ex, v] : f.terms()) {
            const Cx t = v * spow(P.z[0], ex.first) * spow(P.z[1], ex.second) * spow(P.z[2], D - ex.first - ex.second);
            acc += t;
            mag += std::abs(t);
        }
        scale = std::max(scale, mag);
        return acc;
    };
    const Cx h1 = hom(g1), h2 = hom(g2);
    return detail::guarded({h1, h2, spow(P.z[2], D)}, scale);
}

// |Dev(F pt) - G(Dev pt)| in normalized coordinates
inline double dev_commutativity_residual(const BiratGerm<Cx>& g, const ChartPoint& pt, long depth) {
    const long n = static_cast<long>(blowup_charts(g).size());
    if (pt.chart_index > -n) throw Error(Errc::InvalidInput, "deck shift needs a point at least one sheet deep");
    return proj_distance(dev_eval(g, deck_shift(pt, n), depth), apply_germ(g, dev_eval(g, pt, depth)));
}

// max-modulus distance from O = [0:0:1] in the affine chart z2 = 1, infinite on the line at infinity
inline double distance_to_origin(const ProjPoint& P) {
    const auto Q = P.normalized();
    if (std::abs(Q.z[2]) < 1e-300) return std::numeric_limits<double>::infinity();
    return norm({Q.z[0] / Q.z[2], Q.z[1] / Q.z[2]});
}

struct OrbitRecord {
    CPair start;
    double dev_distance = 0; // |Dev(start) - O| with start read in chart 0
    std::vector<double> norms;
    std::optional<int> first_below; // first index with norm < 1e-12
    bool overflow = false;
};

struct OrbitReport {
    std::vector<OrbitRecord> records;
    bool all_converged() const {
        return std::all_of(records.begin(), records.end(), [](const OrbitRecord& r) { return r.first_below.has_value(); });
    }
};

inline OrbitReport orbit_contraction_report(const BiratGerm<Cx>& g, const std::vector<CPair>& samples, int nsteps) {
    OrbitReport rep;
    const BiratEval G{g};
    for (const auto& z : samples) {
        OrbitRecord rec{z, distance_to_origin(ProjPoint::affine(z)), {}, std::nullopt, false};
        CPair x = z;
        for (int t = 0; t <= nsteps; ++t) {
            const double nz = norm(x);
            if (!std::isfinite(nz) || nz > 1e150) {
                rec.overflow = true;
                break;
            }
            rec.norms.push_back(nz);
            if (!rec.first_below && nz < 1e-12) rec.first_below = t;
            if (t < nsteps) x = G(x);
        }
        rep.records.push_back(std::move(rec));
    }
    return rep;
}

// uniform samples in the polydisc of radius rho
inline std::vector<CPair> ball_samples(std::mt19937_64& rng, int count, double rho) {
    std::uniform_real_distribution<double> rad(0.0, 1.0), ang(0.0, 2.0 * std::acos(-1.0));
    std::vector<CPair> out;
    for (int i = 0; i < count; ++i) {
        CPair z;
        for (auto& c : z) c = std::polar(rho * std::sqrt(rad(rng)), ang(rng));
        out.push_back(z);
    }
    return out;
}

struct SphereSample {
    ChartPoint pt;
    double distance;
};

// rejection sampling of chart points whose image lies at distance rho +- tol from O
inline std::vector<SphereSample> sphere_preimage_samples(const BiratGerm<Cx>& g, std::mt19937_64& rng, long depth, double rho,
                                                         double tol, int count, int max_draws, double box = 1.0) {
    const long n = static_cast<long>(blowup_charts(g).size());
    std::uniform_int_distribution<long> idx(-depth * n, 0);
    std::uniform_real_distribution<double> u(-box, box);
    std::vector<SphereSample> out;
    for (int t = 0; t < max_draws && static_cast<int>(out.size()) < count; ++t) {
        const ChartPoint pt{idx(rng), {Cx(u(rng), u(rng)), Cx(u(rng), u(rng))}};
        try {
            const double d = distance_to_origin(dev_eval(g, pt, depth));
            if (std::abs(d - rho) <= tol) out.push_back({pt, d});
        } catch (const Error& e) {
            if (e.code() != Errc::Indeterminate) throw;
        }
    }
    return out;
}

} // namespace kato
