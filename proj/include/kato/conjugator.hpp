#pragma once

// Conjugation of the birational germ G (generic chart) to the polynomial normal form
// F = (lambda z1 z2^sigma + sum b_k z2^k + c z2^{sigma k/(k-1)}, z2^k)
// through phi = (phi1, C z2 (1 + mu)).

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "kato/error.hpp"
#include "kato/germs.hpp"
#include "kato/series.hpp"

namespace kato {

// ---- lattice bookkeeping ---------------------------------------------------

struct LatticeSet {
    Q bound;
    bool strict = true;
    std::vector<Exp2> points; // i in {0,1}
};

inline LatticeSet lattice_below(const BranchSignature& g, const Q& bound, bool strict) {
    LatticeSet s{bound, strict, {}};
    for (int i = 0; i <= 1; ++i)
        for (int j = 0;; ++j) {
            const Q w = Q(i * (g.p + g.q) + j * g.kS);
            if (strict ? !(w < bound) : !(w <= bound)) break;
            s.points.push_back({i, j});
        }
    std::sort(s.points.begin(), s.points.end());
    return s;
}

inline LatticeSet e_infty(const BranchSignature& g) { return lattice_below(g, qq(g.sigma * g.kS, g.kS - 1), true); }

inline LatticeSet e_m(const BranchSignature& g, long m) {
    Q sum = 0, t = 1;
    for (long k = 0; k <= m; ++k) {
        sum += t;
        t /= g.kS;
    }
    return lattice_below(g, Q(g.sigma) * sum, false);
}

inline long mu_bound(const BranchSignature& g) { return std::max(g.d, g.l + floor_div(g.l - g.d, g.kS - 1)); }

struct Resonance {
    long i, j, gamma;
    friend bool operator==(const Resonance&, const Resonance&) = default;
};

// (kr - p, ks - q), gamma = k + l
inline std::vector<Resonance> resonances(const BranchSignature& g, long degree_cap) {
    std::vector<Resonance> out;
    for (long k = 1;; ++k) {
        const long i = k * g.r - g.p, j = k * g.s - g.q;
        if (i + j > degree_cap) break;
        if (i >= 0 && j >= 0) out.push_back({i, j, k + g.l});
    }
    return out;
}

// ---- the series mu ---------------------------------------------------------

// W / (a0 z2) = 1 + (sum_{i>=1} a_i z2^i + z1 z2^{l-1} + a_{l+K} z2^{l+K}) / a0
template <class S>
TruncSeries2<S> unit_bracket(const BiratGerm<S>& g, int order) {
    const auto& sg = g.sig;
    const S inv = S(1) / g.a0();
    TruncSeries2<S> b = TruncSeries2<S>::constant(order, S(1));
    for (long i = 1; i < sg.l; ++i) b.add_to(0, static_cast<int>(i), g.a[static_cast<size_t>(i)] * inv);
    b.add_to(1, static_cast<int>(sg.l - 1), inv);
    b.add_to(0, static_cast<int>(sg.l + sg.K), g.effective_aK() * inv);
    return b;
}

// 1 + mu = prod_j B(G^j)^{r/k^{j+1}}, returns mu
template <class S>
TruncSeries2<S> mu_series(const BiratGerm<S>& g, int order) {
    using T = TruncSeries2<S>;
    const auto& sg = g.sig;
    const T B = unit_bracket(g, order);
    const auto G = birat_generic_form(g, order);
    SeriesPair<S> Gj{T::z1(order), T::z2(order)};
    T prod = T::constant(order, S(1));
    Q kpow = sg.kS;
    for (int j = 0; j < 64 * (order + 1); ++j) {
        if (Gj.first.min_order() > order && Gj.second.min_order() > order) break;
        const T f = j == 0 ? B : compose_pair(B, Gj.first, Gj.second);
        if ((f - T::constant(order, S(1))).min_order() <= order) prod = prod * pow_rational(f, Q(sg.r) / kpow);
        kpow *= sg.kS;
        Gj = compose_maps(G, Gj);
    }
    return prod - T::constant(order, S(1));
}

// ---- certificates ----------------------------------------------------------

template <class S>
struct PhiData {
    S C = S(1);
    std::map<Exp2, S> A;
    TruncSeries2<S> mu;

    TruncSeries2<S> phi1(int order) const {
        TruncSeries2<S> r(order);
        for (const auto& [e, v] : A) r.set(e.first, e.second, v);
        return r;
    }
    TruncSeries2<S> phi2(int order) const {
        return (TruncSeries2<S>::constant(order, S(1)) + with_order(mu, order)) * TruncSeries2<S>::monomial(order, 0, 1, C);
    }
};

template <class S>
struct ConjugacyCertificate {
    BiratGerm<S> source;
    FavreGerm<S> target;
    PhiData<S> phi;
    int order = 0;
    S eps = S(1);
    bool vf_case = false;
    SeriesPair<S> residual;
    std::vector<Exp2> extended_support;
};

template <class S>
double residual_magnitude(const SeriesPair<S>& r) {
    double m = 0;
    for (const auto* s : {&r.first, &r.second})
        for (const auto& [e, v] : s->terms()) m = std::max(m, scalar_traits<S>::magnitude(v));
    return m;
}

template <class S>
bool residual_is_zero(const SeriesPair<S>& r, double tol) {
    if constexpr (scalar_traits<S>::exact) {
        (void)tol;
        return r.first.is_zero() && r.second.is_zero();
    } else {
        return residual_magnitude(r) < tol;
    }
}

// F o phi - phi o G, recomputed from scratch
template <class S>
SeriesPair<S> conjugacy_residual(const BiratGerm<S>& g, const FavreGerm<S>& f, const PhiData<S>& phi, int order) {
    const SeriesPair<S> ph{phi.phi1(order), phi.phi2(order)};
    const auto G = birat_generic_form(g, order);
    const auto F = f.as_series(order);
    const auto lhs = compose_maps(F, ph);
    const auto rhs = compose_maps(ph, G);
    return {lhs.first - rhs.first, lhs.second - rhs.second};
}

template <class S>
bool verify(const ConjugacyCertificate<S>& cert, double tol = 1e-9) {
    if (cert.target.b.empty() || cert.target.k != cert.source.sig.kS || cert.target.sigma != cert.source.sig.sigma)
        return false;
    return residual_is_zero(conjugacy_residual(cert.source, cert.target, cert.phi, cert.order), tol);
}

namespace detail {

// Gauss-Jordan elimination; returns det, solves in place
template <class S>
S solve_dense(std::vector<std::vector<S>>& M, std::vector<S>& rhs, std::vector<S>& x) {
    const size_t n = rhs.size();
    S det = S(1);
    for (size_t c = 0; c < n; ++c) {
        size_t piv = n;
        if constexpr (scalar_traits<S>::exact) {
            for (size_t r = c; r < n; ++r)
                if (!scalar_traits<S>::is_zero(M[r][c])) {
                    piv = r;
                    break;
                }
        } else {
            double best = 0;
            for (size_t r = c; r < n; ++r)
                if (std::abs(M[r][c]) > best) {
                    best = std::abs(M[r][c]);
                    piv = r;
                }
        }
        if (piv == n) return S(0);
        if (piv != c) {
            std::swap(M[piv], M[c]);
            std::swap(rhs[piv], rhs[c]);
            det = -det;
        }
        det = det * M[c][c];
        const S inv = S(1) / M[c][c];
        for (size_t r = 0; r < n; ++r) {
            if (r == c || scalar_traits<S>::is_zero(M[r][c])) continue;
            const S f = M[r][c] * inv;
            for (size_t k = c; k < n; ++k)
                if (!scalar_traits<S>::is_zero(M[c][k])) M[r][k] = M[r][k] - f * M[c][k];
            rhs[r] = rhs[r] - f * rhs[c];
        }
    }
    x.assign(n, S(0));
    for (size_t i = 0; i < n; ++i) x[i] = rhs[i] / M[i][i];
    return det;
}

template <class S>
struct Columns {
    int N;
    long sigma;
    S lambda;
    TruncSeries2<S> W, Psig;
    std::vector<TruncSeries2<S>> Wp, Pp;
    long p, q, r, s;

    const TruncSeries2<S>& wpow(long m) {
        while (static_cast<long>(Wp.size()) <= m) Wp.push_back(Wp.back() * W);
        return Wp[static_cast<size_t>(m)];
    }
    const TruncSeries2<S>& ppow(long m) {
        while (static_cast<long>(Pp.size()) <= m) Pp.push_back(Pp.back() * Pp[1]);
        return Pp[static_cast<size_t>(m)];
    }
    static TruncSeries2<S> shift(const TruncSeries2<S>& f, int di, int dj, int N) {
        TruncSeries2<S> r(N);
        for (const auto& [e, v] : f.terms()) r.set(e.first + di, e.second + dj, v);
        return r;
    }
    // lambda z^(a,b) P^sigma - G1^a G2^b
    TruncSeries2<S> A(int a, int b) {
        const auto lhs = shift(Psig, a, b, N).scaled(lambda);
        const long wexp = p * a + r * b, zexp = q * a + s * b;
        if (wexp > N || zexp > N) return lhs;
        return lhs - shift(wpow(wexp), 0, static_cast<int>(zexp), N);
    }
};

} // namespace detail

template <class S>
bool is_one(const S& x) {
    if constexpr (scalar_traits<S>::exact)
        return x == S(1);
    else
        return std::abs(x - S(1)) < 1e-9;
}

template <class S>
bool scalar_near(const S& a, const S& b, double tol) {
    return scalar_traits<S>::near(a, b, tol * std::max(1.0, std::max(scalar_traits<S>::magnitude(a), scalar_traits<S>::magnitude(b))));
}

inline int default_order(const BranchSignature& g) { return static_cast<int>(3 * g.sigma + g.kS); }

// core solver given C with C^{k-1} = a0^r
template <class S>
ConjugacyCertificate<S> normalize_with_C(const BiratGerm<S>& g, const S& C, const S& eps, int order) {
    const auto& sg = g.sig;
    const long k = sg.kS, sigma = sg.sigma, pq = sg.p + sg.q;
    if (order < 0) order = default_order(sg);
    const int N = order;
    const S a0 = g.a0();
    if (!scalar_near(spow(C, k - 1), spow(a0, sg.r), 1e-9))
        throw Error(Errc::InvalidInput, "C^{k-1} must equal a0^r");

    const S lambda = S(sg.delta) * spow(a0, sg.p - 1) / (S(k) * spow(C, sigma));
    const S A10 = spow(C, pq) / spow(a0, sg.p);
    const bool vf = sg.twisted && is_one(lambda);
    const long cexp = sg.twisted ? sigma * k / (k - 1) : -1;

    using T = TruncSeries2<S>;
    const T mu = mu_series(g, N);
    const T P = (T::constant(N, S(1)) + mu) * T::monomial(N, 0, 1, C);

    detail::Columns<S> cols{N, sigma, lambda, generic_W(g, N), T(N), {T::constant(N, S(1))}, {T::constant(N, S(1)), P},
                            sg.p, sg.q, sg.r, sg.s};
    cols.Psig = cols.ppow(sigma);

    // residual with the fixed data: A10, b_{p+q} = 1
    T R = cols.A(1, 0).scaled(A10) + cols.ppow(pq);

    // unknowns: b_{p+q+1..sigma}, A_{0j}, A_{1j} (j decreasing) on E_inf \ {(0,0),(1,0)}, c
    enum class Kind { B, A, Cc };
    struct Unknown {
        Kind kind;
        long idx;
        Exp2 e;
    };
    std::vector<Unknown> unk;
    std::vector<Exp2> eqs;
    for (long j = 1; j <= sg.l - 1; ++j) {
        unk.push_back({Kind::B, pq + j, {0, 0}});
        eqs.push_back({0, static_cast<int>(pq + j)});
    }
    const auto Einf = e_infty(sg);
    std::vector<Exp2> a0s, a1s;
    for (const auto& e : Einf.points) {
        if (e == Exp2{0, 0} || e == Exp2{1, 0}) continue;
        (e.first == 0 ? a0s : a1s).push_back(e);
    }
    std::sort(a1s.begin(), a1s.end(), [](const Exp2& x, const Exp2& y) { return x.second > y.second; });
    for (const auto* v : {&a0s, &a1s})
        for (const auto& e : *v) {
            unk.push_back({Kind::A, 0, e});
            eqs.push_back({e.first, static_cast<int>(e.second + sigma)});
        }
    if (vf) {
        unk.push_back({Kind::Cc, cexp, {0, 0}});
        eqs.push_back({0, static_cast<int>(cexp)});
    }
    if (unk.size() != eqs.size()) throw Error(Errc::SingularSystem, "unknown/equation count mismatch");
    for (const auto& e : eqs)
        if (e.first + e.second > N) throw Error(Errc::InvalidInput, "truncation order too small for the linear system");

    std::vector<T> ucols;
    for (const auto& u : unk) {
        if (u.kind == Kind::B)
            ucols.push_back(cols.ppow(u.idx));
        else if (u.kind == Kind::Cc)
            ucols.push_back(cols.ppow(u.idx));
        else
            ucols.push_back(cols.A(u.e.first, u.e.second));
    }
    const size_t n = unk.size();
    std::vector<S> x;
    if (n > 0) {
        std::vector<std::vector<S>> M(n, std::vector<S>(n, S(0)));
        std::vector<S> rhs(n, S(0));
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = 0; c < n; ++c) M[r][c] = ucols[c].coeff(eqs[r].first, eqs[r].second);
            rhs[r] = -R.coeff(eqs[r].first, eqs[r].second);
        }
        const S det = detail::solve_dense(M, rhs, x);
        if (scalar_traits<S>::is_zero(det) || (!scalar_traits<S>::exact && scalar_traits<S>::magnitude(det) < 1e-300))
            throw Error(Errc::SingularSystem, "linear system is singular");
    }

    FavreGerm<S> F;
    F.lambda = lambda;
    F.sigma = sigma;
    F.k = k;
    F.b[pq] = S(1);
    PhiData<S> phi;
    phi.C = C;
    phi.mu = mu;
    phi.A[{1, 0}] = A10;
    for (size_t i = 0; i < n; ++i) {
        R = R + ucols[i].scaled(x[i]);
        const auto& u = unk[i];
        if (u.kind == Kind::B)
            F.b[u.idx] = x[i];
        else if (u.kind == Kind::Cc)
            F.c = x[i];
        else if (!scalar_traits<S>::is_zero(x[i]))
            phi.A[u.e] = x[i];
    }
    for (long j = pq + 1; j <= sigma; ++j)
        if (!F.b.count(j)) F.b[j] = S(0);

    // triangular sweep: pin A_{i, j-sigma} from bidegree (i, j)
    std::set<Exp2> fixed{{0, 0}, {1, 0}};
    for (const auto& u : unk)
        if (u.kind == Kind::A) fixed.insert(u.e);
    std::set<Exp2> extended;
    const double thr = scalar_traits<S>::exact ? 0.0 : 1e-14;
    for (int pass = 0; pass < 8; ++pass) {
        bool changed = false;
        for (int j = static_cast<int>(sigma); j <= N; ++j)
            for (int i = 0; i + j <= N; ++i) {
                const S v = R.coeff(i, j);
                if (scalar_traits<S>::is_zero(v) || scalar_traits<S>::magnitude(v) <= thr) continue;
                const Exp2 e{i, j - static_cast<int>(sigma)};
                if (fixed.count(e)) continue;
                const T col = cols.A(e.first, e.second);
                const S cf = col.coeff(i, j);
                if (scalar_traits<S>::is_zero(cf)) continue;
                const S delta = -v / cf;
                R = R + col.scaled(delta);
                phi.A[e] = phi.A.count(e) ? phi.A[e] + delta : delta;
                if (scalar_traits<S>::is_zero(phi.A[e])) phi.A.erase(e);
                extended.insert(e);
                changed = true;
            }
        if (!changed) break;
    }

    ConjugacyCertificate<S> cert;
    cert.source = g;
    cert.target = F;
    cert.phi = phi;
    cert.order = N;
    cert.eps = eps;
    cert.vf_case = vf;
    cert.extended_support.assign(extended.begin(), extended.end());
    cert.residual = conjugacy_residual(g, F, phi, N);
    return cert;
}

// exact mode: a0 = tau^{k-1}, eps = 1, C = tau^r
inline ConjugacyCertificate<NF> normalize_exact(const BiratGerm<NF>& g, const NF& tau, int order = -1) {
    const auto& sg = g.sig;
    if (!(nf_pow(tau, sg.kS - 1) == g.a0())) throw Error(Errc::FractionalPower, "exact mode needs a0 = tau^{r+s-1}");
    return normalize_with_C(g, nf_pow(tau, sg.r), NF(1), order);
}

// complex mode: C = eps a0^{r/(k-1)} (principal branch), eps^{k-1} = 1
inline ConjugacyCertificate<Cx> normalize_complex(const BiratGerm<Cx>& g, long eps_index = 0, int order = -1) {
    const auto& sg = g.sig;
    const double two_pi = 2.0 * std::acos(-1.0);
    const Cx eps = std::polar(1.0, two_pi * static_cast<double>(eps_index) / static_cast<double>(sg.kS - 1));
    const Cx C = eps * std::pow(g.a0(), static_cast<double>(sg.r) / static_cast<double>(sg.kS - 1));
    return normalize_with_C(g, C, eps, order);
}

// ---- finite group actions --------------------------------------------------

template <class S>
std::vector<S> roots_of_unity(long m) {
    std::vector<S> out;
    if constexpr (scalar_traits<S>::exact) {
        out.push_back(S(1));
        if (m % 2 == 0) out.push_back(S(-1));
    } else {
        const double two_pi = 2.0 * std::acos(-1.0);
        for (long t = 0; t < m; ++t) out.push_back(std::polar(1.0, two_pi * static_cast<double>(t) / static_cast<double>(m)));
    }
    return out;
}

// conjugation by (eps^j z1, eps z2)
template <class S>
FavreGerm<S> apply_eps(const FavreGerm<S>& f, const S& eps) {
    long j = -1;
    for (const auto& [i, v] : f.b)
        if (!scalar_traits<S>::is_zero(v)) {
            j = i;
            break;
        }
    if (j < 0) throw Error(Errc::InvalidInput, "P vanishes identically");
    FavreGerm<S> h = f;
    h.lambda = spow(eps, f.sigma) * f.lambda;
    for (auto& [i, v] : h.b) v = spow(eps, i - j) * v;
    if (f.c_exponent() > 0) h.c = spow(eps, f.c_exponent() - j) * f.c;
    return h;
}

template <class S>
std::optional<S> favre_equivalent(const FavreGerm<S>& f1, const FavreGerm<S>& f2, double tol = 1e-9) {
    if (f1.k != f2.k || f1.sigma != f2.sigma) throw Error(Errc::ParameterMismatch, "(k, sigma) differ");
    for (const S& eps : roots_of_unity<S>(f1.k - 1)) {
        const FavreGerm<S> h = apply_eps(f1, eps);
        bool ok = scalar_near(h.lambda, f2.lambda, tol) && scalar_near(h.c, f2.c, tol);
        std::set<long> keys;
        for (const auto& [i, v] : h.b) keys.insert(i);
        for (const auto& [i, v] : f2.b) keys.insert(i);
        for (long i : keys) {
            if (!ok) break;
            const S x = h.b.count(i) ? h.b.at(i) : S(0), y = f2.b.count(i) ? f2.b.at(i) : S(0);
            ok = scalar_near(x, y, tol);
        }
        if (ok) return eps;
    }
    return std::nullopt;
}

// G' = phi^{-1} G phi with phi = (A z1, B z2): A a'_i = B^{i+1} a_i
template <class S>
BiratGerm<S> apply_L(const BiratGerm<S>& g, const S& A, const S& B) {
    BiratGerm<S> h = g;
    for (size_t i = 0; i < g.a.size(); ++i) h.a[i] = spow(B, static_cast<long>(i) + 1) * g.a[i] / A;
    h.aK = spow(B, g.sig.l + g.sig.K + 1) * g.aK / A;
    return h;
}

template <class S>
bool in_L(const BranchSignature& g, const S& A, const S& B, double tol = 1e-9) {
    return scalar_near(B, spow(A, g.r) * spow(B, g.s), tol) &&
           scalar_near(A, spow(A, g.p + g.r * g.l) * spow(B, g.q + g.s * g.l), tol);
}

template <class S>
std::optional<std::pair<S, S>> birat_equivalent(const BiratGerm<S>& g1, const BiratGerm<S>& g2, double tol = 1e-9) {
    const auto &s1 = g1.sig, &s2 = g2.sig;
    if (!(s1.matrix() == s2.matrix()) || s1.l != s2.l) throw Error(Errc::ParameterMismatch, "signatures differ");
    if (!scalar_near(g1.a0(), g2.a0(), tol)) throw Error(Errc::ParameterMismatch, "a0 differs");
    const long m = s1.p + s1.s + s1.r * s1.l - s1.delta - 1;
    const auto roots = roots_of_unity<S>(m);
    for (const S& A : roots)
        for (const S& B : roots) {
            if (!in_L(s1, A, B, tol)) continue;
            const auto h = apply_L(g1, A, B);
            bool ok = scalar_near(h.effective_aK(), g2.effective_aK(), tol);
            for (size_t i = 0; ok && i < h.a.size(); ++i) ok = scalar_near(h.a[i], g2.a[i], tol);
            if (ok) return std::pair<S, S>{A, B};
        }
    return std::nullopt;
}

} // namespace kato
