#pragma once

// Germ families: birational G (origin and generic charts), Favre normal form F,
// plus Enoki, Inoue-Hirzebruch and Hopf germs for numeric iteration.

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "kato/error.hpp"
#include "kato/series.hpp"
#include "kato/signature.hpp"

namespace kato {

template <class S>
struct BiratGerm {
    BranchSignature sig;
    std::vector<S> a; // a[0] = a0, ..., a[l-1]
    S aK = S(0);      // coefficient a_{l+K}

    const S& a0() const { return a.at(0); }
    // a_{l+K} is redundant when the signature is not twisted
    S effective_aK() const { return sig.twisted ? aK : S(0); }
};

template <class S>
BiratGerm<S> make_birat(const BranchSignature& sig, std::vector<S> a, S aK = S(0)) {
    if (static_cast<long>(a.size()) != sig.l) throw Error(Errc::InvalidInput, "need exactly l coefficients a0..a_{l-1}");
    if (scalar_traits<S>::is_zero(a[0])) throw Error(Errc::InvalidInput, "a0 must be nonzero");
    BiratGerm<S> g;
    g.sig = sig;
    g.a = std::move(a);
    g.aK = sig.twisted ? aK : S(0);
    return g;
}

template <class S>
struct FavreGerm {
    S lambda = S(1);
    long sigma = 1;
    long k = 2;
    std::map<long, S> b; // coefficients of P(z2)
    S c = S(0);

    // sigma*k/(k-1) when integral, else -1
    long c_exponent() const { return (sigma * k) % (k - 1) == 0 ? sigma * k / (k - 1) : -1; }

    SeriesPair<S> as_series(int order) const {
        TruncSeries2<S> f1(order), f2(order);
        f1.add_to(1, static_cast<int>(sigma), lambda);
        for (const auto& [i, v] : b) f1.add_to(0, static_cast<int>(i), v);
        if (c_exponent() > 0) f1.add_to(0, static_cast<int>(c_exponent()), c);
        f2.set(0, static_cast<int>(k), S(1));
        return {f1, f2};
    }
};

inline long origin_degree(const BranchSignature& g) {
    return std::max(g.p + g.r * g.l + g.q + g.s * g.l, (g.r + g.s) * (g.l + g.K + 1));
}

inline long generic_degree(const BranchSignature& g) {
    return std::max(g.p, g.r) * (g.l + g.K + 1) + std::max(g.q, g.s);
}

// (z1^{p+rl} z2^{q+sl} + sum a_i m^{i+1} + a_{l+K} m^{l+K+1}, m), m = z1^r z2^s
template <class S>
SeriesPair<S> birat_origin_form(const BiratGerm<S>& g, int order = -1) {
    const auto& sg = g.sig;
    if (order < 0) order = static_cast<int>(origin_degree(sg));
    using T = TruncSeries2<S>;
    T g1 = T::monomial(order, static_cast<int>(sg.p + sg.r * sg.l), static_cast<int>(sg.q + sg.s * sg.l));
    for (long i = 0; i < sg.l; ++i)
        g1.add_to(static_cast<int>(sg.r * (i + 1)), static_cast<int>(sg.s * (i + 1)), g.a[static_cast<size_t>(i)]);
    const long e = sg.l + sg.K + 1;
    g1.add_to(static_cast<int>(sg.r * e), static_cast<int>(sg.s * e), g.effective_aK());
    T g2 = T::monomial(order, static_cast<int>(sg.r), static_cast<int>(sg.s));
    return {g1, g2};
}

// W = z1 z2^l + sum a_i z2^{i+1} + a_{l+K} z2^{l+K+1}
template <class S>
TruncSeries2<S> generic_W(const BiratGerm<S>& g, int order) {
    const auto& sg = g.sig;
    TruncSeries2<S> w = TruncSeries2<S>::monomial(order, 1, static_cast<int>(sg.l));
    for (long i = 0; i < sg.l; ++i) w.add_to(0, static_cast<int>(i + 1), g.a[static_cast<size_t>(i)]);
    w.add_to(0, static_cast<int>(sg.l + sg.K + 1), g.effective_aK());
    return w;
}

// (W^p z2^q, W^r z2^s)
template <class S>
SeriesPair<S> birat_generic_form(const BiratGerm<S>& g, int order = -1) {
    const auto& sg = g.sig;
    if (order < 0) order = static_cast<int>(generic_degree(sg));
    const auto w = generic_W(g, order);
    using T = TruncSeries2<S>;
    return {w.pow(sg.p) * T::monomial(order, 0, static_cast<int>(sg.q)),
            w.pow(sg.r) * T::monomial(order, 0, static_cast<int>(sg.s))};
}

template <class S>
struct BlowupChart {
    bool primed = false; // (v + a, u v) instead of (u v + a, v)
    S a = S(0);
};

// Pi_0, ..., Pi_{n-1}: l generic blow-ups, then the word letters
template <class S>
std::vector<BlowupChart<S>> blowup_charts(const BiratGerm<S>& g) {
    const auto& sg = g.sig;
    std::vector<Letter> word;
    try {
        word = matrix_to_word(sg.matrix());
    } catch (const Error&) {
        throw Error(Errc::WordMismatch, "signature matrix cannot be factored into letters");
    }
    if (static_cast<long>(word.size()) != sg.n - sg.l || word.empty() || word.front() != Letter::Aprime)
        throw Error(Errc::WordMismatch, "word does not match the signature");
    std::vector<BlowupChart<S>> ch;
    ch.push_back({false, S(0)});
    for (long i = 1; i < sg.l; ++i) ch.push_back({false, g.a[static_cast<size_t>(i - 1)]});
    for (size_t t = 0; t < word.size(); ++t)
        ch.push_back({word[t] == Letter::Aprime, t == 0 ? g.a[static_cast<size_t>(sg.l - 1)] : S(0)});
    return ch;
}

// sigma_bar o Pi_0 o ... o Pi_{n-1}, built chart by chart
template <class S>
SeriesPair<S> compose_blowups_oracle(const BiratGerm<S>& g, int order) {
    using T = TruncSeries2<S>;
    const auto ch = blowup_charts(g);
    T x1 = T::z1(order), x2 = T::z2(order);
    for (size_t i = ch.size(); i-- > 0;) {
        const T prod = x1 * x2;
        const T shift = T::constant(order, ch[i].a);
        if (ch[i].primed) {
            x1 = x2 + shift;
            x2 = prod;
        } else {
            x1 = prod + shift;
        }
    }
    const auto& sg = g.sig;
    x1 = x1 + x2.pow(sg.l + sg.K + 1).scaled(g.effective_aK());
    return {x1, x2};
}

template <class S>
TruncSeries2<S> jacobian_det(const BiratGerm<S>& g) {
    const int order = static_cast<int>(2 * origin_degree(g.sig));
    const auto [g1, g2] = birat_origin_form(g, order);
    return d_z1(g1) * d_z2(g2) - d_z2(g1) * d_z1(g2);
}

// delta z1^{p+r(l+1)-1} z2^{q+s(l+1)-1}
template <class S>
TruncSeries2<S> expected_jacobian(const BranchSignature& sg, int order) {
    return TruncSeries2<S>::monomial(order, static_cast<int>(sg.p + sg.r * (sg.l + 1) - 1),
                                     static_cast<int>(sg.q + sg.s * (sg.l + 1) - 1), S(sg.delta));
}

inline std::pair<Q, Q> uv_exponents(const BranchSignature& g) {
    const long m = g.kS - 1;
    Q u(mpz_class(g.p + g.s + g.r * g.l - 1 - g.delta), mpz_class(m));
    Q v(mpz_class(g.r + g.q + g.s * g.l - 1 + g.delta), mpz_class(m));
    u.canonicalize();
    v.canonicalize();
    return {u, v};
}

inline long index_of(const BranchSignature& g) { return (g.kS - 1) / std::gcd(g.kS - 1, g.sigma); }

// x^e for rational e, exactly; FractionalPower when no root exists in the field
inline NF rational_power(const NF& x, const Q& e) {
    if (e.get_den() == 1) return nf_pow(x, e.get_num().get_si());
    const long den = e.get_den().get_si(), num = e.get_num().get_si();
    if (x.is_zero()) {
        if (e > 0) return NF(0);
        throw Error(Errc::FractionalPower, "zero to a negative power");
    }
    if (x.is_rational()) {
        if (auto r = qroot(x.rational(), den)) return nf_pow(NF(*r), num);
        if (!x.field()) throw Error(Errc::FractionalPower, "no exact root of " + x.rational().get_str());
    }
    // try x = t * tau^m with t rational
    const NF tau = NF::gen(x.field());
    for (long m = -64; m <= 64; ++m) {
        if (m % den != 0) continue;
        const NF t = x / nf_pow(tau, m);
        if (!t.is_rational()) continue;
        if (auto r = qroot(t.rational(), den)) return nf_pow(NF(*r) * nf_pow(tau, m / den), num);
    }
    throw Error(Errc::FractionalPower, "cannot represent a fractional power exactly");
}

inline Cx rational_power(const Cx& x, const Q& e) {
    if (e.get_den() == 1) return spow(x, e.get_num().get_si());
    return std::pow(x, e.get_d());
}

inline Q q_of(long n, long d) { return qq(n, d); }

template <class S>
S vf_condition(const BranchSignature& g, const S& a0) {
    if (!g.twisted) throw Error(Errc::NotTwisted, "signature admits no twisted vector field");
    const long e = (g.K + 1) * g.r - g.p + 1;
    return S(1) - S(g.delta * g.kS) * spow(a0, e);
}

// delta / (eps^sigma k) * a0^{p-1-r sigma/(k-1)}
template <class S>
S lambda_of(const BranchSignature& g, const S& a0, const S& eps = S(1)) {
    const Q e = Q(g.p - 1) - q_of(g.r * g.sigma, g.kS - 1);
    return S(g.delta) / (spow(eps, g.sigma) * S(g.kS)) * rational_power(a0, e);
}

template <class S>
S kappa_of(const BranchSignature& g, const S& a0) {
    const long mu = index_of(g);
    const Q e = Q(mu) * (q_of(g.r * g.sigma, g.kS - 1) - Q(g.p - 1));
    if (e.get_den() != 1) throw Error(Errc::NonIntegerExponent, "kappa exponent " + e.get_str() + " is not an integer");
    return spow(S(g.delta), mu) * spow(a0, e.get_num().get_si());
}

struct FavreType {
    std::vector<long> m;
    long rho = 0;
};

template <class S>
FavreType favre_type(const FavreGerm<S>& f) {
    std::map<long, S> cm = f.b;
    if (f.c_exponent() > 0 && !scalar_traits<S>::is_zero(f.c)) cm[f.c_exponent()] = f.c;
    std::vector<long> nz;
    for (const auto& [m, v] : cm)
        if (!scalar_traits<S>::is_zero(v)) nz.push_back(m);
    if (nz.empty()) throw Error(Errc::NonTerminating, "P vanishes identically");
    FavreType t;
    t.m.push_back(nz.front());
    long i = std::gcd(f.k, nz.front());
    while (i != 1) {
        std::optional<long> next;
        for (long m : nz)
            if (m > t.m.back() && std::gcd(i, m) < i) {
                next = m;
                break;
            }
        if (!next) throw Error(Errc::NonTerminating, "gcd sequence never reaches 1");
        t.m.push_back(*next);
        i = std::gcd(i, *next);
    }
    t.rho = static_cast<long>(t.m.size());
    return t;
}

// ---- numeric dynamics ------------------------------------------------------

using CPair = std::array<Cx, 2>;

inline double norm(const CPair& z) { return std::max(std::abs(z[0]), std::abs(z[1])); }

template <class Map>
std::vector<CPair> iterate(const Map& f, CPair z, int nsteps) {
    std::vector<CPair> orbit{z};
    for (int t = 0; t < nsteps; ++t) {
        z = f(z);
        const double nz = norm(z);
        if (!std::isfinite(nz) || nz > 1e150) throw Error(Errc::Overflow, "orbit diverged at step " + std::to_string(t + 1));
        orbit.push_back(z);
    }
    return orbit;
}

inline Cx eval(const TruncSeries2<Cx>& f, const CPair& z) {
    Cx acc = 0;
    for (const auto& [e, v] : f.terms()) acc += v * std::pow(z[0], e.first) * std::pow(z[1], e.second);
    return acc;
}

// origin-chart evaluation of G
struct BiratEval {
    BiratGerm<Cx> g;
    CPair operator()(const CPair& z) const {
        const auto& sg = g.sig;
        const Cx m = spow(z[0], sg.r) * spow(z[1], sg.s);
        Cx u = spow(z[0], sg.p + sg.r * sg.l) * spow(z[1], sg.q + sg.s * sg.l);
        Cx mp = m;
        for (long i = 0; i < sg.l; ++i) {
            u += g.a[static_cast<size_t>(i)] * mp;
            mp *= m;
        }
        u += g.effective_aK() * spow(m, sg.l + sg.K + 1);
        return {u, m};
    }
};

struct HopfGerm {
    Cx alpha, beta, lambda;
    long m = 1;

    void validate() const {
        if (std::abs((spow(beta, m) - alpha) * lambda) > 1e-12)
            throw Error(Errc::InvalidInput, "Hopf germ needs (beta^m - alpha) lambda = 0");
        if (!(std::abs(alpha) > 0 && std::abs(alpha) <= std::abs(beta) && std::abs(beta) < 1))
            throw Error(Errc::InvalidInput, "Hopf germ needs 0 < |alpha| <= |beta| < 1");
    }
    CPair operator()(const CPair& z) const { return {alpha * z[0] + lambda * spow(z[1], m), beta * z[1]}; }
};

// (t^n z1 z2^n + sum a_i t^{i+1} z2^{i+1}, t z2)
struct EnokiGerm {
    Cx t;
    std::vector<Cx> a; // n coefficients

    void validate() const {
        if (!(std::abs(t) > 0 && std::abs(t) < 1)) throw Error(Errc::InvalidInput, "Enoki germ needs 0 < |t| < 1");
        if (a.empty()) throw Error(Errc::InvalidInput, "Enoki germ needs n >= 1 coefficients");
    }
    CPair operator()(const CPair& z) const {
        const long n = static_cast<long>(a.size());
        Cx u = spow(t, n) * z[0] * spow(z[1], n);
        for (long i = 0; i < n; ++i) u += a[static_cast<size_t>(i)] * spow(t * z[1], i + 1);
        return {u, t * z[1]};
    }
};

struct IHGerm {
    long p = 0, q = 1, r = 1, s = 1;
    CPair operator()(const CPair& z) const {
        return {spow(z[0], p) * spow(z[1], q), spow(z[0], r) * spow(z[1], s)};
    }
};

} // namespace kato
