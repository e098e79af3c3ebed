#pragma once

// Truncated bivariate power series in z1, z2 with total-degree truncation.

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "kato/error.hpp"
#include "kato/scalar.hpp"

namespace kato {

using Exp2 = std::pair<int, int>;

template <class S>
class TruncSeries2 {
public:
    using Map = std::map<Exp2, S>;

    TruncSeries2() = default;
    explicit TruncSeries2(int order) : order_(order) {
        if (order < 0) throw Error(Errc::InvalidInput, "negative truncation order");
    }

    static TruncSeries2 constant(int order, const S& c) {
        TruncSeries2 r(order);
        r.set(0, 0, c);
        return r;
    }
    static TruncSeries2 monomial(int order, int i, int j, const S& c = S(1)) {
        TruncSeries2 r(order);
        r.set(i, j, c);
        return r;
    }
    static TruncSeries2 z1(int order) { return monomial(order, 1, 0); }
    static TruncSeries2 z2(int order) { return monomial(order, 0, 1); }

    int order() const { return order_; }
    const Map& terms() const { return c_; }
    size_t size() const { return c_.size(); }
    bool is_zero() const { return c_.empty(); }

    S coeff(int i, int j) const {
        auto it = c_.find({i, j});
        return it == c_.end() ? S(0) : it->second;
    }
    void set(int i, int j, const S& v) {
        if (i < 0 || j < 0) throw Error(Errc::InvalidInput, "negative exponent");
        if (i + j > order_) return;
        if (scalar_traits<S>::is_zero(v))
            c_.erase({i, j});
        else
            c_[{i, j}] = v;
    }
    void add_to(int i, int j, const S& v) {
        if (i + j > order_ || scalar_traits<S>::is_zero(v)) return;
        auto it = c_.find({i, j});
        if (it == c_.end()) {
            c_.emplace(Exp2{i, j}, v);
            return;
        }
        it->second = it->second + v;
        if (scalar_traits<S>::is_zero(it->second)) c_.erase(it);
    }

    // minimal total degree; order+1 for the zero series
    int min_order() const {
        int m = order_ + 1;
        for (const auto& [e, v] : c_) m = std::min(m, e.first + e.second);
        return m;
    }
    int max_degree() const {
        int m = -1;
        for (const auto& [e, v] : c_) m = std::max(m, e.first + e.second);
        return m;
    }
    int max_i() const {
        int m = -1;
        for (const auto& [e, v] : c_) m = std::max(m, e.first);
        return m;
    }
    int max_j() const {
        int m = -1;
        for (const auto& [e, v] : c_) m = std::max(m, e.second);
        return m;
    }

    TruncSeries2 truncated(int n) const {
        TruncSeries2 r(n);
        for (const auto& [e, v] : c_)
            if (e.first + e.second <= n) r.c_.emplace(e, v);
        return r;
    }

    TruncSeries2 operator-() const {
        TruncSeries2 r = *this;
        for (auto& [e, v] : r.c_) v = -v;
        return r;
    }
    TruncSeries2 scaled(const S& s) const {
        TruncSeries2 r(order_);
        if (scalar_traits<S>::is_zero(s)) return r;
        for (const auto& [e, v] : c_) r.set(e.first, e.second, v * s);
        return r;
    }

    friend TruncSeries2 operator+(const TruncSeries2& a, const TruncSeries2& b) {
        TruncSeries2 r = a.truncated(std::min(a.order_, b.order_));
        for (const auto& [e, v] : b.c_) r.add_to(e.first, e.second, v);
        return r;
    }
    friend TruncSeries2 operator-(const TruncSeries2& a, const TruncSeries2& b) { return a + (-b); }
    friend TruncSeries2 operator*(const TruncSeries2& a, const TruncSeries2& b) {
        const int n = std::min(a.order_, b.order_);
        TruncSeries2 r(n);
        if (a.c_.empty() || b.c_.empty()) return r;
        std::vector<S> acc(static_cast<size_t>((n + 1) * (n + 2) / 2), S(0));
        std::vector<char> used(acc.size(), 0);
        for (const auto& [ea, va] : a.c_) {
            const int da = ea.first + ea.second;
            if (da > n) continue;
            for (const auto& [eb, vb] : b.c_) {
                const int i = ea.first + eb.first, j = ea.second + eb.second;
                if (i + j > n) continue;
                const size_t k = idx(i, j);
                acc[k] = used[k] ? acc[k] + va * vb : va * vb;
                used[k] = 1;
            }
        }
        for (int d = 0; d <= n; ++d)
            for (int j = 0; j <= d; ++j) {
                const size_t k = idx(d - j, j);
                if (used[k] && !scalar_traits<S>::is_zero(acc[k])) r.c_.emplace(Exp2{d - j, j}, std::move(acc[k]));
            }
        return r;
    }
    friend TruncSeries2 operator*(const S& s, const TruncSeries2& a) { return a.scaled(s); }

    TruncSeries2 pow(long e) const {
        if (e < 0) throw Error(Errc::InvalidInput, "negative integer power of a series");
        TruncSeries2 r = constant(order_, S(1)), x = *this;
        while (e) {
            if (e & 1) r = r * x;
            e >>= 1;
            if (e) x = x * x;
        }
        return r;
    }

    friend bool operator==(const TruncSeries2& a, const TruncSeries2& b) {
        return a.order_ == b.order_ && a.c_ == b.c_;
    }
    friend bool operator!=(const TruncSeries2& a, const TruncSeries2& b) { return !(a == b); }

private:
    static size_t idx(int i, int j) {
        const int d = i + j;
        return static_cast<size_t>(d * (d + 1) / 2 + j);
    }

    int order_ = 0;
    Map c_;
};

template <class S>
using SeriesPair = std::pair<TruncSeries2<S>, TruncSeries2<S>>;

// binomial coefficient C(e, n) for rational e
inline Q binom_q(const Q& e, long n) {
    Q r = 1;
    for (long k = 0; k < n; ++k) r = r * (e - k) / (k + 1);
    return r;
}

template <class S>
TruncSeries2<S> pow_rational(const TruncSeries2<S>& f, const Q& e) {
    if (f.coeff(0, 0) != S(1)) throw Error(Errc::NonUnitConstant, "constant term must be 1");
    const int n = f.order();
    TruncSeries2<S> h = f - TruncSeries2<S>::constant(n, S(1));
    TruncSeries2<S> r = TruncSeries2<S>::constant(n, S(1));
    TruncSeries2<S> hp = TruncSeries2<S>::constant(n, S(1));
    for (long k = 1; k <= n; ++k) {
        hp = hp * h;
        if (hp.is_zero()) break;
        Q c = binom_q(e, k);
        if (c == 0) break;
        r = r + hp.scaled(scalar_traits<S>::from_q(c));
    }
    return r;
}

// f(g1, g2), truncated to the common order
template <class S>
TruncSeries2<S> compose_pair(const TruncSeries2<S>& f, const TruncSeries2<S>& g1, const TruncSeries2<S>& g2) {
    if (!scalar_traits<S>::is_zero(g1.coeff(0, 0)) || !scalar_traits<S>::is_zero(g2.coeff(0, 0)))
        throw Error(Errc::NonVanishingSubstituent, "substituted series must vanish at the origin");
    const int n = std::min({f.order(), g1.order(), g2.order()});
    TruncSeries2<S> r(n);
    if (f.is_zero()) return r;
    const int mi = f.max_i(), mj = f.max_j();
    std::vector<TruncSeries2<S>> p2;
    p2.push_back(TruncSeries2<S>::constant(n, S(1)));
    const TruncSeries2<S> h2 = g2.truncated(n);
    for (int j = 1; j <= mj; ++j) {
        if (p2.back().is_zero()) {
            p2.push_back(p2.back());
            continue;
        }
        p2.push_back(p2.back() * h2);
    }
    // group by power of z1: sum_i g1^i * (sum_j f_ij g2^j)
    std::vector<TruncSeries2<S>> inner(static_cast<size_t>(mi + 1), TruncSeries2<S>(n));
    for (const auto& [e, v] : f.terms()) {
        auto& t = inner[static_cast<size_t>(e.first)];
        for (const auto& [e2, v2] : p2[static_cast<size_t>(e.second)].terms()) t.add_to(e2.first, e2.second, v * v2);
    }
    const TruncSeries2<S> h1 = g1.truncated(n);
    TruncSeries2<S> p1 = TruncSeries2<S>::constant(n, S(1));
    for (int i = 0; i <= mi; ++i) {
        if (i > 0) p1 = p1 * h1;
        if (p1.is_zero()) break;
        if (!inner[static_cast<size_t>(i)].is_zero()) r = r + p1 * inner[static_cast<size_t>(i)];
    }
    return r;
}

template <class S>
SeriesPair<S> compose_maps(const SeriesPair<S>& f, const SeriesPair<S>& g) {
    return {compose_pair(f.first, g.first, g.second), compose_pair(f.second, g.first, g.second)};
}

template <class S>
TruncSeries2<S> d_z1(const TruncSeries2<S>& f) {
    TruncSeries2<S> r(f.order());
    for (const auto& [e, v] : f.terms())
        if (e.first > 0) r.set(e.first - 1, e.second, v * S(static_cast<long>(e.first)));
    return r;
}

template <class S>
TruncSeries2<S> d_z2(const TruncSeries2<S>& f) {
    TruncSeries2<S> r(f.order());
    for (const auto& [e, v] : f.terms())
        if (e.second > 0) r.set(e.first, e.second - 1, v * S(static_cast<long>(e.second)));
    return r;
}

template <class S>
TruncSeries2<S> with_order(const TruncSeries2<S>& f, int n) {
    TruncSeries2<S> r(n);
    for (const auto& [e, v] : f.terms()) r.set(e.first, e.second, v);
    return r;
}

} // namespace kato
