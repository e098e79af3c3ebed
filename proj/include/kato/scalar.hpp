#pragma once

// Uniform interface over the two scalar domains: exact NF and std::complex<double>.

#include <cmath>
#include <complex>
#include <string>

#include "kato/nf.hpp"

namespace kato {

using Cx = std::complex<double>;

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<NF> {
    static constexpr bool exact = true;
    static NF from_q(const Q& q) { return NF(q); }
    static bool is_zero(const NF& x) { return x.is_zero(); }
    static double magnitude(const NF& x) {
        // only meaningful for rationals; used for reporting
        return x.is_rational() ? std::fabs(x.rational().get_d()) : (x.is_zero() ? 0.0 : 1.0);
    }
    static bool near(const NF& a, const NF& b, double) { return a == b; }
};

template <>
struct scalar_traits<Cx> {
    static constexpr bool exact = false;
    static Cx from_q(const Q& q) { return Cx(q.get_d(), 0.0); }
    static bool is_zero(const Cx& x) { return x == Cx(0.0, 0.0); }
    static double magnitude(const Cx& x) { return std::abs(x); }
    static bool near(const Cx& a, const Cx& b, double tol) { return std::abs(a - b) < tol; }
};

template <class S>
S spow(S x, long e) {
    if (e < 0) {
        x = S(1) / x;
        e = -e;
    }
    S r(1);
    while (e) {
        if (e & 1) r = r * x;
        x = x * x;
        e >>= 1;
    }
    return r;
}

template <class S>
bool is_zero(const S& x) { return scalar_traits<S>::is_zero(x); }

} // namespace kato
