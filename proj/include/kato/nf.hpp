#pragma once

// Exact arithmetic in Q(tau) = Q[t]/(m(t)).
// An element with no field attached is a plain rational and combines with any field.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kato/error.hpp"

namespace kato {

using Q = mpq_class;

inline Q parse_rational(const std::string& s) {
    Q x;
    std::string t = s;
    t.erase(std::remove_if(t.begin(), t.end(), ::isspace), t.end());
    if (t.empty()) throw Error(Errc::InvalidInput, "empty rational");
    if (t.front() == '+') t.erase(t.begin());
    auto dot = t.find('.');
    if (dot != std::string::npos && t.find('/') == std::string::npos) {
        // decimal literal
        bool neg = !t.empty() && t[0] == '-';
        std::string ip = t.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
        std::string fp = t.substr(dot + 1);
        std::string digits = (ip.empty() ? "0" : ip) + fp;
        mpz_class num, den = 1;
        if (num.set_str(digits, 10) != 0) throw Error(Errc::InvalidInput, "bad rational '" + s + "'");
        for (size_t i = 0; i < fp.size(); ++i) den *= 10;
        x = Q(num, den);
        if (neg) x = -x;
        x.canonicalize();
        return x;
    }
    if (x.set_str(t, 10) != 0) throw Error(Errc::InvalidInput, "bad rational '" + s + "'");
    if (x.get_den() == 0) throw Error(Errc::InvalidInput, "zero denominator in '" + s + "'");
    x.canonicalize();
    return x;
}

inline Q qq(long n, long d = 1) {
    if (d == 0) throw Error(Errc::InvalidInput, "zero denominator");
    Q r{mpz_class(n), mpz_class(d)};
    r.canonicalize();
    return r;
}

inline std::string to_string(const Q& q) { return q.get_str(); }

inline Q qpow(const Q& x, long e) {
    if (e == 0) return Q(1);
    if (e < 0) {
        if (x == 0) throw Error(Errc::InvalidInput, "zero to a negative power");
        return qpow(Q(1) / x, -e);
    }
    Q r;
    mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(e));
    r.canonicalize();
    return r;
}

// exact d-th root of a rational, if it exists
inline std::optional<Q> qroot(const Q& x, long d) {
    if (d <= 0) return std::nullopt;
    if (d == 1) return x;
    if (x < 0 && d % 2 == 0) return std::nullopt;
    mpz_class n = abs(x.get_num()), m = x.get_den(), rn, rm;
    if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(d))) return std::nullopt;
    if (!mpz_root(rm.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(d))) return std::nullopt;
    Q r(rn, rm);
    r.canonicalize();
    return x < 0 ? Q(-r) : r;
}

// Defining polynomial, stored monic, coefficients low to high.
class Field {
public:
    explicit Field(std::vector<Q> coeffs) {
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
        if (coeffs.size() < 2) throw Error(Errc::InvalidField, "defining polynomial must have degree >= 1");
        Q lead = coeffs.back();
        for (auto& c : coeffs) c /= lead;
        m_ = std::move(coeffs);
        if (degree() >= 2) check_no_rational_root();
    }
    int degree() const { return static_cast<int>(m_.size()) - 1; }
    const std::vector<Q>& modulus() const { return m_; }
    bool same(const Field& o) const { return m_ == o.m_; }

private:
    void check_no_rational_root() const;
    std::vector<Q> m_;
};

using FieldPtr = std::shared_ptr<const Field>;

class NF {
public:
    NF() = default;
    NF(long v) : c_{Q(v)} { trim(); }
    NF(const Q& v) : c_{v} { trim(); }
    NF(FieldPtr f, std::vector<Q> c) : f_(std::move(f)), c_(std::move(c)) { reduce(); }

    static NF gen(const FieldPtr& f) { return NF(f, {Q(0), Q(1)}); }

    const FieldPtr& field() const { return f_; }
    const std::vector<Q>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    bool is_rational() const { return c_.size() <= 1; }
    Q rational() const {
        if (!is_rational()) throw Error(Errc::FractionalPower, "element is not rational");
        return c_.empty() ? Q(0) : c_[0];
    }

    NF operator-() const {
        NF r = *this;
        for (auto& c : r.c_) c = -c;
        return r;
    }
    NF& operator+=(const NF& o) {
        adopt(o);
        if (c_.size() < o.c_.size()) c_.resize(o.c_.size());
        for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    NF& operator-=(const NF& o) { return *this += -o; }
    NF& operator*=(const NF& o) {
        adopt(o);
        if (c_.empty() || o.c_.empty()) {
            c_.clear();
            return *this;
        }
        if (c_.size() == 1 && o.c_.size() == 1) {
            c_[0] *= o.c_[0];
            return *this;
        }
        std::vector<Q> r(c_.size() + o.c_.size() - 1);
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        c_ = std::move(r);
        reduce();
        return *this;
    }
    NF& operator/=(const NF& o) { return *this *= o.inverse(); }

    NF inverse() const;

    friend NF operator+(NF a, const NF& b) { return a += b; }
    friend NF operator-(NF a, const NF& b) { return a -= b; }
    friend NF operator*(NF a, const NF& b) { return a *= b; }
    friend NF operator/(NF a, const NF& b) { return a /= b; }
    friend bool operator==(const NF& a, const NF& b) {
        if (a.f_ && b.f_ && a.f_ != b.f_ && !a.f_->same(*b.f_))
            throw Error(Errc::ModeMismatch, "elements of different number fields");
        return a.c_ == b.c_;
    }
    friend bool operator!=(const NF& a, const NF& b) { return !(a == b); }

private:
    void adopt(const NF& o) {
        if (!o.f_) return;
        if (!f_) {
            f_ = o.f_;
            return;
        }
        if (f_ != o.f_ && !f_->same(*o.f_)) throw Error(Errc::ModeMismatch, "elements of different number fields");
    }
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    void reduce() {
        trim();
        if (!f_) {
            if (c_.size() > 1) throw Error(Errc::InvalidField, "polynomial element without a field");
            return;
        }
        const auto& m = f_->modulus();
        const size_t d = m.size() - 1;
        while (c_.size() > d) {
            Q lead = c_.back();
            size_t shift = c_.size() - 1 - d;
            for (size_t i = 0; i < d; ++i) c_[shift + i] -= lead * m[i];
            c_.pop_back();
            trim();
        }
    }

    FieldPtr f_;
    std::vector<Q> c_;
};

namespace detail {

inline void poly_trim(std::vector<Q>& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// a = q*b + r
inline void poly_divmod(const std::vector<Q>& a, const std::vector<Q>& b, std::vector<Q>& q, std::vector<Q>& r) {
    r = a;
    poly_trim(r);
    q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, Q(0));
    while (r.size() >= b.size() && !r.empty()) {
        Q f = r.back() / b.back();
        size_t sh = r.size() - b.size();
        q[sh] = f;
        for (size_t i = 0; i < b.size(); ++i) r[sh + i] -= f * b[i];
        r.pop_back();
        poly_trim(r);
    }
}

inline std::vector<Q> poly_mul(const std::vector<Q>& a, const std::vector<Q>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Q> r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

inline std::vector<Q> poly_sub(std::vector<Q> a, const std::vector<Q>& b) {
    if (a.size() < b.size()) a.resize(b.size());
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    poly_trim(a);
    return a;
}

} // namespace detail

inline NF NF::inverse() const {
    if (c_.empty()) throw Error(Errc::InvalidInput, "division by zero");
    if (c_.size() == 1) {
        NF r = *this;
        r.c_[0] = Q(1) / c_[0];
        return r;
    }
    // extended Euclid: s*a + t*m = g
    using detail::poly_divmod;
    std::vector<Q> r0 = f_->modulus(), r1 = c_, s0, s1 = {Q(1)};
    while (!r1.empty()) {
        std::vector<Q> q, r;
        poly_divmod(r0, r1, q, r);
        auto s2 = detail::poly_sub(s0, detail::poly_mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r0.size() != 1) throw Error(Errc::InvalidField, "element not invertible; defining polynomial is reducible");
    Q g = r0[0];
    for (auto& c : s0) c /= g;
    return NF(f_, s0);
}

inline void Field::check_no_rational_root() const {
    // clear denominators, then try p/q with p | a0, q | an over small coefficients
    mpz_class l = 1;
    for (const auto& c : m_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<mpz_class> z;
    for (const auto& c : m_) z.push_back(mpz_class(c * l));
    auto eval_zero = [&](const Q& x) {
        Q acc = 0;
        for (size_t i = z.size(); i-- > 0;) acc = acc * x + Q(z[i]);
        return acc == 0;
    };
    if (z[0] == 0) throw Error(Errc::InvalidField, "defining polynomial has the rational root 0");
    mpz_class a0 = abs(z.front()), an = abs(z.back());
    const mpz_class limit = 1000000;
    if (a0 > limit || an > limit) return;
    auto divisors = [](long v) {
        std::vector<long> d;
        for (long i = 1; i * i <= v; ++i)
            if (v % i == 0) {
                d.push_back(i);
                if (i != v / i) d.push_back(v / i);
            }
        return d;
    };
    for (long p : divisors(a0.get_si()))
        for (long q : divisors(an.get_si()))
            for (int sgn : {1, -1}) {
                Q x(mpz_class(sgn * p), mpz_class(q));
                x.canonicalize();
                if (eval_zero(x))
                    throw Error(Errc::InvalidField, "defining polynomial has the rational root " + x.get_str());
            }
}

inline NF nf_pow(NF x, long e) {
    if (e < 0) {
        x = x.inverse();
        e = -e;
    }
    NF r(1);
    while (e) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

// c0 + c1 t + ...
inline std::ostream& operator<<(std::ostream& os, const NF& x) {
    if (x.is_zero()) return os << "0";
    for (size_t i = 0; i < x.coeffs().size(); ++i) {
        if (i) os << " + ";
        os << x.coeffs()[i].get_str();
        if (i) os << "*t^" << i;
    }
    return os;
}

} // namespace kato
