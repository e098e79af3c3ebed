#pragma once

// Blow-up combinatorics of one branch: Dloussky sequences, GL(2,Z) words, derived integers.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "kato/error.hpp"

namespace kato {

enum class Letter { A, Aprime };

struct Mat2Z {
    long p = 1, q = 0, r = 0, s = 1;

    long det() const { return p * s - q * r; }
    friend Mat2Z operator*(const Mat2Z& x, const Mat2Z& y) {
        return {x.p * y.p + x.q * y.r, x.p * y.q + x.q * y.s, x.r * y.p + x.s * y.r, x.r * y.q + x.s * y.s};
    }
    friend bool operator==(const Mat2Z&, const Mat2Z&) = default;
};

inline Mat2Z letter_matrix(Letter l) { return l == Letter::A ? Mat2Z{1, 1, 0, 1} : Mat2Z{0, 1, 1, 1}; }

inline Mat2Z compile_word(const std::vector<Letter>& w) {
    Mat2Z m;
    for (Letter l : w) m = m * letter_matrix(l);
    return m;
}

inline void check_seq(const std::vector<long>& ks) {
    if (ks.empty()) throw Error(Errc::InvalidSignature, "empty Dloussky sequence");
    for (long k : ks)
        if (k < 1) throw Error(Errc::InvalidSignature, "sequence entries must be >= 1");
}

// prod [[0,1],[1,k_i]]
inline Mat2Z seq_to_matrix(const std::vector<long>& ks) {
    check_seq(ks);
    Mat2Z m;
    for (long k : ks) m = m * Mat2Z{0, 1, 1, k};
    return m;
}

inline std::vector<Letter> seq_to_word(const std::vector<long>& ks) {
    check_seq(ks);
    std::vector<Letter> w;
    for (long k : ks) {
        w.push_back(Letter::Aprime);
        for (long i = 1; i < k; ++i) w.push_back(Letter::A);
    }
    return w;
}

namespace detail {

// peel [[0,1],[1,k]] off the left: M = B_k * M'
inline bool factor_blocks(const Mat2Z& m, std::vector<long>& out, int depth) {
    if (depth > 4096 || m.p + m.q == 0) return false;
    for (long k = 1;; ++k) {
        Mat2Z rest{m.r - k * m.p, m.s - k * m.q, m.p, m.q};
        if (rest.p < 0 || rest.q < 0) break;
        if (rest == Mat2Z{}) {
            out.push_back(k);
            return true;
        }
        if (rest.p + rest.q + rest.r + rest.s < m.p + m.q + m.r + m.s && rest.r + rest.s > 0) {
            out.push_back(k);
            if (factor_blocks(rest, out, depth + 1)) return true;
            out.pop_back();
        }
    }
    return false;
}

} // namespace detail

inline std::vector<long> matrix_to_seq(const Mat2Z& m) {
    if (m.p < 0 || m.q < 0 || m.r < 0 || m.s < 0)
        throw Error(Errc::NotFactorable, "matrix has negative entries");
    std::vector<long> ks;
    if (!detail::factor_blocks(m, ks, 0)) throw Error(Errc::NotFactorable, "matrix is not a product of [[0,1],[1,k]] blocks");
    return ks;
}

// blocks A' A^{k-1}
inline std::vector<Letter> matrix_to_word(const Mat2Z& m) { return seq_to_word(matrix_to_seq(m)); }

inline std::string word_string(const std::vector<Letter>& w) {
    std::string s;
    for (Letter l : w) s += (l == Letter::A ? "A" : "A'");
    return s;
}

inline long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

struct BranchSignature {
    long p = 0, q = 0, r = 0, s = 0, l = 1;
    std::vector<long> ks;
    long delta = 0, d = 0, n = 0, sigma = 0, kS = 0, K = 0;
    bool twisted = false;

    Mat2Z matrix() const { return {p, q, r, s}; }
    long word_length() const { return n - l; }
};

inline BranchSignature derive_signature(const Mat2Z& m, long l, std::vector<long> ks = {}) {
    if (l < 1) throw Error(Errc::InvalidSignature, "l must be >= 1");
    if (m.p < 0 || m.q < 0 || m.r < 0 || m.s < 0) throw Error(Errc::InvalidSignature, "negative matrix entry");
    BranchSignature g;
    g.p = m.p;
    g.q = m.q;
    g.r = m.r;
    g.s = m.s;
    g.l = l;
    g.delta = m.det();
    if (g.delta != 1 && g.delta != -1) throw Error(Errc::InvalidSignature, "|ps - qr| must be 1");
    if (g.p + g.q == 0) throw Error(Errc::InvalidSignature, "p + q must be positive");
    g.kS = g.r + g.s;
    g.d = g.kS - (g.p + g.q);
    if (g.d < 1 || g.d >= g.kS) throw Error(Errc::InvalidSignature, "d = (r+s)-(p+q) must lie in [1, r+s)");
    if (ks.empty()) {
        try {
            ks = matrix_to_seq(m);
        } catch (const Error&) {
            throw Error(Errc::InvalidSignature, "matrix does not come from a Dloussky sequence");
        }
    } else if (!(seq_to_matrix(ks) == m)) {
        throw Error(Errc::InvalidSignature, "sequence does not reproduce the matrix");
    }
    g.ks = ks;
    g.n = l + std::accumulate(ks.begin(), ks.end(), 0L);
    g.sigma = g.p + g.q + l - 1;
    const long m1 = g.kS - 1;
    g.K = std::max(0L, floor_div(l - g.d, m1));
    g.twisted = (l >= g.d) && ((l - g.d) % m1 == 0);
    return g;
}

inline BranchSignature signature_from_seq(const std::vector<long>& ks, long l) {
    return derive_signature(seq_to_matrix(ks), l, ks);
}

// opposite self-intersections of the branch
inline std::vector<long> branch_selfintersections(const std::vector<long>& ks) {
    check_seq(ks);
    std::vector<long> out;
    const size_t N = ks.size();
    for (size_t i = 0; i < N; ++i) {
        const bool odd_pos = (i % 2 == 0); // k_1, k_3, ... in 1-based terms
        if (odd_pos) {
            const bool last = (i + 1 == N);
            const long twos = last ? ks[i] : ks[i] - 1;
            for (long t = 0; t < twos; ++t) out.push_back(2);
        } else {
            out.push_back(ks[i] + 2);
        }
    }
    return out;
}

} // namespace kato
