#pragma once

// Branch intersection matrix: tridiagonal, diagonal = opposite self-intersections, off-diagonal -1.

#include <vector>

#include "kato/error.hpp"
#include "kato/signature.hpp"

namespace kato {

struct ChainMatrix {
    std::vector<long> diag;
};

// continuant D_i = d_i D_{i-1} - D_{i-2}
inline long chain_det(const ChainMatrix& m) {
    if (m.diag.empty()) throw Error(Errc::InvalidInput, "empty branch");
    long prev = 1, cur = m.diag[0];
    for (size_t i = 1; i < m.diag.size(); ++i) {
        long next = m.diag[i] * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

inline long k_invariant(const std::vector<long>& ks) { return chain_det({branch_selfintersections(ks)}); }

} // namespace kato
