#include <gtest/gtest.h>

#include <random>

#include "kato/conjugator.hpp"

using namespace kato;

using T = TruncSeries2<NF>;

namespace {

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvalidInput;
}

BiratGerm<NF> exact_germ(const BranchSignature& sg, const Q& tau, std::mt19937& rng, const Q& aK = 0) {
    std::uniform_int_distribution<long> num(-5, 5), den(1, 4);
    std::vector<NF> a{NF(qpow(tau, sg.kS - 1))};
    for (long i = 1; i < sg.l; ++i) a.push_back(NF(qq(num(rng), den(rng))));
    return make_birat(sg, a, NF(aK));
}

struct Sig {
    Mat2Z m;
    long l;
};

const std::vector<Sig> kSuite = {{{0, 1, 1, 1}, 1}, {{0, 1, 1, 1}, 2}, {{0, 1, 1, 1}, 3}, {{0, 1, 1, 2}, 1},
                                 {{0, 1, 1, 2}, 2}, {{1, 1, 1, 2}, 1}, {{1, 1, 1, 2}, 2}, {{1, 2, 1, 3}, 2}};

} // namespace

TEST(Conjugator, EInftyExamples) {
    const auto g = derive_signature({0, 1, 1, 2}, 2);
    EXPECT_EQ(e_infty(g).points, (std::vector<Exp2>{{0, 0}, {1, 0}}));
    // sigma k/(k-1) = 3*3/2: weights 0, 3 (i = 0) and 2 (i = 1) lie below 4.5
    const auto h = derive_signature({1, 1, 1, 2}, 2);
    EXPECT_EQ(e_infty(h).points, (std::vector<Exp2>{{0, 0}, {0, 1}, {1, 0}}));
}

TEST(Conjugator, EmIncreasesToEInfty) {
    for (const auto& c : kSuite) {
        const auto g = derive_signature(c.m, c.l);
        const auto inf = e_infty(g).points;
        std::vector<Exp2> prev;
        for (long m = 0; m < 12; ++m) {
            const auto cur = e_m(g, m).points;
            for (const auto& e : prev) EXPECT_NE(std::find(cur.begin(), cur.end(), e), cur.end());
            for (const auto& e : cur) EXPECT_NE(std::find(inf.begin(), inf.end(), e), inf.end());
            prev = cur;
        }
        EXPECT_EQ(prev, inf);
    }
}

TEST(Conjugator, ResonancesMatchBruteForce) {
    for (const auto& c : kSuite) {
        const auto g = derive_signature(c.m, c.l);
        std::vector<Resonance> want;
        // (i + p, j + q) = k (r, s), ordered by k
        for (long k = 1; k < 40; ++k)
            for (long i = 0; i <= 12; ++i)
                for (long j = 0; i + j <= 12; ++j)
                    if (i + g.p == k * g.r && j + g.q == k * g.s) want.push_back({i, j, k + g.l});
        EXPECT_EQ(resonances(g, 12), want);
    }
}

TEST(Conjugator, MuBound) {
    EXPECT_EQ(mu_bound(derive_signature({0, 1, 1, 1}, 3)), 3 + 2);
    EXPECT_EQ(mu_bound(derive_signature({0, 1, 1, 2}, 1)), 2);
}

TEST(Conjugator, MuSolvesFunctionalEquation) {
    std::mt19937 rng(4);
    for (const auto& c : kSuite) {
        const auto sg = derive_signature(c.m, c.l);
        const auto g = exact_germ(sg, Q(1, 2), rng, Q(2, 3));
        const int N = 10;
        const T mu = mu_series(g, N);
        const T one = T::constant(N, NF(1));
        const auto G = birat_generic_form(g, N);
        // B^r (1 + mu o G) = (1 + mu)^k
        const T lhs = unit_bracket(g, N).pow(sg.r) * (one + compose_pair(mu, G.first, G.second));
        EXPECT_EQ(lhs, (one + mu).pow(sg.kS));
        if (sg.l >= 2) {
            EXPECT_EQ(mu.coeff(0, 1), NF(qq(sg.r, sg.kS)) * g.a[1] / g.a0());
        }
    }
}

TEST(Conjugator, NormalizeVerifiesExactly) {
    std::mt19937 rng(17);
    for (const auto& c : kSuite) {
        const auto sg = derive_signature(c.m, c.l);
        const auto g = exact_germ(sg, Q(1, 2), rng, Q(-1, 5));
        const auto cert = normalize_exact(g, NF(Q(1, 2)));
        EXPECT_EQ(cert.order, 3 * sg.sigma + sg.kS);
        EXPECT_TRUE(cert.residual.first.is_zero());
        EXPECT_TRUE(cert.residual.second.is_zero());
        EXPECT_TRUE(verify(cert));
        EXPECT_EQ(cert.target.lambda, lambda_of(sg, g.a0()));
        EXPECT_EQ(cert.target.b.at(sg.p + sg.q), NF(1));
        EXPECT_EQ(cert.phi.C, NF(qpow(Q(1, 2), sg.r)));
        EXPECT_EQ(cert.phi.A.at({1, 0}), NF(qpow(Q(1, 2), sg.p - sg.delta)));
    }
}

TEST(Conjugator, TamperedCertificateFails) {
    std::mt19937 rng(2);
    const auto sg = derive_signature({0, 1, 1, 2}, 2);
    auto cert = normalize_exact(exact_germ(sg, Q(1, 2), rng), NF(Q(1, 2)));
    auto bad = cert;
    bad.phi.A[{1, 0}] = bad.phi.A[{1, 0}] + NF(1);
    EXPECT_FALSE(verify(bad));
    bad = cert;
    bad.target.b[sg.sigma] = bad.target.b[sg.sigma] + NF(Q(1, 7));
    EXPECT_FALSE(verify(bad));
}

TEST(Conjugator, TruncatedCertificateVerifiesAtLowerOrder) {
    std::mt19937 rng(3);
    const auto sg = derive_signature({1, 1, 1, 2}, 2);
    auto cert = normalize_exact(exact_germ(sg, Q(1, 2), rng), NF(Q(1, 2)));
    cert.order = 7;
    cert.phi.mu = with_order(cert.phi.mu, 7);
    EXPECT_TRUE(verify(cert));
}

TEST(Conjugator, FirstTriangularCoefficient) {
    // b_{p+q+1} = delta a1 / (C a0 k) when d = r+s-p-q >= 2
    std::mt19937 rng(8);
    int checked = 0;
    for (const auto& c : kSuite) {
        const auto sg = derive_signature(c.m, c.l);
        if (sg.l < 2 || sg.d < 2) continue;
        const auto g = exact_germ(sg, Q(1, 2), rng);
        const auto cert = normalize_exact(g, NF(Q(1, 2)));
        const NF want = NF(sg.delta) * g.a[1] / (cert.phi.C * g.a0() * NF(sg.kS));
        EXPECT_EQ(cert.target.b.at(sg.p + sg.q + 1), want);
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(Conjugator, FirstTriangularCoefficientNonlinearWhenDIsOne) {
    // with d = 1, A_{01} enters the same bidegree and b_{p+q+1} is not affine in a1
    const auto sg = derive_signature({0, 1, 1, 1}, 2);
    auto b_of = [&](long a1) {
        const auto g = make_birat(sg, {NF(Q(1, 2)), NF(a1)}, NF(0));
        const auto cert = normalize_exact(g, NF(Q(1, 2)));
        EXPECT_TRUE(verify(cert));
        return cert.target.b.at(sg.p + sg.q + 1);
    };
    const NF b0 = b_of(0), b1 = b_of(1), b2 = b_of(2);
    EXPECT_NE(b2 - b0, NF(2) * (b1 - b0));
}

TEST(Conjugator, VectorFieldCaseSlope) {
    auto f = std::make_shared<const Field>(std::vector<Q>{Q(-1), Q(0), Q(3)});
    const NF t = NF::gen(f);
    const auto sg = derive_signature({1, 1, 1, 2}, 1);
    std::vector<NF> cs;
    for (int a = 0; a < 3; ++a) {
        const auto cert = normalize_exact(make_birat(sg, {t * t}, NF(f, {Q(a)})), t);
        EXPECT_TRUE(cert.vf_case);
        EXPECT_EQ(cert.target.lambda, NF(1));
        EXPECT_TRUE(verify(cert));
        cs.push_back(cert.target.c);
    }
    const NF slope = cs[1] - cs[0];
    EXPECT_EQ(cs[2] - cs[1], slope);
    // independent of the mu correction: delta C^{p+q-e} / (k a0)
    const long e = sg.sigma * sg.kS / (sg.kS - 1);
    EXPECT_EQ(slope, NF(sg.delta) * nf_pow(t, sg.p + sg.q - e) / (NF(sg.kS) * t * t));
}

TEST(Conjugator, ExactModeNeedsMatchingTau) {
    std::mt19937 rng(1);
    const auto sg = derive_signature({0, 1, 1, 2}, 2);
    const auto g = exact_germ(sg, Q(1, 2), rng);
    EXPECT_EQ(code_of([&] { normalize_exact(g, NF(Q(1, 3))); }), Errc::FractionalPower);
    EXPECT_EQ(code_of([&] { normalize_exact(g, NF(Q(1, 2)), 3); }), Errc::InvalidInput);
}

TEST(Conjugator, ComplexModeBothBranches) {
    const auto sg = derive_signature({0, 1, 1, 2}, 2);
    const auto g = make_birat<Cx>(sg, {Cx(0.3, 0.2), Cx(-0.5, 1.0)}, Cx(0.7));
    for (long e = 0; e < sg.kS - 1; ++e) {
        const auto cert = normalize_complex(g, e);
        EXPECT_TRUE(verify(cert, 1e-9));
        EXPECT_LT(std::abs(cert.target.lambda - lambda_of(sg, g.a0(), cert.eps)), 1e-12);
    }
}

TEST(Conjugator, EpsActionMatchesSeriesConjugation) {
    // psi = (eps^j z1, eps z2); psi^{-1} F psi computed as series
    FavreGerm<Cx> f;
    f.k = 4;
    f.sigma = 3; // (k-1) | sigma: c term at z2^4, and eps^4 != eps^{4-j}
    f.lambda = Cx(0.7, 0.1);
    f.b = {{2, Cx(1)}, {3, Cx(0.2, -0.4)}};
    f.c = Cx(0.5, 0.5);
    const int N = 12;
    for (const Cx& eps : roots_of_unity<Cx>(f.k - 1)) {
        const long j = 2;
        using TC = TruncSeries2<Cx>;
        const auto F = f.as_series(N);
        const SeriesPair<Cx> psi{TC::monomial(N, 1, 0, spow(eps, j)), TC::monomial(N, 0, 1, eps)};
        const SeriesPair<Cx> psi_inv{TC::monomial(N, 1, 0, spow(eps, -j)), TC::monomial(N, 0, 1, Cx(1) / eps)};
        const auto conj = compose_maps(psi_inv, compose_maps(F, psi));
        const auto want = apply_eps(f, eps).as_series(N);
        auto diff = conj.first - want.first;
        for (const auto& [e, v] : diff.terms()) EXPECT_LT(std::abs(v), 1e-12);
        diff = conj.second - want.second;
        for (const auto& [e, v] : diff.terms()) EXPECT_LT(std::abs(v), 1e-12);
    }
}

TEST(Conjugator, FavreEquivalence) {
    FavreGerm<Cx> f;
    f.k = 4;
    f.sigma = 3;
    f.lambda = Cx(1);
    f.b = {{1, Cx(1)}, {2, Cx(0.3)}, {3, Cx(0.1, 0.2)}};
    f.c = Cx(0.25);
    const auto roots = roots_of_unity<Cx>(3);
    const auto h = apply_eps(f, roots[2]);
    const auto found = favre_equivalent(f, h);
    ASSERT_TRUE(found.has_value());
    EXPECT_LT(std::abs(*found - roots[2]), 1e-12);
    auto bad = h;
    bad.b[2] += Cx(1e-3);
    EXPECT_FALSE(favre_equivalent(f, bad).has_value());
    auto other = f;
    other.k = 5;
    EXPECT_EQ(code_of([&] { favre_equivalent(f, other); }), Errc::ParameterMismatch);
}

TEST(Conjugator, LActionMatchesSeriesConjugation) {
    // G' = phi^{-1} G phi with phi = (A z1, B z2)
    const auto sg = derive_signature({0, 1, 1, 2}, 2);
    const auto g = make_birat<Cx>(sg, {Cx(1), Cx(0.4, -0.2)}, Cx(0.3));
    const long m = sg.p + sg.s + sg.r * sg.l - sg.delta - 1;
    int hits = 0;
    for (const Cx& A : roots_of_unity<Cx>(m))
        for (const Cx& B : roots_of_unity<Cx>(m)) {
            if (!in_L(sg, A, B)) continue;
            ++hits;
            const int N = static_cast<int>(origin_degree(sg));
            using TC = TruncSeries2<Cx>;
            const SeriesPair<Cx> phi{TC::monomial(N, 1, 0, A), TC::monomial(N, 0, 1, B)};
            const SeriesPair<Cx> phi_inv{TC::monomial(N, 1, 0, Cx(1) / A), TC::monomial(N, 0, 1, Cx(1) / B)};
            const auto conj = compose_maps(phi_inv, compose_maps(birat_origin_form(g, N), phi));
            const auto want = birat_origin_form(apply_L(g, A, B), N);
            for (const auto& d : {conj.first - want.first, conj.second - want.second})
                for (const auto& [e, v] : d.terms()) EXPECT_LT(std::abs(v), 1e-12);
        }
    EXPECT_GE(hits, 2); // (-1, -1) is a nontrivial element here
}

TEST(Conjugator, BiratEquivalence) {
    const auto sg = derive_signature({0, 1, 1, 2}, 2);
    const auto g = make_birat<NF>(sg, {NF(1), NF(Q(2, 3))}, NF(Q(1, 5)));
    const auto h = apply_L(g, NF(-1), NF(-1));
    EXPECT_EQ(h.a[1], NF(Q(-2, 3)));
    const auto found = birat_equivalent(g, h);
    ASSERT_TRUE(found.has_value());
    EXPECT_TRUE(in_L(sg, found->first, found->second));
    auto bad = h;
    bad.a[1] = bad.a[1] + NF(Q(1, 100));
    EXPECT_FALSE(birat_equivalent(g, bad).has_value());
    auto other = g;
    other.a[0] = NF(2);
    EXPECT_EQ(code_of([&] { birat_equivalent(g, other); }), Errc::ParameterMismatch);
}
