#include <gtest/gtest.h>

#include <random>

#include "kato/devmap.hpp"

using namespace kato;

namespace {

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvalidInput;
}

BiratGerm<Cx> germ(const Mat2Z& m, long l, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    const auto sg = derive_signature(m, l);
    std::vector<Cx> a{Cx(1)};
    for (long i = 1; i < l; ++i) a.push_back(Cx(u(rng), u(rng)));
    return make_birat<Cx>(sg, a, Cx(u(rng), u(rng)));
}

} // namespace

TEST(Devmap, InverseBlowupExamples) {
    const Cx a(0.3, -0.7);
    const auto x = inverse_blowup({a + Cx(1), Cx(1)}, a, true);
    EXPECT_LT(std::abs(x[0] - Cx(1)), 1e-15);
    EXPECT_LT(std::abs(x[1] - Cx(1)), 1e-15);
    EXPECT_EQ(code_of([&] { inverse_blowup({a, Cx(1e-320)}, a, true); }), Errc::Indeterminate);
    EXPECT_EQ(code_of([&] { inverse_blowup({a, Cx(1)}, a, false); }), Errc::Indeterminate);
}

TEST(Devmap, BlowupRoundTrip) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int t = 0; t < 200; ++t) {
        const CPair p{Cx(u(rng), u(rng)), Cx(u(rng), u(rng))};
        const Cx a(u(rng), u(rng));
        for (bool generic : {true, false}) {
            const auto q = forward_blowup(inverse_blowup(p, a, generic), a, generic);
            EXPECT_LT(norm({q[0] - p[0], q[1] - p[1]}), 1e-12 * std::max(1.0, norm(p)));
            const auto r = inverse_blowup(forward_blowup(p, a, generic), a, generic);
            EXPECT_LT(norm({r[0] - p[0], r[1] - p[1]}), 1e-12 * std::max(1.0, norm(p)));
        }
    }
}

TEST(Devmap, DepthZeroIsChartEmbedding) {
    std::mt19937_64 rng(1);
    const auto g = germ({0, 1, 1, 2}, 2, rng);
    const CPair x{Cx(0.25, 0.5), Cx(-0.75, 0.1)};
    EXPECT_LT(proj_distance(dev_eval(g, {0, x}, 0), ProjPoint::affine(x)), 1e-15);
    // the curve v = 0 of chart 0 lands on the line with second affine coordinate 0
    const auto P = dev_eval(g, {0, {Cx(0.4, 0.2), Cx(0)}}, 0);
    EXPECT_LT(std::abs(P.z[1]), 1e-9);
}

TEST(Devmap, HomogeneousChainMatchesAffineInverses) {
    // oracle: the affine inverse maps applied chart by chart
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto g = germ({1, 1, 1, 2}, 2, rng);
    const auto ch = blowup_charts(g);
    const long n = static_cast<long>(ch.size());
    const long e = g.sig.l + g.sig.K + 1;
    int checked = 0;
    for (int t = 0; t < 50; ++t) {
        const long idx = -(n + static_cast<long>(rng() % static_cast<unsigned long>(n)));
        const CPair x{Cx(u(rng), u(rng)), Cx(u(rng), u(rng))};
        try {
            const long m = (-idx) / n, rem = (-idx) % n;
            CPair y = x;
            for (long i = n - rem; i < n; ++i) y = inverse_blowup(y, ch[static_cast<size_t>(i)].a, !ch[static_cast<size_t>(i)].primed);
            for (long s = 0; s < m; ++s) {
                y = {y[0] - g.effective_aK() * spow(y[1], e), y[1]};
                for (long i = 0; i < n; ++i) y = inverse_blowup(y, ch[static_cast<size_t>(i)].a, !ch[static_cast<size_t>(i)].primed);
            }
            if (norm(y) > 1e6) continue;
            EXPECT_LT(proj_distance(dev_eval(g, {idx, x}, 2), ProjPoint::affine(y)), 1e-9);
            ++checked;
        } catch (const Error&) {
        }
    }
    EXPECT_GT(checked, 20);
}

TEST(Devmap, Commutativity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& [m, l] : std::vector<std::pair<Mat2Z, long>>{{{0, 1, 1, 1}, 1}, {{0, 1, 1, 2}, 2}, {{1, 1, 1, 2}, 2}}) {
        const auto g = germ(m, l, rng);
        const long n = static_cast<long>(blowup_charts(g).size());
        int ok = 0;
        for (int t = 0; t < 400 && ok < 100; ++t) {
            const long idx = -(n + static_cast<long>(rng() % static_cast<unsigned long>(2 * n + 1)));
            try {
                EXPECT_LT(dev_commutativity_residual(g, {idx, {Cx(u(rng), u(rng)), Cx(u(rng), u(rng))}}, 3), 1e-8);
                ++ok;
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), Errc::Indeterminate);
            }
        }
        EXPECT_EQ(ok, 100);
    }
}

TEST(Devmap, ChartIndexBounds) {
    std::mt19937_64 rng(2);
    const auto g = germ({0, 1, 1, 1}, 1, rng);
    EXPECT_EQ(code_of([&] { dev_eval(g, {1, {Cx(1), Cx(1)}}, 1); }), Errc::InvalidInput);
    EXPECT_EQ(code_of([&] { dev_eval(g, {-5, {Cx(1), Cx(1)}}, 2); }), Errc::InvalidInput);
}

TEST(Devmap, OrbitExamples) {
    std::mt19937_64 rng(4);
    const auto g = make_birat<Cx>(derive_signature({0, 1, 1, 1}, 1), {Cx(1)});
    auto rep = orbit_contraction_report(g, {CPair{Cx(0), Cx(0)}}, 10);
    for (double x : rep.records[0].norms) EXPECT_EQ(x, 0.0);
    rep = orbit_contraction_report(g, {CPair{Cx(0.05), Cx(0.05)}}, 50);
    ASSERT_TRUE(rep.records[0].first_below.has_value());
    EXPECT_LE(*rep.records[0].first_below, 50);
}

TEST(Devmap, OrbitNormsEventuallyDecrease) {
    std::mt19937_64 rng(6);
    const auto g = make_birat<Cx>(derive_signature({0, 1, 1, 2}, 2), {Cx(1), Cx(0.3, 0.1)});
    const auto rep = orbit_contraction_report(g, ball_samples(rng, 100, 0.05), 50);
    EXPECT_TRUE(rep.all_converged());
    for (const auto& r : rep.records) {
        const int first = *r.first_below;
        for (int t = 1; t <= first; ++t) EXPECT_LT(r.norms[static_cast<size_t>(t)], r.norms[static_cast<size_t>(t - 1)]);
    }
}

TEST(Devmap, DistanceToOrigin) {
    EXPECT_EQ(distance_to_origin(ProjPoint::affine({Cx(0.3), Cx(0, -0.4)})), 0.4);
    EXPECT_TRUE(std::isinf(distance_to_origin(ProjPoint{{Cx(1), Cx(0), Cx(0)}})));
    const auto g = make_birat<Cx>(derive_signature({0, 1, 1, 1}, 1), {Cx(1)});
    const auto rep = orbit_contraction_report(g, {CPair{Cx(0.02), Cx(0, 0.03)}}, 5);
    EXPECT_NEAR(rep.records[0].dev_distance, 0.03, 1e-15);
}

TEST(Devmap, SpherePreimageSamples) {
    std::mt19937_64 rng(12);
    const auto g = germ({0, 1, 1, 2}, 2, rng);
    const auto got = sphere_preimage_samples(g, rng, 2, 0.5, 0.05, 30, 20000);
    EXPECT_EQ(got.size(), 30u);
    for (const auto& s : got) {
        EXPECT_LE(std::abs(s.distance - 0.5), 0.05);
        EXPECT_EQ(s.distance, distance_to_origin(dev_eval(g, s.pt, 2)));
    }
    // depth 0: Dev is the chart embedding, so the image distance is the coordinate norm
    for (const auto& s : sphere_preimage_samples(g, rng, 0, 0.5, 0.05, 20, 5000)) EXPECT_NEAR(s.distance, norm(s.pt.coords), 1e-15);
}
