#include <gtest/gtest.h>

#include "kato/json_io.hpp"

using namespace kato;

TEST(JsonIo, Scalars) {
    EXPECT_EQ(to_json(NF(Q(-3, 4))), json("-3/4"));
    EXPECT_EQ(nf_from_json(json("6/8"), {}), NF(Q(3, 4)));
    EXPECT_EQ(nf_from_json(json("0.25"), {}), NF(Q(1, 4)));
    auto f = std::make_shared<const Field>(std::vector<Q>{Q(-2), Q(0), Q(1)});
    const NF x = NF(f, {Q(1), Q(-1, 2)});
    EXPECT_EQ(to_json(x), json::array({"1", "-1/2"}));
    EXPECT_EQ(nf_from_json(to_json(x), {f}), x);
    EXPECT_THROW(nf_from_json(to_json(x), {}), Error);
    EXPECT_EQ(cx_from_json(to_json(Cx(0.5, -2))), Cx(0.5, -2));
    EXPECT_EQ(field_from_json(minpoly_json(f))->modulus(), f->modulus());
}

TEST(JsonIo, Signature) {
    const auto g = signature_from_json(json{{"p", 1}, {"q", 1}, {"r", 1}, {"s", 2}, {"l", 2}});
    EXPECT_EQ(g.sigma, 3);
    const auto h = signature_from_json(to_json(g));
    EXPECT_EQ(h.matrix(), g.matrix());
    EXPECT_EQ(h.ks, g.ks);
    EXPECT_EQ(signature_from_json(json{{"ks", {2, 3}}, {"l", 2}}).kS, 9);
    EXPECT_THROW(signature_from_json(json{{"p", 1}}), Error);
}

TEST(JsonIo, GermsRoundTrip) {
    const auto sg = derive_signature({0, 1, 1, 2}, 2);
    const auto g = make_birat<NF>(sg, {NF(Q(1, 4)), NF(Q(-2, 3))}, NF(Q(5)));
    const auto h = birat_from_json<NF>(to_json(g), {});
    EXPECT_EQ(h.a, g.a);
    EXPECT_EQ(h.aK, g.aK);
    FavreGerm<Cx> f;
    f.k = 3;
    f.sigma = 2;
    f.lambda = Cx(0.1, 0.2);
    f.b = {{1, Cx(1)}, {2, Cx(-0.5)}};
    f.c = Cx(3);
    const auto f2 = favre_from_json<Cx>(to_json(f), {});
    EXPECT_EQ(f2.lambda, f.lambda);
    EXPECT_EQ(f2.b, f.b);
    EXPECT_EQ(f2.c, f.c);
}

TEST(JsonIo, CertificateRoundTripVerifies) {
    auto fld = std::make_shared<const Field>(std::vector<Q>{Q(-1), Q(0), Q(3)});
    const NF t = NF::gen(fld);
    const auto sg = derive_signature({1, 1, 1, 2}, 1);
    const auto cert = normalize_exact(make_birat(sg, {t * t}, NF(fld, {Q(2)})), t);
    const json j = to_json(cert);
    EXPECT_EQ(j.at("residual_max"), "0");
    EXPECT_EQ(j.at("mode"), "exact");
    const auto back = certificate_from_json<NF>(json::parse(j.dump()));
    EXPECT_TRUE(verify(back));
    EXPECT_EQ(to_json(back).dump(), j.dump());
    EXPECT_THROW(certificate_from_json<Cx>(j), Error);
}

TEST(JsonIo, ComplexCertificateRoundTrip) {
    const auto sg = derive_signature({0, 1, 1, 2}, 2);
    const auto cert = normalize_complex(make_birat<Cx>(sg, {Cx(0.5, 0.1), Cx(0.2, -0.3)}), 1);
    const auto back = certificate_from_json<Cx>(json::parse(to_json(cert).dump()));
    EXPECT_TRUE(verify(back, 1e-9));
}
