#pragma once

// JSON schemas for scalars, signatures, germs and certificates.
// Exact scalars are strings ("a/b") or coefficient arrays in the field basis; complex scalars are [re, im].

#include <json.hpp>

#include <cstdio>
#include <string>

#include "kato/conjugator.hpp"

namespace kato {

using json = nlohmann::json;

inline json q_to_json(const Q& q) { return to_string(q); }

inline Q q_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Q(j.get<long>());
    throw Error(Errc::InvalidInput, "expected a rational string");
}

// context for reading exact scalars
struct ExactContext {
    FieldPtr field; // null: plain rationals
};

inline json to_json(const NF& x) {
    if (x.is_rational()) return q_to_json(x.rational());
    json a = json::array();
    for (const auto& c : x.coeffs()) a.push_back(to_string(c));
    return a;
}

inline json to_json(const Cx& x) { return json::array({x.real(), x.imag()}); }

inline NF nf_from_json(const json& j, const ExactContext& ctx) {
    if (j.is_array()) {
        if (!ctx.field) throw Error(Errc::InvalidField, "coefficient vector needs a minpoly");
        std::vector<Q> c;
        for (const auto& e : j) c.push_back(q_from_json(e));
        return NF(ctx.field, c);
    }
    const Q q = q_from_json(j);
    return ctx.field ? NF(ctx.field, {q}) : NF(q);
}

inline Cx cx_from_json(const json& j) {
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return {parse_rational(j.get<std::string>()).get_d(), 0.0};
    throw Error(Errc::InvalidInput, "expected a complex scalar");
}

template <class S>
S scalar_from_json(const json& j, const ExactContext& ctx) {
    if constexpr (std::is_same_v<S, NF>)
        return nf_from_json(j, ctx);
    else
        return cx_from_json(j);
}

inline json minpoly_json(const FieldPtr& f) {
    json a = json::array();
    if (f)
        for (const auto& c : f->modulus()) a.push_back(to_string(c));
    return a;
}

inline FieldPtr field_from_json(const json& j) {
    if (j.is_null() || (j.is_array() && j.empty())) return nullptr;
    std::vector<Q> c;
    for (const auto& e : j) c.push_back(q_from_json(e));
    return std::make_shared<const Field>(c);
}

inline json to_json(const BranchSignature& g) {
    return json{{"p", g.p},         {"q", g.q},   {"r", g.r}, {"s", g.s},         {"l", g.l},
                {"ks", g.ks},       {"delta", g.delta}, {"d", g.d}, {"n", g.n}, {"sigma", g.sigma},
                {"kS", g.kS},       {"K", g.K},   {"twisted", g.twisted}};
}

inline BranchSignature signature_from_json(const json& j) {
    if (!j.is_object() || !j.contains("l")) throw Error(Errc::InvalidInput, "signature needs l");
    const long l = j.at("l").get<long>();
    if (j.contains("p")) {
        std::vector<long> ks = j.value("ks", std::vector<long>{});
        return derive_signature({j.at("p").get<long>(), j.at("q").get<long>(), j.at("r").get<long>(), j.at("s").get<long>()}, l, ks);
    }
    if (j.contains("ks")) return signature_from_seq(j.at("ks").get<std::vector<long>>(), l);
    throw Error(Errc::InvalidInput, "signature needs (p,q,r,s) or ks");
}

template <class S>
json to_json(const BiratGerm<S>& g) {
    json a = json::array();
    for (const auto& x : g.a) a.push_back(to_json(x));
    return json{{"family", "birat"}, {"sig", to_json(g.sig)}, {"coeffs", {{"a", a}, {"aK", to_json(g.aK)}}}};
}

template <class S>
BiratGerm<S> birat_from_json(const json& j, const ExactContext& ctx) {
    if (j.value("family", "birat") != "birat") throw Error(Errc::InvalidInput, "expected a birat germ");
    const auto sig = signature_from_json(j.at("sig"));
    const auto& c = j.at("coeffs");
    std::vector<S> a;
    for (const auto& e : c.at("a")) a.push_back(scalar_from_json<S>(e, ctx));
    const S aK = c.contains("aK") ? scalar_from_json<S>(c.at("aK"), ctx) : S(0);
    return make_birat(sig, a, aK);
}

template <class S>
json to_json(const FavreGerm<S>& f) {
    json b = json::array();
    for (const auto& [i, v] : f.b) b.push_back(json::array({i, to_json(v)}));
    return json{{"family", "favre"},
                {"coeffs", {{"lambda", to_json(f.lambda)}, {"sigma", f.sigma}, {"k", f.k}, {"b", b}, {"c", to_json(f.c)}}}};
}

template <class S>
FavreGerm<S> favre_from_json(const json& j, const ExactContext& ctx) {
    if (j.value("family", "favre") != "favre") throw Error(Errc::InvalidInput, "expected a favre germ");
    const auto& c = j.at("coeffs");
    FavreGerm<S> f;
    f.lambda = scalar_from_json<S>(c.at("lambda"), ctx);
    f.sigma = c.at("sigma").get<long>();
    f.k = c.at("k").get<long>();
    if (f.k < 2 || f.sigma < 1) throw Error(Errc::InvalidInput, "need k >= 2 and sigma >= 1");
    for (const auto& e : c.at("b")) f.b[e.at(0).get<long>()] = scalar_from_json<S>(e.at(1), ctx);
    f.c = c.contains("c") ? scalar_from_json<S>(c.at("c"), ctx) : S(0);
    return f;
}

template <class S>
json series_to_json(const TruncSeries2<S>& f) {
    json a = json::array();
    for (const auto& [e, v] : f.terms()) a.push_back(json::array({e.first, e.second, to_json(v)}));
    return a;
}

template <class S>
TruncSeries2<S> series_from_json(const json& j, int order, const ExactContext& ctx) {
    TruncSeries2<S> f(order);
    for (const auto& e : j) f.add_to(e.at(0).get<int>(), e.at(1).get<int>(), scalar_from_json<S>(e.at(2), ctx));
    return f;
}

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class S>
std::string residual_max_string(const SeriesPair<S>& r) {
    if constexpr (scalar_traits<S>::exact) {
        if (r.first.is_zero() && r.second.is_zero()) return "0";
        Q m = 0;
        for (const auto* s : {&r.first, &r.second})
            for (const auto& [e, v] : s->terms())
                for (const auto& c : v.coeffs()) m = std::max(m, Q(abs(c)));
        return to_string(m);
    } else {
        return format_double(residual_magnitude(r));
    }
}

template <class S>
json to_json(const ConjugacyCertificate<S>& c) {
    json A = json::array();
    for (const auto& [e, v] : c.phi.A) A.push_back(json::array({e.first, e.second, to_json(v)}));
    json ext = json::array();
    for (const auto& e : c.extended_support) ext.push_back(json::array({e.first, e.second}));
    FieldPtr f;
    if constexpr (std::is_same_v<S, NF>) f = c.source.a0().field();
    return json{{"source", to_json(c.source)},
                {"target", to_json(c.target)},
                {"phi", {{"C", to_json(c.phi.C)}, {"A", A}, {"mu", series_to_json(c.phi.mu)}}},
                {"eps", to_json(c.eps)},
                {"vf", c.vf_case},
                {"residual_max", residual_max_string(c.residual)},
                {"order", c.order},
                {"extended_support", ext},
                {"mode", scalar_traits<S>::exact ? "exact" : "complex"},
                {"minpoly", minpoly_json(f)}};
}

template <class S>
ConjugacyCertificate<S> certificate_from_json(const json& j) {
    const std::string mode = j.value("mode", "exact");
    if ((mode == "exact") != scalar_traits<S>::exact) throw Error(Errc::ModeMismatch, "certificate mode differs");
    ExactContext ctx{field_from_json(j.value("minpoly", json::array()))};
    ConjugacyCertificate<S> c;
    c.order = j.at("order").get<int>();
    if (c.order < 0) throw Error(Errc::InvalidInput, "negative order");
    c.source = birat_from_json<S>(j.at("source"), ctx);
    c.target = favre_from_json<S>(j.at("target"), ctx);
    const auto& ph = j.at("phi");
    c.phi.C = scalar_from_json<S>(ph.at("C"), ctx);
    for (const auto& e : ph.at("A")) c.phi.A[{e.at(0).get<int>(), e.at(1).get<int>()}] = scalar_from_json<S>(e.at(2), ctx);
    c.phi.mu = series_from_json<S>(ph.at("mu"), c.order, ctx);
    if (j.contains("eps")) c.eps = scalar_from_json<S>(j.at("eps"), ctx);
    c.vf_case = j.value("vf", false);
    for (const auto& e : j.value("extended_support", json::array())) c.extended_support.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return c;
}

inline json error_json(const Error& e) { return json{{"error", errc_name(e.code())}, {"message", e.what()}}; }

} // namespace kato
