// JSON-in/JSON-out front end. Exit codes: 0 success, 1 invalid input, 2 failed check.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include "kato/curves.hpp"
#include "kato/devmap.hpp"
#include "kato/json_io.hpp"

using namespace kato;

namespace {

struct CheckFailed {
    json out;
};

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<long> parse_longs(const std::string& s) {
    std::vector<long> v;
    for (const auto& t : split(s)) {
        try {
            size_t pos = 0;
            v.push_back(std::stol(t, &pos));
            if (pos != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw Error(Errc::InvalidInput, "not an integer: " + t);
        }
    }
    return v;
}

// complex scalars on the command line: "re" or "re:im", each part rational or decimal
Cx parse_cx(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.empty() || parts.size() > 2) throw Error(Errc::InvalidInput, "bad complex scalar: " + s);
    return {parse_rational(parts[0]).get_d(), parts.size() == 2 ? parse_rational(parts[1]).get_d() : 0.0};
}

struct GermFlags {
    std::string sig, ks, a, aK = "0", a0, tau, minpoly, germ_file;
    long l = 1;
    int order = -1;
    std::string mode = "exact";
    long eps = 0;
    double tol = 1e-9;
    unsigned long long seed = 1;
};

void add_sig_flags(CLI::App* app, GermFlags& f) {
    app->add_option("--sig", f.sig, "p,q,r,s");
    app->add_option("--ks", f.ks, "Dloussky sequence k1,...,kN");
    app->add_option("--l", f.l, "number of generic blow-ups")->check(CLI::PositiveNumber);
}

void add_coeff_flags(CLI::App* app, GermFlags& f) {
    app->add_option("--a", f.a, "a1,...,a_{l-1}");
    app->add_option("--aK", f.aK, "coefficient a_{l+K}");
    app->add_option("--a0", f.a0, "a0");
    app->add_option("--tau", f.tau, "exact mode: a0 = tau^{r+s-1}");
    app->add_option("--minpoly", f.minpoly, "defining polynomial of tau, coefficients low to high");
    app->add_option("--mode", f.mode, "exact|complex")->check(CLI::IsMember({"exact", "complex"}));
    app->add_option("--order", f.order, "truncation order");
    app->add_option("--germ", f.germ_file, "germ JSON file");
}

BranchSignature read_signature(const GermFlags& f) {
    if (!f.sig.empty()) {
        const auto v = parse_longs(f.sig);
        if (v.size() != 4) throw Error(Errc::InvalidInput, "--sig needs four integers");
        return derive_signature({v[0], v[1], v[2], v[3]}, f.l, f.ks.empty() ? std::vector<long>{} : parse_longs(f.ks));
    }
    if (!f.ks.empty()) return signature_from_seq(parse_longs(f.ks), f.l);
    throw Error(Errc::InvalidInput, "need --sig or --ks");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidInput, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidInput, e.what());
    }
}

FieldPtr read_field(const GermFlags& f) {
    if (f.minpoly.empty()) return nullptr;
    std::vector<Q> c;
    for (const auto& t : split(f.minpoly)) c.push_back(parse_rational(t));
    return std::make_shared<const Field>(c);
}

// exact germ; returns tau too when a0 comes from it
BiratGerm<NF> exact_germ(const GermFlags& f, std::optional<NF>& tau) {
    const FieldPtr fld = read_field(f);
    if (!f.germ_file.empty()) {
        const json j = read_json_file(f.germ_file);
        const ExactContext ctx{j.contains("minpoly") ? field_from_json(j.at("minpoly")) : fld};
        return birat_from_json<NF>(j, ctx);
    }
    const auto sg = read_signature(f);
    auto lift = [&](const std::string& s) { return fld ? NF(fld, {parse_rational(s)}) : NF(parse_rational(s)); };
    NF a0;
    if (!f.tau.empty() || (fld && f.a0.empty())) {
        tau = f.tau.empty() || f.tau == "t" ? NF::gen(fld) : lift(f.tau);
        a0 = nf_pow(*tau, sg.kS - 1);
    } else if (!f.a0.empty()) {
        a0 = lift(f.a0);
    } else {
        throw Error(Errc::InvalidInput, "need --a0, --tau or --minpoly");
    }
    std::vector<NF> a{a0};
    for (const auto& t : split(f.a)) a.push_back(lift(t));
    while (static_cast<long>(a.size()) < sg.l) a.push_back(NF(0));
    return make_birat(sg, a, lift(f.aK));
}

BiratGerm<Cx> complex_germ(const GermFlags& f) {
    if (!f.germ_file.empty()) return birat_from_json<Cx>(read_json_file(f.germ_file), {});
    const auto sg = read_signature(f);
    if (f.a0.empty()) throw Error(Errc::InvalidInput, "complex mode needs --a0");
    std::vector<Cx> a{parse_cx(f.a0)};
    for (const auto& t : split(f.a)) a.push_back(parse_cx(t));
    while (static_cast<long>(a.size()) < sg.l) a.push_back(Cx(0));
    return make_birat<Cx>(sg, a, parse_cx(f.aK));
}

// ---- subcommands -----------------------------------------------------------

json cmd_analyze(const GermFlags& f) {
    const auto sg = read_signature(f);
    json out = to_json(sg);
    out["word"] = word_string(seq_to_word(sg.ks));
    out["kS_chain"] = k_invariant(sg.ks);
    out["kS_match"] = k_invariant(sg.ks) == sg.kS;
    out["selfintersections"] = branch_selfintersections(sg.ks);
    out["index"] = index_of(sg);
    const auto [u, v] = uv_exponents(sg);
    out["uv"] = json::array({to_string(u), to_string(v)});
    out["mu_bound"] = mu_bound(sg);
    json E = json::array();
    for (const auto& e : e_infty(sg).points) E.push_back(json::array({e.first, e.second}));
    out["E_infty"] = E;
    json R = json::array();
    for (const auto& r : resonances(sg, 3 * sg.sigma + sg.kS)) R.push_back(json::array({r.i, r.j, r.gamma}));
    out["resonances"] = R;
    return out;
}

template <class S>
json oracle_json(const BiratGerm<S>& g, int order) {
    if (order < 0) order = static_cast<int>(origin_degree(g.sig));
    const auto origin = birat_origin_form(g, order);
    const auto oracle = compose_blowups_oracle(g, order);
    const auto J = jacobian_det(g);
    bool match;
    if constexpr (scalar_traits<S>::exact) {
        match = origin == oracle;
    } else {
        match = residual_magnitude(SeriesPair<S>{origin.first - oracle.first, origin.second - oracle.second}) < 1e-9;
    }
    const bool jac = scalar_traits<S>::exact ? J == expected_jacobian<S>(g.sig, J.order()) : true;
    json out{{"germ", to_json(g)},
             {"order", order},
             {"origin_form", {series_to_json(origin.first), series_to_json(origin.second)}},
             {"oracle_match", match},
             {"jacobian_match", jac},
             {"word", word_string(matrix_to_word(g.sig.matrix()))}};
    if (!match || !jac) throw CheckFailed{out};
    return out;
}

json cmd_oracle(const GermFlags& f) {
    if (f.mode == "complex") return oracle_json(complex_germ(f), f.order);
    std::optional<NF> tau;
    return oracle_json(exact_germ(f, tau), f.order);
}

json cmd_normalize(const GermFlags& f) {
    json out;
    bool ok;
    if (f.mode == "complex") {
        const auto cert = normalize_complex(complex_germ(f), f.eps, f.order);
        ok = verify(cert, f.tol);
        out = to_json(cert);
    } else {
        std::optional<NF> tau;
        const auto g = exact_germ(f, tau);
        if (!tau) throw Error(Errc::InvalidInput, "exact normalize needs --tau or --minpoly (a0 = tau^{r+s-1})");
        const auto cert = normalize_exact(g, *tau, f.order);
        ok = verify(cert);
        out = to_json(cert);
    }
    if (!ok) throw CheckFailed{out};
    return out;
}

json cmd_verify(const std::string& file, double tol) {
    json j;
    try {
        if (file.empty() || file == "-") {
            const std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
            j = json::parse(text);
        } else {
            j = read_json_file(file);
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidInput, e.what());
    }
    bool ok;
    std::string res;
    try {
        if (j.value("mode", "exact") == "complex") {
            const auto c = certificate_from_json<Cx>(j);
            ok = verify(c, tol);
            res = residual_max_string(conjugacy_residual(c.source, c.target, c.phi, c.order));
        } else {
            const auto c = certificate_from_json<NF>(j);
            ok = verify(c);
            res = residual_max_string(conjugacy_residual(c.source, c.target, c.phi, c.order));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidInput, e.what());
    }
    json out{{"verified", ok}, {"residual_max", res}};
    if (!ok) throw CheckFailed{out};
    return out;
}

json cmd_equiv(const std::string& file, double tol) {
    const json j = read_json_file(file);
    const std::string kind = j.value("kind", "birat"), mode = j.value("mode", "exact");
    const ExactContext ctx{field_from_json(j.value("minpoly", json::array()))};
    json out{{"kind", kind}, {"mode", mode}};
    auto run = [&](auto tag) {
        using S = decltype(tag);
        if (kind == "birat") {
            const auto r = birat_equivalent(birat_from_json<S>(j.at("g1"), ctx), birat_from_json<S>(j.at("g2"), ctx), tol);
            out["equivalent"] = r.has_value();
            if (r) out["L"] = json::array({to_json(r->first), to_json(r->second)});
        } else if (kind == "favre") {
            const auto r = favre_equivalent(favre_from_json<S>(j.at("g1"), ctx), favre_from_json<S>(j.at("g2"), ctx), tol);
            out["equivalent"] = r.has_value();
            if (r) out["eps"] = to_json(*r);
        } else {
            throw Error(Errc::InvalidInput, "kind must be birat or favre");
        }
    };
    if (mode == "complex")
        run(Cx{});
    else
        run(NF{});
    return out;
}

template <class S>
json invariants_json(const BranchSignature& sg, const S& a0) {
    json out{{"sig", to_json(sg)}, {"index", index_of(sg)}, {"twisted", sg.twisted}};
    try {
        out["lambda"] = to_json(lambda_of(sg, a0));
    } catch (const Error& e) {
        out["lambda"] = nullptr;
        out["lambda_error"] = errc_name(e.code());
    }
    try {
        out["kappa"] = to_json(kappa_of(sg, a0));
    } catch (const Error& e) {
        out["kappa"] = nullptr;
        out["kappa_error"] = errc_name(e.code());
    }
    if (sg.twisted) {
        const S v = vf_condition(sg, a0);
        out["vf_condition"] = to_json(v);
        if constexpr (scalar_traits<S>::exact)
            out["vf"] = v.is_zero();
        else
            out["vf"] = std::abs(v) < 1e-9;
    } else {
        out["vf"] = false;
    }
    return out;
}

json cmd_invariants(const GermFlags& f) {
    const auto sg = read_signature(f);
    if (f.mode == "complex") {
        if (f.a0.empty()) throw Error(Errc::InvalidInput, "need --a0");
        return invariants_json(sg, parse_cx(f.a0));
    }
    std::optional<NF> tau;
    GermFlags g = f;
    g.a.clear();
    return invariants_json(sg, exact_germ(g, tau).a0());
}

json cmd_orbit(const GermFlags& f, int samples, int steps, double radius) {
    const auto g = complex_germ(f);
    std::mt19937_64 rng(f.seed);
    const auto rep = orbit_contraction_report(g, ball_samples(rng, samples, radius), steps);
    json recs = json::array();
    for (const auto& r : rep.records)
        recs.push_back({{"start", {to_json(r.start[0]), to_json(r.start[1])}},
                        {"dev_distance", r.dev_distance},
                        {"norms", r.norms},
                        {"first_below", r.first_below ? json(*r.first_below) : json(nullptr)},
                        {"overflow", r.overflow}});
    return json{{"records", recs}, {"all_converged", rep.all_converged()}};
}

json cmd_dev(const GermFlags& f, int samples, long depth) {
    const auto g = complex_germ(f);
    const long n = static_cast<long>(blowup_charts(g).size());
    std::mt19937_64 rng(f.seed);
    std::uniform_real_distribution<double> u(-1, 1);
    json pts = json::array();
    double worst = 0;
    int skipped = 0;
    for (int t = 0; t < 20 * samples && static_cast<int>(pts.size()) < samples; ++t) {
        const long idx = depth == 0 ? 0 : -static_cast<long>(rng() % static_cast<unsigned long>(depth * n + 1));
        const ChartPoint pt{idx, {Cx(u(rng), u(rng)), Cx(u(rng), u(rng))}};
        try {
            const auto P = dev_eval(g, pt, depth);
            json rec{{"chart", idx},
                     {"coords", {to_json(pt.coords[0]), to_json(pt.coords[1])}},
                     {"dev", {to_json(P.z[0]), to_json(P.z[1]), to_json(P.z[2])}}};
            if (idx <= -n) {
                const double r = dev_commutativity_residual(g, pt, depth);
                rec["residual"] = r;
                worst = std::max(worst, r);
            }
            pts.push_back(rec);
        } catch (const Error& e) {
            if (e.code() != Errc::Indeterminate) throw;
            ++skipped;
        }
    }
    json out{{"points", pts}, {"max_residual", worst}, {"skipped_indeterminate", skipped}, {"depth", depth}};
    if (worst >= 1e-8) throw CheckFailed{out};
    return out;
}

// sweep spec: {"seed":..,"cases":[{"ks":[..],"l":..} | {"sig":[p,q,r,s],"l":..}],
//              "ranges":{"N":..,"kmax":..,"lmax":..}, "normalize":bool, "tau":"1/2"}
std::vector<json> cmd_sweep(const std::string& file, unsigned long long seed, bool seed_given) {
    std::string text;
    {
        std::ifstream in(file);
        if (!in) throw Error(Errc::InvalidInput, "cannot open " + file);
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
    json spec;
    try {
        spec = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidInput, e.what());
    }
    if (!spec.is_object()) throw Error(Errc::InvalidInput, "sweep spec must be an object");
    if (!seed_given) seed = spec.value("seed", 1ULL);
    std::vector<BranchSignature> sigs;
    try {
        for (const auto& c : spec.value("cases", json::array())) {
            if (c.contains("sig")) {
                const auto v = c.at("sig").get<std::vector<long>>();
                if (v.size() != 4) throw Error(Errc::InvalidInput, "sig needs four integers");
                sigs.push_back(derive_signature({v[0], v[1], v[2], v[3]}, c.at("l").get<long>()));
            } else {
                sigs.push_back(signature_from_seq(c.at("ks").get<std::vector<long>>(), c.at("l").get<long>()));
            }
        }
        if (spec.contains("ranges")) {
            const auto& r = spec.at("ranges");
            const long N = r.at("N").get<long>(), kmax = r.at("kmax").get<long>(), lmax = r.at("lmax").get<long>();
            if (N < 1 || kmax < 1 || lmax < 1 || N > 6 || kmax > 8 || lmax > 8) throw Error(Errc::InvalidInput, "ranges out of bounds");
            std::vector<long> ks;
            std::function<void()> rec = [&]() {
                if (!ks.empty())
                    for (long l = 1; l <= lmax; ++l) sigs.push_back(signature_from_seq(ks, l));
                if (static_cast<long>(ks.size()) == N) return;
                for (long k = 1; k <= kmax; ++k) {
                    ks.push_back(k);
                    rec();
                    ks.pop_back();
                }
            };
            rec();
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidInput, e.what());
    }
    const bool do_norm = spec.value("normalize", false);
    const Q tau = parse_rational(spec.value("tau", std::string("1/2")));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-5, 5), den(1, 4);
    std::vector<json> out;
    for (const auto& sg : sigs) {
        std::vector<NF> a{NF(qpow(tau, sg.kS - 1))};
        for (long i = 1; i < sg.l; ++i) a.push_back(NF(qq(num(rng), den(rng))));
        const auto g = make_birat(sg, a, NF(qq(num(rng), den(rng))));
        json rec{{"ks", sg.ks}, {"l", sg.l}, {"sig", {sg.p, sg.q, sg.r, sg.s}}, {"kS", sg.kS},
                 {"kS_chain", k_invariant(sg.ks)}, {"kS_match", k_invariant(sg.ks) == sg.kS},
                 {"sigma", sg.sigma}, {"twisted", sg.twisted}, {"index", index_of(sg)}};
        const int ord = static_cast<int>(std::min<long>(origin_degree(sg), 20));
        rec["oracle_match"] = birat_origin_form(g, ord) == compose_blowups_oracle(g, ord);
        rec["a"] = to_json(g).at("coeffs");
        if (do_norm) {
            try {
                const auto cert = normalize_exact(g, NF(tau));
                rec["certificate"] = {{"verified", verify(cert)},
                                      {"order", cert.order},
                                      {"extended_support_size", cert.extended_support.size()},
                                      {"lambda", to_json(cert.target.lambda)}};
            } catch (const Error& e) {
                rec["certificate"] = {{"error", errc_name(e.code())}};
            }
        }
        out.push_back(rec);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Germ normal forms, certificates and developing maps"};
    app.require_subcommand(1);
    GermFlags f;
    std::string file;
    int samples = 100, steps = 50;
    long depth = 3;
    double radius = 0.05;

    auto* analyze = app.add_subcommand("analyze", "signature invariants");
    add_sig_flags(analyze, f);

    auto* oracle = app.add_subcommand("oracle", "origin form against the blow-up composition");
    add_sig_flags(oracle, f);
    add_coeff_flags(oracle, f);

    auto* normalize = app.add_subcommand("normalize", "conjugate to the polynomial normal form");
    add_sig_flags(normalize, f);
    add_coeff_flags(normalize, f);
    normalize->add_option("--eps", f.eps, "complex mode: branch index of eps");
    normalize->add_option("--tol", f.tol, "complex tolerance");

    auto* verify_cmd = app.add_subcommand("verify", "check a certificate read from stdin or --file");
    verify_cmd->add_option("--file", file, "certificate JSON ('-' for stdin)");
    verify_cmd->add_option("--tol", f.tol, "complex tolerance");

    auto* equiv = app.add_subcommand("equiv", "equivalence of two germs");
    equiv->add_option("--file", file, "JSON with kind, mode, minpoly, g1, g2")->required();
    equiv->add_option("--tol", f.tol, "complex tolerance");

    auto* inv = app.add_subcommand("invariants", "lambda, kappa, index and the vector-field condition");
    add_sig_flags(inv, f);
    add_coeff_flags(inv, f);

    auto* orbit = app.add_subcommand("orbit", "forward orbits from a small ball");
    add_sig_flags(orbit, f);
    add_coeff_flags(orbit, f);
    orbit->add_option("--samples", samples)->check(CLI::NonNegativeNumber);
    orbit->add_option("--steps", steps)->check(CLI::NonNegativeNumber);
    orbit->add_option("--radius", radius)->check(CLI::PositiveNumber);
    orbit->add_option("--seed", f.seed);

    auto* dev = app.add_subcommand("dev", "developing map samples and commutativity residuals");
    add_sig_flags(dev, f);
    add_coeff_flags(dev, f);
    dev->add_option("--samples", samples)->check(CLI::NonNegativeNumber);
    dev->add_option("--depth", depth)->check(CLI::NonNegativeNumber);
    dev->add_option("--seed", f.seed);

    auto* sweep = app.add_subcommand("sweep", "batch records, one JSON line per case");
    sweep->add_option("--spec", file, "sweep spec JSON")->required();
    auto* seed_opt = sweep->add_option("--seed", f.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << json{{"error", "InvalidInput"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }

    try {
        json out;
        if (*analyze) {
            out = cmd_analyze(f);
        } else if (*oracle) {
            out = cmd_oracle(f);
        } else if (*normalize) {
            out = cmd_normalize(f);
        } else if (*verify_cmd) {
            out = cmd_verify(file, f.tol);
        } else if (*equiv) {
            out = cmd_equiv(file, f.tol);
        } else if (*inv) {
            out = cmd_invariants(f);
        } else if (*orbit) {
            f.mode = "complex";
            out = cmd_orbit(f, samples, steps, radius);
        } else if (*dev) {
            f.mode = "complex";
            out = cmd_dev(f, samples, depth);
        } else if (*sweep) {
            for (const auto& rec : cmd_sweep(file, f.seed, seed_opt->count() > 0)) std::cout << rec.dump() << "\n";
            return 0;
        }
        std::cout << out.dump() << "\n";
        return 0;
    } catch (const CheckFailed& c) {
        std::cout << c.out.dump() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cout << error_json(e).dump() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cout << json{{"error", "InvalidInput"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}
