// fgl: command-line front end for formal group laws, Lubin-Tate actions,
// ring recovery, and universal presentations.
//
// Exit status: 0 success, 1 verification failure, 2 invalid input.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <fstream>
#include <iostream>
#include <sstream>

#include "fgl/json.hpp"

using namespace fgl;
using fgl::json::Json;

namespace
{

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;

bool g_json = false;

struct RingOpts {
    std::string ring;
    std::uint64_t p = 0;
    int precision = 0;
    std::string eisenstein;

    void add(CLI::App *app, const std::string &default_ring)
    {
        app->add_option("--ring", ring, "ring descriptor: Q, Z, Z_p/p^k, or Z_p[pi]/(E), m^k")->default_str(default_ring);
        app->add_option("--p", p, "prime p (p-adic integers or Eisenstein extension)");
        app->add_option("--precision", precision, "absolute precision k");
        app->add_option("--eisenstein", eisenstein, "Eisenstein polynomial in t, e.g. \"t^2-5\"");
        fallback = default_ring;
    }

    Ring build(int default_precision) const
    {
        if (!ring.empty()) {
            return json::parse_ring_descriptor(ring);
        }
        if (p == 0) {
            if (!eisenstein.empty() || precision != 0) {
                throw InvalidInput("--eisenstein and --precision need --p");
            }
            return json::parse_ring_descriptor(fallback);
        }
        const int k = precision > 0 ? precision : default_precision;
        if (!eisenstein.empty()) {
            return make_eisenstein(p, k, parse_integer_polynomial(eisenstein));
        }
        return make_padic(p, k);
    }

    std::string fallback;
};

std::optional<RingElement> pi_of(const Ring &r)
{
    if (r->is_padic()) {
        return uniformizer(r);
    }
    return std::nullopt;
}

TruncatedSeries parse_in(const Ring &r, std::vector<std::string> vars, int N, const std::string &text)
{
    return parse_series(ParseContext{r, std::move(vars), N, pi_of(r), {}}, text);
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

std::pair<std::string, std::string> split_assignment(const std::string &s)
{
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw InvalidInput("expected name=value, got '" + s + "'");
    }
    return {s.substr(0, eq), s.substr(eq + 1)};
}

Json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot read " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception &e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

void print(const Json &j, const std::string &text)
{
    if (g_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

std::string axiom_lines(const AxiomReport &r)
{
    std::string out;
    for (const auto &c : r.checks) {
        out += "  " + c.axiom + ": " + (c.passed ? "pass" : "FAIL at " + c.failure_monomial()) + "\n";
    }
    return out;
}

std::string violation_lines(const ActionReport &r)
{
    std::string out = "action: " + std::string(r.passed() ? "pass" : "FAIL") + " (" + std::to_string(r.checks) + " checks)\n";
    for (const auto &v : r.violations) {
        out += "  " + v.identity + " " + v.elements + " at " + v.monomial + "\n";
    }
    return out;
}

// --- monoid options --------------------------------------------------------------

struct MonoidOpts {
    std::string file;
    std::string free;
    bool trivial = false;

    void add(CLI::App *app)
    {
        app->add_option("--monoid", file, "monoid descriptor JSON file");
        app->add_option("--free", free, "free commutative monoid on comma-separated generators");
        app->add_flag("--trivial", trivial, "trivial monoid {1}");
    }

    Monoid build() const
    {
        const int given = !file.empty() + !free.empty() + trivial;
        if (given != 1) {
            throw InvalidInput("give exactly one of --monoid, --free, --trivial");
        }
        if (!file.empty()) {
            return json::decode_monoid(read_json_file(file));
        }
        if (!free.empty()) {
            return free_monoid(split_list(free));
        }
        return finite_monoid({"1"}, {0}, {});
    }
};

// --- lubin-tate -------------------------------------------------------------------

struct LubinTateOpts {
    RingOpts ring;
    int degree = 8;
    std::string series;
    std::string preset = "standard";
    std::string endo = "2,pi";
};

LubinTateDatum make_datum(const Ring &out, int N, const std::string &series, const std::string &preset)
{
    if (!series.empty()) {
        return lubin_tate_datum(out, N, series);
    }
    if (preset == "standard") {
        return standard_preset(out, N);
    }
    if (preset == "multiplicative") {
        return multiplicative_preset(out, N);
    }
    throw InvalidInput("unknown preset '" + preset + "' (standard or multiplicative)");
}

int run_lubin_tate(const LubinTateOpts &o)
{
    if (o.ring.p == 0 && o.ring.ring.empty()) {
        throw InvalidInput("lubin-tate needs --p (or --ring)");
    }
    const Ring out = o.ring.build(8);
    const LubinTateDatum d = make_datum(out, o.degree, o.series, o.preset);
    const LubinTateLaw L = build_fgl(d);
    std::vector<RingElement> elems;
    for (const auto &s : split_list(o.endo)) {
        elems.push_back(parse_element(out, s, pi_of(out)));
    }
    const MonoidAction A = build_action(d, L.law, elems);
    const ActionReport rep = verify_action(A);
    const bool ok = L.law.axioms().passed() && !L.defining_identity_defect && rep.passed();

    Json j;
    j["ring"] = out->descriptor();
    j["f"] = json::encode(d.to_output(d.f));
    j["working_ring"] = d.ring->descriptor();
    j["law"] = json::encode(L.law);
    j["defining_identity"] = L.defining_identity_defect ? Json(monomial_string(detail::xy(), *L.defining_identity_defect)) : Json("pass");
    j["action"] = json::encode(A);
    j["action_report"] = json::encode(rep);
    j["passed"] = ok;

    std::string t = "ring: " + out->descriptor() + "\nf(T) = " + d.to_output(d.f).to_string() + "\nF(x,y) = " + L.law.series().to_string() +
                    "\naxioms:\n" + axiom_lines(L.law.axioms()) + "defining identity f(F) = F(f,f): " +
                    (L.defining_identity_defect ? "FAIL at " + monomial_string(detail::xy(), *L.defining_identity_defect) : "pass") + "\n";
    for (const auto &e : A.entries) {
        t += "[" + e.label + "](x) = " + e.series.to_string() + "\n";
    }
    t += violation_lines(rep);
    print(j, t);
    return ok ? kOk : kFailed;
}

// --- from-log / log / check -----------------------------------------------------------

struct FromLogOpts {
    RingOpts ring;
    std::string series;
    int degree = 4;
    std::string scalars;
};

int run_from_log(const FromLogOpts &o)
{
    const Ring r = o.ring.build(8);
    const TruncatedSeries f = parse_in(r, {"T"}, o.degree, o.series);
    const LogarithmConstruction c = from_logarithm(f);
    MonoidAction A;
    A.law = c.law;
    for (const auto &s : split_list(o.scalars)) {
        const RingElement m = parse_element(r, s, pi_of(r));
        A.entries.push_back({m.to_string(), action_endomorphism_from_logarithm(f, c.exponential, m), std::nullopt, m, std::nullopt});
    }
    const ActionReport rep = verify_action(A);
    const bool ok = c.law.axioms().passed() && rep.passed();

    Json j;
    j["ring"] = r->descriptor();
    j["logarithm"] = json::encode(f);
    j["exponential"] = json::encode(c.exponential);
    j["law"] = json::encode(c.law);
    j["action"] = json::encode(A);
    j["action_report"] = json::encode(rep);
    j["passed"] = ok;
    std::string t = "F(x,y) = " + c.law.series().to_string() + "\ng(T) = " + c.exponential.to_string() + "\naxioms:\n" +
                    axiom_lines(c.law.axioms());
    for (const auto &e : A.entries) {
        t += "[" + e.label + "](x) = " + e.series.to_string() + "\n";
    }
    if (!A.entries.empty()) {
        t += violation_lines(rep);
    }
    print(j, t);
    return ok ? kOk : kFailed;
}

struct LogOpts {
    RingOpts ring;
    std::string law;
    int degree = 4;
};

int run_log(const LogOpts &o)
{
    const Ring r = o.ring.build(8);
    const FormalGroupLaw F(parse_in(r, {"x", "y"}, o.degree, o.law));
    Json j;
    j["ring"] = r->descriptor();
    j["law"] = json::encode(F);
    if (!F.axioms().passed()) {
        j["passed"] = false;
        print(j, "not a formal group law:\n" + axiom_lines(F.axioms()));
        return kFailed;
    }
    const TruncatedSeries l = logarithm(F);
    j["logarithm"] = json::encode(l);
    j["passed"] = true;
    print(j, "log(T) = " + l.to_string() + "\n");
    return kOk;
}

struct CheckOpts {
    RingOpts ring;
    std::string law;
    std::string bundle;
    std::vector<std::string> endo;
    int degree = 4;
};

int run_check(const CheckOpts &o)
{
    MonoidAction A;
    if (!o.bundle.empty()) {
        if (!o.law.empty()) {
            throw InvalidInput("give either --law or --bundle");
        }
        A = json::decode_action(read_json_file(o.bundle));
    } else {
        if (o.law.empty()) {
            throw InvalidInput("check needs --law or --bundle");
        }
        const Ring r = o.ring.build(8);
        A.law = FormalGroupLaw(parse_in(r, {"x", "y"}, o.degree, o.law));
    }
    const Ring &r = A.law.ring();
    for (const auto &e : o.endo) {
        const auto [label, text] = split_assignment(e);
        const RingElement m = parse_element(r, label, pi_of(r));
        A.entries.push_back({label, parse_in(r, {"x"}, A.law.degree(), text), std::nullopt, m, std::nullopt});
    }
    const ActionReport rep = verify_action(A);
    const bool ok = A.law.axioms().passed() && rep.passed();
    Json j;
    j["ring"] = r->descriptor();
    j["N"] = A.law.degree();
    j["axioms"] = json::encode(A.law.axioms());
    j["action_report"] = json::encode(rep);
    j["passed"] = ok;
    std::string t = "F(x,y) = " + A.law.series().to_string() + "\naxioms:\n" + axiom_lines(A.law.axioms());
    if (!A.entries.empty()) {
        t += violation_lines(rep);
    }
    t += ok ? "result: pass\n" : "result: FAIL\n";
    print(j, t);
    return ok ? kOk : kFailed;
}

// --- recover-add / demo-variation ----------------------------------------------------------

struct RecoverOpts {
    std::uint64_t p = 0;
    std::string eisenstein;
    int precision = 0;
    int n = 1;
    int V = 2;
    int degree = 6;
    std::string preset = "standard";
    std::string series;
    std::string a, b;
    bool table = false;
};

int run_recover_add(const RecoverOpts &o)
{
    if (o.p == 0) {
        throw InvalidInput("recover-add needs --p");
    }
    const int k = o.precision > 0 ? o.precision : o.n + o.V - 1;
    const Ring r = o.eisenstein.empty() ? make_padic(o.p, k) : make_eisenstein(o.p, k, parse_integer_polynomial(o.eisenstein));
    const Monoid M = padic_truncation_of(r, o.n, o.V);
    const LubinTateDatum d = make_datum(r, o.degree, o.series, o.preset);
    const LubinTateLaw L = build_fgl(d);
    const MonoidAction A = build_action(d, L.law, M);
    const bool single = !o.a.empty() || !o.b.empty();
    if (single && (o.a.empty() || o.b.empty())) {
        throw InvalidInput("a single sum needs both --a and --b");
    }
    const AdditionTable T = build_addition_table(d, A, AdditionTableOptions{!single});
    const RecoveredRing &R = T.ring;

    Json j;
    j["ring"] = r->descriptor();
    j["law"] = L.law.series().to_string();
    if (single) {
        auto index_of = [&](const std::string &s) {
            const RingElement x = parse_element(r, s, pi_of(r));
            if (x.is_zero()) {
                return R.zero();
            }
            const auto m = M->classify(x);
            if (!m) {
                throw InvalidInput(s + " cannot be classified in " + json::monoid_descriptor(M));
            }
            return m->index;
        };
        const std::size_t ia = index_of(o.a), ib = index_of(o.b);
        const std::size_t s = R.sum(ia, ib);
        const std::uint8_t f = R.flag(ia, ib);
        j["a"] = R.label(ia);
        j["b"] = R.label(ib);
        j["sum"] = R.label(s);
        j["flags"] = json::flag_names(f);
        j["passed"] = T.passed();
        std::string t = R.label(ia) + " + " + R.label(ib) + " = " + R.label(s);
        if (f != flag_none) {
            t += "  (flagged:";
            for (const auto &n : json::flag_names(f)) {
                t += " " + n.get<std::string>();
            }
            t += ")";
        }
        print(j, t + "\n");
        return T.passed() ? kOk : kFailed;
    }
    j["addition"] = json::encode(T, o.table);
    std::string t = "carrier: " + json::monoid_descriptor(M) + " plus 0 (" + std::to_string(R.size()) + " elements)\n" +
                    "flagged entries: " + std::to_string(R.flagged_count()) + "\n" +
                    "native mismatches: " + std::to_string(T.native_mismatches) + "\n" +
                    "confirmation failures: " + std::to_string(T.confirmation_failures) + "\n";
    if (T.axioms) {
        t += "ring axioms on unflagged entries: " + std::string(T.axioms->passed() ? "pass" : "FAIL " + T.axioms->first_failure) + "\n";
    }
    if (o.table) {
        for (std::size_t a = 0; a < R.size(); ++a) {
            t += R.label(a) + ":";
            for (std::size_t b = 0; b < R.size(); ++b) {
                t += " " + R.label(R.sum(a, b)) + (R.well_defined(a, b) ? "" : "*");
            }
            t += "\n";
        }
    }
    t += T.passed() ? "result: pass\n" : "result: FAIL " + T.first_problem + "\n";
    print(j, t);
    return T.passed() ? kOk : kFailed;
}

struct VariationCliOpts {
    std::uint64_t p = 5;
    std::string e1 = "t^2-5";
    std::string e2 = "t^2-10";
    int n = 2;
    int V = 2;
    int degree = 5;
    std::size_t twists = 4;
    std::size_t examples = 10;
};

int run_demo_variation(const VariationCliOpts &o)
{
    const VariationReport rep = variation_demo(o.p, parse_integer_polynomial(o.e1), parse_integer_polynomial(o.e2), o.n, o.V,
                                               VariationOptions{o.degree, o.twists, o.examples});
    Json j = json::encode(rep);
    std::string t = "K1: " + rep.ring1 + "\nK2: " + rep.ring2 + "\ncarrier: " + std::to_string(rep.carrier_size) +
                    " elements, unit group";
    for (const auto f : rep.invariant_factors) {
        t += " Z/" + std::to_string(f);
    }
    t += "\n";
    for (const auto &r : rep.results) {
        std::string tw;
        for (const auto x : r.twist) {
            tw += (tw.empty() ? "" : ",") + std::to_string(x);
        }
        t += "isomorphism twist (" + tw + "): multiplication " + (r.multiplication_identical ? "identical" : "DIFFERENT") +
             ", addition differs on " + std::to_string(r.differing) + " of " + std::to_string(r.compared) + " pairs\n";
        for (const auto &e : r.examples) {
            t += "  " + e.a + " + " + e.b + ": native " + e.native + ", transported " + e.transported + "\n";
        }
    }
    print(j, t);
    return rep.native1_problems + rep.native2_problems == 0 ? kOk : kFailed;
}

// --- universal / specialize / classify ---------------------------------------------------------

struct UniversalOpts {
    MonoidOpts monoid;
    int degree = 4;
    std::string out;
    bool text = false;
};

int run_universal(const UniversalOpts &o)
{
    const Monoid M = o.monoid.build();
    const Presentation P = generate_presentation(M, o.degree);
    const Json j = json::encode(*P);
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) {
            throw InvalidInput("cannot write " + o.out);
        }
        f << j.dump(2) << "\n";
    }
    if (o.text) {
        std::cout << P->ideal_text() << "\n";
        return kOk;
    }
    std::string t = "monoid: " + json::monoid_descriptor(M) + "\nN = " + std::to_string(P->N) + "\nvariables (" +
                    std::to_string(P->variable_count()) + "):";
    for (const auto &v : P->ring->variables()) {
        t += " " + v;
    }
    t += "\nrelations (" + std::to_string(P->base_relations.size() + P->ideal.size()) + "):\n";
    for (const auto &r : P->all_relations()) {
        t += "  " + r.label + ": " + P->relation_text(r) + "\n";
    }
    print(j, t);
    return kOk;
}

struct SpecializeOpts {
    MonoidOpts monoid;
    RingOpts ring;
    int degree = 4;
    std::vector<std::string> image;
    std::string images_file;
};

int run_specialize(const SpecializeOpts &o)
{
    const Monoid M = o.monoid.build();
    const Presentation P = generate_presentation(M, o.degree);
    const Ring r = o.ring.build(8);
    std::map<std::string, RingElement> images;
    if (!o.images_file.empty()) {
        const Json doc = read_json_file(o.images_file);
        for (const auto &[name, v] : doc.items()) {
            images.insert_or_assign(name, json::decode_element(v, r));
        }
    }
    for (const auto &s : o.image) {
        const auto [name, text] = split_assignment(s);
        images.insert_or_assign(name, parse_element(r, text, pi_of(r)));
    }
    const SpecializationHom h = make_specialization(P, r, images);
    const IdealCheck check = check_ideal(h);
    Json j;
    j["hom"] = json::encode(h);
    j["ideal"] = json::encode(check);
    if (!check.passed()) {
        j["passed"] = false;
        std::string t = "ideal not killed:\n";
        for (const auto &f : check.failures) {
            t += "  " + f.label + " -> " + f.value + "\n";
        }
        print(j, t);
        return kFailed;
    }
    const Specialized s = specialize(h);
    const ActionReport rep = verify_action(s.action);
    j["action"] = json::encode(s.action);
    j["action_report"] = json::encode(rep);
    j["passed"] = rep.passed();
    std::string t = "all " + std::to_string(check.checked) + " relations vanish\nF(x,y) = " + s.action.law.series().to_string() + "\n";
    for (const auto &e : s.action.entries) {
        t += "[" + e.label + "](x) = " + e.series.to_string() + "\n";
    }
    t += violation_lines(rep);
    print(j, t);
    return rep.passed() ? kOk : kFailed;
}

struct ClassifyOpts {
    MonoidOpts monoid;
    RingOpts ring;
    int degree = 4;
    std::string preset = "standard";
    std::string series;
    std::vector<std::string> generator;
    std::string law;
    std::vector<std::string> endo;
};

int run_classify(const ClassifyOpts &o)
{
    const Monoid M = o.monoid.build();
    const Presentation P = generate_presentation(M, o.degree);
    MonoidAction A;
    if (!o.law.empty()) {
        const Ring r = o.ring.build(8);
        A.law = FormalGroupLaw(parse_in(r, {"x", "y"}, o.degree, o.law));
        A.monoid = M;
        for (const auto &e : o.endo) {
            const auto [name, text] = split_assignment(e);
            const MonoidElement g = M->generator(name);
            const TruncatedSeries s = parse_in(r, {"x"}, o.degree, text);
            A.entries.push_back({name, s, g, RingElement(r, linear_coefficient(s)), std::nullopt});
        }
    } else if (M->kind() == MonoidKind::padic_truncation) {
        const LubinTateDatum d = make_datum(M->lift_ring(), o.degree, o.series, o.preset);
        A = build_action(d, build_fgl(d).law, M);
    } else {
        if (M->kind() != MonoidKind::free_commutative) {
            throw InvalidInput("Lubin-Tate classification needs a free or p-adic truncation monoid");
        }
        if (o.ring.p == 0 && o.ring.ring.empty()) {
            throw InvalidInput("classify needs --law or Lubin-Tate data (--p)");
        }
        const Ring r = o.ring.build(8);
        const LubinTateDatum d = make_datum(r, o.degree, o.series, o.preset);
        std::map<std::string, std::string> gi;
        for (const auto &g : o.generator) {
            gi.insert(split_assignment(g));
        }
        std::vector<RingElement> imgs;
        for (const auto &name : M->generator_names()) {
            const auto it = gi.find(name);
            if (it == gi.end()) {
                throw InvalidInput("no --generator image for " + name);
            }
            imgs.push_back(parse_element(r, it->second, pi_of(r)));
        }
        A = build_free_action(d, build_fgl(d).law, M, imgs);
    }
    const Classification cls = classify_fgl(P, A);
    Json j;
    j["hom"] = json::encode(cls.hom);
    j["ideal"] = json::encode(cls.ideal);
    bool round_trip = false;
    std::string t;
    if (cls.ideal.passed()) {
        const Specialized s = specialize(cls.hom);
        round_trip = s.action.law.series() == A.law.series().truncated(P->N);
        for (std::size_t a = 0; a < P->acting.size(); ++a) {
            round_trip = round_trip && s.action.endomorphism(P->acting[a]) == A.endomorphism(P->acting[a]).truncated(P->N);
        }
        const LogScan scan = scan_logarithm(s.action.law);
        j["log_scan"] = json::encode(scan);
        t += "log scan: " + outcome_name(scan.outcome) + ", " + scan.reason + "\n";
    }
    j["round_trip"] = round_trip;
    const bool ok = cls.ideal.passed() && round_trip;
    j["passed"] = ok;
    std::string head = "images:\n";
    const auto &vars = P->ring->variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
        head += "  " + vars[i] + " -> " + cls.hom.images[i].to_string() + "\n";
    }
    head += "ideal: " + std::string(cls.ideal.passed() ? "killed" : "NOT killed") + " (" + std::to_string(cls.ideal.checked) + " relations)\n";
    for (const auto &f : cls.ideal.failures) {
        head += "  " + f.label + " -> " + f.value + "\n";
    }
    head += "round trip: " + std::string(round_trip ? "exact" : "FAIL") + "\n";
    print(j, head + t);
    return ok ? kOk : kFailed;
}

void report_error(const std::string &kind, const std::string &message)
{
    if (g_json) {
        std::cerr << Json{{"error", kind}, {"message", message}}.dump() << "\n";
    } else {
        std::cerr << "error: " << message << "\n";
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Formal group laws, Lubin-Tate actions, ring recovery and universal presentations"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "JSON output");
    app.fallthrough();

    LubinTateOpts lt;
    auto *c_lt = app.add_subcommand("lubin-tate", "build a Lubin-Tate law and endomorphisms");
    lt.ring.add(c_lt, "Q");
    c_lt->add_option("--degree", lt.degree, "truncation degree N")->capture_default_str();
    c_lt->add_option("--series", lt.series, "Lubin-Tate series in T, e.g. \"pi*T+T^5\"");
    c_lt->add_option("--preset", lt.preset, "standard (pi*T+T^q) or multiplicative ((1+T)^p-1)")->capture_default_str();
    c_lt->add_option("--endo", lt.endo, "comma-separated elements a for [a](x)")->capture_default_str();

    FromLogOpts fl;
    auto *c_fl = app.add_subcommand("from-log", "F = g(f(x)+f(y)) from a logarithm f");
    fl.ring.add(c_fl, "Q");
    c_fl->add_option("--series", fl.series, "logarithm f(T) = T mod T^2")->required();
    c_fl->add_option("--degree", fl.degree, "truncation degree N")->capture_default_str();
    c_fl->add_option("--scalars", fl.scalars, "comma-separated m for [m](x) = g(m f(x))");

    CheckOpts ck;
    auto *c_ck = app.add_subcommand("check", "verify axioms and an optional action");
    ck.ring.add(c_ck, "Q");
    c_ck->add_option("--law", ck.law, "F(x,y)");
    c_ck->add_option("--bundle", ck.bundle, "JSON bundle with \"F\" and optional \"endomorphisms\"");
    c_ck->add_option("--endo", ck.endo, "scalar=series in x, repeatable");
    c_ck->add_option("--degree", ck.degree, "truncation degree N for --law")->capture_default_str();

    LogOpts lg;
    auto *c_lg = app.add_subcommand("log", "formal logarithm of a law");
    lg.ring.add(c_lg, "Q");
    c_lg->add_option("--law", lg.law, "F(x,y)")->required();
    c_lg->add_option("--degree", lg.degree, "truncation degree N")->capture_default_str();

    RecoverOpts rc;
    auto *c_rc = app.add_subcommand("recover-add", "recover addition on a truncated monoid from its Lubin-Tate action");
    c_rc->add_option("--p", rc.p, "prime p")->required();
    c_rc->add_option("--eisenstein", rc.eisenstein, "Eisenstein polynomial in t");
    c_rc->add_option("--precision", rc.precision, "absolute precision (default n+V-1)");
    c_rc->add_option("--n", rc.n, "unit level n")->capture_default_str();
    c_rc->add_option("--V", rc.V, "valuation cap V")->capture_default_str();
    c_rc->add_option("--degree", rc.degree, "truncation degree N")->capture_default_str();
    c_rc->add_option("--preset", rc.preset, "standard or multiplicative")->capture_default_str();
    c_rc->add_option("--series", rc.series, "Lubin-Tate series in T");
    c_rc->add_option("--a", rc.a, "first summand (ring element)");
    c_rc->add_option("--b", rc.b, "second summand (ring element)");
    c_rc->add_flag("--table", rc.table, "print the full addition table");

    VariationCliOpts dv;
    auto *c_dv = app.add_subcommand("demo-variation", "compare native and transported additions on O^> u {0}");
    c_dv->add_option("--p", dv.p, "prime p")->capture_default_str();
    c_dv->add_option("--e1", dv.e1, "Eisenstein polynomial of K1")->capture_default_str();
    c_dv->add_option("--e2", dv.e2, "Eisenstein polynomial of K2")->capture_default_str();
    c_dv->add_option("--n", dv.n, "unit level n")->capture_default_str();
    c_dv->add_option("--V", dv.V, "valuation cap V")->capture_default_str();
    c_dv->add_option("--degree", dv.degree, "truncation degree N")->capture_default_str();
    c_dv->add_option("--twists", dv.twists, "number of monoid isomorphisms to try")->capture_default_str();
    c_dv->add_option("--examples", dv.examples, "differing pairs listed per isomorphism")->capture_default_str();

    UniversalOpts un;
    auto *c_un = app.add_subcommand("universal", "emit the truncated universal presentation");
    un.monoid.add(c_un);
    c_un->add_option("--degree", un.degree, "truncation degree N")->capture_default_str();
    c_un->add_option("--out", un.out, "write the JSON presentation to a file");
    c_un->add_flag("--text", un.text, "print the relations as a comma-separated list");

    SpecializeOpts sp;
    auto *c_sp = app.add_subcommand("specialize", "map the universal presentation into a ring");
    sp.monoid.add(c_sp);
    sp.ring.add(c_sp, "Z");
    c_sp->add_option("--degree", sp.degree, "truncation degree N")->capture_default_str();
    c_sp->add_option("--image", sp.image, "variable=value, repeatable");
    c_sp->add_option("--images", sp.images_file, "JSON object of variable images");

    ClassifyOpts cl;
    auto *c_cl = app.add_subcommand("classify", "read the classifying map off an action");
    cl.monoid.add(c_cl);
    cl.ring.add(c_cl, "Q");
    c_cl->add_option("--degree", cl.degree, "truncation degree N")->capture_default_str();
    c_cl->add_option("--preset", cl.preset, "Lubin-Tate preset")->capture_default_str();
    c_cl->add_option("--series", cl.series, "Lubin-Tate series in T");
    c_cl->add_option("--generator", cl.generator, "generator=element for Lubin-Tate actions, repeatable");
    c_cl->add_option("--law", cl.law, "F(x,y) for a directly given action");
    c_cl->add_option("--endo", cl.endo, "generator=series in x for a directly given action, repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        report_error("usage", e.what());
        return kInvalid;
    }

    try {
        if (c_lt->parsed()) {
            return run_lubin_tate(lt);
        }
        if (c_fl->parsed()) {
            return run_from_log(fl);
        }
        if (c_ck->parsed()) {
            return run_check(ck);
        }
        if (c_lg->parsed()) {
            return run_log(lg);
        }
        if (c_rc->parsed()) {
            return run_recover_add(rc);
        }
        if (c_dv->parsed()) {
            return run_demo_variation(dv);
        }
        if (c_un->parsed()) {
            return run_universal(un);
        }
        if (c_sp->parsed()) {
            return run_specialize(sp);
        }
        if (c_cl->parsed()) {
            return run_classify(cl);
        }
    } catch (const InvalidInput &e) {
        report_error("invalid_input", e.what());
        return kInvalid;
    } catch (const ContextMismatch &e) {
        report_error("invalid_input", e.what());
        return kInvalid;
    } catch (const UnsupportedOperation &e) {
        report_error("invalid_input", e.what());
        return kInvalid;
    } catch (const StructureMismatch &e) {
        report_error("structure_mismatch", e.what());
        return kInvalid;
    } catch (const LubinTateError &e) {
        report_error("invalid_input", e.what());
        return kInvalid;
    } catch (const NotAUnit &e) {
        report_error("not_a_unit", e.what());
        return kInvalid;
    } catch (const IdealNotKilled &e) {
        report_error("ideal_not_killed", e.what());
        return kFailed;
    } catch (const NonIntegralDivision &e) {
        report_error("non_integral_division", e.what());
        return kFailed;
    } catch (const NoMatch &e) {
        report_error("no_match", e.what());
        return kFailed;
    } catch (const Error &e) {
        report_error("error", e.what());
        return kFailed;
    }
    return kInvalid;
}
