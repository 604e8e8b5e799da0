#pragma once

// JSON encodings of rings, elements, series, laws, actions, monoids,
// presentations and recovery reports, plus the decoders the CLI needs.
// Output uses insertion-ordered objects and canonical term order, so equal
// inputs give byte-identical documents.

#include <nlohmann/json.hpp>
#include <regex>
#include <string>

#include "lubin_tate.hpp"
#include "recovery.hpp"
#include "universal.hpp"

namespace fgl::json
{

using Json = nlohmann::ordered_json;

// --- rings and elements -----------------------------------------------------------

inline Ring parse_ring_descriptor(const std::string &d)
{
    if (d == "Z") {
        return make_integers();
    }
    if (d == "Q") {
        return make_rationals();
    }
    static const std::regex padic(R"(Z_(\d+)/(\d+)\^(\d+))");
    static const std::regex eis(R"(Z_(\d+)\[pi\]/\((.*)\), m\^(\d+))");
    std::smatch m;
    if (std::regex_match(d, m, padic) && m[1] == m[2]) {
        return make_padic(std::stoull(m[1]), std::stoi(m[3]));
    }
    if (std::regex_match(d, m, eis)) {
        return make_eisenstein(std::stoull(m[1]), std::stoi(m[3]), parse_integer_polynomial(m[2], "pi"));
    }
    throw InvalidInput("unrecognized ring descriptor '" + d + "'");
}

inline Json encode_value(const Ring &r, const Value &v)
{
    Json j;
    j["ring"] = r->descriptor();
    if (r->kind() == RingKind::eisenstein_extension) {
        Json coords = Json::array();
        for (const auto &c : r->coordinates(v)) {
            coords.push_back(c.get_str());
        }
        j["value"] = coords;
    } else {
        j["value"] = r->to_string(v);
    }
    if (r->is_padic()) {
        j["precision"] = r->precision();
    }
    return j;
}

inline Json encode(const RingElement &a) { return encode_value(a.ring(), a.value()); }

inline RingElement decode_element(const Json &j, const Ring &ring)
{
    if (j.is_string()) {
        return parse_element(ring, j.get<std::string>(), ring->is_padic() ? std::optional<RingElement>(uniformizer(ring)) : std::nullopt);
    }
    if (j.is_number_integer()) {
        return RingElement::integer(ring, mpz_class(std::to_string(j.get<long long>())));
    }
    if (!j.is_object() || !j.contains("value")) {
        throw InvalidInput("element must be a string, an integer, or an object with a value");
    }
    if (j.contains("ring") && j["ring"].get<std::string>() != ring->descriptor()) {
        throw ContextMismatch("element of " + j["ring"].get<std::string>() + " where " + ring->descriptor() + " was expected");
    }
    const Json &v = j["value"];
    if (v.is_array()) {
        std::vector<mpz_class> coords;
        for (const auto &c : v) {
            coords.emplace_back(c.get<std::string>());
        }
        return {ring, ring->from_coordinates(coords)};
    }
    return decode_element(v, ring);
}

// --- series -------------------------------------------------------------------------

inline Json encode(const TruncatedSeries &s)
{
    Json j;
    j["ring"] = s.ring()->descriptor();
    j["vars"] = s.variables();
    j["N"] = s.degree();
    Json terms = Json::array();
    for (const auto &[m, c] : s.terms()) {
        Json t;
        t["exp"] = std::vector<int>(m.begin(), m.end());
        t["coeff"] = encode_value(s.ring(), c);
        terms.push_back(t);
    }
    j["terms"] = terms;
    j["text"] = s.to_string();
    return j;
}

inline TruncatedSeries decode_series(const Json &j, const Ring &ring)
{
    const auto vars = j.at("vars").get<std::vector<std::string>>();
    TruncatedSeries s(ring, vars, j.at("N").get<int>());
    for (const auto &t : j.at("terms")) {
        const auto e = t.at("exp").get<std::vector<int>>();
        if (e.size() != vars.size()) {
            throw InvalidInput("term exponent has the wrong length");
        }
        Monomial m;
        for (const int x : e) {
            if (x < 0) {
                throw InvalidInput("negative exponent in series term");
            }
            m.push_back(static_cast<std::uint16_t>(x));
        }
        if (total_degree(m) > static_cast<unsigned>(s.degree())) {
            throw InvalidInput("series term above the truncation degree");
        }
        s.set(m, decode_element(t.at("coeff"), ring).value());
    }
    return s;
}

inline Ring series_ring(const Json &j)
{
    if (j.contains("ring")) {
        return parse_ring_descriptor(j["ring"].get<std::string>());
    }
    for (const auto &t : j.at("terms")) {
        if (t.at("coeff").is_object() && t["coeff"].contains("ring")) {
            return parse_ring_descriptor(t["coeff"]["ring"].get<std::string>());
        }
    }
    throw InvalidInput("series does not name its ring");
}

// --- laws and actions ------------------------------------------------------------------

inline Json encode(const AxiomReport &r)
{
    Json j;
    for (const auto &c : r.checks) {
        Json a;
        a["passed"] = c.passed;
        if (!c.passed) {
            a["first_failure"] = c.failure_monomial();
        }
        j[c.axiom] = a;
    }
    return j;
}

inline Json encode(const FormalGroupLaw &F)
{
    Json j;
    j["F"] = encode(F.series());
    j["N"] = F.degree();
    j["axioms"] = encode(F.axioms());
    return j;
}

inline Json encode(const ActionReport &r)
{
    Json j;
    j["passed"] = r.passed();
    j["checks"] = r.checks;
    Json v = Json::array();
    for (const auto &x : r.violations) {
        v.push_back({{"identity", x.identity}, {"elements", x.elements}, {"monomial", x.monomial}});
    }
    j["violations"] = v;
    return j;
}

inline Json encode_monoid_element(const MonoidElement &m)
{
    const auto &M = m.monoid;
    if (M->kind() == MonoidKind::padic_truncation) {
        if (M->is_bottom(m)) {
            return "bottom";
        }
        return Json{{"v", M->valuation_of(m)}, {"u", M->unit_ring()->to_string(M->unit_value(M->unit_of(m)))}};
    }
    return M->to_string(m);
}

inline std::string monoid_descriptor(const Monoid &M)
{
    switch (M->kind()) {
    case MonoidKind::free_commutative: {
        std::string g;
        for (const auto &n : M->generator_names()) {
            g += (g.empty() ? "" : ",") + n;
        }
        return "free<" + g + ">";
    }
    case MonoidKind::finite_presented:
        return "finite(" + std::to_string(M->size()) + " elements)";
    case MonoidKind::padic_truncation:
        return "trunc(" + M->lift_ring()->descriptor() + ", n=" + std::to_string(M->unit_level()) +
               ", V=" + std::to_string(M->valuation_cap()) + ")";
    }
    return {};
}

inline Json encode(const MonoidAction &A)
{
    Json j;
    j["ring"] = A.law.ring()->descriptor();
    if (A.monoid) {
        j["monoid"] = monoid_descriptor(A.monoid);
    }
    j["law"] = encode(A.law);
    Json entries = Json::array();
    for (const auto &e : A.entries) {
        Json x;
        x["label"] = e.label;
        if (e.element) {
            x["element"] = encode_monoid_element(*e.element);
        }
        if (e.scalar) {
            x["scalar"] = encode(*e.scalar);
        }
        x["series"] = encode(e.series);
        entries.push_back(x);
    }
    j["endomorphisms"] = entries;
    return j;
}

// Law plus scalar endomorphism entries, as produced by encode(MonoidAction)
// or a bare {"F": ...} law bundle.
inline MonoidAction decode_action(const Json &j)
{
    const Json &law = j.contains("law") ? j["law"] : j;
    if (!law.contains("F")) {
        throw InvalidInput("bundle has no law series \"F\"");
    }
    const Ring ring = j.contains("ring") ? parse_ring_descriptor(j["ring"].get<std::string>()) : series_ring(law["F"]);
    MonoidAction A;
    A.law = FormalGroupLaw(decode_series(law["F"], ring));
    if (j.contains("endomorphisms")) {
        for (const auto &e : j["endomorphisms"]) {
            ActionEntry entry{e.value("label", std::string("?")), decode_series(e.at("series"), ring).renamed(detail::xonly()),
                              std::nullopt, std::nullopt, std::nullopt};
            if (e.contains("scalar")) {
                entry.scalar = decode_element(e["scalar"], ring);
            }
            A.entries.push_back(std::move(entry));
        }
    }
    return A;
}

// --- monoids ------------------------------------------------------------------------------

// {"kind": "free", "generators": [...]}
// {"kind": "trivial"}
// {"kind": "finite", "elements": [...], "table": [[name, ...], ...], "generators": [...]}
// {"kind": "padic", "p": 5, "eisenstein": "t^2-5", "n": 1, "V": 2, "precision": k}
inline Monoid decode_monoid(const Json &j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "free") {
        return free_monoid(j.at("generators").get<std::vector<std::string>>());
    }
    if (kind == "trivial") {
        return finite_monoid({"1"}, {0}, {});
    }
    if (kind == "finite") {
        const auto names = j.at("elements").get<std::vector<std::string>>();
        const Json &rows = j.at("table");
        if (rows.size() != names.size()) {
            throw InvalidInput("multiplication table needs one row per element");
        }
        std::vector<std::size_t> table;
        for (const auto &row : rows) {
            if (row.size() != names.size()) {
                throw InvalidInput("multiplication table rows need one entry per element");
            }
            for (const auto &x : row) {
                if (x.is_number_unsigned()) {
                    table.push_back(x.get<std::size_t>());
                    continue;
                }
                const auto it = std::find(names.begin(), names.end(), x.get<std::string>());
                if (it == names.end()) {
                    throw InvalidInput("table entry '" + x.get<std::string>() + "' is not an element name");
                }
                table.push_back(static_cast<std::size_t>(it - names.begin()));
            }
        }
        std::vector<std::string> gens = j.contains("generators") ? j["generators"].get<std::vector<std::string>>() : names;
        return finite_monoid(names, table, gens);
    }
    if (kind == "padic") {
        const auto p = j.at("p").get<std::uint64_t>();
        const int n = j.at("n").get<int>();
        const int V = j.at("V").get<int>();
        const int k = j.value("precision", n + V - 1);
        const Ring r = j.contains("eisenstein") ? make_eisenstein(p, k, parse_integer_polynomial(j["eisenstein"].get<std::string>()))
                                                : make_padic(p, k);
        return padic_truncation_of(r, n, V);
    }
    throw InvalidInput("unknown monoid kind '" + kind + "'");
}

// --- universal presentations -----------------------------------------------------------

inline Json encode_poly(const Ring &R, const Value &v)
{
    Json terms = Json::array();
    const auto &t = R->terms_of(v);
    for (auto it = t.rbegin(); it != t.rend(); ++it) {
        terms.push_back({{"exp", std::vector<int>(it->first.begin(), it->first.end())}, {"coeff", std::get<mpz_class>(it->second).get_str()}});
    }
    return terms;
}

inline Json encode(const Relation &r, const UniversalPresentation &P)
{
    return {{"kind", std::string(1, relation_code(r.kind))},
            {"label", r.label},
            {"text", P.relation_text(r)},
            {"terms", encode_poly(P.ring, r.poly)}};
}

inline Json encode(const UniversalPresentation &P)
{
    Json j;
    j["monoid"] = monoid_descriptor(P.monoid);
    j["N"] = P.N;
    j["variables"] = P.ring->variables();
    j["monoid_variables"] = P.monoid_vars;
    Json base = Json::array();
    for (const auto &r : P.base_relations) {
        base.push_back(encode(r, P));
    }
    j["base_relations"] = base;
    Json ideal = Json::array();
    for (const auto &r : P.ideal) {
        ideal.push_back(encode(r, P));
    }
    j["ideal"] = ideal;
    Json zeros;
    for (const auto &[k, n] : P.zero_relations) {
        zeros[std::string(1, k)] = n;
    }
    j["zero_relations"] = zeros;
    j["law"] = P.law.to_string();
    Json endo;
    for (std::size_t a = 0; a < P.acting.size(); ++a) {
        endo[P.acting_names[a]] = P.endomorphisms[a].to_string();
    }
    j["endomorphisms"] = endo;
    j["text"] = P.ideal_text();
    return j;
}

inline Json encode(const IdealCheck &c)
{
    Json f = Json::array();
    for (const auto &x : c.failures) {
        f.push_back({{"relation", x.label}, {"value", x.value}});
    }
    return {{"passed", c.passed()}, {"checked", c.checked}, {"failures", f}};
}

inline Json encode(const SpecializationHom &h)
{
    Json j;
    j["target"] = h.target->descriptor();
    Json im;
    const auto &vars = h.source->ring->variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
        im[vars[i]] = h.images[i].to_string();
    }
    j["images"] = im;
    return j;
}

inline Json encode(const LogScan &s)
{
    Json j{{"outcome", outcome_name(s.outcome)}, {"N", s.N}};
    if (s.outcome == NontrivialityOutcome::witness) {
        j["degree"] = s.degree;
        j["coefficient"] = s.coefficient;
        j["valuation"] = *s.valuation;
        j["denominator"] = s.denominator.get_str();
    }
    j["reason"] = s.reason;
    return j;
}

// --- recovery ---------------------------------------------------------------------------

inline Json encode(const RingAxiomReport &r)
{
    return {{"passed", r.passed()},
            {"pairs", r.pairs},
            {"triples", r.triples},
            {"commutativity_failures", r.commutativity_failures},
            {"neutral_failures", r.neutral_failures},
            {"associativity_failures", r.associativity_failures},
            {"distributivity_failures", r.distributivity_failures},
            {"first_failure", r.first_failure}};
}

inline Json flag_names(std::uint8_t f)
{
    Json out = Json::array();
    if (f & flag_escaped_cap) {
        out.push_back("escaped_cap");
    }
    if (f & flag_cancellation) {
        out.push_back("cancellation");
    }
    if (f & flag_bottom_operand) {
        out.push_back("bottom_operand");
    }
    return out;
}

// Full table as rows keyed by element labels; flagged entries carry their flags.
inline Json encode(const AdditionTable &t, bool include_table)
{
    const RecoveredRing &R = t.ring;
    Json j;
    j["carrier"] = monoid_descriptor(R.carrier);
    j["size"] = R.size();
    j["flagged"] = R.flagged_count();
    j["native_mismatches"] = t.native_mismatches;
    j["confirmation_failures"] = t.confirmation_failures;
    j["first_problem"] = t.first_problem;
    if (t.axioms) {
        j["axioms"] = encode(*t.axioms);
    }
    j["passed"] = t.passed();
    if (include_table) {
        Json rows;
        for (std::size_t a = 0; a < R.size(); ++a) {
            Json row;
            for (std::size_t b = 0; b < R.size(); ++b) {
                if (R.well_defined(a, b)) {
                    row[R.label(b)] = R.label(R.sum(a, b));
                } else {
                    row[R.label(b)] = {{"sum", R.label(R.sum(a, b))}, {"flags", flag_names(R.flag(a, b))}};
                }
            }
            rows[R.label(a)] = row;
        }
        j["table"] = rows;
    }
    return j;
}

inline Json encode(const VariationReport &r)
{
    Json j;
    j["ring1"] = r.ring1;
    j["ring2"] = r.ring2;
    j["invariant_factors"] = r.invariant_factors;
    j["carrier_size"] = r.carrier_size;
    j["native1_flagged"] = r.native1_flagged;
    j["native2_flagged"] = r.native2_flagged;
    j["native1_problems"] = r.native1_problems;
    j["native2_problems"] = r.native2_problems;
    Json res = Json::array();
    for (const auto &t : r.results) {
        Json x;
        x["twist"] = t.twist;
        x["multiplication_identical"] = t.multiplication_identical;
        x["compared"] = t.compared;
        x["agreements"] = t.agreements;
        x["differing"] = t.differing;
        Json ex = Json::array();
        for (const auto &d : t.examples) {
            ex.push_back({{"a", d.a}, {"b", d.b}, {"native", d.native}, {"transported", d.transported}});
        }
        x["examples"] = ex;
        res.push_back(x);
    }
    j["isomorphisms"] = res;
    j["variation_everywhere"] = r.variation_everywhere();
    return j;
}

} // namespace fgl::json
