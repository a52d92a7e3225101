#include "symdyn/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "symdyn/error.hpp"

namespace symdyn {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// Reads keys of one JSON object and rejects the ones never asked for.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw InputError(where_ + " must be an object");
    }
    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }
    const json& at(const std::string& key) {
        if (!has(key)) throw InputError(fmt::format("{}.{} is required", where_, key));
        return j_.at(key);
    }
    std::string path(const std::string& key) const { return where_ + "." + key; }
    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k)) throw InputError(fmt::format("unknown key {}.{}", where_, k));
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

std::int64_t as_int(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d == std::floor(d) && std::fabs(d) < 9e18) return static_cast<std::int64_t>(d);
    }
    throw InputError(where + " must be an integer");
}

double as_real(const json& v, const std::string& where) {
    if (!v.is_number()) throw InputError(where + " must be a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw InputError(where + " must be a string");
    return v.get<std::string>();
}

std::int64_t get_int(Fields& f, const std::string& key, std::int64_t dflt) {
    return f.has(key) ? as_int(f.at(key), f.path(key)) : dflt;
}

double get_real(Fields& f, const std::string& key, double dflt) {
    return f.has(key) ? as_real(f.at(key), f.path(key)) : dflt;
}

Sequence to_sequence(const json& v, std::int64_t first_index) {
    if (v.is_string()) return Sequence::formula(v.get<std::string>());
    if (v.is_number()) return Sequence::constant(v.get<double>());
    std::vector<double> vals;
    for (const auto& x : v) vals.push_back(x.get<double>());
    return Sequence::list(std::move(vals), first_index);
}

// Strings are formulas, numbers constants, arrays value lists.
ojson sequence_json(const json& v, const std::string& where) {
    if (v.is_string()) {
        (void)Sequence::formula(v.get<std::string>());
        return v;
    }
    if (v.is_number()) return v;
    if (v.is_array() && !v.empty()) {
        for (const auto& x : v)
            if (!x.is_number()) throw InputError(where + " list entries must be numbers");
        return v;
    }
    throw InputError(where + " must be a formula string, a number or a nonempty list");
}

ojson normalize_gap(const json& j, const std::string& where) {
    Fields f(j, where);
    ojson out;
    std::string mode = f.has("mode") ? as_string(f.at("mode"), f.path("mode")) : "specification";
    if (mode != "specification" && mode != "transitivity")
        throw InputError(f.path("mode") + " must be specification or transitivity");
    out["mode"] = mode;
    out["f"] = sequence_json(f.at("f"), f.path("f"));
    f.finish();
    return out;
}

ojson normalize_subshift(const json& j, const std::string& where) {
    Fields f(j, where);
    const std::string family = as_string(f.at("family"), f.path("family"));
    ojson out;
    out["family"] = family;
    if (family == "full") {
        out["alphabet_size"] = get_int(f, "alphabet_size", 2);
    } else if (family == "golden_mean") {
    } else if (family == "sft") {
        out["alphabet_size"] = get_int(f, "alphabet_size", 2);
        const auto& fw = f.at("forbidden");
        if (!fw.is_array()) throw InputError(f.path("forbidden") + " must be a list of words");
        out["forbidden"] = ojson::array();
        for (const auto& w : fw) out["forbidden"].push_back(as_string(w, f.path("forbidden")));
    } else if (family == "bounded_density") {
        out["k"] = get_int(f, "k", 1);
        out["h"] = sequence_json(f.at("h"), f.path("h"));
        out["n_max"] = get_int(f, "n_max", 64);
    } else if (family == "sparse_sturmian") {
        out["p"] = as_int(f.at("p"), f.path("p"));
        out["q"] = as_int(f.at("q"), f.path("q"));
        const auto& ns = f.at("n_seq");
        if (!ns.is_array()) throw InputError(f.path("n_seq") + " must be a list of integers");
        out["k_max"] = get_int(f, "k_max", static_cast<std::int64_t>(ns.size()) + 6);
        out["n_seq"] = ojson::array();
        for (const auto& x : ns) out["n_seq"].push_back(as_int(x, f.path("n_seq")));
    } else if (family == "product") {
        const auto& fs = f.at("factors");
        if (!fs.is_array() || fs.size() != 2) throw InputError(f.path("factors") + " must list exactly two subshifts");
        out["factors"] = {normalize_subshift(fs[0], f.path("factors[0]")), normalize_subshift(fs[1], f.path("factors[1]"))};
    } else {
        throw InputError(fmt::format("{} '{}' is not one of full, golden_mean, sft, bounded_density, sparse_sturmian, product",
                                     f.path("family"), family));
    }
    if (f.has("declared_gap"))
        out["declared_gap"] = normalize_gap(f.at("declared_gap"), f.path("declared_gap"));
    else if (family == "golden_mean")
        out["declared_gap"] = {{"mode", "specification"}, {"f", 1}};
    f.finish();
    return out;
}

ojson normalize_potential(const json& j, const std::string& where) {
    Fields f(j, where);
    const std::string kind = f.has("kind") ? as_string(f.at("kind"), f.path("kind")) : "zero";
    ojson out;
    out["kind"] = kind;
    if (kind == "zero") {
    } else if (kind == "locally_constant") {
        out["radius"] = get_int(f, "radius", 0);
        const auto& t = f.at("table");
        if (!t.is_object()) throw InputError(f.path("table") + " must map blocks to values");
        ojson table = ojson::object();
        std::map<std::string, double> sorted;  // canonical key order
        for (const auto& [k, v] : t.items()) sorted[k] = as_real(v, f.path("table." + k));
        for (const auto& [k, v] : sorted) table[k] = v;
        out["table"] = table;
        out["default"] = get_real(f, "default", 0.0);
    } else if (kind == "phi_h") {
        out["h"] = sequence_json(f.at("h"), f.path("h"));
    } else if (kind == "level") {
        out["a"] = sequence_json(f.at("a"), f.path("a"));
        out["a_inf"] = get_real(f, "a_inf", 0.0);
    } else {
        throw InputError(fmt::format("{} '{}' is not one of zero, locally_constant, phi_h, level", f.path("kind"), kind));
    }
    f.finish();
    return out;
}

GapBound gap_from_json(const ojson& g, std::string prefix = "") {
    const GapMode mode = g.at("mode") == "transitivity" ? GapMode::Transitivity : GapMode::Specification;
    Sequence s = to_sequence(g.at("f"), 1);
    auto desc = prefix + s.description();
    return GapBound{mode, [s](std::int64_t n) { return s.at_int(n); }, desc};
}

} // namespace

// ---------------------------------------------------------------------------

ojson normalize_config(const json& doc) {
    Fields top(doc, "config");
    ojson out;
    out["name"] = top.has("name") ? as_string(top.at("name"), "config.name") : "experiment";
    out["subshift"] = normalize_subshift(top.at("subshift"), "subshift");
    out["potential"] = normalize_potential(top.has("potential") ? top.at("potential") : json::object(), "potential");

    const json empty = json::object();
    {
        Fields h(top.has("horizons") ? top.at("horizons") : empty, "horizons");
        out["horizons"]["n_max"] = get_int(h, "n_max", 12);
        out["horizons"]["m_max"] = h.has("m_max") ? ojson(as_int(h.at("m_max"), h.path("m_max"))) : ojson(nullptr);
        out["horizons"]["state_block"] =
            h.has("state_block") ? ojson(as_int(h.at("state_block"), h.path("state_block"))) : ojson(nullptr);
        out["horizons"]["anchor_horizon"] = get_int(h, "anchor_horizon", 1 << 20);
        out["horizons"]["language_files_max"] = get_int(h, "language_files_max", 16);
        h.finish();
    }
    {
        Fields t(top.has("tolerances") ? top.at("tolerances") : empty, "tolerances");
        out["tolerances"]["margin"] = get_real(t, "margin", kMarginTolerance);
        out["tolerances"]["bracket"] = get_real(t, "bracket", 1e-9);
        out["tolerances"]["perron"] = get_real(t, "perron", 1e-12);
        out["tolerances"]["identity"] = get_real(t, "identity", 1e-8);
        out["tolerances"]["stationarity"] = get_real(t, "stationarity", 1e-10);
        t.finish();
    }
    {
        Fields s(top.has("strategy") ? top.at("strategy") : empty, "strategy");
        out["strategy"]["glue"] = to_string(parse_glue_strategy(s.has("glue") ? as_string(s.at("glue"), s.path("glue")) : "exhaustive"));
        out["strategy"]["pair_cutoff"] = get_int(s, "pair_cutoff", 50'000'000);
        out["strategy"]["sample_size"] = get_int(s, "sample_size", 100'000);
        out["strategy"]["seed"] = get_int(s, "seed", 1);
        s.finish();
    }
    {
        Fields g(top.has("gap_profile") ? top.at("gap_profile") : empty, "gap_profile");
        std::string mode = g.has("mode") ? as_string(g.at("mode"), g.path("mode")) : "auto";
        if (mode != "auto" && mode != "specification" && mode != "transitivity")
            throw InputError("gap_profile.mode must be auto, specification or transitivity");
        out["gap_profile"]["mode"] = mode;
        out["gap_profile"]["n_lo"] = get_int(g, "n_lo", 1);
        out["gap_profile"]["n_hi"] = get_int(g, "n_hi", 6);
        g.finish();
    }
    {
        Fields v(top.has("verify") ? top.at("verify") : empty, "verify");
        auto& o = out["verify"];
        o["n_lo"] = get_int(v, "n_lo", 1);
        o["n_hi"] = get_int(v, "n_hi", out["horizons"]["n_max"].get<std::int64_t>());
        if (v.has("P")) {
            const auto& p = v.at("P");
            if (p.is_number()) o["P"] = p.get<double>();
            else {
                auto s = as_string(p, v.path("P"));
                if (s != "auto" && s != "transfer" && s != "bracket")
                    throw InputError("verify.P must be a number or one of auto, transfer, bracket");
                o["P"] = s;
            }
        } else {
            o["P"] = "auto";
        }
        o["C"] = get_real(v, "C", 1.0);
        o["M_onset"] = get_int(v, "M_onset", 3);
        o["epsilon"] = get_real(v, "epsilon", 0.5);
        o["epsilons"] = ojson::array();
        if (v.has("epsilons")) {
            if (!v.at("epsilons").is_array()) throw InputError("verify.epsilons must be a list");
            for (const auto& e : v.at("epsilons")) o["epsilons"].push_back(as_real(e, "verify.epsilons"));
        } else {
            o["epsilons"] = {0.9, 0.6, 0.5, 0.3};
        }
        o["slack"] = get_int(v, "slack", 4);
        o["triples_per_n"] = get_int(v, "triples_per_n", 200);
        o["cylinder"] = v.has("cylinder") ? as_string(v.at("cylinder"), "verify.cylinder") : "";
        o["f"] = v.has("f") ? sequence_json(v.at("f"), "verify.f") : ojson(nullptr);
        std::string g = v.has("g") ? as_string(v.at("g"), "verify.g") : "variation";
        if (g != "variation" && g != "zero") throw InputError("verify.g must be variation or zero");
        o["g"] = g;
        v.finish();
    }
    out["budget"] = top.has("budget") ? as_int(top.at("budget"), "config.budget") : 100'000'000;
    out["output_dir"] = top.has("output_dir") ? as_string(top.at("output_dir"), "config.output_dir") : "out";
    top.finish();
    return out;
}

SubshiftPtr build_subshift(const ojson& s) {
    const auto family = s.at("family").get<std::string>();
    SubshiftPtr out;
    if (family == "full") {
        out = make_full_shift(static_cast<int>(s.at("alphabet_size").get<std::int64_t>()));
    } else if (family == "golden_mean") {
        out = make_golden_mean();
    } else if (family == "sft") {
        const auto a = s.at("alphabet_size").get<std::int64_t>();
        if (a < 1 || a > 36) throw InputError("subshift.alphabet_size must be in 1..36");
        std::vector<Word> forbidden;
        for (const auto& w : s.at("forbidden")) forbidden.push_back(parse_word(w.get<std::string>(), static_cast<int>(a)));
        out = make_sft(static_cast<int>(a), std::move(forbidden));
    } else if (family == "bounded_density") {
        out = make_bounded_density(static_cast<int>(s.at("k").get<std::int64_t>()), to_sequence(s.at("h"), 1),
                                   s.at("n_max").get<std::int64_t>());
    } else if (family == "sparse_sturmian") {
        const auto k_max = s.at("k_max").get<std::int64_t>();
        if (k_max < 1 || k_max > 60) throw InputError("subshift.k_max must be in 1..60");
        out = make_sparse_sturmian(make_sturmian_factors(s.at("p").get<std::int64_t>(), s.at("q").get<std::int64_t>(),
                                                         static_cast<int>(k_max)),
                                   s.at("n_seq").get<std::vector<std::int64_t>>());
    } else if (family == "product") {
        out = product_subshift(build_subshift(s.at("factors")[0]), build_subshift(s.at("factors")[1]));
    } else {
        throw InputError("unknown family " + family);
    }
    if (s.contains("declared_gap")) out = out->with_declared_gap(gap_from_json(s.at("declared_gap")));
    return out;
}

PotentialPtr build_potential(const ojson& p, int alphabet_size) {
    const auto kind = p.at("kind").get<std::string>();
    if (kind == "zero") return make_zero_potential(alphabet_size);
    if (kind == "locally_constant") {
        const auto r = p.at("radius").get<std::int64_t>();
        if (r < 0 || r > 8) throw InputError("potential.radius must be in 0..8");
        std::map<Word, double> values;
        for (const auto& [k, v] : p.at("table").items()) {
            Word w = parse_word(k, alphabet_size);
            if (static_cast<std::int64_t>(w.size()) != 2 * r + 1)
                throw InputError(fmt::format("potential.table block '{}' must have length 2r+1 = {}", k, 2 * r + 1));
            values[w] = v.get<double>();
        }
        return make_locally_constant(alphabet_size, static_cast<int>(r), values, p.at("default").get<double>());
    }
    if (kind == "phi_h") {
        if (alphabet_size != 2) throw InputError("phi_h potentials need a binary alphabet");
        return make_phi_h(to_sequence(p.at("h"), 0));
    }
    if (kind == "level") {
        if (alphabet_size != 2) throw InputError("level potentials need a binary alphabet");
        return make_level_potential(to_sequence(p.at("a"), 0), p.at("a_inf").get<double>());
    }
    throw InputError("unknown potential kind " + kind);
}

std::optional<GapBound> ExperimentConfig::gap_bound() const {
    if (verify.f) return verify.f;
    return subshift->declared_gap();
}

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig c;
    c.doc = normalize_config(doc);
    const auto& d = c.doc;
    c.subshift = build_subshift(d["subshift"]);
    c.potential = build_potential(d["potential"], c.subshift->alphabet_size());
    c.name = d["name"];

    const auto& h = d["horizons"];
    c.n_max = h["n_max"];
    if (c.n_max < 1) throw InputError("horizons.n_max must be positive");
    if (!h["m_max"].is_null()) c.m_max = h["m_max"].get<std::int64_t>();
    if (!h["state_block"].is_null()) {
        auto sb = h["state_block"].get<std::int64_t>();
        if (sb < 1) throw InputError("horizons.state_block must be positive");
        c.state_block = static_cast<std::size_t>(sb);
    }
    c.anchor_horizon = h["anchor_horizon"];
    if (c.anchor_horizon < 16) throw InputError("horizons.anchor_horizon must be at least 16");
    c.language_files_max = h["language_files_max"];

    const auto& t = d["tolerances"];
    c.margin_tol = t["margin"];
    c.bracket_tol = t["bracket"];
    c.perron_tol = t["perron"];
    c.identity_tol = t["identity"];
    c.stationarity_tol = t["stationarity"];

    const auto& s = d["strategy"];
    c.glue = parse_glue_strategy(s["glue"]);
    c.search.pair_cutoff = s["pair_cutoff"];
    c.search.sample_size = s["sample_size"];
    c.search.seed = s["seed"];

    const auto& g = d["gap_profile"];
    if (g["mode"] == "transitivity") c.gap_mode = GapMode::Transitivity;
    else if (g["mode"] == "specification") c.gap_mode = GapMode::Specification;
    else if (c.subshift->declared_gap()) c.gap_mode = c.subshift->declared_gap()->mode;
    c.gap_n_lo = g["n_lo"];
    c.gap_n_hi = g["n_hi"];
    if (c.gap_n_lo < 1 || c.gap_n_hi < c.gap_n_lo) throw InputError("gap_profile needs 1 <= n_lo <= n_hi");

    const auto& v = d["verify"];
    c.verify.n_lo = v["n_lo"];
    c.verify.n_hi = v["n_hi"];
    if (c.verify.n_lo < 1 || c.verify.n_hi < c.verify.n_lo) throw InputError("verify needs 1 <= n_lo <= n_hi");
    c.verify.P = v["P"].is_number() ? fmt::format("{:.17g}", v["P"].get<double>()) : v["P"].get<std::string>();
    c.verify.C = v["C"];
    c.verify.M_onset = v["M_onset"];
    c.verify.epsilon = v["epsilon"];
    c.verify.epsilons = v["epsilons"].get<std::vector<double>>();
    c.verify.slack = v["slack"];
    if (c.verify.slack < 0) throw InputError("verify.slack must be nonnegative");
    c.verify.triples_per_n = static_cast<int>(v["triples_per_n"].get<std::int64_t>());
    c.verify.cylinder = parse_word(v["cylinder"].get<std::string>(), c.subshift->alphabet_size());
    if (!v["f"].is_null()) c.verify.f = gap_from_json({{"mode", "specification"}, {"f", v["f"]}});
    c.verify.g = v["g"];

    c.budget = d["budget"];
    c.search.budget = c.budget;
    c.output_dir = d["output_dir"];

    ojson core = d;
    core.erase("output_dir");
    core.erase("budget");
    c.digest = sha256_hex(core.dump());
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ojson to_json(const ExperimentConfig& cfg) {
    ojson out = cfg.doc;
    out["budget"] = cfg.budget;
    out["output_dir"] = cfg.output_dir;
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

} // namespace symdyn
