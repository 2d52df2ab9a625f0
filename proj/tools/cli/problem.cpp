#include "problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <hmgibbs/error.hpp>
#include <json.hpp>

namespace hmg::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
}

AlphabetPtr read_alphabet(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of symbol labels");
    std::vector<std::string> labels;
    for (const auto& s : j) {
        if (s.is_string())
            labels.push_back(s.get<std::string>());
        else if (s.is_number_integer())
            labels.push_back(std::to_string(s.get<long long>()));
        else
            fail(where, "symbol labels must be strings or integers");
    }
    try {
        return Alphabet::make(std::move(labels));
    } catch (const ValidationError& e) {
        fail(where, e.what());
    }
}

std::string label_of(const json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    fail(where, "expected a symbol label");
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

std::size_t count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

void read_potential(ProblemSpec& ps, const json& p, const std::string& src) {
    const std::string where = src + ": potential";
    if (!p.is_object()) fail(where, "expected an object");
    const std::string family = p.value("family", std::string("table"));
    auto word = [&](const std::string& s, const std::string& at) {
        try {
            return ps.parse_source_word(s);
        } catch (const ValidationError& e) {
            fail(at, e.what());
        }
    };
    if (family == "table") {
        ps.family = Family::Table;
        if (!p.contains("r")) fail(where, "table potentials need 'r'");
        const std::size_t r = count(p["r"], where + ".r");
        std::vector<std::pair<Word, double>> entries;
        if (p.contains("entries")) {
            const auto& e = p["entries"];
            if (!e.is_array()) fail(where + ".entries", "expected an array of {word, value}");
            for (std::size_t i = 0; i < e.size(); ++i) {
                const std::string at = where + ".entries[" + std::to_string(i) + "]";
                if (!e[i].contains("word") || !e[i].contains("value")) fail(at, "needs 'word' and 'value'");
                entries.emplace_back(word(e[i]["word"].get<std::string>(), at), number(e[i]["value"], at + ".value"));
            }
        } else if (p.contains("weights")) {
            for (const auto& [w, v] : p["weights"].items()) {
                const std::string at = where + ".weights." + w;
                const double x = number(v, at);
                if (!(x > 0)) fail(at, "weights must be positive");
                entries.emplace_back(word(w, at), std::log(x));
            }
        } else {
            fail(where, "table potentials need 'entries' or 'weights'");
        }
        try {
            ps.table = LocallyConstantPotential::from_entries(ps.source, r, entries);
        } catch (const ValidationError& e) {
            fail(where, e.what());
        }
    } else if (family == "first-symbol-weighted") {
        ps.family = Family::FirstSymbolWeighted;
        if (!p.contains("weights") || !p["weights"].is_object()) fail(where, "needs a 'weights' object");
        std::vector<double> w(ps.source->size(), -1.0);
        for (const auto& [s, v] : p["weights"].items()) w[ps.source->index_of(s)] = number(v, where + ".weights." + s);
        try {
            ps.table = first_symbol_weighted(ps.source, w);
        } catch (const ValidationError& e) {
            fail(where, e.what());
        }
    } else if (family == "geometric-tail") {
        ps.family = Family::GeometricTail;
        if (!p.contains("f") || !p["f"].is_object()) fail(where, "needs an 'f' object mapping symbols to values");
        std::vector<double> f(ps.source->size(), NAN);
        for (const auto& [s, v] : p["f"].items()) f[ps.source->index_of(s)] = number(v, where + ".f." + s);
        for (std::size_t i = 0; i < f.size(); ++i)
            if (std::isnan(f[i])) fail(where + ".f", "missing value for symbol '" + ps.source->label(i) + "'");
        const double lambda = p.contains("lambda") ? number(p["lambda"], where + ".lambda") : 0.5;
        try {
            ps.general = geometric_tail(ps.source, f, lambda);
        } catch (const ValidationError& e) {
            fail(where, e.what());
        }
    } else {
        fail(where + ".family", "unknown family '" + family + "'");
    }
}

}  // namespace

const AmalgamationMap& ProblemSpec::require_map() const {
    if (!map) throw ValidationError("this command needs 'target_alphabet' and 'amalgamation'");
    return *map;
}

LocallyConstantPotential ProblemSpec::table_at(std::optional<std::size_t> r_override) const {
    if (table) {
        if (r_override && *r_override != table->range())
            throw ValidationError("table potential has range " + std::to_string(table->range()) +
                                  "; --r " + std::to_string(*r_override) + " does not match");
        return *table;
    }
    const auto rr = r_override ? r_override : r;
    if (!rr) throw ValidationError("general potentials need schedule.r (or --r) for this command");
    return approximant(*general, *rr, EnumerationLimits{cap});
}

ProblemSpec parse_problem(const std::string& text, const std::string& src) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ValidationError(src + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
    if (!doc.is_object()) fail(src, "top level must be an object");
    ProblemSpec ps;
    if (!doc.contains("alphabet")) fail(src, "missing 'alphabet'");
    ps.source = read_alphabet(doc["alphabet"], src + ": alphabet");
    ps.separator = doc.value("separator", std::string());
    if (doc.contains("target_alphabet")) {
        ps.target = read_alphabet(doc["target_alphabet"], src + ": target_alphabet");
        if (!doc.contains("amalgamation") || !doc["amalgamation"].is_object())
            fail(src, "'target_alphabet' needs an 'amalgamation' object");
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& [a, b] : doc["amalgamation"].items())
            pairs.emplace_back(a, label_of(b, src + ": amalgamation." + a));
        try {
            ps.map = AmalgamationMap::from_labels(ps.source, ps.target, pairs);
        } catch (const ValidationError& e) {
            fail(src + ": amalgamation", e.what());
        }
    }
    if (doc.contains("cap")) ps.cap = count(doc["cap"], src + ": cap");
    if (!doc.contains("potential")) fail(src, "missing 'potential'");
    read_potential(ps, doc["potential"], src);

    if (doc.contains("schedule")) {
        const auto& s = doc["schedule"];
        const std::string at = src + ": schedule";
        if (s.contains("r")) ps.r = count(s["r"], at + ".r");
        if (s.contains("n")) ps.n = count(s["n"], at + ".n");
        if (s.contains("tol")) ps.tol = number(s["tol"], at + ".tol");
        if (s.contains("delta")) ps.delta = number(s["delta"], at + ".delta");
        if (s.contains("max_states")) ps.max_states = count(s["max_states"], at + ".max_states");
    }
    if (doc.contains("verify_tolerance")) {
        ps.verify_tolerance = number(doc["verify_tolerance"], src + ": verify_tolerance");
        if (*ps.verify_tolerance < 0) fail(src + ": verify_tolerance", "must be nonnegative");
    }
    if (doc.contains("max_length")) ps.max_length = count(doc["max_length"], src + ": max_length");
    if (doc.contains("words")) {
        for (const auto& w : doc["words"]) {
            if (!w.is_string()) fail(src + ": words", "expected strings");
            ps.words.push_back(w.get<std::string>());
        }
    }
    if (doc.contains("report")) {
        const auto& r = doc["report"];
        if (r.contains("n_max")) ps.report_n_max = count(r["n_max"], src + ": report.n_max");
        if (r.contains("depth")) ps.report_depth = count(r["depth"], src + ": report.depth");
    }
    return ps;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path.string() + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), path.string());
}

}  // namespace hmg::cli
