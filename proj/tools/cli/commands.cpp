#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <CLI11.hpp>
#include <json.hpp>

#include <hmgibbs/bounds.hpp>
#include <hmgibbs/error.hpp>
#include <hmgibbs/markov.hpp>
#include <hmgibbs/pushforward.hpp>
#include <oracle.hpp>

#include "problem.hpp"

namespace hmg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Verification tolerances, in natural-log units.
constexpr double kMeasureVerifyTol = 1e-9;
constexpr double kPushforwardVerifyTol = 1e-10;
constexpr double kInducedVerifySlack = 1e-9;
constexpr std::size_t kMaxScheduledDepth = 1'000'000;

struct Flags {
    std::string spec;
    std::string out = ".";
    std::optional<double> tol;
    std::optional<std::size_t> r;
    std::optional<std::size_t> n;
    std::optional<double> delta;
    std::optional<unsigned long long> cap;
    bool verify = false;
    bool log2 = false;
};

struct VerifyFailure : Error {
    using Error::Error;
};

std::string g17(double x) { return fmt::format("{:.17g}", x); }

class Session {
public:
    Session(Flags f, std::ostream& out) : f_(std::move(f)), out_(out), ps_(load_problem(f_.spec)) {
        if (f_.cap) ps_.cap = *f_.cap;
        if (f_.delta) ps_.delta = *f_.delta;
        if (!(ps_.delta > 0)) throw ValidationError("delta must be positive");
        if (f_.tol && !(*f_.tol > 0)) throw ValidationError("--tol must be positive");
        lim_.max_words = ps_.cap;
    }

    void measure();
    void pushforward();
    void induced();
    void verify();
    void report();

private:
    double L(double x) const { return f_.log2 ? x / std::numbers::ln2 : x; }
    std::optional<double> tol() const { return f_.tol ? f_.tol : ps_.tol; }
    std::optional<std::size_t> n() const { return f_.n ? f_.n : ps_.n; }
    std::optional<std::size_t> r() const { return f_.r ? f_.r : ps_.r; }

    GeneralOptions general_options() const {
        GeneralOptions o;
        o.delta = ps_.delta;
        o.max_states = ps_.max_states;
        o.limits = lim_;
        return o;
    }
    const GeneralSchedule& schedule();
    LocallyConstantPotential table();
    PushforwardMeasure& pf();
    oracle::TablePotential oracle_table();

    std::vector<Word> source_words();
    std::vector<Word> target_words();
    std::string text(const Word& w) const { return w.to_string(ps_.separator); }

    void write(const std::string& name, const std::string& body);
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
    json audit(const PushforwardConstants& k, std::size_t r) const;
    std::string variation_csv();
    void certificate();

    Flags f_;
    std::ostream& out_;
    ProblemSpec ps_;
    EnumerationLimits lim_;
    std::optional<GeneralSchedule> sched_;
    std::optional<LocallyConstantPotential> table_;
    std::optional<PushforwardMeasure> pf_;
};

const GeneralSchedule& Session::schedule() {
    if (!sched_) sched_ = plan_general(*ps_.general, *tol(), general_options());
    return *sched_;
}

// Table potentials are used as given. General ones are truncated at --r, or at the
// range chosen by the double-limit schedule when only a tolerance is set.
LocallyConstantPotential Session::table() {
    if (!table_) {
        if (ps_.table || r())
            table_ = ps_.table_at(f_.r ? f_.r : ps_.r);
        else if (tol())
            table_ = approximant(*ps_.general, schedule().r, lim_);
        else
            throw ValidationError("general potentials need --r or --tol");
    }
    return *table_;
}

PushforwardMeasure& Session::pf() {
    if (!pf_) {
        const auto& map = ps_.require_map();
        if (ps_.general && !r() && tol()) {
            pf_.emplace(schedule_measure(*ps_.general, map, schedule(), general_options()));
        } else {
            PushforwardOptions o;
            o.limits = lim_;
            const auto pot = table();
            if (ps_.general) {
                o.psi_norm = approximant_norm(*ps_.general, pot.range(), lim_);
                o.s_psi = variation_profile(*ps_.general).s_psi;
            }
            pf_.emplace(pot, map, o);
        }
    }
    return *pf_;
}

oracle::TablePotential Session::oracle_table() {
    const auto pot = table();
    return {pot.alphabet(), pot.range(), pot.table()};
}

std::vector<Word> Session::source_words() {
    std::vector<Word> ws;
    for (std::size_t len = 1; len <= ps_.max_length; ++len)
        for (auto& w : enumerate_words(ps_.source, len, lim_)) ws.push_back(std::move(w));
    for (const auto& s : ps_.words) {
        try {
            ws.push_back(ps_.parse_source_word(s));
        } catch (const ValidationError&) {
            // Target-alphabet words are listed for the other commands.
        }
    }
    return ws;
}

std::vector<Word> Session::target_words() {
    ps_.require_map();
    std::vector<Word> ws;
    for (std::size_t len = 1; len <= ps_.max_length; ++len)
        for (auto& w : enumerate_words(ps_.target, len, lim_)) ws.push_back(std::move(w));
    return ws;
}

void Session::write(const std::string& name, const std::string& body) {
    fs::create_directories(f_.out);
    const fs::path p = fs::path(f_.out) / name;
    std::ofstream o(p, std::ios::binary);
    if (!o) throw ValidationError(p.string() + ": cannot write");
    o << body;
    out_ << "wrote " << p.string() << "\n";
}

json Session::audit(const PushforwardConstants& k, std::size_t r) const {
    return json{{"r", r},         {"theta", k.theta}, {"s_psi", k.s_psi}, {"psi_norm", k.psi_norm},
                {"C0", k.C0},     {"C1", k.C1},       {"C", k.C},         {"log_base", f_.log2 ? 2 : 0}};
}

void Session::measure() {
    const auto pot = table();
    const auto m = measure_from(pot);
    std::optional<oracle::EigenTriple> eig;
    oracle::TablePotential tp;
    if (f_.verify) {
        tp = oracle_table();
        eig = oracle::dense_perron(oracle::transfer_matrix(tp));
    }
    std::ostringstream csv;
    csv << (f_.verify ? "word,length,log_prob,oracle_log_prob\n" : "word,length,log_prob\n");
    std::optional<std::string> bad;
    for (const auto& w : source_words()) {
        const double lp = cylinder_log_prob(m, w);
        csv << text(w) << ',' << w.size() << ',' << g17(L(lp));
        if (eig) {
            const double o = oracle::oracle_parry_log_prob(tp, *eig, w);
            csv << ',' << g17(L(o));
            if (!bad && !(std::abs(lp - o) <= ps_.verify_tolerance.value_or(kMeasureVerifyTol)))
                bad = fmt::format("{} (pipeline {:.17g}, oracle {:.17g})", text(w), lp, o);
        }
        csv << '\n';
    }
    write("measure.csv", csv.str());

    const auto& pd = m.perron();
    json s{{"alphabet", ps_.source->labels()},
           {"r", pot.range()},
           {"pressure", L(m.pressure())},
           {"rho", pd.rho},
           {"log_gibbs_constant", L(m.log_gibbs_constant())},
           {"log_base", f_.log2 ? 2 : 0},
           {"perron",
            {{"primitivity_index", pd.primitivity_index},
             {"tau", pd.tau},
             {"certified_residual", pd.certified_residual},
             {"certified_residual_left", pd.certified_residual_left},
             {"a_posteriori", pd.a_posteriori},
             {"residual_right", pd.residual_right},
             {"residual_left", pd.residual_left},
             {"iterations", pd.iterations}}}};
    if (ps_.general) s["approximation"] = {{"potential", ps_.general->name()},
                                          {"pressure_gap_bound", L(ps_.general->var_bound(pot.range()))}};
    write_json("measure_summary.json", s);
    if (bad) throw VerifyFailure("measure mismatch at word " + *bad);
}

void Session::pushforward() {
    auto& p = pf();
    const auto tp = f_.verify ? oracle_table() : oracle::TablePotential{};
    oracle::OracleConfig cfg;
    cfg.max_word_length = ps_.max_length;
    std::ostringstream csv;
    csv << (f_.verify ? "word,length,log_prob,oracle_log_prob\n" : "word,length,log_prob\n");
    std::optional<std::string> bad;
    for (const auto& b : target_words()) {
        const double lp = pushforward_cylinder_log_prob(p, b);
        csv << text(b) << ',' << b.size() << ',' << g17(L(lp));
        if (f_.verify) {
            const double o = oracle::oracle_pushforward(tp, p.map(), b, cfg);
            csv << ',' << g17(L(o));
            if (!bad && !(std::abs(std::expm1(lp - o)) <= ps_.verify_tolerance.value_or(kPushforwardVerifyTol)))
                bad = fmt::format("{} (pipeline {:.17g}, oracle {:.17g})", text(b), lp, o);
        }
        csv << '\n';
    }
    write("pushforward.csv", csv.str());
    json s = audit(p.constants(), p.range());
    s["log_rho"] = L(p.log_rho());
    s["phi_min"] = L(p.phi_min());
    s["phi_max"] = L(p.phi_max());
    s["max_product_tau"] = p.family().max_product_tau();
    s["products_checked"] = p.family().products_checked();
    write_json("pushforward_summary.json", s);
    if (bad) throw VerifyFailure("pushforward mismatch at word " + *bad);
}

std::string Session::variation_csv() {
    std::ostringstream csv;
    csv << "n,empirical_var,certified_bound,error_bar\n";
    for (const auto& row : variation_report(pf(), ps_.report_n_max, ps_.report_depth, lim_))
        csv << row.n << ',' << g17(L(row.empirical_var)) << ',' << g17(L(row.certified_bound)) << ','
            << g17(L(row.error_bar)) << '\n';
    return csv.str();
}

void Session::certificate() {
    auto& p = pf();
    CertificateInputs in;
    DecayClass cls = decay::LocallyConstant{p.range()};
    if (ps_.general) {
        in.profile = sched_ ? sched_->profile : variation_profile(*ps_.general);
        cls = ps_.general->decay_class();
    } else {
        in.profile = variation_profile(*ps_.table);
    }
    in.constants = p.constants();
    in.D1 = budget_D1(ps_.source->size(), in.constants.s_psi, in.constants.psi_norm);
    in.D = budget_D(in.constants.s_psi, in.D1);
    in.r = p.range();
    in.G = p.phi_range();
    in.delta = ps_.delta;
    json j = audit(p.constants(), p.range());
    j["potential_class"] = decay_class_name(cls);
    j["D1"] = in.D1;
    j["D"] = in.D;
    j["G"] = L(in.G);
    try {
        const auto c = decay_certificate(cls, in);
        j["certified"] = true;
        j["kind"] = c.kind_name();
        j["leading"] = L(c.leading);
        j["rate"] = c.rate;
        j["exponent"] = c.exponent;
        j["fitted_horizon"] = c.horizon;
    } catch (const CertificationError& e) {
        j["certified"] = false;
        j["reason"] = e.what();
    }
    write_json("decay_certificate.json", j);
}

void Session::induced() {
    auto& p = pf();
    const std::size_t r = p.range();
    const bool limit_mode = ps_.general && !this->r() && tol();
    std::size_t depth = 0;
    if (limit_mode) {
        depth = schedule().n;
    } else if (n()) {
        depth = *n();
    } else if (tol()) {
        depth = r + 1;
        while (induced_error_bar(p.constants(), r, depth) > *tol()) {
            if (++depth > kMaxScheduledDepth)
                throw BudgetError("no depth up to 1e6 meets the tolerance",
                                  induced_error_bar(p.constants(), r, kMaxScheduledDepth));
        }
    } else {
        throw ValidationError("induced needs --n or --tol");
    }

    std::vector<Word> words;
    for (const auto& s : ps_.words) {
        try {
            words.push_back(ps_.parse_target_word(s));
        } catch (const ValidationError&) {
        }
    }
    if (words.empty()) words = enumerate_words(ps_.target, ps_.max_length, lim_);

    const auto tp = f_.verify ? oracle_table() : oracle::TablePotential{};
    std::optional<std::string> bad;
    json values = json::array();
    for (const auto& b : words) {
        const InducedValue v = limit_mode ? induced_on_schedule(p, schedule(), b, *tol(), ps_.delta)
                                          : induced_potential_exact_r(p, b.periodic_extension(std::max(b.size(), depth + 1)), depth);
        json row{{"word", text(b)},
                 {"value", L(v.value)},
                 {"error_bar", L(v.error_bar)},
                 {"direct_log_ratio", L(v.direct_log_ratio)}};
        if (f_.verify) {
            const Word ext = b.periodic_extension(std::max(b.size(), depth + 1));
            oracle::OracleConfig cfg;
            cfg.max_word_length = depth + 1;
            const double o = oracle::oracle_pushforward(tp, p.map(), ext.subword(0, depth), cfg) -
                             oracle::oracle_pushforward(tp, p.map(), ext.subword(1, depth), cfg);
            row["oracle_log_ratio"] = L(o);
            if (!bad && !(std::abs(v.value - o) <= v.exact_bar + ps_.verify_tolerance.value_or(kInducedVerifySlack)))
                bad = fmt::format("{} (pipeline {:.17g}, oracle {:.17g}, bar {:.17g})", text(b), v.value, o,
                                  v.exact_bar);
        }
        values.push_back(std::move(row));
    }

    json cert = audit(p.constants(), r);
    cert["n"] = depth;
    cert["exact_bar"] = L(induced_error_bar(p.constants(), r, depth));
    cert["delta"] = ps_.delta;
    if (limit_mode) {
        const auto& g = schedule();
        cert["target"] = "phi";
        cert["tol"] = *tol();
        cert["r_star"] = g.r_star;
        cert["epsilon"] = g.epsilon;
        cert["limit_bar"] = L(g.limit_bar);
    } else {
        cert["target"] = ps_.general ? "phi_r" : "phi";
        if (tol()) cert["tol"] = *tol();
    }
    write_json("induced.json", json{{"certificate_inputs", cert}, {"values", values}});
    write("variation_report.csv", variation_csv());
    certificate();
    if (bad) throw VerifyFailure("induced mismatch at word " + *bad);
}

void Session::verify() {
    f_.verify = true;
    measure();
    if (ps_.map) {
        pushforward();
        if (n() || tol()) induced();
    }
}

void Session::report() {
    write("variation_report.csv", variation_csv());

    auto& p = pf();
    std::ostringstream gcsv;
    gcsv << "measure,length,min_log_ratio,max_log_ratio,log_C\n";
    const auto gb = gibbs_inequality_check(p.base(), ps_.report_n_max, lim_);
    for (std::size_t i = 0; i < gb.min_by_n.size(); ++i)
        gcsv << "mu," << i + 1 << ',' << g17(L(gb.min_by_n[i])) << ',' << g17(L(gb.max_by_n[i])) << ','
             << g17(L(gb.log_C)) << '\n';
    const auto gp = gibbs_check_pushforward(p, ps_.report_n_max, ps_.report_depth, lim_);
    for (std::size_t i = 0; i < gp.min_log_ratio_by_n.size(); ++i)
        gcsv << "nu," << i + 1 << ',' << g17(L(gp.min_log_ratio_by_n[i])) << ','
             << g17(L(gp.max_log_ratio_by_n[i])) << ',' << g17(L(gp.log_C)) << '\n';
    write("gibbs_report.csv", gcsv.str());

    std::ostringstream bcsv;
    bcsv << "r,n,var_r,epsilon,limit_bar,exact_bar\n";
    const std::size_t k = ps_.source->size();
    if (ps_.general) {
        const auto prof = variation_profile(*ps_.general);
        for (std::size_t r = 1, states = k; states <= ps_.max_states; ++r, states *= k) {
            const double norm = approximant_norm(*ps_.general, r, lim_);
            const auto kc = pushforward_constants(k, norm, prof.s_psi);
            const double D1 = budget_D1(k, prof.s_psi, norm), D = budget_D(prof.s_psi, D1);
            const std::size_t nr = schedule_depth(r, ps_.delta);
            bcsv << r << ',' << nr << ',' << g17(L(prof.var(r))) << ','
                 << g17(epsilon_budget(prof, r, nr, D1, D).epsilon) << ','
                 << g17(L(limit_bar(prof, kc, r, ps_.delta, D1, D))) << ','
                 << g17(L(induced_error_bar(kc, r, nr))) << '\n';
        }
    } else {
        const std::size_t r = p.range();
        for (std::size_t nn = r + 1; nn <= r + ps_.report_n_max; ++nn)
            bcsv << r << ',' << nn << ",0,0,0," << g17(L(induced_error_bar(p.constants(), r, nn))) << '\n';
    }
    write("budgets.csv", bcsv.str());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gibbs measures, amalgamation pushforwards and induced potentials"};
    app.name("hmgibbs");
    app.require_subcommand(1);
    Flags f;
    auto common = [&f](CLI::App* sub) {
        sub->add_option("--spec", f.spec, "problem file (JSON)")->required();
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--tol", f.tol, "target error; selects r and n");
        sub->add_option("--r", f.r, "range of the (r+1)-symbol approximant");
        sub->add_option("--n", f.n, "truncation depth for induced values");
        sub->add_option("--delta", f.delta, "schedule exponent, n(r) = r^(1+delta)");
        sub->add_option("--cap", f.cap, "largest enumeration allowed");
        sub->add_flag("--verify", f.verify, "compare against brute-force references");
        sub->add_flag("--log2", f.log2, "print logarithms in base 2");
    };
    struct Cmd {
        const char* name;
        const char* help;
        void (Session::*fn)();
    };
    const Cmd cmds[] = {
        {"measure", "cylinder log-probabilities, pressure, Gibbs constant", &Session::measure},
        {"pushforward", "cylinder log-probabilities of the amalgamated process", &Session::pushforward},
        {"induced", "induced potential with error bars, variation report, decay certificate", &Session::induced},
        {"verify", "all of the above against brute-force references", &Session::verify},
        {"report", "variation, Gibbs and budget tables", &Session::report},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : cmds) {
        subs.push_back(app.add_subcommand(c.name, c.help));
        common(subs.back());
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return Ok;
        }
        err << "error: " << e.what() << "\n";
        return Validation;
    }
    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            Session s(f, out);
            (s.*cmds[i].fn)();
        }
        return Ok;
    } catch (const VerifyFailure& e) {
        err << "verify: " << e.what() << "\n";
        return VerifyMismatch;
    } catch (const BudgetError& e) {
        err << "error: " << e.what() << fmt::format(" (achievable tolerance {:.17g})", e.achievable_tolerance()) << "\n";
        return Uncertified;
    } catch (const CertificationError& e) {
        err << "error: " << e.what() << "\n";
        return Uncertified;
    } catch (const NotPrimitive& e) {
        err << "error: " << e.what() << "\n";
        return Uncertified;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return Validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Validation;
    }
}

}  // namespace hmg::cli
