// qkdrate: secret-key rates, thresholds, sweeps, tradeoff curves and Monte
// Carlo validation for coarse vs refined QKD data post-processing.
//
// Output goes to stdout (CSV or JSON, 9 significant digits), diagnostics to
// stderr. Exit codes: 0 success, 2 invalid arguments, 3 no threshold found.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkd/analysis.hpp"
#include "qkd/montecarlo.hpp"

namespace {

using nlohmann::ordered_json;

std::string num9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Round through the 9-significant-digit decimal form so JSON and CSV carry
// the same values and files stay diff-stable.
double round9(double v) {
    return std::strtod(num9(v).c_str(), nullptr);
}

void print_line(const std::string& s) {
    std::fputs(s.c_str(), stdout);
    std::fputc('\n', stdout);
}

void print_json(const ordered_json& j) {
    print_line(j.dump(2));
}

qkd::Scheme parse_scheme(const std::string& s) {
    if (s == "bb84") return qkd::Scheme::bb84;
    if (s == "ddi") return qkd::Scheme::ddi;
    return qkd::Scheme::di;
}

ordered_json table_json(const qkd::JointTable& t) {
    ordered_json j;
    j["alphabet_a"] = t.alphabet_a();
    j["alphabet_b"] = t.alphabet_b();
    std::vector<std::vector<double>> rows(t.a_size(), std::vector<double>(t.b_size()));
    for (std::size_t a = 0; a < t.a_size(); ++a) {
        for (std::size_t b = 0; b < t.b_size(); ++b) {
            rows[a][b] = round9(t.at(a, b));
        }
    }
    j["probs"] = rows;
    return j;
}

struct Options {
    std::string scheme;
    std::string mode = "both";
    std::string format = "csv";
    std::string vary;
    std::optional<double> ps, eta, eta_a, eta_b;
    double es = 0.0;
    double f = 1.0;
    double tol = 1e-6;
    double eta_min = 0.0, eta_max = 1.0;
    double es_min = 0.0, es_max = 0.0;
    int steps = 0;
    long long n = 1000000;
    std::uint64_t seed = 1;
};

int fail_usage(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return 2;
}

// Scheme-appropriate physical parameters. Exactly one parameterization must
// be given: bb84 takes --ps, ddi takes --eta, di takes --eta-a/--eta-b or the
// symmetric --eta shorthand.
struct ResolvedParams {
    std::optional<qkd::Bb84Params> bb84;
    std::optional<qkd::DdiParams> ddi;
    std::optional<qkd::DiParams> di;
};

std::optional<ResolvedParams> resolve_params(const Options& opt, std::string& err) {
    ResolvedParams rp;
    const auto scheme = parse_scheme(opt.scheme);
    if (scheme == qkd::Scheme::bb84) {
        if (!opt.ps) {
            err = "--scheme bb84 requires --ps";
            return std::nullopt;
        }
        if (opt.eta || opt.eta_a || opt.eta_b) {
            err = "--eta/--eta-a/--eta-b are not valid for bb84 (use --ps)";
            return std::nullopt;
        }
        rp.bb84.emplace(*opt.ps, opt.es);
    } else if (scheme == qkd::Scheme::ddi) {
        if (!opt.eta) {
            err = "--scheme ddi requires --eta";
            return std::nullopt;
        }
        if (opt.ps || opt.eta_a || opt.eta_b) {
            err = "--ps/--eta-a/--eta-b are not valid for ddi (use --eta)";
            return std::nullopt;
        }
        rp.ddi.emplace(*opt.eta, opt.es);
    } else {
        if (opt.ps) {
            err = "--ps is not valid for di";
            return std::nullopt;
        }
        if (opt.eta && (opt.eta_a || opt.eta_b)) {
            err = "give either --eta or --eta-a/--eta-b, not both";
            return std::nullopt;
        }
        if (opt.eta) {
            rp.di.emplace(*opt.eta, *opt.eta, opt.es);
        } else if (opt.eta_a && opt.eta_b) {
            rp.di.emplace(*opt.eta_a, *opt.eta_b, opt.es);
        } else {
            err = "--scheme di requires --eta or both --eta-a and --eta-b";
            return std::nullopt;
        }
    }
    return rp;
}

struct RateRecord {
    std::string mode;
    qkd::RateBreakdown rb;
    std::optional<double> s;
    std::optional<double> e_c;
};

int run_rate(const Options& opt) {
    std::string err;
    const auto rp = resolve_params(opt, err);
    if (!rp) {
        return fail_usage(err);
    }
    const qkd::EcParams ec(opt.f);
    const auto scheme = parse_scheme(opt.scheme);

    std::vector<RateRecord> records;
    for (const std::string& mode : {std::string("coarse"), std::string("refined")}) {
        if (opt.mode != "both" && opt.mode != mode) {
            continue;
        }
        const qkd::Mode m = mode == "coarse" ? qkd::Mode::coarse : qkd::Mode::refined;
        RateRecord rec;
        rec.mode = mode;
        if (rp->bb84) {
            rec.rb = m == qkd::Mode::coarse ? qkd::bb84_coarse_rate(*rp->bb84, ec)
                                            : qkd::bb84_refined_rate(*rp->bb84, ec);
        } else if (rp->ddi) {
            rec.rb = m == qkd::Mode::coarse ? qkd::ddi_coarse_rate(*rp->ddi, ec)
                                            : qkd::ddi_refined_rate(*rp->ddi, ec);
        } else {
            rec.rb = m == qkd::Mode::coarse ? qkd::di_coarse_rate(*rp->di, ec)
                                            : qkd::di_refined_rate(*rp->di, ec);
        }
        if (scheme == qkd::Scheme::di) {
            rec.s = qkd::di_bell_parameter(*rp->di);
            rec.e_c = qkd::di_coarse_error(*rp->di).value();
        }
        records.push_back(rec);
    }

    if (opt.format == "json") {
        ordered_json out = ordered_json::array();
        for (const auto& rec : records) {
            ordered_json j;
            j["scheme"] = opt.scheme;
            j["mode"] = rec.mode;
            ordered_json params;
            if (rp->bb84) {
                params["ps"] = round9(rp->bb84->p_single.value());
            } else if (rp->ddi) {
                params["eta"] = round9(rp->ddi->eta.value());
            } else {
                params["eta_a"] = round9(rp->di->eta_a.value());
                params["eta_b"] = round9(rp->di->eta_b.value());
            }
            params["es"] = round9(opt.es);
            j["params"] = params;
            j["h_a"] = round9(rec.rb.h_a);
            j["h_a_given_b"] = round9(rec.rb.h_a_given_b);
            j["i_pa"] = round9(rec.rb.i_pa);
            j["f"] = round9(rec.rb.f);
            j["rate"] = round9(rec.rb.rate);
            if (rec.s) {
                j["s"] = round9(*rec.s);
                j["e_c"] = round9(*rec.e_c);
            }
            out.push_back(j);
        }
        print_json(out);
        return 0;
    }

    std::string header = "scheme,mode,";
    if (rp->bb84) {
        header += "ps,es";
    } else if (rp->ddi) {
        header += "eta,es";
    } else {
        header += "eta_a,eta_b,es";
    }
    header += ",h_a,h_a_given_b,i_pa,f,rate";
    if (scheme == qkd::Scheme::di) {
        header += ",s,e_c";
    }
    print_line(header);
    for (const auto& rec : records) {
        std::string row = opt.scheme + "," + rec.mode + ",";
        if (rp->bb84) {
            row += num9(rp->bb84->p_single.value()) + "," + num9(opt.es);
        } else if (rp->ddi) {
            row += num9(rp->ddi->eta.value()) + "," + num9(opt.es);
        } else {
            row += num9(rp->di->eta_a.value()) + "," + num9(rp->di->eta_b.value()) + "," +
                   num9(opt.es);
        }
        row += "," + num9(rec.rb.h_a) + "," + num9(rec.rb.h_a_given_b) + "," +
               num9(rec.rb.i_pa) + "," + num9(rec.rb.f) + "," + num9(rec.rb.rate);
        if (rec.s) {
            row += "," + num9(*rec.s) + "," + num9(*rec.e_c);
        }
        print_line(row);
    }
    return 0;
}

int run_threshold(const Options& opt) {
    if (opt.mode == "both") {
        return fail_usage("threshold needs --mode coarse or --mode refined");
    }
    const qkd::Scheme scheme = parse_scheme(opt.scheme);
    const qkd::Mode mode = opt.mode == "coarse" ? qkd::Mode::coarse : qkd::Mode::refined;
    const qkd::EcParams ec(opt.f);

    std::optional<qkd::ThresholdResult> result;
    double fixed = 0.0;
    if (opt.vary == "eta") {
        fixed = opt.es;
        result = qkd::find_eta_threshold(scheme, mode, opt.es, opt.tol, ec);
    } else {
        if (!opt.eta) {
            return fail_usage("--vary es requires --eta (symmetric per-link value for di)");
        }
        fixed = *opt.eta;
        result = qkd::find_es_threshold(scheme, mode, *opt.eta, opt.tol, ec);
    }
    if (!result) {
        std::fprintf(stderr, "no threshold: the rate never becomes positive\n");
        return 3;
    }
    if (result->sign_changes > 1) {
        std::fprintf(stderr, "warning: %d sign changes in the pre-scan; reporting the smallest\n",
                     result->sign_changes);
    }

    if (opt.format == "json") {
        ordered_json j;
        j["scheme"] = opt.scheme;
        j["mode"] = opt.mode;
        j["vary"] = opt.vary;
        j["params"][opt.vary == "eta" ? "es" : "eta"] = round9(fixed);
        j["params"]["f"] = round9(opt.f);
        j["root"] = round9(result->root);
        j["bracket_lo"] = round9(result->bracket_lo);
        j["bracket_hi"] = round9(result->bracket_hi);
        j["iterations"] = result->iterations;
        j["achieved_tolerance"] = round9(result->achieved_tolerance);
        j["sign_changes"] = result->sign_changes;
        print_json(j);
        return 0;
    }
    print_line("scheme,mode,vary,root,bracket_lo,bracket_hi,iterations,achieved_tolerance");
    print_line(opt.scheme + "," + opt.mode + "," + opt.vary + "," + num9(result->root) + "," +
               num9(result->bracket_lo) + "," + num9(result->bracket_hi) + "," +
               std::to_string(result->iterations) + "," + num9(result->achieved_tolerance));
    return 0;
}

int run_sweep(const Options& opt) {
    const qkd::Scheme scheme = parse_scheme(opt.scheme);
    const auto rows = qkd::sweep(scheme, opt.es, opt.eta_min, opt.eta_max, opt.steps,
                                 qkd::EcParams(opt.f));
    const bool with_s = scheme == qkd::Scheme::di;

    if (opt.format == "json") {
        ordered_json out = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json j;
            j["eta"] = round9(r.eta);
            j["rate_coarse"] = round9(r.rate_coarse);
            j["rate_refined"] = round9(r.rate_refined);
            j["e_c"] = round9(r.e_c);
            j["h_a"] = round9(r.h_a);
            j["i_pa"] = round9(r.i_pa_coarse);
            if (r.s) {
                j["s"] = round9(*r.s);
            }
            out.push_back(j);
        }
        print_json(out);
        return 0;
    }
    print_line(with_s ? "eta,rate_coarse,rate_refined,e_c,h_a,i_pa,s"
                      : "eta,rate_coarse,rate_refined,e_c,h_a,i_pa");
    for (const auto& r : rows) {
        std::string row = num9(r.eta) + "," + num9(r.rate_coarse) + "," + num9(r.rate_refined) +
                          "," + num9(r.e_c) + "," + num9(r.h_a) + "," + num9(r.i_pa_coarse);
        if (r.s) {
            row += "," + num9(*r.s);
        }
        print_line(row);
    }
    return 0;
}

int run_curve(const Options& opt) {
    const qkd::Scheme scheme = parse_scheme(opt.scheme);
    const auto points = qkd::tradeoff_curve(scheme, opt.es_min, opt.es_max, opt.steps, opt.tol,
                                            qkd::EcParams(opt.f));
    if (opt.format == "json") {
        ordered_json out = ordered_json::array();
        for (const auto& p : points) {
            ordered_json j;
            j["e_s"] = round9(p.e_s);
            j["eta_threshold_coarse"] =
                p.eta_threshold_coarse ? ordered_json(round9(*p.eta_threshold_coarse))
                                       : ordered_json(nullptr);
            j["eta_threshold_refined"] =
                p.eta_threshold_refined ? ordered_json(round9(*p.eta_threshold_refined))
                                        : ordered_json(nullptr);
            out.push_back(j);
        }
        print_json(out);
        return 0;
    }
    print_line("e_s,eta_threshold_coarse,eta_threshold_refined");
    for (const auto& p : points) {
        print_line(num9(p.e_s) + "," +
                   (p.eta_threshold_coarse ? num9(*p.eta_threshold_coarse) : "") + "," +
                   (p.eta_threshold_refined ? num9(*p.eta_threshold_refined) : ""));
    }
    return 0;
}

int run_mc(const Options& opt) {
    std::string err;
    const auto rp = resolve_params(opt, err);
    if (!rp) {
        return fail_usage(err);
    }
    if (rp->bb84) {
        return fail_usage("mc supports --scheme ddi or di");
    }

    qkd::MonteCarloEstimate est =
        rp->ddi ? qkd::simulate_ddi(*rp->ddi, opt.n, opt.seed)
                : qkd::simulate_di(*rp->di, opt.n, opt.seed);
    const qkd::ComparisonReport report =
        rp->ddi ? qkd::compare(est, *rp->ddi) : qkd::compare(est, *rp->di);

    if (opt.format == "json") {
        ordered_json j;
        j["scheme"] = opt.scheme;
        j["generator"] = qkd::kGeneratorName;
        j["seed"] = est.seed;
        j["n"] = est.n;
        ordered_json params;
        if (rp->ddi) {
            params["eta"] = round9(rp->ddi->eta.value());
        } else {
            params["eta_a"] = round9(rp->di->eta_a.value());
            params["eta_b"] = round9(rp->di->eta_b.value());
        }
        params["es"] = round9(opt.es);
        j["params"] = params;
        j["class_counts"] = est.class_counts;
        j["e_c_hat"] = round9(est.e_c_hat);
        if (est.s_hat) {
            j["s_hat"] = round9(*est.s_hat);
        }
        j["joint_coarse_hat"] = table_json(est.joint_coarse_hat);
        j["joint_refined_hat"] = table_json(est.joint_refined_hat);
        j["assigned_counts"] = est.assigned_counts;
        ordered_json errs;
        for (const auto& [k, v] : est.std_errors) {
            errs[k] = round9(v);
        }
        j["std_errors"] = errs;
        ordered_json comp = ordered_json::array();
        for (const auto& row : report.rows) {
            ordered_json r;
            r["quantity"] = row.quantity;
            r["analytic"] = round9(row.analytic);
            r["empirical"] = round9(row.empirical);
            r["std_error"] = round9(row.std_error);
            r["z"] = round9(row.z);
            r["allowance"] = round9(row.allowance);
            r["ok"] = row.ok;
            comp.push_back(r);
        }
        j["comparison"] = comp;
        j["all_ok"] = report.all_ok;
        print_json(j);
        return 0;
    }

    print_line("scheme,seed,n,quantity,analytic,empirical,std_error,z,allowance,ok");
    const std::string prefix =
        opt.scheme + "," + std::to_string(est.seed) + "," + std::to_string(est.n) + ",";
    for (const auto& row : report.rows) {
        print_line(prefix + row.quantity + "," + num9(row.analytic) + "," + num9(row.empirical) +
                   "," + num9(row.std_error) + "," + num9(row.z) + "," + num9(row.allowance) +
                   "," + (row.ok ? "1" : "0"));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secret-key rates for coarse vs refined QKD data post-processing"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file mirroring the flags; flags override");

    Options opt;
    const auto scheme_check = CLI::IsMember({"bb84", "ddi", "di"});
    const auto mode_check = CLI::IsMember({"coarse", "refined", "both"});
    const auto format_check = CLI::IsMember({"csv", "json"});

    auto add_common = [&](CLI::App* cmd, bool with_mode) {
        cmd->add_option("--scheme", opt.scheme, "Protocol family")->required()->check(scheme_check);
        if (with_mode) {
            cmd->add_option("--mode", opt.mode, "Processing mode")->check(mode_check);
        }
        cmd->add_option("--es", opt.es, "Single-click error rate")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--f", opt.f, "Error-correction inefficiency (>= 1)");
        cmd->add_option("--format", opt.format, "Output format")->check(format_check);
    };
    auto add_phys = [&](CLI::App* cmd) {
        cmd->add_option("--ps", opt.ps, "Single-click fraction (bb84)");
        cmd->add_option("--eta", opt.eta, "Transmissivity (ddi) or symmetric per-link (di)");
        cmd->add_option("--eta-a", opt.eta_a, "Source-to-Alice transmittance (di)");
        cmd->add_option("--eta-b", opt.eta_b, "Source-to-Bob transmittance (di)");
    };

    CLI::App* rate = app.add_subcommand("rate", "Evaluate the key rate at one operating point");
    add_common(rate, true);
    add_phys(rate);

    CLI::App* threshold =
        app.add_subcommand("threshold", "Find the positive-rate boundary in eta or es");
    add_common(threshold, true);
    threshold->add_option("--vary", opt.vary, "Parameter to vary")
        ->required()
        ->check(CLI::IsMember({"eta", "es"}));
    threshold->add_option("--eta", opt.eta, "Fixed transmittance when varying es");
    threshold->add_option("--tol", opt.tol, "Bisection tolerance")->check(CLI::PositiveNumber);

    CLI::App* sweep = app.add_subcommand("sweep", "Rates on a transmittance grid (CSV/JSON rows)");
    add_common(sweep, false);
    sweep->add_option("--eta-min", opt.eta_min, "Grid start")->required();
    sweep->add_option("--eta-max", opt.eta_max, "Grid end")->required();
    sweep->add_option("--steps", opt.steps, "Grid points (>= 2)")->required();

    CLI::App* curve =
        app.add_subcommand("curve", "Tolerable (es, eta) boundary for both processing modes");
    add_common(curve, false);
    curve->add_option("--es-min", opt.es_min, "Grid start");
    curve->add_option("--es-max", opt.es_max, "Grid end")->required();
    curve->add_option("--steps", opt.steps, "Grid points (>= 1)")->required();
    curve->add_option("--tol", opt.tol, "Bisection tolerance")->check(CLI::PositiveNumber);

    CLI::App* mc = app.add_subcommand("mc", "Seeded Monte Carlo run with analytic comparison");
    add_common(mc, false);
    add_phys(mc);
    mc->add_option("--n", opt.n, "Signals to simulate")->check(CLI::PositiveNumber);
    mc->add_option("--seed", opt.seed, "Generator seed (recorded in output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(rate)) return run_rate(opt);
        if (app.got_subcommand(threshold)) return run_threshold(opt);
        if (app.got_subcommand(sweep)) return run_sweep(opt);
        if (app.got_subcommand(curve)) return run_curve(opt);
        if (app.got_subcommand(mc)) return run_mc(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
