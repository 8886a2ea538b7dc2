#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "osm/asymptotics.hpp"
#include "osm/errors.hpp"
#include "osm/optimizer.hpp"
#include "osm/problem.hpp"
#include "osm/report.hpp"
#include "osm/simulator.hpp"
#include "osm/spectral.hpp"

namespace {

using nlohmann::json;
using namespace osm;

struct Options {
    // problem
    double sigma = 1.0, epsilon = 1.0, L = 1.0, Lhat = 1.0, delta = 1e-2;
    int J = 2;
    double pa = 1.0, pb = 1.0;
    std::string outer = "robin";
    std::string variant = "uniform";
    // search policy
    SearchPolicy policy;
    // outputs
    std::string json_path, csv_path, config_path;
    // optimize / asymptotics
    std::vector<double> deltas_optimize{1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> deltas_asymptotics{1e-3, 1e-4, 1e-5, 1e-6};
    // simulate
    double h = 0.05;
    int iterations = 40;
    std::uint64_t sim_seed = 1;
    double p_value = 0.0;
    std::vector<double> params_list;
    std::vector<int> modes;
    // bound
    double bound_p = 0.0, bound_pminus = 0.0, bound_pplus = 0.0;
    double kmax = 1e3;
    int knum = 200;
};

std::string fmt6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

ProblemConfig make_config(const Options& o) {
    ProblemConfig cfg;
    cfg.sigma = o.sigma;
    cfg.epsilon = o.epsilon;
    cfg.L = o.L;
    cfg.Lhat = o.Lhat;
    cfg.delta = o.delta;
    cfg.J = o.J;
    if (o.outer == "robin")
        cfg.outer = OuterBC::robin(o.pa, o.pb);
    else if (o.outer == "dirichlet")
        cfg.outer = OuterBC::dirichlet();
    else
        throw std::invalid_argument("outer must be 'robin' or 'dirichlet', got '" + o.outer + "'");
    cfg.validate();
    return cfg;
}

Variant parse_variant(const std::string& v) {
    if (v == "uniform") return Variant::uniform;
    if (v == "two_sided" || v == "two-sided") return Variant::two_sided;
    if (v == "full") return Variant::full;
    throw std::invalid_argument("variant must be uniform, two_sided, or full, got '" + v + "'");
}

std::vector<std::string> param_names(Variant variant, int J) {
    switch (variant) {
        case Variant::uniform: return {"p"};
        case Variant::two_sided: return {"p_minus", "p_plus"};
        default: {
            std::vector<std::string> names;
            for (int i = 0; i < 2 * (J - 1); ++i) {
                if (i % 2 == 0)
                    names.push_back("p" + std::to_string(i / 2 + 1) + "_plus");
                else
                    names.push_back("p" + std::to_string((i + 1) / 2 + 1) + "_minus");
            }
            return names;
        }
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::invalid_argument("failed writing '" + path + "'");
}

// ---- config file: applied manually after parsing so that the precedence
// ---- is file < environment < flags (CLI11 alone would put files first)

struct Binding {
    std::string key;
    const CLI::App* owner; // nullptr = global
    CLI::Option* opt;
    std::function<void(const std::string&)> apply;
};

double to_double(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size())
        throw std::invalid_argument("configuration key '" + key + "' has non-numeric value '" + s + "'");
    return v;
}

long long to_int(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size())
        throw std::invalid_argument("configuration key '" + key + "' has non-integer value '" + s + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

/** key = value lines, '#' comments; keys mirror the long option names. */
std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read configuration file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        s.erase(0, s.find_first_not_of(ws));
        const auto end = s.find_last_not_of(ws);
        s.erase(end == std::string::npos ? 0 : end + 1);
        return s;
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("configuration line is not key = value: '" + line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::set<const CLI::Option*> apply_config(const std::map<std::string, std::string>& kv,
                                          const std::vector<Binding>& bindings,
                                          const CLI::App* active) {
    std::set<const CLI::Option*> applied;
    for (const auto& [key, value] : kv) {
        bool known = false;
        for (const Binding& b : bindings) {
            if (b.key != key) continue;
            known = true;
            const bool relevant = b.owner == nullptr || b.owner == active;
            // flags and environment variables have already set the option
            if (relevant && b.opt->count() == 0) {
                b.apply(value);
                applied.insert(b.opt);
            }
        }
        if (!known) throw std::invalid_argument("unknown configuration key '" + key + "'");
    }
    return applied;
}

// ---- commands

int cmd_optimize(const Options& o) {
    ProblemConfig cfg = make_config(o);
    const Variant variant = parse_variant(o.variant);
    if (o.deltas_optimize.empty()) throw std::invalid_argument("the overlap sweep is empty");

    std::vector<std::pair<double, OptimizationResult>> runs;
    SearchPolicy pol = o.policy;
    for (double delta : o.deltas_optimize) {
        cfg.delta = delta;
        OptimizationResult r = optimize(cfg, variant, pol);
        pol.extra_seeds = {r.params.values}; // warm start the neighboring overlap
        runs.emplace_back(delta, r);
    }
    cfg.delta = o.deltas_optimize.front();

    const std::vector<std::string> names = param_names(variant, cfg.J);
    std::vector<std::string> header{"delta", "rho"};
    header.insert(header.end(), names.begin(), names.end());
    header.insert(header.end(), {"equiosc_residual", "evaluations", "converged"});

    std::vector<std::vector<std::string>> text_rows, csv_rows;
    json results = json::array();
    bool all_converged = true;
    for (const auto& [delta, r] : runs) {
        all_converged = all_converged && r.converged;
        json row = report::to_json(r);
        row["delta"] = delta;
        results.push_back(row);

        std::vector<std::string> text{fmt6(delta), fmt6(r.rho_star)};
        std::vector<std::string> csv{report::g17(delta), report::g17(r.rho_star)};
        for (double p : r.params.values) {
            text.push_back(fmt6(p));
            csv.push_back(report::g17(p));
        }
        text.insert(text.end(), {fmt6(r.equioscillation_residual), std::to_string(r.evaluations),
                                 r.converged ? "yes" : "no"});
        csv.insert(csv.end(), {report::g17(r.equioscillation_residual),
                               std::to_string(r.evaluations), r.converged ? "1" : "0"});
        text_rows.push_back(std::move(text));
        csv_rows.push_back(std::move(csv));
    }

    std::cout << report::render_table(header, text_rows);
    if (!o.json_path.empty()) {
        json doc{{"command", "optimize"},
                 {"config", report::to_json(cfg)},
                 {"deltas", o.deltas_optimize},
                 {"policy", report::to_json(o.policy)},
                 {"results", results},
                 {"schema_version", report::schema_version},
                 {"variant", variant_name(variant)}};
        write_file(o.json_path, doc.dump(2) + "\n");
    }
    if (!o.csv_path.empty()) {
        std::string csv = report::csv_line(header);
        for (const auto& row : csv_rows) csv += report::csv_line(row);
        write_file(o.csv_path, csv);
    }
    if (!all_converged) {
        std::cerr << "optimization did not converge within the evaluation budget\n";
        return 1;
    }
    return 0;
}

int cmd_asymptotics(const Options& o) {
    ProblemConfig cfg = make_config(o);
    const Variant variant = parse_variant(o.variant);
    if (o.deltas_asymptotics.empty()) throw std::invalid_argument("the overlap sweep is empty");

    json constants{{"many_sub", constant_many_sub(cfg)},
                   {"three_sub_dirichlet", constant_three_sub_dirichlet(cfg)},
                   {"two_sub_dirichlet", constant_two_sub_dirichlet(cfg)}};
    if (cfg.outer.kind == OuterBC::Kind::robin)
        constants["two_sub_robin"] = constant_two_sub_robin(cfg);

    // the prediction constant and prefactor convention match the
    // decomposition: 2 or 3 subdomains use their own constants and the
    // two-subdomain prefactors, more subdomains use the limiting-spectrum C
    double C = 0.0;
    if (cfg.J == 2)
        C = cfg.outer.kind == OuterBC::Kind::robin ? constant_two_sub_robin(cfg)
                                                   : constant_two_sub_dirichlet(cfg);
    else if (cfg.J == 3)
        C = cfg.outer.kind == OuterBC::Kind::dirichlet ? constant_three_sub_dirichlet(cfg)
                                                       : three_sub_constant_solve(cfg, o.policy);
    else
        C = constant_many_sub(cfg);
    const Convention conv = cfg.J <= 3 ? Convention::two_sub : Convention::many_sub;

    std::vector<std::string> header{"delta"};
    const bool uniform = variant == Variant::uniform;
    if (uniform)
        header.insert(header.end(), {"predicted_p", "predicted_rho", "optimized_p", "optimized_rho"});
    else {
        header.insert(header.end(), {"predicted_p_minus", "predicted_p_plus", "predicted_rho"});
        for (const std::string& n : param_names(variant, cfg.J)) header.push_back("optimized_" + n);
        header.push_back("optimized_rho");
    }

    json results = json::array();
    std::vector<std::vector<std::string>> text_rows, csv_rows;
    std::vector<std::pair<double, double>> rho_samples;
    std::vector<std::vector<std::pair<double, double>>> p_samples;
    bool all_converged = true;

    SearchPolicy pol = o.policy;
    for (double delta : o.deltas_asymptotics) {
        cfg.delta = delta;
        OptimizationResult r = optimize(cfg, variant, pol);
        pol.extra_seeds = {r.params.values};
        all_converged = all_converged && r.converged;

        json row{{"delta", delta},
                 {"optimized_p", r.params.values},
                 {"optimized_rho", r.rho_star},
                 {"converged", r.converged}};
        std::vector<std::string> text{fmt6(delta)}, csv{report::g17(delta)};
        if (uniform) {
            OneParamPrediction pred = predict_one_param(C, delta);
            row["predicted_p"] = pred.p;
            row["predicted_rho"] = pred.rho;
            for (double v : {pred.p, pred.rho, r.params.values[0], r.rho_star}) {
                text.push_back(fmt6(v));
                csv.push_back(report::g17(v));
            }
        } else {
            TwoParamPrediction pred = predict_two_param(C, delta, conv);
            row["predicted_p"] = std::vector<double>{pred.p_minus, pred.p_plus};
            row["predicted_rho"] = pred.rho;
            std::vector<double> cells{pred.p_minus, pred.p_plus, pred.rho};
            cells.insert(cells.end(), r.params.values.begin(), r.params.values.end());
            cells.push_back(r.rho_star);
            for (double v : cells) {
                text.push_back(fmt6(v));
                csv.push_back(report::g17(v));
            }
        }
        results.push_back(row);
        text_rows.push_back(std::move(text));
        csv_rows.push_back(std::move(csv));

        rho_samples.emplace_back(delta, 1.0 - r.rho_star);
        p_samples.resize(r.params.values.size());
        for (std::size_t i = 0; i < r.params.values.size(); ++i)
            p_samples[i].emplace_back(delta, r.params.values[i]);
    }
    cfg.delta = o.deltas_asymptotics.front();

    json fits;
    try {
        fits["one_minus_rho"] = fit_power_law(rho_samples).exponent;
        if (uniform) fits["p"] = fit_power_law(p_samples[0]).exponent;
        if (variant == Variant::two_sided) {
            fits["p_minus"] = fit_power_law(p_samples[0]).exponent;
            fits["p_plus"] = fit_power_law(p_samples[1]).exponent;
        }
    } catch (const DegenerateFit&) {
        fits = json(); // sweep too narrow to fit
    } catch (const std::invalid_argument&) {
        fits = json();
    }

    std::cout << report::render_table(header, text_rows);
    if (!fits.is_null())
        std::cout << "fitted exponents: " << fits.dump() << "\n";

    if (!o.json_path.empty()) {
        json doc{{"command", "asymptotics"},
                 {"config", report::to_json(cfg)},
                 {"constant", C},
                 {"constants", constants},
                 {"deltas", o.deltas_asymptotics},
                 {"fits", fits},
                 {"policy", report::to_json(o.policy)},
                 {"results", results},
                 {"schema_version", report::schema_version},
                 {"variant", variant_name(variant)}};
        write_file(o.json_path, doc.dump(2) + "\n");
    }
    if (!o.csv_path.empty()) {
        std::string csv = report::csv_line(header);
        for (const auto& row : csv_rows) csv += report::csv_line(row);
        write_file(o.csv_path, csv);
    }
    if (!all_converged) {
        std::cerr << "optimization did not converge within the evaluation budget\n";
        return 1;
    }
    return 0;
}

int cmd_simulate(const Options& o, bool p_given, bool params_given) {
    ProblemConfig cfg = make_config(o);
    const Variant variant = parse_variant(o.variant);

    TransmissionParams params;
    if (params_given) {
        params = TransmissionParams{variant, o.params_list};
    } else if (p_given) {
        params = TransmissionParams::uniform(o.p_value);
    } else {
        std::cerr << "no parameters given; optimizing the uniform parameter first\n";
        params = optimize(cfg, Variant::uniform, o.policy).params;
    }
    params.validate(cfg.J);

    DiscretizedOSM mesh = discretize(cfg, params, o.h);
    SimulatorReport rep = run_osm(mesh, o.iterations, o.sim_seed);

    std::vector<ModeRate> rates;
    if (!o.modes.empty()) rates = modewise_rates(mesh, o.modes);

    std::cout << "measured contraction  " << fmt6(rep.measured_rate) << "\n"
              << "predicted (max mode)  " << fmt6(rep.predicted_rate) << "\n"
              << "relative gap          " << fmt6(rep.relative_gap) << "\n";
    if (!rates.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const ModeRate& r : rates)
            rows.push_back({fmt6(r.k), fmt6(r.measured), fmt6(r.predicted)});
        std::cout << report::render_table({"k", "measured", "predicted"}, rows);
    }

    if (!o.json_path.empty()) {
        json doc{{"command", "simulate"},
                 {"config", report::to_json(cfg)},
                 {"h", o.h},
                 {"iterations", o.iterations},
                 {"params", report::to_json(params)},
                 {"report", report::to_json(rep)},
                 {"schema_version", report::schema_version},
                 {"seed", o.sim_seed}};
        if (!rates.empty()) doc["modes"] = report::to_json(rates);
        write_file(o.json_path, doc.dump(2) + "\n");
    }
    if (!o.csv_path.empty()) {
        std::string csv = report::csv_line({"iteration", "error"});
        for (std::size_t i = 0; i < rep.errors.size(); ++i)
            csv += report::csv_line({std::to_string(i + 1), report::g17(rep.errors[i])});
        write_file(o.csv_path, csv);
    }
    return 0;
}

int cmd_bound(const Options& o, bool p_given, bool pm_given, bool pp_given) {
    ProblemConfig cfg = make_config(o);
    TransmissionParams params;
    if (p_given && !(pm_given || pp_given)) {
        params = TransmissionParams::uniform(o.bound_p);
    } else if (pm_given && pp_given && !p_given) {
        params = TransmissionParams::two_sided(o.bound_pminus, o.bound_pplus);
    } else {
        throw std::invalid_argument("give either --p (uniform) or both --pminus and --pplus");
    }
    if (o.knum < 2) throw std::invalid_argument("the k sweep needs at least 2 points");

    std::vector<double> ks;
    const double lo = std::max(o.policy.k_min, 1e-3);
    if (o.policy.k_min < lo) ks.push_back(o.policy.k_min);
    for (int i = 0; i < o.knum; ++i)
        ks.push_back(std::exp(std::log(lo) + (std::log(o.kmax) - std::log(lo)) * i / (o.knum - 1)));

    json rows = json::array();
    std::vector<std::vector<std::string>> text_rows;
    std::string csv = report::csv_line({"k", "bound"});
    for (double k : ks) {
        const double b = limiting_bound(k, params, cfg);
        rows.push_back(json{{"bound", b}, {"k", k}});
        text_rows.push_back({fmt6(k), fmt6(b)});
        csv += report::csv_line({report::g17(k), report::g17(b)});
    }

    std::cout << report::render_table({"k", "bound"}, text_rows);
    if (!o.json_path.empty()) {
        json doc{{"command", "bound"},
                 {"config", report::to_json(cfg)},
                 {"params", report::to_json(params)},
                 {"rows", rows},
                 {"schema_version", report::schema_version}};
        write_file(o.json_path, doc.dump(2) + "\n");
    }
    if (!o.csv_path.empty()) write_file(o.csv_path, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Convergence factors and optimized Robin parameters for Schwarz methods on the "
                 "complex diffusion equation"};
    app.require_subcommand(1);

    std::vector<Binding> bindings;
    auto bind_double = [&](CLI::Option* opt, const CLI::App* owner, const std::string& key,
                           double* target) {
        bindings.push_back({key, owner, opt, [key, target](const std::string& s) {
                                *target = to_double(key, s);
                            }});
    };
    auto bind_int = [&](CLI::Option* opt, const CLI::App* owner, const std::string& key,
                        auto* target) {
        bindings.push_back({key, owner, opt, [key, target](const std::string& s) {
                                *target = static_cast<std::remove_pointer_t<decltype(target)>>(
                                    to_int(key, s));
                            }});
    };
    auto bind_string = [&](CLI::Option* opt, const CLI::App* owner, const std::string& key,
                           std::string* target) {
        bindings.push_back({key, owner, opt, [target](const std::string& s) { *target = s; }});
    };
    auto bind_dlist = [&](CLI::Option* opt, const CLI::App* owner, const std::string& key,
                          std::vector<double>* target) {
        bindings.push_back({key, owner, opt, [key, target](const std::string& s) {
                                target->clear();
                                for (const std::string& part : split_list(s))
                                    target->push_back(to_double(key, part));
                            }});
    };
    auto bind_ilist = [&](CLI::Option* opt, const CLI::App* owner, const std::string& key,
                          std::vector<int>* target) {
        bindings.push_back({key, owner, opt, [key, target](const std::string& s) {
                                target->clear();
                                for (const std::string& part : split_list(s))
                                    target->push_back(static_cast<int>(to_int(key, part)));
                            }});
    };

    // problem geometry and physics (global, shared by every command)
    bind_double(app.add_option("--sigma", o.sigma, "conductivity shift sigma >= 0")
                    ->envname("OSM_SIGMA"), nullptr, "sigma", &o.sigma);
    bind_double(app.add_option("--epsilon", o.epsilon, "imaginary shift epsilon > 0")
                    ->envname("OSM_EPSILON"), nullptr, "epsilon", &o.epsilon);
    bind_double(app.add_option("--L", o.L, "subdomain width")->envname("OSM_L"), nullptr, "L", &o.L);
    bind_double(app.add_option("--Lhat", o.Lhat, "domain height")->envname("OSM_LHAT"), nullptr,
                "Lhat", &o.Lhat);
    bind_double(app.add_option("--delta", o.delta, "overlap width")->envname("OSM_DELTA"), nullptr,
                "delta", &o.delta);
    bind_int(app.add_option("--J", o.J, "number of subdomains")->envname("OSM_J"), nullptr, "J",
             &o.J);
    bind_double(app.add_option("--pa", o.pa, "outer Robin parameter at the left boundary")
                    ->envname("OSM_PA"), nullptr, "pa", &o.pa);
    bind_double(app.add_option("--pb", o.pb, "outer Robin parameter at the right boundary")
                    ->envname("OSM_PB"), nullptr, "pb", &o.pb);
    bind_string(app.add_option("--outer", o.outer, "outer boundary kind: robin or dirichlet")
                    ->envname("OSM_OUTER"), nullptr, "outer", &o.outer);
    bind_string(app.add_option("--variant", o.variant,
                               "transmission parameter variant: uniform, two_sided, or full")
                    ->envname("OSM_VARIANT"), nullptr, "variant", &o.variant);

    // search policy (global)
    bind_double(app.add_option("--kmin", o.policy.k_min, "lower end of the frequency range")
                    ->envname("OSM_KMIN"), nullptr, "kmin", &o.policy.k_min);
    bind_int(app.add_option("--coarse-points", o.policy.coarse_points,
                            "coarse frequency-scan size")->envname("OSM_COARSE_POINTS"),
             nullptr, "coarse-points", &o.policy.coarse_points);
    bind_double(app.add_option("--ktol", o.policy.k_tol, "relative frequency refinement tolerance")
                    ->envname("OSM_KTOL"), nullptr, "ktol", &o.policy.k_tol);
    bind_double(app.add_option("--rho-tol", o.policy.rho_tol, "convergence tolerance on rho")
                    ->envname("OSM_RHO_TOL"), nullptr, "rho-tol", &o.policy.rho_tol);
    bind_int(app.add_option("--max-evals", o.policy.max_evals,
                            "cap on objective evaluations per optimization")
                 ->envname("OSM_MAX_EVALS"), nullptr, "max-evals", &o.policy.max_evals);
    bind_int(app.add_option("--multistarts", o.policy.multistarts, "random multistart count")
                 ->envname("OSM_MULTISTARTS"), nullptr, "multistarts", &o.policy.multistarts);
    bind_double(app.add_option("--plo", o.policy.p_lo, "lower parameter bound")->envname("OSM_PLO"),
                nullptr, "plo", &o.policy.p_lo);
    bind_double(app.add_option("--phi", o.policy.p_hi, "upper parameter bound")->envname("OSM_PHI"),
                nullptr, "phi", &o.policy.p_hi);
    bind_int(app.add_option("--seed", o.policy.seed, "seed for the random multistarts")
                 ->envname("OSM_SEED"), nullptr, "seed", &o.policy.seed);

    // outputs (global)
    bind_string(app.add_option("--json", o.json_path, "write a JSON report here")
                    ->envname("OSM_JSON"), nullptr, "json", &o.json_path);
    bind_string(app.add_option("--csv", o.csv_path, "write CSV plot data here")->envname("OSM_CSV"),
                nullptr, "csv", &o.csv_path);
    app.add_option("--config", o.config_path,
                   "key = value configuration file (precedence: file < environment < flags)");

    CLI::App* sub_optimize =
        app.add_subcommand("optimize", "minimize the worst-frequency convergence factor over the "
                                       "transmission parameters, for each overlap in a sweep");
    bind_dlist(sub_optimize->add_option("--deltas", o.deltas_optimize, "overlap sweep")
                   ->delimiter(',')
                   ->envname("OSM_DELTAS"),
               sub_optimize, "deltas", &o.deltas_optimize);

    CLI::App* sub_asym = app.add_subcommand(
        "asymptotics", "compare optimized parameters and convergence factors against the "
                       "small-overlap predictions and fit their power laws");
    bind_dlist(sub_asym->add_option("--deltas", o.deltas_asymptotics, "overlap sweep")
                   ->delimiter(',')
                   ->envname("OSM_DELTAS"),
               sub_asym, "deltas", &o.deltas_asymptotics);

    CLI::App* sub_sim = app.add_subcommand(
        "simulate", "run the finite-difference Schwarz iteration and compare the measured "
                    "contraction with the worst-mode prediction");
    // free the short help name so the mesh size can be spelled --h
    sub_sim->set_help_flag("--help", "print help and exit");
    CLI::Option* opt_h =
        sub_sim->add_option("--h", o.h, "mesh size (delta, L, Lhat must be multiples)")
            ->envname("OSM_H");
    bind_double(opt_h, sub_sim, "h", &o.h);
    bind_int(sub_sim->add_option("--iterations", o.iterations, "Schwarz iterations to run")
                 ->envname("OSM_ITERATIONS"), sub_sim, "iterations", &o.iterations);
    bind_int(sub_sim->add_option("--sim-seed", o.sim_seed, "seed for the random initial traces")
                 ->envname("OSM_SIM_SEED"), sub_sim, "sim-seed", &o.sim_seed);
    CLI::Option* opt_p = sub_sim->add_option("--p", o.p_value, "uniform Robin parameter "
                                                               "(optimized first if omitted)")
                             ->envname("OSM_P");
    bind_double(opt_p, sub_sim, "p", &o.p_value);
    CLI::Option* opt_params =
        sub_sim->add_option("--params", o.params_list, "explicit parameter list for --variant")
            ->delimiter(',')
            ->envname("OSM_PARAMS");
    bind_dlist(opt_params, sub_sim, "params", &o.params_list);
    CLI::Option* opt_modes =
        sub_sim->add_option("--modes", o.modes, "Fourier mode indices to track individually")
            ->delimiter(',')
            ->envname("OSM_MODES");
    bind_ilist(opt_modes, sub_sim, "modes", &o.modes);

    CLI::App* sub_bound = app.add_subcommand(
        "bound", "sweep the limiting-spectrum convergence-factor bound over frequency");
    CLI::Option* opt_bp =
        sub_bound->add_option("--p", o.bound_p, "uniform Robin parameter")->envname("OSM_P");
    bind_double(opt_bp, sub_bound, "p", &o.bound_p);
    CLI::Option* opt_bpm = sub_bound->add_option("--pminus", o.bound_pminus,
                                                 "two-sided minus parameter")->envname("OSM_PMINUS");
    bind_double(opt_bpm, sub_bound, "pminus", &o.bound_pminus);
    CLI::Option* opt_bpp = sub_bound->add_option("--pplus", o.bound_pplus,
                                                 "two-sided plus parameter")->envname("OSM_PPLUS");
    bind_double(opt_bpp, sub_bound, "pplus", &o.bound_pplus);
    bind_double(sub_bound->add_option("--kmax", o.kmax, "upper end of the k sweep")
                    ->envname("OSM_KMAX"), sub_bound, "kmax", &o.kmax);
    bind_int(sub_bound->add_option("--knum", o.knum, "points in the k sweep")->envname("OSM_KNUM"),
             sub_bound, "knum", &o.knum);

    for (CLI::App* sub : {sub_optimize, sub_asym, sub_sim, sub_bound}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const CLI::App* active = app.get_subcommands().front();
        std::set<const CLI::Option*> from_config;
        if (!o.config_path.empty())
            from_config = apply_config(load_config(o.config_path), bindings, active);
        auto given = [&](const CLI::Option* opt) {
            return opt->count() > 0 || from_config.count(opt) > 0;
        };

        if (active == sub_optimize) return cmd_optimize(o);
        if (active == sub_asym) return cmd_asymptotics(o);
        if (active == sub_sim) return cmd_simulate(o, given(opt_p), given(opt_params));
        return cmd_bound(o, given(opt_bp), given(opt_bpm), given(opt_bpp));
    } catch (const DivergenceDetected& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const OsmError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
