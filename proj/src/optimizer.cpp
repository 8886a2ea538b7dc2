#include "osm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "osm/asymptotics.hpp"
#include "osm/errors.hpp"
#include "osm/spectral.hpp"

namespace osm {

namespace {

constexpr double golden_ratio = 0.6180339887498949; // (sqrt(5)-1)/2

/** Golden-section maximization of rho over log k in [a, b] (a > 0). */
KRho refine_max(const TransmissionParams& params, const ProblemConfig& cfg, double a, double b,
                double tol) {
    double la = std::log(std::max(a, 1e-12));
    double lb = std::log(b);
    double c = lb - golden_ratio * (lb - la);
    double d = la + golden_ratio * (lb - la);
    double fc = rho_at(std::exp(c), params, cfg);
    double fd = rho_at(std::exp(d), params, cfg);
    while (lb - la > tol) {
        if (fc < fd) {
            la = c;
            c = d;
            fc = fd;
            d = la + golden_ratio * (lb - la);
            fd = rho_at(std::exp(d), params, cfg);
        } else {
            lb = d;
            d = c;
            fd = fc;
            c = lb - golden_ratio * (lb - la);
            fc = rho_at(std::exp(c), params, cfg);
        }
    }
    double km = std::exp(0.5 * (la + lb));
    return {km, rho_at(km, params, cfg)};
}

} // namespace

RhoMaxResult rho_max(const TransmissionParams& params, const ProblemConfig& cfg, double k_min,
                     const SearchPolicy& search) {
    if (!(cfg.delta > 0))
        throw std::invalid_argument("rho_max requires delta > 0 (the supremum over k is "
                                    "attained only with overlap damping)");
    if (search.coarse_points < 2) throw std::invalid_argument("coarse grid needs >= 2 points");
    if (!(search.k_tol > 0)) throw std::invalid_argument("k tolerance must be positive");
    const double k_max = 1e6;
    const double lo = std::max(k_min, 1e-3);

    std::vector<double> ks;
    if (k_min < lo) ks.push_back(k_min);
    const int n = search.coarse_points;
    const double lla = std::log(lo), llb = std::log(k_max);
    for (int i = 0; i < n; ++i) ks.push_back(std::exp(lla + (llb - lla) * i / (n - 1)));

    std::vector<double> vals(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) vals[i] = rho_at(ks[i], params, cfg);

    std::vector<KRho> maxima;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        // rho underflows to an exact-zero plateau at extreme frequencies;
        // ties inside that plateau are not peaks
        if (!(vals[i] > 0)) continue;
        if (i == 0) {
            if (vals[0] >= vals[1]) maxima.push_back({ks[0], vals[0]});
        } else if (i + 1 == ks.size()) {
            if (vals[i] > vals[i - 1]) maxima.push_back({ks[i], vals[i]});
        } else if (vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1]) {
            maxima.push_back(refine_max(params, cfg, ks[i - 1], ks[i + 1], search.k_tol));
        }
    }
    std::sort(maxima.begin(), maxima.end(), [](const KRho& x, const KRho& y) { return x.k < y.k; });

    // adjacent brackets can refine to the same peak; keep the higher value
    std::vector<KRho> merged;
    for (const KRho& m : maxima) {
        bool same = false;
        if (!merged.empty()) {
            const KRho& last = merged.back();
            if (m.k <= 0 || last.k <= 0)
                same = m.k == last.k;
            else
                same = std::abs(std::log(m.k / last.k)) < 1e-5;
        }
        if (same) {
            if (m.rho > merged.back().rho) merged.back() = m;
        } else {
            merged.push_back(m);
        }
    }

    RhoMaxResult result;
    result.rho_star = 0.0;
    for (const KRho& m : merged) result.rho_star = std::max(result.rho_star, m.rho);
    // refinement near the decay shoulder can return vanishing peaks; they
    // carry no information about the active set of the min-max problem
    for (const KRho& m : merged)
        if (m.rho > result.rho_star * 1e-9) result.maxima.push_back(m);
    return result;
}

namespace {

struct BudgetExhausted {};

/** Counts rho_max evaluations against the policy cap. */
struct Objective {
    const ProblemConfig& cfg;
    Variant variant;
    SearchPolicy inner; // cheaper settings used during search
    long cap;
    long used = 0;

    double operator()(const std::vector<double>& values) {
        if (used >= cap) throw BudgetExhausted{};
        ++used;
        TransmissionParams p{variant, values};
        double f = rho_max(p, cfg, inner.k_min, inner).rho_star;
        return std::isfinite(f) ? f : 1e300;
    }
};

std::vector<double> to_log(const std::vector<double>& p) {
    std::vector<double> x(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) x[i] = std::log(p[i]);
    return x;
}

std::vector<double> from_log(const std::vector<double>& x, double lo, double hi) {
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        p[i] = std::clamp(std::exp(x[i]), lo, hi);
    return p;
}

struct RunResult {
    std::vector<double> values; // raw parameters
    double f = std::numeric_limits<double>::infinity();
};

bool better(const RunResult& a, const RunResult& b) {
    if (a.f != b.f) return a.f < b.f;
    return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(),
                                        b.values.end());
}

/** Nelder-Mead in log-parameter space with the dimension-adaptive
 * expansion/contraction/shrink coefficients. Returns the best point
 * evaluated (never worse than the start). */
RunResult nelder_mead(Objective& obj, const std::vector<double>& start, double step, long budget,
                      double fatol, double xatol, double lo, double hi) {
    const std::size_t d = start.size();
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / double(d);
    const double gamma = 0.75 - 0.5 / double(d);
    const double shrink = 1.0 - 1.0 / double(d);

    long used = 0;
    auto feval = [&](const std::vector<double>& x) {
        ++used;
        return obj(from_log(x, lo, hi));
    };

    std::vector<std::vector<double>> xs(d + 1, to_log(start));
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += step;
    for (std::size_t i = 0; i <= d; ++i) fs[i] = feval(xs[i]);

    RunResult best;
    auto remember = [&](const std::vector<double>& x, double f) {
        if (f < best.f) {
            best.f = f;
            best.values = from_log(x, lo, hi);
        }
    };
    for (std::size_t i = 0; i <= d; ++i) remember(xs[i], fs[i]);

    std::vector<std::size_t> order(d + 1);
    while (used + 2 <= budget) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t ib = order[0], iw = order[d], is = order[d - 1];

        double spread = fs[iw] - fs[ib];
        double diam = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t c = 0; c < d; ++c)
                diam = std::max(diam, std::abs(xs[i][c] - xs[ib][c]));
        if (spread < fatol || diam < xatol) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != iw)
                for (std::size_t c = 0; c < d; ++c) centroid[c] += xs[i][c];
        for (std::size_t c = 0; c < d; ++c) centroid[c] /= double(d);

        auto blend = [&](double t) {
            std::vector<double> x(d);
            for (std::size_t c = 0; c < d; ++c) x[c] = centroid[c] + t * (centroid[c] - xs[iw][c]);
            return x;
        };

        std::vector<double> xr = blend(alpha);
        double fr = feval(xr);
        remember(xr, fr);
        if (fr < fs[ib]) {
            std::vector<double> xe = blend(alpha * beta);
            double fe = feval(xe);
            remember(xe, fe);
            if (fe < fr) {
                xs[iw] = xe;
                fs[iw] = fe;
            } else {
                xs[iw] = xr;
                fs[iw] = fr;
            }
        } else if (fr < fs[is]) {
            xs[iw] = xr;
            fs[iw] = fr;
        } else {
            bool outside = fr < fs[iw];
            std::vector<double> xc = blend(outside ? gamma * alpha : -gamma);
            double fc = feval(xc);
            remember(xc, fc);
            if (fc < (outside ? fr : fs[iw])) {
                xs[iw] = xc;
                fs[iw] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == ib) continue;
                    for (std::size_t c = 0; c < d; ++c)
                        xs[i][c] = xs[ib][c] + shrink * (xs[i][c] - xs[ib][c]);
                    if (used + 1 > budget) return best;
                    fs[i] = feval(xs[i]);
                    remember(xs[i], fs[i]);
                }
            }
        }
    }
    return best;
}

/** First-improvement coordinate search with a shrinking step, used to
 * tighten (or escape a collapsed simplex at) a candidate optimum. */
RunResult compass_polish(Objective& obj, RunResult start, double step0, double step_min,
                         long budget, double lo, double hi) {
    RunResult best = std::move(start);
    std::vector<double> x = to_log(best.values);
    double step = step0;
    long used = 0;
    while (step > step_min && used + 2 <= budget) {
        bool improved = false;
        for (std::size_t c = 0; c < x.size() && used + 2 <= budget; ++c) {
            for (double sgn : {+1.0, -1.0}) {
                std::vector<double> xt = x;
                xt[c] += sgn * step;
                ++used;
                double ft = obj(from_log(xt, lo, hi));
                if (ft < best.f) {
                    best.f = ft;
                    best.values = from_log(xt, lo, hi);
                    x = xt;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

/** Deterministic asymptotic-prediction seeds for the variant, laid out in
 * the variant's parameter ordering. */
std::vector<std::vector<double>> asymptotic_seeds(const ProblemConfig& cfg, Variant variant) {
    std::vector<double> Cs{constant_many_sub(cfg), constant_two_sub_dirichlet(cfg),
                           constant_three_sub_dirichlet(cfg)};
    if (cfg.outer.kind == OuterBC::Kind::robin) Cs.push_back(constant_two_sub_robin(cfg));

    std::vector<std::vector<double>> seeds;
    if (variant == Variant::uniform) {
        for (double C : Cs) seeds.push_back({predict_one_param(C, cfg.delta).p});
    } else {
        for (double C : Cs)
            for (Convention conv : {Convention::two_sub, Convention::many_sub}) {
                TwoParamPrediction t = predict_two_param(C, cfg.delta, conv);
                if (variant == Variant::two_sided) {
                    seeds.push_back({t.p_minus, t.p_plus});
                } else {
                    std::vector<double> v(2 * (cfg.J - 1));
                    for (std::size_t i = 0; i < v.size(); ++i)
                        v[i] = (i % 2 == 0) ? t.p_plus : t.p_minus;
                    seeds.push_back(v);
                }
            }
    }
    return seeds;
}

void clamp_to_box(std::vector<double>& v, double lo, double hi) {
    for (double& p : v) p = std::clamp(p, lo, hi);
}

} // namespace

double equioscillation_check(const OptimizationResult& result) {
    const int need = result.params.variant == Variant::two_sided ? 3 : 2;
    if (static_cast<int>(result.maxima.size()) < need)
        throw TooFewMaxima("found " + std::to_string(result.maxima.size()) + " maxima where the " +
                           variant_name(result.params.variant) + " variant equioscillates over " +
                           std::to_string(need));
    std::vector<double> rhos;
    rhos.reserve(result.maxima.size());
    for (const KRho& m : result.maxima) rhos.push_back(m.rho);
    std::sort(rhos.begin(), rhos.end(), std::greater<>());
    return rhos[0] - rhos[need - 1];
}

namespace {

/** Final fine-precision evaluation and residual bookkeeping. */
OptimizationResult finish(const ProblemConfig& cfg, Variant variant, std::vector<double> values,
                          const SearchPolicy& policy, long evaluations, bool converged) {
    OptimizationResult result;
    result.params = TransmissionParams{variant, std::move(values)};
    RhoMaxResult rm = rho_max(result.params, cfg, policy.k_min, policy);
    result.rho_star = rm.rho_star;
    result.maxima = std::move(rm.maxima);
    result.evaluations = evaluations;
    result.converged = converged;
    try {
        result.equioscillation_residual = equioscillation_check(result);
    } catch (const TooFewMaxima&) {
        result.equioscillation_residual = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

} // namespace

OptimizationResult optimize(const ProblemConfig& cfg, Variant variant, const SearchPolicy& policy) {
    cfg.validate();
    if (!(cfg.delta > 0)) throw std::invalid_argument("optimize requires delta > 0");
    if (!(policy.p_lo > 0 && policy.p_hi > policy.p_lo))
        throw std::invalid_argument("parameter box must satisfy 0 < p_lo < p_hi");

    const double lo = policy.p_lo, hi = policy.p_hi;
    const std::size_t dim = TransmissionParams{variant, {}}.expected_size(cfg.J);

    // cheaper inner settings during the search; the winner is re-polished
    // and reported at the policy's full precision
    SearchPolicy inner = policy;
    inner.coarse_points = std::min(policy.coarse_points, 64);
    inner.k_tol = std::max(policy.k_tol, 1e-6);

    Objective obj{cfg, variant, inner, policy.max_evals};
    long child_evals = 0;
    bool child_converged = true;

    // deterministic seed list: asymptotic predictions, the poorer variant's
    // optimum (which richer parameter sets must not lose to), warm starts
    std::vector<std::vector<double>> seeds = asymptotic_seeds(cfg, variant);
    SearchPolicy child_policy = policy;
    child_policy.extra_seeds.clear();
    if (variant == Variant::two_sided) {
        OptimizationResult u = optimize(cfg, Variant::uniform, child_policy);
        child_evals += u.evaluations;
        child_converged = u.converged;
        seeds.push_back({u.params.values[0], u.params.values[0]});
    } else if (variant == Variant::full) {
        OptimizationResult t = optimize(cfg, Variant::two_sided, child_policy);
        child_evals += t.evaluations;
        child_converged = t.converged;
        std::vector<double> rep(dim), swapped(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            rep[i] = (i % 2 == 0) ? t.params.values[1] : t.params.values[0];
            swapped[i] = (i % 2 == 0) ? t.params.values[0] : t.params.values[1];
        }
        seeds.push_back(rep);
        seeds.push_back(swapped);
    }
    for (const std::vector<double>& extra : policy.extra_seeds) {
        if (extra.size() != dim)
            throw std::invalid_argument("extra seed length does not match the variant");
        seeds.push_back(extra);
    }
    for (std::vector<double>& s : seeds) clamp_to_box(s, lo, hi);
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    RunResult best;
    bool exhausted = false;

    try {
        if (variant == Variant::uniform) {
            // single parameter: log-grid scan bracketing plus golden section,
            // strictly stronger than multistart in one dimension
            std::vector<double> cand;
            const int scan = 48;
            for (int i = 0; i < scan; ++i)
                cand.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (scan - 1)));
            for (const auto& s : seeds) cand.push_back(s[0]);
            std::sort(cand.begin(), cand.end());
            cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

            std::size_t ibest = 0;
            std::vector<double> fv(cand.size());
            for (std::size_t i = 0; i < cand.size(); ++i) {
                fv[i] = obj({cand[i]});
                if (fv[i] < fv[ibest]) ibest = i;
            }
            best = {{cand[ibest]}, fv[ibest]};

            double la = std::log(cand[ibest > 0 ? ibest - 1 : 0]);
            double lb = std::log(cand[std::min(ibest + 1, cand.size() - 1)]);
            double c = lb - golden_ratio * (lb - la);
            double d = la + golden_ratio * (lb - la);
            double fc = obj({std::exp(c)});
            double fd = obj({std::exp(d)});
            auto keep = [&](double x, double f) {
                if (f < best.f) best = {{std::exp(x)}, f};
            };
            keep(c, fc);
            keep(d, fd);
            while (lb - la > 1e-12) {
                if (fc > fd) {
                    la = c;
                    c = d;
                    fc = fd;
                    d = la + golden_ratio * (lb - la);
                    fd = obj({std::exp(d)});
                    keep(d, fd);
                } else {
                    lb = d;
                    d = c;
                    fd = fc;
                    c = lb - golden_ratio * (lb - la);
                    fc = obj({std::exp(c)});
                    keep(c, fc);
                }
            }
        } else {
            const double fatol = policy.rho_tol * 1e-5;
            const double xatol = 1e-10;
            const long d = static_cast<long>(dim);

            // rank the deterministic seeds, then run Nelder-Mead (with one
            // restart) from the most promising ones
            std::vector<RunResult> ranked;
            for (const auto& s : seeds) ranked.push_back({s, obj(s)});
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const RunResult& a, const RunResult& b) { return a.f < b.f; });
            for (const RunResult& r : ranked)
                if (better(r, best)) best = r;

            const std::size_t nm_starts = std::min<std::size_t>(3, ranked.size());
            for (std::size_t i = 0; i < nm_starts; ++i) {
                RunResult r = nelder_mead(obj, ranked[i].values, 0.15, 400 * d, fatol, xatol, lo, hi);
                r = nelder_mead(obj, r.values, 0.05, 150 * d, fatol, xatol, lo, hi);
                if (better(r, best)) best = r;
            }

            // random log-uniform multistarts (exploration insurance)
            std::mt19937_64 eng(policy.seed);
            auto uniform01 = [&] { return (eng() >> 11) * 0x1.0p-53; };
            for (int s = 0; s < policy.multistarts; ++s) {
                std::vector<double> x0(dim);
                for (std::size_t c = 0; c < dim; ++c)
                    x0[c] = std::exp(std::log(lo) + uniform01() * (std::log(hi) - std::log(lo)));
                RunResult r = nelder_mead(obj, x0, 0.35, 150 * d, fatol, xatol, lo, hi);
                if (better(r, best)) best = r;
            }
        }

        // tighten the winner against the full-precision objective
        Objective fine{cfg, variant, policy, policy.max_evals};
        best.f = fine(best.values);
        best = compass_polish(fine, best, 0.02, 1e-11, 300 * static_cast<long>(dim), lo, hi);
        child_evals += fine.used;
    } catch (const BudgetExhausted&) {
        exhausted = true;
    }

    if (best.values.empty()) best.values = seeds.front(); // budget died before any evaluation

    return finish(cfg, variant, best.values, policy, obj.used + child_evals,
                  !exhausted && child_converged);
}

OptimizationResult brute_force_minmax(const ProblemConfig& cfg, Variant variant,
                                      const std::vector<std::vector<double>>& param_grid,
                                      const SearchPolicy& policy) {
    cfg.validate();
    if (param_grid.empty()) throw std::invalid_argument("parameter grid is empty");
    const std::size_t dim = TransmissionParams{variant, {}}.expected_size(cfg.J);

    RunResult best;
    for (const std::vector<double>& values : param_grid) {
        if (values.size() != dim)
            throw std::invalid_argument("grid entry length does not match the variant");
        TransmissionParams p{variant, values};
        p.validate(cfg.J);
        RunResult r{values, rho_max(p, cfg, policy.k_min, policy).rho_star};
        if (better(r, best)) best = r;
    }
    return finish(cfg, variant, best.values, policy, static_cast<long>(param_grid.size()), true);
}

} // namespace osm
