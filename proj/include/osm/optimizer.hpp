#ifndef OSM_OPTIMIZER_HPP
#define OSM_OPTIMIZER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "osm/problem.hpp"

namespace osm {

/** Knobs for the nested min-max search. Defaults reproduce the reference
 * tables; tests tighten or cripple them deliberately. */
struct SearchPolicy {
    /** Points in the coarse log-spaced scan of rho(k) over [k_min, 1e6]. */
    int coarse_points = 96;
    /** Relative tolerance on k for golden-section refinement of each local
     * maximum (the search runs in log k, so this is relative). */
    double k_tol = 1e-10;
    /** Random multistarts added on top of the deterministic seed list. */
    int multistarts = 8;
    /** Parameter box: every Robin parameter is optimized inside
     * [p_lo, p_hi] in log space. */
    double p_lo = 1e-3;
    double p_hi = 1e6;
    /** Convergence tolerance on the min-max value rho_star. */
    double rho_tol = 1e-8;
    /** Global cap on objective (rho_max) evaluations per optimize() call;
     * exhausting it yields converged = false. */
    long max_evals = 2'000'000;
    /** Lower end of the frequency range (0, or pi/Lhat for the discrete
     * lowest mode). */
    double k_min = 0.0;
    /** Seed for the random multistarts. */
    std::uint64_t seed = 20240601;
    /** Caller-provided warm starts (e.g. the optimum of a neighboring
     * overlap width during a sweep); each must match the variant's layout. */
    std::vector<std::vector<double>> extra_seeds;
};

/** A local maximum of k -> rho(k). */
struct KRho {
    double k = 0.0;
    double rho = 0.0;
};

struct RhoMaxResult {
    double rho_star = 0.0;
    /** All local maxima found, sorted by k; k_min counts as a candidate. */
    std::vector<KRho> maxima;
};

/** Global maximum of rho(k) over k in [k_min, infinity): coarse log-spaced
 * scan plus golden-section refinement of each bracketed local maximum.
 * Requires delta > 0 so the overlap damps high frequencies and the
 * supremum is attained. */
RhoMaxResult rho_max(const TransmissionParams& params, const ProblemConfig& cfg, double k_min,
                     const SearchPolicy& search);

struct OptimizationResult {
    TransmissionParams params;
    double rho_star = 1.0;
    /** Local maxima of rho(k) at the returned parameters. */
    std::vector<KRho> maxima;
    /** Max pairwise rho difference among the active maxima; NaN when fewer
     * maxima exist than the variant's equioscillation theory predicts. */
    double equioscillation_residual = 0.0;
    /** Objective (rho_max) evaluations spent, including nested seeding runs. */
    long evaluations = 0;
    /** False when the evaluation budget ran out before the tolerances held. */
    bool converged = false;
};

/** Minimizes max_k rho(T(k, p)) over the variant's parameter set:
 * derivative-free search in log-parameter space (golden section for the
 * single uniform parameter, multistart Nelder-Mead plus compass polish
 * otherwise), seeded with the asymptotic predictions and the optima of the
 * poorer variants so the richer variant never does worse. */
OptimizationResult optimize(const ProblemConfig& cfg, Variant variant,
                            const SearchPolicy& policy = {});

/** Equioscillation residual = max |rho(k_i) - rho(k_j)| over the active
 * maxima (uniform: {k_min, k*}; two-sided: {k_min, k_1*, k_2*}). Throws
 * TooFewMaxima when the solution has fewer maxima than the variant's
 * theory predicts. */
double equioscillation_check(const OptimizationResult& result);

/** Exhaustive minimizer of rho_max over an explicit list of parameter
 * vectors (each entry laid out like TransmissionParams::values for the
 * variant). Test oracle only. */
OptimizationResult brute_force_minmax(const ProblemConfig& cfg, Variant variant,
                                      const std::vector<std::vector<double>>& param_grid,
                                      const SearchPolicy& policy = {});

} // namespace osm

#endif
