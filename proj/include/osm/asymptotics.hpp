#ifndef OSM_ASYMPTOTICS_HPP
#define OSM_ASYMPTOTICS_HPP

#include <utility>
#include <vector>

#include "osm/optimizer.hpp"
#include "osm/problem.hpp"

namespace osm {

/** Convergence-factor constant C for two subdomains with Robin outer
 * conditions (parameters p_a, p_b from cfg.outer). */
double constant_two_sub_robin(const ProblemConfig& cfg);

/** Two-subdomain constant in the Dirichlet outer limit:
 * C = Re[ s (1 + e^{2sL}) / (e^{2sL} - 1) ]. */
double constant_two_sub_dirichlet(const ProblemConfig& cfg);

/** Three-subdomain constant under Dirichlet outer conditions:
 * C = Re[ s (e^{2sL} - e^{sL} + 1) / (e^{2sL} - 1) ]. */
double constant_three_sub_dirichlet(const ProblemConfig& cfg);

/** Constant governing the many-subdomain limiting spectrum:
 * C = Re[ s (1 - e^{-sL}) / (1 + e^{-sL}) ]. */
double constant_many_sub(const ProblemConfig& cfg);

struct OneParamPrediction {
    double p = 0.0;
    double rho = 0.0;
};

/** Asymptotically optimized uniform parameter for small overlap:
 * p = 2^{-1/3} C^{2/3} delta^{-1/3}, rho = 1 - 2 2^{1/3} C^{1/3} delta^{1/3}.
 * The same form serves 2, 3, and many subdomains with their own C. */
OneParamPrediction predict_one_param(double C, double delta);

/** The two-subdomain two-sided formulas carry 2-power prefactors that the
 * many-subdomain statement omits; both are implemented verbatim and
 * selected here. */
enum class Convention { two_sub, many_sub };

struct TwoParamPrediction {
    /** The larger parameter, scaling like delta^{-3/5} (applied on the
     * plus side of each interface). */
    double p_plus = 0.0;
    /** The smaller parameter, scaling like delta^{-1/5}. */
    double p_minus = 0.0;
    double rho = 0.0;
};

/** Asymptotically optimized two-sided parameters:
 * two_sub:  p^+ = 2^{-2/5} C^{2/5} delta^{-3/5}, p^- = 2^{-4/5} C^{4/5} delta^{-1/5},
 *           rho = 1 - 2 2^{-1/5} C^{1/5} delta^{1/5};
 * many_sub: the same powers of C and delta without the 2-power prefactors,
 *           rho = 1 - 2 C^{1/5} delta^{1/5}. */
TwoParamPrediction predict_two_param(double C, double delta, Convention convention);

struct AsymptoticFit {
    std::vector<std::pair<double, double>> samples; // (delta, value)
    double exponent = 0.0;
    double prefactor = 0.0;
};

/** Least-squares fit of log(value) against log(delta). Requires >= 3
 * samples with positive values; throws DegenerateFit when the deltas span
 * less than one decade. */
AsymptoticFit fit_power_law(const std::vector<std::pair<double, double>>& samples);

/** Inverts rho = 1 - 2 2^{1/3} C^{1/3} delta^{1/3} from optimized
 * (delta, rho) pairs: fits 1 - rho = C_R delta^{1/3} and returns
 * C = (C_R/2)^3 / 2. Throws FitRejected if the fitted exponent strays
 * from 1/3 by more than 0.05. */
double constant_from_rho_fit(const std::vector<std::pair<double, double>>& delta_rho);

/** The three-subdomain constant with Robin outer conditions, which has no
 * displayed closed form: optimizes the uniform parameter at
 * delta in {1e-3, 1e-4, 1e-5, 1e-6} (J forced to 3) and extracts C via
 * constant_from_rho_fit. */
double three_sub_constant_solve(const ProblemConfig& cfg, const SearchPolicy& policy = {});

/** Value of the limiting-spectrum bound at frequency k for uniform or
 * two-sided parameters: max over signs of |alpha -+ sqrt(beta^- beta^+)|
 * with the interface parameters also applied at the outer boundaries
 * (the Toeplitz assumption behind the limiting spectrum). */
double limiting_bound(double k, const TransmissionParams& params, const ProblemConfig& cfg);

} // namespace osm

#endif
