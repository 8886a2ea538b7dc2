#ifndef OSM_SPECTRAL_HPP
#define OSM_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "osm/errors.hpp"
#include "osm/problem.hpp"

namespace osm {

/** Complex square root on the branch with nonnegative real part. */
template <class Real>
std::complex<Real> branch_sqrt(std::complex<Real> z) {
    std::complex<Real> r = std::sqrt(z);
    return r.real() < Real(0) ? -r : r;
}

/** lambda(k) = sqrt(k^2 + sigma - i epsilon), Re lambda > 0. */
template <class Real>
std::complex<Real> lambda_of(Real k, Real sigma, Real epsilon) {
    return branch_sqrt(std::complex<Real>(k * k + sigma, -epsilon));
}

inline Symbol symbol_of(double k, const ProblemConfig& cfg) {
    return {lambda_of(k, cfg.sigma, cfg.epsilon), lambda_of(0.0, cfg.sigma, cfg.epsilon)};
}

namespace detail {

/** (lambda + p), with the Dirichlet limit homogenized to 1: ratios of the
 * transmission coefficients stay finite as p -> infinity after dividing
 * numerator and denominator by p. */
inline cd fp(cd l, RobinParam P) { return P.infinite ? cd(1.0) : l + P.p; }

/** (lambda - p), homogenized to -1 in the Dirichlet limit. */
inline cd fm(cd l, RobinParam P) { return P.infinite ? cd(-1.0) : l - P.p; }

/** Local-solve denominator rescaled by e^{-lambda(L+delta)} so only decaying
 * exponentials appear (the naive form overflows once Re(lambda)(L+delta)
 * exceeds ~700). Throws if the two terms cancel to roundoff. */
inline cd denom(cd l, double L, double d, RobinParam Pp, RobinParam Pm) {
    cd E = std::exp(-2.0 * l * (L + d));
    cd a = fp(l, Pp) * fp(l, Pm);
    cd D = a - fm(l, Pp) * fm(l, Pm) * E;
    if (std::abs(D) <= 1e-14 * std::abs(a))
        throw DenominatorUnderflow("transmission denominator vanished to roundoff at lambda = (" +
                                   std::to_string(l.real()) + ", " + std::to_string(l.imag()) + ")");
    return D;
}

} // namespace detail

/** The four trace-update coefficients attached to interface index j.
 *
 * The substructured iteration advances the Robin traces
 *   R_-(a_j): datum entering subdomain j at its left end, produced by
 *             subdomain j-1, with update coefficients (alpha_minus on
 *             R_-(a_{j-1}), beta_minus on R_+(b_{j-1}));
 *   R_+(b_j): datum entering subdomain j at its right end, produced by
 *             subdomain j+1, with coefficients (beta_plus on R_-(a_{j+1}),
 *             alpha_plus on R_+(b_{j+1})).
 *
 * The minus pair exists for 2 <= j <= J, the plus pair for 1 <= j <= J-1;
 * pairs outside their range are returned as zero. */
struct InterfaceCoeffs {
    cd alpha_minus{0.0};
    cd beta_minus{0.0};
    cd alpha_plus{0.0};
    cd beta_plus{0.0};
};

inline InterfaceCoeffs interface_coeffs(int j, double k, const TransmissionParams& params,
                                        const ProblemConfig& cfg) {
    using detail::fp;
    using detail::fm;
    if (j < 1 || j > cfg.J) throw std::invalid_argument("interface index out of range");
    const cd l = symbol_of(k, cfg).lambda;
    const double L = cfg.L, d = cfg.delta;
    const cd eL = std::exp(-l * L);
    const cd ed = std::exp(-l * d);
    const cd eL2d = std::exp(-l * (L + 2 * d));
    const cd e2Ld = std::exp(-l * (2 * L + d));

    InterfaceCoeffs c;
    if (j >= 2) {
        // produced by subdomain j-1: denominator carries its parameters
        RobinParam pm_prev = params.p_minus(j - 1, cfg);
        RobinParam pp_prev = params.p_plus(j - 1, cfg);
        RobinParam pm_j = params.p_minus(j, cfg);
        cd D = detail::denom(l, L, d, pp_prev, pm_prev);
        // the alpha numerator has no p_{j-1}^- factor, so the Dirichlet
        // rescaling of the denominator sends the ratio to zero
        c.alpha_minus = pm_prev.infinite
                            ? cd(0.0)
                            : (fp(l, pp_prev) * fp(l, pm_j) * eL - fm(l, pp_prev) * fm(l, pm_j) * eL2d) / D;
        c.beta_minus = (fp(l, pm_j) * fm(l, pm_prev) * e2Ld - fm(l, pm_j) * fp(l, pm_prev) * ed) / D;
    }
    if (j <= cfg.J - 1) {
        // produced by subdomain j+1
        RobinParam pm_next = params.p_minus(j + 1, cfg);
        RobinParam pp_next = params.p_plus(j + 1, cfg);
        RobinParam pp_j = params.p_plus(j, cfg);
        cd D = detail::denom(l, L, d, pp_next, pm_next);
        c.alpha_plus = pp_next.infinite
                           ? cd(0.0)
                           : (fp(l, pm_next) * fp(l, pp_j) * eL - fm(l, pm_next) * fm(l, pp_j) * eL2d) / D;
        c.beta_plus = (fp(l, pp_j) * fm(l, pp_next) * e2Ld - fm(l, pp_j) * fp(l, pp_next) * ed) / D;
    }
    return c;
}

/** Dense substructured iteration matrix acting on the trace vector
 * (R_+(b_1), R_-(a_2), R_+(b_2), ..., R_-(a_J)); the identically-zero outer
 * traces R_-(a_1), R_+(b_J) are eliminated, giving dimension 2(J-1). */
struct IterationMatrix {
    double k = 0.0;
    Eigen::MatrixXcd entries;
};

inline IterationMatrix assemble_T(double k, const TransmissionParams& params,
                                  const ProblemConfig& cfg) {
    const int J = cfg.J;
    const int n = 2 * (J - 1);
    IterationMatrix T{k, Eigen::MatrixXcd::Zero(n, n)};
    auto idx_m = [](int j) { return 2 * j - 3; }; // R_-(a_j), j = 2..J
    auto idx_p = [](int j) { return 2 * j - 2; }; // R_+(b_j), j = 1..J-1
    for (int j = 2; j <= J; ++j) {
        InterfaceCoeffs c = interface_coeffs(j, k, params, cfg);
        int r = idx_m(j);
        if (j - 1 >= 2) T.entries(r, idx_m(j - 1)) = c.alpha_minus;
        T.entries(r, idx_p(j - 1)) = c.beta_minus;
    }
    for (int j = 1; j <= J - 1; ++j) {
        InterfaceCoeffs c = interface_coeffs(j, k, params, cfg);
        int r = idx_p(j);
        T.entries(r, idx_m(j + 1)) = c.beta_plus;
        if (j + 1 <= J - 1) T.entries(r, idx_p(j + 1)) = c.alpha_plus;
    }
    return T;
}

/** Spectral radius of a dense complex matrix (or matrix expression) via a
 * full complex Schur decomposition. */
template <class Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real
spectral_radius(const Eigen::MatrixBase<Derived>& T) {
    using Matrix = typename Derived::PlainObject;
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    Matrix M = T.derived();
    if (M.rows() != M.cols()) throw std::invalid_argument("spectral_radius needs a square matrix");
    // Normalize to unit maximum entry: the QR iteration's shift arithmetic
    // underflows on matrices whose entries sit near the denormal range
    // (routine here, since the couplings decay like exp(-2 k delta)).
    const Real scale = M.cwiseAbs().maxCoeff();
    if (!(scale > Real(0))) return Real(0);
    if (!std::isfinite(static_cast<double>(scale)))
        throw NonConvergence("iteration matrix has non-finite entries");
    // Multiply by a real reciprocal rather than dividing: scalar division of
    // a complex matrix takes the complex-division path, whose |denominator|^2
    // underflows for tiny scales and fills the matrix with NaNs. The floor
    // keeps the reciprocal finite even for a denormal maximum entry.
    const Real floor = std::numeric_limits<Real>::min() / std::numeric_limits<Real>::epsilon();
    const Real inv = Real(1) / std::max(scale, floor);
    M *= inv;
    Eigen::ComplexEigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NonConvergence("eigenvalue iteration failed on a " + std::to_string(M.rows()) +
                             "x" + std::to_string(M.cols()) + " matrix");
    return es.eigenvalues().cwiseAbs().maxCoeff() / inv;
}

inline double spectral_radius(const IterationMatrix& T) { return spectral_radius(T.entries); }

/** Two-subdomain convergence factor sqrt(|beta_1^+ beta_2^-|) in closed form. */
inline double rho_two_closed(double k, const TransmissionParams& params, const ProblemConfig& cfg) {
    if (cfg.J != 2) throw std::invalid_argument("rho_two_closed requires J = 2");
    cd b1p = interface_coeffs(1, k, params, cfg).beta_plus;
    cd b2m = interface_coeffs(2, k, params, cfg).beta_minus;
    return std::sqrt(std::abs(b1p * b2m));
}

/** Three-subdomain convergence factor from the biquadratic characteristic
 * polynomial: mu^2 = (m_1 +- sqrt(m_2))/2 with principal complex roots. */
inline double rho_three_closed(double k, const TransmissionParams& params, const ProblemConfig& cfg) {
    if (cfg.J != 3) throw std::invalid_argument("rho_three_closed requires J = 3");
    InterfaceCoeffs c1 = interface_coeffs(1, k, params, cfg);
    InterfaceCoeffs c2 = interface_coeffs(2, k, params, cfg);
    InterfaceCoeffs c3 = interface_coeffs(3, k, params, cfg);
    cd m1 = c2.beta_minus * c1.beta_plus + c3.beta_minus * c2.beta_plus;
    cd diff = c2.beta_minus * c1.beta_plus - c3.beta_minus * c2.beta_plus;
    cd m2 = 4.0 * c3.alpha_minus * c2.beta_minus * c1.alpha_plus * c2.beta_plus + diff * diff;
    cd root = std::sqrt(m2);
    double mu1 = std::abs((m1 + root) / 2.0);
    double mu2 = std::abs((m1 - root) / 2.0);
    return std::sqrt(std::max(mu1, mu2));
}

/** rho(k) = spectral radius of T(k), via the closed forms when available. */
inline double rho_at(double k, const TransmissionParams& params, const ProblemConfig& cfg) {
    if (cfg.J == 2) return rho_two_closed(k, params, cfg);
    if (cfg.J == 3) return rho_three_closed(k, params, cfg);
    return spectral_radius(assemble_T(k, params, cfg));
}

} // namespace osm

#endif
