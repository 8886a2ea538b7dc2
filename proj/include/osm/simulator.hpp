#ifndef OSM_SIMULATOR_HPP
#define OSM_SIMULATOR_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "osm/problem.hpp"

namespace osm {

using SpMat = Eigen::SparseMatrix<cd>;

/** One strip's finite-difference system: 5-point Laplacian shifted by
 * -(sigma - i epsilon) on the interior, first-order one-sided Robin rows
 * on the left/right boundary columns (identity rows in the Dirichlet
 * case), homogeneous Dirichlet rows at y = 0, Lhat eliminated. Unknowns
 * are ordered column-major in x: r = i*ny + j for column i, interior row j. */
struct SubdomainProblem {
    int index = 1;   // subdomain number, 1-based
    int nx = 0;      // grid columns, including both boundary columns
    int ny = 0;      // interior rows: Lhat/h - 1
    double x_left = 0.0;
    double h = 0.0;
    RobinParam p_left;  // parameter in the Robin rows at x = a_j
    RobinParam p_right; // parameter in the Robin rows at x = b_j
    SpMat A;
    /** Factorization computed once at assembly and reused every iteration. */
    std::unique_ptr<Eigen::SparseLU<SpMat>> solver;
};

struct DiscretizedOSM {
    ProblemConfig cfg;
    TransmissionParams params;
    double h = 0.0;
    std::vector<SubdomainProblem> domains;
};

/** Discretizes all J strips with uniform spacing h in x and y. Throws
 * MeshMismatch unless delta/h and L/h are integers >= 1 and Lhat/h is an
 * integer >= 2. Parameter values are taken as given (not sign-checked)
 * so that divergent choices can be observed to diverge in run_osm. */
DiscretizedOSM discretize(const ProblemConfig& cfg, const TransmissionParams& params, double h);

struct SimulatorReport {
    /** Max-norm over all subdomains of the iterate, per iteration. */
    std::vector<double> errors;
    /** Geometric mean of successive error ratios over the last half of the
     * iterations still above the noise floor. */
    double measured_rate = 0.0;
    /** max_m rho(k_m) over the discrete modes k_m = m pi / Lhat,
     * m = 1 .. Lhat/h - 1. */
    double predicted_rate = 0.0;
    /** |measured - predicted| / predicted. */
    double relative_gap = 0.0;
    int iterations = 0;
};

/** Interface data for the trace vector (R_+(b_1), R_-(a_2), R_+(b_2), ...,
 * R_-(a_J)); each entry holds one value per interior y node. */
using TraceSet = std::vector<Eigen::VectorXcd>;

/** Random complex initial traces, uniform in [-1,1]^2, from a seeded
 * deterministic generator. */
TraceSet random_traces(const DiscretizedOSM& osm, std::uint64_t seed);

/** Runs the parallel Robin-exchange iteration on the homogeneous problem
 * (f = 0, zero outer data), so the iterate itself is the error. All
 * subdomains solve against the previous iteration's traces, then all
 * traces are re-extracted. Throws DivergenceDetected when the error grows
 * by more than 10x over 5 consecutive iterations. */
SimulatorReport run_osm(const DiscretizedOSM& osm, const TraceSet& initial, int iterations);

/** As above with random initial traces from the seed. */
SimulatorReport run_osm(const DiscretizedOSM& osm, int iterations, std::uint64_t seed);

struct ModeRate {
    double k = 0.0;
    double measured = 0.0;
    double predicted = 0.0;
};

/** Per-mode contraction: initial data sin(k_m y) on every interface
 * isolates mode m exactly (discrete sine modes are eigenvectors of the
 * 5-point stencil in y), measured over a short run against rho(k_m). */
std::vector<ModeRate> modewise_rates(const DiscretizedOSM& osm, const std::vector<int>& modes);

} // namespace osm

#endif
