#include "osm/simulator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "osm/errors.hpp"
#include "osm/spectral.hpp"

namespace osm {

namespace {

constexpr double pi = 3.14159265358979323846;

/** Nearest integer n with x ~ n*h, or -1 when x/h is not near an integer. */
int cells_of(double x, double h) {
    const double q = x / h;
    const int n = static_cast<int>(std::lround(q));
    if (n < 0 || std::abs(q - n) > 1e-8 * std::max(1.0, std::abs(q))) return -1;
    return n;
}

} // namespace

DiscretizedOSM discretize(const ProblemConfig& cfg, const TransmissionParams& params, double h) {
    cfg.validate();
    if (!(h > 0)) throw std::invalid_argument("mesh size must be positive");
    if (params.values.size() != params.expected_size(cfg.J))
        throw std::invalid_argument("transmission parameter count does not match J");

    const int nd = cells_of(cfg.delta, h);
    if (nd < 1)
        throw MeshMismatch("delta = " + std::to_string(cfg.delta) +
                           " is not a positive integer multiple of h = " + std::to_string(h));
    const int nL = cells_of(cfg.L, h);
    if (nL < 1)
        throw MeshMismatch("L = " + std::to_string(cfg.L) +
                           " is not a positive integer multiple of h = " + std::to_string(h));
    const int nhat = cells_of(cfg.Lhat, h);
    if (nhat < 2)
        throw MeshMismatch("Lhat = " + std::to_string(cfg.Lhat) +
                           " is not an integer multiple >= 2 of h = " + std::to_string(h));

    DiscretizedOSM osm;
    osm.cfg = cfg;
    osm.params = params;
    osm.h = h;

    const int nx = nL + nd + 1; // columns, both boundary columns included
    const int ny = nhat - 1;    // interior rows
    const cd shift(cfg.sigma, -cfg.epsilon);
    const double ih = 1.0 / h;
    const double ih2 = ih * ih;

    for (int j = 1; j <= cfg.J; ++j) {
        SubdomainProblem sub;
        sub.index = j;
        sub.nx = nx;
        sub.ny = ny;
        sub.x_left = cfg.a(j);
        sub.h = h;
        sub.p_left = params.p_minus(j, cfg);
        sub.p_right = params.p_plus(j, cfg);

        std::vector<Eigen::Triplet<cd>> trip;
        trip.reserve(static_cast<std::size_t>(5) * nx * ny);
        auto at = [ny](int i, int row) { return i * ny + row; };
        for (int i = 0; i < nx; ++i) {
            for (int row = 0; row < ny; ++row) {
                const int r = at(i, row);
                if (i == 0 || i == nx - 1) {
                    const RobinParam p = i == 0 ? sub.p_left : sub.p_right;
                    if (p.infinite) {
                        trip.emplace_back(r, r, cd(1.0));
                    } else {
                        // one-sided first-order Robin row: the outward normal
                        // derivative plus p times the boundary value
                        const int inner = i == 0 ? at(1, row) : at(nx - 2, row);
                        trip.emplace_back(r, r, cd(ih + p.p));
                        trip.emplace_back(r, inner, cd(-ih));
                    }
                } else {
                    trip.emplace_back(r, r, cd(4.0 * ih2) + shift);
                    trip.emplace_back(r, at(i - 1, row), cd(-ih2));
                    trip.emplace_back(r, at(i + 1, row), cd(-ih2));
                    if (row > 0) trip.emplace_back(r, at(i, row - 1), cd(-ih2));
                    if (row + 1 < ny) trip.emplace_back(r, at(i, row + 1), cd(-ih2));
                }
            }
        }
        sub.A.resize(nx * ny, nx * ny);
        sub.A.setFromTriplets(trip.begin(), trip.end());
        sub.A.makeCompressed();
        sub.solver = std::make_unique<Eigen::SparseLU<SpMat>>();
        sub.solver->compute(sub.A);
        if (sub.solver->info() != Eigen::Success)
            throw OsmError("sparse factorization failed for subdomain " + std::to_string(j));
        osm.domains.push_back(std::move(sub));
    }
    return osm;
}

namespace {

int trace_index_minus(int j) { return 2 * j - 3; } // R_-(a_j), j = 2..J
int trace_index_plus(int j) { return 2 * j - 2; }  // R_+(b_j), j = 1..J-1

/** One parallel Robin-exchange sweep: solve every subdomain against the
 * current traces, then rebuild all traces from the new solutions. Returns
 * the max-norm of the new iterate. */
double osm_step(const DiscretizedOSM& osm, TraceSet& traces,
                std::vector<Eigen::VectorXcd>& solutions) {
    const int J = osm.cfg.J;
    const int ny = osm.domains.front().ny;
    const int nx = osm.domains.front().nx;
    const double ih = 1.0 / osm.h;

    double err = 0.0;
    for (int j = 1; j <= J; ++j) {
        const SubdomainProblem& sub = osm.domains[static_cast<std::size_t>(j - 1)];
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nx * ny);
        if (j > 1 && !sub.p_left.infinite)
            rhs.segment(0, ny) = traces[static_cast<std::size_t>(trace_index_minus(j))];
        if (j < J && !sub.p_right.infinite)
            rhs.segment((nx - 1) * ny, ny) = traces[static_cast<std::size_t>(trace_index_plus(j))];
        solutions[static_cast<std::size_t>(j - 1)] = sub.solver->solve(rhs);
        err = std::max(err, solutions[static_cast<std::size_t>(j - 1)].cwiseAbs().maxCoeff());
    }

    // mirror extraction: the donor-side one-sided difference is oriented
    // away from the receiver, so the two half-cell interface shifts cancel
    const int nL = nx - 1 - static_cast<int>(std::lround(osm.cfg.delta / osm.h));
    const int nd = nx - 1 - nL;
    for (int j = 1; j <= J - 1; ++j) {
        // R_+(b_j) from subdomain j+1; b_j sits nd cells into its grid
        const Eigen::VectorXcd& u = solutions[static_cast<std::size_t>(j)];
        const double p = osm.params.p_plus(j, osm.cfg).p;
        Eigen::VectorXcd& t = traces[static_cast<std::size_t>(trace_index_plus(j))];
        for (int row = 0; row < ny; ++row) {
            const cd ub = u[nd * ny + row];
            t[row] = (u[(nd + 1) * ny + row] - ub) * ih + p * ub;
        }
    }
    for (int j = 2; j <= J; ++j) {
        // R_-(a_j) from subdomain j-1; a_j sits nL cells into its grid
        const Eigen::VectorXcd& u = solutions[static_cast<std::size_t>(j - 2)];
        const double p = osm.params.p_minus(j, osm.cfg).p;
        Eigen::VectorXcd& t = traces[static_cast<std::size_t>(trace_index_minus(j))];
        for (int row = 0; row < ny; ++row) {
            const cd ua = u[nL * ny + row];
            t[row] = -(ua - u[(nL - 1) * ny + row]) * ih + p * ua;
        }
    }
    return err;
}

/** Geometric-mean contraction over the last half of the iterations that
 * stay above the noise floor, where the error still contracts at the
 * dominant rate rather than at roundoff. */
double guarded_rate(const std::vector<double>& errors, double floor_rel) {
    if (errors.empty() || !(errors.front() > 0)) return 0.0;
    const double floor = floor_rel * errors.front();
    std::size_t last = 0;
    while (last + 1 < errors.size() && errors[last + 1] > floor) ++last;
    if (last == 0) return 0.0;
    const std::size_t lo = last / 2;
    return std::pow(errors[last] / errors[lo], 1.0 / static_cast<double>(last - lo));
}

double predicted_worst_mode(const DiscretizedOSM& osm) {
    const int ny = osm.domains.front().ny;
    double worst = 0.0;
    for (int m = 1; m <= ny; ++m) {
        const double k = m * pi / osm.cfg.Lhat;
        worst = std::max(worst, rho_at(k, osm.params, osm.cfg));
    }
    return worst;
}

} // namespace

TraceSet random_traces(const DiscretizedOSM& osm, std::uint64_t seed) {
    const int ny = osm.domains.front().ny;
    std::mt19937_64 eng(seed);
    auto uniform01 = [&] { return (eng() >> 11) * 0x1.0p-53; };
    TraceSet traces(static_cast<std::size_t>(2 * (osm.cfg.J - 1)));
    for (Eigen::VectorXcd& t : traces) {
        t.resize(ny);
        for (int row = 0; row < ny; ++row)
            t[row] = cd(2.0 * uniform01() - 1.0, 2.0 * uniform01() - 1.0);
    }
    return traces;
}

SimulatorReport run_osm(const DiscretizedOSM& osm, const TraceSet& initial, int iterations) {
    if (iterations < 1) throw std::invalid_argument("iteration count must be >= 1");
    if (initial.size() != static_cast<std::size_t>(2 * (osm.cfg.J - 1)))
        throw std::invalid_argument("initial trace count does not match the decomposition");
    const int ny = osm.domains.front().ny;
    for (const Eigen::VectorXcd& t : initial)
        if (t.size() != ny) throw std::invalid_argument("initial trace length does not match the mesh");

    TraceSet traces = initial;
    std::vector<Eigen::VectorXcd> solutions(osm.domains.size());
    SimulatorReport report;
    report.errors.reserve(static_cast<std::size_t>(iterations));
    for (int n = 0; n < iterations; ++n) {
        report.errors.push_back(osm_step(osm, traces, solutions));
        const double err = report.errors[static_cast<std::size_t>(n)];
        // divergence is only meaningful above the roundoff plateau
        if (n >= 5 && err > 1e-10 * report.errors.front()) {
            // fast blowup: an order of magnitude across a five-iteration window
            if (err > 10.0 * report.errors[static_cast<std::size_t>(n - 5)])
                throw DivergenceDetected(
                    "error grew over 10x across 5 iterations (" +
                    std::to_string(report.errors[static_cast<std::size_t>(n - 5)]) + " -> " +
                    std::to_string(err) + " at iteration " + std::to_string(n + 1) + ")");
            // slow but sustained amplification: two orders of magnitude overall,
            // far beyond any transient a contracting sweep produces
            if (err > 100.0 * report.errors.front())
                throw DivergenceDetected(
                    "error grew over 100x from the initial sweep (" +
                    std::to_string(report.errors.front()) + " -> " + std::to_string(err) +
                    " at iteration " + std::to_string(n + 1) + ")");
        }
    }
    report.iterations = iterations;
    report.measured_rate = guarded_rate(report.errors, 1e-12);
    report.predicted_rate = predicted_worst_mode(osm);
    report.relative_gap =
        std::abs(report.measured_rate - report.predicted_rate) / report.predicted_rate;
    return report;
}

SimulatorReport run_osm(const DiscretizedOSM& osm, int iterations, std::uint64_t seed) {
    return run_osm(osm, random_traces(osm, seed), iterations);
}

std::vector<ModeRate> modewise_rates(const DiscretizedOSM& osm, const std::vector<int>& modes) {
    const int ny = osm.domains.front().ny;
    std::vector<ModeRate> rates;
    rates.reserve(modes.size());
    for (int m : modes) {
        if (m < 1 || m > ny)
            throw std::invalid_argument("mode index " + std::to_string(m) +
                                        " is outside 1.." + std::to_string(ny));
        const double k = m * pi / osm.cfg.Lhat;
        TraceSet traces(static_cast<std::size_t>(2 * (osm.cfg.J - 1)));
        for (Eigen::VectorXcd& t : traces) {
            t.resize(ny);
            for (int row = 0; row < ny; ++row) t[row] = std::sin(k * (row + 1) * osm.h);
        }

        // a single mode has no transient, so a short guarded run suffices
        const int iterations = 8;
        std::vector<Eigen::VectorXcd> solutions(osm.domains.size());
        std::vector<double> errors;
        for (int n = 0; n < iterations; ++n) errors.push_back(osm_step(osm, traces, solutions));

        double measured = 0.0;
        if (errors.front() > 0) {
            const double floor = 1e-10 * errors.front();
            std::size_t last = 0;
            while (last + 1 < errors.size() && errors[last + 1] > floor) ++last;
            if (last > 0)
                measured = std::pow(errors[last] / errors[0], 1.0 / static_cast<double>(last));
        }
        rates.push_back({k, measured, rho_at(k, osm.params, osm.cfg)});
    }
    return rates;
}

} // namespace osm
