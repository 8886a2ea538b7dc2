#ifndef OSM_PROBLEM_HPP
#define OSM_PROBLEM_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace osm {

using cd = std::complex<double>;

/** Outer boundary condition at the left end of the first strip and the
 * right end of the last strip. Dirichlet is the infinite-parameter limit
 * of the Robin condition and is handled analytically, never by a large
 * finite number. */
struct OuterBC {
    enum class Kind { robin, dirichlet };
    Kind kind = Kind::robin;
    /** Robin parameter at x = a_1 (used only when kind == robin). */
    double p_a = 1.0;
    /** Robin parameter at x = b_J (used only when kind == robin). */
    double p_b = 1.0;

    static OuterBC robin(double pa, double pb) { return {Kind::robin, pa, pb}; }
    static OuterBC dirichlet() { return {Kind::dirichlet, 0.0, 0.0}; }
};

/** PDE and strip-decomposition geometry: Delta u - (sigma - i epsilon) u = f
 * on a rectangle of height Lhat split into J vertical strips of width L
 * that pairwise overlap by delta. Subdomain j occupies [a(j), b(j)]. */
struct ProblemConfig {
    double sigma = 1.0;
    double epsilon = 1.0;
    double L = 1.0;
    double Lhat = 1.0;
    double delta = 1e-2;
    int J = 2;
    OuterBC outer = OuterBC::robin(1.0, 1.0);

    double a(int j) const { return (j - 1) * L - delta / 2; }
    double b(int j) const { return j * L + delta / 2; }

    /** Throws std::invalid_argument if any field is outside its domain. */
    void validate() const {
        if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
        if (!(sigma >= 0)) throw std::invalid_argument("sigma must be >= 0");
        if (!(sigma + epsilon > 0)) throw std::invalid_argument("sigma + epsilon must be > 0");
        if (!(L > 0)) throw std::invalid_argument("L must be > 0");
        if (!(Lhat > 0)) throw std::invalid_argument("Lhat must be > 0");
        if (!(delta >= 0)) throw std::invalid_argument("delta must be >= 0");
        if (!(delta < L)) throw std::invalid_argument("delta must be < L");
        if (J < 2) throw std::invalid_argument("J must be >= 2");
        if (outer.kind == OuterBC::Kind::robin && !(outer.p_a > 0 && outer.p_b > 0))
            throw std::invalid_argument("outer Robin parameters must be > 0");
    }
};

/** A Fourier frequency k = m pi / Lhat along the interfaces. */
struct Frequency {
    double k = 0.0;
};

/** The Fourier symbol lambda = sqrt(k^2 + sigma - i epsilon) and its k = 0
 * value s = sqrt(sigma - i epsilon), both on the branch with Re > 0. */
struct Symbol {
    cd lambda;
    cd s;
};

/** A Robin parameter on one side of one interface; `infinite` marks the
 * Dirichlet limit used for outer boundaries. */
struct RobinParam {
    double p = 0.0;
    bool infinite = false;
};

enum class Variant { uniform, two_sided, full };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::uniform: return "uniform";
        case Variant::two_sided: return "two_sided";
        default: return "full";
    }
}

/** Robin parameters on the interior interface sides. The outer parameters
 * p_1^- and p_J^+ always resolve from OuterBC, never from this type.
 *
 * Storage by variant:
 *   uniform   values = {p}
 *   two_sided values = {p_minus, p_plus}
 *   full      values = (p_1^+, p_2^-, p_2^+, p_3^-, ..., p_{J-1}^+, p_J^-),
 *             i.e. 2(J-1) entries ordered interface by interface.
 */
struct TransmissionParams {
    Variant variant = Variant::uniform;
    std::vector<double> values;

    static TransmissionParams uniform(double p) { return {Variant::uniform, {p}}; }
    static TransmissionParams two_sided(double p_minus, double p_plus) {
        return {Variant::two_sided, {p_minus, p_plus}};
    }
    static TransmissionParams full(std::vector<double> v) {
        return {Variant::full, std::move(v)};
    }

    /** Number of stored values required for a J-subdomain decomposition. */
    std::size_t expected_size(int J) const {
        switch (variant) {
            case Variant::uniform: return 1;
            case Variant::two_sided: return 2;
            default: return static_cast<std::size_t>(2 * (J - 1));
        }
    }

    bool is_valid(int J) const {
        if (values.size() != expected_size(J)) return false;
        for (double p : values)
            if (!(p > 0)) return false;
        return true;
    }

    /** Throws std::invalid_argument on wrong length or non-positive entries.
     * Called at the optimization, CLI, and discretization boundaries; the
     * evaluation routines accept arbitrary values so invalid parameters can
     * be observed to diverge. */
    void validate(int J) const {
        if (values.size() != expected_size(J))
            throw std::invalid_argument("transmission parameter count does not match J");
        for (double p : values)
            if (!(p > 0))
                throw std::invalid_argument("transmission parameters must be > 0");
    }

    /** Robin parameter applied at x = a_j (the left side of subdomain j). */
    RobinParam p_minus(int j, const ProblemConfig& cfg) const {
        if (j == 1) {
            if (cfg.outer.kind == OuterBC::Kind::dirichlet) return {0.0, true};
            return {cfg.outer.p_a, false};
        }
        switch (variant) {
            case Variant::uniform: return {values[0], false};
            case Variant::two_sided: return {values[0], false};
            default: return {values[static_cast<std::size_t>(2 * j - 3)], false};
        }
    }

    /** Robin parameter applied at x = b_j (the right side of subdomain j). */
    RobinParam p_plus(int j, const ProblemConfig& cfg) const {
        if (j == cfg.J) {
            if (cfg.outer.kind == OuterBC::Kind::dirichlet) return {0.0, true};
            return {cfg.outer.p_b, false};
        }
        switch (variant) {
            case Variant::uniform: return {values[0], false};
            case Variant::two_sided: return {values[1], false};
            default: return {values[static_cast<std::size_t>(2 * j - 2)], false};
        }
    }
};

} // namespace osm

#endif
