#ifndef OSM_ERRORS_HPP
#define OSM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace osm {

/** Base class for all failures raised by this library. */
struct OsmError : std::runtime_error {
    explicit OsmError(const std::string& msg) : std::runtime_error(msg) {}
};

/** An interface-coefficient denominator fell below floating tolerance,
 * which indicates the un-rescaled exponential form would have been used
 * outside its range of validity. */
struct DenominatorUnderflow : OsmError {
    explicit DenominatorUnderflow(const std::string& msg) : OsmError(msg) {}
};

/** The dense eigenvalue iteration failed to converge. */
struct NonConvergence : OsmError {
    explicit NonConvergence(const std::string& msg) : OsmError(msg) {}
};

/** An optimization result exposes fewer active frequency maxima than the
 * parameter variant's equioscillation theory predicts. */
struct TooFewMaxima : OsmError {
    explicit TooFewMaxima(const std::string& msg) : OsmError(msg) {}
};

/** A power-law fit produced an exponent incompatible with the expected
 * scaling law. */
struct FitRejected : OsmError {
    explicit FitRejected(const std::string& msg) : OsmError(msg) {}
};

/** A power-law fit was attempted on samples spanning too small a range. */
struct DegenerateFit : OsmError {
    explicit DegenerateFit(const std::string& msg) : OsmError(msg) {}
};

/** The requested mesh width is incompatible with the decomposition
 * geometry (overlap or subdomain width not an integer multiple of h). */
struct MeshMismatch : OsmError {
    explicit MeshMismatch(const std::string& msg) : OsmError(msg) {}
};

/** The Schwarz iteration error grew by more than a factor of ten over
 * five consecutive iterations, indicating invalid parameters. */
struct DivergenceDetected : OsmError {
    explicit DivergenceDetected(const std::string& msg) : OsmError(msg) {}
};

} // namespace osm

#endif
