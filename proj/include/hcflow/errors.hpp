#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hcflow {

/// Base class for all solver-level error signals.
struct FlowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A length element collapsed below the practical floor: vertex collision
/// or curve collapse at segment j (1-based).
struct DegenerateSegment : FlowError {
    std::size_t index;
    explicit DegenerateSegment(std::size_t j)
        : FlowError("degenerate segment at j=" + std::to_string(j)), index(j) {}
};

/// tau_j + tau_{j+1} vanished: the averaged vertex tangent is undefined.
struct HairpinSingularity : FlowError {
    std::size_t index;
    explicit HairpinSingularity(std::size_t j)
        : FlowError("hairpin singularity at vertex j=" + std::to_string(j)), index(j) {}
};

/// Assembled matrix lost strict diagonal dominance (assembly bug or collapsed geometry).
struct NotDiagonallyDominant : FlowError {
    std::size_t index;
    explicit NotDiagonallyDominant(std::size_t j)
        : FlowError("cyclic tridiagonal system not strictly diagonally dominant at row " +
                    std::to_string(j)),
          index(j) {}
};

/// A pivot underflowed during elimination.
struct SingularSystem : FlowError {
    std::size_t index;
    explicit SingularSystem(std::size_t j)
        : FlowError("singular cyclic tridiagonal system, pivot underflow at row " +
                    std::to_string(j)),
          index(j) {}
};

/// Requested time at or past the extinction time of a shrinking circle.
struct BeyondExtinction : FlowError {
    double time;
    explicit BeyondExtinction(double t)
        : FlowError("time " + std::to_string(t) + " is at or beyond extinction"), time(t) {}
};

/// Adaptive integrator could not make progress (typically near blow-up).
struct StepSizeUnderflow : FlowError {
    double time;
    explicit StepSizeUnderflow(double t)
        : FlowError("step size underflow at t=" + std::to_string(t)), time(t) {}
};

/// Which stopping threshold tripped.
enum class StopReason { CurvatureCap, LengthFloor, SegmentCollapse };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::CurvatureCap: return "curvature_cap";
        case StopReason::LengthFloor: return "length_floor";
        case StopReason::SegmentCollapse: return "segment_collapse";
    }
    return "unknown";
}

/// A stopping threshold tripped while stepping; carries the trip reason and time.
struct BlowUpDetected : FlowError {
    StopReason reason;
    double time;
    long step;
    BlowUpDetected(StopReason r, double t, long m)
        : FlowError(std::string("blow-up detected (") + to_string(r) + ") at t=" +
                    std::to_string(t)),
          reason(r),
          time(t),
          step(m) {}
};

/// Invalid run configuration (CLI exit code 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hcflow
