// Common value types, tolerances and error classes.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixed_spectra {

/// Points are always stored in 3D; planar data keeps z = 0.
using Point = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Numerical thresholds. Defaults follow the documented contract; every
/// operation that uses one accepts an override through this struct.
struct Tolerances {
    double convexity = 1e-10;       // relative to bounding-box scale
    double planarity = 1e-10;       // relative to bounding-box scale
    double degenerate_area = 1e-12; // relative to scale^(d-1)
    double null_space = 1e-10;      // relative to largest singular value
    double grad_null_space = 1e-8;  // relative to max gradient norm
    double angle = 1e-9;            // band around pi/2 comparisons
    double monotone = 1e-8;         // relative to profile scale
    double potential_sign = 1e-8;   // (b.gradV)(b.nu) >= -tol
    double concavity = 1e-8;        // max Hessian eigenvalue, times scale
    double projection_ambiguity = 1e-9;
};

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MIXED_SPECTRA_ERROR(Name)                    \
    class Name : public Error {                      \
    public:                                          \
        explicit Name(const std::string& what)       \
            : Error(std::string(#Name ": ") + what) {} \
    }

MIXED_SPECTRA_ERROR(MalformedPolytope);
MIXED_SPECTRA_ERROR(InvalidPartition);
MIXED_SPECTRA_ERROR(GammaNotConnected);
MIXED_SPECTRA_ERROR(GammaPrimeNotStraight);
MIXED_SPECTRA_ERROR(PartitionNotExhaustive);
MIXED_SPECTRA_ERROR(NotDifferentiableHere);
MIXED_SPECTRA_ERROR(DegenerateElement);
MIXED_SPECTRA_ERROR(EmptyFreeSet);
MIXED_SPECTRA_ERROR(SingularShift);
MIXED_SPECTRA_ERROR(InsufficientLevels);
MIXED_SPECTRA_ERROR(BoundaryBehaviorViolated);
MIXED_SPECTRA_ERROR(ScenarioError);

#undef MIXED_SPECTRA_ERROR

} // namespace mixed_spectra
