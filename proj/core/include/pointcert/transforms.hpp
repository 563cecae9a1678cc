#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pointcert/geometry.hpp"
#include "pointcert/vecmat.hpp"

namespace pointcert {

/// The ten transformation families. Composite names read right to left:
/// TwistTaperRotation rotates first, then tapers, then twists.
enum class TransformFamily {
    ZRotation,
    ZShear,
    ZTwist,
    ZTaper,
    GeneralRotation,
    Linear,
    TwistRotation,
    TaperRotation,
    TwistTaperRotation,
    AdditiveNoise,
};

struct FamilyTraits {
    const char* name;
    bool is_additive;   // composing parameters a then b equals applying a + b
    bool is_composable; // closed under composition
    int param_dim;      // scalar parameter count; -1 when input-dependent
};

const FamilyTraits& family_traits(TransformFamily family);
TransformFamily family_from_name(const std::string& name);

struct ZRotationParam {
    double theta = 0.0; // radians
};
struct ZShearParam {
    double theta1 = 0.0;
    double theta2 = 0.0;
};
struct ZTwistParam {
    double theta = 0.0; // radians per unit z
};
struct ZTaperParam {
    double theta = 0.0;
};
struct GeneralRotationParam {
    Vec3 axis{0.0, 0.0, 1.0}; // unit vector
    double angle = 0.0;       // radians, >= 0
};
struct LinearParam {
    Mat3 a; // perturbation from the identity: p -> (I + A) p
};
struct TwistRotationParam {
    double twist = 0.0;    // radians per unit z
    double rotation = 0.0; // radians
};
struct TaperRotationParam {
    double taper = 0.0;
    double rotation = 0.0; // radians
};
struct TwistTaperRotationParam {
    double twist = 0.0; // radians per unit z
    double taper = 0.0;
    double rotation = 0.0; // radians
};
struct AdditiveNoiseParam {
    std::vector<Vec3> delta; // one offset per point
};

using TransformParam =
    std::variant<ZRotationParam, ZShearParam, ZTwistParam, ZTaperParam, GeneralRotationParam,
                 LinearParam, TwistRotationParam, TaperRotationParam, TwistTaperRotationParam,
                 AdditiveNoiseParam>;

TransformFamily family_of(const TransformParam& param);

/// Throws InvalidInput when an invariant is violated (non-finite entries,
/// non-unit rotation axis, negative rotation angle).
void validate_param(const TransformParam& param);

/// Builds a parameter from scalar components for the fixed-dimension
/// families (everything except GeneralRotation, Linear and AdditiveNoise).
TransformParam make_param(TransformFamily family, const std::vector<double>& components);

/// Scalar components of a fixed-dimension parameter, in make_param order.
std::vector<double> param_components(const TransformParam& param);

/// Applies the family formula pointwise. Point count is preserved.
PointCloud apply_transform(const TransformParam& param, const PointCloud& cloud);

Mat3 rotation_matrix(const GeneralRotationParam& rotation);

/// Axis/angle of Rot(second) * Rot(first), angle in [0, 2*pi). A zero angle
/// reports axis (0, 0, 1).
GeneralRotationParam compose_rotations(const GeneralRotationParam& first,
                                       const GeneralRotationParam& second);

/// Rotation angle of Rz(gamma) * Ry(beta) * Rx(alpha), in [0, pi].
double rotation_angle_of_zyx(double alpha, double beta, double gamma);

/// Frobenius distance between the cloud transformed by `a` and by `b`.
/// Both parameters must belong to the same family.
double interpolation_error(const TransformParam& a, const TransformParam& b,
                           const PointCloud& cloud);

/// Rotation parameter cover of S^2 x [0, angle_range]: ceil(pi*M) polar
/// bands, ceil(2*pi*M*sin(polar)) azimuths per band (at least one), M angle
/// samples. Every (axis, angle) in the range has a sample within
/// sqrt(2)/(2M) axis angle and angle_range/(2M) rotation angle.
std::vector<GeneralRotationParam> sample_sphere_grid(int m, double angle_range);

/// Angle between two unit axes, in [0, pi].
double axis_angle_between(const Vec3& a, const Vec3& b);

} // namespace pointcert
