#include "pointcert/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "pointcert/errors.hpp"

namespace pointcert {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

const FamilyTraits kTraits[] = {
    {"z_rotation", true, true, 1},
    {"z_shear", true, true, 2},
    {"z_twist", true, true, 1},
    {"z_taper", false, false, 1},
    {"general_rotation", false, true, -1},
    {"linear", false, true, 9},
    {"twist_rotation", true, true, 2},
    {"taper_rotation", false, false, 2},
    {"twist_taper_rotation", false, false, 3},
    {"additive_noise", true, true, -1},
};
} // namespace

const FamilyTraits& family_traits(TransformFamily family) {
    return kTraits[static_cast<int>(family)];
}

TransformFamily family_from_name(const std::string& name) {
    for (int i = 0; i < 10; ++i)
        if (name == kTraits[i].name) return static_cast<TransformFamily>(i);
    throw InvalidInput("unknown transformation family: " + name);
}

TransformFamily family_of(const TransformParam& param) {
    return static_cast<TransformFamily>(param.index());
}

void validate_param(const TransformParam& param) {
    const auto require_finite = [](std::initializer_list<double> vals) {
        for (double v : vals)
            if (!std::isfinite(v)) throw InvalidInput("non-finite transformation parameter");
    };
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ZRotationParam> || std::is_same_v<T, ZTwistParam> ||
                          std::is_same_v<T, ZTaperParam>) {
                require_finite({p.theta});
            } else if constexpr (std::is_same_v<T, ZShearParam>) {
                require_finite({p.theta1, p.theta2});
            } else if constexpr (std::is_same_v<T, GeneralRotationParam>) {
                require_finite({p.axis.x, p.axis.y, p.axis.z, p.angle});
                if (std::fabs(p.axis.norm() - 1.0) > 1e-12)
                    throw InvalidInput("rotation axis must be a unit vector");
                if (p.angle < 0.0) throw InvalidInput("rotation angle must be >= 0");
            } else if constexpr (std::is_same_v<T, LinearParam>) {
                if (!p.a.finite()) throw InvalidInput("non-finite linear perturbation");
            } else if constexpr (std::is_same_v<T, TwistRotationParam>) {
                require_finite({p.twist, p.rotation});
            } else if constexpr (std::is_same_v<T, TaperRotationParam>) {
                require_finite({p.taper, p.rotation});
            } else if constexpr (std::is_same_v<T, TwistTaperRotationParam>) {
                require_finite({p.twist, p.taper, p.rotation});
            } else if constexpr (std::is_same_v<T, AdditiveNoiseParam>) {
                for (const Vec3& d : p.delta)
                    if (!d.finite()) throw InvalidInput("non-finite additive noise");
            }
        },
        param);
}

TransformParam make_param(TransformFamily family, const std::vector<double>& c) {
    const auto expect = [&](std::size_t n) {
        if (c.size() != n)
            throw InvalidInput(std::string("make_param: ") + family_traits(family).name +
                               " expects " + std::to_string(n) + " components");
    };
    switch (family) {
    case TransformFamily::ZRotation: expect(1); return ZRotationParam{c[0]};
    case TransformFamily::ZShear: expect(2); return ZShearParam{c[0], c[1]};
    case TransformFamily::ZTwist: expect(1); return ZTwistParam{c[0]};
    case TransformFamily::ZTaper: expect(1); return ZTaperParam{c[0]};
    case TransformFamily::TwistRotation: expect(2); return TwistRotationParam{c[0], c[1]};
    case TransformFamily::TaperRotation: expect(2); return TaperRotationParam{c[0], c[1]};
    case TransformFamily::TwistTaperRotation:
        expect(3);
        return TwistTaperRotationParam{c[0], c[1], c[2]};
    case TransformFamily::Linear: {
        expect(9);
        LinearParam p;
        std::copy(c.begin(), c.end(), p.a.m.begin());
        return p;
    }
    default: throw InvalidInput("make_param: family has no scalar component form");
    }
}

std::vector<double> param_components(const TransformParam& param) {
    return std::visit(
        [](const auto& p) -> std::vector<double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ZRotationParam> || std::is_same_v<T, ZTwistParam> ||
                          std::is_same_v<T, ZTaperParam>) {
                return {p.theta};
            } else if constexpr (std::is_same_v<T, ZShearParam>) {
                return {p.theta1, p.theta2};
            } else if constexpr (std::is_same_v<T, TwistRotationParam>) {
                return {p.twist, p.rotation};
            } else if constexpr (std::is_same_v<T, TaperRotationParam>) {
                return {p.taper, p.rotation};
            } else if constexpr (std::is_same_v<T, TwistTaperRotationParam>) {
                return {p.twist, p.taper, p.rotation};
            } else if constexpr (std::is_same_v<T, LinearParam>) {
                return std::vector<double>(p.a.m.begin(), p.a.m.end());
            } else {
                throw InvalidInput("param_components: family has no scalar component form");
            }
        },
        param);
}

namespace {

inline Vec3 rotate_z(const Vec3& p, double c, double s) {
    return {p.x * c - p.y * s, p.x * s + p.y * c, p.z};
}

inline Vec3 twist_z(const Vec3& p, double theta) {
    const double a = theta * p.z;
    return rotate_z(p, std::cos(a), std::sin(a));
}

inline Vec3 taper_z(const Vec3& p, double theta) {
    const double f = 1.0 + theta * p.z;
    return {p.x * f, p.y * f, p.z};
}

} // namespace

PointCloud apply_transform(const TransformParam& param, const PointCloud& cloud) {
    validate_param(param);
    PointCloud out;
    out.points.reserve(cloud.size());
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ZRotationParam>) {
                const double c = std::cos(p.theta), s = std::sin(p.theta);
                for (const Vec3& q : cloud.points) out.points.push_back(rotate_z(q, c, s));
            } else if constexpr (std::is_same_v<T, ZShearParam>) {
                for (const Vec3& q : cloud.points)
                    out.points.push_back({q.x + p.theta1 * q.z, q.y + p.theta2 * q.z, q.z});
            } else if constexpr (std::is_same_v<T, ZTwistParam>) {
                for (const Vec3& q : cloud.points) out.points.push_back(twist_z(q, p.theta));
            } else if constexpr (std::is_same_v<T, ZTaperParam>) {
                for (const Vec3& q : cloud.points) out.points.push_back(taper_z(q, p.theta));
            } else if constexpr (std::is_same_v<T, GeneralRotationParam>) {
                const Mat3 r = rotation_about_axis(p.axis, p.angle);
                for (const Vec3& q : cloud.points) out.points.push_back(r * q);
            } else if constexpr (std::is_same_v<T, LinearParam>) {
                const Mat3 m = Mat3::identity() + p.a;
                for (const Vec3& q : cloud.points) out.points.push_back(m * q);
            } else if constexpr (std::is_same_v<T, TwistRotationParam>) {
                const double c = std::cos(p.rotation), s = std::sin(p.rotation);
                for (const Vec3& q : cloud.points)
                    out.points.push_back(twist_z(rotate_z(q, c, s), p.twist));
            } else if constexpr (std::is_same_v<T, TaperRotationParam>) {
                const double c = std::cos(p.rotation), s = std::sin(p.rotation);
                for (const Vec3& q : cloud.points)
                    out.points.push_back(taper_z(rotate_z(q, c, s), p.taper));
            } else if constexpr (std::is_same_v<T, TwistTaperRotationParam>) {
                const double c = std::cos(p.rotation), s = std::sin(p.rotation);
                for (const Vec3& q : cloud.points)
                    out.points.push_back(twist_z(taper_z(rotate_z(q, c, s), p.taper), p.twist));
            } else if constexpr (std::is_same_v<T, AdditiveNoiseParam>) {
                if (p.delta.size() != cloud.size())
                    throw InvalidInput("additive noise shape does not match cloud");
                for (std::size_t i = 0; i < cloud.size(); ++i)
                    out.points.push_back(cloud.points[i] + p.delta[i]);
            }
        },
        param);
    return out;
}

Mat3 rotation_matrix(const GeneralRotationParam& rotation) {
    return rotation_about_axis(rotation.axis, rotation.angle);
}

GeneralRotationParam compose_rotations(const GeneralRotationParam& first,
                                       const GeneralRotationParam& second) {
    validate_param(TransformParam{first});
    validate_param(TransformParam{second});
    // Quaternion product q2 * q1 in axis/angle form.
    const double h1 = 0.5 * first.angle, h2 = 0.5 * second.angle;
    const double c1 = std::cos(h1), s1 = std::sin(h1);
    const double c2 = std::cos(h2), s2 = std::sin(h2);
    const double w = c1 * c2 - s1 * s2 * first.axis.dot(second.axis);
    const Vec3 v = s1 * c2 * first.axis + c1 * s2 * second.axis +
                   s1 * s2 * second.axis.cross(first.axis);
    const double n = v.norm();
    if (n < 1e-15) {
        // Identity (or a full turn): fix the axis by convention.
        return {{0.0, 0.0, 1.0}, 0.0};
    }
    double angle = 2.0 * std::atan2(n, w); // equals 2*acos(w), stable near 0
    if (angle >= kTwoPi) angle -= kTwoPi;
    return {v / n, angle};
}

double rotation_angle_of_zyx(double alpha, double beta, double gamma) {
    const Mat3 r = rotation_z(gamma) * rotation_y(beta) * rotation_x(alpha);
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    return std::acos(c);
}

double interpolation_error(const TransformParam& a, const TransformParam& b,
                           const PointCloud& cloud) {
    if (family_of(a) != family_of(b))
        throw InvalidInput("interpolation_error: parameters from different families");
    return cloud_distance(apply_transform(a, cloud), apply_transform(b, cloud));
}

std::vector<GeneralRotationParam> sample_sphere_grid(int m, double angle_range) {
    if (m < 1) throw InvalidInput("sample_sphere_grid: m must be >= 1");
    if (!(angle_range > 0.0)) throw InvalidInput("sample_sphere_grid: angle range must be > 0");
    std::vector<GeneralRotationParam> out;
    const int bands = static_cast<int>(std::ceil(kPi * m));
    for (int r = 0; r < bands; ++r) {
        const double polar = (r + 0.5) * kPi / bands;
        const double sp = std::sin(polar), cp = std::cos(polar);
        const int n_az = std::max(1, static_cast<int>(std::ceil(kTwoPi * m * sp)));
        for (int s = 0; s < n_az; ++s) {
            const double az = (s + 0.5) * kTwoPi / n_az;
            const Vec3 axis{std::cos(az) * sp, std::sin(az) * sp, cp};
            for (int t = 0; t < m; ++t) {
                const double theta = (t + 0.5) * angle_range / m;
                out.push_back({axis, theta});
            }
        }
    }
    return out;
}

double axis_angle_between(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

} // namespace pointcert
