#pragma once

#include <array>
#include <cmath>

namespace pointcert {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(squared_norm()); }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// 3x3 matrix, row-major.
struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }
    static Mat3 zero() { return Mat3{}; }

    double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
    double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }

    double trace() const { return m[0] + m[4] + m[8]; }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : m) s += v * v;
        return std::sqrt(s);
    }

    bool finite() const {
        for (double v : m)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline double frobenius_distance(const Mat3& a, const Mat3& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        const double d = a.m[i] - b.m[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Rodrigues formula. `axis` must be unit length.
inline Mat3 rotation_about_axis(const Vec3& axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const double kx = axis.x, ky = axis.y, kz = axis.z;
    Mat3 r;
    r.m = {t * kx * kx + c,      t * kx * ky - s * kz, t * kx * kz + s * ky,
           t * kx * ky + s * kz, t * ky * ky + c,      t * ky * kz - s * kx,
           t * kx * kz - s * ky, t * ky * kz + s * kx, t * kz * kz + c};
    return r;
}

inline Mat3 rotation_x(double a) { return rotation_about_axis({1, 0, 0}, a); }
inline Mat3 rotation_y(double a) { return rotation_about_axis({0, 1, 0}, a); }
inline Mat3 rotation_z(double a) { return rotation_about_axis({0, 0, 1}, a); }

} // namespace pointcert
