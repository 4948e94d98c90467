#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>

namespace amrflow {

/// 3-component double vector. World coordinates are finest-level grid units.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    void set(int i, double v) {
        if (i == 0) x = v;
        else if (i == 1) y = v;
        else z = v;
    }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    bool operator==(const Vec3& o) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Zero-length vectors pass through unchanged.
inline Vec3 normalized(const Vec3& v) {
    const double len = length(v);
    return len > 0.0 ? v / len : v;
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

/// Integer 3-vector in finest-level logical coordinates.
struct Vec3i {
    std::int64_t x = 0, y = 0, z = 0;

    constexpr Vec3i() = default;
    constexpr Vec3i(std::int64_t x_, std::int64_t y_, std::int64_t z_) : x(x_), y(y_), z(z_) {}

    std::int64_t operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    void set(int i, std::int64_t v) {
        if (i == 0) x = v;
        else if (i == 1) y = v;
        else z = v;
    }

    constexpr Vec3i operator+(const Vec3i& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3i operator-(const Vec3i& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3i operator*(std::int64_t s) const { return {x * s, y * s, z * s}; }

    bool operator==(const Vec3i& o) const = default;

    Vec3 toVec3() const { return {double(x), double(y), double(z)}; }
};

inline std::ostream& operator<<(std::ostream& os, const Vec3i& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

/// Axis-aligned box with real bounds.
struct BoxD {
    Vec3 lo{}, hi{};

    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 extent() const { return hi - lo; }
    double volume() const {
        const Vec3 e = extent();
        return e.x * e.y * e.z;
    }

    bool containsClosed(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }

    /// Positive-volume intersection with another box.
    bool overlapsInterior(const BoxD& o) const {
        return lo.x < o.hi.x && hi.x > o.lo.x && lo.y < o.hi.y && hi.y > o.lo.y &&
               lo.z < o.hi.z && hi.z > o.lo.z;
    }

    /// True when this box fully contains `o`.
    bool containsBox(const BoxD& o) const {
        return lo.x <= o.lo.x && hi.x >= o.hi.x && lo.y <= o.lo.y && hi.y >= o.hi.y &&
               lo.z <= o.lo.z && hi.z >= o.hi.z;
    }

    void expandToFit(const BoxD& o) {
        lo.x = std::min(lo.x, o.lo.x); lo.y = std::min(lo.y, o.lo.y); lo.z = std::min(lo.z, o.lo.z);
        hi.x = std::max(hi.x, o.hi.x); hi.y = std::max(hi.y, o.hi.y); hi.z = std::max(hi.z, o.hi.z);
    }

    void expandToFit(const Vec3& p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
    }

    bool operator==(const BoxD& o) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const BoxD& b) {
    return os << "[" << b.lo << ", " << b.hi << "]";
}

/// Axis-aligned box with integer corners, finest-level units.
struct Box3i {
    Vec3i lo{}, hi{};

    Vec3i extent() const { return hi - lo; }
    std::int64_t volume() const {
        const Vec3i e = extent();
        return e.x * e.y * e.z;
    }
    BoxD toBoxD() const { return {lo.toVec3(), hi.toVec3()}; }

    bool overlapsInterior(const Box3i& o) const {
        return lo.x < o.hi.x && hi.x > o.lo.x && lo.y < o.hi.y && hi.y > o.lo.y &&
               lo.z < o.hi.z && hi.z > o.lo.z;
    }

    void expandToFit(const Box3i& o) {
        lo.x = std::min(lo.x, o.lo.x); lo.y = std::min(lo.y, o.lo.y); lo.z = std::min(lo.z, o.lo.z);
        hi.x = std::max(hi.x, o.hi.x); hi.y = std::max(hi.y, o.hi.y); hi.z = std::max(hi.z, o.hi.z);
    }

    bool operator==(const Box3i& o) const = default;
};

} // namespace amrflow
