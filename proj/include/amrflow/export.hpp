#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tracer.hpp"
#include "vec.hpp"

namespace amrflow {

/// Finished trajectories ready for serialization: one polyline per seed with
/// stepsTaken+1 vertices, an optional per-vertex scalar, and the termination
/// status.
struct StreamlineSet {
    struct Line {
        std::vector<Vec3> points;
        std::vector<double> scalar;  // empty unless hasScalar
        ParticleStatus status = ParticleStatus::Finished;
    };
    std::vector<Line> lines;
    bool hasScalar = false;

    std::size_t totalVertices() const {
        std::size_t n = 0;
        for (const Line& l : lines) n += l.points.size();
        return n;
    }
};

inline StreamlineSet makeStreamlines(const TraceBuffer& buf) {
    StreamlineSet set;
    set.lines.resize(std::size_t(buf.numSeeds));
    for (int s = 0; s < buf.numSeeds; ++s) {
        StreamlineSet::Line& line = set.lines[std::size_t(s)];
        line.status = buf.status[std::size_t(s)];
        line.points.reserve(std::size_t(buf.stepsTaken[std::size_t(s)]) + 1);
        for (int k = 0; k <= buf.stepsTaken[std::size_t(s)]; ++k)
            line.points.push_back(buf.pos(s, k));
    }
    return set;
}

/// Fills the per-vertex scalars from a callable Vec3 -> double.
template <typename Fn>
inline void attachScalar(StreamlineSet& set, Fn&& fn) {
    for (auto& line : set.lines) {
        line.scalar.resize(line.points.size());
        for (std::size_t i = 0; i < line.points.size(); ++i) line.scalar[i] = fn(line.points[i]);
    }
    set.hasScalar = true;
}

namespace detail {

/// 9 significant digits: compact, stable, and well within the float32
/// precision of the on-disk data.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::ofstream openOut(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

} // namespace detail

/// CSV rows `seed,step,x,y,z[,scalar]`, seeds ascending, steps ascending.
inline void exportCSV(const StreamlineSet& set, const std::filesystem::path& path) {
    std::ofstream out = detail::openOut(path);
    out << "seed,step,x,y,z" << (set.hasScalar ? ",scalar" : "") << "\n";
    for (std::size_t s = 0; s < set.lines.size(); ++s) {
        const auto& line = set.lines[s];
        for (std::size_t k = 0; k < line.points.size(); ++k) {
            const Vec3& p = line.points[k];
            out << s << "," << k << "," << detail::fmt9(p.x) << "," << detail::fmt9(p.y) << ","
                << detail::fmt9(p.z);
            if (set.hasScalar) out << "," << detail::fmt9(line.scalar[k]);
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

/// Legacy ASCII VTK polydata with one polyline per seed and an optional
/// point scalar.
inline void exportVTK(const StreamlineSet& set, const std::filesystem::path& path) {
    std::ofstream out = detail::openOut(path);
    const std::size_t n = set.totalVertices();

    out << "# vtk DataFile Version 3.0\n";
    out << "streamlines\n";
    out << "ASCII\n";
    out << "DATASET POLYDATA\n";
    out << "POINTS " << n << " float\n";
    for (const auto& line : set.lines)
        for (const Vec3& p : line.points)
            out << detail::fmt9(p.x) << " " << detail::fmt9(p.y) << " " << detail::fmt9(p.z)
                << "\n";

    std::size_t recordSize = 0;
    for (const auto& line : set.lines) recordSize += line.points.size() + 1;
    out << "LINES " << set.lines.size() << " " << recordSize << "\n";
    std::size_t base = 0;
    for (const auto& line : set.lines) {
        out << line.points.size();
        for (std::size_t k = 0; k < line.points.size(); ++k) out << " " << (base + k);
        out << "\n";
        base += line.points.size();
    }

    if (set.hasScalar) {
        out << "POINT_DATA " << n << "\n";
        out << "SCALARS value float 1\n";
        out << "LOOKUP_TABLE default\n";
        for (const auto& line : set.lines)
            for (double v : line.scalar) out << detail::fmt9(v) << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

namespace detail {

/// Rotates v so that `from` maps onto `to` (both unit), the minimal rotation.
inline Vec3 rotateBetween(const Vec3& v, const Vec3& from, const Vec3& to) {
    const Vec3 axis = cross(from, to);
    const double s2 = dot(axis, axis);
    const double c = dot(from, to);
    if (s2 < 1e-24) {
        if (c > 0.0) return v;           // parallel, nothing to do
        return -v;                        // antiparallel: flip
    }
    // Rodrigues with unnormalized axis: sin = |axis|.
    const Vec3 k = axis / std::sqrt(s2);
    const double s = std::sqrt(s2);
    return v * c + cross(k, v) * s + k * (dot(k, v) * (1.0 - c));
}

inline Vec3 anyPerpendicular(const Vec3& t) {
    // Cross with the coordinate axis least aligned with t.
    const double ax = std::abs(t.x), ay = std::abs(t.y), az = std::abs(t.z);
    const Vec3 ref = (ax <= ay && ax <= az)   ? Vec3{1.0, 0.0, 0.0}
                     : (ay <= az)             ? Vec3{0.0, 1.0, 0.0}
                                              : Vec3{0.0, 0.0, 1.0};
    return normalized(cross(t, ref));
}

} // namespace detail

/// Tube mesh around each polyline: `sides`-gon rings at every vertex, shared
/// between consecutive segments, triangulated quads between rings. Ring
/// orientation is carried along the curve by parallel transport so strips do
/// not twist. Zero-length segments are dropped; caps are not generated.
inline void exportTubesOBJ(const StreamlineSet& set, double radius, int sides,
                           const std::filesystem::path& path) {
    if (sides < 3) throw Error("tube export requires sides >= 3");
    if (!(radius > 0.0)) throw Error("tube export requires a positive radius");

    std::ofstream out = detail::openOut(path);
    out << "# streamline tubes\n";

    std::size_t vertexBase = 1;  // OBJ indices are 1-based
    for (const auto& line : set.lines) {
        // Drop zero-length segments.
        std::vector<Vec3> pts;
        pts.reserve(line.points.size());
        for (const Vec3& p : line.points)
            if (pts.empty() || !(p == pts.back())) pts.push_back(p);
        if (pts.size() < 2) continue;

        const std::size_t m = pts.size();
        std::vector<Vec3> segDir(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i) segDir[i] = normalized(pts[i + 1] - pts[i]);

        // Per-vertex tangents: averaged at interior vertices.
        std::vector<Vec3> tangent(m);
        tangent[0] = segDir[0];
        tangent[m - 1] = segDir[m - 2];
        for (std::size_t i = 1; i + 1 < m; ++i) {
            Vec3 t = segDir[i - 1] + segDir[i];
            tangent[i] = length(t) > 1e-12 ? normalized(t) : segDir[i - 1];
        }

        Vec3 u = detail::anyPerpendicular(tangent[0]);
        Vec3 v = cross(tangent[0], u);

        const double twoPi = 6.283185307179586476925286766559;
        for (std::size_t i = 0; i < m; ++i) {
            if (i > 0) {
                u = detail::rotateBetween(u, tangent[i - 1], tangent[i]);
                // Re-orthonormalize against drift.
                u = normalized(u - tangent[i] * dot(u, tangent[i]));
                v = cross(tangent[i], u);
            }
            for (int k = 0; k < sides; ++k) {
                const double ang = twoPi * double(k) / double(sides);
                const Vec3 p = pts[i] + (u * std::cos(ang) + v * std::sin(ang)) * radius;
                out << "v " << detail::fmt9(p.x) << " " << detail::fmt9(p.y) << " "
                    << detail::fmt9(p.z) << "\n";
            }
        }

        for (std::size_t i = 0; i + 1 < m; ++i) {
            const std::size_t r0 = vertexBase + i * std::size_t(sides);
            const std::size_t r1 = r0 + std::size_t(sides);
            for (int k = 0; k < sides; ++k) {
                const int kn = (k + 1) % sides;
                out << "f " << (r0 + std::size_t(k)) << " " << (r0 + std::size_t(kn)) << " "
                    << (r1 + std::size_t(kn)) << "\n";
                out << "f " << (r0 + std::size_t(k)) << " " << (r1 + std::size_t(kn)) << " "
                    << (r1 + std::size_t(k)) << "\n";
            }
        }
        vertexBase += m * std::size_t(sides);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace amrflow
