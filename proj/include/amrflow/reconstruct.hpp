#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "amr.hpp"
#include "bricks.hpp"
#include "errors.hpp"
#include "query.hpp"

namespace amrflow {

/// Scalar reconstruction result. weightSum is the basis-normalization
/// denominator; it is strictly positive for any in-domain sample.
struct SampleResult {
    double value = 0.0;
    double weightSum = 0.0;
    double finestCellWidth = 1.0;
};

/// Vector reconstruction result for three channels sharing one region lookup.
struct VectorSample {
    Vec3 value{};
    double finestCellWidth = 1.0;
};

struct SampleOptions {
    /// Perform one literal point query per channel instead of sharing a
    /// single lookup across the three components. Same results, three times
    /// the traversals; used by the benchmark harness for like-for-like
    /// query counting.
    bool threeQueryConformance = false;
};

/// Separable tent weight of a cell at p: product over axes of
/// max(1 - |center - p| / width, 0). 1 exactly at the center, 0 at one cell
/// width away and beyond.
inline double hatWeight(const Cell& cell, const Vec3& p) {
    double w = 1.0;
    for (int a = 0; a < 3; ++a)
        w *= std::max(1.0 - std::abs(cell.center[a] - p[a]) / cell.width, 0.0);
    return w;
}

namespace detail {

inline double hat1d(double center, double p, double width) {
    return std::max(1.0 - std::abs(center - p) / width, 0.0);
}

/// Visits the <= 2x2x2 cells of one brick whose tent support can reach p and
/// hands (flatIndex, weight) to the sink. Candidates come from index
/// arithmetic on the brick grid; neighbors outside the brick belong to other
/// bricks of the same region and are simply absent here.
template <typename Sink>
inline void forEachSupportCell(const Brick& brick, const Vec3& p, Sink&& sink) {
    const double w = brick.width();
    std::array<std::int64_t, 2> idx[3];
    std::array<double, 2> axisWeight[3];
    int counts[3];

    for (int a = 0; a < 3; ++a) {
        const double rel = (p[a] - double(brick.lower[a])) / w - 0.5;
        const std::int64_t i0 = std::int64_t(std::floor(rel));
        counts[a] = 0;
        for (std::int64_t i : {i0, i0 + 1}) {
            if (i < 0 || i >= brick.dims[a]) continue;
            const double center = double(brick.lower[a]) + (double(i) + 0.5) * w;
            idx[a][counts[a]] = i;
            axisWeight[a][counts[a]] = hat1d(center, p[a], w);
            ++counts[a];
        }
    }

    for (int kz = 0; kz < counts[2]; ++kz)
        for (int ky = 0; ky < counts[1]; ++ky)
            for (int kx = 0; kx < counts[0]; ++kx) {
                const double weight = axisWeight[0][kx] * axisWeight[1][ky] * axisWeight[2][kz];
                const std::int64_t flat =
                    brick.flatIndex({idx[0][kx], idx[1][ky], idx[2][kz]});
                sink(flat, weight);
            }
}

template <typename Engine>
inline std::optional<RegionHit> locateForSample(const Engine& engine, const Vec3& p) {
    return engine.locate(p);
}

/// The ownership rule closes boxes on the domain union's upper faces, but the
/// tent supports are open there: a point exactly on that surface is owned yet
/// carries zero total weight. Such samples are Outside; a zero weight sum
/// anywhere else means the decomposition handed us the wrong bricks.
inline bool onUpperDomainBoundary(const BoxD& unionBounds, const Vec3& p) {
    return p.x == unionBounds.hi.x || p.y == unionBounds.hi.y || p.z == unionBounds.hi.z;
}

} // namespace detail

/// Basis-method reconstruction of one channel at p: weighted average of the
/// tent-supported cells of every brick in the owning region,
/// sum(H*v) / sum(H). Returns nullopt outside the domain union.
template <typename Engine>
inline std::optional<SampleResult> sampleScalar(const Engine& engine, const AMRDataset& ds,
                                                const std::vector<Brick>& bricks, int channel,
                                                const Vec3& p) {
    const auto hit = detail::locateForSample(engine, p);
    if (!hit) return std::nullopt;

    double vsum = 0.0, wsum = 0.0;
    for (std::uint32_t id : hit->brickIDs) {
        const Brick& brick = bricks[id];
        detail::forEachSupportCell(brick, p, [&](std::int64_t flat, double weight) {
            wsum += weight;
            vsum += weight * brick.value(ds, channel, flat);
        });
    }
    if (wsum == 0.0) {
        if (detail::onUpperDomainBoundary(engine.decomposition().domainUnionBounds, p))
            return std::nullopt;
        throw DegenerateWeight("zero basis weight sum for an interior sample point");
    }
    return SampleResult{vsum / wsum, wsum, hit->finestCellWidth};
}

/// Vector reconstruction of three channels. One region lookup serves all
/// three components (the region, cells, and weights are identical); the
/// conformance option issues three literal queries instead.
template <typename Engine>
inline std::optional<VectorSample> sampleDirection(const Engine& engine, const AMRDataset& ds,
                                                   const std::vector<Brick>& bricks, int channelX,
                                                   int channelY, int channelZ, const Vec3& p,
                                                   const SampleOptions& opts = {}) {
    if (opts.threeQueryConformance) {
        const auto sx = sampleScalar(engine, ds, bricks, channelX, p);
        if (!sx) return std::nullopt;
        const auto sy = sampleScalar(engine, ds, bricks, channelY, p);
        const auto sz = sampleScalar(engine, ds, bricks, channelZ, p);
        return VectorSample{{sx->value, sy->value, sz->value}, sx->finestCellWidth};
    }

    const auto hit = detail::locateForSample(engine, p);
    if (!hit) return std::nullopt;

    double wsum = 0.0;
    Vec3 vsum{};
    const int channels[3] = {channelX, channelY, channelZ};
    for (std::uint32_t id : hit->brickIDs) {
        const Brick& brick = bricks[id];
        detail::forEachSupportCell(brick, p, [&](std::int64_t flat, double weight) {
            wsum += weight;
            vsum.x += weight * brick.value(ds, channels[0], flat);
            vsum.y += weight * brick.value(ds, channels[1], flat);
            vsum.z += weight * brick.value(ds, channels[2], flat);
        });
    }
    if (wsum == 0.0) {
        if (detail::onUpperDomainBoundary(engine.decomposition().domainUnionBounds, p))
            return std::nullopt;
        throw DegenerateWeight("zero basis weight sum for an interior sample point");
    }
    return VectorSample{vsum / wsum, hit->finestCellWidth};
}

} // namespace amrflow
