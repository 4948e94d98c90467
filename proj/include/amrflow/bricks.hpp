#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "amr.hpp"
#include "vec.hpp"

namespace amrflow {

/// Reference from a brick cell back into the owning subgrid's storage.
struct CellRef {
    std::uint32_t subgrid = 0;
    std::uint32_t offset = 0;
};

/// Maximal axis-aligned block of same-level cells, assembled from one or
/// more subgrids. Cells reference the original subgrid arrays; no channel
/// data is copied.
struct Brick {
    int level = 0;
    Vec3i lower{};  // finest-level units, divisible by 2^level
    Vec3i dims{};   // cells along each axis at this level
    std::vector<std::uint32_t> subgridIds;
    std::vector<CellRef> cellSource;  // per cell, x-fastest

    double width() const { return levelCellWidth(level); }

    std::int64_t cellCount() const { return dims.x * dims.y * dims.z; }

    std::int64_t flatIndex(const Vec3i& ijk) const {
        return ijk.x + dims.x * (ijk.y + dims.y * ijk.z);
    }

    BoxD bounds() const {
        const std::int64_t w = levelCellWidthInt(level);
        return Box3i{lower, lower + dims * w}.toBoxD();
    }

    Vec3 cellCenter(const Vec3i& ijk) const {
        const double w = width();
        return {double(lower.x) + (double(ijk.x) + 0.5) * w,
                double(lower.y) + (double(ijk.y) + 0.5) * w,
                double(lower.z) + (double(ijk.z) + 0.5) * w};
    }

    double value(const AMRDataset& ds, int channel, std::int64_t flat) const {
        const CellRef& ref = cellSource[std::size_t(flat)];
        return ds.subgrids[ref.subgrid].channelData[std::size_t(channel)][ref.offset];
    }
};

/// World-space support region of a brick's cells: bounds grown by half a
/// cell width on every face. Any hat weight of any brick cell is exactly
/// zero outside this box.
inline BoxD brickDomain(const Brick& b) {
    const double half = 0.5 * b.width();
    BoxD d = b.bounds();
    d.lo -= Vec3{half, half, half};
    d.hi += Vec3{half, half, half};
    return d;
}

namespace detail {

struct MergeBox {
    Vec3i lowerL{};  // in level units
    Vec3i dims{};
    std::vector<std::uint32_t> subgridIds;
};

/// One greedy sweep along `axis`: boxes with identical cross-sections that
/// touch along the axis are fused. Returns true when anything merged.
inline bool mergePass(std::vector<MergeBox>& boxes, int axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    std::sort(boxes.begin(), boxes.end(), [&](const MergeBox& a, const MergeBox& b) {
        if (a.lowerL[u] != b.lowerL[u]) return a.lowerL[u] < b.lowerL[u];
        if (a.lowerL[v] != b.lowerL[v]) return a.lowerL[v] < b.lowerL[v];
        return a.lowerL[axis] < b.lowerL[axis];
    });

    std::vector<MergeBox> out;
    out.reserve(boxes.size());
    bool merged = false;
    for (MergeBox& mb : boxes) {
        if (!out.empty()) {
            MergeBox& prev = out.back();
            const bool sameSection = prev.lowerL[u] == mb.lowerL[u] &&
                                     prev.lowerL[v] == mb.lowerL[v] &&
                                     prev.dims[u] == mb.dims[u] && prev.dims[v] == mb.dims[v];
            if (sameSection && prev.lowerL[axis] + prev.dims[axis] == mb.lowerL[axis]) {
                prev.dims.set(axis, prev.dims[axis] + mb.dims[axis]);
                prev.subgridIds.insert(prev.subgridIds.end(), mb.subgridIds.begin(),
                                       mb.subgridIds.end());
                merged = true;
                continue;
            }
        }
        out.push_back(std::move(mb));
    }
    boxes.swap(out);
    return merged;
}

} // namespace detail

/// Combines same-level subgrids into maximal bricks by greedy face-merging,
/// swept per axis to a fixed point. Levels never mix. Output is sorted by
/// level, then lower z, y, x, and covers every input cell exactly once.
inline std::vector<Brick> buildBricks(const AMRDataset& ds) {
    std::map<int, std::vector<detail::MergeBox>> perLevel;
    for (std::size_t s = 0; s < ds.subgrids.size(); ++s) {
        const Subgrid& sg = ds.subgrids[s];
        const std::int64_t w = levelCellWidthInt(sg.level);
        detail::MergeBox mb;
        mb.lowerL = {sg.lower.x / w, sg.lower.y / w, sg.lower.z / w};
        mb.dims = sg.dims;
        mb.subgridIds = {std::uint32_t(s)};
        perLevel[sg.level].push_back(std::move(mb));
    }

    std::vector<Brick> bricks;
    for (auto& [level, boxes] : perLevel) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (int axis = 0; axis < 3; ++axis)
                changed |= detail::mergePass(boxes, axis);
        }
        const std::int64_t w = levelCellWidthInt(level);
        for (detail::MergeBox& mb : boxes) {
            Brick b;
            b.level = level;
            b.lower = mb.lowerL * w;
            b.dims = mb.dims;
            b.subgridIds = std::move(mb.subgridIds);
            std::sort(b.subgridIds.begin(), b.subgridIds.end());
            bricks.push_back(std::move(b));
        }
    }

    std::sort(bricks.begin(), bricks.end(), [](const Brick& a, const Brick& b) {
        if (a.level != b.level) return a.level < b.level;
        if (a.lower.z != b.lower.z) return a.lower.z < b.lower.z;
        if (a.lower.y != b.lower.y) return a.lower.y < b.lower.y;
        return a.lower.x < b.lower.x;
    });

    // Wire brick cells to their source subgrid storage.
    for (Brick& b : bricks) {
        b.cellSource.resize(std::size_t(b.cellCount()));
        const std::int64_t w = levelCellWidthInt(b.level);
        for (std::uint32_t sgId : b.subgridIds) {
            const Subgrid& sg = ds.subgrids[sgId];
            const Vec3i base{(sg.lower.x - b.lower.x) / w, (sg.lower.y - b.lower.y) / w,
                             (sg.lower.z - b.lower.z) / w};
            std::uint32_t srcFlat = 0;
            for (std::int64_t k = 0; k < sg.dims.z; ++k)
                for (std::int64_t j = 0; j < sg.dims.y; ++j)
                    for (std::int64_t i = 0; i < sg.dims.x; ++i, ++srcFlat) {
                        const std::int64_t dst =
                            b.flatIndex({base.x + i, base.y + j, base.z + k});
                        b.cellSource[std::size_t(dst)] = {sgId, srcFlat};
                    }
        }
    }
    return bricks;
}

} // namespace amrflow
