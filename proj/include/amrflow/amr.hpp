#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "vec.hpp"

namespace amrflow {

/// Width of a cell at the given refinement level, in world units.
/// Level 0 is the finest; world units equal finest-level logical grid units,
/// so the width is exactly 2^level.
inline double levelCellWidth(int level) { return std::ldexp(1.0, level); }

inline std::int64_t levelCellWidthInt(int level) { return std::int64_t{1} << level; }

/// A refinement level and its cell width. The width is derived, never
/// stored, so the power-of-two invariant holds by construction.
struct LevelSpec {
    int level = 0;

    double cellWidth() const { return levelCellWidth(level); }
    bool operator==(const LevelSpec&) const = default;
};

/// One block of same-level cells as produced by the simulation.
/// `lower` is in finest-level logical coordinates and must be divisible by
/// 2^level; `dims` counts cells along x,y,z at this level. Channel arrays are
/// stored x-fastest, then y, then z.
struct Subgrid {
    int level = 0;
    Vec3i lower{};
    Vec3i dims{};
    std::vector<std::vector<double>> channelData;

    std::int64_t cellCount() const { return dims.x * dims.y * dims.z; }

    std::int64_t flatIndex(const Vec3i& ijk) const {
        return ijk.x + dims.x * (ijk.y + dims.y * ijk.z);
    }

    Box3i logicalBounds() const {
        const std::int64_t w = levelCellWidthInt(level);
        return {lower, lower + dims * w};
    }

    BoxD worldBounds() const { return logicalBounds().toBoxD(); }
};

/// Sample point of one cell for one channel: center position, width, value.
struct Cell {
    Vec3 center{};
    double width = 1.0;
    double value = 0.0;
};

/// Multi-channel, multi-level cell-centric AMR field.
/// Immutable after finalize(); safe for concurrent read access.
struct AMRDataset {
    std::vector<std::string> channels;
    std::vector<Subgrid> subgrids;

    // Derived by finalize().
    Box3i logicalBounds{};
    BoxD worldBounds{};
    int maxLevel = 0;

    /// Recomputes the derived fields from the subgrid list.
    void finalize() {
        maxLevel = 0;
        if (subgrids.empty()) {
            logicalBounds = {};
            worldBounds = {};
            return;
        }
        logicalBounds = subgrids.front().logicalBounds();
        for (const Subgrid& sg : subgrids) {
            logicalBounds.expandToFit(sg.logicalBounds());
            maxLevel = std::max(maxLevel, sg.level);
        }
        worldBounds = logicalBounds.toBoxD();
    }

    int channelIndex(std::string_view name) const {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i] == name) return int(i);
        return -1;
    }

    std::int64_t totalCells() const {
        std::int64_t n = 0;
        for (const Subgrid& sg : subgrids) n += sg.cellCount();
        return n;
    }
};

/// First structural defect found in a dataset, if any.
struct ValidationIssue {
    enum class Kind { Overlap, CoverageGap, Alignment, Structure };

    Kind kind = Kind::Structure;
    int subgridA = -1;
    int subgridB = -1;
    Vec3 where{};
    std::string detail;

    std::string message() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::Overlap:
                os << "overlap between subgrid " << subgridA << " and subgrid " << subgridB;
                break;
            case Kind::CoverageGap:
                os << "coverage gap at world point " << where;
                break;
            case Kind::Alignment:
                os << "alignment error in subgrid " << subgridA;
                break;
            case Kind::Structure:
                os << "structural error";
                break;
        }
        if (!detail.empty()) os << ": " << detail;
        return os.str();
    }
};

/// Checks the tiling invariants: aligned subgrid origins, pairwise disjoint
/// cell interiors, and gap-free coverage of the world bounds. Uses an integer
/// occupancy map over the finest logical grid, so the verdict is exact.
/// Returns nullopt when the dataset is valid.
inline std::optional<ValidationIssue> validateDataset(const AMRDataset& ds) {
    if (ds.subgrids.empty())
        return ValidationIssue{ValidationIssue::Kind::Structure, -1, -1, {}, "dataset has no subgrids"};

    for (std::size_t i = 0; i < ds.channels.size(); ++i)
        for (std::size_t j = i + 1; j < ds.channels.size(); ++j)
            if (ds.channels[i] == ds.channels[j])
                return ValidationIssue{ValidationIssue::Kind::Structure, -1, -1, {},
                                       "duplicate channel name '" + ds.channels[i] + "'"};

    for (std::size_t s = 0; s < ds.subgrids.size(); ++s) {
        const Subgrid& sg = ds.subgrids[s];
        if (sg.level < 0)
            return ValidationIssue{ValidationIssue::Kind::Alignment, int(s), -1, {}, "negative level"};
        if (sg.dims.x < 1 || sg.dims.y < 1 || sg.dims.z < 1)
            return ValidationIssue{ValidationIssue::Kind::Alignment, int(s), -1, {}, "dims must be >= 1"};
        const std::int64_t w = levelCellWidthInt(sg.level);
        for (int a = 0; a < 3; ++a)
            if (sg.lower[a] % w != 0)
                return ValidationIssue{ValidationIssue::Kind::Alignment, int(s), -1, {},
                                       "lower not divisible by 2^level"};
        if (sg.channelData.size() != ds.channels.size())
            return ValidationIssue{ValidationIssue::Kind::Structure, int(s), -1, {},
                                   "channel array count does not match channel list"};
        for (const auto& arr : sg.channelData)
            if (std::int64_t(arr.size()) != sg.cellCount())
                return ValidationIssue{ValidationIssue::Kind::Structure, int(s), -1, {},
                                       "channel array length does not match dims"};
    }

    // Occupancy over the finest grid inside the bounding box. owner[v] holds
    // subgrid index + 1, 0 meaning uncovered.
    Box3i bounds = ds.subgrids.front().logicalBounds();
    for (const Subgrid& sg : ds.subgrids) bounds.expandToFit(sg.logicalBounds());
    const Vec3i ext = bounds.extent();
    const std::int64_t total = bounds.volume();
    std::vector<std::int32_t> owner(std::size_t(total), 0);

    for (std::size_t s = 0; s < ds.subgrids.size(); ++s) {
        const Box3i b = ds.subgrids[s].logicalBounds();
        for (std::int64_t z = b.lo.z; z < b.hi.z; ++z)
            for (std::int64_t y = b.lo.y; y < b.hi.y; ++y) {
                std::int64_t idx = (b.lo.x - bounds.lo.x) +
                                   ext.x * ((y - bounds.lo.y) + ext.y * (z - bounds.lo.z));
                for (std::int64_t x = b.lo.x; x < b.hi.x; ++x, ++idx) {
                    if (owner[std::size_t(idx)] != 0)
                        return ValidationIssue{ValidationIssue::Kind::Overlap,
                                               owner[std::size_t(idx)] - 1, int(s), {}, {}};
                    owner[std::size_t(idx)] = std::int32_t(s) + 1;
                }
            }
    }

    for (std::int64_t v = 0; v < total; ++v) {
        if (owner[std::size_t(v)] == 0) {
            const std::int64_t x = v % ext.x;
            const std::int64_t y = (v / ext.x) % ext.y;
            const std::int64_t z = v / (ext.x * ext.y);
            const Vec3 probe{double(bounds.lo.x + x) + 0.5, double(bounds.lo.y + y) + 0.5,
                             double(bounds.lo.z + z) + 0.5};
            return ValidationIssue{ValidationIssue::Kind::CoverageGap, -1, -1, probe, {}};
        }
    }
    return std::nullopt;
}

/// Cell accessor: world-space center, width, and the stored channel value at
/// flat index ijk.x + dims.x*(ijk.y + dims.y*ijk.z).
inline Cell cellAt(const AMRDataset& ds, int subgrid, const Vec3i& ijk, int channel) {
    if (subgrid < 0 || std::size_t(subgrid) >= ds.subgrids.size())
        throw IndexOutOfRange("subgrid index out of range");
    const Subgrid& sg = ds.subgrids[std::size_t(subgrid)];
    if (channel < 0 || std::size_t(channel) >= sg.channelData.size())
        throw IndexOutOfRange("channel index out of range");
    if (ijk.x < 0 || ijk.x >= sg.dims.x || ijk.y < 0 || ijk.y >= sg.dims.y ||
        ijk.z < 0 || ijk.z >= sg.dims.z)
        throw IndexOutOfRange("cell index out of range");

    const double w = levelCellWidth(sg.level);
    Cell c;
    c.width = w;
    c.center = {double(sg.lower.x) + (double(ijk.x) + 0.5) * w,
                double(sg.lower.y) + (double(ijk.y) + 0.5) * w,
                double(sg.lower.z) + (double(ijk.z) + 0.5) * w};
    c.value = sg.channelData[std::size_t(channel)][std::size_t(sg.flatIndex(ijk))];
    return c;
}

} // namespace amrflow
