#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "bricks.hpp"
#include "vec.hpp"

namespace amrflow {

/// Convex box of an active brick region: every interior point overlaps
/// exactly the domains of the bricks listed here and no others.
/// finestLevel/finestCellWidth describe the finest cells among those bricks
/// and drive adaptive step sizing.
struct RegionBox {
    BoxD bounds{};
    std::vector<std::uint32_t> brickIDs;  // sorted, duplicate-free
    int finestLevel = 0;
    double finestCellWidth = 1.0;
};

/// Space decomposition over the union of all brick domains: boxes with
/// pairwise disjoint interiors whose union equals the domain union.
struct RegionDecomposition {
    std::vector<RegionBox> boxes;
    BoxD domainUnionBounds{};
};

/// Boundary ownership rule: a box owns p half-open per axis (lo <= p < hi),
/// except that boxes touching the global domain-union maximum also own
/// p == hi there. Makes point location single-valued while keeping the
/// closed union covered.
inline bool regionOwns(const RegionBox& box, const BoxD& unionBounds, const Vec3& p) {
    for (int a = 0; a < 3; ++a) {
        const double v = p[a];
        if (v < box.bounds.lo[a] || v > box.bounds.hi[a]) return false;
        if (v == box.bounds.hi[a] && box.bounds.hi[a] != unionBounds.hi[a]) return false;
    }
    return true;
}

namespace detail {

struct RegionLeaf {
    BoxD bounds{};
    std::vector<std::uint32_t> brickIDs;
};

/// Greedy face-merge of equal-brick-list boxes, one sweep along `axis`.
inline bool mergeRegionPass(std::vector<RegionLeaf>& leaves, int axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    std::sort(leaves.begin(), leaves.end(), [&](const RegionLeaf& a, const RegionLeaf& b) {
        if (a.bounds.lo[u] != b.bounds.lo[u]) return a.bounds.lo[u] < b.bounds.lo[u];
        if (a.bounds.lo[v] != b.bounds.lo[v]) return a.bounds.lo[v] < b.bounds.lo[v];
        return a.bounds.lo[axis] < b.bounds.lo[axis];
    });

    std::vector<RegionLeaf> out;
    out.reserve(leaves.size());
    bool merged = false;
    for (RegionLeaf& leaf : leaves) {
        if (!out.empty()) {
            RegionLeaf& prev = out.back();
            const bool sameSection =
                prev.bounds.lo[u] == leaf.bounds.lo[u] && prev.bounds.hi[u] == leaf.bounds.hi[u] &&
                prev.bounds.lo[v] == leaf.bounds.lo[v] && prev.bounds.hi[v] == leaf.bounds.hi[v];
            if (sameSection && prev.bounds.hi[axis] == leaf.bounds.lo[axis] &&
                prev.brickIDs == leaf.brickIDs) {
                prev.bounds.hi.set(axis, leaf.bounds.hi[axis]);
                merged = true;
                continue;
            }
        }
        out.push_back(std::move(leaf));
    }
    leaves.swap(out);
    return merged;
}

inline void subdivideRegions(const std::vector<BoxD>& domains, const BoxD& box,
                             const std::vector<std::uint32_t>& candidates,
                             std::vector<RegionLeaf>& leaves) {
    std::vector<std::uint32_t> overlapping;
    overlapping.reserve(candidates.size());
    for (std::uint32_t id : candidates)
        if (domains[id].overlapsInterior(box)) overlapping.push_back(id);
    if (overlapping.empty()) return;

    // A split is needed whenever some domain face plane crosses the box
    // interior; below that threshold the overlap set is constant inside.
    int splitAxis = -1;
    double splitPlane = 0.0;
    {
        double bestExtent = -1.0;
        std::vector<double> planes;
        for (int a = 0; a < 3; ++a) {
            planes.clear();
            for (std::uint32_t id : overlapping) {
                const BoxD& d = domains[id];
                if (d.lo[a] > box.lo[a] && d.lo[a] < box.hi[a]) planes.push_back(d.lo[a]);
                if (d.hi[a] > box.lo[a] && d.hi[a] < box.hi[a]) planes.push_back(d.hi[a]);
            }
            if (planes.empty()) continue;
            const double extent = box.hi[a] - box.lo[a];
            if (extent > bestExtent) {
                bestExtent = extent;
                splitAxis = a;
                // Plane nearest the box center; ties resolve to the lower one.
                const double mid = 0.5 * (box.lo[a] + box.hi[a]);
                std::sort(planes.begin(), planes.end());
                double best = planes.front();
                for (double c : planes) {
                    const double dc = std::abs(c - mid);
                    const double db = std::abs(best - mid);
                    if (dc < db) best = c;
                }
                splitPlane = best;
            }
        }
    }

    if (splitAxis < 0) {
        // Every overlapping domain fully contains this box.
        RegionLeaf leaf;
        leaf.bounds = box;
        leaf.brickIDs = overlapping;  // candidate order is ascending already
        leaves.push_back(std::move(leaf));
        return;
    }

    BoxD left = box, right = box;
    left.hi.set(splitAxis, splitPlane);
    right.lo.set(splitAxis, splitPlane);
    subdivideRegions(domains, left, overlapping, leaves);
    subdivideRegions(domains, right, overlapping, leaves);
}

} // namespace detail

/// Builds the region decomposition by recursive kd-subdivision of the domain
/// union's bounding box at domain face planes, then merges adjacent boxes
/// with identical brick lists. Deterministic for a given brick list.
inline RegionDecomposition buildRegions(const std::vector<Brick>& bricks) {
    RegionDecomposition decomp;
    if (bricks.empty()) return decomp;

    std::vector<BoxD> domains(bricks.size());
    std::vector<std::uint32_t> all(bricks.size());
    for (std::size_t i = 0; i < bricks.size(); ++i) {
        domains[i] = brickDomain(bricks[i]);
        all[i] = std::uint32_t(i);
    }

    BoxD root = domains.front();
    for (const BoxD& d : domains) root.expandToFit(d);
    decomp.domainUnionBounds = root;

    std::vector<detail::RegionLeaf> leaves;
    detail::subdivideRegions(domains, root, all, leaves);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int axis = 0; axis < 3; ++axis)
            changed |= detail::mergeRegionPass(leaves, axis);
    }

    std::sort(leaves.begin(), leaves.end(), [](const detail::RegionLeaf& a, const detail::RegionLeaf& b) {
        if (a.bounds.lo.z != b.bounds.lo.z) return a.bounds.lo.z < b.bounds.lo.z;
        if (a.bounds.lo.y != b.bounds.lo.y) return a.bounds.lo.y < b.bounds.lo.y;
        return a.bounds.lo.x < b.bounds.lo.x;
    });

    decomp.boxes.reserve(leaves.size());
    for (detail::RegionLeaf& leaf : leaves) {
        RegionBox rb;
        rb.bounds = leaf.bounds;
        rb.brickIDs = std::move(leaf.brickIDs);
        rb.finestLevel = std::numeric_limits<int>::max();
        for (std::uint32_t id : rb.brickIDs)
            rb.finestLevel = std::min(rb.finestLevel, bricks[id].level);
        rb.finestCellWidth = levelCellWidth(rb.finestLevel);
        decomp.boxes.push_back(std::move(rb));
    }
    return decomp;
}

/// Exhaustive point location under the ownership rule. The exact-arithmetic
/// oracle the accelerated engines are checked against.
inline std::optional<std::uint32_t> locateBoxLinear(const RegionDecomposition& decomp,
                                                    const Vec3& p) {
    for (std::size_t i = 0; i < decomp.boxes.size(); ++i)
        if (regionOwns(decomp.boxes[i], decomp.domainUnionBounds, p))
            return std::uint32_t(i);
    return std::nullopt;
}

/// One line per box: `lo.x lo.y lo.z hi.x hi.y hi.z level brickIDs...`,
/// in decomposition order, for diffing across implementations.
inline void dumpRegions(const RegionDecomposition& decomp, std::ostream& os) {
    for (const RegionBox& b : decomp.boxes) {
        os << b.bounds.lo.x << " " << b.bounds.lo.y << " " << b.bounds.lo.z << " "
           << b.bounds.hi.x << " " << b.bounds.hi.y << " " << b.bounds.hi.z << " "
           << b.finestLevel;
        for (std::uint32_t id : b.brickIDs) os << " " << id;
        os << "\n";
    }
}

} // namespace amrflow
