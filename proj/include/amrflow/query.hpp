#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "regions.hpp"
#include "vec.hpp"

namespace amrflow {

/// A point containment query phrased as a ray of length zero: tMin = tMax = 0
/// and an arbitrary non-zero direction. Containment logic only ever reads the
/// origin; the ray fields document the traversal mechanism being emulated.
struct PointQuery {
    Vec3 origin{};
    double tMin = 0.0;
    double tMax = 0.0;
    Vec3 direction{1.0, 1.0, 1.0};

    PointQuery() = default;
    explicit PointQuery(const Vec3& o) : origin(o) {}
};

struct QueryCounters {
    std::uint64_t nodesVisited = 0;
    std::uint64_t leavesTested = 0;
    std::uint64_t queries = 0;
};

/// Contention-safe traversal counters. Totals are exact; interleaving across
/// threads is unspecified.
class QueryStats {
public:
    void addNodes(std::uint64_t n) const { nodesVisited_.fetch_add(n, std::memory_order_relaxed); }
    void addLeaves(std::uint64_t n) const { leavesTested_.fetch_add(n, std::memory_order_relaxed); }
    void addQuery() const { queries_.fetch_add(1, std::memory_order_relaxed); }

    void reset() const {
        nodesVisited_.store(0, std::memory_order_relaxed);
        leavesTested_.store(0, std::memory_order_relaxed);
        queries_.store(0, std::memory_order_relaxed);
    }

    QueryCounters snapshot() const {
        return {nodesVisited_.load(std::memory_order_relaxed),
                leavesTested_.load(std::memory_order_relaxed),
                queries_.load(std::memory_order_relaxed)};
    }

private:
    mutable std::atomic<std::uint64_t> nodesVisited_{0};
    mutable std::atomic<std::uint64_t> leavesTested_{0};
    mutable std::atomic<std::uint64_t> queries_{0};
};

/// Result of a point query: the owning region box, its brick list, and the
/// finest cell width of those bricks.
struct RegionHit {
    std::uint32_t boxIndex = 0;
    std::span<const std::uint32_t> brickIDs;
    double finestCellWidth = 1.0;
};

namespace detail {

inline RegionHit makeHit(const RegionDecomposition& d, std::uint32_t idx) {
    const RegionBox& b = d.boxes[idx];
    return {idx, std::span<const std::uint32_t>(b.brickIDs), b.finestCellWidth};
}

inline void requirePoint(const PointQuery& q) {
    if (q.tMin != 0.0 || q.tMax != 0.0)
        throw Error("point queries require tMin == tMax == 0");
}

} // namespace detail

/// Exhaustive-scan engine. Slow but obviously correct; the reference the
/// tree engines are validated against.
class LinearScanEngine {
public:
    LinearScanEngine() = default;
    explicit LinearScanEngine(const RegionDecomposition& decomp, bool enableStats = false)
        : decomp_(&decomp) {
        if (enableStats) stats_ = std::make_unique<QueryStats>();
    }

    std::optional<RegionHit> locate(const Vec3& p) const {
        if (stats_) stats_->addQuery();
        const auto& boxes = decomp_->boxes;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (stats_) stats_->addLeaves(1);
            if (regionOwns(boxes[i], decomp_->domainUnionBounds, p))
                return detail::makeHit(*decomp_, std::uint32_t(i));
        }
        return std::nullopt;
    }

    std::optional<RegionHit> query(const PointQuery& q) const {
        detail::requirePoint(q);
        return locate(q.origin);
    }

    bool statsEnabled() const { return stats_ != nullptr; }
    const QueryStats& stats() const {
        if (!stats_) throw StatsDisabled("engine was built without stats");
        return *stats_;
    }

    const RegionDecomposition& decomposition() const { return *decomp_; }

private:
    const RegionDecomposition* decomp_ = nullptr;
    std::unique_ptr<QueryStats> stats_;
};

/// Binary BVH over region box bounds, traversed with an explicit stack the
/// way a zero-length ray walks a hardware BVH: descend into every node whose
/// bounds contain the origin, test boxes at the leaves, stop at the first
/// owner (sound because box interiors are disjoint).
class BvhEngine {
public:
    static constexpr int kMaxStackDepth = 64;

    BvhEngine() = default;
    explicit BvhEngine(const RegionDecomposition& decomp, bool enableStats = false)
        : decomp_(&decomp) {
        if (enableStats) stats_ = std::make_unique<QueryStats>();
        build();
    }

    struct Node {
        BoxD bounds{};
        std::uint32_t left = 0;   // child nodes when count == 0
        std::uint32_t right = 0;
        std::uint32_t first = 0;  // box slot range when count > 0
        std::uint32_t count = 0;
    };

    std::optional<RegionHit> locate(const Vec3& p) const {
        if (stats_) stats_->addQuery();
        if (nodes_.empty()) return std::nullopt;

        std::uint32_t stack[kMaxStackDepth];
        int sp = 0;
        stack[sp++] = 0;
        std::uint64_t nodesVisited = 0, leavesTested = 0;
        std::optional<RegionHit> result;

        while (sp > 0) {
            const Node& node = nodes_[stack[--sp]];
            ++nodesVisited;
            if (!node.bounds.containsClosed(p)) continue;
            if (node.count > 0) {
                for (std::uint32_t s = node.first; s < node.first + node.count; ++s) {
                    ++leavesTested;
                    const std::uint32_t boxIdx = order_[s];
                    // Leaf hits are re-checked against the actual box: the
                    // traversal contract treats leaf visits as candidates.
                    if (regionOwns(decomp_->boxes[boxIdx], decomp_->domainUnionBounds, p)) {
                        result = detail::makeHit(*decomp_, boxIdx);
                        sp = 0;
                        break;
                    }
                }
            } else {
                if (sp + 2 > kMaxStackDepth)
                    throw TraversalOverflow("BVH traversal stack exceeded");
                stack[sp++] = node.left;
                stack[sp++] = node.right;
            }
        }
        if (stats_) {
            stats_->addNodes(nodesVisited);
            stats_->addLeaves(leavesTested);
        }
        return result;
    }

    std::optional<RegionHit> query(const PointQuery& q) const {
        detail::requirePoint(q);
        return locate(q.origin);
    }

    bool statsEnabled() const { return stats_ != nullptr; }
    const QueryStats& stats() const {
        if (!stats_) throw StatsDisabled("engine was built without stats");
        return *stats_;
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::uint32_t>& boxOrder() const { return order_; }
    const RegionDecomposition& decomposition() const { return *decomp_; }

private:
    void build() {
        const std::size_t n = decomp_->boxes.size();
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0u);
        nodes_.reserve(2 * n);
        if (n > 0) buildNode(0, std::uint32_t(n));
    }

    // Top-down median split on the longest axis of the centroid bounds.
    // Leaves hold a single box; a median split always separates because
    // disjoint boxes cannot share a centroid.
    std::uint32_t buildNode(std::uint32_t first, std::uint32_t count) {
        const std::uint32_t nodeIdx = std::uint32_t(nodes_.size());
        nodes_.push_back({});

        BoxD bounds = decomp_->boxes[order_[first]].bounds;
        BoxD centroids{bounds.center(), bounds.center()};
        for (std::uint32_t i = first; i < first + count; ++i) {
            const BoxD& bb = decomp_->boxes[order_[i]].bounds;
            bounds.expandToFit(bb);
            centroids.expandToFit(bb.center());
        }
        nodes_[nodeIdx].bounds = bounds;

        if (count <= 1) {
            nodes_[nodeIdx].first = first;
            nodes_[nodeIdx].count = count;
            return nodeIdx;
        }

        int axis = 0;
        const Vec3 ext = centroids.extent();
        if (ext.y > ext[axis]) axis = 1;
        if (ext.z > ext[axis]) axis = 2;

        std::sort(order_.begin() + first, order_.begin() + first + count,
                  [&](std::uint32_t a, std::uint32_t b) {
                      const double ca = decomp_->boxes[a].bounds.center()[axis];
                      const double cb = decomp_->boxes[b].bounds.center()[axis];
                      if (ca != cb) return ca < cb;
                      return a < b;
                  });

        const std::uint32_t mid = count / 2;
        const std::uint32_t left = buildNode(first, mid);
        const std::uint32_t right = buildNode(first + mid, count - mid);
        nodes_[nodeIdx].left = left;
        nodes_[nodeIdx].right = right;
        nodes_[nodeIdx].count = 0;
        return nodeIdx;
    }

    const RegionDecomposition* decomp_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::unique_ptr<QueryStats> stats_;
};

/// Kd-tree over the region boxes, split at box face planes until every leaf
/// cell intersects at most one box. A query is a single root-to-leaf descent
/// plus one ownership test at the leaf.
class KdTreeEngine {
public:
    KdTreeEngine() = default;
    explicit KdTreeEngine(const RegionDecomposition& decomp, bool enableStats = false)
        : decomp_(&decomp) {
        if (enableStats) stats_ = std::make_unique<QueryStats>();
        build();
    }

    struct Node {
        int axis = -1;          // -1 marks a leaf
        double split = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        std::int32_t leafBox = -1;  // -1 means outside every box
    };

    std::optional<RegionHit> locate(const Vec3& p) const {
        if (stats_) stats_->addQuery();
        if (nodes_.empty() || !decomp_->domainUnionBounds.containsClosed(p)) return std::nullopt;

        std::uint64_t visited = 0;
        std::uint32_t idx = 0;
        while (true) {
            const Node& node = nodes_[idx];
            ++visited;
            if (node.axis < 0) {
                std::optional<RegionHit> result;
                if (node.leafBox >= 0) {
                    if (stats_) stats_->addLeaves(1);
                    const std::uint32_t boxIdx = std::uint32_t(node.leafBox);
                    if (regionOwns(decomp_->boxes[boxIdx], decomp_->domainUnionBounds, p))
                        result = detail::makeHit(*decomp_, boxIdx);
                }
                if (stats_) stats_->addNodes(visited);
                return result;
            }
            idx = p[node.axis] < node.split ? node.left : node.right;
        }
    }

    std::optional<RegionHit> query(const PointQuery& q) const {
        detail::requirePoint(q);
        return locate(q.origin);
    }

    bool statsEnabled() const { return stats_ != nullptr; }
    const QueryStats& stats() const {
        if (!stats_) throw StatsDisabled("engine was built without stats");
        return *stats_;
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const RegionDecomposition& decomposition() const { return *decomp_; }

private:
    void build() {
        if (decomp_->boxes.empty()) return;
        std::vector<std::uint32_t> all(decomp_->boxes.size());
        std::iota(all.begin(), all.end(), 0u);
        buildNode(decomp_->domainUnionBounds, all);
    }

    std::uint32_t buildNode(const BoxD& cell, const std::vector<std::uint32_t>& candidates) {
        std::vector<std::uint32_t> overlapping;
        overlapping.reserve(candidates.size());
        for (std::uint32_t id : candidates)
            if (decomp_->boxes[id].bounds.overlapsInterior(cell)) overlapping.push_back(id);

        const std::uint32_t nodeIdx = std::uint32_t(nodes_.size());
        nodes_.push_back({});

        if (overlapping.size() <= 1) {
            nodes_[nodeIdx].leafBox = overlapping.empty() ? -1 : std::int32_t(overlapping[0]);
            return nodeIdx;
        }

        // Longest cell axis that has a box face strictly inside; split at the
        // median of those face coordinates.
        int axis = -1;
        double split = 0.0;
        double bestExtent = -1.0;
        std::vector<double> planes;
        for (int a = 0; a < 3; ++a) {
            planes.clear();
            for (std::uint32_t id : overlapping) {
                const BoxD& b = decomp_->boxes[id].bounds;
                if (b.lo[a] > cell.lo[a] && b.lo[a] < cell.hi[a]) planes.push_back(b.lo[a]);
                if (b.hi[a] > cell.lo[a] && b.hi[a] < cell.hi[a]) planes.push_back(b.hi[a]);
            }
            if (planes.empty()) continue;
            const double extent = cell.hi[a] - cell.lo[a];
            if (extent > bestExtent) {
                bestExtent = extent;
                axis = a;
                std::sort(planes.begin(), planes.end());
                planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
                split = planes[(planes.size() - 1) / 2];
            }
        }
        // Disjoint boxes both overlapping the cell guarantee a candidate face.
        if (axis < 0) throw Error("kd build: no separating plane for overlapping boxes");

        BoxD leftCell = cell, rightCell = cell;
        leftCell.hi.set(axis, split);
        rightCell.lo.set(axis, split);
        const std::uint32_t left = buildNode(leftCell, overlapping);
        const std::uint32_t right = buildNode(rightCell, overlapping);
        nodes_[nodeIdx].axis = axis;
        nodes_[nodeIdx].split = split;
        nodes_[nodeIdx].left = left;
        nodes_[nodeIdx].right = right;
        return nodeIdx;
    }

    const RegionDecomposition* decomp_ = nullptr;
    std::vector<Node> nodes_;
    std::unique_ptr<QueryStats> stats_;
};

enum class EngineKind { Brute, Bvh, KdTree };

inline const char* engineKindName(EngineKind k) {
    switch (k) {
        case EngineKind::Brute: return "brute";
        case EngineKind::Bvh: return "bvh";
        case EngineKind::KdTree: return "kdtree";
    }
    return "?";
}

inline std::optional<EngineKind> engineKindByName(std::string_view name) {
    if (name == "brute") return EngineKind::Brute;
    if (name == "bvh") return EngineKind::Bvh;
    if (name == "kdtree") return EngineKind::KdTree;
    return std::nullopt;
}

/// Type-erased engine for call sites that pick the implementation at runtime.
class AnyEngine {
public:
    AnyEngine() = default;
    AnyEngine(EngineKind kind, const RegionDecomposition& decomp, bool enableStats = false) {
        switch (kind) {
            case EngineKind::Brute: impl_ = LinearScanEngine(decomp, enableStats); break;
            case EngineKind::Bvh: impl_ = BvhEngine(decomp, enableStats); break;
            case EngineKind::KdTree: impl_ = KdTreeEngine(decomp, enableStats); break;
        }
    }

    std::optional<RegionHit> locate(const Vec3& p) const {
        return std::visit([&](const auto& e) { return e.locate(p); }, impl_);
    }
    std::optional<RegionHit> query(const PointQuery& q) const {
        return std::visit([&](const auto& e) { return e.query(q); }, impl_);
    }
    bool statsEnabled() const {
        return std::visit([](const auto& e) { return e.statsEnabled(); }, impl_);
    }
    const QueryStats& stats() const {
        return std::visit([](const auto& e) -> const QueryStats& { return e.stats(); }, impl_);
    }
    const RegionDecomposition& decomposition() const {
        return std::visit(
            [](const auto& e) -> const RegionDecomposition& { return e.decomposition(); }, impl_);
    }

private:
    std::variant<LinearScanEngine, BvhEngine, KdTreeEngine> impl_;
};

} // namespace amrflow
