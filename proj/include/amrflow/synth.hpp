#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "amr.hpp"
#include "errors.hpp"
#include "vec.hpp"

namespace amrflow {

// --- Analytic fields ---

struct ConstantVelocity {
    Vec3 v{1.0, 0.0, 0.0};
};

/// v = axis x (p - center); solid-body rotation about an arbitrary axis.
struct RigidRotation {
    Vec3 center{};
    Vec3 axis{0.0, 0.0, 1.0};
};

/// Arnold-Beltrami-Childress flow:
/// v = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x).
struct AbcFlow {
    double a = 1.0, b = 1.0, c = 1.0;
};

struct ConstantDensity {
    double rho = 1.0;
};

struct RadialGaussianDensity {
    Vec3 center{};
    double sigma = 1.0;
};

using VelocityField = std::variant<ConstantVelocity, RigidRotation, AbcFlow>;
using DensityField = std::variant<ConstantDensity, RadialGaussianDensity>;

/// Ground-truth field: a velocity part feeding velx/vely/velz and a density
/// part feeding rho.
struct AnalyticField {
    VelocityField velocity = ConstantVelocity{};
    DensityField density = ConstantDensity{};

    Vec3 velocityAt(const Vec3& p) const {
        return std::visit(
            [&](const auto& f) -> Vec3 {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ConstantVelocity>) {
                    return f.v;
                } else if constexpr (std::is_same_v<T, RigidRotation>) {
                    return cross(f.axis, p - f.center);
                } else {
                    return {f.a * std::sin(p.z) + f.c * std::cos(p.y),
                            f.b * std::sin(p.x) + f.a * std::cos(p.z),
                            f.c * std::sin(p.y) + f.b * std::cos(p.x)};
                }
            },
            velocity);
    }

    double densityAt(const Vec3& p) const {
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ConstantDensity>) {
                    return f.rho;
                } else {
                    const Vec3 d = p - f.center;
                    return std::exp(-dot(d, d) / (2.0 * f.sigma * f.sigma));
                }
            },
            density);
    }

    /// Channel order is fixed: velx, vely, velz, rho.
    double channelAt(int channel, const Vec3& p) const {
        if (channel < 3) return velocityAt(p)[channel];
        return densityAt(p);
    }
};

inline const std::vector<std::string>& synthChannelNames() {
    static const std::vector<std::string> names{"velx", "vely", "velz", "rho"};
    return names;
}

// --- Refinement rules ---

struct UniformLevel {
    int level = 0;
};

/// Blocks whose volume intersects `box` refine to finerLevel, the rest stay
/// at coarserLevel.
struct RefineInsideBox {
    BoxD box{};
    int finerLevel = 0;
    int coarserLevel = 1;
};

/// Level chosen by the analytic gradient magnitude of one channel at the
/// block center: thresholds ascending, levels one longer, listed from the
/// below-first-threshold band upward.
struct RefineByGradient {
    int channel = 3;  // rho
    std::vector<double> thresholds;
    std::vector<int> levels;
};

/// Level cycles with the parity of the block position (super-block checker
/// pattern). Produces maximally fragmented level interfaces for structure
/// stress tests and benchmarks; not derivable from the analytic field menu.
struct AlternatingLevels {
    std::vector<int> levels{0, 1};
    int period = 1;  // blocks per checker cell
};

using RefinementRule = std::variant<UniformLevel, RefineInsideBox, RefineByGradient, AlternatingLevels>;

namespace detail {

inline int coarsestRuleLevel(const RefinementRule& rule) {
    return std::visit(
        [](const auto& r) -> int {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UniformLevel>) {
                return r.level;
            } else if constexpr (std::is_same_v<T, RefineInsideBox>) {
                return std::max(r.finerLevel, r.coarserLevel);
            } else {
                int lvl = 0;
                for (int l : r.levels) lvl = std::max(lvl, l);
                return lvl;
            }
        },
        rule);
}

inline double gradientMagnitude(const AnalyticField& field, int channel, const Vec3& p) {
    const double h = 0.5;
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
        Vec3 lo = p, hi = p;
        lo.set(a, p[a] - h);
        hi.set(a, p[a] + h);
        g.set(a, (field.channelAt(channel, hi) - field.channelAt(channel, lo)) / (2.0 * h));
    }
    return length(g);
}

inline int ruleLevelForBlock(const RefinementRule& rule, const AnalyticField& field,
                             const BoxD& blockBox, const Vec3i& blockIdx) {
    return std::visit(
        [&](const auto& r) -> int {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UniformLevel>) {
                return r.level;
            } else if constexpr (std::is_same_v<T, RefineInsideBox>) {
                return blockBox.overlapsInterior(r.box) ? r.finerLevel : r.coarserLevel;
            } else if constexpr (std::is_same_v<T, RefineByGradient>) {
                const double g = gradientMagnitude(field, r.channel, blockBox.center());
                std::size_t band = 0;
                while (band < r.thresholds.size() && g >= r.thresholds[band]) ++band;
                return r.levels[band];
            } else {
                const std::int64_t cell = (blockIdx.x / r.period) + (blockIdx.y / r.period) +
                                          (blockIdx.z / r.period);
                return r.levels[std::size_t(cell % std::int64_t(r.levels.size()))];
            }
        },
        rule);
}

} // namespace detail

/// Tiles `bounds` with cubic blocks of blockSize cells at the rule's
/// coarsest level, emits each block as one subgrid at the level the rule
/// picks, and fills all four channels from the analytic field at cell
/// centers. The result always passes validation.
inline AMRDataset generate(const Box3i& bounds, const AnalyticField& field,
                           const RefinementRule& rule, int blockSize) {
    if (blockSize < 1) throw InvalidTiling("block size must be >= 1");
    const int coarsest = detail::coarsestRuleLevel(rule);
    const std::int64_t blockWidth = std::int64_t(blockSize) * levelCellWidthInt(coarsest);

    const Vec3i ext = bounds.extent();
    for (int a = 0; a < 3; ++a) {
        if (ext[a] <= 0) throw InvalidTiling("bounds must have positive extent");
        if (ext[a] % blockWidth != 0 || bounds.lo[a] % blockWidth != 0)
            throw InvalidTiling("bounds not divisible into blocks of " +
                                std::to_string(blockWidth) + " world units");
    }

    AMRDataset ds;
    ds.channels = synthChannelNames();

    const Vec3i nBlocks{ext.x / blockWidth, ext.y / blockWidth, ext.z / blockWidth};
    for (std::int64_t bz = 0; bz < nBlocks.z; ++bz)
        for (std::int64_t by = 0; by < nBlocks.y; ++by)
            for (std::int64_t bx = 0; bx < nBlocks.x; ++bx) {
                const Vec3i lower = bounds.lo + Vec3i{bx, by, bz} * blockWidth;
                const BoxD blockBox =
                    Box3i{lower, lower + Vec3i{blockWidth, blockWidth, blockWidth}}.toBoxD();
                const int level =
                    detail::ruleLevelForBlock(rule, field, blockBox, {bx, by, bz});
                if (level < 0 || level > coarsest)
                    throw InvalidTiling("rule produced a level outside [0, coarsest]");

                Subgrid sg;
                sg.level = level;
                sg.lower = lower;
                const std::int64_t cellsPerAxis = blockWidth / levelCellWidthInt(level);
                sg.dims = {cellsPerAxis, cellsPerAxis, cellsPerAxis};
                sg.channelData.assign(ds.channels.size(),
                                      std::vector<double>(std::size_t(sg.cellCount())));
                const double w = levelCellWidth(level);
                std::size_t flat = 0;
                for (std::int64_t k = 0; k < cellsPerAxis; ++k)
                    for (std::int64_t j = 0; j < cellsPerAxis; ++j)
                        for (std::int64_t i = 0; i < cellsPerAxis; ++i, ++flat) {
                            const Vec3 center{double(lower.x) + (double(i) + 0.5) * w,
                                              double(lower.y) + (double(j) + 0.5) * w,
                                              double(lower.z) + (double(k) + 0.5) * w};
                            for (int c = 0; c < int(ds.channels.size()); ++c)
                                sg.channelData[std::size_t(c)][flat] = field.channelAt(c, center);
                        }
                ds.subgrids.push_back(std::move(sg));
            }

    ds.finalize();
    return ds;
}

// --- Named presets ---
// All numeric test fixtures reference these by name, so their definitions
// are part of the compatibility surface.

struct Preset {
    std::string name;
    std::string description;
    Box3i bounds{};
    AnalyticField field;
    RefinementRule rule;
    int blockSize = 4;
};

inline const std::vector<Preset>& presetCatalog() {
    static const std::vector<Preset> catalog = [] {
        std::vector<Preset> p;

        p.push_back({"uniform",
                     "single-level unit-velocity field on [0,8]^3",
                     {{0, 0, 0}, {8, 8, 8}},
                     {ConstantVelocity{{1.0, 0.0, 0.0}}, ConstantDensity{1.0}},
                     UniformLevel{0},
                     4});

        p.push_back({"two-level-slab",
                     "fine slab x<8 at level 0, coarse slab x>=8 at level 1, unit velocity",
                     {{0, 0, 0}, {16, 8, 8}},
                     {ConstantVelocity{{1.0, 0.0, 0.0}}, ConstantDensity{1.0}},
                     RefineInsideBox{{{0.0, 0.0, 0.0}, {8.0, 8.0, 8.0}}, 0, 1},
                     4});

        p.push_back({"three-level-core-rotation",
                     "rigid rotation about the z axis through (16,16,16); refinement bands "
                     "from the gaussian density gradient give a level-0 core",
                     {{0, 0, 0}, {32, 32, 32}},
                     {RigidRotation{{16.0, 16.0, 16.0}, {0.0, 0.0, 1.0}},
                      RadialGaussianDensity{{16.0, 16.0, 16.0}, 6.0}},
                     RefineByGradient{3, {0.005, 0.05}, {2, 1, 0}},
                     2});

        p.push_back({"abc-multilevel",
                     "ABC flow with three gradient-banded levels",
                     {{0, 0, 0}, {32, 32, 32}},
                     {AbcFlow{1.0, 1.0, 1.0}, RadialGaussianDensity{{16.0, 16.0, 16.0}, 10.0}},
                     RefineByGradient{3, {0.03, 0.05}, {2, 1, 0}},
                     2});

        p.push_back({"checker-bench",
                     "two-level checkerboard with maximally fragmented region structure, "
                     "constant oblique velocity; benchmark fixture",
                     {{0, 0, 0}, {24, 24, 24}},
                     {ConstantVelocity{{1.0, 0.6, 0.3}}, ConstantDensity{1.0}},
                     AlternatingLevels{{0, 1}, 2},
                     1});

        return p;
    }();
    return catalog;
}

inline const Preset* findPreset(std::string_view name) {
    for (const Preset& p : presetCatalog())
        if (p.name == name) return &p;
    return nullptr;
}

inline AMRDataset generatePreset(std::string_view name) {
    const Preset* p = findPreset(name);
    if (!p) throw Error("unknown preset '" + std::string(name) + "'");
    return generate(p->bounds, p->field, p->rule, p->blockSize);
}

} // namespace amrflow
