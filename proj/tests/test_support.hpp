#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately avoid the acceleration structures: reconstruction is summed
// over every cell of every subgrid, domain membership is a closed-box scan,
// and trilinear interpolation is the textbook formula over looked-up centers.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <vector>

#include <unistd.h>

#include <amrflow/amrflow.hpp>

namespace testsupport {

using namespace amrflow;

/// Builds a dataset from (level, lower, dims) triples, filling every channel
/// from a callable (channelIndex, cellCenter) -> double.
inline AMRDataset makeDataset(
    const std::vector<std::tuple<int, Vec3i, Vec3i>>& subgridSpecs,
    const std::vector<std::string>& channels,
    const std::function<double(int, const Vec3&)>& value) {
    AMRDataset ds;
    ds.channels = channels;
    for (const auto& [level, lower, dims] : subgridSpecs) {
        Subgrid sg;
        sg.level = level;
        sg.lower = lower;
        sg.dims = dims;
        const double w = levelCellWidth(level);
        sg.channelData.assign(channels.size(), std::vector<double>(std::size_t(sg.cellCount())));
        std::size_t flat = 0;
        for (std::int64_t k = 0; k < dims.z; ++k)
            for (std::int64_t j = 0; j < dims.y; ++j)
                for (std::int64_t i = 0; i < dims.x; ++i, ++flat) {
                    const Vec3 center{double(lower.x) + (double(i) + 0.5) * w,
                                      double(lower.y) + (double(j) + 0.5) * w,
                                      double(lower.z) + (double(k) + 0.5) * w};
                    for (std::size_t c = 0; c < channels.size(); ++c)
                        sg.channelData[c][flat] = value(int(c), center);
                }
        ds.subgrids.push_back(std::move(sg));
    }
    ds.finalize();
    return ds;
}

/// Basis-method reconstruction over the whole dataset, no acceleration
/// structure: sum(H*v)/sum(H) across every cell of every subgrid.
inline std::optional<double> bruteForceBasisEval(const AMRDataset& ds, int channel,
                                                 const Vec3& p) {
    double vsum = 0.0, wsum = 0.0;
    for (const Subgrid& sg : ds.subgrids) {
        const double w = levelCellWidth(sg.level);
        std::size_t flat = 0;
        for (std::int64_t k = 0; k < sg.dims.z; ++k)
            for (std::int64_t j = 0; j < sg.dims.y; ++j)
                for (std::int64_t i = 0; i < sg.dims.x; ++i, ++flat) {
                    Cell cell;
                    cell.width = w;
                    cell.center = {double(sg.lower.x) + (double(i) + 0.5) * w,
                                   double(sg.lower.y) + (double(j) + 0.5) * w,
                                   double(sg.lower.z) + (double(k) + 0.5) * w};
                    cell.value = sg.channelData[std::size_t(channel)][flat];
                    const double h = hatWeight(cell, p);
                    wsum += h;
                    vsum += h * cell.value;
                }
    }
    if (wsum == 0.0) return std::nullopt;
    return vsum / wsum;
}

/// Stored value at the cell whose center is exactly `center` at `level`, if
/// any subgrid of that level holds it.
inline std::optional<double> valueAtCenter(const AMRDataset& ds, int channel, int level,
                                           const Vec3& center) {
    const double w = levelCellWidth(level);
    for (const Subgrid& sg : ds.subgrids) {
        if (sg.level != level) continue;
        const Vec3 rel = center - sg.lower.toVec3();
        const std::int64_t i = std::int64_t(std::floor(rel.x / w));
        const std::int64_t j = std::int64_t(std::floor(rel.y / w));
        const std::int64_t k = std::int64_t(std::floor(rel.z / w));
        if (i < 0 || i >= sg.dims.x || j < 0 || j >= sg.dims.y || k < 0 || k >= sg.dims.z)
            continue;
        const Vec3 c{double(sg.lower.x) + (double(i) + 0.5) * w,
                     double(sg.lower.y) + (double(j) + 0.5) * w,
                     double(sg.lower.z) + (double(k) + 0.5) * w};
        if (c == center) return sg.channelData[std::size_t(channel)][std::size_t(sg.flatIndex({i, j, k}))];
    }
    return std::nullopt;
}

/// Textbook trilinear interpolation from the 8 same-level cell centers
/// around p. Returns nullopt when any corner value is missing at that level.
inline std::optional<double> trilinearOracle(const AMRDataset& ds, int channel, int level,
                                             const Vec3& p) {
    const double w = levelCellWidth(level);
    double base[3], frac[3];
    for (int a = 0; a < 3; ++a) {
        const double rel = p[a] / w - 0.5;
        base[a] = std::floor(rel);
        frac[a] = rel - base[a];
    }
    double corner[2][2][2];
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const Vec3 center{(base[0] + dx + 0.5) * w, (base[1] + dy + 0.5) * w,
                                  (base[2] + dz + 0.5) * w};
                const auto v = valueAtCenter(ds, channel, level, center);
                if (!v) return std::nullopt;
                corner[dz][dy][dx] = *v;
            }
    auto lerp = [](double a, double b, double t) { return a * (1.0 - t) + b * t; };
    double cy[2][2];
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            cy[dz][dy] = lerp(corner[dz][dy][0], corner[dz][dy][1], frac[0]);
    double cz[2];
    for (int dz = 0; dz < 2; ++dz) cz[dz] = lerp(cy[dz][0], cy[dz][1], frac[1]);
    return lerp(cz[0], cz[1], frac[2]);
}

/// Closed-box domain membership by exhaustive scan.
inline std::vector<std::uint32_t> scanDomains(const std::vector<Brick>& bricks, const Vec3& p) {
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < bricks.size(); ++i)
        if (brickDomain(bricks[i]).containsClosed(p)) ids.push_back(std::uint32_t(i));
    return ids;
}

/// Self-cleaning unique temporary directory.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            auto candidate = base / ("amrflow_test_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct BuiltPreset {
    AMRDataset ds;
    std::vector<Brick> bricks;
    RegionDecomposition decomp;
};

inline BuiltPreset buildPreset(std::string_view name) {
    BuiltPreset b;
    b.ds = generatePreset(name);
    b.bricks = buildBricks(b.ds);
    b.decomp = buildRegions(b.bricks);
    return b;
}

} // namespace testsupport
