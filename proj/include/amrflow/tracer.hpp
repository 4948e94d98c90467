#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "amr.hpp"
#include "bricks.hpp"
#include "errors.hpp"
#include "query.hpp"
#include "reconstruct.hpp"
#include "rng.hpp"

namespace amrflow {

enum class Integrator { Euler, RK4 };

enum class ParticleStatus : std::uint8_t { Active, LeftDomain, Stagnant, Finished };

inline const char* particleStatusName(ParticleStatus s) {
    switch (s) {
        case ParticleStatus::Active: return "active";
        case ParticleStatus::LeftDomain: return "left-domain";
        case ParticleStatus::Stagnant: return "stagnant";
        case ParticleStatus::Finished: return "finished";
    }
    return "?";
}

struct TracerConfig {
    Integrator integrator = Integrator::RK4;
    /// Dimensionless step length; each stage displacement is v * baseStep *
    /// finest cell width of the sampled region.
    double baseStep = 0.5;
    int maxSteps = 1000;
    double stagnantSpeedEps = 1e-12;
    bool normalizeVelocity = false;
    int batchSize = 16;
};

/// Dense seeds x steps trajectory storage. Row s holds the full trajectory
/// of seed s: position 0 is the seed, entries past stepsTaken[s] are
/// unwritten. Each row is touched by exactly one worker during advancement.
struct TraceBuffer {
    int numSeeds = 0;
    int maxSteps = 0;
    std::vector<Vec3> positions;
    std::vector<int> stepsTaken;
    std::vector<ParticleStatus> status;

    TraceBuffer() = default;
    TraceBuffer(std::span<const Vec3> seeds, int maxSteps_)
        : numSeeds(int(seeds.size())),
          maxSteps(maxSteps_),
          positions(std::size_t(seeds.size()) * std::size_t(maxSteps_ + 1)),
          stepsTaken(seeds.size(), 0),
          status(seeds.size(),
                 maxSteps_ == 0 ? ParticleStatus::Finished : ParticleStatus::Active) {
        for (std::size_t s = 0; s < seeds.size(); ++s) positions[rowOffset(int(s))] = seeds[s];
    }

    std::size_t rowOffset(int seed) const {
        return std::size_t(seed) * std::size_t(maxSteps + 1);
    }
    Vec3& pos(int seed, int step) { return positions[rowOffset(seed) + std::size_t(step)]; }
    const Vec3& pos(int seed, int step) const {
        return positions[rowOffset(seed) + std::size_t(step)];
    }

    int countWithStatus(ParticleStatus s) const {
        return int(std::count(status.begin(), status.end(), s));
    }
    bool anyActive() const {
        return std::any_of(status.begin(), status.end(),
                           [](ParticleStatus s) { return s == ParticleStatus::Active; });
    }
};

struct StepOutcome {
    enum class Kind { Advanced, LeftDomain, Stagnant } kind = Kind::Advanced;
    Vec3 position{};
};

namespace detail {

inline Vec3 stageDirection(const VectorSample& s, const TracerConfig& cfg) {
    const Vec3 v = cfg.normalizeVelocity ? normalized(s.value) : s.value;
    return v * (cfg.baseStep * s.finestCellWidth);
}

} // namespace detail

/// One classic fourth-order Runge-Kutta step. Every stage samples the field
/// and is scaled by the finest cell width of its own region, so a step that
/// starts in a coarse region can undersample across a level boundary; that
/// behavior is intentional. Any stage sampling outside the domain terminates
/// the particle at its last committed position.
template <typename Sampler>
inline StepOutcome rkStep(Sampler&& sample, const Vec3& p, const TracerConfig& cfg) {
    const auto s1 = sample(p);
    if (!s1) return {StepOutcome::Kind::LeftDomain, {}};
    if (length(s1->value) < cfg.stagnantSpeedEps) return {StepOutcome::Kind::Stagnant, {}};
    const Vec3 d1 = detail::stageDirection(*s1, cfg);

    const auto s2 = sample(p + d1 * 0.5);
    if (!s2) return {StepOutcome::Kind::LeftDomain, {}};
    const Vec3 d2 = detail::stageDirection(*s2, cfg);

    const auto s3 = sample(p + d2 * 0.5);
    if (!s3) return {StepOutcome::Kind::LeftDomain, {}};
    const Vec3 d3 = detail::stageDirection(*s3, cfg);

    const auto s4 = sample(p + d3);
    if (!s4) return {StepOutcome::Kind::LeftDomain, {}};
    const Vec3 d4 = detail::stageDirection(*s4, cfg);

    return {StepOutcome::Kind::Advanced, p + (d1 + d2 * 2.0 + d3 * 2.0 + d4) / 6.0};
}

/// One forward Euler step: a single sample scaled like an RK stage.
template <typename Sampler>
inline StepOutcome eulerStep(Sampler&& sample, const Vec3& p, const TracerConfig& cfg) {
    const auto s = sample(p);
    if (!s) return {StepOutcome::Kind::LeftDomain, {}};
    if (length(s->value) < cfg.stagnantSpeedEps) return {StepOutcome::Kind::Stagnant, {}};
    return {StepOutcome::Kind::Advanced, p + detail::stageDirection(*s, cfg)};
}

/// Velocity channel indices, resolved once against the dataset.
struct ChannelTriple {
    int x = 0, y = 1, z = 2;
};

inline ChannelTriple resolveVelocityChannels(const AMRDataset& ds, std::string_view cx = "velx",
                                             std::string_view cy = "vely",
                                             std::string_view cz = "velz") {
    const int ix = ds.channelIndex(cx);
    const int iy = ds.channelIndex(cy);
    const int iz = ds.channelIndex(cz);
    if (ix < 0 || iy < 0 || iz < 0)
        throw Error("dataset does not provide the requested velocity channels");
    return {ix, iy, iz};
}

namespace detail {

template <typename Engine>
inline void advanceRange(TraceBuffer& buf, const Engine& engine, const AMRDataset& ds,
                         const std::vector<Brick>& bricks, const ChannelTriple& ch,
                         const TracerConfig& cfg, int steps, int first, int last,
                         const SampleOptions& opts) {
    const auto sample = [&](const Vec3& q) {
        return sampleDirection(engine, ds, bricks, ch.x, ch.y, ch.z, q, opts);
    };
    for (int s = first; s < last; ++s) {
        if (buf.status[std::size_t(s)] != ParticleStatus::Active) continue;
        int taken = buf.stepsTaken[std::size_t(s)];
        for (int k = 0; k < steps && taken < buf.maxSteps; ++k) {
            const Vec3 p = buf.pos(s, taken);
            const StepOutcome out = cfg.integrator == Integrator::RK4
                                        ? rkStep(sample, p, cfg)
                                        : eulerStep(sample, p, cfg);
            if (out.kind == StepOutcome::Kind::LeftDomain) {
                buf.status[std::size_t(s)] = ParticleStatus::LeftDomain;
                break;
            }
            if (out.kind == StepOutcome::Kind::Stagnant) {
                buf.status[std::size_t(s)] = ParticleStatus::Stagnant;
                break;
            }
            ++taken;
            buf.pos(s, taken) = out.position;
        }
        buf.stepsTaken[std::size_t(s)] = taken;
        if (taken == buf.maxSteps) buf.status[std::size_t(s)] = ParticleStatus::Finished;
    }
}

} // namespace detail

/// Advances every active particle by up to `steps` integration steps.
/// Parallelism is over particles; each row is written by one worker and the
/// result is identical for any thread count or schedule.
template <typename Engine>
inline void advance(TraceBuffer& buf, const Engine& engine, const AMRDataset& ds,
                    const std::vector<Brick>& bricks, const ChannelTriple& ch,
                    const TracerConfig& cfg, int steps, int numThreads = 1,
                    const SampleOptions& opts = {}) {
    if (steps < 1) throw Error("advance requires steps >= 1");
    numThreads = std::max(1, std::min(numThreads, buf.numSeeds));
    if (numThreads == 1) {
        detail::advanceRange(buf, engine, ds, bricks, ch, cfg, steps, 0, buf.numSeeds, opts);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(std::size_t(numThreads));
    const int chunk = (buf.numSeeds + numThreads - 1) / numThreads;
    for (int t = 0; t < numThreads; ++t) {
        const int first = t * chunk;
        const int last = std::min(buf.numSeeds, first + chunk);
        if (first >= last) break;
        workers.emplace_back([&, first, last] {
            detail::advanceRange(buf, engine, ds, bricks, ch, cfg, steps, first, last, opts);
        });
    }
    for (std::thread& w : workers) w.join();
}

/// Runs the progressive loop to completion: batched advances until no
/// particle is active.
template <typename Engine>
inline TraceBuffer traceToEnd(std::span<const Vec3> seeds, const Engine& engine,
                              const AMRDataset& ds, const std::vector<Brick>& bricks,
                              const ChannelTriple& ch, const TracerConfig& cfg,
                              int numThreads = 1, const SampleOptions& opts = {}) {
    if (seeds.empty()) throw Error("traceToEnd requires at least one seed");
    TraceBuffer buf(seeds, cfg.maxSteps);
    const int batch = std::max(1, cfg.batchSize);
    while (buf.anyActive())
        advance(buf, engine, ds, bricks, ch, cfg, batch, numThreads, opts);
    return buf;
}

// --- Seed generation ---

struct ExplicitList {
    std::vector<Vec3> points;
};

struct UniformInBox {
    BoxD box{};
    int count = 0;
    std::uint64_t rngSeed = 0;
};

/// Seeds placed uniformly inside cells whose channel value reaches the
/// q-quantile over all cells of the dataset.
struct DensityThreshold {
    std::string channel = "rho";
    double quantile = 0.99;
    int count = 0;
    std::uint64_t rngSeed = 0;
};

using SeedSpec = std::variant<ExplicitList, UniformInBox, DensityThreshold>;

inline std::vector<Vec3> makeSeeds(const AMRDataset& ds, const SeedSpec& spec) {
    struct Visitor {
        const AMRDataset& ds;

        std::vector<Vec3> operator()(const ExplicitList& e) const { return e.points; }

        std::vector<Vec3> operator()(const UniformInBox& u) const {
            BoxD box = u.box;
            for (int a = 0; a < 3; ++a) {
                box.lo.set(a, std::max(box.lo[a], ds.worldBounds.lo[a]));
                box.hi.set(a, std::min(box.hi[a], ds.worldBounds.hi[a]));
            }
            if (!(box.lo.x < box.hi.x && box.lo.y < box.hi.y && box.lo.z < box.hi.z))
                throw EmptySelection("seed box does not intersect the dataset bounds");
            Rng rng(u.rngSeed);
            std::vector<Vec3> seeds(std::size_t(u.count));
            for (Vec3& s : seeds) s = rng.inBox(box);
            return seeds;
        }

        std::vector<Vec3> operator()(const DensityThreshold& d) const {
            const int channel = ds.channelIndex(d.channel);
            if (channel < 0) throw EmptySelection("unknown channel '" + d.channel + "'");

            std::vector<double> values;
            values.reserve(std::size_t(ds.totalCells()));
            for (const Subgrid& sg : ds.subgrids) {
                const auto& arr = sg.channelData[std::size_t(channel)];
                values.insert(values.end(), arr.begin(), arr.end());
            }
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            // Nearest-rank quantile; q = 1 selects the maximum.
            const std::int64_t n = std::int64_t(sorted.size());
            std::int64_t rank = std::int64_t(std::ceil(d.quantile * double(n))) - 1;
            rank = std::clamp<std::int64_t>(rank, 0, n - 1);
            const double threshold = sorted[std::size_t(rank)];

            std::vector<BoxD> candidates;
            for (const Subgrid& sg : ds.subgrids) {
                const auto& arr = sg.channelData[std::size_t(channel)];
                const double w = levelCellWidth(sg.level);
                std::size_t flat = 0;
                for (std::int64_t k = 0; k < sg.dims.z; ++k)
                    for (std::int64_t j = 0; j < sg.dims.y; ++j)
                        for (std::int64_t i = 0; i < sg.dims.x; ++i, ++flat) {
                            if (arr[flat] < threshold) continue;
                            const Vec3 lo{double(sg.lower.x) + double(i) * w,
                                          double(sg.lower.y) + double(j) * w,
                                          double(sg.lower.z) + double(k) * w};
                            candidates.push_back(BoxD{lo, lo + Vec3{w, w, w}});
                        }
            }
            if (candidates.empty())
                throw EmptySelection("density quantile selected no cells");

            Rng rng(d.rngSeed);
            std::vector<Vec3> seeds(std::size_t(d.count));
            for (Vec3& s : seeds) {
                const BoxD& cell = candidates[std::size_t(rng.index(candidates.size()))];
                s = rng.inBox(cell);
            }
            return seeds;
        }
    };
    return std::visit(Visitor{ds}, spec);
}

/// Seed list file: one `x y z` triple per line; `#` starts a comment.
inline std::vector<Vec3> loadSeedsFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open seeds file: " + path.string());
    std::vector<Vec3> seeds;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, y, z;
        if (ls >> x >> y >> z) seeds.push_back({x, y, z});
        else {
            // Blank/comment-only lines are fine; anything else is not.
            std::string tok;
            std::istringstream check(line);
            if (check >> tok) throw IoError("unparsable seed line: '" + line + "'");
        }
    }
    return seeds;
}

} // namespace amrflow
