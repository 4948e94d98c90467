#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "bricks.hpp"
#include "errors.hpp"
#include "query.hpp"
#include "tracer.hpp"

namespace amrflow {

struct BenchRecord {
    std::string engine;
    int particleCount = 0;
    int stepsPerParticle = 0;
    double wallTimeSeconds = 0.0;
    double queriesPerSecond = 0.0;  // stage samples issued / wall time
    std::uint64_t nodesVisited = 0;
};

namespace detail {

inline bool buffersIdentical(const TraceBuffer& a, const TraceBuffer& b) {
    return a.numSeeds == b.numSeeds && a.maxSteps == b.maxSteps &&
           a.stepsTaken == b.stepsTaken && a.status == b.status && a.positions == b.positions;
}

} // namespace detail

/// Advects `count` particles per engine and particle count, recording wall
/// time and traversal counters. Before any timing, a 1% subsample of the
/// particles is traced with every engine and the trajectories compared
/// exactly; a mismatch aborts the benchmark.
inline std::vector<BenchRecord> runBench(const AMRDataset& ds, const std::vector<Brick>& bricks,
                                         const RegionDecomposition& decomp,
                                         const std::vector<int>& particleCounts, int steps,
                                         const std::vector<EngineKind>& engines,
                                         std::uint64_t rngSeed, int threads,
                                         TracerConfig cfg = {}, const SampleOptions& opts = {}) {
    if (engines.empty()) throw Error("bench requires at least one engine");
    for (int c : particleCounts)
        if (c < 1) throw Error("bench particle counts must be >= 1");
    cfg.maxSteps = steps;

    const ChannelTriple ch = resolveVelocityChannels(ds);

    std::vector<AnyEngine> built;
    built.reserve(engines.size());
    for (EngineKind kind : engines) built.emplace_back(kind, decomp, /*enableStats=*/true);

    std::vector<BenchRecord> records;
    for (int count : particleCounts) {
        const std::vector<Vec3> seeds =
            makeSeeds(ds, UniformInBox{ds.worldBounds, count, rngSeed});

        // Equivalence pre-check on a 1% subsample (at least one particle).
        const int subCount = std::max(1, count / 100);
        const std::vector<Vec3> subSeeds(seeds.begin(), seeds.begin() + subCount);
        TraceBuffer reference;
        for (std::size_t e = 0; e < built.size(); ++e) {
            TraceBuffer buf = traceToEnd(subSeeds, built[e], ds, bricks, ch, cfg, threads, opts);
            if (e == 0) reference = std::move(buf);
            else if (!detail::buffersIdentical(reference, buf))
                throw EquivalenceFailure("engines '" + std::string(engineKindName(engines[0])) +
                                         "' and '" + engineKindName(engines[e]) +
                                         "' disagree on " + std::to_string(subCount) +
                                         " subsampled trajectories");
        }

        for (std::size_t e = 0; e < built.size(); ++e) {
            built[e].stats().reset();
            const auto t0 = std::chrono::steady_clock::now();
            TraceBuffer buf = traceToEnd(seeds, built[e], ds, bricks, ch, cfg, threads, opts);
            const auto t1 = std::chrono::steady_clock::now();
            (void)buf;
            const double secs = std::chrono::duration<double>(t1 - t0).count();
            const QueryCounters counters = built[e].stats().snapshot();

            BenchRecord rec;
            rec.engine = engineKindName(engines[e]);
            rec.particleCount = count;
            rec.stepsPerParticle = steps;
            rec.wallTimeSeconds = secs;
            rec.queriesPerSecond = secs > 0.0 ? double(counters.queries) / secs : 0.0;
            rec.nodesVisited = counters.nodesVisited;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

inline void writeBenchCSV(const std::vector<BenchRecord>& records, std::ostream& os) {
    os << "engine,particles,steps,seconds,qps,nodes\n";
    for (const BenchRecord& r : records) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", r.wallTimeSeconds);
        char qbuf[64];
        std::snprintf(qbuf, sizeof(qbuf), "%.1f", r.queriesPerSecond);
        os << r.engine << "," << r.particleCount << "," << r.stepsPerParticle << "," << buf << ","
           << qbuf << "," << r.nodesVisited << "\n";
    }
}

} // namespace amrflow
