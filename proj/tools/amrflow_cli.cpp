// Command-line front end: generate synthetic datasets, validate the on-disk
// format, run point queries, trace streamlines, and benchmark the query
// engines.
//
// Exit codes: 0 success, 1 error, 2 point outside the domain (query only).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <amrflow/amrflow.hpp>

namespace fs = std::filesystem;
using namespace amrflow;

namespace {

struct Pipeline {
    AMRDataset ds;
    std::vector<Brick> bricks;
    RegionDecomposition decomp;
};

Pipeline loadPipeline(const std::string& datasetPath) {
    Pipeline p;
    p.ds = loadDataset(datasetPath);
    p.bricks = buildBricks(p.ds);
    p.decomp = buildRegions(p.bricks);
    return p;
}

std::vector<EngineKind> parseEngines(const std::string& name) {
    if (name == "all") return {EngineKind::Bvh, EngineKind::KdTree, EngineKind::Brute};
    const auto kind = engineKindByName(name);
    if (!kind) throw Error("unknown engine '" + name + "'");
    return {*kind};
}

int runGen(const std::string& preset, const std::string& outDir, int blockSizeOverride) {
    const Preset* p = findPreset(preset);
    if (!p) {
        std::cerr << "unknown preset '" << preset << "'; available:";
        for (const Preset& q : presetCatalog()) std::cerr << " " << q.name;
        std::cerr << "\n";
        return 1;
    }
    const int blockSize = blockSizeOverride > 0 ? blockSizeOverride : p->blockSize;
    AMRDataset ds = generate(p->bounds, p->field, p->rule, blockSize);

    fs::create_directories(outDir);
    const fs::path descriptor = fs::path(outDir) / (p->name + ".json");
    writeDataset(ds, descriptor);
    std::cout << "wrote " << descriptor.string() << " (" << ds.subgrids.size() << " subgrids, "
              << ds.totalCells() << " cells)\n";
    return 0;
}

int runValidate(const std::string& datasetPath) {
    // Deserialize without the load-time validation so the report comes from
    // the validator itself, then re-run it.
    try {
        AMRDataset ds = loadDataset(datasetPath);
        if (auto issue = validateDataset(ds)) {
            std::cout << "INVALID: " << issue->message() << "\n";
            return 1;
        }
        std::cout << "OK\n";
        return 0;
    } catch (const ValidationFailure& e) {
        std::cout << "INVALID: " << e.what() << "\n";
        return 1;
    }
}

int runQuery(const std::string& datasetPath, const std::vector<double>& point,
             const std::string& engineName, const std::vector<std::string>& channels,
             const std::string& dumpRegionsPath) {
    Pipeline p = loadPipeline(datasetPath);
    const Vec3 q{point[0], point[1], point[2]};

    if (!dumpRegionsPath.empty()) {
        std::ofstream dump(dumpRegionsPath);
        if (!dump) throw IoError("cannot write " + dumpRegionsPath);
        dumpRegions(p.decomp, dump);
    }

    const std::vector<EngineKind> kinds = parseEngines(engineName);
    std::vector<AnyEngine> engines;
    for (EngineKind k : kinds) engines.emplace_back(k, p.decomp);

    std::optional<RegionHit> hit = engines[0].locate(q);
    for (std::size_t e = 1; e < engines.size(); ++e) {
        const auto other = engines[e].locate(q);
        bool same = hit.has_value() == other.has_value();
        if (same && hit)
            same = hit->boxIndex == other->boxIndex &&
                   hit->finestCellWidth == other->finestCellWidth &&
                   std::equal(hit->brickIDs.begin(), hit->brickIDs.end(),
                              other->brickIDs.begin(), other->brickIDs.end());
        if (!same) {
            std::cerr << "engine mismatch: " << engineKindName(kinds[0]) << " vs "
                      << engineKindName(kinds[e]) << " at " << q << "\n";
            return 1;
        }
    }

    if (!hit) {
        std::cout << "outside\n";
        return 2;
    }

    std::cout << "box " << hit->boxIndex << "\n";
    std::cout << "bricks";
    for (std::uint32_t id : hit->brickIDs) std::cout << " " << id;
    std::cout << "\n";
    std::cout << "finest-cell-width " << hit->finestCellWidth << "\n";

    std::vector<std::string> names = channels;
    if (names.empty()) names = p.ds.channels;
    for (const std::string& name : names) {
        const int c = p.ds.channelIndex(name);
        if (c < 0) throw Error("unknown channel '" + name + "'");
        const auto s = sampleScalar(engines[0], p.ds, p.bricks, c, q);
        std::cout << name << " " << detail::fmt9(s->value) << "\n";
    }
    return 0;
}

struct TraceArgs {
    std::string dataset;
    std::string engine = "bvh";
    std::string integrator = "rk4";
    double step = 0.5;
    int maxSteps = 1000;
    int batch = 16;
    bool normalize = false;
    int threads = 1;
    std::uint64_t rngSeed = 1;

    std::string seedsFile;
    std::vector<double> seedBox;
    int seedCount = 0;
    std::string seedDensityChannel;
    double quantile = 0.99;

    std::string csvPath, vtkPath, objPath;
    double tubeRadius = 0.05;
    int tubeSides = 8;
    std::string scalarChannel;
};

std::vector<Vec3> makeSeedsFromArgs(const AMRDataset& ds, const TraceArgs& a) {
    if (!a.seedsFile.empty()) return loadSeedsFile(a.seedsFile);
    if (!a.seedDensityChannel.empty())
        return makeSeeds(ds, DensityThreshold{a.seedDensityChannel, a.quantile,
                                              a.seedCount > 0 ? a.seedCount : 16, a.rngSeed});
    if (!a.seedBox.empty()) {
        const BoxD box{{a.seedBox[0], a.seedBox[1], a.seedBox[2]},
                       {a.seedBox[3], a.seedBox[4], a.seedBox[5]}};
        return makeSeeds(ds, UniformInBox{box, a.seedCount > 0 ? a.seedCount : 16, a.rngSeed});
    }
    return makeSeeds(ds, UniformInBox{ds.worldBounds, a.seedCount > 0 ? a.seedCount : 16,
                                      a.rngSeed});
}

int runTrace(const TraceArgs& a) {
    Pipeline p = loadPipeline(a.dataset);
    const ChannelTriple ch = resolveVelocityChannels(p.ds);

    TracerConfig cfg;
    cfg.integrator = a.integrator == "euler" ? Integrator::Euler : Integrator::RK4;
    cfg.baseStep = a.step;
    cfg.maxSteps = a.maxSteps;
    cfg.batchSize = a.batch;
    cfg.normalizeVelocity = a.normalize;

    const std::vector<Vec3> seeds = makeSeedsFromArgs(p.ds, a);
    if (seeds.empty()) throw EmptySelection("no seeds to trace");

    const AnyEngine engine(parseEngines(a.engine)[0], p.decomp);
    const TraceBuffer buf = traceToEnd(seeds, engine, p.ds, p.bricks, ch, cfg, a.threads);

    StreamlineSet lines = makeStreamlines(buf);
    if (!a.scalarChannel.empty()) {
        if (a.scalarChannel == "speed") {
            attachScalar(lines, [&](const Vec3& q) {
                const auto s = sampleDirection(engine, p.ds, p.bricks, ch.x, ch.y, ch.z, q);
                return s ? length(s->value) : 0.0;
            });
        } else {
            const int c = p.ds.channelIndex(a.scalarChannel);
            if (c < 0) throw Error("unknown channel '" + a.scalarChannel + "'");
            attachScalar(lines, [&](const Vec3& q) {
                const auto s = sampleScalar(engine, p.ds, p.bricks, c, q);
                return s ? s->value : 0.0;
            });
        }
    }

    if (!a.csvPath.empty()) exportCSV(lines, a.csvPath);
    if (!a.vtkPath.empty()) exportVTK(lines, a.vtkPath);
    if (!a.objPath.empty()) exportTubesOBJ(lines, a.tubeRadius, a.tubeSides, a.objPath);

    std::cout << "traced " << buf.numSeeds << " seeds: "
              << buf.countWithStatus(ParticleStatus::Finished) << " finished, "
              << buf.countWithStatus(ParticleStatus::LeftDomain) << " left-domain, "
              << buf.countWithStatus(ParticleStatus::Stagnant) << " stagnant\n";
    return 0;
}

int runBenchCmd(const std::string& datasetPath, std::vector<int> particles, int steps,
                const std::string& enginesArg, const std::string& csvPath, std::uint64_t rngSeed,
                int threads, double step, bool threeQueries) {
    Pipeline p = loadPipeline(datasetPath);
    if (particles.empty()) particles = {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14, 1 << 15};

    std::vector<EngineKind> engines;
    {
        std::stringstream ss(enginesArg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok == "all") {
                engines = {EngineKind::Bvh, EngineKind::KdTree, EngineKind::Brute};
                break;
            }
            const auto kind = engineKindByName(tok);
            if (!kind) throw Error("unknown engine '" + tok + "'");
            engines.push_back(*kind);
        }
    }

    TracerConfig cfg;
    cfg.baseStep = step;
    SampleOptions opts;
    opts.threeQueryConformance = threeQueries;

    const auto records =
        runBench(p.ds, p.bricks, p.decomp, particles, steps, engines, rngSeed, threads, cfg, opts);

    if (csvPath.empty()) {
        writeBenchCSV(records, std::cout);
    } else {
        std::ofstream out(csvPath);
        if (!out) throw IoError("cannot write " + csvPath);
        writeBenchCSV(records, out);
        std::cout << "wrote " << csvPath << " (" << records.size() << " rows)\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"particle advection and point location on cell-centric AMR data"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset preset");
    std::string genPreset, genOut = ".";
    int genBlockSize = 0;
    gen->add_option("--preset", genPreset, "preset name")->required();
    gen->add_option("-o,--out", genOut, "output directory");
    gen->add_option("--block-size", genBlockSize, "override the preset block size");

    // validate
    auto* val = app.add_subcommand("validate", "validate a dataset on disk");
    std::string valDataset;
    val->add_option("dataset", valDataset, "descriptor path")->required();

    // query
    auto* qry = app.add_subcommand("query", "point containment query");
    std::string qryDataset, qryEngine = "bvh", qryDump;
    std::vector<double> qryPoint;
    std::vector<std::string> qryChannels;
    qry->add_option("--dataset", qryDataset)->required();
    qry->add_option("point", qryPoint, "x y z")->expected(3)->required();
    qry->add_option("--engine", qryEngine)->check(CLI::IsMember({"bvh", "kdtree", "brute", "all"}));
    qry->add_option("--channel", qryChannels, "channels to reconstruct (default: all)");
    qry->add_option("--dump-regions", qryDump, "write the region box table to a file");

    // trace
    auto* trc = app.add_subcommand("trace", "trace streamlines and export them");
    TraceArgs ta;
    trc->add_option("--dataset", ta.dataset)->required();
    trc->add_option("--engine", ta.engine)->check(CLI::IsMember({"bvh", "kdtree", "brute"}));
    trc->add_option("--integrator", ta.integrator)->check(CLI::IsMember({"rk4", "euler"}));
    trc->add_option("--step", ta.step, "dimensionless step length h")->check(CLI::PositiveNumber);
    trc->add_option("--max-steps", ta.maxSteps)->check(CLI::PositiveNumber);
    trc->add_option("--batch", ta.batch, "steps per progressive batch")->check(CLI::PositiveNumber);
    trc->add_flag("--normalize", ta.normalize, "normalize velocities before stepping");
    trc->add_option("--threads", ta.threads)->check(CLI::PositiveNumber);
    trc->add_option("--rng-seed", ta.rngSeed);
    trc->add_option("--seeds-file", ta.seedsFile, "file with one 'x y z' seed per line");
    trc->add_option("--seed-box", ta.seedBox, "x0 y0 z0 x1 y1 z1")->expected(6);
    trc->add_option("--seed-count", ta.seedCount)->check(CLI::PositiveNumber);
    trc->add_option("--seed-density", ta.seedDensityChannel,
                    "seed inside cells above the channel quantile");
    trc->add_option("--quantile", ta.quantile)->check(CLI::Range(0.0, 1.0));
    trc->add_option("--csv", ta.csvPath);
    trc->add_option("--vtk", ta.vtkPath);
    trc->add_option("--obj", ta.objPath);
    trc->add_option("--tube-radius", ta.tubeRadius)->check(CLI::PositiveNumber);
    trc->add_option("--tube-sides", ta.tubeSides)->check(CLI::Range(3, 64));
    trc->add_option("--scalar-channel", ta.scalarChannel,
                    "per-vertex scalar: a channel name or 'speed'");

    // bench
    auto* bch = app.add_subcommand("bench", "compare engine throughput");
    std::string bchDataset, bchEngines = "all", bchCsv;
    std::vector<int> bchParticles;
    int bchSteps = 1000, bchThreads = 1;
    std::uint64_t bchRngSeed = 42;
    double bchStep = 0.5;
    bool bchThreeQueries = false;
    bch->add_option("--dataset", bchDataset)->required();
    bch->add_option("--particles", bchParticles, "particle counts (default powers of two 2^10..2^15)");
    bch->add_option("--steps", bchSteps)->check(CLI::PositiveNumber);
    bch->add_option("--engines", bchEngines, "comma list of bvh,kdtree,brute or 'all'");
    bch->add_option("--csv", bchCsv, "output CSV path (default stdout)");
    bch->add_option("--rng-seed", bchRngSeed);
    bch->add_option("--threads", bchThreads)->check(CLI::PositiveNumber);
    bch->add_option("--step", bchStep)->check(CLI::PositiveNumber);
    bch->add_flag("--three-queries", bchThreeQueries,
                  "issue one literal query per vector component");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return runGen(genPreset, genOut, genBlockSize);
        if (val->parsed()) return runValidate(valDataset);
        if (qry->parsed()) return runQuery(qryDataset, qryPoint, qryEngine, qryChannels, qryDump);
        if (trc->parsed()) return runTrace(ta);
        if (bch->parsed())
            return runBenchCmd(bchDataset, bchParticles, bchSteps, bchEngines, bchCsv, bchRngSeed,
                               bchThreads, bchStep, bchThreeQueries);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
