// Minimal library walkthrough: build the rotation preset in memory, trace a
// ring of seeds around the core, and write the tubes to OBJ.

#include <iostream>
#include <numbers>

#include <amrflow/amrflow.hpp>

using namespace amrflow;

int main() {
    AMRDataset ds = generatePreset("three-level-core-rotation");
    const auto bricks = buildBricks(ds);
    const auto decomp = buildRegions(bricks);
    const BvhEngine engine(decomp);
    const ChannelTriple ch = resolveVelocityChannels(ds);

    const Vec3 center{16.0, 16.0, 16.0};
    std::vector<Vec3> seeds;
    for (int i = 0; i < 12; ++i) {
        const double ang = 2.0 * std::numbers::pi * i / 12.0;
        const double r = 1.0 + 0.15 * i;
        seeds.push_back(center + Vec3{r * std::cos(ang), r * std::sin(ang), 0.1 * i - 0.6});
    }

    TracerConfig cfg;
    cfg.baseStep = 0.02;
    cfg.maxSteps = 400;

    const TraceBuffer buf = traceToEnd(seeds, engine, ds, bricks, ch, cfg);
    StreamlineSet lines = makeStreamlines(buf);
    attachScalar(lines, [&](const Vec3& p) {
        const auto s = sampleDirection(engine, ds, bricks, ch.x, ch.y, ch.z, p);
        return s ? length(s->value) : 0.0;
    });

    exportCSV(lines, "rotation_demo.csv");
    exportVTK(lines, "rotation_demo.vtk");
    exportTubesOBJ(lines, 0.05, 10, "rotation_demo.obj");

    std::cout << "traced " << buf.numSeeds << " seeds ("
              << buf.countWithStatus(ParticleStatus::Finished)
              << " finished); wrote rotation_demo.{csv,vtk,obj}\n";
    return 0;
}
