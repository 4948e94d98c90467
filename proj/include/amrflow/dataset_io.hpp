#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "amr.hpp"
#include "errors.hpp"

namespace amrflow {

// On-disk dataset format
//   descriptor: JSON { "channels": [...], "subgrids": [{level, lower, dims}...],
//                      "data": "<payload file, relative to the descriptor>" }
//   payload:    raw little-endian float32; per subgrid in descriptor order,
//               per channel in channel order, dims.x*dims.y*dims.z values
//               x-fastest. No header, no padding.

namespace detail {

inline float floatFromLe(const unsigned char* b) {
    const std::uint32_t u = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
                            (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
    return std::bit_cast<float>(u);
}

inline void floatToLe(float f, unsigned char* b) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(f);
    b[0] = (unsigned char)(u & 0xff);
    b[1] = (unsigned char)((u >> 8) & 0xff);
    b[2] = (unsigned char)((u >> 16) & 0xff);
    b[3] = (unsigned char)((u >> 24) & 0xff);
}

inline Vec3i vec3iFromJson(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number_integer() ||
        !j[1].is_number_integer() || !j[2].is_number_integer())
        throw MalformedDescriptor(std::string(what) + " must be an integer 3-array");
    return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>()};
}

} // namespace detail

/// Loads, materializes, and validates a dataset from a descriptor file.
/// Field data is widened to float64 in memory; the payload stays float32 on
/// disk, so a load/write cycle is byte-exact.
inline AMRDataset loadDataset(const std::filesystem::path& descriptorPath) {
    std::ifstream in(descriptorPath);
    if (!in) throw MalformedDescriptor("cannot open descriptor: " + descriptorPath.string());

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedDescriptor("descriptor parse error: " + std::string(e.what()));
    }

    if (!doc.is_object() || !doc.contains("channels") || !doc.contains("subgrids") ||
        !doc.contains("data"))
        throw MalformedDescriptor("descriptor needs 'channels', 'subgrids' and 'data'");

    AMRDataset ds;
    if (!doc["channels"].is_array())
        throw MalformedDescriptor("'channels' must be an array of strings");
    for (const auto& c : doc["channels"]) {
        if (!c.is_string()) throw MalformedDescriptor("'channels' must be an array of strings");
        ds.channels.push_back(c.get<std::string>());
    }

    if (!doc["subgrids"].is_array())
        throw MalformedDescriptor("'subgrids' must be an array");
    for (const auto& sj : doc["subgrids"]) {
        if (!sj.is_object() || !sj.contains("level") || !sj.contains("lower") || !sj.contains("dims"))
            throw MalformedDescriptor("subgrid entries need 'level', 'lower', 'dims'");
        Subgrid sg;
        if (!sj["level"].is_number_integer())
            throw MalformedDescriptor("subgrid 'level' must be an integer");
        sg.level = sj["level"].get<int>();
        sg.lower = detail::vec3iFromJson(sj["lower"], "subgrid 'lower'");
        sg.dims = detail::vec3iFromJson(sj["dims"], "subgrid 'dims'");
        if (sg.level < 0 || sg.dims.x < 1 || sg.dims.y < 1 || sg.dims.z < 1)
            throw MalformedDescriptor("subgrid has negative level or empty dims");
        ds.subgrids.push_back(std::move(sg));
    }
    if (ds.subgrids.empty()) throw MalformedDescriptor("descriptor lists no subgrids");

    if (!doc["data"].is_string())
        throw MalformedDescriptor("'data' must be a file name");
    const std::filesystem::path payloadPath =
        descriptorPath.parent_path() / doc["data"].get<std::string>();

    std::error_code ec;
    if (!std::filesystem::exists(payloadPath, ec))
        throw MissingRawFile("payload file not found: " + payloadPath.string());

    std::int64_t expectedFloats = 0;
    for (const Subgrid& sg : ds.subgrids)
        expectedFloats += sg.cellCount() * std::int64_t(ds.channels.size());

    std::ifstream raw(payloadPath, std::ios::binary);
    if (!raw) throw MissingRawFile("cannot open payload file: " + payloadPath.string());
    raw.seekg(0, std::ios::end);
    const std::int64_t bytes = raw.tellg();
    raw.seekg(0, std::ios::beg);
    if (bytes != expectedFloats * 4)
        throw MalformedDescriptor("payload has " + std::to_string(bytes) + " bytes, expected " +
                                  std::to_string(expectedFloats * 4));

    std::vector<unsigned char> buf(static_cast<std::size_t>(bytes));
    raw.read(reinterpret_cast<char*>(buf.data()), bytes);
    if (!raw) throw MissingRawFile("short read on payload file: " + payloadPath.string());

    std::size_t off = 0;
    for (Subgrid& sg : ds.subgrids) {
        const std::size_t n = std::size_t(sg.cellCount());
        sg.channelData.resize(ds.channels.size());
        for (auto& arr : sg.channelData) {
            arr.resize(n);
            for (std::size_t i = 0; i < n; ++i, off += 4)
                arr[i] = double(detail::floatFromLe(buf.data() + off));
        }
    }

    ds.finalize();
    if (auto issue = validateDataset(ds))
        throw ValidationFailure("dataset validation failed: " + issue->message());
    return ds;
}

/// Writes descriptor + payload. The payload file is named after the
/// descriptor stem with a .bin suffix and referenced by relative name.
inline void writeDataset(const AMRDataset& ds, const std::filesystem::path& descriptorPath) {
    const std::filesystem::path payloadName = descriptorPath.stem().string() + ".bin";
    const std::filesystem::path payloadPath = descriptorPath.parent_path() / payloadName;

    nlohmann::json doc;
    doc["channels"] = ds.channels;
    doc["data"] = payloadName.string();
    nlohmann::json sgs = nlohmann::json::array();
    for (const Subgrid& sg : ds.subgrids) {
        nlohmann::json sj;
        sj["level"] = sg.level;
        sj["lower"] = {sg.lower.x, sg.lower.y, sg.lower.z};
        sj["dims"] = {sg.dims.x, sg.dims.y, sg.dims.z};
        sgs.push_back(std::move(sj));
    }
    doc["subgrids"] = std::move(sgs);

    std::ofstream out(descriptorPath);
    if (!out) throw IoError("cannot write descriptor: " + descriptorPath.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + descriptorPath.string());

    std::ofstream raw(payloadPath, std::ios::binary);
    if (!raw) throw IoError("cannot write payload: " + payloadPath.string());
    std::vector<unsigned char> buf;
    for (const Subgrid& sg : ds.subgrids) {
        for (const auto& arr : sg.channelData) {
            buf.resize(arr.size() * 4);
            for (std::size_t i = 0; i < arr.size(); ++i)
                detail::floatToLe(float(arr[i]), buf.data() + i * 4);
            raw.write(reinterpret_cast<const char*>(buf.data()),
                      std::streamsize(buf.size()));
        }
    }
    if (!raw) throw IoError("write failed: " + payloadPath.string());
}

} // namespace amrflow
