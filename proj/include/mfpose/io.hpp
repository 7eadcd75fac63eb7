#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mfpose/point_cloud.hpp"
#include "mfpose/scene_field.hpp"

namespace mfpose {

using Bytes = std::vector<std::uint8_t>;

// Little-endian binary formats. Values are held as double in memory and
// stored as f32, so round trips are bit-exact for float-representable data.
//
//   SPCL  "SPC1" u32 N, u32 d, u8 normalize, N * (x y z z_1..z_d) f32
//   SVOL  "SVL1" u32 nx ny nz, f32 origin[3], f32 voxel_size, u32 d,
//         per cell (x fastest): u8 tag, d f32
//   PCLS  "PCL1" u32 nx ny nz, f32 origin[3], f32 voxel_size, f32 c_min,
//         per cell f32 log-probability
//
// Decoders validate the header against the buffer length before allocating
// and report BadMagic, TruncatedPayload, TrailingData, NonFiniteValue,
// InvalidValue or NotNormalized.

Bytes encode_object(const StructuredPointCloud& obj, bool normalize_flag = false);
/// Descriptors are renormalized when the normalize flag is set; otherwise
/// they must already be unit length.
StructuredPointCloud decode_object(std::span<const std::uint8_t> bytes);

Bytes encode_scene(const SceneField& scene);
SceneField decode_scene(std::span<const std::uint8_t> bytes);

Bytes encode_classifier(const ClassifierField& cls);
ClassifierField decode_classifier(std::span<const std::uint8_t> bytes);

/// Whole-file helpers; failures to open, read or write raise ErrorCode::Io.
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

StructuredPointCloud load_object(const std::filesystem::path& path);
void save_object(const StructuredPointCloud& obj, const std::filesystem::path& path);
SceneField load_scene(const std::filesystem::path& path);
void save_scene(const SceneField& scene, const std::filesystem::path& path);
ClassifierField load_classifier(const std::filesystem::path& path);
void save_classifier(const ClassifierField& cls, const std::filesystem::path& path);

}  // namespace mfpose
