// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixforge/randomix.hpp"
#include "mixforge/tensor.hpp"

namespace mixforge {

namespace fs = std::filesystem;

// Images ------------------------------------------------------------------

/// Decode an 8-bit grayscale or RGB PNG into a C x H x W tensor of v / 255.
Tensor decode_png(const std::vector<std::uint8_t>& bytes);

/// Encode a 1- or 3-channel C x H x W tensor as 8-bit PNG, round(v * 255)
/// with values clamped to [0, 1].
std::vector<std::uint8_t> encode_png(const Tensor& t);

Tensor load_image(const fs::path& path);
void save_image(const Tensor& t, const fs::path& path);

// Audio -------------------------------------------------------------------

/// Raw little-endian float32 mono in [-1, 1] -> 1 x L tensor of (v + 1) / 2.
Tensor load_audio_raw(const fs::path& path);
/// Inverse of load_audio_raw.
void save_audio_raw(const Tensor& t, const fs::path& path);

// Manifest ----------------------------------------------------------------

enum class SampleKind { Image, Audio };

struct DatasetManifest {
  struct Entry {
    fs::path path;
    Index class_index = 0;
  };
  std::vector<Entry> entries;
  Index num_classes = 0;
  SampleKind kind = SampleKind::Image;
};

/// CSV with header line "path,class". Relative paths resolve against the
/// manifest's directory. num_classes is the largest class index plus one
/// unless `num_classes` is larger.
DatasetManifest read_manifest(const fs::path& path, Index num_classes = 0);

SampleKind kind_from_extension(const fs::path& p);

Tensor load_tensor(const fs::path& path, SampleKind kind);
void save_tensor(const Tensor& t, const fs::path& path, SampleKind kind);

/// Loads entries [first, first + count) with one-hot labels.
std::vector<Sample> load_samples(const DatasetManifest& manifest, std::size_t first, std::size_t count);

// Provenance metadata -------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

struct PairRecord {
  Index index = 0;
  Index source_a = 0;
  Index source_b = 0;
  Method method = Method::Mixup;
  double lam = 1.0;
  double lam_target = 1.0;
  std::optional<MaskGeometry> geometry;
  bool operator==(const PairRecord&) const = default;
};

/// Everything needed to regenerate a MixedBatch bit-exactly from its inputs.
struct BatchMetadata {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  std::string rng = Rng::kAlgorithm;
  MixRecipe recipe;
  BatchOptions options;
  std::vector<Index> permutation;
  Method chosen_method = Method::Mixup;
  std::vector<PairRecord> pairs;
  /// Position of the batch's first sample in the dataset and, when known,
  /// the input files.
  Index batch_offset = 0;
  std::vector<std::string> inputs;
};

BatchMetadata make_metadata(const MixedBatch& batch, const MixRecipe& recipe, const BatchOptions& options);

nlohmann::ordered_json metadata_to_json(const BatchMetadata& meta);
BatchMetadata metadata_from_json(const nlohmann::ordered_json& j);

void write_metadata(const BatchMetadata& meta, const fs::path& path);
BatchMetadata read_metadata(const fs::path& path);

/// Regenerates the batch recorded in `meta` from its inputs.
MixedBatch replay_batch(std::span<const Sample> batch, const BatchMetadata& meta);

nlohmann::ordered_json geometry_to_json(const MaskGeometry& g);
MaskGeometry geometry_from_json(const nlohmann::ordered_json& j);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const fs::path& path, const std::string& text);
std::vector<std::uint8_t> read_bytes(const fs::path& path);

}  // namespace mixforge
