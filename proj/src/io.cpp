// SPDX-License-Identifier: Apache-2.0
#include "mixforge/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace mixforge {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint8_t quantize(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

namespace {

void write_bytes(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) { write_bytes(path, text.data(), text.size()); }

Tensor decode_png(const std::vector<std::uint8_t>& bytes) {
  // Signature + IHDR length/type + width + height + depth + colour type.
  if (bytes.size() < 33 || std::memcmp(bytes.data(), kPngSignature, 8) != 0 ||
      std::memcmp(bytes.data() + 12, "IHDR", 4) != 0)
    throw IoError("not a PNG stream");
  const int bit_depth = bytes[24];
  const int color_type = bytes[25];
  if (bit_depth != 8) throw IoError("unsupported PNG bit depth " + std::to_string(bit_depth));
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB)
    throw IoError("unsupported PNG colour type " + std::to_string(color_type));

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw IoError(std::string("PNG decode failed: ") + image.message);
  const Index channels = color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("PNG decode failed: " + msg);
  }
  const Index h = image.height, w = image.width;
  Tensor t({channels, h, w});
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (Index c = 0; c < channels; ++c)
        t[(c * h + y) * w + x] = static_cast<float>(pixels[static_cast<std::size_t>((y * w + x) * channels + c)]) / 255.0f;
  return t;
}

std::vector<std::uint8_t> encode_png(const Tensor& t) {
  if (t.rank() != 3 || (t.dim(0) != 1 && t.dim(0) != 3) || t.dim(1) < 1 || t.dim(2) < 1)
    throw InvalidArgument("save_image expects a 1- or 3-channel C x H x W tensor");
  const Index channels = t.dim(0), h = t.dim(1), w = t.dim(2);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(channels * h * w));
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (Index c = 0; c < channels; ++c)
        pixels[static_cast<std::size_t>((y * w + x) * channels + c)] = quantize(t[(c * h + y) * w + x]);

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr))
    throw IoError(std::string("PNG encode failed: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr))
    throw IoError(std::string("PNG encode failed: ") + image.message);
  out.resize(size);
  return out;
}

Tensor load_image(const fs::path& path) {
  try {
    return decode_png(read_bytes(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_image(const Tensor& t, const fs::path& path) {
  const auto bytes = encode_png(t);
  write_bytes(path, bytes.data(), bytes.size());
}

Tensor load_audio_raw(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.empty()) throw IoError(path.string() + ": empty audio file");
  if (bytes.size() % 4 != 0) throw IoError(path.string() + ": length is not a multiple of 4 bytes");
  const auto n = static_cast<Index>(bytes.size() / 4);
  Tensor t({1, n});
  for (Index i = 0; i < n; ++i) {
    const auto* p = bytes.data() + 4 * i;
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    const auto v = std::bit_cast<float>(bits);
    if (!std::isfinite(v) || v < -1.0f || v > 1.0f)
      throw IoError(path.string() + ": audio sample outside [-1, 1]");
    t[i] = static_cast<float>((static_cast<double>(v) + 1.0) / 2.0);
  }
  return t;
}

void save_audio_raw(const Tensor& t, const fs::path& path) {
  if (t.rank() != 2 || t.dim(0) != 1) throw InvalidArgument("save_audio_raw expects a 1 x L tensor");
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(t.size()) * 4);
  for (Index i = 0; i < t.size(); ++i) {
    const auto v = static_cast<float>(std::clamp(2.0 * static_cast<double>(t[i]) - 1.0, -1.0, 1.0));
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) bytes[static_cast<std::size_t>(4 * i + b)] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  write_bytes(path, bytes.data(), bytes.size());
}

SampleKind kind_from_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") return SampleKind::Image;
  if (ext == ".raw" || ext == ".f32" || ext == ".pcm") return SampleKind::Audio;
  throw IoError("unsupported sample file type '" + p.string() + "'");
}

DatasetManifest read_manifest(const fs::path& path, Index num_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string{};
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
  };
  std::string line;
  if (!std::getline(in, line) || trim(line) != "path,class")
    throw IoError(path.string() + ": manifest header must be 'path,class'");

  DatasetManifest m;
  std::set<fs::path> seen;
  std::size_t line_no = 1;
  Index max_class = -1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected path,class");
    const std::string file = trim(line.substr(0, comma));
    const std::string cls = trim(line.substr(comma + 1));
    Index class_index = 0;
    std::size_t used = 0;
    try {
      class_index = std::stoll(cls, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (file.empty() || used != cls.size() || class_index < 0)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad entry");
    fs::path p = file;
    if (p.is_relative()) p = path.parent_path() / p;
    p = p.lexically_normal();
    if (!seen.insert(p).second) throw IoError(path.string() + ": duplicate path '" + file + "'");
    m.entries.push_back({p, class_index});
    max_class = std::max(max_class, class_index);
  }
  if (m.entries.empty()) throw IoError(path.string() + ": manifest has no entries");
  m.kind = kind_from_extension(m.entries.front().path);
  for (const auto& e : m.entries)
    if (kind_from_extension(e.path) != m.kind) throw IoError(path.string() + ": manifest mixes images and audio");
  if (num_classes > 0 && num_classes <= max_class) throw IoError(path.string() + ": class index exceeds class count");
  m.num_classes = std::max(num_classes, max_class + 1);
  return m;
}

Tensor load_tensor(const fs::path& path, SampleKind kind) {
  return kind == SampleKind::Image ? load_image(path) : load_audio_raw(path);
}

void save_tensor(const Tensor& t, const fs::path& path, SampleKind kind) {
  if (kind == SampleKind::Image) save_image(t, path);
  else save_audio_raw(t, path);
}

std::vector<Sample> load_samples(const DatasetManifest& manifest, std::size_t first, std::size_t count) {
  std::vector<Sample> out;
  const std::size_t last = std::min(manifest.entries.size(), first + count);
  for (std::size_t i = first; i < last; ++i) {
    const auto& e = manifest.entries[i];
    out.push_back({load_tensor(e.path, manifest.kind), SoftLabel::one_hot(e.class_index, manifest.num_classes)});
  }
  return out;
}

// Metadata ------------------------------------------------------------------

BatchMetadata make_metadata(const MixedBatch& batch, const MixRecipe& recipe, const BatchOptions& options) {
  BatchMetadata m;
  m.seed = batch.seed;
  m.recipe = recipe;
  m.options = options;
  m.options.selection = batch.selection;
  m.options.lambda = batch.lambda;
  m.permutation = batch.pairing;
  m.chosen_method = batch.chosen_method;
  for (std::size_t i = 0; i < batch.samples.size(); ++i) {
    const MixResult& r = batch.samples[i];
    m.pairs.push_back({static_cast<Index>(i), static_cast<Index>(i), batch.pairing[i], r.method, r.lam,
                       r.lam_target, r.geometry});
  }
  return m;
}

nlohmann::ordered_json geometry_to_json(const MaskGeometry& g) {
  nlohmann::ordered_json j;
  j["kind"] = geometry_kind(g);
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RectGeometry>) {
          j["x0"] = v.x0, j["y0"] = v.y0, j["w"] = v.w, j["h"] = v.h;
        } else if constexpr (std::is_same_v<T, IntervalGeometry>) {
          j["start"] = v.start, j["len"] = v.len;
        } else if constexpr (std::is_same_v<T, PasteGeometry>) {
          j["x0"] = v.x0, j["y0"] = v.y0, j["w"] = v.w, j["h"] = v.h, j["scale"] = v.scale;
        }
      },
      g);
  return j;
}

MaskGeometry geometry_from_json(const nlohmann::ordered_json& j) {
  const std::string kind = j.at("kind");
  if (kind == "rect") return RectGeometry{j.at("x0"), j.at("y0"), j.at("w"), j.at("h")};
  if (kind == "interval") return IntervalGeometry{j.at("start"), j.at("len")};
  if (kind == "freeform") return FreeformGeometry{};
  if (kind == "paste") return PasteGeometry{j.at("x0"), j.at("y0"), j.at("w"), j.at("h"), j.at("scale")};
  throw IoError("unknown geometry kind '" + kind + "'");
}

nlohmann::ordered_json metadata_to_json(const BatchMetadata& meta) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema_version"] = meta.schema_version;
  j["seed"] = meta.seed;
  j["rng"] = meta.rng;

  json recipe;
  recipe["candidates"] = json::array();
  for (Method c : meta.recipe.candidates) recipe["candidates"].push_back(std::string(method_name(c)));
  recipe["weights"] = meta.recipe.weights;
  recipe["alpha"] = meta.recipe.mixer.alpha;
  recipe["fmix_decay"] = meta.recipe.mixer.fmix_decay;
  recipe["interpolation"] = meta.recipe.mixer.interpolation == Interpolation::Bilinear ? "bilinear" : "nearest";
  recipe["cutmix_lambda"] = meta.recipe.mixer.cutmix_lambda == LambdaLaw::Uniform ? "uniform" : "beta";
  recipe["text"] = format_recipe(meta.recipe);
  j["recipe"] = recipe;

  json options;
  options["selection"] = meta.options.selection == Selection::PerBatch ? "per_batch" : "per_pair";
  options["lambda"] = meta.options.lambda == LambdaGranularity::PerPair ? "per_pair" : "per_batch";
  options["forced_lambda"] = meta.options.forced_lambda ? json(*meta.options.forced_lambda) : json(nullptr);
  j["options"] = options;

  json notes;
  notes["fmix_envelope"] = "1/max(|f|,1/max(dims))^decay";
  notes["mask_lambda"] = "realized fraction of first-sample elements";
  notes["rect_placement"] = meta.recipe.mixer.rect_placement == RectPlacement::Inside ? "inside" : "center_clipped";
  j["notes"] = notes;

  j["batch_offset"] = meta.batch_offset;
  j["inputs"] = meta.inputs;
  j["permutation"] = meta.permutation;
  j["chosen_method"] = std::string(method_name(meta.chosen_method));

  json pairs = json::array();
  for (const PairRecord& p : meta.pairs) {
    json e;
    e["index"] = p.index;
    e["source_a"] = p.source_a;
    e["source_b"] = p.source_b;
    e["method"] = std::string(method_name(p.method));
    e["lam"] = p.lam;
    e["lam_target"] = p.lam_target;
    e["geometry"] = p.geometry ? geometry_to_json(*p.geometry) : json(nullptr);
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

BatchMetadata metadata_from_json(const nlohmann::ordered_json& j) {
  try {
    BatchMetadata m;
    m.schema_version = j.at("schema_version");
    if (m.schema_version != kSchemaVersion)
      throw IoError("unsupported metadata schema_version " + std::to_string(m.schema_version));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.rng = j.at("rng");
    if (m.rng != Rng::kAlgorithm) throw IoError("metadata written with a different generator: " + m.rng);

    const auto& r = j.at("recipe");
    for (const auto& c : r.at("candidates")) m.recipe.candidates.push_back(parse_method(c.get<std::string>()));
    m.recipe.weights = r.at("weights").get<std::vector<double>>();
    m.recipe.mixer.alpha = r.at("alpha");
    m.recipe.mixer.fmix_decay = r.at("fmix_decay");
    m.recipe.mixer.interpolation = r.at("interpolation") == "nearest" ? Interpolation::Nearest : Interpolation::Bilinear;
    m.recipe.mixer.cutmix_lambda = r.at("cutmix_lambda") == "beta" ? LambdaLaw::Beta : LambdaLaw::Uniform;
    m.recipe.mixer.rect_placement =
        j.at("notes").at("rect_placement") == "center_clipped" ? RectPlacement::CenterClipped : RectPlacement::Inside;

    const auto& o = j.at("options");
    m.options.selection = o.at("selection") == "per_pair" ? Selection::PerPair : Selection::PerBatch;
    m.options.lambda = o.at("lambda") == "per_batch" ? LambdaGranularity::PerBatch : LambdaGranularity::PerPair;
    if (!o.at("forced_lambda").is_null()) m.options.forced_lambda = o.at("forced_lambda").get<double>();

    m.batch_offset = j.at("batch_offset");
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.permutation = j.at("permutation").get<std::vector<Index>>();
    m.chosen_method = parse_method(j.at("chosen_method").get<std::string>());
    for (const auto& e : j.at("pairs")) {
      PairRecord p;
      p.index = e.at("index");
      p.source_a = e.at("source_a");
      p.source_b = e.at("source_b");
      p.method = parse_method(e.at("method").get<std::string>());
      p.lam = e.at("lam");
      p.lam_target = e.at("lam_target");
      if (!e.at("geometry").is_null()) p.geometry = geometry_from_json(e.at("geometry"));
      m.pairs.push_back(std::move(p));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed metadata: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("malformed metadata: ") + e.what());
  }
}

void write_metadata(const BatchMetadata& meta, const fs::path& path) {
  write_text(path, metadata_to_json(meta).dump(2) + "\n");
}

BatchMetadata read_metadata(const fs::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return metadata_from_json(nlohmann::ordered_json::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

MixedBatch replay_batch(std::span<const Sample> batch, const BatchMetadata& meta) {
  if (batch.size() != meta.permutation.size()) throw InvalidArgument("replay batch size differs from metadata");
  return mix_batch(batch, meta.recipe, meta.seed, meta.options);
}

}  // namespace mixforge
