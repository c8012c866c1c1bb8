// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>

#include "mixforge/eval.hpp"
#include "mixforge/io.hpp"
#include "mixforge/randomix.hpp"

namespace mixforge::cli {

namespace {

constexpr const char* kDefaultRecipe = "candidates=mixup,cutmix,resizemix,fmix;weights=1,1,1,1;alpha=1";

struct MixArgs {
  std::string manifest, out, recipe = kDefaultRecipe;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;
  bool per_pair_selection = false;
  bool per_batch_lambda = false;
  Index num_classes = 0;
};

struct ValidateArgs {
  std::string recipe = kDefaultRecipe, shape, out;
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
};

struct OccludeArgs {
  std::string manifest, out;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  int blocks = 1;
};

SpatialShape parse_shape(const std::string& text) {
  const auto parse_dim = [&](std::string_view s) {
    Index v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 2)
      throw CLI::ValidationError("--shape", "expected HxW or L with dims >= 2, got '" + text + "'");
    return v;
  };
  const auto x = text.find('x');
  if (x == std::string::npos) return SpatialShape::signal(parse_dim(text));
  return SpatialShape::image(parse_dim(std::string_view(text).substr(0, x)),
                             parse_dim(std::string_view(text).substr(x + 1)));
}

int cmd_mix(const MixArgs& a, std::ostream& err) {
  const MixRecipe recipe = parse_recipe(a.recipe);
  const DatasetManifest manifest = read_manifest(a.manifest, a.num_classes);
  BatchOptions options;
  options.selection = a.per_pair_selection ? Selection::PerPair : Selection::PerBatch;
  options.lambda = a.per_batch_lambda ? LambdaGranularity::PerBatch : LambdaGranularity::PerPair;
  options.threads = threads_from_env();
  if (options.selection == Selection::PerPair && options.lambda == LambdaGranularity::PerBatch)
    throw RecipeError("--per-batch-lambda cannot be combined with --per-pair-selection");

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  const Rng root(a.seed);
  const std::string ext = manifest.kind == SampleKind::Image ? ".png" : ".raw";
  std::size_t batch_index = 0;
  for (std::size_t first = 0; first < manifest.entries.size(); first += a.batch_size, ++batch_index) {
    const auto samples = load_samples(manifest, first, a.batch_size);
    const std::uint64_t batch_seed = root.substream(batch_index).seed();
    const MixedBatch batch = mix_batch(samples, recipe, batch_seed, options);

    char dir_name[32];
    std::snprintf(dir_name, sizeof(dir_name), "batch_%05zu", batch_index);
    const fs::path dir = out_dir / dir_name;
    fs::create_directories(dir);
    BatchMetadata meta = make_metadata(batch, recipe, options);
    meta.batch_offset = static_cast<Index>(first);
    for (std::size_t i = 0; i < batch.samples.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "mixed_%04zu", i);
      save_tensor(batch.samples[i].x, dir / (std::string(name) + ext), manifest.kind);
      meta.inputs.push_back(manifest.entries[first + i].path.filename().string());
    }
    write_metadata(meta, dir / "metadata.json");
  }
  err << "mixforge mix: wrote " << batch_index << " batch(es) to " << out_dir.string() << "\n";
  return kOk;
}

int cmd_validate(const ValidateArgs& a, std::ostream& err) {
  const SpatialShape shape = parse_shape(a.shape);
  const MixRecipe recipe = parse_recipe(a.recipe);
  if (a.trials < 1000) throw CLI::ValidationError("--trials", "must be at least 1000");
  const int threads = threads_from_env();
  const LamDistributionReport lam = lam_distribution_report(recipe, shape, a.trials, a.seed, threads);
  const MethodFrequencyReport freq = method_frequency_report(recipe, a.trials, Rng(a.seed).substream(~0ULL).seed());

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  write_text(out_dir / "lam_histogram.csv", lam_histogram_csv(lam));
  const auto summary = validation_summary(lam, freq);
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");

  for (const auto& m : lam.methods) {
    err << "lambda " << method_name(m.method) << ": mean " << m.moments.mean << " var " << m.moments.variance
        << " (" << m.check << ") " << (m.pass ? "PASS" : "FAIL") << "\n";
  }
  err << "selection: chi-square p = " << freq.chi_square.p_value << " " << (freq.pass() ? "PASS" : "FAIL") << "\n";
  return lam.pass() && freq.pass() ? kOk : kChecksFailed;
}

int cmd_occlude(const OccludeArgs& a, std::ostream& err) {
  if (!(a.fraction > 0.0 && a.fraction < 1.0)) throw CLI::ValidationError("--fraction", "must lie in (0, 1)");
  const DatasetManifest manifest = read_manifest(a.manifest);
  OcclusionOptions options;
  options.fraction = a.fraction;
  options.blocks = a.blocks;
  options.seed = a.seed;
  const std::size_t n = make_occluded_set(manifest, options, a.out);
  err << "mixforge occlude: wrote " << n << " file(s) to " << a.out << "\n";
  return kOk;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

int threads_from_env() {
  const char* v = std::getenv("MIXFORGE_THREADS");
  if (!v || !*v) return 1;
  int n = 1;
  const auto [ptr, ec] = std::from_chars(v, v + std::char_traits<char>::length(v), n);
  if (ec != std::errc{} || *ptr != '\0' || n < 1) return 1;
  return n;
}

int run(const std::vector<std::string>& args, std::ostream& err) {
  CLI::App app{"Mixed-sample data augmentation: mixing, validation and occlusion sets", "mixforge"};
  app.require_subcommand(1);

  MixArgs mix;
  auto* mix_cmd = app.add_subcommand("mix", "Mix a dataset batch by batch");
  mix_cmd->add_option("--manifest", mix.manifest, "CSV manifest (header 'path,class')")->required();
  mix_cmd->add_option("--out", mix.out, "Output directory")->required();
  mix_cmd->add_option("--recipe", mix.recipe, "Mixing recipe")->capture_default_str();
  mix_cmd->add_option("--seed", mix.seed, "Master seed")->required();
  mix_cmd->add_option("--batch-size", mix.batch_size, "Samples per batch")->required()->check(CLI::PositiveNumber);
  mix_cmd->add_flag("--per-pair-selection", mix.per_pair_selection, "Select a method per pair instead of per batch");
  mix_cmd->add_flag("--per-batch-lambda", mix.per_batch_lambda, "Share one lambda across a batch");
  mix_cmd->add_option("--num-classes", mix.num_classes, "Label length (default: largest class + 1)");

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Statistical self-check of a recipe");
  val_cmd->add_option("--recipe", val.recipe, "Mixing recipe")->capture_default_str();
  val_cmd->add_option("--shape", val.shape, "Mask shape HxW or L")->required();
  val_cmd->add_option("--trials", val.trials, "Draws per check")->capture_default_str();
  val_cmd->add_option("--seed", val.seed, "Seed")->required();
  val_cmd->add_option("--out", val.out, "Report directory")->required();

  OccludeArgs occ;
  auto* occ_cmd = app.add_subcommand("occlude", "Write an occluded copy of a dataset");
  occ_cmd->add_option("--manifest", occ.manifest, "CSV manifest")->required();
  occ_cmd->add_option("--out", occ.out, "Output directory")->required();
  occ_cmd->add_option("--fraction", occ.fraction, "Occluded area fraction in (0, 1)")->required();
  occ_cmd->add_option("--seed", occ.seed, "Seed")->required();
  occ_cmd->add_option("--blocks", occ.blocks, "Occlusion blocks per sample")->capture_default_str()->check(
      CLI::PositiveNumber);

  // CLI11 consumes a reversed argument vector without the program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
    if (mix_cmd->parsed()) return cmd_mix(mix, err);
    if (val_cmd->parsed()) return cmd_validate(val, err);
    return cmd_occlude(occ, err);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mixforge: " << first_line(e.what()) << "\n" << app.help();
    return kBadArgs;
  } catch (const RecipeError& e) {
    err << "mixforge: invalid recipe: " << e.what() << "\n";
    return kInvalidRecipe;
  } catch (const IoError& e) {
    err << "mixforge: " << e.what() << "\n";
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "mixforge: " << e.what() << "\n";
    return kIoFailure;
  } catch (const InvalidArgument& e) {
    err << "mixforge: " << e.what() << "\n";
    return kBadArgs;
  }
}

}  // namespace mixforge::cli
