// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include "mixforge/randomix.hpp"

namespace mixforge {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw RecipeError("recipe key '" + std::string(key) + "': bad number '" + std::string(text) + "'");
  return v;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

MixRecipe parse_recipe(std::string_view text) {
  MixRecipe r;
  bool have_candidates = false, have_weights = false;
  std::set<std::string, std::less<>> seen;
  for (std::string_view clause : split(text, ';')) {
    if (clause.empty()) continue;
    const auto eq = clause.find('=');
    if (eq == std::string_view::npos) throw RecipeError("recipe clause '" + std::string(clause) + "' lacks '='");
    const std::string_view key = trim(clause.substr(0, eq));
    const std::string_view value = trim(clause.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) throw RecipeError("recipe key '" + std::string(key) + "' repeated");

    if (key == "candidates") {
      for (std::string_view name : split(value, ',')) {
        try {
          r.candidates.push_back(parse_method(name));
        } catch (const InvalidArgument& e) {
          throw RecipeError(e.what());
        }
      }
      have_candidates = true;
    } else if (key == "weights") {
      for (std::string_view w : split(value, ',')) r.weights.push_back(parse_real(key, w));
      have_weights = true;
    } else if (key == "alpha") {
      r.mixer.alpha = parse_real(key, value);
    } else if (key == "fmix_decay") {
      r.mixer.fmix_decay = parse_real(key, value);
    } else if (key == "interpolation") {
      if (value == "bilinear") r.mixer.interpolation = Interpolation::Bilinear;
      else if (value == "nearest") r.mixer.interpolation = Interpolation::Nearest;
      else throw RecipeError("interpolation must be bilinear or nearest");
    } else if (key == "cutmix_lambda") {
      if (value == "uniform") r.mixer.cutmix_lambda = LambdaLaw::Uniform;
      else if (value == "beta") r.mixer.cutmix_lambda = LambdaLaw::Beta;
      else throw RecipeError("cutmix_lambda must be uniform or beta");
    } else {
      throw RecipeError("unknown recipe key '" + std::string(key) + "'");
    }
  }
  if (!have_candidates) throw RecipeError("recipe needs candidates=...");
  if (!have_weights) r.weights.assign(r.candidates.size(), 1.0);
  r.validate();
  return r;
}

std::string format_recipe(const MixRecipe& recipe) {
  std::string out = "candidates=";
  for (std::size_t i = 0; i < recipe.candidates.size(); ++i) {
    if (i) out += ',';
    out += method_name(recipe.candidates[i]);
  }
  out += ";weights=";
  for (std::size_t i = 0; i < recipe.weights.size(); ++i) {
    if (i) out += ',';
    out += format_real(recipe.weights[i]);
  }
  out += ";alpha=" + format_real(recipe.mixer.alpha);
  out += ";fmix_decay=" + format_real(recipe.mixer.fmix_decay);
  if (recipe.mixer.interpolation == Interpolation::Nearest) out += ";interpolation=nearest";
  if (recipe.mixer.cutmix_lambda == LambdaLaw::Beta) out += ";cutmix_lambda=beta";
  return out;
}

}  // namespace mixforge
