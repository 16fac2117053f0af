#include "cldmap/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "cldmap/generators.hpp"
#include "cldmap/image_io.hpp"
#include "cldmap/render.hpp"

namespace cldmap::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kManifestName = "manifest.json";
constexpr int kPolarSize = 512;

const std::set<std::string>& known_maps() {
  static const std::set<std::string> maps{"cld", "smap", "dmap", "ddmap", "mmap"};
  return maps;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string svg_with_manifest(std::string svg) {
  const auto eol = svg.find('\n');
  svg.insert(eol + 1, std::string("<!-- manifest: ") + kManifestName + " -->\n");
  return svg;
}

std::vector<std::uint8_t> as_bytes(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

std::vector<PngText> png_tags() {
  return {{"Manifest", kManifestName},
          {"Software", std::string("cldmap ") + kToolVersion}};
}

Json cld_json(const Analysis& a, const AnalyzeOptions& opts) {
  const DirectionTable table(a.average.directions(), 1);
  Json dirs = Json::array();
  for (int k = 1; k <= a.average.directions(); ++k) {
    const auto& d = a.average[k];
    dirs.push_back({{"k", k},
                    {"theta_rad", table.angle(k)},
                    {"mean_length", d.present() ? Json(d.mean()) : Json(nullptr)},
                    {"cardinality", d.cardinality}});
  }
  const double pixels = static_cast<double>(a.field.height()) * a.field.width();
  return Json{
      {"schema", kSchemaVersion},
      {"manifest", kManifestName},
      {"height", a.field.height()},
      {"width", a.field.width()},
      {"tau", opts.config.tau},
      {"directions", opts.config.directions},
      {"normalization", std::string(to_string(opts.config.normalization))},
      {"r_max", a.max_radius},
      {"r_max_cap", opts.config.max_radius_cap ? Json(*opts.config.max_radius_cap)
                                               : Json(nullptr)},
      {"global_mean", a.global_mean},
      {"anisotropy_ratio", optional_number(a.average.anisotropy_ratio())},
      {"defined_pixel_fraction", a.boundaries.defined_count() / pixels},
      {"mean_q", a.boundaries.mean_q()},
      {"q_mean_mode", opts.literal_q_mean ? "all_pixels" : "defined_pixels"},
      {"q_defined_count", a.boundaries.defined_count()},
      {"per_direction", dirs},
  };
}

std::string cld_csv(const Analysis& a) {
  const DirectionTable table(a.average.directions(), 1);
  std::ostringstream out;
  out << "# manifest: " << kManifestName << "\n";
  out << "k,theta_rad,mean_length,cardinality\n";
  for (int k = 1; k <= a.average.directions(); ++k) {
    const auto& d = a.average[k];
    out << k << ',' << format_number(table.angle(k)) << ','
        << (d.present() ? format_number(d.mean()) : std::string()) << ','
        << d.cardinality << '\n';
  }
  return out.str();
}

std::optional<unsigned> threads_from_env() {
  const char* env = std::getenv("CLDMAP_THREADS");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0 || v > 4096) {
    throw ConfigError(std::string("CLDMAP_THREADS must be a positive integer, got '") +
                      env + "'");
  }
  return static_cast<unsigned>(v);
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kBadArguments;
  if (dynamic_cast<const DegenerateError*>(&e)) return kDegenerate;
  return kBadInput;
}

int run_analyze(AnalyzeOptions opts, bool threads_given, std::ostream& out) {
  if (opts.input.has_value() == opts.scene.has_value()) {
    throw ConfigError("analyze needs exactly one of an input file or --scene");
  }
  opts.config.validate();
  if (!(opts.tau_prime > 0.0)) throw ConfigError("--tau-prime must be positive");
  if (!(opts.tau_second > 0.0)) throw ConfigError("--tau-second must be positive");
  for (const auto& m : opts.maps) {
    if (!known_maps().contains(m)) throw ConfigError("unknown map '" + m + "'");
  }
  if (!threads_given) {
    if (auto env = threads_from_env()) opts.threads = *env;
  }

  std::optional<GrayImage> img;
  std::string input_hash;
  Json input_json;
  if (opts.input) {
    const auto bytes = read_file(*opts.input);
    img = decode_image(bytes);
    input_hash = sha256_hex(bytes);
    input_json = {{"path", opts.input->generic_string()}};
  } else {
    const auto spec = scenes::parse_scene(*opts.scene);
    img = scenes::generate(spec);
    input_hash = sha256_hex(encode_pgm(*img));
    input_json = {{"scene", scenes::to_string(spec)}};
  }

  const Analysis a = analyze_image(*img, opts);

  std::set<std::string> wanted(opts.maps.begin(), opts.maps.end());
  fs::create_directories(opts.out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, std::span<const std::uint8_t> bytes) {
    write_file(opts.out_dir / name, bytes);
    written.push_back(name);
  };

  if (wanted.contains("cld")) {
    if (opts.format == "csv") {
      emit("cld.csv", as_bytes(cld_csv(a)));
    } else {
      emit("cld.json", as_bytes(cld_json(a, opts).dump(2) + "\n"));
    }
    const PolarLabels labels{opts.config.tau, opts.config.normalization};
    emit("cld.svg", as_bytes(svg_with_manifest(render_polar_svg(a.average, kPolarSize, labels))));
  }
  const auto tags = png_tags();
  if (wanted.contains("smap")) {
    emit("smap.png", encode_png(render_support_overlay(*img, a.support), tags));
  }
  if (wanted.contains("dmap")) {
    emit("dmap.png", encode_png(render_defect_overlay(*img, a.defects), tags));
  }
  if (wanted.contains("ddmap")) {
    emit("ddmap.png", encode_png(render_ddmap_overlay(*img, a.boundaries), tags));
  }
  if (wanted.contains("mmap")) {
    const MixedLayers layers = mixed_map(a.defects, a.boundaries);
    emit("mmap.png", encode_png(render_mixed_overlay(*img, layers), tags));
  }

  Json maps = Json::array();
  for (const auto& m : opts.maps) maps.push_back(m);
  const Json manifest{
      {"schema", kSchemaVersion},
      {"tool", "cldmap"},
      {"version", kToolVersion},
      {"command", "analyze"},
      {"input", input_json},
      {"input_sha256", input_hash},
      {"height", img->height()},
      {"width", img->width()},
      {"tau", opts.config.tau},
      {"tau_prime", opts.tau_prime},
      {"tau_second", opts.tau_second},
      {"directions", opts.config.directions},
      {"normalization", std::string(to_string(opts.config.normalization))},
      {"r_max_cap", opts.config.max_radius_cap ? Json(*opts.config.max_radius_cap)
                                               : Json(nullptr)},
      {"r_max", a.max_radius},
      {"literal_q_mean", opts.literal_q_mean},
      {"maps", maps},
      {"format", opts.format},
      {"outputs", written},
  };
  write_file(opts.out_dir / kManifestName, as_bytes(manifest.dump(2) + "\n"));

  const auto ratio = a.average.anisotropy_ratio();
  const double pixels = static_cast<double>(img->height()) * img->width();
  out << "anisotropy=" << (ratio ? format_number(*ratio) : std::string("n/a"))
      << " defined_fraction=" << format_number(a.boundaries.defined_count() / pixels)
      << " mean_q=" << format_number(a.boundaries.mean_q()) << "\n";
  return kOk;
}

struct GenerateOptions {
  std::string kind;
  std::string size = "64x64";
  std::vector<std::pair<std::string, std::string>> params;
  fs::path out;
};

int run_generate(const GenerateOptions& opts, std::ostream& out) {
  std::string text = opts.kind + ":size=" + opts.size;
  for (const auto& [k, v] : opts.params) text += "," + k + "=" + v;
  const auto spec = scenes::parse_scene(text);
  const GrayImage img = scenes::generate(spec);

  const bool pgm = opts.out.extension() == ".pgm";
  const std::string manifest_name = opts.out.stem().string() + ".manifest.json";
  std::vector<std::uint8_t> bytes;
  if (pgm) {
    bytes = encode_pgm(img);
  } else {
    const std::vector<PngText> tags{{"Manifest", manifest_name},
                                    {"Software", std::string("cldmap ") + kToolVersion}};
    bytes = encode_png(img, tags);
  }
  if (opts.out.has_parent_path()) fs::create_directories(opts.out.parent_path());
  write_file(opts.out, bytes);

  const Json manifest{
      {"schema", kSchemaVersion},
      {"tool", "cldmap"},
      {"version", kToolVersion},
      {"command", "generate"},
      {"scene", scenes::to_string(spec)},
      {"output", opts.out.filename().string()},
      {"output_sha256", sha256_hex(bytes)},
  };
  write_file(opts.out.parent_path() / manifest_name, as_bytes(manifest.dump(2) + "\n"));
  out << "wrote " << opts.out.generic_string() << " (" << scenes::to_string(spec) << ")\n";
  return kOk;
}

}  // namespace

Analysis analyze_image(const GrayImage& img, const AnalyzeOptions& opts) {
  LocalCLDField field = compute_local_field(img, opts.config, opts.threads);
  AverageCLD average = average_cld(field);
  if (!average.anisotropy_ratio()) {
    throw DegenerateError("no direction has a defined coherence length");
  }
  SupportField support = support_map(field);
  DefectField defects = defect_map(field, average, opts.tau_prime);
  DirectionalDefectField boundaries = directional_defect_map(
      field, average, opts.tau_second,
      opts.literal_q_mean ? QMeanMode::all_pixels : QMeanMode::defined_pixels);
  const int max_radius = opts.config.max_radius(img.height(), img.width());
  const double mean = global_mean(img).value();
  return Analysis{std::move(field), std::move(average), std::move(support),
                  std::move(defects), std::move(boundaries), max_radius, mean};
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  }
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherence length diagrams and defect maps of grayscale images", "cldmap"};
  app.require_subcommand(1);

  AnalyzeOptions aopts;
  std::string input;
  std::string scene;
  std::string normalization = "count";
  std::optional<int> r_max;
  auto* analyze = app.add_subcommand("analyze", "Compute the CLD and its maps");
  analyze->add_option("input", input, "PNG or PGM image");
  analyze->add_option("--scene", scene, "Synthetic scene instead of a file, e.g. "
                                        "chessboard:size=64x64,cell=8,defect=3:4");
  analyze->add_option("--tau", aopts.config.tau, "Coherence threshold tau")
      ->capture_default_str();
  analyze->add_option("--tau-prime", aopts.tau_prime, "Defect map band tau'")
      ->capture_default_str();
  analyze->add_option("--tau-second", aopts.tau_second,
                      "Directional defect band tau'' (default 0.5 is arbitrary: "
                      "unspecified by source)")
      ->capture_default_str();
  analyze->add_option("--directions", aopts.config.directions,
                      "Number of directions (multiple of 4)")
      ->capture_default_str();
  analyze->add_option("--normalization", normalization, "Moment normalization")
      ->check(CLI::IsMember({"count", "literal"}))
      ->capture_default_str();
  analyze->add_option("--r-max", r_max, "Cap on the ray radius");
  analyze->add_flag("--literal-q-mean", aopts.literal_q_mean,
                    "Average the shape difference over all pixels, not only defined ones");
  analyze->add_option("--maps", aopts.maps, "Outputs: cld,smap,dmap,ddmap,mmap")
      ->delimiter(',')
      ->capture_default_str();
  analyze->add_option("--format", aopts.format, "CLD export format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  analyze->add_option("--out-dir", aopts.out_dir, "Output directory")->capture_default_str();
  auto* threads_opt = analyze->add_option(
      "--threads", aopts.threads, "Worker threads (default: CLDMAP_THREADS or all cores)");
  threads_opt->check(CLI::Range(1u, 4096u));

  GenerateOptions gopts;
  std::map<std::string, std::string> gparams;
  auto* gen = app.add_subcommand("generate", "Write a synthetic test image");
  gen->add_option("kind", gopts.kind, "constant | stripes | chessboard | dots | noise")
      ->required()
      ->check(CLI::IsMember({"constant", "stripes", "chessboard", "dots", "noise"}));
  gen->add_option("--size", gopts.size, "HEIGHTxWIDTH")->capture_default_str();
  const std::pair<const char*, const char*> keys[] = {
      {"value", "constant: gray level; dots: dot gray level"},
      {"period", "stripes: period in pixels (even)"},
      {"low", "stripes: first half-period level"},
      {"high", "stripes: second half-period level"},
      {"orientation", "stripes: vertical | horizontal"},
      {"cell", "chessboard: cell size in pixels"},
      {"dark", "chessboard: dark level"},
      {"light", "chessboard: light level"},
      {"defect", "chessboard: flipped cell ROW:COL, zero-based"},
      {"background", "dots: background level"},
      {"radius", "dots: disk radius"},
      {"count", "dots: number of dots"},
      {"seed", "dots, noise: mt19937 seed"}};
  for (const auto& [key, help] : keys) {
    gen->add_option(std::string("--") + key, gparams[key], help);
  }
  gen->add_option("-o,--out", gopts.out, "Output file (.png or .pgm)")->required();

  std::vector<const char*> argv{"cldmap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "cldmap: " << e.what() << "\n";
    return kBadArguments;
  }

  try {
    if (analyze->parsed()) {
      if (!input.empty()) aopts.input = input;
      if (!scene.empty()) aopts.scene = scene;
      aopts.config.normalization = parse_normalization(normalization);
      aopts.config.max_radius_cap = r_max;
      return run_analyze(std::move(aopts), threads_opt->count() > 0, out);
    }
    for (const auto& [k, v] : gparams) {
      if (!v.empty()) gopts.params.emplace_back(k, v);
    }
    return run_generate(gopts, out);
  } catch (const Error& e) {
    err << "cldmap: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "cldmap: " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace cldmap::cli
