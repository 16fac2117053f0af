#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cldmap/coherence.hpp"
#include "cldmap/maps.hpp"

namespace cldmap::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kOk = 0,
  kBadArguments = 2,
  kBadInput = 3,
  kDegenerate = 4,
};

struct AnalyzeOptions {
  std::optional<std::filesystem::path> input;
  std::optional<std::string> scene;
  AnalysisConfig config;
  double tau_prime = 0.50;
  double tau_second = 0.50;
  bool literal_q_mean = false;
  std::vector<std::string> maps{"cld", "smap", "dmap", "ddmap", "mmap"};
  std::string format = "json";
  std::filesystem::path out_dir = ".";
  unsigned threads = 0;
};

/// Everything the analyze command derives from one image.
struct Analysis {
  LocalCLDField field;
  AverageCLD average;
  SupportField support;
  DefectField defects;
  DirectionalDefectField boundaries;
  int max_radius = 0;
  double global_mean = 0.0;
};

/// Full pipeline: local field, average diagram and the three map layers.
Analysis analyze_image(const GrayImage& img, const AnalyzeOptions& opts);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cldmap::cli
