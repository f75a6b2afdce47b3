#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hecke/hecke_oracle.hpp"
#include "hecke/series.hpp"
#include "hecke/sym_table.hpp"

namespace hecke {

enum class OutputFormat { json, latex, text };
enum class OmegaChoice { calibrated, ascending };

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

struct Config {
  std::uint64_t budget = 1'000'000'000;
  unsigned workers = 1;
  OutputFormat format = OutputFormat::json;
  SymConvention sym = SymConvention::orbit_sum;
  OmegaChoice omega = OmegaChoice::calibrated;
  std::filesystem::path ktable = default_ktable_path();

  // Defaults with HECKE_ENUM_BUDGET applied.
  static Config from_environment();

  EnumerationOptions enumeration() const;
  OmegaFamily omega_family(int genus) const;
  KTable load_ktable() const;
};

// Hash git would give the file as a blob: sha1("blob <size>\0" + content).
std::string git_blob_sha1(const std::filesystem::path& path);

struct CheckParams {
  std::optional<std::int64_t> p;
  std::optional<int> genus;
  std::optional<int> max_delta;
  RemarkForm remark_form = RemarkForm::invert_p;
};

struct CheckOutcome {
  bool passed = false;
  nlohmann::json report;  // deterministic for a given Config
  nlohmann::json timing;  // wall-clock, kept out of the report
};

// name in {funceq, remark, oracle, siegel, counts}
CheckOutcome run_check(const std::string& name, const CheckParams& params, const Config& config);

struct ReconstructParams {
  int genus = 1;
  bool symbolic = false;
  std::int64_t p = 2;
  std::optional<int> degree;     // default 2^genus - 2
  std::optional<int> max_delta;  // numeric mode; default degree + 2 when affordable
  InterpolationPlan plan;        // symbolic mode
};

CheckOutcome run_reconstruct(const ReconstructParams& params, const Config& config);

// Object written by `emit` for the json format.
nlohmann::json emit_json(int genus, const Config& config);

// Entire command line, argv[0] included. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hecke
