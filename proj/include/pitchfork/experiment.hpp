#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pitchfork {

inline constexpr const char* kToolVersion = "pitchfork 0.1.0";

/// Flat key-value configuration with INI-style sections. Keys are stored
/// section-qualified ("noise.alpha"). Unknown keys are rejected and every
/// referenced field is validated before any computation starts.
class ExperimentConfig {
 public:
  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Resolves a bare field name ("beta") to its qualified key ("model.beta").
  /// Throws when the name is unknown or ambiguous.
  std::string resolve_key(const std::string& name) const;

 private:
  std::map<std::string, std::string> entries_;
};

struct ReportBundle {
  std::vector<std::string> files;  // paths written, relative to out_dir
  std::map<std::string, double> summary;
  double wall_time_s = 0.0;
};

/// Runs the configured experiment, writing CSV artifacts plus a manifest into
/// out_dir. CSV bytes depend only on (config, seed), never on thread count.
ReportBundle run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                            int threads = 0);

/// Runs the experiment once per value of the swept parameter on derived seeds
/// (seed_i = derive_seed(seed, i)) and writes a combined CSV keyed by the
/// value. Per-value failures are recorded and the sweep continues.
ReportBundle run_sweep(const ExperimentConfig& base, const std::string& parameter,
                       const std::vector<double>& values, const std::string& out_dir,
                       int threads = 0);

}  // namespace pitchfork
