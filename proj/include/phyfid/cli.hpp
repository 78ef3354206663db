#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "phyfid/flow.hpp"
#include "phyfid/metrics.hpp"

namespace phyfid::cli {

enum ExitCode : int { ok = 0, usage_error = 2, data_error = 3, internal_error = 4 };

struct RunConfig {
  std::string real_path;
  std::string gen_path;
  FlowParams flow;
  SsimMode ssim_mode = SsimMode::global;
  SeComponents se_components = SeComponents::both;
  int border_margin = 0;
  /// Report path; empty prints the report to stdout.
  std::string output;
  /// Optional CSV file that receives one appended row.
  std::string csv;
  bool emit_heatmaps = false;
  std::string heatmap_dir = "heatmaps";
  std::vector<std::string> heatmap_fields = {"vorticity", "divergence", "stream_function",
                                             "q_criterion", "flow"};
  /// 0 means all available cores.
  int workers = 0;
  bool simulation_inputs = false;
};

/// Fields present in `doc` override those in `base`. Unknown keys are a
/// ConfigError.
RunConfig merge_config(RunConfig base, const nlohmann::json& doc);

/// Path existence and option ranges. Throws ConfigError.
void validate_config(const RunConfig& config);

/// Loads both sequences, evaluates, writes the report (and CSV / heatmaps
/// when requested) and returns the report document.
nlohmann::json run_evaluate(const RunConfig& config, std::ostream& out);

enum class SynthKind { translation, rotation, taylor_green };

struct SynthSpec {
  SynthKind kind = SynthKind::rotation;
  int width = 64;
  int height = 64;
  int frames = 8;
  std::uint64_t seed = 7;
  double omega = 0.02;      // rotation, rad/frame
  double dx = 3.0;          // translation, px/frame
  double dy = 1.0;
  double amplitude = 1.0;   // taylor_green, px/frame
  std::string out_dir;
  /// "pgm" writes frame_NNN.pgm files; "tensor" writes frames.pft.
  std::string format = "pgm";
};

/// Renders the sequence, writes frames plus synth.json, and returns the
/// sequence exactly as stored (8-bit quantised for pgm).
FrameSequence run_synth(const SynthSpec& spec);

/// Scalar field names accepted by heatmap output, plus "flow".
ScalarField field_by_name(const std::string& name, const FlowField& flow);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phyfid::cli
