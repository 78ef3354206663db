#pragma once

// Reference-based and reference-free fidelity metrics over frame sequences
// and their optical flows. Flow-based metrics average over the N-1
// consecutive-pair flows.

#include <cstddef>
#include <vector>

#include "phyfid/fields.hpp"
#include "phyfid/flow.hpp"

namespace phyfid {

enum class SsimMode { global, windowed };
enum class SeComponents { both, u_only };

struct MetricOptions {
  SsimMode ssim_mode = SsimMode::global;
  SeComponents se_components = SeComponents::both;
  /// Pixels excluded on every side; must be < min(width, height) / 4.
  int border_margin = 0;
  /// Threads for flow estimation; 0 means all available cores.
  int workers = 1;
  /// Inputs come from a simulation with precise fields. When false, QCE and
  /// VE are labelled advisory.
  bool simulation_inputs = false;
};

/// Mean over frames of the per-frame pixel RMSE.
double rmse(const FrameSequence& real, const FrameSequence& gen, int border_margin = 0);

/// Mean over frames of SSIM with C1 = (0.01 * 255)^2, C2 = (0.03 * 255)^2.
/// Global mode uses whole-frame statistics; windowed mode averages an
/// 11x11 Gaussian (sigma 1.5) SSIM map over fully contained windows.
double ssim(const FrameSequence& real, const FrameSequence& gen,
            SsimMode mode = SsimMode::global, int border_margin = 0);

/// flows[t] = farneback_flow(frame t, frame t+1).
std::vector<FlowField> sequence_flows(const FrameSequence& seq, const FlowParams& params,
                                      int workers = 1, FlowDiagnostics* diag = nullptr);

/// Stream function RMSE per flow pair, averaged.
double sfe(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
           int border_margin = 0);

struct SmoothnessError {
  double value = 0.0;  // reported SE
  double u = 0.0;      // u-component SE
  double v = 0.0;      // v-component SE
};

/// Temporal smoothness error of flow changes between consecutive steps.
SmoothnessError se_components(const std::vector<FlowField>& real,
                              const std::vector<FlowField>& gen, int border_margin = 0,
                              SeComponents components = SeComponents::both);

inline double se(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
                 int border_margin = 0, SeComponents components = SeComponents::both) {
  return se_components(real, gen, border_margin, components).value;
}

/// Gradient smoothness of a single sequence.
double gs(const FrameSequence& gen, int border_margin = 0);

/// Continuity score: RMS divergence per flow, averaged.
double cs(const std::vector<FlowField>& flows, int border_margin = 0);

/// Q-criterion RMSE per flow pair, averaged.
double qce(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
           int border_margin = 0);

/// Vorticity RMSE per flow pair, averaged.
double ve(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
          int border_margin = 0);

struct MetricReport {
  double rmse = 0.0;
  double ssim = 0.0;
  double sfe = 0.0;
  double se = 0.0;
  double gs = 0.0;
  double cs = 0.0;
  double qce = 0.0;
  double ve = 0.0;

  std::size_t frame_count = 0;
  std::size_t pixel_count = 0;
  int width = 0;
  int height = 0;
  FlowParams flow_params;
  MetricOptions options;

  struct Notes {
    std::size_t evaluated_pixels = 0;
    std::size_t singular_pixels_real = 0;
    std::size_t singular_pixels_gen = 0;
    double se_u = 0.0;
    double se_v = 0.0;
    double gs_real = 0.0;
    double cs_real = 0.0;
    double stream_path_discrepancy_real = 0.0;
    double stream_path_discrepancy_gen = 0.0;
    bool qce_ve_advisory = true;
  } notes;
};

/// Computes flows once per sequence, then every metric. Needs N >= 3.
MetricReport evaluate_all(const FrameSequence& real, const FrameSequence& gen,
                          const FlowParams& params = {}, const MetricOptions& options = {});

}  // namespace phyfid
