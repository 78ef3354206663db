#include "phyfid/metrics.hpp"

#include <cmath>
#include <string>

#include "imgproc.hpp"
#include "parallel.hpp"
#include "phyfid/diffops.hpp"
#include "phyfid/error.hpp"
#include "phyfid/kernels.hpp"

namespace phyfid {

using detail::Plane;

namespace {

struct Region {
  int x0 = 0, y0 = 0, width = 0, height = 0;
  std::size_t count() const { return static_cast<std::size_t>(width) * height; }
};

Region region_for(int width, int height, int margin) {
  if (margin < 0 || 4 * margin >= std::min(width, height)) {
    throw ConfigError("border margin " + std::to_string(margin) + " must be in [0, " +
                      "min(width, height) / 4) for a " + std::to_string(width) + "x" +
                      std::to_string(height) + " grid");
  }
  return {margin, margin, width - 2 * margin, height - 2 * margin};
}

std::span<const double> crop_row(GridView g, const Region& r, int y) {
  return g.row(r.y0 + y).subspan(r.x0, r.width);
}

double sum_sq_diff(GridView a, GridView b, const Region& r) {
  double total = 0.0;
  for (int y = 0; y < r.height; ++y) {
    total += kernels::sum_sq_diff(crop_row(a, r, y), crop_row(b, r, y));
  }
  return total;
}

double sum_sq(GridView a, const Region& r) {
  double total = 0.0;
  for (int y = 0; y < r.height; ++y) {
    const auto row = crop_row(a, r, y);
    total += kernels::dot(row, row);
  }
  return total;
}

double rms_diff(GridView a, GridView b, const Region& r) {
  return std::sqrt(sum_sq_diff(a, b, r) / static_cast<double>(r.count()));
}

void require_same_flows(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
                        std::size_t min_count) {
  if (real.size() != gen.size()) {
    throw LengthError("flow lists differ in length: " + std::to_string(real.size()) + " vs " +
                      std::to_string(gen.size()));
  }
  if (real.size() < min_count) {
    throw LengthError("need at least " + std::to_string(min_count) + " flows, got " +
                      std::to_string(real.size()));
  }
  for (std::size_t t = 0; t < real.size(); ++t) {
    if (real[t].width() != gen[t].width() || real[t].height() != gen[t].height() ||
        real[t].width() != real.front().width() || real[t].height() != real.front().height()) {
      throw ShapeError("flow " + std::to_string(t) + " dimensions differ");
    }
  }
}

// Mean over flow pairs of RMS(field(real) - field(gen)).
template <class FieldFn>
double paired_field_rmse(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
                         int margin, FieldFn&& field) {
  require_same_flows(real, gen, 1);
  const Region r = region_for(real.front().width(), real.front().height(), margin);
  double total = 0.0;
  for (std::size_t t = 0; t < real.size(); ++t) {
    const ScalarField a = field(real[t]);
    const ScalarField b = field(gen[t]);
    total += rms_diff(a.view(), b.view(), r);
  }
  return total / static_cast<double>(real.size());
}

constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

double ssim_formula(double mx, double my, double vx, double vy, double cov) {
  return ((2.0 * mx * my + kC1) * (2.0 * cov + kC2)) /
         ((mx * mx + my * my + kC1) * (vx + vy + kC2));
}

double ssim_global(GridView a, GridView b, const Region& r) {
  const double m = static_cast<double>(r.count());
  double sa = 0.0, sb = 0.0;
  for (int y = 0; y < r.height; ++y) {
    sa += kernels::sum(crop_row(a, r, y));
    sb += kernels::sum(crop_row(b, r, y));
  }
  const double ma = sa / m, mb = sb / m;
  std::vector<double> ca(r.width), cb(r.width);
  double va = 0.0, vb = 0.0, cov = 0.0;
  for (int y = 0; y < r.height; ++y) {
    const auto ra = crop_row(a, r, y), rb = crop_row(b, r, y);
    for (int x = 0; x < r.width; ++x) {
      ca[x] = ra[x] - ma;
      cb[x] = rb[x] - mb;
    }
    va += kernels::dot(ca, ca);
    vb += kernels::dot(cb, cb);
    cov += kernels::dot(ca, cb);
  }
  return ssim_formula(ma, mb, va / m, vb / m, cov / m);
}

Plane crop(GridView g, const Region& r) {
  Plane out(r.width, r.height);
  for (int y = 0; y < r.height; ++y) {
    const auto src = crop_row(g, r, y);
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

double ssim_windowed(GridView a, GridView b, const Region& r) {
  constexpr int kRadius = 5;
  if (r.width < 2 * kRadius + 1 || r.height < 2 * kRadius + 1) {
    throw ShapeError("windowed SSIM needs at least 11x11 pixels");
  }
  const auto g = detail::gaussian_kernel(1.5, kRadius);
  const Plane pa = crop(a, r), pb = crop(b, r);
  Plane aa(r.width, r.height), bb(r.width, r.height), ab(r.width, r.height);
  for (std::size_t i = 0; i < pa.data.size(); ++i) {
    aa.data[i] = pa.data[i] * pa.data[i];
    bb.data[i] = pb.data[i] * pb.data[i];
    ab.data[i] = pa.data[i] * pb.data[i];
  }
  const Plane mu_a = detail::separable_filter(pa.view(), g);
  const Plane mu_b = detail::separable_filter(pb.view(), g);
  const Plane e_aa = detail::separable_filter(aa.view(), g);
  const Plane e_bb = detail::separable_filter(bb.view(), g);
  const Plane e_ab = detail::separable_filter(ab.view(), g);

  // Only centres whose window lies inside the region; reflected padding is
  // never read.
  double total = 0.0;
  std::size_t count = 0;
  for (int y = kRadius; y < r.height - kRadius; ++y) {
    for (int x = kRadius; x < r.width - kRadius; ++x) {
      const double ma = mu_a.at(x, y), mb = mu_b.at(x, y);
      total += ssim_formula(ma, mb, e_aa.at(x, y) - ma * ma, e_bb.at(x, y) - mb * mb,
                            e_ab.at(x, y) - ma * mb);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace

double rmse(const FrameSequence& real, const FrameSequence& gen, int border_margin) {
  validate_pair(real, gen);
  const Region r = region_for(real.width(), real.height(), border_margin);
  double total = 0.0;
  for (std::size_t t = 0; t < real.size(); ++t) total += rms_diff(real[t].view(), gen[t].view(), r);
  return total / static_cast<double>(real.size());
}

double ssim(const FrameSequence& real, const FrameSequence& gen, SsimMode mode,
            int border_margin) {
  validate_pair(real, gen);
  const Region r = region_for(real.width(), real.height(), border_margin);
  double total = 0.0;
  for (std::size_t t = 0; t < real.size(); ++t) {
    total += mode == SsimMode::global ? ssim_global(real[t].view(), gen[t].view(), r)
                                      : ssim_windowed(real[t].view(), gen[t].view(), r);
  }
  return total / static_cast<double>(real.size());
}

std::vector<FlowField> sequence_flows(const FrameSequence& seq, const FlowParams& params,
                                      int workers, FlowDiagnostics* diag) {
  params.validate();
  const std::size_t pairs = seq.size() - 1;
  std::vector<FlowField> flows(pairs);
  std::vector<FlowDiagnostics> diags(pairs);
  detail::parallel_for(pairs, workers, [&](std::size_t t) {
    flows[t] = farneback_flow(seq[t], seq[t + 1], params, &diags[t]);
  });
  if (diag != nullptr) {
    for (const auto& d : diags) {
      diag->singular_pixels += d.singular_pixels;
      diag->final_singular_pixels += d.final_singular_pixels;
      diag->levels_used = d.levels_used;
    }
  }
  return flows;
}

double sfe(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
           int border_margin) {
  return paired_field_rmse(real, gen, border_margin,
                           [](const FlowField& f) { return stream_function(f); });
}

SmoothnessError se_components(const std::vector<FlowField>& real,
                              const std::vector<FlowField>& gen, int border_margin,
                              SeComponents components) {
  require_same_flows(real, gen, 2);
  const int w = real.front().width(), h = real.front().height();
  const Region r = region_for(w, h, border_margin);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> d_gen(n), d_real(n);

  auto component = [&](auto values) {
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < real.size(); ++t) {
      const auto g0 = values(gen[t]), g1 = values(gen[t + 1]);
      const auto r0 = values(real[t]), r1 = values(real[t + 1]);
      for (std::size_t i = 0; i < n; ++i) {
        d_gen[i] = g1[i] - g0[i];
        d_real[i] = r1[i] - r0[i];
      }
      total += rms_diff({w, h, d_gen}, {w, h, d_real}, r);
    }
    return total / static_cast<double>(real.size() - 1);
  };

  SmoothnessError out;
  out.u = component([](const FlowField& f) { return f.u_values(); });
  out.v = component([](const FlowField& f) { return f.v_values(); });
  out.value = components == SeComponents::both ? 0.5 * (out.u + out.v) : out.u;
  return out;
}

double gs(const FrameSequence& gen, int border_margin) {
  const Region r = region_for(gen.width(), gen.height(), border_margin);
  double total = 0.0;
  GradientField prev = gradient(gen[0]);
  for (std::size_t t = 0; t + 1 < gen.size(); ++t) {
    GradientField next = gradient(gen[t + 1]);
    const double s = sum_sq_diff(next.dx.view(), prev.dx.view(), r) +
                     sum_sq_diff(next.dy.view(), prev.dy.view(), r);
    total += std::sqrt(s / (2.0 * static_cast<double>(r.count())));
    prev = std::move(next);
  }
  return total / static_cast<double>(gen.size() - 1);
}

double cs(const std::vector<FlowField>& flows, int border_margin) {
  if (flows.empty()) throw LengthError("continuity score needs at least 1 flow");
  const Region r = region_for(flows.front().width(), flows.front().height(), border_margin);
  double total = 0.0;
  for (const FlowField& f : flows) {
    if (f.width() != flows.front().width() || f.height() != flows.front().height()) {
      throw ShapeError("flow dimensions differ");
    }
    total += std::sqrt(sum_sq(divergence(f).view(), r) / static_cast<double>(r.count()));
  }
  return total / static_cast<double>(flows.size());
}

double qce(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
           int border_margin) {
  return paired_field_rmse(real, gen, border_margin,
                           [](const FlowField& f) { return q_criterion(f); });
}

double ve(const std::vector<FlowField>& real, const std::vector<FlowField>& gen,
          int border_margin) {
  return paired_field_rmse(real, gen, border_margin,
                           [](const FlowField& f) { return vorticity(f); });
}

MetricReport evaluate_all(const FrameSequence& real, const FrameSequence& gen,
                          const FlowParams& params, const MetricOptions& options) {
  validate_pair(real, gen);
  if (real.size() < 3) {
    throw LengthError("evaluation needs at least 3 frames for the smoothness error, got " +
                      std::to_string(real.size()));
  }
  params.validate();
  const int margin = options.border_margin;
  const Region region = region_for(real.width(), real.height(), margin);

  // Both sequences' pairs go through one pool.
  const std::size_t pairs = real.size() - 1;
  std::vector<FlowField> real_flows(pairs), gen_flows(pairs);
  std::vector<FlowDiagnostics> diags(2 * pairs);
  detail::parallel_for(2 * pairs, options.workers, [&](std::size_t job) {
    const bool is_gen = job >= pairs;
    const std::size_t t = is_gen ? job - pairs : job;
    const FrameSequence& seq = is_gen ? gen : real;
    (is_gen ? gen_flows : real_flows)[t] =
        farneback_flow(seq[t], seq[t + 1], params, &diags[job]);
  });

  MetricReport report;
  report.frame_count = real.size();
  report.pixel_count = real.pixel_count();
  report.width = real.width();
  report.height = real.height();
  report.flow_params = params;
  report.options = options;

  report.rmse = rmse(real, gen, margin);
  report.ssim = ssim(real, gen, options.ssim_mode, margin);
  report.sfe = sfe(real_flows, gen_flows, margin);
  const SmoothnessError smooth = se_components(real_flows, gen_flows, margin,
                                               options.se_components);
  report.se = smooth.value;
  report.gs = gs(gen, margin);
  report.cs = cs(gen_flows, margin);
  report.qce = qce(real_flows, gen_flows, margin);
  report.ve = ve(real_flows, gen_flows, margin);

  auto& notes = report.notes;
  notes.evaluated_pixels = region.count();
  for (std::size_t j = 0; j < diags.size(); ++j) {
    (j < pairs ? notes.singular_pixels_real : notes.singular_pixels_gen) +=
        diags[j].singular_pixels;
  }
  notes.se_u = smooth.u;
  notes.se_v = smooth.v;
  notes.gs_real = gs(real, margin);
  notes.cs_real = cs(real_flows, margin);
  for (std::size_t t = 0; t < pairs; ++t) {
    notes.stream_path_discrepancy_real = std::max(
        notes.stream_path_discrepancy_real, stream_function_path_discrepancy(real_flows[t]));
    notes.stream_path_discrepancy_gen = std::max(
        notes.stream_path_discrepancy_gen, stream_function_path_discrepancy(gen_flows[t]));
  }
  notes.qce_ve_advisory = !options.simulation_inputs;
  return report;
}

}  // namespace phyfid
