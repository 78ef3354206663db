#include "phyfid/report.hpp"

#include <cstdio>
#include <fstream>

#include "phyfid/error.hpp"

namespace phyfid {

std::string to_string(SsimMode mode) { return mode == SsimMode::global ? "global" : "windowed"; }

std::string to_string(SeComponents c) { return c == SeComponents::both ? "both" : "u_only"; }

SsimMode parse_ssim_mode(const std::string& s) {
  if (s == "global") return SsimMode::global;
  if (s == "windowed") return SsimMode::windowed;
  throw ConfigError("ssim_mode must be 'global' or 'windowed', got '" + s + "'");
}

SeComponents parse_se_components(const std::string& s) {
  if (s == "both") return SeComponents::both;
  if (s == "u_only") return SeComponents::u_only;
  throw ConfigError("se_components must be 'both' or 'u_only', got '" + s + "'");
}

nlohmann::json flow_params_to_json(const FlowParams& p) {
  return {{"pyramid_scale", p.pyramid_scale}, {"levels", p.levels},
          {"window_size", p.window_size},     {"iterations", p.iterations},
          {"poly_n", p.poly_n},               {"poly_sigma", p.poly_sigma}};
}

nlohmann::json report_to_json(const MetricReport& r, const std::string& real_path,
                              const std::string& gen_path) {
  using nlohmann::json;
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["inputs"] = {{"real", real_path}, {"gen", gen_path}};
  doc["frame_count"] = r.frame_count;
  doc["pixel_count"] = r.pixel_count;
  doc["width"] = r.width;
  doc["height"] = r.height;
  doc["flow_params"] = flow_params_to_json(r.flow_params);
  doc["options"] = {{"ssim_mode", to_string(r.options.ssim_mode)},
                    {"se_components", to_string(r.options.se_components)},
                    {"border_margin", r.options.border_margin},
                    {"simulation_inputs", r.options.simulation_inputs}};
  doc["metrics"] = {{"rmse", r.rmse}, {"ssim", r.ssim}, {"sfe", r.sfe}, {"se", r.se},
                    {"gs", r.gs},     {"cs", r.cs},     {"qce", r.qce}, {"ve", r.ve}};
  const auto& n = r.notes;
  doc["diagnostics"] = {
      {"evaluated_pixels", n.evaluated_pixels},
      {"border_excluded_px", r.options.border_margin},
      {"singular_pixels_real", n.singular_pixels_real},
      {"singular_pixels_gen", n.singular_pixels_gen},
      {"se_u", n.se_u},
      {"se_v", n.se_v},
      {"gs_real", n.gs_real},
      {"cs_real", n.cs_real},
      {"stream_path_discrepancy_real", n.stream_path_discrepancy_real},
      {"stream_path_discrepancy_gen", n.stream_path_discrepancy_gen},
      {"qce_ve_advisory", n.qce_ve_advisory},
  };
  return doc;
}

void append_csv_row(const std::filesystem::path& path, const MetricReport& r,
                    const std::string& real_path, const std::string& gen_path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot append to " + path.string());
  if (fresh) out << "real,gen,frames,width,height,rmse,ssim,sfe,se,gs,cs,qce,ve\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                r.frame_count, r.width, r.height, r.rmse, r.ssim, r.sfe, r.se, r.gs, r.cs, r.qce,
                r.ve);
  out << '"' << real_path << "\",\"" << gen_path << "\"," << buf;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace phyfid
