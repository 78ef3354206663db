#include "phyfid/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "phyfid/diffops.hpp"
#include "phyfid/error.hpp"
#include "phyfid/heatmap.hpp"
#include "phyfid/io.hpp"
#include "phyfid/kernels.hpp"
#include "phyfid/report.hpp"
#include "phyfid/selftest.hpp"
#include "phyfid/synth.hpp"

namespace phyfid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void take(const json& doc, const char* key, T& field) {
  if (auto it = doc.find(key); it != doc.end()) {
    try {
      field = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

std::string synth_kind_name(SynthKind k) {
  switch (k) {
    case SynthKind::translation: return "translation";
    case SynthKind::rotation: return "rotation";
    case SynthKind::taylor_green: return "taylor_green";
  }
  return "unknown";
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void require_finite(const MetricReport& r) {
  for (double v : {r.rmse, r.ssim, r.sfe, r.se, r.gs, r.cs, r.qce, r.ve}) {
    if (!std::isfinite(v)) throw NumericError("evaluation produced a non-finite metric");
  }
}

const std::vector<std::string> kFieldNames = {"vorticity", "divergence", "stream_function",
                                              "q_criterion", "flow"};

}  // namespace

RunConfig merge_config(RunConfig c, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  static const std::vector<std::string> known = {
      "real", "gen", "pyramid_scale", "levels", "window_size", "iterations", "poly_n",
      "poly_sigma", "ssim_mode", "se_components", "border_margin", "output", "csv",
      "emit_heatmaps", "heatmap_dir", "heatmap_fields", "workers", "simulation_inputs"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  take(doc, "real", c.real_path);
  take(doc, "gen", c.gen_path);
  take(doc, "pyramid_scale", c.flow.pyramid_scale);
  take(doc, "levels", c.flow.levels);
  take(doc, "window_size", c.flow.window_size);
  take(doc, "iterations", c.flow.iterations);
  take(doc, "poly_n", c.flow.poly_n);
  take(doc, "poly_sigma", c.flow.poly_sigma);
  if (doc.contains("ssim_mode")) {
    std::string s;
    take(doc, "ssim_mode", s);
    c.ssim_mode = parse_ssim_mode(s);
  }
  if (doc.contains("se_components")) {
    std::string s;
    take(doc, "se_components", s);
    c.se_components = parse_se_components(s);
  }
  take(doc, "border_margin", c.border_margin);
  take(doc, "output", c.output);
  take(doc, "csv", c.csv);
  take(doc, "emit_heatmaps", c.emit_heatmaps);
  take(doc, "heatmap_dir", c.heatmap_dir);
  take(doc, "heatmap_fields", c.heatmap_fields);
  take(doc, "workers", c.workers);
  take(doc, "simulation_inputs", c.simulation_inputs);
  return c;
}

void validate_config(const RunConfig& c) {
  if (c.real_path.empty()) throw ConfigError("missing real sequence path (--real)");
  if (c.gen_path.empty()) throw ConfigError("missing gen sequence path (--gen)");
  std::error_code ec;
  if (!fs::exists(c.real_path, ec)) throw ConfigError("real path does not exist: " + c.real_path);
  if (!fs::exists(c.gen_path, ec)) throw ConfigError("gen path does not exist: " + c.gen_path);
  c.flow.validate();
  if (c.border_margin < 0) throw ConfigError("border_margin must be >= 0");
  if (c.workers < 0) throw ConfigError("workers must be >= 0");
  for (const auto& f : c.heatmap_fields) {
    if (std::find(kFieldNames.begin(), kFieldNames.end(), f) == kFieldNames.end()) {
      throw ConfigError("unknown heatmap field '" + f + "'");
    }
  }
}

ScalarField field_by_name(const std::string& name, const FlowField& flow) {
  if (name == "vorticity") return vorticity(flow);
  if (name == "divergence") return divergence(flow);
  if (name == "stream_function") return stream_function(flow);
  if (name == "q_criterion") return q_criterion(flow);
  throw ConfigError("unknown scalar field '" + name + "'");
}

json run_evaluate(const RunConfig& c, std::ostream& out) {
  validate_config(c);
  const FrameSequence real = io::load_sequence(c.real_path);
  const FrameSequence gen = io::load_sequence(c.gen_path);
  validate_pair(real, gen);
  if (4 * c.border_margin >= std::min(real.width(), real.height())) {
    throw ConfigError("border_margin " + std::to_string(c.border_margin) +
                      " must be below min(width, height) / 4");
  }

  MetricOptions options;
  options.ssim_mode = c.ssim_mode;
  options.se_components = c.se_components;
  options.border_margin = c.border_margin;
  options.workers = c.workers;
  options.simulation_inputs = c.simulation_inputs;
  const MetricReport report = evaluate_all(real, gen, c.flow, options);
  require_finite(report);

  const json doc = report_to_json(report, c.real_path, c.gen_path);
  if (c.output.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    write_json_file(c.output, doc);
  }
  if (!c.csv.empty()) append_csv_row(c.csv, report, c.real_path, c.gen_path);

  if (c.emit_heatmaps) {
    fs::create_directories(c.heatmap_dir);
    const auto flows = sequence_flows(gen, c.flow, c.workers);
    for (std::size_t t = 0; t < flows.size(); ++t) {
      for (const auto& name : c.heatmap_fields) {
        char file[96];
        std::snprintf(file, sizeof file, "%s_gen_t%03zu.png", name.c_str(), t);
        const fs::path path = fs::path(c.heatmap_dir) / file;
        if (name == "flow") {
          heatmap::emit_heatmap(flows[t], path);
        } else {
          heatmap::emit_heatmap(field_by_name(name, flows[t]), path);
        }
      }
    }
  }
  return doc;
}

FrameSequence run_synth(const SynthSpec& spec) {
  synth::GridSpec grid{spec.width, spec.height, true};
  grid.validate();
  if (spec.frames < 2) throw ConfigError("synth needs at least 2 frames");
  if (spec.format != "pgm" && spec.format != "tensor") {
    throw ConfigError("format must be 'pgm' or 'tensor'");
  }

  json params;
  FlowField flow;
  switch (spec.kind) {
    case SynthKind::translation:
      flow = synth::uniform_flow(grid, spec.dx, spec.dy);
      params = {{"dx", spec.dx}, {"dy", spec.dy}};
      break;
    case SynthKind::rotation:
      flow = synth::rigid_rotation_flow(grid, spec.omega);
      params = {{"omega", spec.omega},
                {"vorticity", 2.0 * spec.omega},
                {"q_criterion", spec.omega * spec.omega},
                {"divergence", 0.0}};
      break;
    case SynthKind::taylor_green:
      flow = synth::taylor_green_flow(grid, spec.amplitude);
      params = {{"amplitude", spec.amplitude},
                {"wavenumber", synth::taylor_green_wavenumber(grid)},
                {"divergence", 0.0}};
      break;
  }

  FrameSequence seq = synth::render_advected_sequence(grid, flow, spec.frames, spec.seed);
  const fs::path dir(spec.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  if (spec.format == "pgm") {
    seq = synth::quantize_8bit(seq);
    for (std::size_t t = 0; t < seq.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%03zu.pgm", t);
      io::write_pgm(dir / name, seq[t]);
    }
  } else {
    io::write_tensor(dir / "frames.pft", seq);
    seq = io::read_tensor(dir / "frames.pft");
  }

  const json sidecar = {{"kind", synth_kind_name(spec.kind)},
                        {"width", spec.width},
                        {"height", spec.height},
                        {"frames", spec.frames},
                        {"seed", spec.seed},
                        {"format", spec.format},
                        {"centered", true},
                        {"texture_sigma_px", 2.0},
                        {"ground_truth", params}};
  write_json_file(dir / "synth.json", sidecar);
  return seq;
}

namespace {

void add_flow_options(CLI::App* cmd, FlowParams& p) {
  cmd->add_option("--pyramid-scale", p.pyramid_scale, "Pyramid ratio per level, in (0, 1)");
  cmd->add_option("--levels", p.levels, "Pyramid levels");
  cmd->add_option("--window-size", p.window_size, "Aggregation window (odd)");
  cmd->add_option("--iterations", p.iterations, "Iterations per level");
  cmd->add_option("--poly-n", p.poly_n, "Polynomial neighbourhood size (odd)");
  cmd->add_option("--poly-sigma", p.poly_sigma, "Gaussian applicability width");
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::config: return usage_error;
    case ErrorKind::shape:
    case ErrorKind::length:
    case ErrorKind::io: return data_error;
    case ErrorKind::numeric: return internal_error;
  }
  return internal_error;
}

bool use_color() {
  return std::getenv("NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO) != 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physics-consistency metrics for frame sequences", "phyfid"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "Kernel path: scalar, avx2 or neon (default: best available)");
  app.set_version_flag("--version", kToolVersion);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compute all metrics for a real/gen pair");
  RunConfig flags;
  std::string config_path, ssim_mode, se_components;
  evaluate->add_option("--config", config_path, "JSON config; flags override its values");
  auto* o_real = evaluate->add_option("--real", flags.real_path, "Real frames (dir or tensor)");
  auto* o_gen = evaluate->add_option("--gen", flags.gen_path, "Generated frames (dir or tensor)");
  FlowParams flow_flags;
  add_flow_options(evaluate, flow_flags);
  auto* o_ssim = evaluate->add_option("--ssim-mode", ssim_mode, "global | windowed");
  auto* o_se = evaluate->add_option("--se-components", se_components, "both | u_only");
  auto* o_margin = evaluate->add_option("--border-margin", flags.border_margin,
                                        "Pixels excluded on each side");
  auto* o_output = evaluate->add_option("-o,--output", flags.output, "Report path (JSON)");
  auto* o_csv = evaluate->add_option("--csv", flags.csv, "Append a CSV row here");
  auto* o_heat = evaluate->add_flag("--heatmaps", flags.emit_heatmaps, "Write heatmap images");
  auto* o_heat_dir = evaluate->add_option("--heatmap-dir", flags.heatmap_dir, "Heatmap directory");
  auto* o_heat_fields = evaluate->add_option("--heatmap-fields", flags.heatmap_fields,
                                             "Subset of vorticity,divergence,stream_function,"
                                             "q_criterion,flow")
                            ->delimiter(',');
  auto* o_workers = evaluate->add_option("--workers", flags.workers, "Threads (0 = all cores)");
  auto* o_sim = evaluate->add_flag("--simulation", flags.simulation_inputs,
                                   "Inputs carry precise simulation fields");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Render an analytic benchmark sequence");
  SynthSpec spec;
  std::string kind = "rotation";
  synth_cmd->add_option("--kind", kind, "translation | rotation | taylor_green");
  synth_cmd->add_option("--width", spec.width, "Grid width");
  synth_cmd->add_option("--height", spec.height, "Grid height");
  synth_cmd->add_option("--frames", spec.frames, "Frame count");
  synth_cmd->add_option("--seed", spec.seed, "Texture seed");
  synth_cmd->add_option("--omega", spec.omega, "Rotation rate (rad/frame)");
  synth_cmd->add_option("--dx", spec.dx, "Translation x (px/frame)");
  synth_cmd->add_option("--dy", spec.dy, "Translation y (px/frame)");
  synth_cmd->add_option("--amplitude", spec.amplitude, "Taylor-Green amplitude (px/frame)");
  synth_cmd->add_option("--format", spec.format, "pgm | tensor");
  synth_cmd->add_option("--out", spec.out_dir, "Output directory")->required();

  // heatmap
  auto* heat_cmd = app.add_subcommand("heatmap", "Render a field of one frame pair as an image");
  std::string heat_input, heat_field = "vorticity", heat_out;
  std::size_t heat_pair = 0;
  FlowParams heat_flow;
  heat_cmd->add_option("--input", heat_input, "Frames (dir or tensor)")->required();
  heat_cmd->add_option("--pair", heat_pair, "Pair index t (frames t, t+1)");
  heat_cmd->add_option("--field", heat_field,
                       "vorticity | divergence | stream_function | q_criterion | flow");
  heat_cmd->add_option("--out", heat_out, "Output .png or .ppm")->required();
  add_flow_options(heat_cmd, heat_flow);

  auto* self_cmd = app.add_subcommand("selftest", "Run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  try {
    if (!isa.empty()) {
      bool found = false;
      for (auto k : {kernels::Isa::scalar, kernels::Isa::avx2, kernels::Isa::neon}) {
        if (isa == kernels::to_string(k)) {
          kernels::select(k);
          found = true;
        }
      }
      if (!found) throw ConfigError("unknown kernel path '" + isa + "'");
    }

    if (*evaluate) {
      RunConfig c;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config " + config_path);
        json doc;
        try {
          in >> doc;
        } catch (const json::exception& e) {
          throw ConfigError("config " + config_path + ": " + e.what());
        }
        c = merge_config(c, doc);
      }
      if (o_real->count()) c.real_path = flags.real_path;
      if (o_gen->count()) c.gen_path = flags.gen_path;
      for (const auto* opt : evaluate->get_options()) {
        if (opt->count() == 0) continue;
        const std::string& n = opt->get_name();
        if (n == "--pyramid-scale") c.flow.pyramid_scale = flow_flags.pyramid_scale;
        if (n == "--levels") c.flow.levels = flow_flags.levels;
        if (n == "--window-size") c.flow.window_size = flow_flags.window_size;
        if (n == "--iterations") c.flow.iterations = flow_flags.iterations;
        if (n == "--poly-n") c.flow.poly_n = flow_flags.poly_n;
        if (n == "--poly-sigma") c.flow.poly_sigma = flow_flags.poly_sigma;
      }
      if (o_ssim->count()) c.ssim_mode = parse_ssim_mode(ssim_mode);
      if (o_se->count()) c.se_components = parse_se_components(se_components);
      if (o_margin->count()) c.border_margin = flags.border_margin;
      if (o_output->count()) c.output = flags.output;
      if (o_csv->count()) c.csv = flags.csv;
      if (o_heat->count()) c.emit_heatmaps = flags.emit_heatmaps;
      if (o_heat_dir->count()) c.heatmap_dir = flags.heatmap_dir;
      if (o_heat_fields->count()) c.heatmap_fields = flags.heatmap_fields;
      if (o_workers->count()) c.workers = flags.workers;
      if (o_sim->count()) c.simulation_inputs = flags.simulation_inputs;
      run_evaluate(c, out);
      return ok;
    }

    if (*synth_cmd) {
      if (kind == "translation") spec.kind = SynthKind::translation;
      else if (kind == "rotation") spec.kind = SynthKind::rotation;
      else if (kind == "taylor_green") spec.kind = SynthKind::taylor_green;
      else throw ConfigError("unknown synth kind '" + kind + "'");
      const FrameSequence seq = run_synth(spec);
      out << "wrote " << seq.size() << " frames to " << spec.out_dir << '\n';
      return ok;
    }

    if (*heat_cmd) {
      if (std::find(kFieldNames.begin(), kFieldNames.end(), heat_field) == kFieldNames.end()) {
        throw ConfigError("unknown heatmap field '" + heat_field + "'");
      }
      const FrameSequence seq = io::load_sequence(heat_input);
      if (heat_pair + 1 >= seq.size()) {
        throw ConfigError("pair " + std::to_string(heat_pair) + " is out of range for " +
                          std::to_string(seq.size()) + " frames");
      }
      const FlowField flow = farneback_flow(seq[heat_pair], seq[heat_pair + 1], heat_flow);
      if (heat_field == "flow") {
        heatmap::emit_heatmap(flow, heat_out);
      } else {
        heatmap::emit_heatmap(field_by_name(heat_field, flow), heat_out);
      }
      out << "wrote " << heat_out << '\n';
      return ok;
    }

    if (*self_cmd) {
      const auto cases = run_selftest(out, use_color());
      const auto failed = std::count_if(cases.begin(), cases.end(),
                                        [](const SelftestCase& c) { return !c.passed; });
      out << (cases.size() - failed) << "/" << cases.size() << " checks passed\n";
      return failed == 0 ? ok : internal_error;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return internal_error;
  }
  return usage_error;
}

}  // namespace phyfid::cli
