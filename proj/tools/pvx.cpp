// pvx: layered proxy-node video representation toolkit.
//
// Pipeline: synth -> vectorize -> build -> fit -> render / inpaint / edit /
// eval. `ablate` runs the component-ablation matrix on one dataset.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>

#include "pvx/editing.hpp"
#include "pvx/error.hpp"
#include "pvx/io.hpp"
#include "pvx/pipeline.hpp"
#include "pvx/renderer.hpp"
#include "pvx/synth_eval.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool deterministic = false;
};

pvx::PipelineConfig make_config(const GlobalOpts& g) {
  pvx::PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = pvx::load_config(g.config_path);
  if (g.seed_set) cfg.train.seed = g.seed;
  if (g.threads > 0) cfg.threads = g.threads;
  if (g.deterministic) cfg.deterministic = true;
  cfg.finalize();
  return cfg;
}

std::string frame_file(const std::string& dir, int t, const std::string& ext) {
  char buf[32];
  snprintf(buf, sizeof(buf), "frame_%05d.%s", t, ext.c_str());
  return (fs::path(dir) / buf).string();
}

std::set<int> parse_drop(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

pvx::GeneratedScene load_scene_for_dataset(const std::string& dataset, const std::string& scene_path) {
  std::string path = scene_path;
  if (path.empty()) path = (fs::path(dataset) / "scene_spec.json").string();
  if (!fs::exists(path))
    throw pvx::IoError("oracle tracker needs a scene spec (looked for " + path + ")");
  return pvx::generate(pvx::load_scene_spec(path));
}

struct Dataset {
  pvx::FrameSequence video;
  std::vector<pvx::LayerMaskTrack> masks;
};

Dataset load_dataset(const std::string& dir) {
  Dataset d;
  d.video = pvx::read_frames(dir);
  d.masks = pvx::read_mask_tracks(dir, d.video.frame_count(), d.video.height, d.video.width);
  return d;
}

int cmd_synth(const std::string& spec_path, const std::string& suite_name, const std::string& out_dir) {
  std::vector<pvx::SceneSpec> specs;
  if (!suite_name.empty()) {
    for (const pvx::SceneSpec& s : pvx::standard_suite())
      if (suite_name == "all" || s.name == suite_name) specs.push_back(s);
    if (specs.empty()) throw pvx::InvalidInput("unknown suite scene: " + suite_name);
  } else {
    specs.push_back(pvx::load_scene_spec(spec_path));
  }
  for (const pvx::SceneSpec& spec : specs) {
    const std::string dir =
        specs.size() == 1 ? out_dir : (fs::path(out_dir) / spec.name).string();
    const pvx::GeneratedScene scene = pvx::generate(spec);
    pvx::write_dataset(dir, scene.frames, scene.layers);
    const fs::path clean = fs::path(dir) / "clean_background";
    fs::create_directories(clean);
    for (int t = 0; t < scene.clean_background.frame_count(); ++t)
      pvx::write_png_rgb(frame_file(clean.string(), t, "png"), scene.clean_background.frames[t]);
    pvx::save_scene_spec((fs::path(dir) / "scene_spec.json").string(), spec);
    std::cout << "wrote " << scene.frames.frame_count() << " frames, " << scene.layers.size()
              << " layers to " << dir << "\n";
  }
  return 0;
}

int cmd_vectorize(const pvx::PipelineConfig& cfg, const std::string& dataset, const std::string& out) {
  Dataset d = load_dataset(dataset);
  if (cfg.train.disable_layering)
    d.masks = pvx::single_layer_masks(d.video.height, d.video.width, d.video.frame_count());
  std::vector<std::pair<int, pvx::SeedNodes>> seeds;
  for (const pvx::LayerMaskTrack& track : d.masks) {
    seeds.push_back({track.layer_id, pvx::vectorize_layer(d.video.frames[track.t_start],
                                                          track.mask_at(track.t_start), track.t_start,
                                                          cfg.vectorizer)});
  }
  pvx::save_seeds_json(out, seeds);
  for (const auto& [id, s] : seeds)
    std::cout << "layer " << id << ": " << s.edge_points.size() << " edge + " << s.interior_points.size()
              << " interior seeds\n";
  return 0;
}

int cmd_build(const pvx::PipelineConfig& cfg, const std::string& dataset, const std::string& scene_path,
              const std::string& seeds_path, const std::string& out_dir) {
  Dataset d = load_dataset(dataset);
  pvx::GeneratedScene scene;
  if (cfg.tracker == "oracle") scene = load_scene_for_dataset(dataset, scene_path);
  const auto tracker = pvx::make_tracker(cfg, d.video, &scene);
  std::vector<std::pair<int, pvx::SeedNodes>> seeds;
  if (!seeds_path.empty()) seeds = pvx::load_seeds_json(seeds_path);
  const pvx::BuiltLayers built =
      pvx::build_all_layers(d.video, d.masks, *tracker, cfg, seeds_path.empty() ? nullptr : &seeds);
  fs::create_directories(out_dir);
  std::vector<int> ids;
  for (size_t i = 0; i < built.layers.size(); ++i) {
    char buf[32];
    snprintf(buf, sizeof(buf), "layer_%02d.pvt", built.layers[i].layer_id);
    pvx::save_pvt((fs::path(out_dir) / buf).string(), built.layers[i]);
    ids.push_back(built.layers[i].layer_id);
    std::cout << "layer " << built.layers[i].layer_id << ": " << built.layers[i].node_count()
              << " nodes\n";
  }
  pvx::write_diagnostics((fs::path(out_dir) / "diagnostics.jsonl").string(), ids, built.diagnostics);
  return 0;
}

int cmd_fit(const pvx::PipelineConfig& cfg, const std::string& dataset, const std::string& traj_dir,
            const std::string& out, const std::string& curve) {
  Dataset d = load_dataset(dataset);
  pvx::BuiltLayers built;
  built.masks = cfg.train.disable_layering
                    ? pvx::single_layer_masks(d.video.height, d.video.width, d.video.frame_count())
                    : d.masks;
  for (const pvx::LayerMaskTrack& track : built.masks) {
    char buf[32];
    snprintf(buf, sizeof(buf), "layer_%02d.pvt", track.layer_id);
    built.layers.push_back(pvx::load_pvt((fs::path(traj_dir) / buf).string()));
  }
  const pvx::FitReport report = pvx::run_fit(d.video, built, cfg);
  pvx::save_pvr(out, report.representation);
  if (!curve.empty()) pvx::write_loss_curve_csv(curve, report.loss_curve);
  const auto violations = pvx::validate(report.representation);
  for (const std::string& v : violations) std::cerr << "validate: " << v << "\n";
  const pvx::ParamCount pc = pvx::param_count(report.representation);
  std::cout << "fit done: final loss " << report.loss_curve.back()[1] << ", params " << pc.total
            << " (codes " << pc.codes << ", decoder " << pc.decoder << "), trajectory storage "
            << pc.trajectory << "\n";
  return violations.empty() ? 0 : 1;
}

void write_frame_output(const std::string& dir, int index, const pvx::ImageRgb& img,
                        const std::string& format) {
  fs::create_directories(dir);
  if (format == "ppm")
    pvx::write_ppm(frame_file(dir, index, "ppm"), img);
  else
    pvx::write_png_rgb(frame_file(dir, index, "png"), img);
}

int cmd_render(const pvx::PipelineConfig& cfg, const std::string& rep_path, const std::string& out_dir,
               int frame, double time, double scale, const std::string& drop, const std::string& format) {
  const pvx::Representation rep = pvx::load_pvr(rep_path);
  const std::set<int> drop_set = parse_drop(drop);
  if (time >= 0) {
    write_frame_output(out_dir, 0, pvx::render_time(rep, time, drop_set, cfg.threads), format);
    return 0;
  }
  if (scale > 0 && scale != 1.0) {
    const int f = frame < 0 ? 0 : frame;
    write_frame_output(out_dir, f, pvx::render_superres(rep, f, scale, drop_set, cfg.threads), format);
    return 0;
  }
  if (frame >= 0) {
    write_frame_output(out_dir, frame, pvx::render_frame(rep, frame, drop_set, cfg.threads), format);
    return 0;
  }
  for (int t = 0; t < rep.meta.n_frames; ++t)
    write_frame_output(out_dir, t, pvx::render_frame(rep, t, drop_set, cfg.threads), format);
  return 0;
}

int cmd_inpaint(const pvx::PipelineConfig& cfg, const std::string& rep_path, const std::string& out_dir,
                const std::string& drop, const std::string& format) {
  const pvx::Representation rep = pvx::load_pvr(rep_path);
  const auto frames = pvx::inpaint(rep, parse_drop(drop), cfg.threads);
  for (size_t t = 0; t < frames.size(); ++t)
    write_frame_output(out_dir, static_cast<int>(t), frames[t], format);
  return 0;
}

int cmd_edit(const pvx::PipelineConfig& cfg, const std::string& rep_path, int keyframe,
             const std::string& edited, const std::string& region, const std::string& out, int steps,
             double lr) {
  const pvx::Representation rep = pvx::load_pvr(rep_path);
  pvx::EditOptions opts;
  opts.steps = steps;
  opts.learning_rate = lr;
  opts.seed = cfg.train.seed;
  opts.threads = cfg.threads;
  const pvx::Representation edited_rep =
      pvx::edit_keyframe(rep, keyframe, pvx::read_png_rgb(edited), pvx::read_png_mask(region), opts);
  pvx::save_pvr(out, edited_rep);
  return 0;
}

int cmd_eval(const std::string& rendered, const std::string& reference, const std::string& out_json) {
  json frames = json::array();
  double psnr_sum = 0, ssim_sum = 0;
  int n = 0;
  for (int t = 0;; ++t) {
    std::string a = frame_file(rendered, t, "png");
    if (!fs::exists(a)) a = frame_file(rendered, t, "ppm");
    std::string b = frame_file(reference, t, "png");
    if (!fs::exists(b)) b = frame_file(reference, t, "ppm");
    if (!fs::exists(a) || !fs::exists(b)) break;
    auto read_any = [](const std::string& p) {
      return p.size() > 4 && p.substr(p.size() - 4) == ".ppm" ? pvx::read_ppm(p) : pvx::read_png_rgb(p);
    };
    const pvx::ImageRgb ia = read_any(a);
    const pvx::ImageRgb ib = read_any(b);
    const double p = pvx::psnr(ia, ib);
    const double s = pvx::ssim(ia, ib);
    frames.push_back({{"frame", t}, {"psnr", p}, {"ssim", s}});
    psnr_sum += p;
    ssim_sum += s;
    ++n;
  }
  if (n == 0) throw pvx::IoError("no frame pairs found under " + rendered + " / " + reference);
  json report;
  report["frames"] = frames;
  report["mean_psnr"] = psnr_sum / n;
  report["mean_ssim"] = ssim_sum / n;
  std::cout << report.dump(2) << "\n";
  if (!out_json.empty()) {
    std::ofstream f(out_json);
    f << report.dump(2) << "\n";
  }
  return 0;
}

int cmd_ablate(const pvx::PipelineConfig& base_cfg, const std::string& dataset,
               const std::string& scene_path, const std::string& out_dir) {
  Dataset d = load_dataset(dataset);
  pvx::GeneratedScene scene;
  if (base_cfg.tracker == "oracle") scene = load_scene_for_dataset(dataset, scene_path);
  fs::create_directories(out_dir);

  json report = json::array();
  for (const std::string& ablation : {"full", "wo-pos", "wo-U", "wo-layer", "F", "FL"}) {
    pvx::PipelineConfig cfg = base_cfg;
    cfg.ablation = ablation;
    cfg.finalize();
    const auto tracker = pvx::make_tracker(cfg, d.video, &scene);
    const pvx::BuiltLayers built = pvx::build_all_layers(d.video, d.masks, *tracker, cfg);
    const pvx::FitReport fit = pvx::run_fit(d.video, built, cfg);

    double final_loss = 0;
    const int tail = std::min<int>(100, static_cast<int>(fit.loss_curve.size()));
    for (int i = 0; i < tail; ++i)
      final_loss += fit.loss_curve[fit.loss_curve.size() - 1 - i][1] / tail;
    double mean_psnr = 0;
    for (int t = 0; t < d.video.frame_count(); ++t)
      mean_psnr += pvx::psnr(pvx::render_frame(fit.representation, t, {}, cfg.threads), d.video.frames[t]) /
                   d.video.frame_count();

    const std::string rep_path = (fs::path(out_dir) / ("rep_" + std::string(ablation) + ".pvr")).string();
    pvx::save_pvr(rep_path, fit.representation);
    report.push_back({{"ablation", ablation},
                      {"final_loss", final_loss},
                      {"mean_psnr", mean_psnr},
                      {"params", pvx::param_count(fit.representation).total}});
    std::cout << ablation << ": final loss " << final_loss << ", PSNR " << mean_psnr << "\n";
  }
  std::ofstream f((fs::path(out_dir) / "ablation_report.json").string());
  f << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layered proxy-node video representation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "config file (.json or .toml)");
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed override");
  app.add_option("--threads", g.threads, "worker threads");
  app.add_flag("--deterministic", g.deterministic, "single-threaded bit-reproducible mode");

  std::string spec_path, suite, out, dataset, scene_path, seeds_path, traj, curve, drop, format = "png";
  std::string rep_path;
  std::string edited, region, rendered, reference;
  int frame = -1, keyframe = 0, steps = 500;
  double time = -1, scale = 0, lr = 5e-3;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", spec_path, "scene spec JSON");
  synth->add_option("--suite", suite, "standard suite scene name or 'all'");
  synth->add_option("--out", out, "output dataset directory")->required();

  auto* vec = app.add_subcommand("vectorize", "extract per-layer seed nodes");
  vec->add_option("--dataset", dataset)->required();
  vec->add_option("--out", seeds_path, "seeds JSON path")->required();

  auto* build = app.add_subcommand("build", "build proxy-node trajectories");
  build->add_option("--dataset", dataset)->required();
  build->add_option("--scene", scene_path, "scene spec for the oracle tracker");
  build->add_option("--seeds", seeds_path, "precomputed seeds JSON (from vectorize)");
  build->add_option("--out", out, "output directory for .pvt files")->required();

  auto* fitc = app.add_subcommand("fit", "optimize the representation");
  fitc->add_option("--dataset", dataset)->required();
  fitc->add_option("--trajectories", traj, ".pvt directory")->required();
  fitc->add_option("--out", out, "output .pvr path")->required();
  fitc->add_option("--curve", curve, "loss curve CSV path");

  auto* render = app.add_subcommand("render", "decode frames from a representation");
  render->add_option("--rep", rep_path)->required();
  render->add_option("--out", out)->required();
  render->add_option("--frame", frame);
  render->add_option("--time", time, "fractional frame time");
  render->add_option("--scale", scale, "spatial superresolution factor");
  render->add_option("--drop-layers", drop, "comma-separated layer ids to exclude");
  render->add_option("--format", format, "png or ppm");

  auto* inp = app.add_subcommand("inpaint", "render with layers removed");
  inp->add_option("--rep", rep_path)->required();
  inp->add_option("--drop-layers", drop)->required();
  inp->add_option("--out", out)->required();
  inp->add_option("--format", format);

  auto* edit = app.add_subcommand("edit", "propagate a keyframe edit");
  edit->add_option("--rep", rep_path)->required();
  edit->add_option("--keyframe", keyframe)->required();
  edit->add_option("--edited", edited, "edited keyframe PNG")->required();
  edit->add_option("--region", region, "region mask PNG")->required();
  edit->add_option("--out", out)->required();
  edit->add_option("--steps", steps);
  edit->add_option("--lr", lr);

  auto* evalc = app.add_subcommand("eval", "PSNR/SSIM against reference frames");
  evalc->add_option("--rendered", rendered)->required();
  evalc->add_option("--reference", reference)->required();
  evalc->add_option("--out", out, "report JSON path");

  auto* abl = app.add_subcommand("ablate", "run the ablation matrix");
  abl->add_option("--dataset", dataset)->required();
  abl->add_option("--scene", scene_path);
  abl->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    const pvx::PipelineConfig cfg = make_config(g);
    if (synth->parsed()) return cmd_synth(spec_path, suite, out);
    if (vec->parsed()) return cmd_vectorize(cfg, dataset, seeds_path);
    if (build->parsed()) return cmd_build(cfg, dataset, scene_path, seeds_path, out);
    if (fitc->parsed()) return cmd_fit(cfg, dataset, traj, out, curve);
    if (render->parsed()) return cmd_render(cfg, rep_path, out, frame, time, scale, drop, format);
    if (inp->parsed()) return cmd_inpaint(cfg, rep_path, out, drop, format);
    if (edit->parsed()) return cmd_edit(cfg, rep_path, keyframe, edited, region, out, steps, lr);
    if (evalc->parsed()) return cmd_eval(rendered, reference, out);
    if (abl->parsed()) return cmd_ablate(cfg, dataset, scene_path, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
