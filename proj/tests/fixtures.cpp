#include "fixtures.hpp"

namespace fixtures {

namespace {

FittedScene make_fitted(const pvx::SceneSpec& spec, int steps, int batch, int code_dim, int hidden,
                        int layers, int n_freq) {
  FittedScene f;
  f.scene = pvx::generate(spec);
  pvx::PipelineConfig cfg;
  cfg.decoder.code_dim = code_dim;
  cfg.decoder.hidden = hidden;
  cfg.decoder.layers = layers;
  cfg.decoder.n_freq = n_freq;
  cfg.train.steps = steps;
  cfg.train.batch_size = batch;
  cfg.train.seed = 1234;
  cfg.threads = 2;
  cfg.finalize();
  const pvx::OracleTracker tracker(f.scene);
  f.built = pvx::build_all_layers(f.scene.frames, f.scene.layers, tracker, cfg);
  pvx::FitReport report = pvx::run_fit(f.scene.frames, f.built, cfg);
  f.rep = std::move(report.representation);
  f.curve = std::move(report.loss_curve);
  return f;
}

}  // namespace

const FittedScene& fitted_s2() {
  static const FittedScene f = make_fitted(pvx::standard_suite()[1], 900, 2048, 16, 64, 4, 5);
  return f;
}

const FittedScene& fitted_gradient() {
  pvx::SceneSpec spec;
  spec.name = "gradient";
  spec.height = 32;
  spec.width = 32;
  spec.n_frames = 2;
  spec.background.kind = pvx::TextureSpec::Kind::kLinearGradient;
  spec.background.rgb[0] = 0.15;
  spec.background.rgb[1] = 0.25;
  spec.background.rgb[2] = 0.6;
  spec.background.rgb2[0] = 0.8;
  spec.background.rgb2[1] = 0.65;
  spec.background.rgb2[2] = 0.2;
  spec.background.dir_x = 1.0;
  spec.background.dir_y = 0.5;
  spec.background.scale = 40.0;
  static const FittedScene f = make_fitted(spec, 1500, 1024, 12, 48, 4, 4);
  return f;
}

}  // namespace fixtures
