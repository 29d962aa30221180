#include <doctest.h>

#include "fixtures.hpp"
#include "pvx/representation.hpp"

using namespace pvx;

TEST_SUITE_BEGIN("representation");

TEST_CASE("param_count: hand-computed tiny configuration") {
  Representation rep;
  RepresentationLayer layer;
  layer.proxy.layer_id = 0;
  layer.proxy.t_start = 0;
  layer.proxy.t_end = 4;  // 5 frames
  for (int i = 0; i < 10; ++i) {
    const int n = layer.proxy.add_node({static_cast<double>(i), 0.0}, 0, 0);
    for (int t = 1; t <= 4; ++t) layer.proxy.set_pos(n, t, {static_cast<double>(i), 0.0});
  }
  layer.codes.codes = Eigen::MatrixXd::Zero(10, 4);  // g=10, c=4
  rep.layers.push_back(layer);
  // Decoder: 35 x 5 + 5 and 5 x 3 + 3 = 180 + 18 = 198 parameters.
  rep.decoder.weights.push_back(Eigen::MatrixXd::Zero(35, 5));
  rep.decoder.biases.push_back(Eigen::MatrixXd::Zero(1, 5));
  rep.decoder.weights.push_back(Eigen::MatrixXd::Zero(5, 3));
  rep.decoder.biases.push_back(Eigen::MatrixXd::Zero(1, 3));

  const ParamCount pc = param_count(rep);
  CHECK(pc.codes == 40);
  CHECK(pc.decoder == 198);
  CHECK(pc.total == 238);
  CHECK(pc.trajectory == 10 * 5 * 2);
}

TEST_CASE("param_count: zero layers leaves only the decoder") {
  Representation rep;
  rep.decoder.weights.push_back(Eigen::MatrixXd::Zero(8, 3));
  rep.decoder.biases.push_back(Eigen::MatrixXd::Zero(1, 3));
  const ParamCount pc = param_count(rep);
  CHECK(pc.codes == 0);
  CHECK(pc.decoder == 27);
  CHECK(pc.total == 27);
}

TEST_CASE("paper-scale parameter count lands near the reported magnitude") {
  // c=128, hidden 256, 8 layers, 9 frequencies, ~20k nodes across layers:
  // the optimized parameter count must sit in the low millions.
  const int c = 128;
  const int raw = c + 3;
  const int enc = raw * 18 + raw;
  long long decoder = static_cast<long long>(enc) * 256 + 256;
  decoder += 6 * (256LL * 256 + 256);
  decoder += 256LL * 3 + 3;
  const long long codes = 20000LL * c;
  const long long total = codes + decoder;
  CHECK(total > 1'000'000);
  CHECK(total < 10'000'000);
}

TEST_CASE("validate: fitted representation is clean; corruptions are reported") {
  const auto& f = fixtures::fitted_s2();
  CHECK(validate(f.rep).empty());

  Representation broken = f.rep;
  broken.layers[0].codes.codes.conservativeResize(broken.layers[0].codes.codes.rows() - 1,
                                                  Eigen::NoChange);
  auto violations = validate(broken);
  bool found = false;
  for (const std::string& v : violations)
    if (v.find("row-count mismatch") != std::string::npos) found = true;
  CHECK(found);

  Representation nan_rep = f.rep;
  nan_rep.layers[0].proxy.positions[3] = std::numeric_limits<double>::quiet_NaN();
  violations = validate(nan_rep);
  found = false;
  for (const std::string& v : violations)
    if (v.find("non-finite position") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("quantization: representation values are float32-clean") {
  const auto& f = fixtures::fitted_s2();
  for (const auto& layer : f.rep.layers) {
    for (double v : layer.proxy.positions) CHECK(v == quantize_f32(v));
    for (int r = 0; r < layer.codes.codes.rows(); ++r)
      for (int c = 0; c < layer.codes.codes.cols(); ++c)
        CHECK(layer.codes.codes(r, c) == quantize_f32(layer.codes.codes(r, c)));
  }
}

TEST_SUITE_END();
