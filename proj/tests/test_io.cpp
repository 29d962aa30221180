#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "pvx/config.hpp"
#include "pvx/error.hpp"
#include "pvx/io.hpp"
#include "pvx/renderer.hpp"

using namespace pvx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pvx_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("png round trip within quantization") {
  TempDir dir;
  ImageRgb img(20, 30);
  std::mt19937_64 rng(5);
  for (double& v : img.data) v = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  write_png_rgb(dir.file("a.png"), img);
  const ImageRgb back = read_png_rgb(dir.file("a.png"));
  REQUIRE(back.height == 20);
  REQUIRE(back.width == 30);
  for (size_t i = 0; i < img.data.size(); ++i) CHECK(std::abs(back.data[i] - img.data[i]) <= 0.5 / 255.0 + 1e-9);

  Mask m(20, 30);
  for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = (rng() & 1) ? 1 : 0;
  write_png_mask(dir.file("m.png"), m);
  CHECK(read_png_mask(dir.file("m.png")).data == m.data);

  CHECK_THROWS_AS(read_png_rgb(dir.file("missing.png")), IoError);
}

TEST_CASE("ppm round trip is bit-exact at 8 bits") {
  TempDir dir;
  ImageRgb img(15, 17);
  std::mt19937_64 rng(6);
  for (double& v : img.data) v = ((rng() % 256) / 255.0);
  write_ppm(dir.file("a.ppm"), img);
  const ImageRgb back = read_ppm(dir.file("a.ppm"));
  CHECK(back.data == img.data);
}

TEST_CASE("pvm mask track round trip") {
  TempDir dir;
  LayerMaskTrack track;
  track.layer_id = 2;
  track.t_start = 3;
  track.t_end = 5;
  std::mt19937_64 rng(7);
  for (int t = 0; t < 3; ++t) {
    Mask m(18, 25);
    for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = (rng() % 3 == 0) ? 1 : 0;
    track.masks.push_back(std::move(m));
  }
  save_pvm(dir.file("t.pvm"), track);
  const LayerMaskTrack back = load_pvm(dir.file("t.pvm"));
  CHECK(back.layer_id == 2);
  CHECK(back.t_start == 3);
  CHECK(back.t_end == 5);
  for (int t = 0; t < 3; ++t) CHECK(back.masks[t].data == track.masks[t].data);
}

TEST_CASE("pvt round trip preserves float32 payloads and provenance") {
  TempDir dir;
  ProxyLayer layer;
  layer.layer_id = 1;
  layer.t_start = 2;
  layer.t_end = 6;
  std::mt19937_64 rng(8);
  auto u = [&] { return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0); };
  for (int n = 0; n < 7; ++n) {
    const int idx = layer.add_node({u() * 50, u() * 50}, 2 + static_cast<int>(rng() % 5), static_cast<int>(rng() % 3));
    for (int t = 2; t <= 6; ++t) {
      layer.set_pos(idx, t, {u() * 50, u() * 50});
      layer.set_conf(idx, t, u());
    }
  }
  save_pvt(dir.file("l.pvt"), layer);
  const ProxyLayer back = load_pvt(dir.file("l.pvt"));
  CHECK(back.layer_id == 1);
  CHECK(back.t_start == 2);
  CHECK(back.t_end == 6);
  REQUIRE(back.node_count() == 7);
  for (size_t i = 0; i < layer.positions.size(); ++i)
    CHECK(back.positions[i] == quantize_f32(layer.positions[i]));
  CHECK(back.round_tag == layer.round_tag);
  CHECK(back.source_frame == layer.source_frame);

  // Second trip is bit-identical on disk.
  save_pvt(dir.file("l2.pvt"), back);
  CHECK(read_bytes(dir.file("l.pvt")) == read_bytes(dir.file("l2.pvt")));

  // A plain spec-layout file (no provenance extension) still loads.
  const auto bytes = read_bytes(dir.file("l.pvt"));
  const size_t plain_size = 4 + 4 * 4 + 7 * 5 * 2 * 4 + 7 * 5 * 4;
  write_bytes(dir.file("plain.pvt"), std::vector<uint8_t>(bytes.begin(), bytes.begin() + plain_size));
  const ProxyLayer plain = load_pvt(dir.file("plain.pvt"));
  CHECK(plain.node_count() == 7);
  CHECK(plain.round_tag == std::vector<int>(7, 0));
}

TEST_CASE("pvr: bit-exact round trip and render equality") {
  const auto& f = fixtures::fitted_s2();
  TempDir dir;
  save_pvr(dir.file("rep.pvr"), f.rep);
  const Representation back = load_pvr(dir.file("rep.pvr"));

  const ImageRgb before = render_frame(f.rep, 6);
  const ImageRgb after = render_frame(back, 6);
  CHECK(before.data == after.data);

  CHECK(param_count(back).total == param_count(f.rep).total);
  CHECK(validate(back).empty());

  save_pvr(dir.file("rep2.pvr"), back);
  CHECK(read_bytes(dir.file("rep.pvr")) == read_bytes(dir.file("rep2.pvr")));
}

TEST_CASE("pvr: malformed files are rejected with located errors") {
  const auto& f = fixtures::fitted_s2();
  TempDir dir;
  save_pvr(dir.file("rep.pvr"), f.rep);
  const auto bytes = read_bytes(dir.file("rep.pvr"));

  // Truncations at several depths.
  // The container tail carries up to 63 alignment padding bytes; cut 70 to
  // land inside the last real section.
  for (const size_t keep : {size_t{2}, size_t{10}, size_t{40}, bytes.size() / 2, bytes.size() - 70}) {
    write_bytes(dir.file("trunc.pvr"), std::vector<uint8_t>(bytes.begin(), bytes.begin() + keep));
    CHECK_THROWS_AS(load_pvr(dir.file("trunc.pvr")), IoError);
  }
  {
    write_bytes(dir.file("trunc2.pvr"), std::vector<uint8_t>(bytes.begin(), bytes.begin() + 40));
    try {
      load_pvr(dir.file("trunc2.pvr"));
      CHECK(false);
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("unexpected EOF") != std::string::npos);
    }
  }

  // Wrong magic.
  auto bad = bytes;
  bad[0] = 'X';
  write_bytes(dir.file("magic.pvr"), bad);
  CHECK_THROWS_AS(load_pvr(dir.file("magic.pvr")), IoError);

  // Unsupported version.
  bad = bytes;
  bad[4] = 0xE7;
  bad[5] = 0x03;  // version 999
  write_bytes(dir.file("version.pvr"), bad);
  try {
    load_pvr(dir.file("version.pvr"));
    CHECK(false);
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("unsupported version") != std::string::npos);
  }

  // Fuzzed single-byte corruptions must throw IoError or load, never crash.
  std::mt19937_64 rng(1357);
  int rejected = 0;
  for (int trial = 0; trial < 120; ++trial) {
    auto fuzz = bytes;
    const size_t pos = rng() % std::min<size_t>(fuzz.size(), 4096);
    fuzz[pos] ^= static_cast<uint8_t>(1 + (rng() % 255));
    write_bytes(dir.file("fuzz.pvr"), fuzz);
    try {
      (void)load_pvr(dir.file("fuzz.pvr"));
    } catch (const IoError&) {
      ++rejected;
    }
  }
  CHECK(rejected > 0);
}

TEST_CASE("pvt: truncated and corrupt files are rejected") {
  TempDir dir;
  ProxyLayer layer;
  layer.layer_id = 0;
  layer.t_start = 0;
  layer.t_end = 1;
  const int n = layer.add_node({1, 1}, 0, 0);
  layer.set_pos(n, 1, {2, 2});
  layer.set_conf(n, 1, 1.0);
  save_pvt(dir.file("a.pvt"), layer);
  const auto bytes = read_bytes(dir.file("a.pvt"));
  write_bytes(dir.file("t.pvt"), std::vector<uint8_t>(bytes.begin(), bytes.begin() + 12));
  CHECK_THROWS_AS(load_pvt(dir.file("t.pvt")), IoError);
  auto bad = bytes;
  bad[1] = 'x';
  write_bytes(dir.file("m.pvt"), bad);
  CHECK_THROWS_AS(load_pvt(dir.file("m.pvt")), IoError);
}

TEST_CASE("dataset round trip") {
  const auto& f = fixtures::fitted_s2();
  TempDir dir;
  write_dataset(dir.file("data"), f.scene.frames, f.scene.layers);
  const FrameSequence frames = read_frames(dir.file("data"));
  REQUIRE(frames.frame_count() == f.scene.frames.frame_count());
  const auto tracks = read_mask_tracks(dir.file("data"), frames.frame_count(), frames.height, frames.width);
  REQUIRE(tracks.size() == f.scene.layers.size());
  for (size_t li = 0; li < tracks.size(); ++li) {
    CHECK(tracks[li].t_start == f.scene.layers[li].t_start);
    CHECK(tracks[li].t_end == f.scene.layers[li].t_end);
    for (size_t m = 0; m < tracks[li].masks.size(); ++m)
      CHECK(tracks[li].masks[m].data == f.scene.layers[li].masks[m].data);
  }
}

TEST_CASE("scene spec and seeds JSON round trips") {
  TempDir dir;
  const SceneSpec spec = standard_suite()[2];
  save_scene_spec(dir.file("s.json"), spec);
  const SceneSpec back = load_scene_spec(dir.file("s.json"));
  CHECK(back.name == spec.name);
  CHECK(back.n_frames == spec.n_frames);
  CHECK(back.layers.size() == spec.layers.size());
  CHECK(back.layers[0].motion.angular_velocity == spec.layers[0].motion.angular_velocity);

  std::vector<std::pair<int, SeedNodes>> seeds;
  SeedNodes s;
  s.frame = 2;
  s.edge_points = {{1.5, 2.5}, {3, 4}};
  s.interior_points = {{5, 6}};
  seeds.push_back({1, s});
  save_seeds_json(dir.file("seeds.json"), seeds);
  const auto back_seeds = load_seeds_json(dir.file("seeds.json"));
  REQUIRE(back_seeds.size() == 1);
  CHECK(back_seeds[0].first == 1);
  CHECK(back_seeds[0].second.edge_points[0].x == 1.5);

  CHECK_THROWS_AS(load_scene_spec(dir.file("missing.json")), IoError);
}

TEST_CASE("config: JSON and TOML subset") {
  TempDir dir;
  {
    std::ofstream out(dir.file("c.json"));
    out << R"({"propagation": {"eps_d": 20.0}, "train": {"steps": 123, "seed": 9}, "tracker": "lk"})";
  }
  PipelineConfig c = load_config(dir.file("c.json"));
  c.finalize();
  CHECK(c.propagation.eps_d == 20.0);
  CHECK(c.train.steps == 123);
  CHECK(c.tracker == "lk");
  CHECK(c.vectorizer.spacing == 10.0);  // eps_d / 2 derived default

  {
    std::ofstream out(dir.file("c.toml"));
    out << "# comment\ntracker = \"oracle\"\n[propagation]\neps_d = 14.5\n[train]\nsteps = 77\n"
           "deterministic = false\n";
  }
  PipelineConfig t = load_config(dir.file("c.toml"));
  t.finalize();
  CHECK(t.propagation.eps_d == 14.5);
  CHECK(t.train.steps == 77);
  CHECK(t.tracker == "oracle");
  CHECK(t.vectorizer.spacing == doctest::Approx(7.25));

  {
    std::ofstream out(dir.file("bad.toml"));
    out << "key with no equals\n";
  }
  CHECK_THROWS_AS(load_config(dir.file("bad.toml")), IoError);

  const std::string snapshot = config_to_json(c);
  const PipelineConfig back = config_from_json_text(snapshot);
  CHECK(back.propagation.eps_d == 20.0);
  CHECK(back.train.steps == 123);
}

TEST_SUITE_END();
