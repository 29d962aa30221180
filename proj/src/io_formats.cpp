#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "pvx/error.hpp"
#include "pvx/io.hpp"

static_assert(std::endian::native == std::endian::little, "formats assume a little-endian host");

namespace fs = std::filesystem;
using nlohmann::json;

namespace pvx {

namespace {

std::string frame_name(int t) {
  char buf[32];
  snprintf(buf, sizeof(buf), "frame_%05d.png", t);
  return buf;
}
std::string mask_name(int t) {
  char buf[32];
  snprintf(buf, sizeof(buf), "mask_%05d.png", t);
  return buf;
}
std::string layer_dir_name(int id) {
  char buf[32];
  snprintf(buf, sizeof(buf), "layer_%02d", id);
  return buf;
}

class BinWriter {
 public:
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void f32(float v) { raw(&v, 4); }
  void bytes(const void* p, size_t n) { raw(p, n); }
  void pad_to(size_t align) {
    while (buf_.size() % align != 0) buf_.push_back(0);
  }
  size_t pos() const { return buf_.size(); }
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create file: " + path);
    out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw IoError("write failed: " + path);
  }

 private:
  void raw(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  std::vector<uint8_t> buf_;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open file: " + path);
    const auto size = in.tellg();
    in.seekg(0);
    buf_.resize(static_cast<size_t>(size));
    in.read(reinterpret_cast<char*>(buf_.data()), size);
    if (!in) throw IoError("read failed: " + path);
  }

  void seek(size_t off, const std::string& section) {
    if (off > buf_.size()) throw IoError("unexpected EOF at section '" + section + "' in " + path_);
    pos_ = off;
  }
  uint32_t u32(const std::string& section) {
    uint32_t v;
    take(&v, 4, section);
    return v;
  }
  uint64_t u64(const std::string& section) {
    uint64_t v;
    take(&v, 8, section);
    return v;
  }
  void f32_array(float* dst, size_t count, const std::string& section) {
    take(dst, count * 4, section);
  }
  void u32_array(uint32_t* dst, size_t count, const std::string& section) {
    take(dst, count * 4, section);
  }
  std::string text(size_t len, const std::string& section) {
    std::string s(len, '\0');
    take(s.data(), len, section);
    return s;
  }
  void magic(const char* expect, const std::string& section) {
    char m[4];
    take(m, 4, section);
    if (std::memcmp(m, expect, 4) != 0)
      throw IoError("bad magic in section '" + section + "' of " + path_ + " (expected " + expect + ")");
  }
  size_t remaining() const { return buf_.size() - pos_; }
  size_t size() const { return buf_.size(); }

 private:
  void take(void* dst, size_t n, const std::string& section) {
    if (pos_ + n > buf_.size()) throw IoError("unexpected EOF at section '" + section + "' in " + path_);
    std::memcpy(dst, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::string path_;
  std::vector<uint8_t> buf_;
  size_t pos_ = 0;
};

constexpr size_t kSaneCount = 1ull << 31;

void check_count(uint64_t n, const std::string& what) {
  if (n > kSaneCount) throw IoError("implausible " + what + " count: " + std::to_string(n));
}

}  // namespace

void write_dataset(const std::string& dir, const FrameSequence& frames,
                   const std::vector<LayerMaskTrack>& layers) {
  fs::create_directories(dir);
  for (int t = 0; t < frames.frame_count(); ++t)
    write_png_rgb((fs::path(dir) / frame_name(t)).string(), frames.frames[t]);
  for (const LayerMaskTrack& track : layers) {
    const fs::path ldir = fs::path(dir) / layer_dir_name(track.layer_id);
    fs::create_directories(ldir);
    for (int t = track.t_start; t <= track.t_end; ++t)
      write_png_mask((ldir / mask_name(t)).string(), track.mask_at(t));
  }
}

FrameSequence read_frames(const std::string& dir) {
  FrameSequence seq;
  for (int t = 0;; ++t) {
    const fs::path p = fs::path(dir) / frame_name(t);
    if (!fs::exists(p)) break;
    ImageRgb img = read_png_rgb(p.string());
    if (t == 0) {
      seq.height = img.height;
      seq.width = img.width;
    } else if (img.height != seq.height || img.width != seq.width) {
      throw IoError("frame dimensions differ at " + p.string());
    }
    seq.frames.push_back(std::move(img));
  }
  if (seq.frames.empty()) throw IoError("no frames found in " + dir);
  return seq;
}

std::vector<LayerMaskTrack> read_mask_tracks(const std::string& dir, int n_frames, int height, int width) {
  std::vector<LayerMaskTrack> tracks;
  bool have_background = false;
  for (int id = 0; id < 100; ++id) {
    const fs::path ldir = fs::path(dir) / layer_dir_name(id);
    if (!fs::exists(ldir)) continue;
    LayerMaskTrack track;
    track.layer_id = id;
    int t_s = -1, t_e = -1;
    std::vector<Mask> masks;
    for (int t = 0; t < n_frames; ++t) {
      const fs::path p = ldir / mask_name(t);
      if (!fs::exists(p)) {
        if (t_s >= 0 && t_e < 0) t_e = t - 1;
        continue;
      }
      if (t_s < 0) t_s = t;
      if (t_e >= 0) throw IoError("non-contiguous mask track in " + ldir.string());
      Mask m = read_png_mask(p.string());
      if (m.height != height || m.width != width) throw IoError("mask dimensions differ at " + p.string());
      masks.push_back(std::move(m));
    }
    if (t_s < 0) continue;
    if (t_e < 0) t_e = t_s + static_cast<int>(masks.size()) - 1;
    track.t_start = t_s;
    track.t_end = t_e;
    track.masks = std::move(masks);
    if (id == 0) have_background = true;
    tracks.push_back(std::move(track));
  }
  if (!have_background) {
    // Background = per-frame complement of the union of foreground masks.
    LayerMaskTrack bg;
    bg.layer_id = 0;
    bg.t_start = 0;
    bg.t_end = n_frames - 1;
    for (int t = 0; t < n_frames; ++t) {
      Mask m(height, width, 1);
      for (const LayerMaskTrack& track : tracks) {
        if (!track.alive_at(t)) continue;
        const Mask& fg = track.mask_at(t);
        for (size_t i = 0; i < m.data.size(); ++i)
          if (fg.data[i]) m.data[i] = 0;
      }
      bg.masks.push_back(std::move(m));
    }
    tracks.insert(tracks.begin(), std::move(bg));
  }
  std::sort(tracks.begin(), tracks.end(),
            [](const LayerMaskTrack& a, const LayerMaskTrack& b) { return a.layer_id < b.layer_id; });
  return tracks;
}

void save_pvm(const std::string& path, const LayerMaskTrack& track) {
  BinWriter w;
  w.bytes("PVM1", 4);
  w.u32(static_cast<uint32_t>(track.layer_id));
  w.u32(static_cast<uint32_t>(track.t_start));
  w.u32(static_cast<uint32_t>(track.masks.size()));
  w.u32(static_cast<uint32_t>(track.masks.empty() ? 0 : track.masks[0].height));
  w.u32(static_cast<uint32_t>(track.masks.empty() ? 0 : track.masks[0].width));
  for (const Mask& m : track.masks) {
    // Run lengths over row-major order, alternating values starting with 0.
    std::vector<uint32_t> runs;
    uint8_t value = 0;
    uint32_t len = 0;
    for (uint8_t v : m.data) {
      const uint8_t bit = v ? 1 : 0;
      if (bit == value) {
        ++len;
      } else {
        runs.push_back(len);
        value = bit;
        len = 1;
      }
    }
    runs.push_back(len);
    w.u32(static_cast<uint32_t>(runs.size()));
    for (uint32_t r : runs) w.u32(r);
  }
  w.save(path);
}

LayerMaskTrack load_pvm(const std::string& path) {
  BinReader r(path);
  r.magic("PVM1", "header");
  LayerMaskTrack track;
  track.layer_id = static_cast<int>(r.u32("layer_id"));
  track.t_start = static_cast<int>(r.u32("t_start"));
  const uint32_t n = r.u32("n_frames");
  const uint32_t h = r.u32("height");
  const uint32_t w = r.u32("width");
  check_count(n, "frame");
  check_count(static_cast<uint64_t>(h) * w, "pixel");
  track.t_end = track.t_start + static_cast<int>(n) - 1;
  for (uint32_t t = 0; t < n; ++t) {
    const std::string section = "mask[" + std::to_string(t) + "]";
    const uint32_t n_runs = r.u32(section);
    check_count(n_runs, "run");
    Mask m(static_cast<int>(h), static_cast<int>(w));
    size_t pos = 0;
    uint8_t value = 0;
    for (uint32_t i = 0; i < n_runs; ++i) {
      const uint32_t len = r.u32(section);
      if (pos + len > m.data.size()) throw IoError("run overflow in section '" + section + "' of " + path);
      std::fill(m.data.begin() + pos, m.data.begin() + pos + len, value);
      pos += len;
      value = 1 - value;
    }
    if (pos != m.data.size()) throw IoError("runs do not cover raster in section '" + section + "' of " + path);
    track.masks.push_back(std::move(m));
  }
  return track;
}

void save_pvt(const std::string& path, const ProxyLayer& layer) {
  BinWriter w;
  w.bytes("PVT1", 4);
  w.u32(static_cast<uint32_t>(layer.layer_id));
  w.u32(static_cast<uint32_t>(layer.node_count()));
  w.u32(static_cast<uint32_t>(layer.n_local()));
  w.u32(static_cast<uint32_t>(layer.t_start));
  for (double v : layer.positions) w.f32(static_cast<float>(v));
  for (double v : layer.confidence) w.f32(static_cast<float>(v));
  // Provenance extension (readers of the plain layout may stop above).
  for (int v : layer.round_tag) w.u32(static_cast<uint32_t>(v));
  for (int v : layer.source_frame) w.u32(static_cast<uint32_t>(v));
  w.save(path);
}

ProxyLayer load_pvt(const std::string& path) {
  BinReader r(path);
  r.magic("PVT1", "header");
  ProxyLayer layer;
  layer.layer_id = static_cast<int>(r.u32("layer_id"));
  const uint32_t g = r.u32("g");
  const uint32_t n = r.u32("n_frames");
  layer.t_start = static_cast<int>(r.u32("t_start"));
  check_count(g, "node");
  check_count(n, "frame");
  check_count(static_cast<uint64_t>(g) * n * 2, "position");
  layer.t_end = layer.t_start + static_cast<int>(n) - 1;
  std::vector<float> buf(static_cast<size_t>(g) * n * 2);
  r.f32_array(buf.data(), buf.size(), "positions");
  layer.positions.assign(buf.begin(), buf.end());
  buf.resize(static_cast<size_t>(g) * n);
  r.f32_array(buf.data(), buf.size(), "confidences");
  layer.confidence.assign(buf.begin(), buf.end());
  layer.round_tag.assign(g, 0);
  layer.source_frame.assign(g, layer.t_start);
  if (r.remaining() >= static_cast<size_t>(g) * 8) {
    std::vector<uint32_t> ints(g);
    r.u32_array(ints.data(), g, "round_tags");
    for (uint32_t i = 0; i < g; ++i) layer.round_tag[i] = static_cast<int>(ints[i]);
    r.u32_array(ints.data(), g, "source_frames");
    for (uint32_t i = 0; i < g; ++i) layer.source_frame[i] = static_cast<int>(ints[i]);
  }
  return layer;
}

namespace {

json mask_track_to_json(const LayerMaskTrack& track) {
  json j;
  j["layer_id"] = track.layer_id;
  j["t_start"] = track.t_start;
  j["t_end"] = track.t_end;
  j["height"] = track.masks.empty() ? 0 : track.masks[0].height;
  j["width"] = track.masks.empty() ? 0 : track.masks[0].width;
  json frames = json::array();
  for (const Mask& m : track.masks) {
    json runs = json::array();
    uint8_t value = 0;
    uint32_t len = 0;
    for (uint8_t v : m.data) {
      const uint8_t bit = v ? 1 : 0;
      if (bit == value) {
        ++len;
      } else {
        runs.push_back(len);
        value = bit;
        len = 1;
      }
    }
    runs.push_back(len);
    frames.push_back(runs);
  }
  j["runs"] = frames;
  return j;
}

LayerMaskTrack mask_track_from_json(const json& j, const std::string& path) {
  LayerMaskTrack track;
  track.layer_id = j.at("layer_id").get<int>();
  track.t_start = j.at("t_start").get<int>();
  track.t_end = j.at("t_end").get<int>();
  const int h = j.at("height").get<int>();
  const int w = j.at("width").get<int>();
  if (h <= 0 || w <= 0 || static_cast<uint64_t>(h) * w > kSaneCount)
    throw IoError("implausible mask dimensions in " + path);
  for (const json& runs : j.at("runs")) {
    Mask m(h, w);
    size_t pos = 0;
    uint8_t value = 0;
    for (const json& rj : runs) {
      const uint64_t len = rj.get<uint64_t>();
      if (pos + len > m.data.size()) throw IoError("mask run overflow in " + path);
      std::fill(m.data.begin() + pos, m.data.begin() + pos + len, value);
      pos += len;
      value = 1 - value;
    }
    if (pos != m.data.size()) throw IoError("mask runs do not cover raster in " + path);
    track.masks.push_back(std::move(m));
  }
  if (static_cast<int>(track.masks.size()) != track.t_end - track.t_start + 1)
    throw IoError("mask frame count mismatch in " + path);
  return track;
}

}  // namespace

void save_pvr(const std::string& path, const Representation& rep) {
  // Layout: magic | u32 version | u64 json_len | json | 64-byte-aligned f32
  // sections (per layer: positions, codes, confidence; then decoder arrays).
  // Offsets are recorded in the JSON table, so the JSON is built with
  // placeholder offsets first to fix its length, then patched.
  json meta;
  meta["height"] = rep.meta.height;
  meta["width"] = rep.meta.width;
  meta["n_frames"] = rep.meta.n_frames;
  meta["eps_d"] = rep.meta.eps_d;
  meta["config"] = rep.meta.config_json;

  json layers = json::array();
  for (const RepresentationLayer& l : rep.layers) {
    json lj;
    lj["layer_id"] = l.proxy.layer_id;
    lj["t_start"] = l.proxy.t_start;
    lj["t_end"] = l.proxy.t_end;
    lj["g"] = l.proxy.node_count();
    lj["c"] = l.codes.code_dim();
    lj["round_tag"] = l.proxy.round_tag;
    lj["source_frame"] = l.proxy.source_frame;
    lj["positions_offset"] = uint64_t{0};
    lj["codes_offset"] = uint64_t{0};
    lj["confidence_offset"] = uint64_t{0};
    layers.push_back(lj);
  }
  meta["layers"] = layers;

  json dec;
  dec["raw_dim"] = rep.decoder.raw_dim;
  dec["n_freq"] = rep.decoder.n_freq;
  dec["include_raw"] = rep.decoder.include_raw;
  dec["use_position"] = rep.decoder.use_position;
  json dims = json::array();
  json offsets = json::array();
  for (size_t l = 0; l < rep.decoder.weights.size(); ++l) {
    dims.push_back({rep.decoder.weights[l].rows(), rep.decoder.weights[l].cols()});
    offsets.push_back({uint64_t{0}, uint64_t{0}});
  }
  dec["dims"] = dims;
  dec["offsets"] = offsets;
  meta["decoder"] = dec;

  json masks = json::array();
  for (const LayerMaskTrack& track : rep.mask_tracks) masks.push_back(mask_track_to_json(track));
  meta["masks"] = masks;

  // Offsets depend on the JSON length and vice versa (digit counts), so
  // iterate the layout to a fixpoint before emitting.
  auto aligned = [](size_t v) { return (v + 63) & ~size_t{63}; };
  auto assign_offsets = [&](json& m) {
    size_t pos = aligned(4 + 4 + 8 + m.dump().size());
    for (size_t li = 0; li < rep.layers.size(); ++li) {
      const RepresentationLayer& l = rep.layers[li];
      m["layers"][li]["positions_offset"] = pos;
      pos = aligned(pos + l.proxy.positions.size() * 4);
      m["layers"][li]["codes_offset"] = pos;
      pos = aligned(pos + static_cast<size_t>(l.codes.codes.size()) * 4);
      m["layers"][li]["confidence_offset"] = pos;
      pos = aligned(pos + l.proxy.confidence.size() * 4);
    }
    for (size_t l = 0; l < rep.decoder.weights.size(); ++l) {
      m["decoder"]["offsets"][l][0] = pos;
      pos = aligned(pos + static_cast<size_t>(rep.decoder.weights[l].size()) * 4);
      m["decoder"]["offsets"][l][1] = pos;
      pos = aligned(pos + static_cast<size_t>(rep.decoder.biases[l].size()) * 4);
    }
  };
  for (int iter = 0; iter < 16; ++iter) {
    const size_t before = meta.dump().size();
    assign_offsets(meta);
    if (meta.dump().size() == before) break;
  }

  BinWriter w;
  w.bytes("PVXR", 4);
  w.u32(rep.meta.version);
  const std::string js = meta.dump();
  w.u64(js.size());
  w.bytes(js.data(), js.size());
  w.pad_to(64);
  for (const RepresentationLayer& l : rep.layers) {
    for (double v : l.proxy.positions) w.f32(static_cast<float>(v));
    w.pad_to(64);
    for (int rr = 0; rr < l.codes.codes.rows(); ++rr)
      for (int cc = 0; cc < l.codes.codes.cols(); ++cc) w.f32(static_cast<float>(l.codes.codes(rr, cc)));
    w.pad_to(64);
    for (double v : l.proxy.confidence) w.f32(static_cast<float>(v));
    w.pad_to(64);
  }
  for (size_t l = 0; l < rep.decoder.weights.size(); ++l) {
    const Eigen::MatrixXd& wm = rep.decoder.weights[l];
    for (int rr = 0; rr < wm.rows(); ++rr)
      for (int cc = 0; cc < wm.cols(); ++cc) w.f32(static_cast<float>(wm(rr, cc)));
    w.pad_to(64);
    const Eigen::MatrixXd& bm = rep.decoder.biases[l];
    for (int cc = 0; cc < bm.cols(); ++cc) w.f32(static_cast<float>(bm(0, cc)));
    w.pad_to(64);
  }
  w.save(path);
}

Representation load_pvr(const std::string& path) {
  BinReader r(path);
  r.magic("PVXR", "header");
  const uint32_t version = r.u32("version");
  if (version != 1) throw IoError("unsupported version " + std::to_string(version) + " in " + path);
  const uint64_t json_len = r.u64("json length");
  if (json_len > r.size()) throw IoError("unexpected EOF at section 'metadata' in " + path);
  const std::string js = r.text(json_len, "metadata");
  json meta;
  try {
    meta = json::parse(js);
  } catch (const json::exception& e) {
    throw IoError("malformed JSON metadata in " + path + ": " + e.what());
  }

  Representation rep;
  try {
    rep.meta.version = version;
    rep.meta.height = meta.at("height").get<int>();
    rep.meta.width = meta.at("width").get<int>();
    rep.meta.n_frames = meta.at("n_frames").get<int>();
    rep.meta.eps_d = meta.at("eps_d").get<double>();
    rep.meta.config_json = meta.at("config").get<std::string>();

    for (const json& lj : meta.at("layers")) {
      RepresentationLayer layer;
      ProxyLayer& p = layer.proxy;
      p.layer_id = lj.at("layer_id").get<int>();
      p.t_start = lj.at("t_start").get<int>();
      p.t_end = lj.at("t_end").get<int>();
      const uint64_t g = lj.at("g").get<uint64_t>();
      const uint64_t c = lj.at("c").get<uint64_t>();
      check_count(g, "node");
      check_count(c, "code-dim");
      if (p.t_end < p.t_start) throw IoError("invalid layer frame range in " + path);
      const uint64_t n_local = static_cast<uint64_t>(p.t_end - p.t_start + 1);
      check_count(g * n_local * 2, "position");
      p.round_tag = lj.at("round_tag").get<std::vector<int>>();
      p.source_frame = lj.at("source_frame").get<std::vector<int>>();
      if (p.round_tag.size() != g || p.source_frame.size() != g)
        throw IoError("layer table count mismatch in " + path);

      std::vector<float> buf(g * n_local * 2);
      r.seek(lj.at("positions_offset").get<uint64_t>(), "positions");
      r.f32_array(buf.data(), buf.size(), "positions");
      p.positions.assign(buf.begin(), buf.end());

      buf.resize(g * c);
      r.seek(lj.at("codes_offset").get<uint64_t>(), "codes");
      r.f32_array(buf.data(), buf.size(), "codes");
      layer.codes.codes.resize(static_cast<int>(g), static_cast<int>(c));
      for (uint64_t rr = 0; rr < g; ++rr)
        for (uint64_t cc = 0; cc < c; ++cc)
          layer.codes.codes(static_cast<int>(rr), static_cast<int>(cc)) = buf[rr * c + cc];

      buf.resize(g * n_local);
      r.seek(lj.at("confidence_offset").get<uint64_t>(), "confidence");
      r.f32_array(buf.data(), buf.size(), "confidence");
      p.confidence.assign(buf.begin(), buf.end());

      rep.layers.push_back(std::move(layer));
    }

    const json& dec = meta.at("decoder");
    rep.decoder.raw_dim = dec.at("raw_dim").get<int>();
    rep.decoder.n_freq = dec.at("n_freq").get<int>();
    rep.decoder.include_raw = dec.at("include_raw").get<bool>();
    rep.decoder.use_position = dec.at("use_position").get<bool>();
    const json& dims = dec.at("dims");
    const json& offsets = dec.at("offsets");
    for (size_t l = 0; l < dims.size(); ++l) {
      const uint64_t rows = dims[l][0].get<uint64_t>();
      const uint64_t cols = dims[l][1].get<uint64_t>();
      check_count(rows * cols, "weight");
      std::vector<float> buf(rows * cols);
      r.seek(offsets[l][0].get<uint64_t>(), "decoder weights");
      r.f32_array(buf.data(), buf.size(), "decoder weights");
      Eigen::MatrixXd w(rows, cols);
      for (uint64_t rr = 0; rr < rows; ++rr)
        for (uint64_t cc = 0; cc < cols; ++cc) w(static_cast<int>(rr), static_cast<int>(cc)) = buf[rr * cols + cc];
      rep.decoder.weights.push_back(std::move(w));
      buf.resize(cols);
      r.seek(offsets[l][1].get<uint64_t>(), "decoder biases");
      r.f32_array(buf.data(), buf.size(), "decoder biases");
      Eigen::MatrixXd b(1, cols);
      for (uint64_t cc = 0; cc < cols; ++cc) b(0, static_cast<int>(cc)) = buf[cc];
      rep.decoder.biases.push_back(std::move(b));
    }

    for (const json& mj : meta.at("masks")) rep.mask_tracks.push_back(mask_track_from_json(mj, path));
  } catch (const json::exception& e) {
    throw IoError("malformed metadata in " + path + ": " + e.what());
  }
  return rep;
}

std::string diagnostics_json_line(int layer_id, const LayerDiagnostics& diag) {
  json j;
  j["layer"] = layer_id;
  j["nodes_per_round"] = diag.nodes_per_round;
  j["per_frame_max_distance"] = diag.per_frame_max_distance;
  j["fallback_count"] = diag.fallback_count;
  j["raw_fallback_count"] = diag.raw_fallback_count;
  j["uncovered_frames"] = diag.uncovered_frames;
  j["warnings"] = diag.warnings;
  return j.dump();
}

void write_diagnostics(const std::string& path, const std::vector<int>& layer_ids,
                       const std::vector<LayerDiagnostics>& diags) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create file: " + path);
  for (size_t i = 0; i < diags.size(); ++i) out << diagnostics_json_line(layer_ids[i], diags[i]) << "\n";
}

void write_loss_curve_csv(const std::string& path, const std::vector<std::array<double, 3>>& curve) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create file: " + path);
  out << "step,loss,psnr_estimate\n";
  for (const auto& row : curve)
    out << static_cast<long>(row[0]) << "," << row[1] << "," << row[2] << "\n";
}

namespace {

json texture_to_json(const TextureSpec& t) {
  json j;
  const char* names[] = {"constant", "checker", "value_noise", "linear_gradient"};
  j["kind"] = names[static_cast<int>(t.kind)];
  j["rgb"] = {t.rgb[0], t.rgb[1], t.rgb[2]};
  j["rgb2"] = {t.rgb2[0], t.rgb2[1], t.rgb2[2]};
  j["scale"] = t.scale;
  j["amplitude"] = t.amplitude;
  j["dir"] = {t.dir_x, t.dir_y};
  j["seed"] = t.seed;
  return j;
}

TextureSpec texture_from_json(const json& j) {
  TextureSpec t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant")
    t.kind = TextureSpec::Kind::kConstant;
  else if (kind == "checker")
    t.kind = TextureSpec::Kind::kChecker;
  else if (kind == "value_noise")
    t.kind = TextureSpec::Kind::kValueNoise;
  else if (kind == "linear_gradient")
    t.kind = TextureSpec::Kind::kLinearGradient;
  else
    throw IoError("unknown texture kind: " + kind);
  for (int c = 0; c < 3; ++c) t.rgb[c] = j.at("rgb")[c].get<double>();
  for (int c = 0; c < 3; ++c) t.rgb2[c] = j.at("rgb2")[c].get<double>();
  t.scale = j.at("scale").get<double>();
  t.amplitude = j.at("amplitude").get<double>();
  t.dir_x = j.at("dir")[0].get<double>();
  t.dir_y = j.at("dir")[1].get<double>();
  t.seed = j.at("seed").get<uint64_t>();
  return t;
}

json motion_to_json(const MotionModel& m) {
  json j;
  j["kind"] = m.kind == MotionModel::Kind::kAffine ? "affine" : "path";
  j["center0"] = {m.center0.x, m.center0.y};
  j["velocity"] = {m.velocity.x, m.velocity.y};
  j["accel"] = {m.accel.x, m.accel.y};
  json wps = json::array();
  for (const Point2& p : m.waypoints) wps.push_back({p.x, p.y});
  j["waypoints"] = wps;
  j["path_duration"] = m.path_duration;
  j["angle0"] = m.angle0;
  j["angular_velocity"] = m.angular_velocity;
  j["scale0"] = m.scale0;
  j["scale_rate"] = m.scale_rate;
  return j;
}

MotionModel motion_from_json(const json& j) {
  MotionModel m;
  m.kind = j.at("kind").get<std::string>() == "path" ? MotionModel::Kind::kPath : MotionModel::Kind::kAffine;
  m.center0 = {j.at("center0")[0].get<double>(), j.at("center0")[1].get<double>()};
  m.velocity = {j.at("velocity")[0].get<double>(), j.at("velocity")[1].get<double>()};
  m.accel = {j.at("accel")[0].get<double>(), j.at("accel")[1].get<double>()};
  for (const json& wp : j.at("waypoints")) m.waypoints.push_back({wp[0].get<double>(), wp[1].get<double>()});
  m.path_duration = j.at("path_duration").get<double>();
  m.angle0 = j.at("angle0").get<double>();
  m.angular_velocity = j.at("angular_velocity").get<double>();
  m.scale0 = j.at("scale0").get<double>();
  m.scale_rate = j.at("scale_rate").get<double>();
  return m;
}

}  // namespace

std::string scene_spec_to_json(const SceneSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["height"] = spec.height;
  j["width"] = spec.width;
  j["n_frames"] = spec.n_frames;
  j["seed"] = spec.seed;
  j["background"] = texture_to_json(spec.background);
  json layers = json::array();
  for (const LayerSpec& l : spec.layers) {
    json lj;
    lj["shape"] = l.shape == LayerSpec::Shape::kDisk ? "disk" : "rectangle";
    lj["radius"] = l.radius;
    lj["half_w"] = l.half_w;
    lj["half_h"] = l.half_h;
    lj["texture"] = texture_to_json(l.texture);
    lj["motion"] = motion_to_json(l.motion);
    layers.push_back(lj);
  }
  j["layers"] = layers;
  return j.dump(2);
}

SceneSpec scene_spec_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed scene spec JSON: ") + e.what());
  }
  try {
    SceneSpec spec;
    spec.name = j.value("name", "scene");
    spec.height = j.at("height").get<int>();
    spec.width = j.at("width").get<int>();
    spec.n_frames = j.at("n_frames").get<int>();
    spec.seed = j.value("seed", uint64_t{0});
    spec.background = texture_from_json(j.at("background"));
    if (j.count("layers")) {
      for (const json& lj : j.at("layers")) {
        LayerSpec l;
        l.shape = lj.at("shape").get<std::string>() == "disk" ? LayerSpec::Shape::kDisk
                                                              : LayerSpec::Shape::kRectangle;
        l.radius = lj.value("radius", 10.0);
        l.half_w = lj.value("half_w", 10.0);
        l.half_h = lj.value("half_h", 10.0);
        l.texture = texture_from_json(lj.at("texture"));
        l.motion = motion_from_json(lj.at("motion"));
        spec.layers.push_back(l);
      }
    }
    return spec;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed scene spec: ") + e.what());
  }
}

SceneSpec load_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene spec: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scene_spec_from_json_text(text);
}

void save_scene_spec(const std::string& path, const SceneSpec& spec) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create file: " + path);
  out << scene_spec_to_json(spec) << "\n";
}

void save_seeds_json(const std::string& path, const std::vector<std::pair<int, SeedNodes>>& seeds) {
  json j = json::array();
  for (const auto& [layer_id, s] : seeds) {
    json sj;
    sj["layer_id"] = layer_id;
    sj["frame"] = s.frame;
    json edge = json::array(), interior = json::array();
    for (const Point2& p : s.edge_points) edge.push_back({p.x, p.y});
    for (const Point2& p : s.interior_points) interior.push_back({p.x, p.y});
    sj["edge_points"] = edge;
    sj["interior_points"] = interior;
    j.push_back(sj);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot create file: " + path);
  out << j.dump(2) << "\n";
}

std::vector<std::pair<int, SeedNodes>> load_seeds_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open seeds file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed seeds JSON in " + path + ": " + e.what());
  }
  std::vector<std::pair<int, SeedNodes>> out;
  try {
    for (const json& sj : j) {
      SeedNodes s;
      s.frame = sj.at("frame").get<int>();
      for (const json& p : sj.at("edge_points")) s.edge_points.push_back({p[0].get<double>(), p[1].get<double>()});
      for (const json& p : sj.at("interior_points"))
        s.interior_points.push_back({p[0].get<double>(), p[1].get<double>()});
      out.push_back({sj.at("layer_id").get<int>(), std::move(s)});
    }
  } catch (const json::exception& e) {
    throw IoError("malformed seeds JSON in " + path + ": " + e.what());
  }
  return out;
}

}  // namespace pvx
