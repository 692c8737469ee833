#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "json.hpp"
#include "oclu/unet.hpp"

namespace oclu {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

class Reader {
 public:
  Reader(std::string bytes, fs::path path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  std::string str(std::size_t n) { return std::string(take(n), n); }
  void floats(float* out, std::size_t n) { std::memcpy(out, take(n * 4), n * 4); }
  bool done() const { return pos_ == bytes_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("checkpoint " + path_.string() + ": " + what);
  }

 private:
  const char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail("truncated file");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::string bytes_;
  fs::path path_;
  std::size_t pos_ = 0;
};

nlohmann::json config_json(const UNetConfig& c) {
  return {{"depth", c.depth},
          {"base_filters", c.base_filters},
          {"output_channels", c.output_channels},
          {"image_size", c.image_size},
          {"kernel_size", c.kernel_size}};
}

}  // namespace

void save_checkpoint(const UNetModel& model, const fs::path& path) {
  const auto layout = unet_layout(model.config);
  if (layout.size() != model.params.size()) {
    throw std::invalid_argument("save_checkpoint: parameter list does not match the config");
  }
  std::string out(kCheckpointMagic, 4);
  put_u32(out, kCheckpointVersion);
  const std::string cfg = config_json(model.config).dump();
  put_u32(out, static_cast<std::uint32_t>(cfg.size()));
  out += cfg;
  put_u32(out, static_cast<std::uint32_t>(model.params.size()));
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const auto& name = model.names.at(i);
    const auto& t = model.params[i];
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    out.append(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(float));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint " + path.string() + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("checkpoint " + path.string() + ": write failed");
}

UNetModel load_checkpoint(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint " + path.string() + ": cannot open");
  Reader r(std::string(std::istreambuf_iterator<char>(f), {}), path);

  if (r.str(4) != std::string(kCheckpointMagic, 4)) r.fail("bad magic (not an OCLU checkpoint)");
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    r.fail("unsupported format version " + std::to_string(version));
  }
  UNetModel m;
  try {
    const auto j = nlohmann::json::parse(r.str(r.u32()));
    m.config.depth = j.at("depth").get<int>();
    m.config.base_filters = j.at("base_filters").get<int>();
    m.config.output_channels = j.at("output_channels").get<int>();
    m.config.image_size = j.at("image_size").get<int>();
    m.config.kernel_size = j.at("kernel_size").get<int>();
    m.config.validate();
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& e) {
    r.fail(std::string("bad config block: ") + e.what());
  }

  const auto layout = unet_layout(m.config);
  const auto count = r.u32();
  if (count != layout.size()) {
    r.fail("has " + std::to_string(count) + " parameters, config implies " +
           std::to_string(layout.size()));
  }
  for (const auto& [name, shape] : layout) {
    const auto got_name = r.str(r.u32());
    if (got_name != name) r.fail("expected parameter '" + name + "', found '" + got_name + "'");
    ad::Shape got_shape(r.u32());
    for (auto& d : got_shape) d = r.u32();
    if (got_shape != shape) {
      r.fail("parameter '" + name + "' has shape " + ad::to_string(got_shape) + ", config implies " +
             ad::to_string(shape));
    }
    ad::Tensor<float> t(shape);
    r.floats(t.data(), t.size());
    m.names.push_back(name);
    m.params.push_back(std::move(t));
  }
  if (!r.done()) r.fail("trailing bytes after the last parameter");
  return m;
}

}  // namespace oclu
