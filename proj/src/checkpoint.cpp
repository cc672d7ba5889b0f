#include "jnel/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>

namespace jnel {
namespace {

constexpr char kMagic[8] = {'J', 'N', 'E', 'L', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw CheckpointError("truncated checkpoint");
  return v;
}

std::string get_string(std::istream& in, std::size_t limit = std::size_t{1} << 30) {
  const auto n = get<std::uint64_t>(in);
  if (n > limit) throw CheckpointError("corrupt checkpoint: string length " + std::to_string(n));
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw CheckpointError("truncated checkpoint");
  return s;
}

void put_section(std::ostream& out, const std::vector<NamedArray>& arrays) {
  put<std::uint64_t>(out, arrays.size());
  for (const NamedArray& a : arrays) {
    put_string(out, a.name);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(a.shape.size()));
    for (std::size_t d : a.shape) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * 8));
  }
}

std::vector<NamedArray> get_section(std::istream& in) {
  const auto count = get<std::uint64_t>(in);
  if (count > (1u << 20)) throw CheckpointError("corrupt checkpoint: " + std::to_string(count) + " arrays");
  std::vector<NamedArray> out(count);
  for (NamedArray& a : out) {
    a.name = get_string(in, 4096);
    const auto rank = get<std::uint32_t>(in);
    if (rank > 8) throw CheckpointError("corrupt checkpoint: rank " + std::to_string(rank));
    a.shape.resize(rank);
    for (std::size_t& d : a.shape) d = get<std::uint64_t>(in);
    const std::size_t n = ad::shape_size(a.shape);
    if (n > (std::size_t{1} << 32)) throw CheckpointError("corrupt checkpoint: array '" + a.name + "' too large");
    a.values.resize(n);
    if (n && !in.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(n * 8))) {
      throw CheckpointError("truncated checkpoint in array '" + a.name + "'");
    }
  }
  return out;
}

void copy_into(const std::vector<NamedArray>& arrays, const ad::ParameterSet& params,
               const std::function<std::vector<double>&(std::size_t)>& target, const char* what) {
  if (arrays.size() != params.count()) {
    throw CheckpointError(std::string(what) + ": checkpoint has " + std::to_string(arrays.size()) +
                          " arrays, model expects " + std::to_string(params.count()));
  }
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    const ad::Parameter& p = params.at(i);
    if (arrays[i].name != p.name || arrays[i].shape != p.tensor.shape) {
      throw CheckpointError(std::string(what) + ": array '" + arrays[i].name + "' " +
                            ad::shape_string(arrays[i].shape) + " does not match model parameter '" + p.name + "' " +
                            ad::shape_string(p.tensor.shape));
    }
    target(i) = arrays[i].values;
  }
}

}  // namespace

Checkpoint snapshot(const JointModel& model, const ad::Adam& adam, std::int64_t epoch, const Rng& rng) {
  Checkpoint ckpt;
  ckpt.config = model.config();
  ckpt.epoch = epoch;
  ckpt.adam_steps = adam.step_count();
  ckpt.adam_lr = adam.lr();
  ckpt.rng_state = rng.state();
  const auto& params = model.params();
  for (std::size_t i = 0; i < params.count(); ++i) {
    const ad::Parameter& p = params.at(i);
    ckpt.params.push_back({p.name, p.tensor.shape, p.tensor.values});
    if (i < adam.states().size()) {
      ckpt.adam_m.push_back({p.name, p.tensor.shape, adam.states()[i].m});
      ckpt.adam_v.push_back({p.name, p.tensor.shape, adam.states()[i].v});
    }
  }
  return ckpt;
}

std::unique_ptr<JointModel> restore_model(const Checkpoint& ckpt) {
  auto model = std::make_unique<JointModel>(ckpt.config);
  auto& params = model->params();
  copy_into(ckpt.params, params, [&](std::size_t i) -> std::vector<double>& { return params.at(i).tensor.values; },
            "parameters");
  return model;
}

ad::Adam restore_adam(const Checkpoint& ckpt, const JointModel& model) {
  const Config& c = ckpt.config;
  ad::Adam adam(model.params(), ckpt.adam_lr, c.beta1, c.beta2, c.eps);
  auto& states = adam.states();
  if (!ckpt.adam_m.empty()) {
    copy_into(ckpt.adam_m, model.params(), [&](std::size_t i) -> std::vector<double>& { return states[i].m; },
              "adam first moments");
    copy_into(ckpt.adam_v, model.params(), [&](std::size_t i) -> std::vector<double>& { return states[i].v; },
              "adam second moments");
  }
  for (auto& s : states) s.step_count = ckpt.adam_steps;
  return adam;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, ckpt.version);
  put_string(out, ckpt.config.to_text());
  put<std::int64_t>(out, ckpt.epoch);
  put<std::uint64_t>(out, ckpt.adam_steps);
  put<double>(out, ckpt.adam_lr);
  put_string(out, ckpt.rng_state);
  put_section(out, ckpt.params);
  put_section(out, ckpt.adam_m);
  put_section(out, ckpt.adam_v);
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw CheckpointError("not a checkpoint file");
  }
  Checkpoint ckpt;
  ckpt.version = get<std::uint32_t>(in);
  if (ckpt.version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(ckpt.version));
  }
  ckpt.config = parse_config_text(get_string(in));
  ckpt.epoch = get<std::int64_t>(in);
  ckpt.adam_steps = get<std::uint64_t>(in);
  ckpt.adam_lr = get<double>(in);
  ckpt.rng_state = get_string(in);
  ckpt.params = get_section(in);
  ckpt.adam_m = get_section(in);
  ckpt.adam_v = get_section(in);
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes after the last section");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write '" + path + "'");
  write_checkpoint(out, ckpt);
  if (!out) throw CheckpointError("error while writing '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace jnel
