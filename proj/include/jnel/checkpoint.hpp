#pragma once
// Versioned binary checkpoint container. Layout (all integers little-endian):
//
//   magic       8 bytes  "JNELCKPT"
//   version     u32
//   config      u64 length + UTF-8 `key = value` text
//   epoch       i64
//   adam_steps  u64
//   adam_lr     f64
//   rng_state   u64 length + text
//   3 sections  (parameters, Adam first moments, Adam second moments), each:
//     count     u64
//     count x { u64 name length, name, u32 rank, rank x u64 dims, f64 values }

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "jnel/autodiff.hpp"
#include "jnel/config.hpp"
#include "jnel/model.hpp"
#include "jnel/optim.hpp"

namespace jnel {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  ad::Shape shape;
  std::vector<double> values;

  friend bool operator==(const NamedArray&, const NamedArray&) = default;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  Config config;
  std::int64_t epoch = 0;
  std::uint64_t adam_steps = 0;
  double adam_lr = 0.0;
  std::string rng_state;
  std::vector<NamedArray> params;
  std::vector<NamedArray> adam_m;
  std::vector<NamedArray> adam_v;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Checkpoint snapshot(const JointModel& model, const ad::Adam& adam, std::int64_t epoch, const Rng& rng);

// Builds a model from the checkpoint's config and copies in its parameters.
// Missing, extra or mis-shaped arrays raise CheckpointError.
std::unique_ptr<JointModel> restore_model(const Checkpoint& ckpt);
// Optimizer state for a restored model.
ad::Adam restore_adam(const Checkpoint& ckpt, const JointModel& model);

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace jnel
